use std::path::PathBuf;

use clap::Args;
use integraph::matching::MatchingMode;
use integraph::pipeline::{BuildConfig, ExtractorSpec, ServiceSpec};
use integraph::{FactorizationPolicy, NullCodes};

/// Settings shared by every command. Each one overrides the config file and
/// may also come from an `INTEGRAPH_*` environment variable.
#[derive(Args, Debug, Default)]
pub struct Overrides {
    /// TOML file with build settings
    #[arg(long, global = true, env = "INTEGRAPH_CONFIG")]
    pub config: Option<PathBuf>,
    /// per-instance, per-path, per-dataset or per-graph
    #[arg(long, global = true, env = "INTEGRAPH_POLICY")]
    pub policy: Option<FactorizationPolicy>,
    /// One null code per line; replaces the configured set
    #[arg(long, global = true, env = "INTEGRAPH_NULL_CODES_FILE")]
    pub null_codes_file: Option<PathBuf>,
    /// off, gazetteer:<path> or the URL of an extraction service
    #[arg(long, global = true, env = "INTEGRAPH_EXTRACTOR")]
    pub extractor: Option<ExtractorSpec>,
    /// off or the URL of a disambiguation service
    #[arg(long, global = true, env = "INTEGRAPH_NED")]
    pub ned: Option<ServiceSpec>,
    /// off or the base URL of the PDF extraction service
    #[arg(long, global = true, env = "INTEGRAPH_PDF_SERVICE")]
    pub pdf_service: Option<ServiceSpec>,
    /// off, entity or full
    #[arg(long, global = true, env = "INTEGRAPH_MATCHING")]
    pub matching: Option<MatchingMode>,
    #[arg(long, global = true, env = "INTEGRAPH_BUFFER_SIZE")]
    pub buffer_size: Option<usize>,
    #[arg(long, global = true, env = "INTEGRAPH_CACHE_SIZE")]
    pub cache_size: Option<usize>,
    /// Language tag sent to the extraction and disambiguation services
    #[arg(long, global = true, env = "INTEGRAPH_LANG")]
    pub lang: Option<String>,
}

impl Overrides {
    pub fn resolve(&self) -> Result<BuildConfig, String> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => BuildConfig::default(),
        };
        if let Some(p) = self.policy {
            config.policy = p;
        }
        if let Some(path) = &self.null_codes_file {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            config.null_codes = NullCodes::parse_list(&text);
        }
        if let Some(e) = &self.extractor {
            config.extractor = e.clone();
        }
        if let Some(s) = &self.ned {
            config.ned = s.clone();
        }
        if let Some(s) = &self.pdf_service {
            config.pdf_service = s.clone();
        }
        if let Some(m) = self.matching {
            config.matching = m;
        }
        if let Some(n) = self.buffer_size {
            config.buffer_size = n;
        }
        if let Some(n) = self.cache_size {
            config.cache_size = n;
        }
        if let Some(l) = &self.lang {
            config.lang = l.clone();
        }
        if config.buffer_size == 0 || config.cache_size == 0 {
            return Err("buffer-size and cache-size must be positive".into());
        }
        Ok(config)
    }
}

pub fn parse_config(text: &str) -> Result<BuildConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_overrides() {
        let file = r#"
policy = "per-graph"
null-codes = ["N/A", "Données non publiées"]
extractor = "gazetteer:lexicon.tsv"
matching = "entity-only"
buffer-size = 64
lang = "en"
"#;
        let config = parse_config(file).unwrap();
        assert_eq!(config.policy, FactorizationPolicy::PerGraph);
        assert_eq!(config.null_codes.len(), 2);
        assert_eq!(
            config.extractor,
            ExtractorSpec::Gazetteer("lexicon.tsv".into())
        );
        assert_eq!(config.matching, MatchingMode::EntityOnly);
        assert_eq!(config.cache_size, BuildConfig::default().cache_size);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, file).unwrap();
        let o = Overrides {
            config: Some(path),
            policy: Some(FactorizationPolicy::PerPath),
            matching: Some(MatchingMode::Off),
            ..Default::default()
        };
        let config = o.resolve().unwrap();
        assert_eq!(config.policy, FactorizationPolicy::PerPath);
        assert_eq!(config.matching, MatchingMode::Off);
        assert_eq!(config.buffer_size, 64);
        assert_eq!(config.lang, "en");
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(parse_config("polcy = \"per-graph\"").is_err());
        assert!(parse_config("extractor = \"spacy\"").is_err());
        assert!(parse_config("matching = \"some\"").is_err());
        let o = Overrides {
            buffer_size: Some(0),
            ..Default::default()
        };
        assert!(o.resolve().is_err());
    }
}
