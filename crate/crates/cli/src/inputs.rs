use std::path::{Path, PathBuf};

use integraph::DataModel;

/// A dataset argument: `[MODEL:]PATH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputSpec {
    pub model: DataModel,
    pub path: PathBuf,
}

fn model_named(name: &str) -> Option<DataModel> {
    Some(match name.to_ascii_lowercase().as_str() {
        "json" => DataModel::Json,
        "xml" => DataModel::Xml,
        "html" | "htm" => DataModel::Html,
        "text" | "txt" => DataModel::Text,
        "csv" | "relational" => DataModel::Relational,
        "rdf" | "nt" | "ntriples" => DataModel::Rdf,
        "table2d" | "grid" => DataModel::Table2d,
        "pdf" => DataModel::PdfDerived,
        _ => return None,
    })
}

impl std::str::FromStr for InputSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some((prefix, rest)) = s.split_once(':') {
            if let Some(model) = model_named(prefix) {
                if rest.is_empty() {
                    return Err(format!("missing path after {prefix}:"));
                }
                return Ok(InputSpec {
                    model,
                    path: rest.into(),
                });
            }
        }
        let path = Path::new(s);
        let model = path
            .extension()
            .and_then(|e| e.to_str())
            .and_then(model_named)
            .ok_or_else(|| {
                format!("cannot tell the data model of {s}; prefix it, e.g. json:{s}")
            })?;
        Ok(InputSpec {
            model,
            path: path.to_path_buf(),
        })
    }
}

/// `file://` URI of an existing path.
pub fn file_uri(path: &Path) -> Option<String> {
    let absolute = std::fs::canonicalize(path).ok()?;
    url::Url::from_file_path(absolute).ok().map(String::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn models_from_extension_and_prefix() {
        let s: InputSpec = "data/decl.csv".parse().unwrap();
        assert_eq!(s.model, DataModel::Relational);
        let s: InputSpec = "kb.nt".parse().unwrap();
        assert_eq!(s.model, DataModel::Rdf);
        let s: InputSpec = "json:export.dump".parse().unwrap();
        assert_eq!(
            (s.model, s.path),
            (DataModel::Json, PathBuf::from("export.dump"))
        );
        let s: InputSpec = "table2d:grid.json".parse().unwrap();
        assert_eq!(s.model, DataModel::Table2d);
    }

    #[test]
    fn unknown_prefix_is_part_of_the_path() {
        let s: InputSpec = "c:/data/a.xml".parse().unwrap();
        assert_eq!(s.model, DataModel::Xml);
        assert!("notes.unknown".parse::<InputSpec>().is_err());
        assert!("json:".parse::<InputSpec>().is_err());
    }
}
