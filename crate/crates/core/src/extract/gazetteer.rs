use std::collections::HashMap;
use std::path::Path;

use super::{EntityOccurrence, EntityType, Extractor};
use crate::error::ServiceError;

#[derive(Clone, Debug)]
struct Entry {
    surface: Vec<char>,
    entity_type: EntityType,
    confidence: f64,
}

/// Lexicon-driven extractor: longest match, aligned on word boundaries.
///
/// Entries are indexed by their first word and tried longest first, so
/// "New York" wins over "York". Matching is case-sensitive.
#[derive(Clone, Debug, Default)]
pub struct Gazetteer {
    by_first_word: HashMap<String, Vec<Entry>>,
    len: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn first_word(chars: &[char]) -> String {
    chars.iter().take_while(|c| is_word_char(**c)).collect()
}

impl Gazetteer {
    pub fn new<'a>(
        entries: impl IntoIterator<Item = (&'a str, EntityType, f64)>,
    ) -> Result<Self, String> {
        let mut g = Gazetteer::default();
        for (surface, t, c) in entries {
            g.insert(surface, t, c)?;
        }
        if g.len == 0 {
            return Err("empty lexicon".into());
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn insert(
        &mut self,
        surface: &str,
        entity_type: EntityType,
        confidence: f64,
    ) -> Result<(), String> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(format!(
                "{surface:?}: confidence {confidence} outside [0, 1]"
            ));
        }
        let chars: Vec<char> = surface.trim().chars().collect();
        let head = first_word(&chars);
        if head.is_empty() {
            return Err(format!("{surface:?} must start with a letter or digit"));
        }
        if !chars.last().is_some_and(|c| is_word_char(*c))
            && !chars.last().is_some_and(|c| *c == '.')
        {
            return Err(format!("{surface:?} must end with a letter, digit or '.'"));
        }
        let bucket = self.by_first_word.entry(head).or_default();
        if let Some(e) = bucket.iter_mut().find(|e| e.surface == chars) {
            e.entity_type = entity_type;
            e.confidence = confidence;
            return Ok(());
        }
        bucket.push(Entry {
            surface: chars,
            entity_type,
            confidence,
        });
        bucket.sort_by_key(|e| std::cmp::Reverse(e.surface.len()));
        self.len += 1;
        Ok(())
    }

    /// Reads `surface<TAB>TYPE<TAB>confidence` lines; `#` starts a comment and
    /// a missing confidence means 1.
    pub fn from_tsv(text: &str) -> Result<Self, String> {
        let mut g = Gazetteer::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(surface), Some(t)) = (cols.next(), cols.next()) else {
                return Err(format!(
                    "line {}: expected surface<TAB>type[<TAB>confidence]",
                    i + 1
                ));
            };
            let t: EntityType = t
                .trim()
                .parse()
                .map_err(|e| format!("line {}: {e}", i + 1))?;
            let c = match cols.next() {
                Some(c) => c
                    .trim()
                    .parse()
                    .map_err(|_| format!("line {}: bad confidence {c:?}", i + 1))?,
                None => 1.0,
            };
            g.insert(surface, t, c)
                .map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        if g.len == 0 {
            return Err("empty lexicon".into());
        }
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_tsv(&text)
    }

    pub fn scan(&self, text: &str) -> Vec<EntityOccurrence> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let at_word_start = is_word_char(chars[i]) && (i == 0 || !is_word_char(chars[i - 1]));
            if !at_word_start {
                i += 1;
                continue;
            }
            let head = first_word(&chars[i..]);
            let hit = self.by_first_word.get(&head).and_then(|bucket| {
                bucket.iter().find(|e| {
                    let end = i + e.surface.len();
                    end <= chars.len()
                        && chars[i..end] == e.surface[..]
                        && (end == chars.len()
                            || !is_word_char(chars[end])
                            || !is_word_char(chars[end - 1]))
                })
            });
            match hit {
                Some(e) => {
                    let end = i + e.surface.len();
                    out.push(EntityOccurrence {
                        start: i,
                        end,
                        entity_type: e.entity_type,
                        confidence: e.confidence,
                        surface: e.surface.iter().collect(),
                    });
                    i = end;
                }
                None => i += head.chars().count().max(1),
            }
        }
        out
    }
}

impl Extractor for Gazetteer {
    fn extract(&self, text: &str) -> Result<Vec<EntityOccurrence>, ServiceError> {
        Ok(self.scan(text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_hit_with_lexicon_confidence() {
        let g = Gazetteer::new([("Areva", EntityType::Organization, 0.9)]).unwrap();
        let occ = g.scan("chez Areva.");
        assert_eq!(occ.len(), 1);
        assert_eq!((occ[0].start, occ[0].end, occ[0].confidence), (5, 10, 0.9));
    }

    #[test]
    fn longest_match_wins() {
        let g = Gazetteer::new([
            ("York", EntityType::Location, 1.0),
            ("New York", EntityType::Location, 1.0),
        ])
        .unwrap();
        let occ = g.scan("I love New York and York.");
        let surfaces: Vec<&str> = occ.iter().map(|o| o.surface.as_str()).collect();
        assert_eq!(surfaces, vec!["New York", "York"]);
    }

    #[test]
    fn word_boundaries() {
        let g = Gazetteer::new([("Paris", EntityType::Location, 1.0)]).unwrap();
        assert!(g.scan("Parisien").is_empty());
        assert!(g.scan("aParis").is_empty());
        assert_eq!(g.scan("Paris, Paris").len(), 2);
        assert!(g.scan("").is_empty());
        assert!(g.scan("rien ici").is_empty());
    }

    #[test]
    fn motivating_sentence() {
        let g = Gazetteer::new([
            ("P. Balkany", EntityType::Person, 0.95),
            ("Levallois-Perret", EntityType::Location, 0.9),
        ])
        .unwrap();
        let occ = g.scan("P. Balkany était maire de Levallois-Perret");
        let got: Vec<(&str, EntityType)> = occ
            .iter()
            .map(|o| (o.surface.as_str(), o.entity_type))
            .collect();
        assert_eq!(
            got,
            vec![
                ("P. Balkany", EntityType::Person),
                ("Levallois-Perret", EntityType::Location)
            ]
        );
        assert_eq!(occ[1].start, 26);
    }

    #[test]
    fn tsv_format() {
        let g = Gazetteer::from_tsv("# lexicon\nAreva\tORG\t0.9\nMarrakech\tLOC\n").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.scan("Marrakech")[0].confidence, 1.0);
        assert!(Gazetteer::from_tsv("").is_err());
        assert!(Gazetteer::from_tsv("x\tFOO\n").is_err());
        assert!(Gazetteer::new(std::iter::empty()).is_err());
    }
}
