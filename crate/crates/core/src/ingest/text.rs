use std::collections::BTreeSet;

use super::{Emitter, IngestReport};
use crate::error::IngestError;
use crate::graph::Graph;
use crate::model::{DatasetId, NodeKind};

/// Rule-based sentence splitter.
///
/// A boundary is a run of `.`, `!` or `?` followed by whitespace and an
/// uppercase letter. A period never ends a sentence after a single capital
/// (an initial) or after a listed abbreviation.
#[derive(Clone, Debug)]
pub struct Segmenter {
    abbreviations: BTreeSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Self::with_abbreviations(Self::ABBREVIATIONS.iter().copied())
    }
}

impl Segmenter {
    pub const ABBREVIATIONS: [&'static str; 24] = [
        "M", "MM", "Mme", "Mmes", "Mlle", "Dr", "Pr", "Me", "Mgr", "St", "Ste", "Mr", "Mrs", "Ms",
        "Prof", "etc", "cf", "p", "pp", "vol", "no", "art", "av", "bd",
    ];

    pub fn with_abbreviations<'a>(list: impl IntoIterator<Item = &'a str>) -> Self {
        Self {
            abbreviations: list.into_iter().map(str::to_lowercase).collect(),
        }
    }

    pub fn split(&self, text: &str) -> Vec<String> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < chars.len() {
            if !matches!(chars[i], '.' | '!' | '?') {
                i += 1;
                continue;
            }
            let mut end = i + 1;
            while end < chars.len() && matches!(chars[end], '.' | '!' | '?') {
                end += 1;
            }
            let mut next = end;
            while next < chars.len() && chars[next].is_whitespace() {
                next += 1;
            }
            let boundary = next > end
                && next < chars.len()
                && chars[next].is_uppercase()
                && !(chars[i] == '.' && end == i + 1 && self.protected(&chars[start..i]));
            if boundary {
                push_segment(&mut out, &chars[start..end]);
                start = next;
            }
            i = end;
        }
        push_segment(&mut out, &chars[start..]);
        out
    }

    /// Whether the word just before a period is an initial or abbreviation.
    fn protected(&self, before: &[char]) -> bool {
        let word: String = before
            .iter()
            .rev()
            .take_while(|c| c.is_alphanumeric())
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect();
        let mut letters = word.chars();
        let single_capital =
            matches!((letters.next(), letters.next()), (Some(c), None) if c.is_uppercase());
        single_capital || self.abbreviations.contains(&word.to_lowercase())
    }
}

fn push_segment(out: &mut Vec<String>, chars: &[char]) {
    let s: String = chars.iter().collect();
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

/// One ε root (an array node) with one text segment child per sentence; the
/// edges carry the 1-based sentence position.
pub fn ingest_text(
    graph: &mut Graph,
    text: &str,
    segmenter: &Segmenter,
    ds: DatasetId,
) -> Result<IngestReport, IngestError> {
    let mut em = Emitter::new(graph, ds)?;
    let root = em.fresh("", NodeKind::ArrayNode)?;
    em.anchor(root)?;
    for (i, sentence) in segmenter.split(text).iter().enumerate() {
        let seg = em.fresh(sentence, NodeKind::TextSegmentNode)?;
        em.edge(root, seg, &(i + 1).to_string())?;
    }
    Ok(em.finish())
}
