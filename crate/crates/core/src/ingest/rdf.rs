use std::io::BufRead;

use super::{Emitter, IngestReport};
use crate::error::IngestError;
use crate::graph::Graph;
use crate::model::{DatasetId, NodeId, NodeKind};
use crate::typing::LabelPath;

const MAX_ISSUES: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal {
        value: String,
        datatype: Option<String>,
        lang: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

/// Parses one N-Triples line. Blank lines and comments yield `Ok(None)`.
pub fn parse_ntriples_line(line: &str) -> Result<Option<Triple>, String> {
    let mut p = Parser { rest: line.trim() };
    if p.rest.is_empty() || p.rest.starts_with('#') {
        return Ok(None);
    }
    let subject = p.term()?;
    if matches!(subject, Term::Literal { .. }) {
        return Err("literal in subject position".into());
    }
    let predicate = match p.term()? {
        Term::Iri(iri) => iri,
        _ => return Err("predicate must be an IRI".into()),
    };
    let object = p.term()?;
    p.skip_ws();
    p.rest = p.rest.strip_prefix('.').ok_or("missing final '.'")?;
    p.skip_ws();
    if !(p.rest.is_empty() || p.rest.starts_with('#')) {
        return Err(format!("trailing content {:?}", p.rest));
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

/// Parses a whole document, returning the triples and the per-line errors.
pub fn parse_ntriples(text: &str) -> (Vec<Triple>, Vec<(usize, String)>) {
    let mut triples = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        match parse_ntriples_line(line) {
            Ok(Some(t)) => triples.push(t),
            Ok(None) => {}
            Err(e) => errors.push((i + 1, e)),
        }
    }
    (triples, errors)
}

struct Parser<'a> {
    rest: &'a str,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn term(&mut self) -> Result<Term, String> {
        self.skip_ws();
        if let Some(r) = self.rest.strip_prefix('<') {
            let end = r.find('>').ok_or("unterminated IRI")?;
            let iri = unescape(&r[..end])?;
            if iri.is_empty() || iri.contains(char::is_whitespace) {
                return Err(format!("invalid IRI <{iri}>"));
            }
            self.rest = &r[end + 1..];
            Ok(Term::Iri(iri))
        } else if let Some(r) = self.rest.strip_prefix("_:") {
            let end = r.find(|c: char| c.is_whitespace()).unwrap_or(r.len());
            let label = r[..end].trim_end_matches('.');
            if label.is_empty() {
                return Err("empty blank node label".into());
            }
            self.rest = &r[label.len()..];
            Ok(Term::Blank(label.to_string()))
        } else if let Some(r) = self.rest.strip_prefix('"') {
            let mut escaped = false;
            let mut end = None;
            for (i, c) in r.char_indices() {
                match c {
                    _ if escaped => escaped = false,
                    '\\' => escaped = true,
                    '"' => {
                        end = Some(i);
                        break;
                    }
                    _ => {}
                }
            }
            let end = end.ok_or("unterminated literal")?;
            let value = unescape(&r[..end])?;
            self.rest = &r[end + 1..];
            let mut datatype = None;
            let mut lang = None;
            if let Some(r) = self.rest.strip_prefix("^^") {
                self.rest = r;
                match self.term()? {
                    Term::Iri(iri) => datatype = Some(iri),
                    _ => return Err("datatype must be an IRI".into()),
                }
            } else if let Some(r) = self.rest.strip_prefix('@') {
                let end = r
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                    .unwrap_or(r.len());
                if end == 0 {
                    return Err("empty language tag".into());
                }
                lang = Some(r[..end].to_string());
                self.rest = &r[end..];
            }
            Ok(Term::Literal {
                value,
                datatype,
                lang,
            })
        } else {
            Err(format!("unexpected term at {:?}", self.rest))
        }
    }
}

fn unescape(s: &str) -> Result<String, String> {
    if !s.contains('\\') {
        return Ok(s.to_string());
    }
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('b') => out.push('\u{8}'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('f') => out.push('\u{c}'),
            Some('"') => out.push('"'),
            Some('\'') => out.push('\''),
            Some('\\') => out.push('\\'),
            Some(u @ ('u' | 'U')) => {
                let width = if u == 'u' { 4 } else { 8 };
                let hex: String = chars.by_ref().take(width).collect();
                let code = u32::from_str_radix(&hex, 16)
                    .ok()
                    .filter(|_| hex.len() == width)
                    .and_then(char::from_u32)
                    .ok_or_else(|| format!("bad escape \\{u}{hex}"))?;
                out.push(code);
            }
            other => {
                return Err(format!(
                    "bad escape \\{}",
                    other.map(String::from).unwrap_or_default()
                ))
            }
        }
    }
    Ok(out)
}

/// Maps triples: every IRI is one graph-wide URI node, literals are values
/// fused graph-wide, blank nodes are ε values scoped to the dataset. Each
/// triple is one edge labeled with its predicate.
pub fn ingest_triples(
    graph: &mut Graph,
    triples: impl IntoIterator<Item = Triple>,
    ds: DatasetId,
) -> Result<IngestReport, IngestError> {
    let mut em = Emitter::new(graph, ds)?;
    let root = LabelPath::root(ds);
    for t in triples {
        add_triple(&mut em, &root, &t)?;
    }
    Ok(em.finish())
}

/// Streams N-Triples; invalid lines are skipped and counted as rejected.
pub fn ingest_rdf(
    graph: &mut Graph,
    reader: impl BufRead,
    ds: DatasetId,
) -> Result<IngestReport, IngestError> {
    let mut em = Emitter::new(graph, ds)?;
    let root = LabelPath::root(ds);
    for (i, line) in reader.lines().enumerate() {
        match parse_ntriples_line(&line?) {
            Ok(Some(t)) => add_triple(&mut em, &root, &t)?,
            Ok(None) => {}
            Err(e) => {
                em.report.rejected += 1;
                if em.report.issues.len() < MAX_ISSUES {
                    em.report.issues.push(format!("line {}: {e}", i + 1));
                }
            }
        }
    }
    Ok(em.finish())
}

fn add_triple(em: &mut Emitter<'_>, root: &LabelPath, t: &Triple) -> Result<(), IngestError> {
    let s = term_node(em, root, &t.subject)?;
    let o = term_node(em, root, &t.object)?;
    em.edge(s, o, &t.predicate)?;
    Ok(())
}

fn term_node(em: &mut Emitter<'_>, root: &LabelPath, term: &Term) -> Result<NodeId, IngestError> {
    Ok(match term {
        Term::Iri(iri) => em.uri(iri)?,
        Term::Blank(id) => em.keyed(format!("blank:{}:{id}", em.ds), "", NodeKind::ValueNode)?,
        Term::Literal { value, .. } => em.value(value, root)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DataModel;

    fn load(text: &str) -> IngestReport {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Rdf, None).unwrap();
        ingest_rdf(&mut g, text.as_bytes(), ds).unwrap()
    }

    #[test]
    fn parses_terms() {
        let t = parse_ntriples_line(r#"<http://a> <http://p> "Café"@fr ."#)
            .unwrap()
            .unwrap();
        assert_eq!(t.subject, Term::Iri("http://a".into()));
        assert_eq!(
            t.object,
            Term::Literal {
                value: "Café".into(),
                datatype: None,
                lang: Some("fr".into())
            }
        );
        let t = parse_ntriples_line(
            r#"_:b1 <http://p> "3"^^<http://www.w3.org/2001/XMLSchema#integer> ."#,
        )
        .unwrap()
        .unwrap();
        assert_eq!(t.subject, Term::Blank("b1".into()));
        assert!(parse_ntriples_line("# comment").unwrap().is_none());
        assert!(parse_ntriples_line(r#""x" <http://p> <http://o> ."#).is_err());
        assert!(parse_ntriples_line("<http://a> <http://p> <http://o>").is_err());
    }

    #[test]
    fn shared_subject() {
        let r = load("<http://a> <http://p> <http://b> .\n<http://a> <http://q> <http://c> .\n");
        assert_eq!((r.nodes, r.edges), (3, 2));
    }

    #[test]
    fn shared_object() {
        let r = load("<http://a> <http://p> <http://b> .\n<http://c> <http://p> <http://b> .\n");
        assert_eq!((r.nodes, r.edges), (3, 2));
    }

    #[test]
    fn empty_stream() {
        let r = load("");
        assert_eq!((r.nodes, r.edges), (0, 0));
    }

    #[test]
    fn invalid_lines_are_counted() {
        let r =
            load("<http://a> <http://p> <http://b> .\nnot a triple\n<http://a> <http://p> \"x .\n");
        assert_eq!(r.rejected, 2);
        assert_eq!(r.edges, 1);
    }

    #[test]
    fn blank_nodes_stay_in_their_dataset() {
        let mut g = Graph::in_memory();
        for _ in 0..2 {
            let ds = g.register_dataset(DataModel::Rdf, None).unwrap();
            ingest_rdf(&mut g, "_:x <http://p> \"Paris\" .\n".as_bytes(), ds).unwrap();
        }
        let nodes = g.nodes().unwrap();
        let blanks = nodes
            .iter()
            .filter(|n| n.kind == NodeKind::ValueNode && n.label.is_empty())
            .count();
        let paris = nodes.iter().filter(|n| n.label == "Paris").count();
        assert_eq!((blanks, paris), (2, 1));
    }
}
