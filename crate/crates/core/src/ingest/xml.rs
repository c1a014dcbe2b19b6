use super::{Emitter, IngestReport};
use crate::error::IngestError;
use crate::graph::Graph;
use crate::model::{DatasetId, NodeId, NodeKind};
use crate::typing::LabelPath;

/// Element tree shared by the XML and HTML mappings.
#[derive(Debug, Default)]
pub(crate) struct Element {
    pub name: String,
    pub attributes: Vec<(String, String)>,
    pub children: Vec<Content>,
}

#[derive(Debug)]
pub(crate) enum Content {
    Element(Element),
    Text(String),
}

pub fn ingest_xml(
    graph: &mut Graph,
    document: &str,
    ds: DatasetId,
) -> Result<IngestReport, IngestError> {
    let options = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    let doc = roxmltree::Document::parse_with_options(document, options)
        .map_err(|e| IngestError::Parse(e.to_string()))?;
    let root = convert(doc.root_element());
    ingest_tree(graph, &root, ds)
}

fn convert(node: roxmltree::Node<'_, '_>) -> Element {
    let mut out = Element {
        name: node.tag_name().name().to_string(),
        attributes: node
            .attributes()
            .map(|a| (a.name().to_string(), a.value().to_string()))
            .collect(),
        children: Vec::new(),
    };
    for child in node.children() {
        if child.is_element() {
            out.children.push(Content::Element(convert(child)));
        } else if child.is_text() {
            if let Some(t) = child.text() {
                out.children.push(Content::Text(t.to_string()));
            }
        }
    }
    out
}

/// Element → child element edges carry the child's tag; element → attribute
/// edges carry the attribute name and attribute → value edges are ε, as are
/// element → text edges. Whitespace-only text is layout and is dropped.
pub(crate) fn ingest_tree(
    graph: &mut Graph,
    root: &Element,
    ds: DatasetId,
) -> Result<IngestReport, IngestError> {
    let mut em = Emitter::new(graph, ds)?;
    let mut path = LabelPath::root(ds);
    path.push(&root.name);
    let id = map_element(&mut em, root, &mut path)?;
    em.anchor(id)?;
    Ok(em.finish())
}

fn map_element(
    em: &mut Emitter<'_>,
    element: &Element,
    path: &mut LabelPath,
) -> Result<NodeId, IngestError> {
    let node = em.fresh(&element.name, NodeKind::ElementNode)?;
    for (name, value) in &element.attributes {
        let attr = em.fresh(name, NodeKind::AttributeNode)?;
        em.edge(node, attr, name)?;
        path.push(&format!("@{name}"));
        let v = em.value(value, path)?;
        path.pop();
        em.edge(attr, v, "")?;
    }
    for child in &element.children {
        match child {
            Content::Element(e) => {
                path.push(&e.name);
                let c = map_element(em, e, path)?;
                path.pop();
                em.edge(node, c, &e.name)?;
            }
            Content::Text(t) => {
                let t = t.trim();
                if t.is_empty() {
                    continue;
                }
                path.push("#text");
                let v = em.value(t, path)?;
                path.pop();
                em.edge(node, v, "")?;
            }
        }
    }
    Ok(node)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DataModel;

    fn run(doc: &str) -> IngestReport {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Xml, None).unwrap();
        ingest_xml(&mut g, doc, ds).unwrap()
    }

    #[test]
    fn element_with_attribute_and_text() {
        let r = run(r#"<r a="1">t</r>"#);
        assert_eq!((r.nodes, r.edges), (4, 3));
    }

    #[test]
    fn empty_element() {
        let r = run("<r/>");
        assert_eq!((r.nodes, r.edges), (1, 0));
    }

    #[test]
    fn mixed_content() {
        let r = run("<r>one<b/>two</r>");
        assert_eq!(r.nodes, 4);
        assert_eq!(r.edges, 3);
    }

    #[test]
    fn malformed_is_rejected() {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Xml, None).unwrap();
        assert!(ingest_xml(&mut g, "<r>", ds).is_err());
    }
}
