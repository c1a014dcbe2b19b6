use scraper::{ElementRef, Html, Node};

use super::xml::{ingest_tree, Content, Element};
use super::IngestReport;
use crate::error::IngestError;
use crate::graph::Graph;
use crate::model::DatasetId;

/// Lenient HTML mapping. The tree is mapped as XML; attribute and text values
/// with URI syntax become URI nodes, shared across the whole graph.
pub fn ingest_html(
    graph: &mut Graph,
    document: &str,
    ds: DatasetId,
) -> Result<IngestReport, IngestError> {
    let html = Html::parse_document(document);
    let root = convert(html.root_element());
    ingest_tree(graph, &root, ds)
}

fn convert(element: ElementRef<'_>) -> Element {
    let value = element.value();
    let mut out = Element {
        name: value.name().to_string(),
        attributes: value
            .attrs()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        children: Vec::new(),
    };
    for child in element.children() {
        match child.value() {
            Node::Element(_) => {
                if let Some(e) = ElementRef::wrap(child) {
                    out.children.push(Content::Element(convert(e)));
                }
            }
            Node::Text(t) => out.children.push(Content::Text(t.to_string())),
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DataModel, NodeKind};

    #[test]
    fn hyperlink_target_is_a_uri_node() {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Html, None).unwrap();
        ingest_html(&mut g, r#"<a href="http://a.org">label</a>"#, ds).unwrap();
        let nodes = g.nodes().unwrap();
        assert!(nodes
            .iter()
            .any(|n| n.kind == NodeKind::ElementNode && n.label == "a"));
        assert!(nodes
            .iter()
            .any(|n| n.kind == NodeKind::UriNode && n.label == "http://a.org"));
        assert!(g.edges().unwrap().iter().any(|e| e.label == "href"));
    }

    #[test]
    fn two_pages_share_the_link_target() {
        let mut g = Graph::in_memory();
        for _ in 0..2 {
            let ds = g.register_dataset(DataModel::Html, None).unwrap();
            ingest_html(&mut g, r#"<p><a href="http://a.org">x</a></p>"#, ds).unwrap();
        }
        let uris = g
            .nodes()
            .unwrap()
            .into_iter()
            .filter(|n| n.kind == NodeKind::UriNode)
            .count();
        assert_eq!(uris, 1);
    }

    #[test]
    fn paragraph_without_links() {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Html, None).unwrap();
        ingest_html(&mut g, "<p>hi</p><!-- note -->", ds).unwrap();
        let nodes = g.nodes().unwrap();
        assert!(!nodes.iter().any(|n| n.kind == NodeKind::UriNode));
        assert!(nodes.iter().any(|n| n.label == "hi"));
        assert!(!nodes.iter().any(|n| n.label.contains("note")));
    }
}
