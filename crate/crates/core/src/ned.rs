//! Named-entity disambiguation: a client for a linking service and the
//! `cl:sameAsUri` links it produces.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{GraphError, ServiceError};
use crate::extract::EntityType;
use crate::graph::Graph;
use crate::model::{labels, EdgeId, NodeId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub entity_type: EntityType,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NedRequest {
    pub text: String,
    pub lang: String,
    pub mentions: Vec<Mention>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub uri: Option<String>,
}

/// One link per mention, in request order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NedResult {
    pub links: Vec<Link>,
}

impl NedResult {
    pub fn empty(n: usize) -> Self {
        Self {
            links: vec![Link::default(); n],
        }
    }

    /// Checks alignment with `req` and URI syntax.
    pub fn validate(&self, req: &NedRequest) -> Result<(), ServiceError> {
        if self.links.len() != req.mentions.len() {
            return Err(ServiceError::Protocol(format!(
                "{} links for {} mentions",
                self.links.len(),
                req.mentions.len()
            )));
        }
        for uri in self.links.iter().filter_map(|l| l.uri.as_deref()) {
            url::Url::parse(uri)
                .map_err(|_| ServiceError::Protocol(format!("invalid URI {uri:?}")))?;
        }
        Ok(())
    }
}

pub trait Disambiguator: Send + Sync {
    fn disambiguate(&self, req: &NedRequest) -> Result<NedResult, ServiceError>;
}

#[cfg(feature = "remote")]
#[derive(Clone, Debug)]
pub struct RemoteDisambiguator {
    endpoint: String,
    agent: ureq::Agent,
}

#[cfg(feature = "remote")]
impl RemoteDisambiguator {
    pub fn new(endpoint: &str) -> Self {
        Self {
            endpoint: endpoint.to_string(),
            agent: crate::remote::agent(),
        }
    }
}

#[cfg(feature = "remote")]
impl Disambiguator for RemoteDisambiguator {
    fn disambiguate(&self, req: &NedRequest) -> Result<NedResult, ServiceError> {
        if req.mentions.is_empty() {
            return Ok(NedResult::default());
        }
        let result: NedResult =
            crate::remote::read_json(self.agent.post(&self.endpoint).send_json(req))?;
        result.validate(req)?;
        Ok(result)
    }
}

type CacheKey = (String, usize, usize, EntityType);

/// Caches answers per (sentence, span, type) and absorbs service failures.
pub struct NedClient<'a> {
    service: &'a dyn Disambiguator,
    lang: String,
    cache: HashMap<CacheKey, Option<String>>,
    pub requests: usize,
    pub failures: usize,
    pub issues: Vec<String>,
}

impl<'a> NedClient<'a> {
    pub fn new(service: &'a dyn Disambiguator, lang: &str) -> Self {
        Self {
            service,
            lang: lang.to_string(),
            cache: HashMap::new(),
            requests: 0,
            failures: 0,
            issues: Vec::new(),
        }
    }

    /// Links for `mentions` of `text`. Only uncached mentions are sent; if the
    /// service fails, they resolve to nothing and the failure is counted.
    pub fn resolve(&mut self, text: &str, mentions: &[Mention]) -> Vec<Option<String>> {
        let key = |m: &Mention| (text.to_string(), m.start, m.end, m.entity_type);
        let missing: Vec<Mention> = mentions
            .iter()
            .filter(|m| !self.cache.contains_key(&key(m)))
            .cloned()
            .collect();
        if !missing.is_empty() {
            let req = NedRequest {
                text: text.to_string(),
                lang: self.lang.clone(),
                mentions: missing,
            };
            self.requests += 1;
            let links = match self
                .service
                .disambiguate(&req)
                .and_then(|r| r.validate(&req).map(|_| r))
            {
                Ok(r) => r.links,
                Err(e) => {
                    self.failures += 1;
                    self.issues.push(format!("{text:?}: {e}"));
                    NedResult::empty(req.mentions.len()).links
                }
            };
            for (m, link) in req.mentions.iter().zip(links) {
                self.cache.insert(key(m), link.uri);
            }
        }
        mentions
            .iter()
            .map(|m| self.cache[&key(m)].clone())
            .collect()
    }
}

/// Links an entity node to its knowledge-base URI node. Entity nodes sharing a
/// URI become equivalent. Linking the same pair twice returns the first edge.
pub fn link_entity(graph: &mut Graph, entity: NodeId, kb_uri: &str) -> Result<EdgeId, GraphError> {
    let node = graph
        .node(entity)?
        .ok_or(GraphError::DanglingEndpoint(entity))?;
    if !node.kind.is_entity() {
        return Err(GraphError::NotAnEntity(entity));
    }
    let uri = graph.uri_node(kb_uri, node.dataset)?.id;
    if let Some(edge) = graph.uri_links()?.linked.get(&(entity, uri)) {
        return Ok(*edge);
    }
    let edge = graph.add_edge(entity, uri, labels::SAME_AS_URI, node.dataset, 1.0)?;
    let links = graph.uri_links()?;
    links.linked.insert((entity, uri), edge);
    let first = *links.first_entity.entry(uri).or_insert(entity);
    if first != entity {
        graph.equivalence_mut().union(first, entity);
    }
    Ok(edge)
}
