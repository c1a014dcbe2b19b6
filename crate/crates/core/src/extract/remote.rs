use serde::{Deserialize, Serialize};

use super::{EntityOccurrence, EntityType, Extractor};
use crate::error::ServiceError;

#[derive(Serialize)]
struct Request<'a> {
    text: &'a str,
    lang: &'a str,
}

#[derive(Deserialize)]
struct Reply {
    entities: Vec<WireEntity>,
}

#[derive(Deserialize)]
struct WireEntity {
    start: usize,
    end: usize,
    #[serde(rename = "type")]
    entity_type: String,
    confidence: f64,
}

/// Client for an extraction service speaking
/// `{"text","lang"}` → `{"entities":[{"start","end","type","confidence"}]}`.
#[derive(Clone, Debug)]
pub struct RemoteExtractor {
    endpoint: String,
    lang: String,
    agent: ureq::Agent,
}

impl RemoteExtractor {
    pub fn new(endpoint: &str, lang: &str) -> Self {
        Self {
            endpoint: endpoint.to_string(),
            lang: lang.to_string(),
            agent: crate::remote::agent(),
        }
    }
}

impl Extractor for RemoteExtractor {
    fn extract(&self, text: &str) -> Result<Vec<EntityOccurrence>, ServiceError> {
        let response = self.agent.post(&self.endpoint).send_json(Request {
            text,
            lang: &self.lang,
        });
        let reply: Reply = crate::remote::read_json(response)?;
        let mut out = reply
            .entities
            .into_iter()
            .map(|e| {
                let t: EntityType = e.entity_type.parse().map_err(ServiceError::Protocol)?;
                EntityOccurrence::within(text, e.start, e.end, t, e.confidence)
                    .map_err(ServiceError::Protocol)
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.sort_by_key(|o| (o.start, o.end));
        if let Some(w) = out.windows(2).find(|w| w[1].start < w[0].end) {
            return Err(ServiceError::Protocol(format!(
                "overlapping spans {}..{} and {}..{}",
                w[0].start, w[0].end, w[1].start, w[1].end
            )));
        }
        Ok(out)
    }
}
