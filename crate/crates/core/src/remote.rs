//! Shared HTTP plumbing for the service clients.

use std::time::Duration;

use serde::de::DeserializeOwned;

use crate::error::ServiceError;

pub(crate) const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

pub(crate) fn agent() -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(DEFAULT_TIMEOUT))
        .build()
        .into()
}

pub(crate) fn read_json<T: DeserializeOwned>(
    response: Result<ureq::http::Response<ureq::Body>, ureq::Error>,
) -> Result<T, ServiceError> {
    let mut response = response.map_err(|e| ServiceError::Transport(e.to_string()))?;
    let status = response.status().as_u16();
    if !(200..300).contains(&status) {
        return Err(ServiceError::Status(status));
    }
    response.body_mut().read_json().map_err(|e| match e {
        ureq::Error::Json(e) => ServiceError::Malformed(e.to_string()),
        ureq::Error::Io(e) => ServiceError::Transport(e.to_string()),
        other => ServiceError::Malformed(other.to_string()),
    })
}
