//! Async client for the lab service.

use delta_lab_core::api::{
    ApiError, ClassicalRequest, ClassicalResponse, EvaluateResponse, CLASSICAL_PATH, DEFAULTS_PATH,
    EVALUATE_PATH,
};
use delta_lab_core::Scenario;
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
    /// The service answered with a non-success status and an error body.
    #[error("service returned {status}: {error}")]
    Api { status: u16, error: ApiError },
    #[error("service returned {status} with an unreadable body: {body}")]
    Unexpected { status: u16, body: String },
    #[error("invalid response: {0}")]
    Decode(#[from] delta_lab_core::Error),
}

impl ClientError {
    /// True when the service rejected the input (HTTP 4xx).
    pub fn is_validation(&self) -> bool {
        matches!(self, ClientError::Api { status, .. } if (400..500).contains(status))
    }
}

#[derive(Debug, Clone)]
pub struct DeltaLabClient {
    base: String,
    http: reqwest::Client,
}

impl DeltaLabClient {
    /// `base` is the service root, e.g. `http://127.0.0.1:7878`.
    pub fn new(base: impl Into<String>) -> Self {
        Self {
            base: base.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    pub async fn defaults(&self) -> Result<Scenario, ClientError> {
        let resp = self.http.get(self.url(DEFAULTS_PATH)).send().await?;
        let value: serde_json::Value = decode(resp).await?;
        Ok(Scenario::from_json_value(value)?)
    }

    pub async fn evaluate(&self, scenario: &Scenario) -> Result<EvaluateResponse, ClientError> {
        self.post(EVALUATE_PATH, scenario).await
    }

    pub async fn classical(
        &self,
        request: &ClassicalRequest,
    ) -> Result<ClassicalResponse, ClientError> {
        self.post(CLASSICAL_PATH, request).await
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    async fn post<B: Serialize, T: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<T, ClientError> {
        let resp = self.http.post(self.url(path)).json(body).send().await?;
        decode(resp).await
    }
}

async fn decode<T: DeserializeOwned>(resp: reqwest::Response) -> Result<T, ClientError> {
    let status = resp.status();
    if status.is_success() {
        return Ok(resp.json().await?);
    }
    let body = resp.text().await?;
    match serde_json::from_str::<ApiError>(&body) {
        Ok(error) => Err(ClientError::Api {
            status: status.as_u16(),
            error,
        }),
        Err(_) => Err(ClientError::Unexpected {
            status: status.as_u16(),
            body,
        }),
    }
}
