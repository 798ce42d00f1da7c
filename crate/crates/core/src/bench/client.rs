use std::time::{Duration, Instant};

use reqwest::blocking::Client;
use reqwest::header::{ACCEPT, CONTENT_TYPE};

use crate::algebra::results::{from_json, JSON_RESULTS, NTRIPLES};
use crate::algebra::QueryResult;
use crate::dataset::parse_ntriples;
use crate::rewrite::{AskExecutor, ProbeError};
use crate::syntax::{serialize_query, Query};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClientError {
    #[error("endpoint unreachable: {0}")]
    Unreachable(String),
    #[error("request timed out")]
    Timeout,
    #[error("endpoint answered {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("transport error: {0}")]
    Transport(String),
}

/// A fully read HTTP response and the time it took.
#[derive(Clone, Debug)]
pub struct Response {
    pub status: u16,
    pub content_type: String,
    pub body: String,
    pub elapsed: Duration,
}

/// SPARQL protocol client sending queries by POST.
#[derive(Clone, Debug)]
pub struct SparqlClient {
    client: Client,
    url: String,
}

impl SparqlClient {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Result<Self, ClientError> {
        let client = Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(SparqlClient {
            client,
            url: url.into(),
        })
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    /// Posts `query` and reads the whole body. Non-2xx statuses are returned
    /// as responses, not errors.
    pub fn send(&self, query: &str) -> Result<Response, ClientError> {
        let start = Instant::now();
        let resp = self
            .client
            .post(&self.url)
            .header(CONTENT_TYPE, "application/sparql-query")
            .header(ACCEPT, format!("{JSON_RESULTS}, {NTRIPLES};q=0.9"))
            .body(query.to_string())
            .send()
            .map_err(classify)?;
        let status = resp.status().as_u16();
        let content_type = resp
            .headers()
            .get(CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .unwrap_or_default()
            .to_string();
        let body = resp.text().map_err(classify)?;
        Ok(Response {
            status,
            content_type,
            body,
            elapsed: start.elapsed(),
        })
    }

    /// Sends `query` and parses the result document.
    pub fn execute(&self, query: &str) -> Result<QueryResult, ClientError> {
        let r = self.send(query)?;
        parse_response(&r)
    }
}

fn classify(e: reqwest::Error) -> ClientError {
    if e.is_timeout() {
        ClientError::Timeout
    } else if e.is_connect() {
        ClientError::Unreachable(e.to_string())
    } else {
        ClientError::Transport(e.to_string())
    }
}

pub(crate) fn parse_response(r: &Response) -> Result<QueryResult, ClientError> {
    if !(200..300).contains(&r.status) {
        return Err(ClientError::Status {
            status: r.status,
            body: r.body.clone(),
        });
    }
    let mime = r.content_type.split(';').next().unwrap_or("").trim();
    match mime {
        NTRIPLES | "text/plain" => parse_ntriples(&r.body)
            .map(QueryResult::Graph)
            .map_err(|e| ClientError::Malformed(e.to_string())),
        _ => from_json(&r.body).map_err(|e| ClientError::Malformed(e.to_string())),
    }
}

impl AskExecutor for SparqlClient {
    fn ask(&self, query: &Query) -> Result<bool, ProbeError> {
        match self.execute(&serialize_query(query)) {
            Ok(QueryResult::Boolean(b)) => Ok(b),
            Ok(_) => Err(ProbeError("probe did not return a boolean".into())),
            Err(e) => Err(ProbeError(e.to_string())),
        }
    }
}
