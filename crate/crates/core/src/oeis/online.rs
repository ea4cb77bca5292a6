use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

pub const DEFAULT_ENDPOINT: &str = "https://oeis.org/search";
pub const ENDPOINT_ENV: &str = "OEIS_ENDPOINT";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OnlineError {
    #[error("network failure: {0}")]
    Network(String),
    #[error("server answered with status {0}")]
    Status(u16),
    #[error("malformed search payload: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OnlineHit {
    pub a_number: String,
    pub name: String,
}

/// Live search results. Always advisory: the live database changes over time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OnlineResults {
    pub advisory: bool,
    pub endpoint: String,
    pub hits: Vec<OnlineHit>,
}

/// Blocking client for the JSON search endpoint. Calls through one client are
/// serialized and spaced by the politeness delay.
#[derive(Debug)]
pub struct OnlineClient {
    endpoint: String,
    retries: u32,
    delay: Duration,
    agent: ureq::Agent,
    last_call: Mutex<Option<Instant>>,
}

impl OnlineClient {
    pub fn new(endpoint: impl Into<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .build()
            .into();
        OnlineClient {
            endpoint: endpoint.into(),
            retries: 2,
            delay: Duration::from_secs(1),
            agent,
            last_call: Mutex::new(None),
        }
    }

    /// Endpoint from `OEIS_ENDPOINT`, falling back to the public server.
    pub fn from_env() -> Self {
        Self::new(std::env::var(ENDPOINT_ENV).unwrap_or_else(|_| DEFAULT_ENDPOINT.to_string()))
    }

    pub fn with_retries(mut self, retries: u32) -> Self {
        self.retries = retries;
        self
    }

    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn fetch(&self, query: &str) -> Result<String, OnlineError> {
        let mut resp = self
            .agent
            .get(&self.endpoint)
            .query("q", query)
            .query("fmt", "json")
            .call()
            .map_err(|e| match e {
                ureq::Error::StatusCode(code) => OnlineError::Status(code),
                other => OnlineError::Network(other.to_string()),
            })?;
        resp.body_mut()
            .read_to_string()
            .map_err(|e| OnlineError::Network(e.to_string()))
    }

    pub fn search(&self, terms: &[BigInt]) -> Result<OnlineResults, OnlineError> {
        let query = terms
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",");
        let mut last = self.last_call.lock().unwrap_or_else(|p| p.into_inner());
        let mut attempt = 0;
        loop {
            if let Some(t) = *last {
                let since = t.elapsed();
                if since < self.delay {
                    thread::sleep(self.delay - since);
                }
            }
            *last = Some(Instant::now());
            match self.fetch(&query) {
                Ok(body) => {
                    return Ok(OnlineResults {
                        advisory: true,
                        endpoint: self.endpoint.clone(),
                        hits: parse_results(&body)?,
                    })
                }
                Err(e) if attempt < self.retries => {
                    log_retry(&e, attempt);
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

fn log_retry(e: &OnlineError, attempt: u32) {
    eprintln!("oeis search attempt {} failed ({e}), retrying", attempt + 1);
}

/// Accepts the bare result array, `null` for no hits, or `{"results": [...]}`.
pub(crate) fn parse_results(body: &str) -> Result<Vec<OnlineHit>, OnlineError> {
    let v: Value = serde_json::from_str(body).map_err(|e| OnlineError::Malformed(e.to_string()))?;
    let items = match &v {
        Value::Null => return Ok(Vec::new()),
        Value::Array(a) => a,
        Value::Object(o) => match o.get("results") {
            Some(Value::Array(a)) => a,
            Some(Value::Null) | None => return Ok(Vec::new()),
            Some(_) => return Err(OnlineError::Malformed("results is not an array".into())),
        },
        _ => return Err(OnlineError::Malformed("unexpected top-level value".into())),
    };
    items
        .iter()
        .map(|item| {
            let number = item
                .get("number")
                .and_then(Value::as_u64)
                .ok_or_else(|| OnlineError::Malformed("result without a number".into()))?;
            let name = item.get("name").and_then(Value::as_str).unwrap_or_default();
            Ok(OnlineHit {
                a_number: format!("A{number:06}"),
                name: name.to_string(),
            })
        })
        .collect()
}
