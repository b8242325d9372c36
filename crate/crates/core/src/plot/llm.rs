//! Language-model access behind a one-method trait.
//!
//! Three prompts drive the plot stage; each template is a data file with
//! uppercase placeholders substituted at call time.

use std::time::Duration;

use super::scene::SceneCatalog;
use crate::error::{Error, Result};

pub const PLOT_TEMPLATE: &str = include_str!("../../templates/plot.txt");
pub const ORDERS_TEMPLATE: &str = include_str!("../../templates/orders.txt");
pub const REVISE_TEMPLATE: &str = include_str!("../../templates/revise.txt");

pub const OBJECTS_SLOT: &str = "OBJECT NAMES IN THE 3D SCENE";
pub const PLOT_SLOT: &str = "PLOT TEXT";
pub const ORDER_A_SLOT: &str = "ORDER FOR CHARACTER 1";
pub const ORDER_B_SLOT: &str = "ORDER FOR CHARACTER 2";

pub trait LlmClient {
    fn complete(&self, prompt: &str) -> Result<String>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub attempts: usize,
    pub base_delay: Duration,
    pub factor: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 3,
            base_delay: Duration::from_millis(500),
            factor: 2.0,
        }
    }
}

impl RetryPolicy {
    pub fn without_delay(attempts: usize) -> Self {
        Self {
            attempts,
            base_delay: Duration::ZERO,
            factor: 1.0,
        }
    }
}

/// Calls the client until it succeeds or the policy runs out, sleeping
/// `base_delay * factor^k` between attempts.
pub fn complete_with_retry(
    client: &dyn LlmClient,
    prompt: &str,
    policy: &RetryPolicy,
) -> Result<String> {
    let attempts = policy.attempts.max(1);
    let mut delay = policy.base_delay;
    let mut last = String::new();
    log::debug!("llm request:\n{prompt}");
    for attempt in 1..=attempts {
        match client.complete(prompt) {
            Ok(text) => {
                log::debug!("llm response (attempt {attempt}):\n{text}");
                return Ok(text);
            }
            Err(e) => {
                log::warn!("llm attempt {attempt}/{attempts} failed: {e}");
                last = e.to_string();
                if attempt < attempts && !delay.is_zero() {
                    std::thread::sleep(delay);
                    delay = delay.mul_f64(policy.factor);
                }
            }
        }
    }
    Err(Error::Client {
        attempts,
        message: last,
    })
}

fn object_list(catalog: &SceneCatalog) -> String {
    catalog.object_names().join(", ")
}

pub fn plot_prompt(catalog: &SceneCatalog) -> String {
    PLOT_TEMPLATE.replace(OBJECTS_SLOT, &object_list(catalog))
}

pub fn orders_prompt(plot: &str, catalog: &SceneCatalog) -> String {
    ORDERS_TEMPLATE
        .replace(OBJECTS_SLOT, &object_list(catalog))
        .replace(PLOT_SLOT, plot.trim())
}

/// Bracketed list following `Orders <label>:` in free text, or `[]`.
fn list_for(raw: &str, labels: [char; 2]) -> String {
    raw.lines()
        .filter_map(|l| {
            let t = l.trim();
            let rest = t
                .get(..6)
                .filter(|h| h.eq_ignore_ascii_case("orders"))
                .map(|_| t[6..].trim_start())?;
            let mut chars = rest.chars();
            let label = chars.next()?.to_ascii_uppercase();
            if !labels.contains(&label) {
                return None;
            }
            Some(
                chars
                    .as_str()
                    .trim_start()
                    .strip_prefix(':')?
                    .trim()
                    .to_string(),
            )
        })
        .next()
        .unwrap_or_else(|| "[]".to_string())
}

pub fn revise_prompt(raw_orders: &str, catalog: &SceneCatalog) -> String {
    REVISE_TEMPLATE
        .replace(OBJECTS_SLOT, &object_list(catalog))
        .replace(ORDER_A_SLOT, &list_for(raw_orders, ['A', '1']))
        .replace(ORDER_B_SLOT, &list_for(raw_orders, ['B', '2']))
}

pub fn generate_plot(
    client: &dyn LlmClient,
    catalog: &SceneCatalog,
    policy: &RetryPolicy,
) -> Result<String> {
    complete_with_retry(client, &plot_prompt(catalog), policy)
}

pub fn extract_orders(
    client: &dyn LlmClient,
    plot: &str,
    catalog: &SceneCatalog,
    policy: &RetryPolicy,
) -> Result<String> {
    complete_with_retry(client, &orders_prompt(plot, catalog), policy)
}

pub fn revise_orders(
    client: &dyn LlmClient,
    raw: &str,
    catalog: &SceneCatalog,
    policy: &RetryPolicy,
) -> Result<String> {
    complete_with_retry(client, &revise_prompt(raw, catalog), policy)
}

/// Returns the prompt unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct EchoClient;

impl LlmClient for EchoClient {
    fn complete(&self, prompt: &str) -> Result<String> {
        Ok(prompt.to_string())
    }
}

/// Deterministic stand-in that answers each prompt kind with a fixed
/// script built from the scene's object names. Revision prompts are answered
/// with the order lists they contain.
#[derive(Debug, Clone)]
pub struct MockClient {
    objects: Vec<String>,
}

impl MockClient {
    pub fn new(catalog: &SceneCatalog) -> Self {
        Self {
            objects: catalog
                .object_names()
                .into_iter()
                .map(str::to_string)
                .collect(),
        }
    }

    fn object(&self, i: usize) -> Option<&str> {
        self.objects
            .get(i)
            .or(self.objects.first())
            .map(String::as_str)
    }

    fn plot(&self) -> String {
        let first = self.object(0).unwrap_or("window");
        let second = self.object(1).unwrap_or(first);
        format!(
            "Person A crosses the room and stops next to the {first}. Person B walks over to the {second}. \
             They meet halfway and shake hands. Person A sits down on the {first} while Person B strolls around.\n"
        )
    }

    fn orders(&self) -> String {
        const HHI: &str = "HHI: The two persons shake hands";
        match (self.object(0), self.object(1)) {
            (Some(a), Some(b)) => {
                format!("Orders A: [None, {a}, {HHI}, [{a}, sit]]\nOrders B: [{b}, {HHI}, None]\n")
            }
            _ => format!("Orders A: [None, {HHI}, None]\nOrders B: [None, {HHI}, None]\n"),
        }
    }
}

impl LlmClient for MockClient {
    fn complete(&self, prompt: &str) -> Result<String> {
        match prompt.lines().next().map(str::trim) {
            Some("### plot") => Ok(self.plot()),
            Some("### orders") => Ok(self.orders()),
            Some("### revise") => Ok(format!(
                "Orders A: {}\nOrders B: {}\n",
                list_for(prompt, ['A', '1']),
                list_for(prompt, ['B', '2'])
            )),
            _ => Err(Error::Client {
                attempts: 1,
                message: "mock client does not recognise this prompt".into(),
            }),
        }
    }
}

/// Plain-text HTTP endpoint: the prompt is POSTed as the body, the response
/// body is the completion.
#[derive(Debug, Clone)]
pub struct HttpClient {
    pub endpoint: String,
    pub token: Option<String>,
    pub model: Option<String>,
    pub timeout: Duration,
}

impl HttpClient {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            token: None,
            model: None,
            timeout: Duration::from_secs(120),
        }
    }

    /// Reads `LLM_ENDPOINT` (required), `LLM_TOKEN` and `LLM_MODEL`.
    pub fn from_env() -> Result<Self> {
        let endpoint = std::env::var("LLM_ENDPOINT").map_err(|_| {
            Error::BadParams("LLM_ENDPOINT is not set (use --mock for offline runs)".into())
        })?;
        Ok(Self {
            token: std::env::var("LLM_TOKEN").ok(),
            model: std::env::var("LLM_MODEL").ok(),
            ..Self::new(endpoint)
        })
    }
}

impl LlmClient for HttpClient {
    fn complete(&self, prompt: &str) -> Result<String> {
        let fail = |e: ureq::Error| Error::Client {
            attempts: 1,
            message: e.to_string(),
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let mut req = agent
            .post(&self.endpoint)
            .header("Content-Type", "text/plain; charset=utf-8");
        if let Some(t) = &self.token {
            req = req.header("Authorization", &format!("Bearer {t}"));
        }
        if let Some(m) = &self.model {
            req = req.header("X-LLM-Model", m);
        }
        let mut resp = req.send(prompt).map_err(fail)?;
        resp.body_mut().read_to_string().map_err(fail)
    }
}
