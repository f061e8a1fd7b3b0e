//! Deterministic scripted backend for hermetic runs and tests.
//!
//! The script is a flat map from `"Role:ordinal"` to reply text, where the
//! ordinal counts calls of that role starting at 1. A `"Role:*"` entry
//! answers any ordinal without an exact entry, which keeps multi-theorem
//! scripts small. A call with neither entry is a permanent error naming the
//! missing key, so an under-scripted test fails loudly instead of looping.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Mutex;

use serde::Deserialize;

use super::{Backend, BackendError, ModelRequest, ModelResponse, PromptRole};

#[derive(Debug, Default, Deserialize)]
#[serde(transparent)]
struct Script {
    entries: BTreeMap<String, String>,
}

pub struct ScriptedBackend {
    id: String,
    script: Script,
    counters: Mutex<HashMap<PromptRole, u64>>,
    requests: Mutex<Vec<ModelRequest>>,
}

impl ScriptedBackend {
    pub fn new(entries: BTreeMap<String, String>) -> ScriptedBackend {
        ScriptedBackend {
            id: "scripted".to_string(),
            script: Script { entries },
            counters: Mutex::new(HashMap::new()),
            requests: Mutex::new(Vec::new()),
        }
    }

    pub fn from_pairs<const N: usize>(pairs: [(&str, &str); N]) -> ScriptedBackend {
        ScriptedBackend::new(
            pairs
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
    }

    pub fn from_path(path: &Path) -> std::io::Result<ScriptedBackend> {
        let text = std::fs::read_to_string(path)?;
        let script: Script = serde_json::from_str(&text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        Ok(ScriptedBackend {
            id: format!("scripted:{}", path.display()),
            script,
            counters: Mutex::new(HashMap::new()),
            requests: Mutex::new(Vec::new()),
        })
    }

    /// Every request seen so far, in call order.
    pub fn requests(&self) -> Vec<ModelRequest> {
        self.requests.lock().unwrap().clone()
    }

    /// How many times `role` has been called.
    pub fn calls(&self, role: PromptRole) -> u64 {
        *self.counters.lock().unwrap().get(&role).unwrap_or(&0)
    }
}

impl Backend for ScriptedBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, request: &ModelRequest) -> Result<ModelResponse, BackendError> {
        self.requests.lock().unwrap().push(request.clone());
        let ordinal = {
            let mut counters = self.counters.lock().unwrap();
            let n = counters.entry(request.role).or_insert(0);
            *n += 1;
            *n
        };
        let exact = format!("{}:{}", request.role, ordinal);
        let wildcard = format!("{}:*", request.role);
        let text = self
            .script
            .entries
            .get(&exact)
            .or_else(|| self.script.entries.get(&wildcard))
            .ok_or_else(|| {
                BackendError::Permanent(format!(
                    "script has no entry for `{exact}` (and no `{wildcard}`)"
                ))
            })?;
        Ok(ModelResponse {
            text: text.clone(),
            usage: None,
            model: Some(self.id.clone()),
            cached: false,
        })
    }
}
