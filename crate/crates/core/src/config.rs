//! Run configuration: one JSON file naming the available model backends and
//! proof checkers, plus session, retry, cache, and dataset settings.
//!
//! Credentials never live in the file — remote backends name an environment
//! variable and read it at construction time.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ConvertOptions;
use crate::gateway::{
    Backend, BackendError, Decoding, DiskCache, Gateway, PromptRole, RemoteBackend, RemoteConfig,
    RetryPolicy, ScriptedBackend,
};
use crate::orchestrator::SessionConfig;
use crate::verifier::mock::MockVerifierConfig;
use crate::verifier::{
    CommandVerifier, CommandVerifierConfig, MockVerifier, Verifier, VerifierError,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse config `{path}`: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("no {what} named `{name}` in config")]
    Unknown { what: &'static str, name: String },
    #[error("no {what} selected: pass a name or set `{what}` in the config")]
    NoSelection { what: &'static str },
    #[error("backend `{name}`: {source}")]
    Backend {
        name: String,
        #[source]
        source: BackendError,
    },
    #[error("verifier `{name}`: {source}")]
    Verifier {
        name: String,
        #[source]
        source: VerifierError,
    },
    #[error("script file `{path}`: {message}")]
    Script { path: String, message: String },
    #[error("cache directory `{path}`: {source}")]
    Cache {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One named model backend.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendConfig {
    Remote(RemoteConfig),
    /// Deterministic scripted stub. `script` maps `"Role:ordinal"` (or
    /// `"Role:*"`) keys to completion text; `script_path` loads the same
    /// shape from a file, with inline entries overriding on collision.
    Stub {
        #[serde(default)]
        script: BTreeMap<String, String>,
        #[serde(default)]
        script_path: Option<PathBuf>,
    },
}

/// One named proof checker.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerifierSpec {
    Command(CommandVerifierConfig),
    /// Rule-table mock. `rules_path` loads the table from a file and wins
    /// over the inline table when both are present.
    Mock {
        #[serde(default)]
        rules_path: Option<PathBuf>,
        #[serde(flatten)]
        table: MockVerifierConfig,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Backend used when the caller names none.
    pub backend: Option<String>,
    /// Verifier used when the caller names none.
    pub verifier: Option<String>,
    /// Model-response cache directory; unset disables caching.
    pub cache_dir: Option<PathBuf>,
    pub retry: RetryPolicy,
    /// Per-role sampling parameters on top of the built-in defaults.
    pub decoding: BTreeMap<PromptRole, Decoding>,
    pub session: SessionConfig,
    pub dataset: ConvertOptions,
    pub backends: BTreeMap<String, BackendConfig>,
    pub verifiers: BTreeMap<String, VerifierSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: None,
            verifier: None,
            cache_dir: None,
            retry: RetryPolicy::default(),
            decoding: BTreeMap::new(),
            session: SessionConfig::default(),
            dataset: ConvertOptions::default(),
            backends: BTreeMap::new(),
            verifiers: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Json {
            path: path.display().to_string(),
            source,
        })
    }

    /// Picks a name: explicit request, then the config's default, then the
    /// sole entry when there is exactly one.
    fn select<'a, T>(
        requested: Option<&'a str>,
        configured: Option<&'a str>,
        map: &'a BTreeMap<String, T>,
        what: &'static str,
    ) -> Result<&'a str, ConfigError> {
        let name = requested.or(configured).or_else(|| {
            if map.len() == 1 {
                map.keys().next().map(String::as_str)
            } else {
                None
            }
        });
        let name = name.ok_or(ConfigError::NoSelection { what })?;
        if map.contains_key(name) {
            Ok(name)
        } else {
            Err(ConfigError::Unknown {
                what,
                name: name.to_string(),
            })
        }
    }

    pub fn build_backend(&self, requested: Option<&str>) -> Result<Arc<dyn Backend>, ConfigError> {
        let name = Self::select(requested, self.backend.as_deref(), &self.backends, "backend")?;
        match &self.backends[name] {
            BackendConfig::Remote(remote) => {
                let backend = RemoteBackend::new(name, remote.clone()).map_err(|source| {
                    ConfigError::Backend {
                        name: name.to_string(),
                        source,
                    }
                })?;
                Ok(Arc::new(backend))
            }
            BackendConfig::Stub {
                script,
                script_path,
            } => {
                let mut entries = match script_path {
                    Some(path) => read_script(path)?,
                    None => BTreeMap::new(),
                };
                entries.extend(script.clone());
                Ok(Arc::new(ScriptedBackend::new(entries)))
            }
        }
    }

    pub fn build_gateway(&self, requested: Option<&str>) -> Result<Gateway, ConfigError> {
        let backend = self.build_backend(requested)?;
        let mut gateway = Gateway::new(backend).with_retry(self.retry.clone());
        if let Some(dir) = &self.cache_dir {
            let cache = DiskCache::new(dir).map_err(|source| ConfigError::Cache {
                path: dir.display().to_string(),
                source,
            })?;
            gateway = gateway.with_cache(cache);
        }
        if !self.decoding.is_empty() {
            gateway = gateway.with_decoding_overrides(self.decoding.clone());
        }
        Ok(gateway)
    }

    /// Flips `keep_artifacts` on every command verifier (the mock has no
    /// scratch files to keep). Lets a CLI flag override the config file.
    pub fn keep_verifier_artifacts(&mut self) {
        for spec in self.verifiers.values_mut() {
            if let VerifierSpec::Command(command) = spec {
                command.keep_artifacts = true;
            }
        }
    }

    pub fn build_verifier(&self, requested: Option<&str>) -> Result<Box<dyn Verifier>, ConfigError> {
        let name = Self::select(
            requested,
            self.verifier.as_deref(),
            &self.verifiers,
            "verifier",
        )?;
        let wrap = |source| ConfigError::Verifier {
            name: name.to_string(),
            source,
        };
        match &self.verifiers[name] {
            VerifierSpec::Command(command) => {
                Ok(Box::new(CommandVerifier::new(name, command.clone()).map_err(wrap)?))
            }
            VerifierSpec::Mock { rules_path, table } => {
                let verifier = match rules_path {
                    Some(path) => MockVerifier::from_path(path).map_err(wrap)?,
                    None => MockVerifier::new(table.clone()).map_err(wrap)?,
                };
                Ok(Box::new(verifier))
            }
        }
    }
}

fn read_script(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ConfigError::Script {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
