//! Service configuration: a TOML file overridden by `RATS_*` variables.

use rats_core::Policy;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bind: String,
    /// Non-personal data: RATs, attempts, sheets, logs, outbox.
    pub content_dir: PathBuf,
    /// Personal data: emails, password hashes, roles.
    pub user_dir: PathBuf,
    /// Email domains allowed to sign up. Empty allows any domain.
    pub allowed_email_domains: Vec<String>,
    pub require_email_verification: bool,
    pub min_password_len: usize,
    pub rat_approval_threshold: usize,
    pub scaffold_approval_threshold: usize,
    pub min_answers_for_classification: u64,
    pub stats_push_interval_ms: u64,
    /// Argon2 memory cost in KiB.
    pub hash_memory_kib: u32,
    pub hash_iterations: u32,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1:8080".into(),
            content_dir: "data/content".into(),
            user_dir: "data/users".into(),
            allowed_email_domains: Vec::new(),
            require_email_verification: true,
            min_password_len: 10,
            rat_approval_threshold: 2,
            scaffold_approval_threshold: 1,
            min_answers_for_classification: 5,
            stats_push_interval_ms: 500,
            hash_memory_kib: 19 * 1024,
            hash_iterations: 2,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("environment variable {name}: cannot parse {value:?}")]
    Env { name: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

fn parse_env<T: std::str::FromStr>(name: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Env {
        name: name.into(),
        value: value.into(),
    })
}

impl Config {
    /// Reads the file if given, then applies overrides from `vars`.
    pub fn load(path: Option<&Path>, vars: impl IntoIterator<Item = (String, String)>) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read {
                    path: p.to_owned(),
                    source,
                })?;
                toml::from_str(&text)?
            }
            None => Config::default(),
        };
        for (name, value) in vars {
            let Some(key) = name.strip_prefix("RATS_") else { continue };
            match key {
                "BIND" => config.bind = value,
                "CONTENT_DIR" => config.content_dir = value.into(),
                "USER_DIR" => config.user_dir = value.into(),
                "ALLOWED_EMAIL_DOMAINS" => {
                    config.allowed_email_domains = value
                        .split(',')
                        .map(|d| d.trim().to_ascii_lowercase())
                        .filter(|d| !d.is_empty())
                        .collect()
                }
                "REQUIRE_EMAIL_VERIFICATION" => config.require_email_verification = parse_env(&name, &value)?,
                "MIN_PASSWORD_LEN" => config.min_password_len = parse_env(&name, &value)?,
                "RAT_APPROVAL_THRESHOLD" => config.rat_approval_threshold = parse_env(&name, &value)?,
                "SCAFFOLD_APPROVAL_THRESHOLD" => config.scaffold_approval_threshold = parse_env(&name, &value)?,
                "MIN_ANSWERS_FOR_CLASSIFICATION" => config.min_answers_for_classification = parse_env(&name, &value)?,
                "STATS_PUSH_INTERVAL_MS" => config.stats_push_interval_ms = parse_env(&name, &value)?,
                "HASH_MEMORY_KIB" => config.hash_memory_kib = parse_env(&name, &value)?,
                "HASH_ITERATIONS" => config.hash_iterations = parse_env(&name, &value)?,
                // RATS_LOG and similar are read elsewhere.
                _ => {}
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.content_dir == self.user_dir {
            return invalid("content_dir and user_dir must differ");
        }
        if self.content_dir.starts_with(&self.user_dir) || self.user_dir.starts_with(&self.content_dir) {
            return invalid("content_dir and user_dir must not contain each other");
        }
        if self.rat_approval_threshold == 0 || self.scaffold_approval_threshold == 0 {
            return invalid("approval thresholds must be at least 1");
        }
        if self.min_answers_for_classification == 0 {
            return invalid("min_answers_for_classification must be at least 1");
        }
        if self.min_password_len < 10 {
            return invalid("min_password_len must be at least 10");
        }
        if self.stats_push_interval_ms == 0 {
            return invalid("stats_push_interval_ms must be positive");
        }
        if self.hash_iterations == 0 || self.hash_memory_kib < 8 {
            return invalid("password hashing cost too low");
        }
        Ok(())
    }

    pub fn policy(&self) -> Policy {
        Policy {
            rat_approval_threshold: self.rat_approval_threshold,
            scaffold_approval_threshold: self.scaffold_approval_threshold,
            min_answers_for_classification: self.min_answers_for_classification,
        }
    }

    pub fn domain_allowed(&self, email: &str) -> bool {
        let Some((_, domain)) = email.rsplit_once('@') else { return false };
        let domain = domain.to_ascii_lowercase();
        self.allowed_email_domains.is_empty()
            || self
                .allowed_email_domains
                .iter()
                .any(|d| domain == *d || domain.ends_with(&format!(".{d}")))
    }
}
