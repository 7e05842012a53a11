// SPDX-License-Identifier: Apache-2.0

use ringsim_core::archmodel::ConfigError;
use ringsim_core::cnnworkload::WorkloadError;
use ringsim_core::comparison::CompareError;
use ringsim_core::linkbudget::LinkError;
use ringsim_core::mapper::MapError;
use ringsim_core::simengine::SimError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error("{}", config_message(.file.as_deref(), .source))]
    Config { file: Option<String>, source: ConfigError },
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
}

fn config_message(file: Option<&str>, err: &ConfigError) -> String {
    match file {
        Some(f) => format!("{f}: {err}"),
        None => err.to_string(),
    }
}

impl CliError {
    pub fn config(file: Option<&str>, source: ConfigError) -> Self {
        CliError::Config {
            file: file.map(str::to_string),
            source,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Config { .. } => "config",
            CliError::Workload(_) => "workload",
            CliError::Link(_) => "link_budget",
            CliError::Map(_) => "mapping",
            CliError::Sim(_) => "simulation",
            CliError::Compare(_) => "comparison",
            CliError::Usage(_) => "usage",
            CliError::Verification(_) => "verification",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Config { .. } | CliError::Workload(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable report written to stderr.
    pub fn to_json(&self) -> Value {
        let mut err = json!({ "kind": self.kind(), "message": self.to_string() });
        let obj = err.as_object_mut().expect("object literal");
        match self {
            CliError::Io { path, .. } => {
                obj.insert("file".into(), json!(path));
            }
            CliError::Config { file, source } => {
                if let Some(f) = file {
                    obj.insert("file".into(), json!(f));
                }
                if !source.violations().is_empty() {
                    obj.insert("violations".into(), json!(source.violations()));
                }
            }
            CliError::Workload(WorkloadError::Parse { file, line, .. })
            | CliError::Workload(WorkloadError::InvariantViolation { file, line, .. }) => {
                obj.insert("file".into(), json!(file));
                obj.insert("line".into(), json!(line));
            }
            CliError::Workload(WorkloadError::Io { path, .. }) => {
                obj.insert("file".into(), json!(path));
            }
            CliError::Compare(CompareError::Config(c)) if !c.violations().is_empty() => {
                obj.insert("violations".into(), json!(c.violations()));
            }
            _ => {}
        }
        json!({ "error": err })
    }
}
