//! Record of one run, enough to reproduce its outputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<String>,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub tool_version: String,
    pub tolerance: Option<f64>,
    pub outputs: Vec<String>,
    pub threads: usize,
}

impl RunManifest {
    pub fn new(subcommand: impl Into<String>) -> Self {
        RunManifest {
            subcommand: subcommand.into(),
            inputs: vec![],
            parameters: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerance: None,
            outputs: vec![],
            threads: 1,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), v);
        self
    }

    pub fn input(mut self, path: impl Into<String>) -> Self {
        self.inputs.push(path.into());
        self
    }
}
