use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const REPORT_SCHEMA: &str = "powers-report/1";

/// Everything needed to reproduce a run, plus its result. Only `wall_time_ms`
/// varies between identical invocations.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    pub version: &'static str,
    /// Effective configuration after defaults, config files and flags.
    pub config: serde_json::Value,
    /// SHA-256 of each input, keyed by input name.
    pub inputs: BTreeMap<String, String>,
    pub status: String,
    pub result: serde_json::Value,
    pub wall_time_ms: u128,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            schema: REPORT_SCHEMA,
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            config: serde_json::Value::Null,
            inputs: BTreeMap::new(),
            status: String::new(),
            result: serde_json::Value::Null,
            wall_time_ms: 0,
        }
    }

    pub fn input(&mut self, name: &str, bytes: &[u8]) {
        self.inputs.insert(name.into(), sha256_hex(bytes));
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
