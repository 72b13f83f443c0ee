use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Uniform result document printed by every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultEnvelope {
    pub command: String,
    /// `sha256:` digest of the input file followed by the effective flags.
    pub inputs_digest: String,
    pub outputs: Value,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub mode: String,
    pub iterations: Option<usize>,
    pub warnings: Vec<String>,
}

pub fn inputs_digest(file: &[u8], flags: &[(&str, String)]) -> String {
    let mut h = Sha256::new();
    h.update(file);
    for (k, v) in flags {
        h.update(b"\n--");
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
    }
    format!("sha256:{}", hex::encode(h.finalize()))
}

impl ResultEnvelope {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes")
    }
}
