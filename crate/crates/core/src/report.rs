//! Run manifests and trace serialization for the CLI.

use crate::schwarz::SchwarzTrace;
use serde::{Deserialize, Serialize};

/// Embedded in every emitted report. Identical manifests (duration
/// aside) imply identical results.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub duration_ms: f64,
}

impl RunManifest {
    pub fn new(command: &str, params: serde_json::Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_ms: 0.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub manifest: RunManifest,
    pub verdict: String,
    pub report: T,
}

/// 17 significant digits: lossless round-trip for f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV table of a Schwarz trace: sweep, update_norm, error, energy.
pub fn trace_to_csv(trace: &SchwarzTrace) -> String {
    let mut out = String::from("sweep,update_norm,error,energy\n");
    for s in &trace.sweeps {
        let error = s.error.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.sweep,
            fmt_f64(s.update_norm),
            error,
            fmt_f64(s.energy)
        ));
    }
    out
}
