//! Structured command reports: named dimension vectors, pass/fail
//! verdicts, witness digests, and timing. Serialized form is
//! deterministic given the same inputs and seed, modulo the wall clock.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub field: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub dimension_vectors: BTreeMap<String, Vec<usize>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, usize>,
    pub verdicts: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub witness_digests: BTreeMap<String, String>,
    pub wall_ms: u128,
    #[serde(skip)]
    started: Option<Instant>,
}

impl Report {
    pub fn new(command: &str, field: &str) -> Report {
        Report {
            command: command.to_string(),
            inputs: vec![],
            seed: None,
            field: field.to_string(),
            dimension_vectors: BTreeMap::new(),
            counts: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            witness_digests: BTreeMap::new(),
            wall_ms: 0,
            started: Some(Instant::now()),
        }
    }

    pub fn input(mut self, name: &str) -> Report {
        self.inputs.push(name.to_string());
        self
    }

    pub fn dims(&mut self, key: &str, v: Vec<usize>) {
        self.dimension_vectors.insert(key.to_string(), v);
    }

    pub fn count(&mut self, key: &str, n: usize) {
        self.counts.insert(key.to_string(), n);
    }

    pub fn verdict(&mut self, key: &str, ok: bool) {
        self.verdicts.insert(key.to_string(), ok);
    }

    pub fn digest_witness(&mut self, key: &str, bytes: &[u8]) {
        self.witness_digests.insert(key.to_string(), digest(bytes));
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn finish(&mut self) {
        if let Some(t) = self.started.take() {
            self.wall_ms = t.elapsed().as_millis();
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable table, one line per entry.
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {} (field {})\n", self.command, self.field));
        for i in &self.inputs {
            out.push_str(&format!("input:   {i}\n"));
        }
        if let Some(s) = self.seed {
            out.push_str(&format!("seed:    {s}\n"));
        }
        for (k, v) in &self.counts {
            out.push_str(&format!("count    {k} = {v}\n"));
        }
        for (k, v) in &self.dimension_vectors {
            let dims: Vec<String> = v.iter().map(|d| d.to_string()).collect();
            out.push_str(&format!("dims     {k} = ({})\n", dims.join(", ")));
        }
        for (k, v) in &self.verdicts {
            out.push_str(&format!("verdict  {k}: {}\n", if *v { "PASS" } else { "FAIL" }));
        }
        for (k, v) in &self.witness_digests {
            out.push_str(&format!("witness  {k} sha256:{v}\n"));
        }
        out.push_str(&format!(
            "result:  {} ({} ms)\n",
            if self.passed() { "PASS" } else { "FAIL" },
            self.wall_ms
        ));
        out
    }
}

pub fn digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_gate_pass() {
        let mut r = Report::new("test", "F101");
        r.verdict("a", true);
        assert!(r.passed());
        r.verdict("b", false);
        assert!(!r.passed());
        r.finish();
        assert!(r.human().contains("FAIL"));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(b"abc"), digest(b"abc"));
        assert_ne!(digest(b"abc"), digest(b"abd"));
    }
}
