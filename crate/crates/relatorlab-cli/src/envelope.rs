//! The JSON document every run emits, and the optional evaluation cache.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use relatorlab::report::{CheckReport, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

pub struct Envelope {
    pub command: &'static str,
    pub config: BTreeMap<String, Json>,
    pub bounds: BTreeMap<String, Json>,
    pub checks: Vec<CheckReport>,
    pub result: Json,
    pub verdict: Verdict,
}

impl Envelope {
    pub fn new(command: &'static str) -> Self {
        Envelope {
            command,
            config: BTreeMap::new(),
            bounds: BTreeMap::new(),
            checks: Vec::new(),
            result: Json::Null,
            verdict: Verdict::Pass,
        }
    }

    pub fn config(&mut self, key: &str, value: impl Into<Json>) -> &mut Self {
        self.config.insert(key.into(), value.into());
        self
    }

    pub fn bound(&mut self, key: &str, value: impl Into<Json>) -> &mut Self {
        self.bounds.insert(key.into(), value.into());
        self
    }

    /// Records a check; the run's verdict is the worst one seen.
    pub fn check(&mut self, report: CheckReport) {
        self.verdict = worst(self.verdict, report.verdict);
        self.checks.push(report);
    }

    pub fn to_json(&self) -> Json {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "verdict": self.verdict,
            "config": self.config,
            "bounds": self.bounds,
            "checks": self.checks.iter().map(CheckReport::to_json).collect::<Vec<_>>(),
            "result": self.result,
        })
    }
}

pub fn worst(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Pass,
    }
}

/// SHA-256 of the lines, in order.
pub fn hash_lines<I: IntoIterator<Item = String>>(items: I) -> String {
    let mut h = Sha256::new();
    for s in items {
        h.update(s.as_bytes());
        h.update(b"\n");
    }
    format!("{:x}", h.finalize())
}

/// Evaluation results stored under `RELATORLAB_CACHE_DIR`, keyed by a hash
/// of the monad, index and canonical term text.
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn from_env() -> Self {
        Cache {
            dir: std::env::var_os("RELATORLAB_CACHE_DIR").map(PathBuf::from),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        Some(dir.join(format!("eval-{}.json", hash_lines([key.to_string()]))))
    }

    pub fn get(&self, key: &str) -> Option<Json> {
        let text = std::fs::read_to_string(self.path(key)?).ok()?;
        let stored: Json = serde_json::from_str(&text).ok()?;
        // Guard against hash collisions and foreign files.
        (stored.get("key")?.as_str()? == key).then(|| stored["value"].clone())
    }

    pub fn put(&self, key: &str, value: &Json) {
        let Some(path) = self.path(key) else { return };
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        // The cache is an optimisation; a failed write only costs time.
        let _ = std::fs::write(path, json!({ "key": key, "value": value }).to_string());
    }
}
