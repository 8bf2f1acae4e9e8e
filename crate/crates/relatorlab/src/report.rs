//! Verdicts with their bounds and witnesses.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// Counterexamples and inconclusive witnesses kept per report; further ones
/// are only counted.
pub const MAX_WITNESSES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Process exit status for the verdict.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// A clause instance that failed or could not be decided.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub clause: String,
    pub details: BTreeMap<String, String>,
}

impl Witness {
    pub fn new(clause: impl Into<String>) -> Self {
        Witness {
            clause: clause.into(),
            details: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl fmt::Display) -> Self {
        self.details.insert(key.into(), value.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    /// The hypotheses under which the verdict holds: indices, universe
    /// sizes, sample counts.
    pub bounds: BTreeMap<String, serde_json::Value>,
    pub stats: BTreeMap<String, u64>,
    pub counterexamples: Vec<Witness>,
    pub inconclusive: Vec<Witness>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            verdict: Verdict::Pass,
            bounds: BTreeMap::new(),
            stats: BTreeMap::new(),
            counterexamples: Vec::new(),
            inconclusive: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn bound(&mut self, key: impl Into<String>, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.bounds.insert(key.into(), v);
        self
    }

    pub fn stat(&mut self, key: impl Into<String>, value: u64) -> &mut Self {
        self.stats.insert(key.into(), value);
        self
    }

    pub fn add_stat(&mut self, key: &str, delta: u64) {
        *self.stats.entry(key.to_string()).or_insert(0) += delta;
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn fail(&mut self, w: Witness) {
        self.add_stat("counterexamples", 1);
        if self.counterexamples.len() < MAX_WITNESSES {
            self.counterexamples.push(w);
        }
        self.verdict = Verdict::Fail;
    }

    pub fn undecided(&mut self, w: Witness) {
        self.add_stat("inconclusive", 1);
        if self.inconclusive.len() < MAX_WITNESSES {
            self.inconclusive.push(w);
        }
        if self.verdict == Verdict::Pass {
            self.verdict = Verdict::Inconclusive;
        }
    }

    /// Folds a sub-report in; clause names are prefixed with its check name.
    pub fn absorb(&mut self, other: CheckReport) {
        for mut w in other.counterexamples {
            w.clause = format!("{}/{}", other.check, w.clause);
            self.fail(w);
        }
        for mut w in other.inconclusive {
            w.clause = format!("{}/{}", other.check, w.clause);
            self.undecided(w);
        }
        for (k, v) in other.stats {
            if k != "counterexamples" && k != "inconclusive" {
                self.add_stat(&format!("{}.{k}", other.check), v);
            }
        }
        for n in other.notes {
            self.notes.push(format!("{}: {n}", other.check));
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Whether some counterexample's clause starts with `prefix`.
    pub fn has_counterexample(&self, prefix: &str) -> bool {
        self.counterexamples.iter().any(|w| w.clause.starts_with(prefix))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.verdict)?;
        for w in self.counterexamples.iter().take(3) {
            write!(f, "\n  counterexample [{}]", w.clause)?;
            for (k, v) in &w.details {
                write!(f, " {k}={v}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_accumulate() {
        let mut r = CheckReport::new("demo");
        assert!(r.passed());
        r.undecided(Witness::new("Sim-2").with("pair", 3));
        assert_eq!(r.verdict, Verdict::Inconclusive);
        r.fail(Witness::new("Sim-1"));
        assert_eq!(r.verdict, Verdict::Fail);
        r.undecided(Witness::new("Sim-2"));
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.stats["inconclusive"], 2);
        let j = r.to_json();
        assert_eq!(j["verdict"], "fail");
        assert_eq!(r.verdict.exit_code(), 1);
    }
}
