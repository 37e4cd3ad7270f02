//! Residual bookkeeping shared by every verifier.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::scalar::Scalar;

/// Basis-index tuple at which an identity attained its worst residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub labels: Vec<String>,
}

/// Result of checking one identity over all basis tuples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub tuples_checked: usize,
    pub max_residual: f64,
    pub witness: Option<Witness>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub subject: String,
    pub exact: bool,
    pub tolerance: f64,
    pub checks: Vec<IdentityCheck>,
    /// Named boolean properties (valid, nilpotent, split, complete, ...).
    pub flags: BTreeMap<String, bool>,
    pub passed: bool,
}

impl AxiomReport {
    pub fn new(subject: impl Into<String>, exact: bool, tolerance: f64) -> Self {
        Self {
            subject: subject.into(),
            exact,
            tolerance,
            checks: Vec::new(),
            flags: BTreeMap::new(),
            passed: true,
        }
    }

    pub fn for_scalar<S: Scalar>(subject: impl Into<String>, tolerance: f64) -> Self {
        Self::new(subject, S::EXACT, if S::EXACT { 0.0 } else { tolerance })
    }

    pub fn push(&mut self, tracker: ResidualTracker) {
        let check = tracker.finish(self.exact, self.tolerance);
        self.passed &= check.passed;
        self.checks.push(check);
    }

    /// Adds a flag that does not participate in `passed`.
    pub fn flag(&mut self, name: impl Into<String>, value: bool) {
        self.flags.insert(name.into(), value);
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
    }

    /// The failing check with the largest residual, if any.
    pub fn worst_failure(&self) -> Option<&IdentityCheck> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .max_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
    }

    /// Merges another report's checks under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: AxiomReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.passed &= c.passed;
            self.checks.push(c);
        }
        for (k, v) in other.flags {
            self.flags.insert(format!("{prefix}.{k}"), v);
        }
    }

    /// One line per check, for terminal summaries.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} [{}] {}\n",
            self.subject,
            if self.exact { "exact" } else { "float" },
            if self.passed { "PASS" } else { "FAIL" }
        );
        for c in &self.checks {
            out.push_str(&format!(
                "  {:<40} {:>6} tuples  max residual {:.3e}  {}",
                c.name,
                c.tuples_checked,
                c.max_residual,
                if c.passed { "ok" } else { "FAIL" }
            ));
            if let (false, Some(w)) = (c.passed, &c.witness) {
                out.push_str(&format!("  at ({})", w.labels.join(", ")));
            }
            out.push('\n');
        }
        for (k, v) in &self.flags {
            out.push_str(&format!("  flag {k} = {v}\n"));
        }
        out
    }
}

/// Running maximum of a residual over tuples, remembering where it peaked.
#[derive(Clone, Debug)]
pub struct ResidualTracker {
    name: String,
    count: usize,
    max: f64,
    witness: Option<Witness>,
}

impl ResidualTracker {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            count: 0,
            max: 0.0,
            witness: None,
        }
    }

    pub fn record(&mut self, residual: f64, indices: &[usize], labels: impl FnOnce() -> Vec<String>) {
        self.count += 1;
        if residual > self.max || (residual.is_nan() && !self.max.is_nan()) {
            self.max = residual;
            self.witness = Some(Witness {
                indices: indices.to_vec(),
                labels: labels(),
            });
        }
    }

    /// Combines trackers computed on disjoint tuple sets (parallel sweeps).
    pub fn merge(mut self, other: ResidualTracker) -> Self {
        self.count += other.count;
        if other.max > self.max {
            self.max = other.max;
            self.witness = other.witness;
        }
        self
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    fn finish(self, exact: bool, tol: f64) -> IdentityCheck {
        let passed = if exact { self.max == 0.0 } else { self.max <= tol };
        IdentityCheck {
            name: self.name,
            tuples_checked: self.count,
            max_residual: self.max,
            witness: self.witness,
            passed,
        }
    }
}

/// Max-magnitude residual of a vector.
pub fn vec_residual<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(Scalar::magnitude).fold(0.0, f64::max)
}
