use crate::scalar::Real;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub passed: bool,
    /// Largest residual seen (for inequalities: the largest violation, negative when slack remains).
    pub worst_residual: f64,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// Pass/fail per axiom with the worst residual, produced by every validator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub subject: String,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn new(subject: impl Into<String>) -> Self {
        AxiomReport { subject: subject.into(), checks: Vec::new() }
    }

    /// Records a residual check: passes when residual <= threshold.
    pub fn residual<T: Real>(&mut self, name: &str, residual: T, threshold: T) {
        let passed = residual <= threshold && !residual.is_nan();
        self.checks.push(AxiomCheck {
            name: name.into(),
            passed,
            worst_residual: residual.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
            detail: String::new(),
        });
    }

    pub fn flag(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(AxiomCheck {
            name: name.into(),
            passed,
            worst_residual: if passed { 0.0 } else { 1.0 },
            threshold: 0.0,
            detail: detail.into(),
        });
    }

    pub fn with_detail(mut self, name: &str, detail: impl Into<String>) -> Self {
        if let Some(c) = self.checks.iter_mut().find(|c| c.name == name) {
            c.detail = detail.into();
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.check(name).is_some_and(|c| !c.passed)
    }

    pub fn merge(&mut self, prefix: &str, other: AxiomReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
    }
}

/// Running maximum of residuals.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Worst<T>(pub T);

impl<T: Real> Worst<T> {
    pub fn new() -> Self {
        Worst(T::zero())
    }

    pub fn see(&mut self, v: T) {
        if v > self.0 || v.is_nan() {
            self.0 = v;
        }
    }
}
