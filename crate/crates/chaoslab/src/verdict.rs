//! Three-valued verdicts, witnesses, certificates, and detector budgets.
//!
//! Detectors never decide asymptotic properties: a `Holds` or `Fails` is
//! always relative to a budget, and `Fails` must additionally carry a
//! certificate that is sound at every budget (an isometry argument, a
//! blocking word, or an exhaustive finite reachability computation).
//! Timeouts and exhausted sample sets are `Inconclusive`, never `Fails`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of a property test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

/// How a verdict was established.
///
/// `InferredExact` marks conclusions derived by a sound implication whose
/// premises are all exact; `InferredEmpirical` marks the same derivation
/// from at least one empirical premise and is displayed distinctly because
/// it inherits the finite-budget caveat of its weakest premise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "empirical")]
    Empirical,
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "inferred")]
    InferredExact,
    #[serde(rename = "inferred-from-empirical")]
    InferredEmpirical,
}

impl Method {
    /// True for methods that carry no finite-sample caveat.
    pub fn is_assertive(self) -> bool {
        matches!(self, Method::Exact | Method::InferredExact)
    }

    /// True for directly established (non-inferred) methods.
    pub fn is_direct(self) -> bool {
        matches!(self, Method::Empirical | Method::Exact)
    }
}

/// Soundness certificate attached to every `Fails` verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// The map preserves the metric, so distance series are constant.
    Isometry,
    /// A word whose presence freezes the column at `column` for all time.
    BlockingWord { word: String, column: usize },
    /// An exhaustive finite computation (graph reachability, cycle
    /// enumeration, or a fully evaluated orbit segment) that excludes the
    /// property. `detail` names the computation.
    ExactReachability { detail: String },
}

/// Data justifying an outcome: labeled times and values plus free text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl Witness {
    pub fn new(label: impl Into<String>) -> Self {
        Witness { label: label.into(), times: Vec::new(), values: Vec::new(), text: None }
    }

    pub fn with_times(mut self, times: Vec<u64>) -> Self {
        self.times = times;
        self
    }

    pub fn with_values(mut self, values: Vec<f64>) -> Self {
        self.values = values;
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }
}

/// Finite surrogate for the asymptotic quantifiers in property definitions.
///
/// `horizon` bounds iteration counts, `samples` bounds point/pair draws,
/// `delta` is the proximity threshold, `epsilon` the separation threshold,
/// `rho` the perturbation radius, and `seed` drives all randomness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorBudget {
    pub horizon: usize,
    pub samples: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub rho: f64,
    pub seed: u64,
}

impl Default for DetectorBudget {
    fn default() -> Self {
        DetectorBudget {
            horizon: 1024,
            samples: 4096,
            delta: 1.0 / 256.0,
            epsilon: 0.25,
            rho: 1.0 / 64.0,
            seed: 0x5EED,
        }
    }
}

impl DetectorBudget {
    /// Checks the budget invariants shared by every detector.
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::Input("budget horizon must be at least 1".into()));
        }
        if self.samples < 1 {
            return Err(Error::Input("budget sample count must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < self.epsilon) {
            return Err(Error::Input(format!(
                "budget thresholds must satisfy 0 < delta < epsilon, got delta={} epsilon={}",
                self.delta, self.epsilon
            )));
        }
        if self.rho <= 0.0 {
            return Err(Error::Input("budget perturbation radius must be positive".into()));
        }
        Ok(())
    }

    /// Budget with a different horizon, keeping everything else.
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    /// Budget with a different sample count, keeping everything else.
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }
}

/// Result of a single property test.
///
/// Invariants, enforced by the constructors: `Holds` and `Fails` carry at
/// least one witness; `Fails` carries a certificate; every verdict echoes
/// the budget it was produced under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub method: Method,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub budget: DetectorBudget,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Verdict {
    /// Positive verdict with at least one witness.
    pub fn holds(method: Method, witness: Witness, budget: DetectorBudget) -> Self {
        Verdict {
            outcome: Outcome::Holds,
            method,
            witnesses: vec![witness],
            certificate: None,
            budget,
            note: String::new(),
        }
    }

    /// Negative verdict; the certificate doubles as a witness.
    pub fn fails(method: Method, certificate: Certificate, budget: DetectorBudget) -> Self {
        let witness = match &certificate {
            Certificate::Isometry => Witness::new("isometry")
                .with_text("the map preserves the metric, distance series are constant"),
            Certificate::BlockingWord { word, column } => Witness::new("blocking-word")
                .with_text(format!("word {word:?} freezes column {column} for all time")),
            Certificate::ExactReachability { detail } => {
                Witness::new("exact-computation").with_text(detail.clone())
            }
        };
        Verdict {
            outcome: Outcome::Fails,
            method,
            witnesses: vec![witness],
            certificate: Some(certificate),
            budget,
            note: String::new(),
        }
    }

    /// Open verdict carrying the exhausted budget.
    pub fn inconclusive(budget: DetectorBudget, note: impl Into<String>) -> Self {
        Verdict {
            outcome: Outcome::Inconclusive,
            method: Method::Empirical,
            witnesses: Vec::new(),
            certificate: None,
            budget,
            note: note.into(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn push_witness(mut self, witness: Witness) -> Self {
        self.witnesses.push(witness);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_budget_matches_documented_values() {
        let b = DetectorBudget::default();
        assert_eq!(b.horizon, 1024);
        assert_eq!(b.samples, 4096);
        assert_eq!(b.delta, 2f64.powi(-8));
        assert_eq!(b.epsilon, 0.25);
        assert_eq!(b.rho, 2f64.powi(-6));
        assert_eq!(b.seed, 0x5EED);
        b.validate().unwrap();
    }

    #[test]
    fn budget_validation_rejects_inverted_thresholds() {
        let mut b = DetectorBudget::default();
        b.delta = 0.5;
        assert!(b.validate().is_err());
        b.delta = 0.0;
        assert!(b.validate().is_err());
    }

    #[test]
    fn fails_always_has_certificate_and_witness() {
        let v = Verdict::fails(
            Method::Exact,
            Certificate::Isometry,
            DetectorBudget::default(),
        );
        assert_eq!(v.outcome, Outcome::Fails);
        assert!(v.certificate.is_some());
        assert!(!v.witnesses.is_empty());
    }

    #[test]
    fn verdict_serialization_round_trips() {
        let v = Verdict::holds(
            Method::Empirical,
            Witness::new("dip").with_times(vec![3, 7]).with_values(vec![0.25]),
            DetectorBudget::default(),
        )
        .with_note("example");
        let json = serde_json::to_string(&v).unwrap();
        let back: Verdict = serde_json::from_str(&json).unwrap();
        assert_eq!(v, back);
    }
}
