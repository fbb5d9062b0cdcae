//! Batch orchestration: parse a run configuration, analyze each system,
//! and serialize the results.
//!
//! A run applies the exact structural algorithms first (graph checks,
//! primitivity, blocking-word facts burned into the system build), then
//! the empirical detectors, then theorem closure, the consistency audit,
//! and scale placement. Per-system failures are captured in the report
//! so a batch always completes.

use std::collections::BTreeSet;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ca::{self, CaBoundary, CaWindow};
use crate::detectors::{self, BowenEstimate, LapEstimate, LiYorkeScan};
use crate::dyncore::{self, MetricSystem, SystemClass};
use crate::error::{Error, Result};
use crate::profile::{ChaosProfile, ClosureContext, PropertyId, VerdictMap};
use crate::rng::SplitMix64;
use crate::symlang::{
    self, ComplexitySource, ComplexityTable, CoverElement, Cylinder, CylinderCover,
    EntropyEstimate, SftGraph,
};
use crate::systems::{self, SystemSpec};
use crate::verdict::{DetectorBudget, Method, Outcome, Verdict, Witness};

/// Report schema identifier; bump when the serialized shape changes.
pub const SCHEMA: &str = "chaoslab/1";

/// Growth rates at or above this are reported as positive-entropy
/// evidence; estimators on the bundled chaotic systems sit near ln 2.
const ENTROPY_POSITIVE_FLOOR: f64 = 0.1;
/// Growth rates at or below this are reported as zero-entropy evidence.
const ENTROPY_ZERO_CEILING: f64 = 0.05;

/// Joint depth for subshift complexity and cover estimates.
const SUBSHIFT_DEPTH: usize = 12;
/// Complexity horizon for sampled-word systems.
const WORD_DEPTH: usize = 120;
/// Sample length for coded-system language statistics.
const WORD_SAMPLE: usize = 1_000_000;

/// One system in a run, with an optional budget override.
#[derive(Debug, Clone)]
pub struct SystemEntry {
    pub label: String,
    pub spec: SystemSpec,
    pub budget: Option<DetectorBudget>,
}

/// A validated batch: systems, the shared budget, and an optional
/// property restriction applied to the reported verdict maps.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub entries: Vec<SystemEntry>,
    pub budget: DetectorBudget,
    pub properties: Option<BTreeSet<PropertyId>>,
}

/// Numeric tables attached to a system when the estimators apply.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemTables {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complexity: Option<ComplexityTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complexity_entropy: Option<EntropyEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover_entropy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bowen: Option<BowenEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lap: Option<LapEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<Verdict>,
}

/// Everything recorded for one system of a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub label: String,
    pub class: String,
    /// Set when the system could not be built; all other fields empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Detector or estimator failures that did not stop the analysis.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ChaosProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<LiYorkeScan>,
    #[serde(default)]
    pub tables: SystemTables,
    /// Named numeric sequences: distance samples, complexity counts,
    /// separated-set counts, density trends.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub series: BTreeMap<String, Vec<(u64, f64)>>,
}

/// Top-level run artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub seed: u64,
    pub systems: Vec<SystemReport>,
    /// Total consistency violations across all profiles.
    pub violation_total: usize,
}

/// Output encodings for [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    CsvSeries,
}

impl ReportFormat {
    pub fn parse(text: &str) -> Result<ReportFormat> {
        match text {
            "json" => Ok(ReportFormat::Json),
            "csv-series" => Ok(ReportFormat::CsvSeries),
            other => Err(Error::Config(format!(
                "unknown report format {other:?}; expected \"json\" or \"csv-series\""
            ))),
        }
    }
}

/// Partial budget override; absent fields keep the base value.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BudgetPatch {
    horizon: Option<usize>,
    samples: Option<usize>,
    delta: Option<f64>,
    epsilon: Option<f64>,
    rho: Option<f64>,
    seed: Option<u64>,
}

impl BudgetPatch {
    fn apply(&self, base: &DetectorBudget) -> DetectorBudget {
        DetectorBudget {
            horizon: self.horizon.unwrap_or(base.horizon),
            samples: self.samples.unwrap_or(base.samples),
            delta: self.delta.unwrap_or(base.delta),
            epsilon: self.epsilon.unwrap_or(base.epsilon),
            rho: self.rho.unwrap_or(base.rho),
            seed: self.seed.unwrap_or(base.seed),
        }
    }
}

fn parse_budget_patch(value: &serde_json::Value, place: &str, errors: &mut Vec<String>) -> BudgetPatch {
    match serde_json::from_value::<BudgetPatch>(value.clone()) {
        Ok(p) => p,
        Err(e) => {
            errors.push(format!("{place}: {e}"));
            BudgetPatch::default()
        }
    }
}

/// One system object: a spec plus the optional "label" and "budget" keys.
fn parse_system_object(
    value: &serde_json::Value,
    place: &str,
    base: &DetectorBudget,
    errors: &mut Vec<String>,
) -> Option<SystemEntry> {
    let obj = match value.as_object() {
        Some(o) => o,
        None => {
            errors.push(format!("{place}: expected a system object"));
            return None;
        }
    };
    let mut rest = obj.clone();
    let label = match rest.remove("label") {
        None => None,
        Some(serde_json::Value::String(s)) => Some(s),
        Some(_) => {
            errors.push(format!("{place}: label must be a string"));
            None
        }
    };
    let budget = rest
        .remove("budget")
        .map(|b| parse_budget_patch(&b, &format!("{place}: budget"), errors).apply(base));
    if let Some(b) = &budget {
        if let Err(e) = b.validate() {
            errors.push(format!("{place}: {e}"));
        }
    }
    let spec = match serde_json::from_value::<SystemSpec>(serde_json::Value::Object(rest)) {
        Ok(s) => s,
        Err(e) => {
            let msg = e.to_string();
            if msg.contains("unknown variant") {
                errors.push(format!("{place}: unknown system type: {msg}"));
            } else {
                errors.push(format!("{place}: {msg}"));
            }
            return None;
        }
    };
    // Range checks live in the system builder; run it once and discard.
    let check = budget.clone().unwrap_or_else(|| base.clone());
    if let Err(e) = systems::build_system(&spec, &check) {
        errors.push(format!("{place}: {e}"));
        return None;
    }
    let label = label.unwrap_or_else(|| spec.default_label());
    Some(SystemEntry { label, spec, budget })
}

/// Parses and validates a JSON run configuration.
///
/// Top-level keys: "systems" (required array of system objects or file
/// paths to them), "budget" (optional partial override of the default
/// detector budget), "properties" (optional array of property names
/// restricting the reported verdict maps). Every violation found is
/// listed in the error, not just the first.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let root: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("configuration is not valid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::Config("configuration must be a JSON object".into()))?;

    let mut errors = Vec::new();
    for key in obj.keys() {
        if !matches!(key.as_str(), "systems" | "budget" | "properties") {
            errors.push(format!("unknown configuration key {key:?}"));
        }
    }

    let budget = match obj.get("budget") {
        None => DetectorBudget::default(),
        Some(v) => parse_budget_patch(v, "budget", &mut errors)
            .apply(&DetectorBudget::default()),
    };
    if let Err(e) = budget.validate() {
        errors.push(e.to_string());
    }

    let properties = match obj.get("properties") {
        None => None,
        Some(serde_json::Value::Array(items)) => {
            let mut set = BTreeSet::new();
            for (i, item) in items.iter().enumerate() {
                match serde_json::from_value::<PropertyId>(item.clone()) {
                    Ok(p) => {
                        set.insert(p);
                    }
                    Err(_) => errors.push(format!("properties[{i}]: unknown property {item}")),
                }
            }
            Some(set)
        }
        Some(_) => {
            errors.push("properties must be an array of property names".into());
            None
        }
    };

    let mut entries = Vec::new();
    match obj.get("systems") {
        None => errors.push("configuration needs a \"systems\" array".into()),
        Some(serde_json::Value::Array(items)) => {
            if items.is_empty() {
                errors.push("systems array is empty".into());
            }
            for (i, item) in items.iter().enumerate() {
                let place = format!("systems[{i}]");
                match item {
                    serde_json::Value::String(path) => match std::fs::read_to_string(path) {
                        Err(e) => errors.push(format!("{place}: cannot read {path:?}: {e}")),
                        Ok(text) => match serde_json::from_str::<serde_json::Value>(&text) {
                            Err(e) => {
                                errors.push(format!("{place}: {path:?} is not valid JSON: {e}"))
                            }
                            Ok(serde_json::Value::Array(sub)) => {
                                for (j, s) in sub.iter().enumerate() {
                                    let sub_place = format!("{place}: {path:?}[{j}]");
                                    entries.extend(parse_system_object(
                                        s, &sub_place, &budget, &mut errors,
                                    ));
                                }
                            }
                            Ok(v) => entries.extend(parse_system_object(
                                &v,
                                &format!("{place}: {path:?}"),
                                &budget,
                                &mut errors,
                            )),
                        },
                    },
                    v => entries.extend(parse_system_object(v, &place, &budget, &mut errors)),
                }
            }
        }
        Some(_) => errors.push("systems must be an array".into()),
    }

    let mut seen = BTreeSet::new();
    for e in &entries {
        if !seen.insert(e.label.clone()) {
            errors.push(format!("duplicate label {:?}", e.label));
        }
    }

    if errors.is_empty() {
        Ok(RunConfig { entries, budget, properties })
    } else {
        Err(Error::Config(errors.join("; ")))
    }
}

/// The bundled demonstration batch: interval maps, rotations, symbolic
/// systems, and automata spanning every placement rung, with budgets
/// sized so the whole batch completes in minutes.
pub fn zoo_config() -> RunConfig {
    let base = DetectorBudget::default();
    let with = |samples: usize, horizon: usize| DetectorBudget { samples, horizon, ..base.clone() };
    let ca_budget = with(256, 128);
    let sub = |rules: &[(&str, &str)], seed: &str| SystemSpec::Substitution {
        rules: rules.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        seed: seed.into(),
    };
    let sft = |forbidden: &[&str]| SystemSpec::Sft {
        alphabet: vec!["0".into(), "1".into()],
        forbidden: forbidden.iter().map(|w| w.to_string()).collect(),
    };
    let ca = |wolfram: u8| SystemSpec::Ca {
        wolfram: Some(wolfram),
        states: None,
        radius: None,
        table: None,
    };
    let entry = |label: &str, spec: SystemSpec, budget: Option<DetectorBudget>| SystemEntry {
        label: label.into(),
        spec,
        budget,
    };
    let entries = vec![
        entry("tent", SystemSpec::Tent, None),
        entry("logistic-4", SystemSpec::Logistic { a: 4.0 }, None),
        entry("rotation", SystemSpec::Rotation { alpha: 0.618_033_988_749_894_9 }, None),
        entry("identity-interval", SystemSpec::IdentityInterval, None),
        entry(
            "sturmian",
            SystemSpec::Sturmian { alpha: 0.618_033_988_749_894_9 },
            Some(with(10_000, 4096)),
        ),
        entry("morse", sub(&[("0", "01"), ("1", "10")], "0"), None),
        entry("chacon", sub(&[("0", "0010"), ("1", "1")], "0"), None),
        entry("sft-golden", sft(&["11"]), None),
        entry("sft-period2", sft(&["00", "11"]), None),
        entry("sft-forbid10", sft(&["10"]), None),
        entry(
            "full-shift",
            SystemSpec::FullShift { alphabet: vec!["0".into(), "1".into()] },
            Some(with(10_000, 512)),
        ),
        entry("odometer-2", SystemSpec::Odometer { base: 2 }, None),
        entry("ca-204", ca(204), Some(ca_budget.clone())),
        entry("ca-170", ca(170), Some(ca_budget.clone())),
        entry("ca-128", ca(128), Some(ca_budget.clone())),
        entry("ca-90", ca(90), Some(ca_budget.clone())),
        entry("ca-184", ca(184), Some(ca_budget.clone())),
        entry("ca-110", ca(110), Some(ca_budget)),
    ];
    RunConfig { entries, budget: base, properties: None }
}

fn class_name(class: SystemClass) -> &'static str {
    match class {
        SystemClass::Interval => "interval",
        SystemClass::Circle => "circle",
        SystemClass::Subshift => "subshift",
        SystemClass::Coded => "coded",
        SystemClass::Odometer => "odometer",
        SystemClass::CellularAutomaton => "cellular-automaton",
        SystemClass::DensityShift => "density-shift",
    }
}

/// Runs the whole batch. Systems are analyzed in parallel; the report
/// lists them in configuration order, and every number is derived from
/// the per-system budget, so identical configurations give identical
/// reports.
pub fn run(config: &RunConfig) -> Report {
    let systems: Vec<SystemReport> = config
        .entries
        .par_iter()
        .map(|entry| {
            let budget = entry.budget.clone().unwrap_or_else(|| config.budget.clone());
            analyze_system(entry, &budget, config.properties.as_ref())
        })
        .collect();
    let violation_total =
        systems.iter().filter_map(|s| s.profile.as_ref()).map(|p| p.violations.len()).sum();
    Report {
        schema: SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: config.budget.seed,
        systems,
        violation_total,
    }
}

/// Inserts positive- or zero-entropy evidence from a numeric growth
/// rate. Rates in the dead zone between the thresholds set neither.
fn entropy_evidence(
    direct: &mut VerdictMap,
    rate: f64,
    source: &str,
    budget: &DetectorBudget,
) {
    if rate >= ENTROPY_POSITIVE_FLOOR {
        direct.insert(
            PropertyId::EntropyPositive,
            Verdict::holds(
                Method::Empirical,
                Witness::new(source).with_values(vec![rate]),
                budget.clone(),
            ),
        );
    } else if rate <= ENTROPY_ZERO_CEILING {
        direct.insert(
            PropertyId::EntropyZeroEvidence,
            Verdict::holds(
                Method::Empirical,
                Witness::new(source).with_values(vec![rate]),
                budget.clone(),
            ),
        );
    }
}

/// Complexity table counts as a plottable series, saturating at f64.
fn complexity_series(table: &ComplexityTable) -> Vec<(u64, f64)> {
    table
        .counts
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &p)| (n as u64, p as f64))
        .collect()
}

struct Analysis<'a> {
    sys: MetricSystem,
    budget: &'a DetectorBudget,
    direct: VerdictMap,
    tables: SystemTables,
    series: BTreeMap<String, Vec<(u64, f64)>>,
    notes: Vec<String>,
    scan: Option<LiYorkeScan>,
}

impl<'a> Analysis<'a> {
    fn note(&mut self, stage: &str, e: Error) {
        self.notes.push(format!("{stage}: {e}"));
    }

    /// Detectors that make sense for every metric system.
    fn common_detectors(&mut self) {
        match detectors::li_yorke_scan(&self.sys, self.budget) {
            Ok(scan) => {
                self.direct.insert(PropertyId::ScrambledPairExists, scan.verdict.clone());
                self.direct.insert(PropertyId::LiYorkeEvidence, scan.verdict.clone());
                self.scan = Some(scan);
            }
            Err(e) => self.note("li-yorke-scan", e),
        }
        match detectors::sensitivity_test(&self.sys, self.budget) {
            Ok(v) => {
                self.direct.insert(PropertyId::Sensitivity, v);
            }
            Err(e) => self.note("sensitivity", e),
        }
        match detectors::equicontinuity_survey(&self.sys, self.budget) {
            Ok(survey) => {
                self.direct.insert(PropertyId::EquicontinuityPoints, survey.points);
                self.direct.insert(PropertyId::Equicontinuous, survey.uniform);
            }
            Err(e) => self.note("equicontinuity-survey", e),
        }
        match detectors::distality_test(&self.sys, self.budget) {
            Ok(v) => {
                self.direct.insert(PropertyId::Distal, v);
            }
            Err(e) => self.note("distality", e),
        }
        if self.sys.facts.isometry {
            // Distance-preserving maps cannot spread orbit segments, so
            // every separated-set count is flat and the rate is zero.
            self.direct.insert(
                PropertyId::EntropyZeroEvidence,
                Verdict::holds(
                    Method::Exact,
                    Witness::new("isometry-growth").with_values(vec![0.0]),
                    self.budget.clone(),
                ),
            );
        }
    }

    fn interval_detectors(&mut self) {
        match detectors::numeric_transitivity_test(&self.sys, 32, self.budget) {
            Ok(v) => {
                self.direct.insert(PropertyId::Transitive, v);
            }
            Err(e) => self.note("transitivity-grid", e),
        }
        match detectors::bowen_entropy(&self.sys, 14, 1.0 / 256.0) {
            Ok(est) => {
                self.series.insert(
                    "separated-counts".into(),
                    est.counts.iter().enumerate().map(|(i, &c)| (i as u64 + 1, c as f64)).collect(),
                );
                self.tables.bowen = Some(est);
            }
            Err(e) => self.note("bowen-entropy", e),
        }
        if self.sys.facts.piecewise_monotone {
            match detectors::lap_entropy(&self.sys, 10) {
                Ok(est) => {
                    self.tables.lap = Some(est);
                }
                Err(e) => self.note("lap-entropy", e),
            }
        }
        if !self.sys.facts.isometry {
            // Lap counts see the monotonicity structure directly and are
            // exact for the bundled maps; prefer them over orbit grids.
            let rate = self
                .tables
                .lap
                .as_ref()
                .map(|l| l.rate)
                .or_else(|| self.tables.bowen.as_ref().map(|b| b.slope));
            if let Some(rate) = rate {
                let source =
                    if self.tables.lap.is_some() { "lap-growth" } else { "separated-growth" };
                entropy_evidence(&mut self.direct, rate, source, self.budget);
            }
        }
    }

    fn subshift_detectors(&mut self, graph: &SftGraph) {
        let budget = self.budget.clone();
        let exact_holds = |label: &str, detail: String| {
            Verdict::holds(
                Method::Exact,
                Witness::new(label).with_text(detail),
                budget.clone(),
            )
        };
        let exact_fails = |detail: String| {
            Verdict::fails(
                Method::Exact,
                crate::verdict::Certificate::ExactReachability { detail },
                budget.clone(),
            )
        };

        let transitive = graph.transitive();
        self.direct.insert(
            PropertyId::Transitive,
            if transitive {
                exact_holds(
                    "graph-strongly-connected",
                    "every vertex of the transition graph reaches every other".into(),
                )
            } else {
                exact_fails("the transition graph is not strongly connected".into())
            },
        );

        let dense_periodic = graph.dense_periodic();
        self.direct.insert(
            PropertyId::DensePeriodic,
            if dense_periodic {
                exact_holds(
                    "cycles-through-every-edge",
                    "every edge lies on a cycle, so periodic words shadow every block".into(),
                )
            } else {
                exact_fails("some edge leaves its strongly connected component".into())
            },
        );

        match graph.product_transitive(2) {
            Ok(p2) => {
                let p3 = graph.product_transitive(3).unwrap_or(false);
                self.direct.insert(
                    PropertyId::WeakMixingProxy,
                    if p2 {
                        exact_holds(
                            "product-graph-transitive",
                            format!(
                                "the pair product graph is strongly connected; \
                                 triple product transitive: {p3}"
                            ),
                        )
                    } else {
                        exact_fails("the pair product graph is not strongly connected".into())
                    },
                );
            }
            Err(e) => self.note("product-transitivity", e),
        }

        let (positive, detail) = graph.entropy_class();
        if positive {
            self.direct.insert(
                PropertyId::EntropyPositive,
                exact_holds("cycle-excess", detail.clone()),
            );
        } else {
            self.direct.insert(
                PropertyId::EntropyZeroEvidence,
                exact_holds("no-cycle-excess", detail.clone()),
            );
        }

        match symlang::factor_complexity(ComplexitySource::Graph(graph), SUBSHIFT_DEPTH) {
            Ok(table) => {
                self.series.insert("complexity".into(), complexity_series(&table));
                match symlang::complexity_entropy(&table) {
                    Ok(est) => self.tables.complexity_entropy = Some(est),
                    Err(e) => self.note("complexity-entropy", e),
                }
                self.tables.complexity = Some(table);
            }
            Err(e) => self.note("complexity", e),
        }

        // One cover element per symbol: the partition into rank-1
        // cylinders, whose join growth tracks word counts exactly.
        let cover = CylinderCover {
            elements: (0..graph.alphabet)
                .map(|s| CoverElement {
                    cylinders: vec![Cylinder { word: vec![s], anchor: 0 }],
                })
                .collect(),
        };
        match symlang::cover_entropy(graph, &cover, SUBSHIFT_DEPTH) {
            Ok(h) => self.tables.cover_entropy = Some(h),
            Err(e) => self.note("cover-entropy", e),
        }

        match symlang::weakly_mixing_set_probe(graph, &[], 2, 2, 256, budget.clone()) {
            Ok(v) => {
                let v = match v.outcome {
                    // A negative whole-space probe does not rule out
                    // smaller mixing subsets, which is what the partial
                    // property quantifies over.
                    Outcome::Fails => Verdict::inconclusive(
                        budget.clone(),
                        "the whole-space selection admits no common hitting time; \
                         smaller subsets were not searched",
                    ),
                    _ => v,
                };
                self.direct.insert(PropertyId::PartialWeakMixingProbe, v);
            }
            Err(e) => self.note("mixing-set-probe", e),
        }

        if positive && transitive {
            if let (Ok(true), Ok(true)) =
                (graph.product_transitive(2), graph.product_transitive(3))
            {
                self.direct.insert(
                    PropertyId::UPECandidate,
                    Verdict::inconclusive(
                        budget,
                        "candidate only: products through order 3 are transitive and the \
                         entropy is positive, but cover-level analysis is not decisive",
                    ),
                );
            }
        }
    }

    fn coded_detectors(&mut self, spec: &SystemSpec) {
        match systems::language_sample(spec, WORD_SAMPLE, self.budget.seed) {
            Ok(Some(word)) => {
                match symlang::factor_complexity(ComplexitySource::Word(&word), WORD_DEPTH) {
                    Ok(table) => {
                        self.series.insert("complexity".into(), complexity_series(&table));
                        match symlang::complexity_entropy(&table) {
                            Ok(est) => {
                                entropy_evidence(
                                    &mut self.direct,
                                    est.slope,
                                    "factor-growth",
                                    self.budget,
                                );
                                self.tables.complexity_entropy = Some(est);
                            }
                            Err(e) => self.note("complexity-entropy", e),
                        }
                        self.tables.complexity = Some(table);
                    }
                    Err(e) => self.note("complexity", e),
                }
            }
            Ok(None) => self.notes.push("language-sample: no sample available".into()),
            Err(e) => self.note("language-sample", e),
        }
        if let SystemSpec::Substitution { rules, .. } = spec {
            match systems::substitution_primitive(rules) {
                Ok(p) => self.tables.primitive = Some(p),
                Err(e) => self.note("primitivity", e),
            }
            match systems::uniform_recurrence_probe(spec, 5, 100_000, self.budget.seed) {
                Ok(v) => self.tables.recurrence = Some(v),
                Err(e) => self.note("recurrence-probe", e),
            }
        }
    }

    /// Density estimate between a fixed pair differing at finitely many
    /// cells, reported over doubling window radii. The estimate decays
    /// toward zero as the window grows past the disagreement region.
    fn ca_trend(&mut self) {
        let rule = match systems::system_ca_rule(&self.sys) {
            Some(r) => r,
            None => return,
        };
        let radius = 4096i64;
        let len = (2 * radius + 1) as usize;
        let mut rng = SplitMix64::new(self.budget.seed ^ 0xBE51);
        let cells: Vec<u8> =
            (0..len).map(|_| rng.next_below(rule.states as u64) as u8).collect();
        let mut flipped = cells.clone();
        for _ in 0..16 {
            let pos = (radius - 31 + rng.next_below(63) as i64) as usize;
            let shift = 1 + rng.next_below(rule.states as u64 - 1).max(0) as u8;
            flipped[pos] = (flipped[pos] + shift) % rule.states;
        }
        let build = |c: Vec<u8>| CaWindow::from_cells(c, CaBoundary::Periodic);
        let (x, y) = match (build(cells), build(flipped)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => return,
        };
        let mut trend = Vec::new();
        for exp in 5..=12u32 {
            let n = 1i64 << exp;
            match ca::besicovitch_estimate(&x, &y, n) {
                Ok(v) => trend.push((n as u64, v)),
                Err(e) => {
                    self.note("besicovitch-trend", e);
                    return;
                }
            }
        }
        self.series.insert("besicovitch-trend".into(), trend);
    }

    /// Distance series of one seeded pair, for plotting.
    fn distance_sample(&mut self) {
        let mut rng = SplitMix64::new(self.budget.seed ^ 0xD15A);
        let horizon = self.budget.horizon.min(512);
        match dyncore::sample_distinct_pair(&self.sys, &mut rng) {
            Ok(Some((x, y))) => match dyncore::distance_series(&self.sys, &x, &y, horizon) {
                Ok(series) => {
                    self.series.insert(
                        "distance-sample".into(),
                        series.iter().enumerate().map(|(n, &d)| (n as u64, d)).collect(),
                    );
                }
                Err(e) => self.note("distance-sample", e),
            },
            Ok(None) => {}
            Err(e) => self.note("distance-sample", e),
        }
    }
}

fn analyze_system(
    entry: &SystemEntry,
    budget: &DetectorBudget,
    properties: Option<&BTreeSet<PropertyId>>,
) -> SystemReport {
    let sys = match systems::build_system(&entry.spec, budget) {
        Ok(sys) => sys,
        Err(e) => {
            return SystemReport {
                label: entry.label.clone(),
                class: String::new(),
                error: Some(e.to_string()),
                notes: Vec::new(),
                profile: None,
                scan: None,
                tables: SystemTables::default(),
                series: BTreeMap::new(),
            }
        }
    };
    let class = class_name(sys.class).to_string();
    let mut analysis = Analysis {
        sys,
        budget,
        direct: VerdictMap::new(),
        tables: SystemTables::default(),
        series: BTreeMap::new(),
        notes: Vec::new(),
        scan: None,
    };

    analysis.common_detectors();
    match analysis.sys.class {
        SystemClass::Interval | SystemClass::Circle => analysis.interval_detectors(),
        SystemClass::Subshift => {
            if let Some(graph) = systems::system_graph(&analysis.sys) {
                let graph = graph.clone();
                analysis.subshift_detectors(&graph);
            }
        }
        SystemClass::Coded => analysis.coded_detectors(&entry.spec),
        SystemClass::CellularAutomaton => analysis.ca_trend(),
        SystemClass::Odometer | SystemClass::DensityShift => {}
    }
    analysis.distance_sample();

    let ctx = ClosureContext::for_system(&analysis.sys, budget);
    let mut profile = ChaosProfile::build(entry.label.clone(), analysis.direct, &ctx);
    if let Some(selected) = properties {
        profile.verdicts.retain(|prop, _| selected.contains(prop));
    }

    SystemReport {
        label: entry.label.clone(),
        class,
        error: None,
        notes: analysis.notes,
        profile: Some(profile),
        scan: analysis.scan,
        tables: analysis.tables,
        series: analysis.series,
    }
}

/// Serializes a report as pretty JSON with a trailing newline. Struct
/// fields keep declaration order and all maps are ordered, so equal
/// reports give byte-equal output.
pub fn emit_json(report: &Report) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Io(format!("report serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Parses a JSON report back; inverse of [`emit_json`].
pub fn parse_report(text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(|e| Error::Io(format!("report parse failed: {e}")))
}

/// Flattens every named series to `system,series,index,value` rows.
pub fn emit_csv(report: &Report) -> String {
    let mut out = String::from("system,series,index,value\n");
    for sys in &report.systems {
        for (name, points) in &sys.series {
            for (index, value) in points {
                out.push_str(&format!("{},{},{},{}\n", sys.label, name, index, value));
            }
        }
    }
    out
}

/// Renders a report in the requested output format.
pub fn emit(report: &Report, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => emit_json(report),
        ReportFormat::CsvSeries => Ok(emit_csv(report)),
    }
}
