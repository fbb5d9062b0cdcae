//! Implication closure over property verdicts.
//!
//! Detector verdicts are facts about one budget; classical theorems
//! connect the properties themselves. This module applies a fixed rule
//! set to a verdict map until nothing changes, audits the same rules for
//! direct contradictions, and places the closed map on three severity
//! scales. Inferred verdicts always cite the single rule that produced
//! them and never replace a directly established exact verdict.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dyncore::{MetricSystem, SystemClass};
use crate::verdict::{Certificate, DetectorBudget, Method, Outcome, Verdict, Witness};

/// Named dynamical properties tracked by a profile.
///
/// The `Evidence`/`Proxy`/`Probe`/`Candidate` suffixes mark properties
/// whose direct verdicts come from finite surrogates rather than full
/// asymptotic definitions.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyId {
    LiYorkeEvidence,
    ScrambledPairExists,
    Sensitivity,
    EquicontinuityPoints,
    Equicontinuous,
    Distal,
    Transitive,
    Minimal,
    DensePeriodic,
    AuslanderYorke,
    Devaney,
    WeakMixingProxy,
    PartialWeakMixingProbe,
    EntropyPositive,
    EntropyZeroEvidence,
    #[serde(rename = "upe-candidate")]
    UPECandidate,
    PeriodicPointExists,
}

pub type VerdictMap = BTreeMap<PropertyId, Verdict>;

/// Class restriction on a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleClass {
    All,
    /// Interval maps proper; circle rotations are excluded.
    Interval,
    Ca,
    Sft,
}

/// One implication: if every premise verdict matches, conclude.
#[derive(Debug, Clone)]
pub struct ImplicationRule {
    pub id: &'static str,
    pub guard: RuleClass,
    /// Rules about nondegenerate dynamics; they are suppressed unless the
    /// space is certified infinite.
    pub needs_infinite: bool,
    pub premises: Vec<(PropertyId, Outcome)>,
    pub conclusion: (PropertyId, Outcome),
    pub statement: &'static str,
}

fn rule(
    id: &'static str,
    guard: RuleClass,
    needs_infinite: bool,
    premises: Vec<(PropertyId, Outcome)>,
    conclusion: (PropertyId, Outcome),
    statement: &'static str,
) -> ImplicationRule {
    ImplicationRule { id, guard, needs_infinite, premises, conclusion, statement }
}

/// The bundled rule set. Each entry states a classical theorem or a
/// definitional link, phrased as what it concludes.
pub fn rule_set() -> Vec<ImplicationRule> {
    use Outcome::{Fails, Holds};
    use PropertyId::*;
    vec![
        rule(
            "a",
            RuleClass::All,
            true,
            vec![(Transitive, Holds), (DensePeriodic, Holds)],
            (Sensitivity, Holds),
            "a transitive map with dense periodic points on an infinite space is sensitive \
             (Banks, Brooks, Cairns, Davis, Stacey)",
        ),
        rule(
            "b",
            RuleClass::All,
            true,
            vec![(Transitive, Holds), (PeriodicPointExists, Holds)],
            (LiYorkeEvidence, Holds),
            "a transitive map with a periodic point on an infinite space carries scrambled \
             pairs (Huang, Ye)",
        ),
        rule(
            "c",
            RuleClass::All,
            false,
            vec![(EntropyPositive, Holds)],
            (LiYorkeEvidence, Holds),
            "positive topological entropy forces proximal pairs that keep separating",
        ),
        rule(
            "d",
            RuleClass::All,
            true,
            vec![(WeakMixingProxy, Holds)],
            (Sensitivity, Holds),
            "a weakly mixing system on an infinite space is sensitive",
        ),
        rule(
            "e",
            RuleClass::All,
            false,
            vec![(Distal, Holds)],
            (EntropyZeroEvidence, Holds),
            "distal systems have zero topological entropy",
        ),
        rule(
            "e2",
            RuleClass::All,
            false,
            vec![(Distal, Holds)],
            (ScrambledPairExists, Fails),
            "distal orbits never become proximal, so no pair is scrambled",
        ),
        rule(
            "f",
            RuleClass::All,
            false,
            vec![(Transitive, Holds), (Sensitivity, Fails)],
            (EquicontinuityPoints, Holds),
            "a transitive system that is not sensitive has equicontinuity points \
             (Glasner, Weiss)",
        ),
        rule(
            "g",
            RuleClass::All,
            false,
            vec![(UPECandidate, Holds)],
            (WeakMixingProxy, Holds),
            "uniform positive entropy on covers forces weak mixing",
        ),
        rule(
            "h1",
            RuleClass::All,
            false,
            vec![(EntropyPositive, Holds)],
            (PartialWeakMixingProbe, Holds),
            "positive entropy yields weakly mixing sets",
        ),
        rule(
            "h2",
            RuleClass::All,
            false,
            vec![(PartialWeakMixingProbe, Holds)],
            (LiYorkeEvidence, Holds),
            "a weakly mixing set of two or more points supplies scrambled pairs",
        ),
        rule(
            "i",
            RuleClass::Ca,
            false,
            vec![(Transitive, Holds)],
            (Sensitivity, Holds),
            "transitive one-dimensional cellular automata are sensitive",
        ),
        rule(
            "j",
            RuleClass::Ca,
            false,
            vec![(Sensitivity, Fails)],
            (EquicontinuityPoints, Holds),
            "a one-dimensional cellular automaton is sensitive or has equicontinuity points",
        ),
        rule(
            "k",
            RuleClass::Ca,
            false,
            vec![],
            (PeriodicPointExists, Holds),
            "every one-dimensional cellular automaton has a temporally periodic point",
        ),
        rule(
            "l1",
            RuleClass::Interval,
            false,
            vec![(Transitive, Holds)],
            (LiYorkeEvidence, Holds),
            "transitive interval maps carry scrambled pairs",
        ),
        rule(
            "l2",
            RuleClass::Interval,
            false,
            vec![(Transitive, Holds)],
            (Sensitivity, Holds),
            "transitive interval maps are sensitive",
        ),
        rule(
            "l3",
            RuleClass::Interval,
            false,
            vec![(Transitive, Holds)],
            (EntropyPositive, Holds),
            "transitive interval maps have positive entropy",
        ),
        rule(
            "l4",
            RuleClass::Interval,
            false,
            vec![(Transitive, Holds)],
            (DensePeriodic, Holds),
            "transitive interval maps have dense periodic points",
        ),
        // Definitional links.
        rule(
            "ay",
            RuleClass::All,
            false,
            vec![(Transitive, Holds), (Sensitivity, Holds)],
            (AuslanderYorke, Holds),
            "transitivity plus sensitivity is chaos in the Auslander-Yorke sense",
        ),
        rule(
            "ay-t",
            RuleClass::All,
            false,
            vec![(AuslanderYorke, Holds)],
            (Transitive, Holds),
            "Auslander-Yorke chaos includes transitivity",
        ),
        rule(
            "ay-s",
            RuleClass::All,
            false,
            vec![(AuslanderYorke, Holds)],
            (Sensitivity, Holds),
            "Auslander-Yorke chaos includes sensitivity",
        ),
        rule(
            "ay-not",
            RuleClass::All,
            false,
            vec![(Sensitivity, Fails)],
            (AuslanderYorke, Fails),
            "without sensitivity there is no Auslander-Yorke chaos",
        ),
        rule(
            "dev",
            RuleClass::All,
            false,
            vec![(Transitive, Holds), (DensePeriodic, Holds), (Sensitivity, Holds)],
            (Devaney, Holds),
            "transitivity, dense periodic points, and sensitivity together are chaos in \
             the Devaney sense",
        ),
        rule(
            "dev-t",
            RuleClass::All,
            false,
            vec![(Devaney, Holds)],
            (Transitive, Holds),
            "Devaney chaos includes transitivity",
        ),
        rule(
            "dev-dp",
            RuleClass::All,
            false,
            vec![(Devaney, Holds)],
            (DensePeriodic, Holds),
            "Devaney chaos includes dense periodic points",
        ),
        rule(
            "dev-s",
            RuleClass::All,
            false,
            vec![(Devaney, Holds)],
            (Sensitivity, Holds),
            "Devaney chaos includes sensitivity",
        ),
        rule(
            "dev-not",
            RuleClass::All,
            false,
            vec![(Sensitivity, Fails)],
            (Devaney, Fails),
            "without sensitivity there is no Devaney chaos",
        ),
        rule(
            "wm-t",
            RuleClass::All,
            false,
            vec![(WeakMixingProxy, Holds)],
            (Transitive, Holds),
            "weak mixing includes transitivity",
        ),
        rule(
            "min-t",
            RuleClass::All,
            false,
            vec![(Minimal, Holds)],
            (Transitive, Holds),
            "minimal systems are transitive",
        ),
        rule(
            "min-pp",
            RuleClass::All,
            true,
            vec![(Minimal, Holds)],
            (PeriodicPointExists, Fails),
            "an infinite minimal system has no periodic points",
        ),
        rule(
            "dp-pp",
            RuleClass::All,
            false,
            vec![(DensePeriodic, Holds)],
            (PeriodicPointExists, Holds),
            "dense periodic points include at least one periodic point",
        ),
        rule(
            "ez-not",
            RuleClass::All,
            false,
            vec![(EntropyPositive, Holds)],
            (EntropyZeroEvidence, Fails),
            "positive entropy excludes zero entropy",
        ),
        rule(
            "ep-not",
            RuleClass::All,
            false,
            vec![(EntropyZeroEvidence, Holds)],
            (EntropyPositive, Fails),
            "zero entropy excludes positive entropy",
        ),
        rule(
            "s-eqpts",
            RuleClass::All,
            false,
            vec![(Sensitivity, Holds)],
            (EquicontinuityPoints, Fails),
            "a sensitivity constant defeats equicontinuity at every point",
        ),
        rule(
            "eqpts-s",
            RuleClass::All,
            false,
            vec![(EquicontinuityPoints, Holds)],
            (Sensitivity, Fails),
            "an equicontinuity point defeats every sensitivity constant",
        ),
        rule(
            "s-eq",
            RuleClass::All,
            false,
            vec![(Sensitivity, Holds)],
            (Equicontinuous, Fails),
            "sensitive systems are not equicontinuous",
        ),
        rule(
            "eq-pts",
            RuleClass::All,
            false,
            vec![(Equicontinuous, Holds)],
            (EquicontinuityPoints, Holds),
            "in an equicontinuous system every point is an equicontinuity point",
        ),
        rule(
            "ly-sp",
            RuleClass::All,
            false,
            vec![(LiYorkeEvidence, Holds)],
            (ScrambledPairExists, Holds),
            "a scrambled pair is exactly what the scan found",
        ),
        rule(
            "sp-ly",
            RuleClass::All,
            false,
            vec![(ScrambledPairExists, Fails)],
            (LiYorkeEvidence, Fails),
            "without any scrambled pair there is no scrambled set",
        ),
    ]
}

/// Guard data the rules consult.
#[derive(Debug, Clone)]
pub struct ClosureContext {
    pub interval: bool,
    pub ca: bool,
    pub sft: bool,
    /// True only when the space is certified infinite.
    pub infinite: bool,
    /// Budget stamped on inferred verdicts.
    pub budget: DetectorBudget,
}

impl ClosureContext {
    pub fn for_system(sys: &MetricSystem, budget: &DetectorBudget) -> ClosureContext {
        ClosureContext {
            interval: matches!(sys.class, SystemClass::Interval),
            ca: matches!(sys.class, SystemClass::CellularAutomaton),
            sft: matches!(sys.class, SystemClass::Subshift),
            infinite: sys.facts.infinite == Some(true),
            budget: budget.clone(),
        }
    }

    fn admits(&self, rule: &ImplicationRule) -> bool {
        let class_ok = match rule.guard {
            RuleClass::All => true,
            RuleClass::Interval => self.interval,
            RuleClass::Ca => self.ca,
            RuleClass::Sft => self.sft,
        };
        class_ok && (!rule.needs_infinite || self.infinite)
    }
}

/// Ranking used when two inferences target the same property: an exact
/// inference supersedes an empirical one with the same outcome.
fn inferred_rank(m: Method) -> u8 {
    match m {
        Method::InferredEmpirical => 1,
        Method::InferredExact => 2,
        _ => 0,
    }
}

fn inferred_verdict(rule: &ImplicationRule, method: Method, budget: &DetectorBudget) -> Verdict {
    let (_, outcome) = rule.conclusion;
    let v = match outcome {
        Outcome::Holds => Verdict::holds(
            method,
            Witness::new(format!("rule-{}", rule.id)).with_text(rule.statement),
            budget.clone(),
        ),
        Outcome::Fails => Verdict::fails(
            method,
            Certificate::ExactReachability {
                detail: format!("rule {}: {}", rule.id, rule.statement),
            },
            budget.clone(),
        ),
        Outcome::Inconclusive => unreachable!("no rule concludes Inconclusive"),
    };
    v.with_note(format!("inferred by rule {}", rule.id))
}

/// Applies the rule set until a fixed point. Direct verdicts are kept;
/// a direct Inconclusive is replaced by an inference; a direct empirical
/// Holds is upgraded in method when an all-exact inference agrees.
pub fn implication_closure(verdicts: &VerdictMap, ctx: &ClosureContext) -> VerdictMap {
    let rules = rule_set();
    let mut out = verdicts.clone();
    for _round in 0..64 {
        let mut changed = false;
        for r in rules.iter().filter(|r| ctx.admits(r)) {
            let mut all_assertive = true;
            let mut matched = true;
            for (prop, want) in &r.premises {
                match out.get(prop) {
                    Some(v) if v.outcome == *want => {
                        all_assertive &= v.method.is_assertive();
                    }
                    _ => {
                        matched = false;
                        break;
                    }
                }
            }
            if !matched {
                continue;
            }
            let method =
                if all_assertive { Method::InferredExact } else { Method::InferredEmpirical };
            let (prop, outcome) = r.conclusion;
            match out.get(&prop) {
                None => {
                    out.insert(prop, inferred_verdict(r, method, &ctx.budget));
                    changed = true;
                }
                Some(cur) if cur.method.is_direct() => {
                    if cur.outcome == Outcome::Inconclusive {
                        out.insert(prop, inferred_verdict(r, method, &ctx.budget));
                        changed = true;
                    } else if cur.outcome == outcome
                        && outcome == Outcome::Holds
                        && cur.method == Method::Empirical
                        && method == Method::InferredExact
                    {
                        let mut up = cur.clone();
                        up.method = Method::InferredExact;
                        up.witnesses.push(
                            Witness::new(format!("rule-{}", r.id)).with_text(r.statement),
                        );
                        up.note = format!("inferred by rule {}", r.id);
                        out.insert(prop, up);
                        changed = true;
                    }
                    // A direct exact verdict, or a direct assertion the
                    // rule contradicts, is never overwritten.
                }
                Some(cur) => {
                    if cur.outcome == outcome && inferred_rank(method) > inferred_rank(cur.method)
                    {
                        out.insert(prop, inferred_verdict(r, method, &ctx.budget));
                        changed = true;
                    }
                    // Contradictory inferences keep the first arrival;
                    // the audit below is the place such tension surfaces.
                }
            }
        }
        if !changed {
            return out;
        }
    }
    out
}

/// One direct premise-conclusion contradiction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyViolation {
    pub rule: String,
    pub property: PropertyId,
    pub detail: String,
}

/// Audits the rules against directly established verdicts only: every
/// premise matched by a non-inferred verdict while a non-inferred verdict
/// asserts the opposite conclusion.
pub fn consistency_check(verdicts: &VerdictMap, ctx: &ClosureContext) -> Vec<ConsistencyViolation> {
    let mut violations = Vec::new();
    for r in rule_set().iter().filter(|r| ctx.admits(r)) {
        let premises_direct = r.premises.iter().all(|(prop, want)| {
            verdicts
                .get(prop)
                .map(|v| v.outcome == *want && v.method.is_direct())
                .unwrap_or(false)
        });
        if !premises_direct {
            continue;
        }
        let (prop, want) = r.conclusion;
        if let Some(v) = verdicts.get(&prop) {
            if v.method.is_direct() && v.outcome != want && v.outcome != Outcome::Inconclusive {
                violations.push(ConsistencyViolation {
                    rule: r.id.to_string(),
                    property: prop,
                    detail: format!(
                        "rule {} ({}) concludes {:?} but the direct verdict is {:?}",
                        r.id, r.statement, want, v.outcome
                    ),
                });
            }
        }
    }
    violations
}

/// Rung labels on the three severity scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalePlacement {
    pub partial: String,
    pub overall: String,
    pub deterministic: String,
}

fn highest_rung(verdicts: &VerdictMap, rungs: &[(PropertyId, &str)]) -> String {
    for (prop, name) in rungs {
        if verdicts.get(prop).map(|v| v.outcome == Outcome::Holds).unwrap_or(false) {
            return (*name).to_string();
        }
    }
    "unplaced".to_string()
}

/// Places a closed verdict map on the three scales: strongest rung whose
/// property holds by any method, or "unplaced".
pub fn scale_placement(verdicts: &VerdictMap) -> ScalePlacement {
    use PropertyId::*;
    ScalePlacement {
        partial: highest_rung(
            verdicts,
            &[
                (EntropyPositive, "positive entropy"),
                (PartialWeakMixingProbe, "partial weak mixing"),
                (LiYorkeEvidence, "li-yorke chaos"),
            ],
        ),
        overall: highest_rung(
            verdicts,
            &[
                (UPECandidate, "uniform positive entropy"),
                (WeakMixingProxy, "weak mixing"),
                (Sensitivity, "sensitivity"),
            ],
        ),
        deterministic: highest_rung(
            verdicts,
            &[
                (Equicontinuous, "equicontinuity"),
                (Distal, "distality"),
                (EntropyZeroEvidence, "entropy 0"),
            ],
        ),
    }
}

/// Closed verdicts, placements, and audit results for one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosProfile {
    pub label: String,
    pub verdicts: VerdictMap,
    pub placements: ScalePlacement,
    pub violations: Vec<ConsistencyViolation>,
}

impl ChaosProfile {
    pub fn build(label: impl Into<String>, direct: VerdictMap, ctx: &ClosureContext) -> Self {
        let verdicts = implication_closure(&direct, ctx);
        let violations = consistency_check(&verdicts, ctx);
        let placements = scale_placement(&verdicts);
        ChaosProfile { label: label.into(), verdicts, placements, violations }
    }
}
