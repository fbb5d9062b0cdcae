//! Finite-budget detectors for orbit-level properties.
//!
//! Every detector follows the same discipline: a Fails verdict is issued
//! only on the strength of a certificate (metric preservation, a verified
//! blocking word, an exact reachability obstruction, or a concrete
//! computed orbit event); empirical evidence alone can produce Holds or
//! Inconclusive but never Fails. Identical budgets and seeds give
//! identical verdicts, including under parallel evaluation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyncore::{
    self, distance, distance_series, MapKind, MetricSystem, Point, SystemClass,
};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::systems;
use crate::verdict::{Certificate, DetectorBudget, Method, Outcome, Verdict, Witness};

/// Separation grid for the sensitivity constant, largest first.
fn eta_grid() -> impl Iterator<Item = f64> {
    (0..=10).map(|j| 2f64.powi(-j))
}

fn isometry_certificate() -> Certificate {
    Certificate::Isometry
}

fn blocking_certificate(w: &crate::ca::BlockingWitness) -> Certificate {
    let word: String =
        w.word.iter().map(|&s| char::from_digit(s as u32, 10).unwrap()).collect();
    Certificate::BlockingWord { word, column: w.column }
}

fn finite_space_certificate(points: u64) -> Certificate {
    Certificate::ExactReachability {
        detail: format!(
            "phase space has exactly {points} points; proximal orbits merge and never separate"
        ),
    }
}

// ---------------------------------------------------------------------
// Scrambled pairs and the Li-Yorke scan
// ---------------------------------------------------------------------

/// Decides whether one pair shows scrambled behavior at this budget:
/// its orbit distance dips near zero and still separates late.
pub fn scrambled_pair_test(
    sys: &MetricSystem,
    x: &Point,
    y: &Point,
    budget: &DetectorBudget,
) -> Result<Verdict> {
    budget.validate()?;
    let d0 = distance(sys, x, y)?;
    if d0 == 0.0 {
        return Err(Error::Input("scrambled pair test needs distinct points".into()));
    }
    if sys.facts.isometry {
        // Constant distance series: a dip below delta and a separation
        // beyond epsilon cannot both happen.
        return Ok(Verdict::fails(Method::Exact, isometry_certificate(), budget.clone()));
    }
    if let Some(points) = sys.facts.finite_points {
        return Ok(Verdict::fails(
            Method::Exact,
            finite_space_certificate(points),
            budget.clone(),
        ));
    }
    let series = distance_series(sys, x, y, budget.horizon)?;
    let stats = PairStats::from_series(&series, budget);
    if stats.scrambled(budget) {
        let witness = Witness::new("dip-and-late-separation")
            .with_times(vec![stats.dip_time, stats.peak_time])
            .with_values(vec![stats.dip, stats.peak])
            .with_text(format!(
                "distance dips to {:.3e} at step {} and returns to {:.3} in the last quarter",
                stats.dip, stats.dip_time, stats.peak
            ));
        return Ok(Verdict::holds(Method::Empirical, witness, budget.clone()));
    }
    Ok(Verdict::inconclusive(
        budget.clone(),
        format!(
            "no dip-and-separation at this budget: min {:.3e}, late peak {:.3e}",
            stats.dip, stats.peak
        ),
    ))
}

/// Orbit-distance summary of one pair.
#[derive(Debug, Clone, Copy)]
struct PairStats {
    dip: f64,
    dip_time: u64,
    /// Largest distance in the last quarter of the horizon.
    peak: f64,
    peak_time: u64,
}

impl PairStats {
    fn from_series(series: &[f64], budget: &DetectorBudget) -> PairStats {
        let mut dip = f64::INFINITY;
        let mut dip_time = 0;
        for (n, &d) in series.iter().enumerate() {
            if d < dip {
                dip = d;
                dip_time = n as u64;
            }
        }
        let tail_start = (3 * budget.horizon) / 4;
        let mut peak = 0.0;
        let mut peak_time = tail_start as u64;
        for (n, &d) in series.iter().enumerate().skip(tail_start) {
            if d > peak {
                peak = d;
                peak_time = n as u64;
            }
        }
        PairStats { dip, dip_time, peak, peak_time }
    }

    /// Dip within twice the proximity threshold plus late separation
    /// beyond epsilon.
    fn scrambled(&self, budget: &DetectorBudget) -> bool {
        self.dip <= 2.0 * budget.delta && self.peak > budget.epsilon
    }
}

/// One scrambled pair found by the scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEvidence {
    pub pair_index: usize,
    pub dip: f64,
    pub dip_time: u64,
    pub peak: f64,
    pub peak_time: u64,
}

/// Result of sampling many pairs for scrambled behavior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiYorkeScan {
    pub verdict: Verdict,
    /// First scrambled pairs, capped; the counts cover the full scan.
    pub evidence: Vec<PairEvidence>,
    pub scrambled: usize,
    pub pairs: usize,
    pub degenerate: usize,
}

const EVIDENCE_CAP: usize = 32;

/// Samples `budget.samples` pairs and counts scrambled ones. Holds needs
/// at least `max(3, samples/1000)` witnesses; Fails only on structural
/// certificates.
pub fn li_yorke_scan(sys: &MetricSystem, budget: &DetectorBudget) -> Result<LiYorkeScan> {
    budget.validate()?;
    let m = budget.samples;
    if sys.facts.isometry {
        let verdict = Verdict::fails(Method::Exact, isometry_certificate(), budget.clone());
        return Ok(LiYorkeScan { verdict, evidence: vec![], scrambled: 0, pairs: m, degenerate: 0 });
    }
    if let Some(points) = sys.facts.finite_points {
        let verdict =
            Verdict::fails(Method::Exact, finite_space_certificate(points), budget.clone());
        return Ok(LiYorkeScan { verdict, evidence: vec![], scrambled: 0, pairs: m, degenerate: 0 });
    }
    if let Some(block) = &sys.facts.blocking {
        // A verified blocking word pins columns for all time, so nearby
        // configurations sharing the word can never separate again once
        // they agree on a growing core.
        let verdict =
            Verdict::fails(Method::Exact, blocking_certificate(block), budget.clone());
        return Ok(LiYorkeScan { verdict, evidence: vec![], scrambled: 0, pairs: m, degenerate: 0 });
    }
    let base = SplitMix64::new(budget.seed);
    let results: Result<Vec<(Option<PairEvidence>, bool)>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.fork(i as u64);
            let pair = dyncore::sample_distinct_pair(sys, &mut rng)?;
            let (x, y) = match pair {
                Some(p) => p,
                None => return Ok((None, true)),
            };
            let series = distance_series(sys, &x, &y, budget.horizon)?;
            let stats = PairStats::from_series(&series, budget);
            if stats.scrambled(budget) {
                Ok((
                    Some(PairEvidence {
                        pair_index: i,
                        dip: stats.dip,
                        dip_time: stats.dip_time,
                        peak: stats.peak,
                        peak_time: stats.peak_time,
                    }),
                    false,
                ))
            } else {
                Ok((None, false))
            }
        })
        .collect();
    let results = results?;
    let degenerate = results.iter().filter(|(_, d)| *d).count();
    let scrambled = results.iter().filter(|(e, _)| e.is_some()).count();
    let evidence: Vec<PairEvidence> =
        results.into_iter().filter_map(|(e, _)| e).take(EVIDENCE_CAP).collect();
    let threshold = 3.max(m / 1000);
    let verdict = if scrambled >= threshold {
        let witness = Witness::new("scrambled-pair-census")
            .with_values(vec![scrambled as f64, m as f64])
            .with_text(format!(
                "{scrambled} of {m} sampled pairs dip within 2*delta and separate late (threshold {threshold})"
            ));
        Verdict::holds(Method::Empirical, witness, budget.clone())
    } else {
        Verdict::inconclusive(
            budget.clone(),
            format!("{scrambled} of {m} pairs scrambled, below the threshold of {threshold}"),
        )
    };
    Ok(LiYorkeScan { verdict, evidence, scrambled, pairs: m, degenerate })
}

// ---------------------------------------------------------------------
// Sensitivity
// ---------------------------------------------------------------------

/// Estimates a sensitivity constant: every sampled base point must admit
/// an in-ball perturbation separating beyond the reported eta.
pub fn sensitivity_test(sys: &MetricSystem, budget: &DetectorBudget) -> Result<Verdict> {
    budget.validate()?;
    if sys.facts.isometry {
        return Ok(Verdict::fails(Method::Exact, isometry_certificate(), budget.clone()));
    }
    if let Some(block) = &sys.facts.blocking {
        // Configurations carrying the word on both sides of the origin
        // are equicontinuity points, and one such point defeats
        // sensitivity everywhere.
        return Ok(Verdict::fails(Method::Exact, blocking_certificate(block), budget.clone()));
    }
    if let Some(points) = sys.facts.finite_points {
        return Ok(Verdict::fails(
            Method::Exact,
            finite_space_certificate(points),
            budget.clone(),
        ));
    }
    let m = budget.samples.min(64);
    let base = SplitMix64::new(budget.seed ^ 0x5E45);
    let seps: Result<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.fork(i as u64);
            let x = dyncore::sample_point(sys, &mut rng)?;
            let mut best = 0.0f64;
            for variant in 0..16 {
                let y = match dyncore::perturb(sys, &x, budget.rho, variant, &mut rng)? {
                    Some(y) => y,
                    None => continue,
                };
                let d0 = distance(sys, &x, &y)?;
                if d0 <= 0.0 || d0 >= budget.rho {
                    continue;
                }
                let series = distance_series(sys, &x, &y, budget.horizon)?;
                let peak = series.iter().cloned().fold(0.0, f64::max);
                best = best.max(peak);
                if best >= 1.0 {
                    break;
                }
            }
            Ok(best)
        })
        .collect();
    let seps = seps?;
    let floor = seps.iter().cloned().fold(f64::INFINITY, f64::min);
    if floor <= 0.0 {
        return Ok(Verdict::inconclusive(
            budget.clone(),
            "a sampled point admits no separating in-ball perturbation at this budget",
        ));
    }
    // Any map "separates" perturbed points by their initial offset, so a
    // meaningful constant must clear the perturbation scale itself.
    if floor < 2.0 * budget.rho {
        return Ok(Verdict::inconclusive(
            budget.clone(),
            format!(
                "separations stay at the perturbation scale ({floor:.3e} < 2*rho); \
                 no sensitivity constant is supported"
            ),
        ));
    }
    let eta = eta_grid().find(|&e| e <= floor);
    match eta {
        Some(eta) => {
            let witness = Witness::new("sensitivity-constant")
                .with_values(vec![eta, floor])
                .with_text(format!(
                    "all {m} sampled points separate to at least {floor:.6} from perturbations inside {:.6}",
                    budget.rho
                ));
            Ok(Verdict::holds(Method::Empirical, witness, budget.clone()))
        }
        None => Ok(Verdict::inconclusive(
            budget.clone(),
            format!("weakest observed separation {floor:.3e} sits below the eta grid"),
        )),
    }
}

// ---------------------------------------------------------------------
// Equicontinuity
// ---------------------------------------------------------------------

/// True when every graph vertex can reach a vertex with two or more
/// outgoing edges; then every cylinder properly branches and no point is
/// an equicontinuity point.
fn every_cylinder_branches(graph: &crate::symlang::SftGraph) -> bool {
    let v = graph.vertex_count();
    let branching: Vec<bool> = (0..v).map(|i| graph.out[i].len() >= 2).collect();
    if !branching.iter().any(|&b| b) {
        return false;
    }
    // Reverse reachability from branching vertices.
    let mut reach = branching.clone();
    let mut stack: Vec<usize> = (0..v).filter(|&i| reach[i]).collect();
    while let Some(u) = stack.pop() {
        for &e in &graph.inn[u] {
            let p = graph.edges[e as usize].from as usize;
            if !reach[p] {
                reach[p] = true;
                stack.push(p);
            }
        }
    }
    reach.iter().all(|&b| b)
}

fn branching_certificate() -> Certificate {
    Certificate::ExactReachability {
        detail: "every cylinder branches, and a branch at depth k separates to distance 1 \
                 after k shifts"
            .into(),
    }
}

/// Positions where the blocking word occurs strictly left and strictly
/// right of the center of a window point.
fn wall_positions(sys: &MetricSystem, x: &Point) -> Option<(i64, i64)> {
    let block = sys.facts.blocking.as_ref()?;
    let rule = systems::system_ca_rule(sys)?;
    if rule.radius != 1 {
        // A single pinned column only walls information flow at radius 1.
        return None;
    }
    let w = match x {
        Point::Cells(w) => w,
        _ => return None,
    };
    let len = block.word.len() as i64;
    let matches_at = |o: i64| -> bool {
        (0..len).all(|k| w.get(o + k) == Some(block.word[k as usize]))
    };
    let mut left = None;
    let mut right = None;
    let valid = w.valid();
    let mut o = -valid;
    while o + len - 1 <= valid {
        if matches_at(o) {
            let col = o + block.column as i64;
            if col < 0 {
                left = Some(col);
            }
            if col > 0 && right.is_none() {
                right = Some(col);
            }
        }
        o += 1;
    }
    match (left, right) {
        (Some(l), Some(r)) => Some((l, r)),
        _ => None,
    }
}

/// Tests whether one point tracks all its close neighbors for the whole
/// horizon, over a shrinking grid of tolerance pairs.
pub fn equicontinuity_point_test(
    sys: &MetricSystem,
    x: &Point,
    budget: &DetectorBudget,
) -> Result<Verdict> {
    budget.validate()?;
    if sys.facts.isometry {
        let witness = Witness::new("metric-preserved")
            .with_text("the map preserves distances, so every neighbor tracks forever");
        return Ok(Verdict::holds(Method::Exact, witness, budget.clone()));
    }
    if let Some(points) = sys.facts.finite_points {
        let witness = Witness::new("isolated-point").with_text(format!(
            "finite space of {points} points: small enough balls contain only the point itself"
        ));
        return Ok(Verdict::holds(Method::Exact, witness, budget.clone()));
    }
    if let Some((l, r)) = wall_positions(sys, x) {
        let witness = Witness::new("blocking-walls").with_text(format!(
            "blocking word pins columns {l} and {r}; the center column is walled for all time"
        ));
        return Ok(Verdict::holds(Method::Exact, witness, budget.clone()));
    }
    if let Some(graph) = systems::system_graph(sys) {
        if every_cylinder_branches(&graph) {
            return Ok(Verdict::fails(Method::Exact, branching_certificate(), budget.clone()));
        }
    }
    // Empirical arm: for each tolerance, look for a ball radius whose
    // sampled perturbations all track. Escapes at every tested radius
    // leave the point unresolved rather than refuted.
    let mut rng = SplitMix64::new(budget.seed ^ 0xEC01);
    let eps_grid = [0.25, 0.125, 0.0625];
    let mut any_samples = false;
    for &eps in &eps_grid {
        let mut satisfied = false;
        for j in 1..=6 {
            let eta = eps / 2f64.powi(j);
            let mut tracked = 0usize;
            let mut escaped = false;
            for variant in 0..8 {
                let y = match dyncore::perturb(sys, x, eta, variant, &mut rng)? {
                    Some(y) => y,
                    None => continue,
                };
                let d0 = distance(sys, x, &y)?;
                if d0 <= 0.0 || d0 >= eta {
                    continue;
                }
                any_samples = true;
                let series = distance_series(sys, x, &y, budget.horizon)?;
                if series.iter().any(|&d| d > eps) {
                    escaped = true;
                    break;
                }
                tracked += 1;
            }
            if !escaped && tracked > 0 {
                satisfied = true;
                break;
            }
        }
        if !satisfied {
            return Ok(Verdict::inconclusive(
                budget.clone(),
                if any_samples {
                    format!("perturbations escape tolerance {eps} at every tested ball radius")
                } else {
                    "no admissible perturbations landed inside the test balls".to_string()
                },
            ));
        }
    }
    let witness = Witness::new("tracked-neighbors")
        .with_text("sampled neighbors at every tolerance tracked the orbit over the horizon");
    Ok(Verdict::holds(Method::Empirical, witness, budget.clone()))
}

/// Property-level equicontinuity verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquicontinuitySurvey {
    /// Some point is an equicontinuity point.
    pub points: Verdict,
    /// The system is equicontinuous as a whole.
    pub uniform: Verdict,
}

const SURVEY_POINTS: usize = 20;

/// Aggregates the point test over sampled base points and settles the
/// uniform property where a certificate exists.
pub fn equicontinuity_survey(
    sys: &MetricSystem,
    budget: &DetectorBudget,
) -> Result<EquicontinuitySurvey> {
    budget.validate()?;
    if sys.facts.isometry {
        let mk = || {
            Verdict::holds(
                Method::Exact,
                Witness::new("metric-preserved")
                    .with_text("the map preserves distances exactly"),
                budget.clone(),
            )
        };
        return Ok(EquicontinuitySurvey { points: mk(), uniform: mk() });
    }
    if let Some(points) = sys.facts.finite_points {
        let mk = || {
            Verdict::holds(
                Method::Exact,
                Witness::new("finite-space").with_text(format!(
                    "{points} isolated points: balls below the minimum gap are singletons"
                )),
                budget.clone(),
            )
        };
        return Ok(EquicontinuitySurvey { points: mk(), uniform: mk() });
    }
    if let Some(graph) = systems::system_graph(sys) {
        if every_cylinder_branches(&graph) {
            let points =
                Verdict::fails(Method::Exact, branching_certificate(), budget.clone());
            let uniform =
                Verdict::fails(Method::Exact, branching_certificate(), budget.clone());
            return Ok(EquicontinuitySurvey { points, uniform });
        }
    }
    let mut rng = SplitMix64::new(budget.seed ^ 0x50EC);
    let mut holds_exact = 0usize;
    let mut holds_emp = 0usize;
    let mut tried = 0usize;
    for _ in 0..SURVEY_POINTS {
        let x = dyncore::sample_point(sys, &mut rng)?;
        let v = equicontinuity_point_test(sys, &x, budget)?;
        tried += 1;
        match (v.outcome, v.method) {
            (Outcome::Holds, Method::Exact) => holds_exact += 1,
            (Outcome::Holds, _) => holds_emp += 1,
            _ => {}
        }
    }
    let points = if holds_exact > 0 {
        Verdict::holds(
            Method::Exact,
            Witness::new("walled-points").with_text(format!(
                "{holds_exact} of {tried} sampled points carry blocking walls on both sides"
            )),
            budget.clone(),
        )
    } else if holds_emp > 0 {
        Verdict::holds(
            Method::Empirical,
            Witness::new("tracking-points").with_text(format!(
                "{holds_emp} of {tried} sampled points tracked all sampled neighbors"
            )),
            budget.clone(),
        )
    } else {
        Verdict::inconclusive(
            budget.clone(),
            format!("none of {tried} sampled points resolved as equicontinuity points"),
        )
    };
    let uniform = Verdict::inconclusive(
        budget.clone(),
        "uniform equicontinuity is only settled by structural certificates",
    );
    Ok(EquicontinuitySurvey { points, uniform })
}

// ---------------------------------------------------------------------
// Distality
// ---------------------------------------------------------------------

/// Tests whether sampled distinct pairs keep their orbit distance away
/// from zero over the horizon.
pub fn distality_test(sys: &MetricSystem, budget: &DetectorBudget) -> Result<Verdict> {
    budget.validate()?;
    if sys.facts.isometry {
        let witness = Witness::new("metric-preserved")
            .with_text("distances are preserved, so every distinct pair keeps its gap");
        return Ok(Verdict::holds(Method::Exact, witness, budget.clone()));
    }
    if let Some(points) = sys.facts.finite_points {
        // Finite spaces arise here only for two-sided shifts, which are
        // invertible, so distinct orbits never merge.
        let witness = Witness::new("finite-invertible").with_text(format!(
            "invertible map on {points} points: orbit distances cycle through positive values"
        ));
        return Ok(Verdict::holds(Method::Exact, witness, budget.clone()));
    }
    // Degeneracy gate: a sampler with few distinct points cannot probe
    // proximality.
    let mut rng = SplitMix64::new(budget.seed ^ 0xD157);
    let mut reps: Vec<Point> = Vec::new();
    for _ in 0..64 {
        let p = dyncore::sample_point(sys, &mut rng)?;
        if !reps
            .iter()
            .map(|q| distance(sys, q, &p))
            .collect::<Result<Vec<f64>>>()?
            .iter()
            .any(|&d| d == 0.0)
        {
            reps.push(p);
        }
    }
    if reps.len() < 32 {
        return Ok(Verdict::inconclusive(
            budget.clone(),
            format!("sampler covers only {} distinct points at this budget", reps.len()),
        ));
    }
    let m = budget.samples.min(512);
    let base = SplitMix64::new(budget.seed ^ 0xD158);
    let mins: Result<Vec<Option<(f64, u64)>>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.fork(i as u64);
            let pair = dyncore::sample_distinct_pair(sys, &mut rng)?;
            let (x, y) = match pair {
                Some(p) => p,
                None => return Ok(None),
            };
            let series = distance_series(sys, &x, &y, budget.horizon)?;
            let mut min = f64::INFINITY;
            let mut at = 0u64;
            for (n, &d) in series.iter().enumerate() {
                if d < min {
                    min = d;
                    at = n as u64;
                }
            }
            Ok(Some((min, at)))
        })
        .collect();
    let mins = mins?;
    let mut floor = f64::INFINITY;
    let mut floor_at = 0u64;
    for (min, at) in mins.into_iter().flatten() {
        if min < floor {
            floor = min;
            floor_at = at;
        }
    }
    if floor < budget.delta {
        let cert = Certificate::ExactReachability {
            detail: format!(
                "a sampled pair reaches orbit distance {floor:.3e} at step {floor_at}, \
                 inside the proximity threshold {:.3e}",
                budget.delta
            ),
        };
        return Ok(Verdict::fails(Method::Empirical, cert, budget.clone()));
    }
    Ok(Verdict::inconclusive(
        budget.clone(),
        format!(
            "sampled pairs stay at or above {floor:.3e}; distality is not decided at this budget"
        ),
    ))
}

// ---------------------------------------------------------------------
// Numeric transitivity
// ---------------------------------------------------------------------

/// Exact image of `[lo, hi]` under one step of the map, as at most two
/// closed intervals (the circle map wraps).
fn interval_image(map: &MapKind, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    match map {
        MapKind::Tent => {
            if hi <= 0.5 {
                vec![(2.0 * lo, 2.0 * hi)]
            } else if lo >= 0.5 {
                vec![(2.0 - 2.0 * hi, 2.0 - 2.0 * lo)]
            } else {
                vec![((2.0 * lo).min(2.0 - 2.0 * hi), 1.0)]
            }
        }
        MapKind::Logistic { a } => {
            let f = |x: f64| a * x * (1.0 - x);
            let (flo, fhi) = (f(lo), f(hi));
            if hi <= 0.5 {
                vec![(flo, fhi)]
            } else if lo >= 0.5 {
                vec![(fhi, flo)]
            } else {
                vec![(flo.min(fhi), a / 4.0)]
            }
        }
        MapKind::IdentityInterval => vec![(lo, hi)],
        MapKind::Rotation { alpha } => {
            let l = lo + alpha;
            let h = hi + alpha;
            if h <= 1.0 {
                vec![(l, h)]
            } else if l >= 1.0 {
                vec![(l - 1.0, h - 1.0)]
            } else {
                vec![(l, 1.0), (0.0, h - 1.0)]
            }
        }
        _ => unreachable!("grid transitivity is gated to interval and circle maps"),
    }
}

/// Grid reachability test for transitivity on interval and circle
/// systems. Fails only by exact interval-image closure; Holds requires
/// every ordered cell pair realized by a sampled orbit.
pub fn numeric_transitivity_test(
    sys: &MetricSystem,
    grid: usize,
    budget: &DetectorBudget,
) -> Result<Verdict> {
    budget.validate()?;
    if !matches!(sys.class, SystemClass::Interval | SystemClass::Circle) {
        return Err(Error::Unsupported(
            "grid transitivity applies to interval and circle systems".into(),
        ));
    }
    if grid < 8 {
        return Err(Error::Input(format!("grid must have at least 8 cells, got {grid}")));
    }
    let g = grid;
    let cell = |i: usize| (i as f64 / g as f64, (i + 1) as f64 / g as f64);
    // One-step cell relation from exact interval images; overlap needs
    // interior intersection so touching endpoints do not connect.
    let mut edges: Vec<Vec<usize>> = Vec::with_capacity(g);
    for i in 0..g {
        let (lo, hi) = cell(i);
        let mut row = Vec::new();
        for piece in interval_image(&sys.map, lo, hi) {
            for j in 0..g {
                let (clo, chi) = cell(j);
                if piece.0 < chi && piece.1 > clo && !row.contains(&j) {
                    row.push(j);
                }
            }
        }
        edges.push(row);
    }
    // The closure over-approximates orbit reachability, so a missing
    // pair is a proof of non-transitivity.
    for start in 0..g {
        let mut reach = vec![false; g];
        let mut stack = edges[start].clone();
        for &j in &stack {
            reach[j] = true;
        }
        while let Some(u) = stack.pop() {
            for &j in &edges[u] {
                if !reach[j] {
                    reach[j] = true;
                    stack.push(j);
                }
            }
        }
        if let Some(missing) = (0..g).find(|&j| !reach[j]) {
            let cert = Certificate::ExactReachability {
                detail: format!(
                    "grid cell {start} of {g} never reaches cell {missing} under exact \
                     interval images"
                ),
            };
            return Ok(Verdict::fails(Method::Exact, cert, budget.clone()));
        }
    }
    // Empirical confirmation: orbits launched in every cell must visit
    // every cell at some positive time.
    let mut rng = SplitMix64::new(budget.seed ^ 0x7247);
    let mut all_covered = true;
    let mut unrealized = 0usize;
    for i in 0..g {
        let (lo, hi) = cell(i);
        let mut visited = vec![false; g];
        for s in 0..16 {
            let x0 = if s == 0 {
                (lo + hi) / 2.0
            } else {
                lo + (hi - lo) * rng.next_f64()
            };
            let mut x = Point::Scalar(x0);
            if matches!(sys.class, SystemClass::Circle) {
                x = Point::Angle(x0);
            }
            let mut cur = x;
            for _ in 1..=budget.horizon {
                cur = dyncore::step(sys, &cur)?;
                let v = match cur {
                    Point::Scalar(v) | Point::Angle(v) => v,
                    _ => unreachable!(),
                };
                let j = ((v * g as f64) as usize).min(g - 1);
                visited[j] = true;
            }
        }
        let miss = visited.iter().filter(|&&b| !b).count();
        if miss > 0 {
            all_covered = false;
            unrealized += miss;
        }
    }
    if all_covered {
        let witness = Witness::new("grid-orbit-coverage").with_text(format!(
            "orbits from every one of {g} cells visited all {g} cells within {} steps",
            budget.horizon
        ));
        return Ok(Verdict::holds(Method::Empirical, witness, budget.clone()));
    }
    Ok(Verdict::inconclusive(
        budget.clone(),
        format!("{unrealized} ordered cell pairs unrealized and no exact obstruction found"),
    ))
}

// ---------------------------------------------------------------------
// Entropy estimators
// ---------------------------------------------------------------------

/// Growth table of greedy separated chains and its fitted rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BowenEstimate {
    /// counts[k-1] = chain size at orbit depth k.
    pub counts: Vec<u64>,
    /// Least-squares slope of ln(count) over the pre-saturation window;
    /// this is the entropy estimate in nats.
    pub slope: f64,
    /// Inclusive depth window the slope was fitted on.
    pub window: (usize, usize),
    pub grid: usize,
    pub eps: f64,
}

const BOWEN_GRID: usize = 1 << 17;

fn scalar_step(map: &MapKind, x: f64) -> f64 {
    match map {
        MapKind::Tent => {
            if x < 0.5 {
                2.0 * x
            } else {
                2.0 - 2.0 * x
            }
        }
        MapKind::Logistic { a } => a * x * (1.0 - x),
        MapKind::IdentityInterval => x,
        MapKind::Rotation { alpha } => {
            let y = x + alpha;
            if y >= 1.0 {
                y - 1.0
            } else {
                y
            }
        }
        _ => unreachable!("scalar stepping is gated to interval and circle maps"),
    }
}

/// Separated-chain entropy estimate for interval and circle systems:
/// scans a fine start grid keeping points whose depth-k orbits stay
/// `eps`-separated from the previously kept one, then fits the growth
/// rate of the chain sizes before the start grid saturates.
pub fn bowen_entropy(sys: &MetricSystem, n: usize, eps: f64) -> Result<BowenEstimate> {
    if !matches!(sys.class, SystemClass::Interval | SystemClass::Circle) {
        return Err(Error::Unsupported(
            "separated-chain entropy applies to interval and circle systems".into(),
        ));
    }
    if eps < 2f64.powi(-12) {
        return Err(Error::Input(format!("resolution {eps} is finer than 2^-12")));
    }
    if n < 4 {
        return Err(Error::Input(format!("orbit depth must be at least 4, got {n}")));
    }
    let circle = matches!(sys.class, SystemClass::Circle);
    let dist = |a: f64, b: f64| {
        let d = (a - b).abs();
        if circle {
            d.min(1.0 - d)
        } else {
            d
        }
    };
    let g = BOWEN_GRID;
    let mut counts = Vec::with_capacity(n);
    for k in 1..=n {
        let mut kept_orbit: Vec<f64> = Vec::new();
        let mut count = 0u64;
        for i in 0..g {
            let x0 = (i as f64 + 0.5) / g as f64;
            if kept_orbit.is_empty() {
                kept_orbit = orbit_table(&sys.map, x0, k);
                count = 1;
                continue;
            }
            let mut cur = x0;
            let mut separated = dist(cur, kept_orbit[0]) >= eps;
            if !separated {
                for t in 1..=k {
                    cur = scalar_step(&sys.map, cur);
                    if dist(cur, kept_orbit[t]) >= eps {
                        separated = true;
                        break;
                    }
                }
            }
            if separated {
                kept_orbit = orbit_table(&sys.map, x0, k);
                count += 1;
            }
        }
        counts.push(count);
    }
    // Fit before the chain saturates the start grid.
    let cap = (g / 8) as u64;
    let kstar = (1..=n).rev().find(|&k| counts[k - 1] <= cap).ok_or_else(|| {
        Error::Budget("separated chains saturate the start grid at every depth".into())
    })?;
    let lo = kstar.saturating_sub(6).max(1);
    if kstar - lo + 1 < 3 {
        return Err(Error::Budget(
            "separated-chain growth window too short for a slope estimate".into(),
        ));
    }
    let slope = fit_log_slope(&counts[lo - 1..kstar], lo);
    Ok(BowenEstimate { counts, slope, window: (lo, kstar), grid: g, eps })
}

fn orbit_table(map: &MapKind, x0: f64, k: usize) -> Vec<f64> {
    let mut orb = Vec::with_capacity(k + 1);
    orb.push(x0);
    for t in 0..k {
        orb.push(scalar_step(map, orb[t]));
    }
    orb
}

fn fit_log_slope(counts: &[u64], first_k: usize) -> f64 {
    let n = counts.len() as f64;
    let ks: Vec<f64> = (0..counts.len()).map(|i| (first_k + i) as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let mk = ks.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = ks.iter().zip(&ys).map(|(k, y)| (k - mk) * (y - my)).sum();
    let den: f64 = ks.iter().map(|k| (k - mk) * (k - mk)).sum();
    num / den
}

/// Lap count of the n-th iterate and the corresponding growth rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LapEstimate {
    pub laps: u64,
    /// ln(laps)/n in nats.
    pub rate: f64,
}

/// Counts monotone laps of the n-th iterate by pulling the critical
/// point back through preimages. Exact for the dyadic tent map; the
/// quadratic family dedupes preimages at 1e-12.
pub fn lap_entropy(sys: &MetricSystem, n: usize) -> Result<LapEstimate> {
    if !sys.facts.piecewise_monotone {
        return Err(Error::Unsupported(
            "lap counting needs a piecewise monotone interval map".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Input("lap counting needs at least one iterate".into()));
    }
    let preimages: Box<dyn Fn(f64) -> Vec<f64>> = match &sys.map {
        MapKind::Tent => Box::new(|y: f64| {
            if y == 1.0 {
                vec![0.5]
            } else {
                vec![y / 2.0, 1.0 - y / 2.0]
            }
        }),
        MapKind::Logistic { a } => {
            let a = *a;
            Box::new(move |y: f64| {
                let disc = 1.0 - 4.0 * y / a;
                if disc < 0.0 {
                    vec![]
                } else if disc == 0.0 {
                    vec![0.5]
                } else {
                    let s = disc.sqrt();
                    vec![(1.0 - s) / 2.0, (1.0 + s) / 2.0]
                }
            })
        }
        MapKind::IdentityInterval => {
            // No interior turning points at any iterate.
            return Ok(LapEstimate { laps: 1, rate: 0.0 });
        }
        _ => {
            return Err(Error::Unsupported(
                "lap counting needs a piecewise monotone interval map".into(),
            ))
        }
    };
    // Turning points of the n-th iterate: preimages of the critical
    // point under iterates 0..n, interior to (0,1).
    let mut turning: Vec<f64> = Vec::new();
    let mut level = vec![0.5f64];
    for _ in 0..n {
        turning.extend(level.iter().copied().filter(|&x| x > 0.0 && x < 1.0));
        let mut next: Vec<f64> = level.iter().flat_map(|&y| preimages(y)).collect();
        next.sort_by(|a, b| a.partial_cmp(b).unwrap());
        next.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        level = next;
    }
    turning.sort_by(|a, b| a.partial_cmp(b).unwrap());
    turning.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let laps = turning.len() as u64 + 1;
    Ok(LapEstimate { laps, rate: (laps as f64).ln() / n as f64 })
}
