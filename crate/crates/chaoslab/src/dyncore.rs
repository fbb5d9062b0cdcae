//! Phase-space vocabulary: points, metrics, iteration, sampling.
//!
//! Symbolic points materialize a finite window of a bi-infinite sequence
//! and carry a shift offset, so applying the shift map is O(1) and the
//! accessible range shrinks as the window slides. Distances over symbolic
//! points scan at most [`SCAN_CAP`] rings; two sequences agreeing that far
//! are reported at distance zero, which every detector threshold treats
//! as agreement. When a window no longer covers the requested scan the
//! operation reports a budget error instead of fabricating symbols.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ca::{self, BlockingWitness, CaClass, CaRule, CaWindow};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::symlang::SftGraph;

/// Rings scanned by symbolic metrics before reporting zero.
pub const SCAN_CAP: i64 = 64;

/// Window radius comfortably covering a detector horizon: after `horizon`
/// shifts the accessible range still admits a full metric scan.
pub fn window_radius_for(horizon: usize) -> i64 {
    horizon as i64 + SCAN_CAP + 8
}

/// Two-sided symbolic point: a materialized window plus a shift offset.
///
/// `symbol(i)` reads backing position `i + shift`; the accessible range is
/// `[-(radius - |shift|), radius - |shift|]` and shrinks by one per shift.
#[derive(Debug, Clone)]
pub struct SeqPoint {
    pub cells: Arc<Vec<u8>>,
    pub radius: i64,
    pub shift: i64,
    /// Torus coordinate of rotation-coded points, updated alongside the
    /// shift; lets perturbations re-code nearby orbits.
    pub coord: Option<f64>,
}

impl SeqPoint {
    pub fn new(cells: Vec<u8>, coord: Option<f64>) -> Result<SeqPoint> {
        if cells.is_empty() || cells.len() % 2 == 0 {
            return Err(Error::Input(format!(
                "sequence window needs an odd positive cell count, got {}",
                cells.len()
            )));
        }
        let radius = (cells.len() / 2) as i64;
        Ok(SeqPoint { cells: Arc::new(cells), radius, shift: 0, coord })
    }

    /// Symbol at coordinate `i` of the current point, `None` beyond the
    /// materialized window.
    pub fn symbol(&self, i: i64) -> Option<u8> {
        let raw = i + self.shift;
        if raw < -self.radius || raw > self.radius {
            None
        } else {
            Some(self.cells[(raw + self.radius) as usize])
        }
    }

    /// Largest ring readable on both sides; negative once the window has
    /// slid past its own extent.
    pub fn accessible(&self) -> i64 {
        self.radius - self.shift.abs()
    }
}

/// Odometer point: little-endian digits in a fixed base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitPoint {
    pub digits: Vec<u8>,
    pub base: u8,
}

/// A point of whichever phase space the system lives on.
#[derive(Debug, Clone)]
pub enum Point {
    Scalar(f64),
    Angle(f64),
    Seq(SeqPoint),
    Digits(DigitPoint),
    Cells(CaWindow),
}

/// Which distance the system's phase space carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricKind {
    /// Absolute difference on the unit interval.
    Euclidean,
    /// Wraparound distance on the unit circle.
    Circle,
    /// `2^-(innermost disagreement ring)` on sequences, capped scans.
    Cantor,
    /// `2^-(first differing digit)` on odometer digits.
    Digit,
    /// Cantor distance on automaton windows over their trusted cores.
    CantorWindow,
    /// Disagreement density around the full cycle of periodic windows.
    CyclicDensity,
}

/// Broad family of the system, which decides metric defaults, applicable
/// estimators, and the implication guards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemClass {
    Interval,
    Circle,
    Subshift,
    Coded,
    Odometer,
    CellularAutomaton,
    DensityShift,
}

/// The map to apply per step.
#[derive(Debug, Clone)]
pub enum MapKind {
    Tent,
    Logistic { a: f64 },
    Rotation { alpha: f64 },
    IdentityInterval,
    /// Left shift on sequences; `alpha` present for rotation-coded points
    /// whose torus coordinate advances alongside.
    Shift { alpha: Option<f64> },
    OdometerAdd,
    Automaton { rule: CaRule },
    CyclicShift,
}

/// How fresh points are drawn.
#[derive(Debug, Clone)]
pub enum SamplerKind {
    UnitInterval,
    UnitCircle,
    /// Fixed pool of precomputed coded windows with their coordinates.
    PrebuiltSeq { pool: Vec<(Arc<Vec<u8>>, f64)>, radius: i64 },
    /// Two-sided random walks on the subshift graph.
    GraphWalk { graph: Arc<SftGraph>, radius: i64 },
    /// Windows into a fixed two-sided substitution sequence at random
    /// offsets.
    SubstWindow { base: Arc<SubstBase>, radius: i64, span: i64 },
    OdometerDigits { base: u8, len: usize },
    /// Uniformly random window, constant-zero boundary.
    CaUniform { states: u8, radius: i64 },
    /// Uniformly random periodic window.
    CyclicUniform { states: u8, len: usize },
}

/// How admissible small perturbations are produced.
#[derive(Debug, Clone)]
pub enum PerturbKind {
    /// Shrinking nudges on interval or circle coordinates.
    Nudge,
    /// Free symbol flip outside the perturbation ball.
    FlipFree { states: u8 },
    /// Digit change outside the perturbation ball.
    DigitFlip,
    /// Flip plus admissible regeneration of everything to the right.
    FlipAdmissible { graph: Arc<SftGraph> },
    /// Re-code the coded orbit from a nearby torus coordinate.
    Recode { alpha: f64 },
    /// Slide to the next occurrence of the central word in the backing
    /// substitution sequence.
    OccurrenceShift { base: Arc<SubstBase> },
    /// Sprinkle a low density of flips around the cycle.
    CyclicSprinkle,
    /// No admissible perturbation exists (finite phase spaces).
    NoPerturb,
}

/// Structural facts established at build time; these license the exact
/// fast paths of the detector layer.
#[derive(Debug, Clone, Default)]
pub struct StructuralFacts {
    /// The map provably preserves the metric.
    pub isometry: bool,
    /// Exact point count when the phase space is finite.
    pub finite_points: Option<u64>,
    /// `Some(true)` when the space is certified infinite by a finite
    /// computation (edge excess, or factor counts exceeding `n`).
    pub infinite: Option<bool>,
    /// Symbolic families where distinct points separate to a fixed ring.
    pub expansive: bool,
    /// Blocking word found for automaton rules, if any.
    pub blocking: Option<BlockingWitness>,
    /// Table-level classification of automaton rules.
    pub ca_class: Option<CaClass>,
    /// Lap counting applies (piecewise monotone interval maps).
    pub piecewise_monotone: bool,
}

/// A system bundled with its metric, sampler, perturber, and facts.
#[derive(Debug, Clone)]
pub struct MetricSystem {
    pub label: String,
    pub class: SystemClass,
    pub metric: MetricKind,
    /// True only when the distance can vanish on genuinely distinct
    /// configurations (the density metric).
    pub pseudo_metric: bool,
    pub map: MapKind,
    pub sampler: SamplerKind,
    pub perturber: PerturbKind,
    pub facts: StructuralFacts,
}

/// Fixed point of a substitution extended to a two-sided sequence.
///
/// `left_rev[k]` is the symbol at coordinate `-1-k`; `right[k]` the symbol
/// at coordinate `k`. Both arms are long enough for every window the
/// samplers cut out.
#[derive(Debug, Clone)]
pub struct SubstBase {
    pub left_rev: Vec<u8>,
    pub right: Vec<u8>,
}

impl SubstBase {
    /// Symbol at signed coordinate `t`, `None` outside the materialized
    /// arms.
    pub fn at(&self, t: i64) -> Option<u8> {
        if t >= 0 {
            self.right.get(t as usize).copied()
        } else {
            self.left_rev.get((-t - 1) as usize).copied()
        }
    }
}

/// Coding of the rotation by `alpha` with respect to the two-cell
/// partition splitting at `1 - alpha`: symbol 0 on `[0, 1-alpha)`,
/// symbol 1 on `[1-alpha, 1)`.
pub fn rotation_code_symbol(alpha: f64, x0: f64, i: i64) -> u8 {
    let pos = frac(x0 + i as f64 * alpha);
    u8::from(pos >= 1.0 - alpha)
}

pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

// ---------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------

/// One application of the system map.
pub fn step(sys: &MetricSystem, x: &Point) -> Result<Point> {
    match (&sys.map, x) {
        (MapKind::Tent, Point::Scalar(v)) => {
            let v = *v;
            Ok(Point::Scalar(if v < 0.5 { 2.0 * v } else { 2.0 - 2.0 * v }))
        }
        (MapKind::Logistic { a }, Point::Scalar(v)) => Ok(Point::Scalar(a * v * (1.0 - v))),
        (MapKind::IdentityInterval, Point::Scalar(v)) => Ok(Point::Scalar(*v)),
        (MapKind::Rotation { alpha }, Point::Angle(v)) => Ok(Point::Angle(frac(v + alpha))),
        (MapKind::Shift { alpha }, Point::Seq(s)) => {
            let mut s = s.clone();
            s.shift += 1;
            if let (Some(a), Some(c)) = (alpha, s.coord) {
                s.coord = Some(frac(c + a));
            }
            Ok(Point::Seq(s))
        }
        (MapKind::OdometerAdd, Point::Digits(d)) => {
            let mut digits = d.digits.clone();
            for slot in digits.iter_mut() {
                if *slot + 1 < d.base {
                    *slot += 1;
                    return Ok(Point::Digits(DigitPoint { digits, base: d.base }));
                }
                *slot = 0;
            }
            // Carry beyond the window is dropped; distances only read the
            // materialized digits.
            Ok(Point::Digits(DigitPoint { digits, base: d.base }))
        }
        (MapKind::Automaton { rule }, Point::Cells(w)) => Ok(Point::Cells(ca::ca_step(rule, w)?)),
        (MapKind::CyclicShift, Point::Cells(w)) => Ok(Point::Cells(w.rotated(1)?)),
        _ => Err(Error::Input("point kind does not match the system map".into())),
    }
}

/// n-fold application of the map.
pub fn iterate(sys: &MetricSystem, x: &Point, n: usize) -> Result<Point> {
    let mut cur = x.clone();
    for _ in 0..n {
        cur = step(sys, &cur)?;
    }
    Ok(cur)
}

/// The points `x, f(x), ..., f^n(x)`, `n + 1` entries.
pub fn orbit(sys: &MetricSystem, x: &Point, n: usize) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(x.clone());
    for i in 0..n {
        let next = step(sys, &out[i])?;
        out.push(next);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------

/// Distance between two points under the system metric.
pub fn distance(sys: &MetricSystem, x: &Point, y: &Point) -> Result<f64> {
    match (sys.metric, x, y) {
        (MetricKind::Euclidean, Point::Scalar(a), Point::Scalar(b)) => Ok((a - b).abs()),
        (MetricKind::Circle, Point::Angle(a), Point::Angle(b)) => {
            let d = (a - b).abs();
            Ok(d.min(1.0 - d))
        }
        (MetricKind::Cantor, Point::Seq(a), Point::Seq(b)) => cantor_seq_distance(a, b),
        (MetricKind::Digit, Point::Digits(a), Point::Digits(b)) => {
            if a.digits.len() != b.digits.len() {
                return Err(Error::Input("digit points of different lengths".into()));
            }
            for (k, (da, db)) in a.digits.iter().zip(&b.digits).enumerate() {
                if da != db {
                    return Ok(2f64.powi(-(k as i32)));
                }
            }
            Ok(0.0)
        }
        (MetricKind::CantorWindow, Point::Cells(a), Point::Cells(b)) => ca::cantor_distance(a, b),
        (MetricKind::CyclicDensity, Point::Cells(a), Point::Cells(b)) => {
            if a.len() != b.len() {
                return Err(Error::Input("cyclic windows of different lengths".into()));
            }
            let l = a.len() as i64;
            let mut diff = 0u64;
            for i in 0..l {
                let ai = a.get(i - l / 2);
                let bi = b.get(i - l / 2);
                if ai != bi {
                    diff += 1;
                }
            }
            Ok(diff as f64 / l as f64)
        }
        _ => Err(Error::Input("point kinds do not match the system metric".into())),
    }
}

fn cantor_seq_distance(a: &SeqPoint, b: &SeqPoint) -> Result<f64> {
    if Arc::ptr_eq(&a.cells, &b.cells) && a.shift == b.shift {
        return Ok(0.0);
    }
    let limit = SCAN_CAP.min(a.accessible()).min(b.accessible());
    if limit < 0 {
        return Err(Error::Budget(
            "sequence window exhausted by shifting; rebuild with a larger radius".into(),
        ));
    }
    for k in 0..=limit {
        if a.symbol(k) != b.symbol(k) || (k > 0 && a.symbol(-k) != b.symbol(-k)) {
            return Ok(2f64.powi(-(k as i32)));
        }
    }
    Ok(0.0)
}

/// `d(f^t x, f^t y)` for `t = 0..=n`, `n + 1` entries.
///
/// Isometries produce constant series without iterating. Shift systems on
/// same-shape windows reduce to a merge over precomputed disagreement
/// positions, matching the naive loop value for value. Everything else
/// steps both orbits.
pub fn distance_series(sys: &MetricSystem, x: &Point, y: &Point, n: usize) -> Result<Vec<f64>> {
    if sys.facts.isometry {
        let d0 = distance(sys, x, y)?;
        return Ok(vec![d0; n + 1]);
    }
    if let (MetricKind::Cantor, MapKind::Shift { .. }, Point::Seq(a), Point::Seq(b)) =
        (sys.metric, &sys.map, x, y)
    {
        if a.radius == b.radius && a.shift == b.shift && a.cells.len() == b.cells.len() {
            return shift_series(a, b, n);
        }
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut cx = x.clone();
    let mut cy = y.clone();
    out.push(distance(sys, &cx, &cy)?);
    for _ in 0..n {
        cx = step(sys, &cx)?;
        cy = step(sys, &cy)?;
        out.push(distance(sys, &cx, &cy)?);
    }
    Ok(out)
}

/// Distance series for the shift map via the disagreement positions.
fn shift_series(a: &SeqPoint, b: &SeqPoint, n: usize) -> Result<Vec<f64>> {
    let radius = a.radius;
    // Backing coordinates where the windows disagree, ascending.
    let diffs: Vec<i64> = (-radius..=radius)
        .filter(|&p| a.cells[(p + radius) as usize] != b.cells[(p + radius) as usize])
        .collect();
    let mut out = Vec::with_capacity(n + 1);
    let mut cursor = 0usize; // first diff >= current center
    for t in 0..=n {
        let center = a.shift + t as i64;
        let acc = radius - center.abs();
        if acc < 0 {
            return Err(Error::Budget(
                "sequence window exhausted by shifting; rebuild with a larger radius".into(),
            ));
        }
        while cursor < diffs.len() && diffs[cursor] < center {
            cursor += 1;
        }
        let mut ring = i64::MAX;
        if cursor < diffs.len() {
            ring = diffs[cursor] - center;
        }
        if cursor > 0 {
            ring = ring.min(center - diffs[cursor - 1]);
        }
        let cap = SCAN_CAP.min(acc);
        out.push(if ring <= cap { 2f64.powi(-(ring as i32)) } else { 0.0 });
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Sampling and perturbation
// ---------------------------------------------------------------------

/// Draws one point; identical generator state yields identical points.
pub fn sample_point(sys: &MetricSystem, rng: &mut SplitMix64) -> Result<Point> {
    match &sys.sampler {
        SamplerKind::UnitInterval => Ok(Point::Scalar(rng.next_f64())),
        SamplerKind::UnitCircle => Ok(Point::Angle(rng.next_f64())),
        SamplerKind::PrebuiltSeq { pool, radius: _ } => {
            let (cells, coord) = &pool[rng.next_below(pool.len() as u64) as usize];
            let radius = (cells.len() / 2) as i64;
            Ok(Point::Seq(SeqPoint {
                cells: cells.clone(),
                radius,
                shift: 0,
                coord: Some(*coord),
            }))
        }
        SamplerKind::GraphWalk { graph, radius } => {
            let r = *radius;
            let mut cells = vec![0u8; (2 * r + 1) as usize];
            let start = rng.next_below(graph.vertex_count() as u64) as usize;
            // Backward arm: symbols at -1, -2, ... read against in-edges.
            let mut v = start;
            for k in 1..=r {
                let es = &graph.inn[v];
                let e = &graph.edges[es[rng.next_below(es.len() as u64) as usize] as usize];
                cells[(r - k) as usize] = e.symbol;
                v = e.from as usize;
            }
            // Forward arm: symbols at 0, 1, ... read along out-edges.
            let mut v = start;
            for k in 0..=r {
                let es = &graph.out[v];
                let e = &graph.edges[es[rng.next_below(es.len() as u64) as usize] as usize];
                cells[(r + k) as usize] = e.symbol;
                v = e.to as usize;
            }
            Ok(Point::Seq(SeqPoint::new(cells, None)?))
        }
        SamplerKind::SubstWindow { base, radius, span } => {
            let r = *radius;
            let j = rng.next_below(*span as u64) as i64;
            let mut cells = vec![0u8; (2 * r + 1) as usize];
            for (idx, slot) in cells.iter_mut().enumerate() {
                let t = j + idx as i64 - r;
                *slot = base.at(t).ok_or_else(|| {
                    Error::Budget("substitution base too short for the window".into())
                })?;
            }
            Ok(Point::Seq(SeqPoint::new(cells, None)?))
        }
        SamplerKind::OdometerDigits { base, len } => {
            let digits = (0..*len).map(|_| rng.next_below(*base as u64) as u8).collect();
            Ok(Point::Digits(DigitPoint { digits, base: *base }))
        }
        SamplerKind::CaUniform { states, radius } => {
            let cells =
                (0..2 * radius + 1).map(|_| rng.next_below(*states as u64) as u8).collect();
            Ok(Point::Cells(CaWindow::from_cells(cells, ca::CaBoundary::Constant(0))?))
        }
        SamplerKind::CyclicUniform { states, len } => {
            let cells = (0..*len).map(|_| rng.next_below(*states as u64) as u8).collect();
            Ok(Point::Cells(CaWindow::from_cells(cells, ca::CaBoundary::Periodic)?))
        }
    }
}

/// Draws the one point determined by `seed`; same seed, same point.
pub fn sample_point_seeded(sys: &MetricSystem, seed: u64) -> Result<Point> {
    let mut rng = SplitMix64::new(seed);
    sample_point(sys, &mut rng)
}

/// Draws a pair at positive distance, retrying a bounded number of times.
pub fn sample_distinct_pair(
    sys: &MetricSystem,
    rng: &mut SplitMix64,
) -> Result<Option<(Point, Point)>> {
    let x = sample_point(sys, rng)?;
    for _ in 0..32 {
        let y = sample_point(sys, rng)?;
        if distance(sys, &x, &y)? > 0.0 {
            return Ok(Some((x, y)));
        }
    }
    Ok(None)
}

/// Produces a candidate perturbation of `x` targeted inside the radius
/// `rho` ball. `variant` indexes alternative strategies; `None` means the
/// variant has nothing admissible to offer. Callers verify the achieved
/// distance and walk variants until satisfied.
pub fn perturb(
    sys: &MetricSystem,
    x: &Point,
    rho: f64,
    variant: u32,
    rng: &mut SplitMix64,
) -> Result<Option<Point>> {
    match (&sys.perturber, x) {
        (PerturbKind::NoPerturb, _) => Ok(None),
        (PerturbKind::Nudge, Point::Scalar(v)) => {
            let mag = rho / 2f64.powi(1 + (variant / 2) as i32);
            let delta = if variant % 2 == 0 { mag } else { -mag };
            let y = v + delta;
            if (0.0..=1.0).contains(&y) && y != *v {
                Ok(Some(Point::Scalar(y)))
            } else {
                Ok(None)
            }
        }
        (PerturbKind::Nudge, Point::Angle(v)) => {
            let mag = rho / 2f64.powi(1 + (variant / 2) as i32);
            let delta = if variant % 2 == 0 { mag } else { -mag };
            let y = frac(v + delta);
            if y != *v {
                Ok(Some(Point::Angle(y)))
            } else {
                Ok(None)
            }
        }
        (PerturbKind::FlipFree { states }, Point::Seq(s)) => {
            let k0 = ball_exit_ring(rho);
            let p = k0 + (variant / 2) as i64;
            let side = if variant % 2 == 0 { 1 } else { -1 };
            let raw = side * p + s.shift;
            if raw.abs() > s.radius {
                return Ok(None);
            }
            let idx = (raw + s.radius) as usize;
            let mut cells = (*s.cells).clone();
            cells[idx] = (cells[idx] + 1) % states;
            Ok(Some(Point::Seq(SeqPoint {
                cells: Arc::new(cells),
                radius: s.radius,
                shift: s.shift,
                coord: None,
            })))
        }
        (PerturbKind::DigitFlip, Point::Digits(d)) => {
            let k = (ball_exit_ring(rho) + variant as i64) as usize;
            if k >= d.digits.len() {
                return Ok(None);
            }
            let mut digits = d.digits.clone();
            digits[k] = (digits[k] + 1) % d.base;
            Ok(Some(Point::Digits(DigitPoint { digits, base: d.base })))
        }
        (PerturbKind::FlipAdmissible { graph }, Point::Seq(s)) => {
            flip_admissible(graph, s, rho, variant, rng)
        }
        (PerturbKind::Recode { alpha }, Point::Seq(s)) => {
            let x0 = match s.coord {
                Some(c) => c,
                None => return Ok(None),
            };
            // The first coding disagreement between nearby angles sits near
            // index 1/(4*mag); mags below rho/8 push it past SCAN_CAP where
            // the distance reads as zero, so the ladder starts at 2*rho.
            let mag = rho * 2.0 / 2f64.powi((variant / 2) as i32);
            let delta = if variant % 2 == 0 { mag } else { -mag };
            let y0 = frac(x0 + delta);
            let r = s.radius - s.shift.abs();
            if r < 1 {
                return Ok(None);
            }
            // Build the recoded window centered on the current position.
            let mut cells = vec![0u8; (2 * r + 1) as usize];
            for (idx, slot) in cells.iter_mut().enumerate() {
                *slot = rotation_code_symbol(*alpha, y0, idx as i64 - r);
            }
            Ok(Some(Point::Seq(SeqPoint {
                cells: Arc::new(cells),
                radius: r,
                shift: 0,
                coord: Some(y0),
            })))
        }
        (PerturbKind::OccurrenceShift { base }, Point::Seq(s)) => {
            occurrence_shift(base, s, rho, variant)
        }
        (PerturbKind::CyclicSprinkle, Point::Cells(w)) => {
            let l = w.len();
            let flips = ((rho * l as f64 / 4.0).ceil() as usize).clamp(1, l);
            let mut cells = w.cells().to_vec();
            for _ in 0..flips {
                let i = rng.next_below(l as u64) as usize;
                cells[i] ^= 1;
            }
            Ok(Some(Point::Cells(CaWindow::from_cells(cells, w.boundary)?)))
        }
        (PerturbKind::FlipFree { states }, Point::Cells(w)) => {
            let k0 = ball_exit_ring(rho);
            let p = k0 + (variant / 2) as i64;
            let side: i64 = if variant % 2 == 0 { 1 } else { -1 };
            let coord = side * p;
            if coord.abs() > w.valid() {
                return Ok(None);
            }
            let mut cells = w.cells().to_vec();
            let idx = (coord + w.half()) as usize;
            cells[idx] = (cells[idx] + 1) % states;
            Ok(Some(Point::Cells(CaWindow::from_cells(cells, w.boundary)?)))
        }
        _ => Err(Error::Input("point kind does not match the perturbation strategy".into())),
    }
}

/// Smallest ring `k` with `2^-k` strictly inside the ball of radius `rho`.
fn ball_exit_ring(rho: f64) -> i64 {
    let mut k = (-rho.log2()).floor() as i64;
    while 2f64.powi(-(k as i32)) >= rho {
        k += 1;
    }
    k
}

fn flip_admissible(
    graph: &SftGraph,
    s: &SeqPoint,
    rho: f64,
    variant: u32,
    rng: &mut SplitMix64,
) -> Result<Option<Point>> {
    let k0 = ball_exit_ring(rho);
    let p = k0 + variant as i64;
    let acc = s.accessible();
    if p + graph.memory as i64 > acc {
        return Ok(None);
    }
    // Vertex just before coordinate p: the memory word ending at p - 1.
    let mem = graph.memory as i64;
    let mut vw = Vec::with_capacity(graph.memory);
    for i in p - mem..p {
        vw.push(s.symbol(i).unwrap());
    }
    let v = match graph.vertices.iter().position(|w| w == &vw) {
        Some(v) => v,
        None => return Ok(None),
    };
    let old = s.symbol(p).unwrap();
    let alt = graph.out[v]
        .iter()
        .map(|&e| &graph.edges[e as usize])
        .find(|e| e.symbol != old);
    let alt = match alt {
        Some(e) => e,
        None => return Ok(None),
    };
    // Rebase so the result owns its full window again.
    let r = acc;
    let mut cells = vec![0u8; (2 * r + 1) as usize];
    for i in -r..=r {
        cells[(i + r) as usize] = s.symbol(i).unwrap();
    }
    cells[(p + r) as usize] = alt.symbol;
    // Regenerate everything right of p along admissible edges.
    let mut v = alt.to as usize;
    for i in p + 1..=r {
        let es = &graph.out[v];
        let e = &graph.edges[es[rng.next_below(es.len() as u64) as usize] as usize];
        cells[(i + r) as usize] = e.symbol;
        v = e.to as usize;
    }
    Ok(Some(Point::Seq(SeqPoint { cells: Arc::new(cells), radius: r, shift: 0, coord: None })))
}

fn occurrence_shift(
    base: &SubstBase,
    s: &SeqPoint,
    rho: f64,
    variant: u32,
) -> Result<Option<Point>> {
    // The point is a window into the base; its center sits at base
    // coordinate `shift` plus the offset the sampler chose. Recover the
    // center by matching is unnecessary: windows remember only cells, so
    // search for the central word inside the base directly.
    let c = ball_exit_ring(rho);
    let acc = s.accessible();
    if acc < c {
        return Ok(None);
    }
    let word: Vec<u8> = (-c..=c).map(|i| s.symbol(i).unwrap()).collect();
    // Scan the base for occurrences of the central word and take the
    // variant-th one that can serve as a new center.
    let r = acc;
    let lo = -(base.left_rev.len() as i64) + r + c;
    let hi = base.right.len() as i64 - 1 - r - c;
    let mut seen = 0u32;
    let mut t = lo;
    while t <= hi {
        let mut ok = true;
        for (k, &wsym) in word.iter().enumerate() {
            if base.at(t + k as i64 - c) != Some(wsym) {
                ok = false;
                break;
            }
        }
        if ok {
            // Reject the occurrence reproducing the same window.
            let mut same = true;
            let mut cells = vec![0u8; (2 * r + 1) as usize];
            for i in -r..=r {
                let sym = match base.at(t + i) {
                    Some(sym) => sym,
                    None => {
                        same = true;
                        break;
                    }
                };
                cells[(i + r) as usize] = sym;
                if sym != s.symbol(i).unwrap() {
                    same = false;
                }
            }
            if !same {
                if seen == variant {
                    return Ok(Some(Point::Seq(SeqPoint {
                        cells: Arc::new(cells),
                        radius: r,
                        shift: 0,
                        coord: None,
                    })));
                }
                seen += 1;
            }
        }
        t += 1;
    }
    Ok(None)
}
