//! Constructors for the bundled example systems.
//!
//! A [`SystemSpec`] is the declarative form (also the JSON config schema);
//! [`build_system`] validates it and assembles the runnable
//! [`MetricSystem`] with its sampler, perturber, and structural facts.
//! Symbolic windows are sized from the detector horizon so the whole run
//! stays inside the accessible range.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ca::{self, CaRule};
use crate::dyncore::{
    rotation_code_symbol, window_radius_for, MapKind, MetricKind, MetricSystem, PerturbKind,
    SamplerKind, StructuralFacts, SubstBase, SystemClass,
};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::symlang::SftGraph;
use crate::verdict::{DetectorBudget, Verdict, Witness};

/// Declarative system description; doubles as the JSON config schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    Tent,
    Logistic {
        a: f64,
    },
    Rotation {
        alpha: f64,
    },
    IdentityInterval,
    Sturmian {
        alpha: f64,
    },
    Substitution {
        rules: BTreeMap<String, String>,
        seed: String,
    },
    Sft {
        alphabet: Vec<String>,
        forbidden: Vec<String>,
    },
    FullShift {
        alphabet: Vec<String>,
    },
    Odometer {
        base: u8,
    },
    Ca {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        wolfram: Option<u8>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        states: Option<u8>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<u8>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<String>,
    },
}

impl SystemSpec {
    /// Label used when the config does not name the system.
    pub fn default_label(&self) -> String {
        match self {
            SystemSpec::Tent => "tent".into(),
            SystemSpec::Logistic { .. } => "logistic".into(),
            SystemSpec::Rotation { .. } => "rotation".into(),
            SystemSpec::IdentityInterval => "identity-interval".into(),
            SystemSpec::Sturmian { .. } => "sturmian".into(),
            SystemSpec::Substitution { .. } => "substitution".into(),
            SystemSpec::Sft { .. } => "sft".into(),
            SystemSpec::FullShift { .. } => "full-shift".into(),
            SystemSpec::Odometer { .. } => "odometer".into(),
            SystemSpec::Ca { wolfram, .. } => match wolfram {
                Some(w) => format!("ca-{w}"),
                None => "ca".into(),
            },
        }
    }
}

/// Number of odometer digits materialized per point; deep enough that no
/// bounded run ever carries past the last digit visibly.
const ODOMETER_DIGITS: usize = 96;

/// Offsets a substitution window sampler may choose from.
const SUBST_SPAN: i64 = 2048;

/// Extra arm length beyond sampler reach, consumed by occurrence-shift
/// perturbations scanning for repeats.
const SUBST_SLACK: i64 = 4096;

// ---------------------------------------------------------------------
// Building
// ---------------------------------------------------------------------

/// Validates the description and assembles the runnable system, sizing
/// symbolic windows to the budget's horizon.
pub fn build_system(spec: &SystemSpec, budget: &DetectorBudget) -> Result<MetricSystem> {
    budget.validate()?;
    let radius = window_radius_for(budget.horizon);
    match spec {
        SystemSpec::Tent => Ok(interval_system("tent", MapKind::Tent)),
        SystemSpec::Logistic { a } => {
            if !(*a > 0.0 && *a <= 4.0) {
                return Err(Error::Config(format!("logistic parameter a out of (0,4]: {a}")));
            }
            Ok(interval_system("logistic", MapKind::Logistic { a: *a }))
        }
        SystemSpec::IdentityInterval => {
            let mut sys = interval_system("identity-interval", MapKind::IdentityInterval);
            sys.facts.isometry = true;
            Ok(sys)
        }
        SystemSpec::Rotation { alpha } => {
            if !(*alpha > 0.0 && *alpha < 1.0) {
                return Err(Error::Config(format!("rotation angle out of (0,1): {alpha}")));
            }
            Ok(MetricSystem {
                label: "rotation".into(),
                class: SystemClass::Circle,
                metric: MetricKind::Circle,
                pseudo_metric: false,
                map: MapKind::Rotation { alpha: *alpha },
                sampler: SamplerKind::UnitCircle,
                perturber: PerturbKind::Nudge,
                facts: StructuralFacts {
                    isometry: true,
                    infinite: Some(true),
                    ..Default::default()
                },
            })
        }
        SystemSpec::Sturmian { alpha } => {
            check_coding_angle(*alpha)?;
            // Eight evenly spaced base coordinates; each is coded once
            // over the full window and reused for every draw.
            let mut pool = Vec::with_capacity(8);
            for j in 0..8 {
                let x0 = j as f64 / 8.0;
                let cells: Vec<u8> = (-radius..=radius)
                    .map(|i| rotation_code_symbol(*alpha, x0, i))
                    .collect();
                pool.push((Arc::new(cells), x0));
            }
            Ok(MetricSystem {
                label: "sturmian".into(),
                class: SystemClass::Coded,
                metric: MetricKind::Cantor,
                pseudo_metric: false,
                map: MapKind::Shift { alpha: Some(*alpha) },
                sampler: SamplerKind::PrebuiltSeq { pool, radius },
                perturber: PerturbKind::Recode { alpha: *alpha },
                facts: StructuralFacts {
                    expansive: true,
                    // An irrational-angle coding is aperiodic, so the
                    // orbit closure is infinite; the angle check above is
                    // the certificate.
                    infinite: Some(true),
                    ..Default::default()
                },
            })
        }
        SystemSpec::Substitution { rules, seed } => {
            let table = parse_substitution(rules)?;
            let seed_sym = parse_seed(&table, seed)?;
            let base = two_sided_base(&table, seed_sym, radius + SUBST_SPAN + SUBST_SLACK)?;
            Ok(MetricSystem {
                label: "substitution".into(),
                class: SystemClass::Coded,
                metric: MetricKind::Cantor,
                pseudo_metric: false,
                map: MapKind::Shift { alpha: None },
                sampler: SamplerKind::SubstWindow {
                    base: Arc::new(base.clone()),
                    radius,
                    span: SUBST_SPAN,
                },
                perturber: PerturbKind::OccurrenceShift { base: Arc::new(base) },
                facts: StructuralFacts { expansive: true, ..Default::default() },
            })
        }
        SystemSpec::Sft { alphabet, forbidden } => {
            let (q, index) = parse_alphabet(alphabet)?;
            if forbidden.is_empty() {
                return Err(Error::Config("sft forbidden word list is empty".into()));
            }
            let mut words = Vec::with_capacity(forbidden.len());
            for w in forbidden {
                if w.is_empty() {
                    return Err(Error::Config("forbidden words must be nonempty".into()));
                }
                words.push(parse_word(&index, w)?);
            }
            let graph = Arc::new(SftGraph::build(q, &words)?);
            Ok(subshift_system("sft", graph.clone(), radius, PerturbKind::FlipAdmissible {
                graph,
            }))
        }
        SystemSpec::FullShift { alphabet } => {
            let (q, _) = parse_alphabet(alphabet)?;
            let graph = Arc::new(SftGraph::full_shift(q)?);
            Ok(subshift_system(
                "full-shift",
                graph,
                radius,
                PerturbKind::FlipFree { states: q },
            ))
        }
        SystemSpec::Odometer { base } => {
            if *base < 2 {
                return Err(Error::Config(format!("odometer base must be at least 2: {base}")));
            }
            Ok(MetricSystem {
                label: "odometer".into(),
                class: SystemClass::Odometer,
                metric: MetricKind::Digit,
                pseudo_metric: false,
                map: MapKind::OdometerAdd,
                sampler: SamplerKind::OdometerDigits { base: *base, len: ODOMETER_DIGITS },
                perturber: PerturbKind::DigitFlip,
                facts: StructuralFacts {
                    isometry: true,
                    infinite: Some(true),
                    ..Default::default()
                },
            })
        }
        SystemSpec::Ca { wolfram, states, radius: r, table } => {
            let rule = parse_ca_rule(*wolfram, *states, *r, table.as_deref())?;
            let label = match rule.wolfram {
                Some(w) => format!("ca-{w}"),
                None => "ca".into(),
            };
            // Each automaton step under a constant boundary shrinks the
            // trusted core by the rule radius.
            let win = budget.horizon as i64 * rule.radius as i64 + SCAN_MARGIN;
            let blocking = ca::blocking_word_search(&rule, 12, 1024)?;
            let ca_class = rule.classify();
            let states_n = rule.states;
            Ok(MetricSystem {
                label,
                class: SystemClass::CellularAutomaton,
                metric: MetricKind::CantorWindow,
                pseudo_metric: false,
                map: MapKind::Automaton { rule },
                sampler: SamplerKind::CaUniform { states: states_n, radius: win },
                perturber: PerturbKind::FlipFree { states: states_n },
                facts: StructuralFacts {
                    isometry: ca_class == Some(ca::CaClass::Identity),
                    infinite: Some(true),
                    blocking,
                    ca_class,
                    ..Default::default()
                },
            })
        }
    }
}

/// Core margin kept beyond the horizon so distance scans never starve.
const SCAN_MARGIN: i64 = 72;

fn interval_system(label: &str, map: MapKind) -> MetricSystem {
    MetricSystem {
        label: label.into(),
        class: SystemClass::Interval,
        metric: MetricKind::Euclidean,
        pseudo_metric: false,
        map,
        sampler: SamplerKind::UnitInterval,
        perturber: PerturbKind::Nudge,
        facts: StructuralFacts {
            infinite: Some(true),
            piecewise_monotone: true,
            ..Default::default()
        },
    }
}

fn subshift_system(
    label: &str,
    graph: Arc<SftGraph>,
    radius: i64,
    perturber: PerturbKind,
) -> MetricSystem {
    let finite_points = graph.finite_space();
    MetricSystem {
        label: label.into(),
        class: SystemClass::Subshift,
        metric: MetricKind::Cantor,
        pseudo_metric: false,
        map: MapKind::Shift { alpha: None },
        sampler: SamplerKind::GraphWalk { graph, radius },
        perturber,
        facts: StructuralFacts {
            expansive: true,
            // A pruned edge graph carries a finite space exactly when
            // every vertex has one in- and one out-edge; otherwise some
            // branch or bridge yields infinitely many points.
            infinite: Some(finite_points.is_none()),
            finite_points,
            ..Default::default()
        },
    }
}

/// The shift acting on periodic windows under the disagreement-density
/// metric; an isometry, and the one pseudo-metric system.
pub fn density_shift_system(len: usize) -> Result<MetricSystem> {
    if len < 3 || len % 2 == 0 {
        return Err(Error::Config(format!(
            "density shift needs an odd window length of at least 3, got {len}"
        )));
    }
    Ok(MetricSystem {
        label: "density-shift".into(),
        class: SystemClass::DensityShift,
        metric: MetricKind::CyclicDensity,
        pseudo_metric: true,
        map: MapKind::CyclicShift,
        sampler: SamplerKind::CyclicUniform { states: 2, len },
        perturber: PerturbKind::CyclicSprinkle,
        facts: StructuralFacts { isometry: true, ..Default::default() },
    })
}

// ---------------------------------------------------------------------
// Spec parsing helpers
// ---------------------------------------------------------------------

fn parse_alphabet(alphabet: &[String]) -> Result<(u8, HashMap<char, u8>)> {
    if alphabet.len() < 2 || alphabet.len() > 6 {
        return Err(Error::Config(format!(
            "alphabet must list between 2 and 6 symbols, got {}",
            alphabet.len()
        )));
    }
    let mut index = HashMap::new();
    for (i, s) in alphabet.iter().enumerate() {
        let mut chars = s.chars();
        let c = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => {
                return Err(Error::Config(format!(
                    "alphabet symbols must be single characters, got {s:?}"
                )))
            }
        };
        if index.insert(c, i as u8).is_some() {
            return Err(Error::Config(format!("alphabet symbol {c:?} listed twice")));
        }
    }
    Ok((alphabet.len() as u8, index))
}

fn parse_word(index: &HashMap<char, u8>, word: &str) -> Result<Vec<u8>> {
    word.chars()
        .map(|c| {
            index.get(&c).copied().ok_or_else(|| {
                Error::Config(format!("word {word:?} uses symbol {c:?} outside the alphabet"))
            })
        })
        .collect()
}

/// Substitution table in index form: `images[s]` is the image of symbol
/// `s`, alphabet sorted by the config's symbol characters.
#[derive(Debug, Clone)]
pub struct SubstTable {
    pub symbols: Vec<char>,
    pub images: Vec<Vec<u8>>,
}

impl SubstTable {
    pub fn alphabet_len(&self) -> usize {
        self.symbols.len()
    }

    /// Applies the substitution to a word.
    pub fn apply(&self, word: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(word.len() * 2);
        for &s in word {
            out.extend_from_slice(&self.images[s as usize]);
        }
        out
    }
}

fn parse_substitution(rules: &BTreeMap<String, String>) -> Result<SubstTable> {
    if rules.is_empty() {
        return Err(Error::Config("substitution rule map is empty".into()));
    }
    let mut symbols = Vec::new();
    for key in rules.keys() {
        let mut chars = key.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => symbols.push(c),
            _ => {
                return Err(Error::Config(format!(
                    "substitution symbols must be single characters, got {key:?}"
                )))
            }
        }
    }
    let index: HashMap<char, u8> =
        symbols.iter().enumerate().map(|(i, &c)| (c, i as u8)).collect();
    let mut images = Vec::with_capacity(symbols.len());
    for (key, image) in rules {
        if image.is_empty() {
            return Err(Error::Config(format!("substitution image of {key:?} is empty")));
        }
        let mut img = Vec::with_capacity(image.len());
        for c in image.chars() {
            match index.get(&c) {
                Some(&i) => img.push(i),
                None => {
                    return Err(Error::Config(format!(
                        "substitution image of {key:?} uses {c:?}, which has no rule"
                    )))
                }
            }
        }
        images.push(img);
    }
    Ok(SubstTable { symbols, images })
}

fn parse_seed(table: &SubstTable, seed: &str) -> Result<u8> {
    let mut chars = seed.chars();
    let c = match (chars.next(), chars.next()) {
        (Some(c), None) => c,
        _ => {
            return Err(Error::Config(format!(
                "substitution seed must be a single character, got {seed:?}"
            )))
        }
    };
    table
        .symbols
        .iter()
        .position(|&s| s == c)
        .map(|i| i as u8)
        .ok_or_else(|| Error::Config(format!("substitution seed {c:?} has no rule")))
}

/// Rejects coding angles that a bounded horizon could mistake for
/// rational: within 1e-9 of a fraction with denominator up to 1000.
fn check_coding_angle(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("coding angle out of (0,1): {alpha}")));
    }
    for q in 1..=1000u64 {
        let p = (alpha * q as f64).round();
        if (alpha - p / q as f64).abs() < 1e-9 {
            return Err(Error::Config(format!(
                "coding angle {alpha} is within 1e-9 of {p}/{q}; effectively rational"
            )));
        }
    }
    Ok(())
}

fn parse_ca_rule(
    wolfram: Option<u8>,
    states: Option<u8>,
    radius: Option<u8>,
    table: Option<&str>,
) -> Result<CaRule> {
    match (wolfram, states, radius, table) {
        (Some(w), None, None, None) => Ok(CaRule::from_wolfram(w)),
        (None, Some(q), Some(r), Some(t)) => CaRule::from_table(q, r, t),
        _ => Err(Error::Config(
            "ca spec needs either wolfram alone or states+radius+table together".into(),
        )),
    }
}

// ---------------------------------------------------------------------
// Coding and substitution operations
// ---------------------------------------------------------------------

/// Length-`len` coding of the rotation orbit of `x0` under angle `alpha`:
/// symbol `i` is 1 exactly when `frac(x0 + i*alpha)` lands in
/// `[1-alpha, 1)`.
pub fn sturmian_code(alpha: f64, x0: f64, len: usize) -> Result<String> {
    check_coding_angle(alpha)?;
    if len == 0 {
        return Err(Error::Input("coding length must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&x0) {
        return Err(Error::Input(format!("coding base point out of [0,1): {x0}")));
    }
    Ok((0..len)
        .map(|i| if rotation_code_symbol(alpha, x0, i as i64) == 1 { '1' } else { '0' })
        .collect())
}

/// Length-`len` prefix of the one-sided fixed point of the substitution
/// starting from `seed`.
pub fn substitution_fixed_point(
    rules: &BTreeMap<String, String>,
    seed: &str,
    len: usize,
) -> Result<String> {
    let table = parse_substitution(rules)?;
    let seed_sym = parse_seed(&table, seed)?;
    let word = fixed_point_prefix(&table, seed_sym, len)?;
    Ok(word.iter().map(|&s| table.symbols[s as usize]).collect())
}

fn fixed_point_prefix(table: &SubstTable, seed: u8, len: usize) -> Result<Vec<u8>> {
    if len == 0 {
        return Err(Error::Input("prefix length must be at least 1".into()));
    }
    let image = &table.images[seed as usize];
    if image[0] != seed {
        return Err(Error::Input(
            "substitution image of the seed does not start with the seed".into(),
        ));
    }
    let mut word = vec![seed];
    while word.len() < len {
        let next = table.apply(&word);
        if next.len() == word.len() {
            return Err(Error::Input(
                "substitution never expands the seed to the requested length".into(),
            ));
        }
        word = next;
    }
    word.truncate(len);
    Ok(word)
}

/// True when some power of the incidence matrix up to the square of the
/// alphabet size is entrywise positive.
pub fn substitution_primitive(rules: &BTreeMap<String, String>) -> Result<bool> {
    let table = parse_substitution(rules)?;
    let n = table.alphabet_len();
    // reach[i][j]: symbol j appears in the current-power image of i.
    let mut reach = vec![vec![false; n]; n];
    for (i, image) in table.images.iter().enumerate() {
        for &s in image {
            reach[i][s as usize] = true;
        }
    }
    let base = reach.clone();
    for _ in 1..=n * n {
        if reach.iter().all(|row| row.iter().all(|&b| b)) {
            return Ok(true);
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if reach[i][k] {
                    for (j, cell) in next[i].iter_mut().enumerate() {
                        *cell = *cell || base[k][j];
                    }
                }
            }
        }
        reach = next;
    }
    Ok(reach.iter().all(|row| row.iter().all(|&b| b)))
}

/// Extends the substitution to a two-sided sequence: finds a seam pair
/// `(a, b)` and a power `k` with `s^k(a)` ending in `a`, `s^k(b)`
/// starting with `b`, and the seam word `ab` admissible, then grows both
/// arms until they cover `need` symbols each.
fn two_sided_base(table: &SubstTable, seed: u8, need: i64) -> Result<SubstBase> {
    let need = need as usize;
    // Language sample for seam admissibility checks.
    let sample = fixed_point_prefix(table, seed, 1 << 16)?;
    for k in 1..=4usize {
        for a in 0..table.alphabet_len() as u8 {
            let wa = power_image(table, a, k);
            if *wa.last().unwrap() != a || wa.len() < 2 {
                continue;
            }
            for b in 0..table.alphabet_len() as u8 {
                let wb = power_image(table, b, k);
                if wb[0] != b || wb.len() < 2 {
                    continue;
                }
                if !sample.windows(2).any(|w| w == [a, b]) {
                    continue;
                }
                // Grow the right arm from b and the left arm from a.
                let right = grow_arm(table, b, k, need)?;
                let mut left = grow_arm_suffix(table, a, k, need)?;
                left.reverse();
                return Ok(SubstBase { left_rev: left, right });
            }
        }
    }
    Err(Error::Input(
        "substitution admits no two-sided seam with power up to 4".into(),
    ))
}

fn power_image(table: &SubstTable, sym: u8, k: usize) -> Vec<u8> {
    let mut w = vec![sym];
    for _ in 0..k {
        w = table.apply(&w);
    }
    w
}

fn grow_arm(table: &SubstTable, sym: u8, k: usize, need: usize) -> Result<Vec<u8>> {
    let mut w = vec![sym];
    for _ in 0..64 {
        if w.len() >= need {
            w.truncate(need);
            return Ok(w);
        }
        let next = power_image_of_word(table, &w, k);
        if next.len() == w.len() {
            return Err(Error::Input("substitution arm stops growing".into()));
        }
        w = next;
    }
    Err(Error::Budget("substitution arm needs too many expansion rounds".into()))
}

fn grow_arm_suffix(table: &SubstTable, sym: u8, k: usize, need: usize) -> Result<Vec<u8>> {
    let mut w = vec![sym];
    for _ in 0..64 {
        if w.len() >= need {
            let cut = w.len() - need;
            return Ok(w.split_off(cut));
        }
        let next = power_image_of_word(table, &w, k);
        if next.len() == w.len() {
            return Err(Error::Input("substitution arm stops growing".into()));
        }
        w = next;
    }
    Err(Error::Budget("substitution arm needs too many expansion rounds".into()))
}

fn power_image_of_word(table: &SubstTable, word: &[u8], k: usize) -> Vec<u8> {
    let mut w = word.to_vec();
    for _ in 0..k {
        w = table.apply(&w);
    }
    w
}

// ---------------------------------------------------------------------
// Language sampling and recurrence
// ---------------------------------------------------------------------

/// One long word from the system's language, for complexity and
/// recurrence analysis. `None` for systems without a symbolic language.
/// Deterministic in the seed.
pub fn language_sample(spec: &SystemSpec, len: usize, seed: u64) -> Result<Option<Vec<u8>>> {
    match spec {
        SystemSpec::Sturmian { alpha } => {
            check_coding_angle(*alpha)?;
            Ok(Some(
                (0..len).map(|i| rotation_code_symbol(*alpha, 0.0, i as i64)).collect(),
            ))
        }
        SystemSpec::Substitution { rules, seed: s } => {
            let table = parse_substitution(rules)?;
            let seed_sym = parse_seed(&table, s)?;
            Ok(Some(fixed_point_prefix(&table, seed_sym, len)?))
        }
        SystemSpec::Sft { .. } | SystemSpec::FullShift { .. } => {
            let budget = DetectorBudget::default();
            let sys = build_system(spec, &budget)?;
            let graph = match &sys.sampler {
                SamplerKind::GraphWalk { graph, .. } => graph.clone(),
                _ => unreachable!("subshift systems sample by graph walk"),
            };
            let mut rng = SplitMix64::new(seed);
            Ok(Some(graph.sample_walk(len, &mut rng)))
        }
        _ => Ok(None),
    }
}

/// The subshift graph backing the system's sampler, when there is one.
pub fn system_graph(sys: &MetricSystem) -> Option<Arc<SftGraph>> {
    match &sys.sampler {
        SamplerKind::GraphWalk { graph, .. } => Some(graph.clone()),
        _ => None,
    }
}

/// The automaton rule the system steps by, when there is one.
pub fn system_ca_rule(sys: &MetricSystem) -> Option<&CaRule> {
    match &sys.map {
        MapKind::Automaton { rule } => Some(rule),
        _ => None,
    }
}

/// Checks that every length-`n` factor of a length-`len` language sample
/// reoccurs with a bounded gap. Holds reports the largest observed gap;
/// a factor seen only once leaves the probe inconclusive.
pub fn uniform_recurrence_probe(
    spec: &SystemSpec,
    n: usize,
    len: usize,
    seed: u64,
) -> Result<Verdict> {
    if n == 0 || n > len / 10 {
        return Err(Error::Input(format!(
            "factor length {n} must be positive and at most a tenth of the sample {len}"
        )));
    }
    let word = language_sample(spec, len, seed)?.ok_or_else(|| {
        Error::Unsupported("recurrence probe needs a symbolic language".into())
    })?;
    let budget = DetectorBudget { horizon: len, samples: n, ..Default::default() };
    let mut last: HashMap<&[u8], usize> = HashMap::new();
    let mut gaps: HashMap<&[u8], (usize, usize)> = HashMap::new();
    for i in 0..=word.len() - n {
        let f = &word[i..i + n];
        if let Some(&prev) = last.get(f) {
            let e = gaps.entry(f).or_insert((0, 0));
            e.0 = e.0.max(i - prev);
            e.1 += 1;
        }
        last.insert(f, i);
    }
    let lonely = last.len() - gaps.len();
    if lonely > 0 {
        return Ok(Verdict::inconclusive(
            budget,
            format!(
                "{lonely} of {} length-{n} factors never reoccurred in this sample",
                last.len()
            ),
        ));
    }
    let bound = gaps.values().map(|&(g, _)| g).max().unwrap_or(0);
    let witness = Witness::new("recurrence-gap-bound")
        .with_text(format!("all {} length-{n} factors reoccur within gap {bound}", last.len()))
        .with_values(vec![bound as f64]);
    Ok(Verdict::holds(crate::verdict::Method::Empirical, witness, budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyncore::{self, Point};
    use crate::verdict::Outcome;

    fn morse_rules() -> BTreeMap<String, String> {
        BTreeMap::from([("0".into(), "01".into()), ("1".into(), "10".into())])
    }

    fn chacon_rules() -> BTreeMap<String, String> {
        BTreeMap::from([("0".into(), "0010".into()), ("1".into(), "1".into())])
    }

    const GOLDEN_CONJUGATE: f64 = 0.618_033_988_749_894_9;

    #[test]
    fn rotation_coding_prefix_and_base_cases() {
        assert_eq!(sturmian_code(GOLDEN_CONJUGATE, 0.0, 8).unwrap(), "01011010");
        assert_eq!(sturmian_code(0.300_000_001_234, 0.0, 1).unwrap(), "0");
    }

    #[test]
    fn rotation_coding_symbol_frequency_tracks_the_angle() {
        let word = sturmian_code(GOLDEN_CONJUGATE, 0.0, 100_000).unwrap();
        let ones = word.bytes().filter(|&b| b == b'1').count();
        let freq = ones as f64 / 100_000.0;
        assert!((freq - GOLDEN_CONJUGATE).abs() < 1e-2, "frequency {freq}");
    }

    #[test]
    fn near_rational_angles_are_rejected() {
        assert!(matches!(sturmian_code(0.25, 0.0, 8), Err(Error::Config(_))));
        assert!(matches!(sturmian_code(2.0 / 3.0, 0.0, 8), Err(Error::Config(_))));
        // The golden-ratio conjugate survives the small-denominator scan.
        assert!(sturmian_code(GOLDEN_CONJUGATE, 0.0, 8).is_ok());
    }

    #[test]
    fn substitution_prefixes_match_hand_expansion() {
        assert_eq!(substitution_fixed_point(&morse_rules(), "0", 8).unwrap(), "01101001");
        assert_eq!(substitution_fixed_point(&chacon_rules(), "0", 8).unwrap(), "00100010");
        assert_eq!(substitution_fixed_point(&morse_rules(), "0", 1).unwrap(), "0");
    }

    #[test]
    fn shorter_prefixes_are_prefixes_of_longer_ones() {
        let long = substitution_fixed_point(&morse_rules(), "0", 512).unwrap();
        for len in [1usize, 3, 17, 100, 511] {
            let short = substitution_fixed_point(&morse_rules(), "0", len).unwrap();
            assert!(long.starts_with(&short));
        }
    }

    #[test]
    fn seed_whose_image_starts_elsewhere_is_rejected() {
        let rules = BTreeMap::from([("0".into(), "10".into()), ("1".into(), "01".into())]);
        assert!(matches!(
            substitution_fixed_point(&rules, "0", 8),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn primitivity_separates_the_classic_examples() {
        assert!(substitution_primitive(&morse_rules()).unwrap());
        assert!(!substitution_primitive(&chacon_rules()).unwrap());
        let fib = BTreeMap::from([("0".into(), "01".into()), ("1".into(), "0".into())]);
        assert!(substitution_primitive(&fib).unwrap());
    }

    #[test]
    fn recurrence_probe_holds_for_substitution_samples() {
        let morse = SystemSpec::Substitution { rules: morse_rules(), seed: "0".into() };
        let v = uniform_recurrence_probe(&morse, 5, 100_000, 7).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        let chacon = SystemSpec::Substitution { rules: chacon_rules(), seed: "0".into() };
        let v = uniform_recurrence_probe(&chacon, 5, 100_000, 7).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn recurrence_probe_is_inconclusive_on_short_random_samples() {
        let spec = SystemSpec::FullShift { alphabet: vec!["0".into(), "1".into()] };
        let v = uniform_recurrence_probe(&spec, 12, 10_000, 7).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn config_errors_name_the_offending_field() {
        let budget = DetectorBudget::default();
        let err = build_system(&SystemSpec::Logistic { a: 5.0 }, &budget).unwrap_err();
        assert!(err.to_string().contains("a out of (0,4]"), "{err}");
        let err = build_system(
            &SystemSpec::Ca { wolfram: None, states: None, radius: None, table: None },
            &budget,
        )
        .unwrap_err();
        assert!(err.to_string().contains("wolfram"), "{err}");
        let err = build_system(
            &SystemSpec::Sft {
                alphabet: vec!["0".into(), "1".into()],
                forbidden: vec!["12".into()],
            },
            &budget,
        )
        .unwrap_err();
        assert!(err.to_string().contains("outside the alphabet"), "{err}");
    }

    #[test]
    fn spec_json_round_trips_in_config_form() {
        let json = r#"{"type":"sft","alphabet":["0","1"],"forbidden":["11"]}"#;
        let spec: SystemSpec = serde_json::from_str(json).unwrap();
        assert_eq!(
            spec,
            SystemSpec::Sft {
                alphabet: vec!["0".into(), "1".into()],
                forbidden: vec!["11".into()]
            }
        );
        let ca: SystemSpec = serde_json::from_str(r#"{"type":"ca","wolfram":170}"#).unwrap();
        assert_eq!(ca.default_label(), "ca-170");
        let back = serde_json::to_string(&ca).unwrap();
        assert_eq!(serde_json::from_str::<SystemSpec>(&back).unwrap(), ca);
    }

    #[test]
    fn two_sided_seam_agrees_with_the_one_sided_sample() {
        // Both classic substitutions seam at "00"; the window across the
        // seam must be a factor of the one-sided fixed point.
        for rules in [morse_rules(), chacon_rules()] {
            let table = parse_substitution(&rules).unwrap();
            let base = two_sided_base(&table, 0, 64).unwrap();
            let window: Vec<u8> = (-16..16).map(|t| base.at(t).unwrap()).collect();
            let sample = fixed_point_prefix(&table, 0, 1 << 16).unwrap();
            assert!(
                sample.windows(window.len()).any(|w| w == window.as_slice()),
                "seam window not in the language for {rules:?}"
            );
        }
    }

    #[test]
    fn morse_base_matches_hand_computed_arms() {
        let table = parse_substitution(&morse_rules()).unwrap();
        let base = two_sided_base(&table, 0, 16).unwrap();
        let right: Vec<u8> = (0..8).map(|t| base.at(t).unwrap()).collect();
        assert_eq!(right, vec![0, 1, 1, 0, 1, 0, 0, 1]);
        let left: Vec<u8> = (1..=8).map(|t| base.at(-t).unwrap()).collect();
        assert_eq!(left, vec![0, 1, 1, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn built_systems_sample_their_own_space() {
        let budget = DetectorBudget { horizon: 64, samples: 16, ..Default::default() };
        let specs = vec![
            SystemSpec::Tent,
            SystemSpec::Rotation { alpha: 0.3737 },
            SystemSpec::Sturmian { alpha: GOLDEN_CONJUGATE },
            SystemSpec::Substitution { rules: morse_rules(), seed: "0".into() },
            SystemSpec::Sft {
                alphabet: vec!["0".into(), "1".into()],
                forbidden: vec!["11".into()],
            },
            SystemSpec::FullShift { alphabet: vec!["0".into(), "1".into()] },
            SystemSpec::Odometer { base: 2 },
            SystemSpec::Ca { wolfram: Some(170), states: None, radius: None, table: None },
        ];
        let mut rng = SplitMix64::new(11);
        for spec in specs {
            let sys = build_system(&spec, &budget).unwrap();
            let x = dyncore::sample_point(&sys, &mut rng).unwrap();
            let y = dyncore::iterate(&sys, &x, 64).unwrap();
            let d = dyncore::distance(&sys, &x, &y).unwrap();
            assert!(d.is_finite() && d >= 0.0, "{}", sys.label);
        }
    }

    #[test]
    fn sft_walk_windows_avoid_forbidden_words() {
        let budget = DetectorBudget { horizon: 32, samples: 16, ..Default::default() };
        let spec = SystemSpec::Sft {
            alphabet: vec!["0".into(), "1".into()],
            forbidden: vec!["11".into()],
        };
        let sys = build_system(&spec, &budget).unwrap();
        let mut rng = SplitMix64::new(3);
        for _ in 0..20 {
            match dyncore::sample_point(&sys, &mut rng).unwrap() {
                Point::Seq(s) => {
                    let cells = &*s.cells;
                    assert!(!cells.windows(2).any(|w| w == [1, 1]));
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn finite_subshifts_are_marked_finite() {
        let budget = DetectorBudget { horizon: 32, samples: 16, ..Default::default() };
        let spec = SystemSpec::Sft {
            alphabet: vec!["0".into(), "1".into()],
            forbidden: vec!["00".into(), "11".into()],
        };
        let sys = build_system(&spec, &budget).unwrap();
        assert_eq!(sys.facts.finite_points, Some(2));
        assert_eq!(sys.facts.infinite, Some(false));
        // The one-way bridge space is infinite despite zero entropy.
        let spec = SystemSpec::Sft {
            alphabet: vec!["0".into(), "1".into()],
            forbidden: vec!["10".into()],
        };
        let sys = build_system(&spec, &budget).unwrap();
        assert_eq!(sys.facts.finite_points, None);
        assert_eq!(sys.facts.infinite, Some(true));
    }

    #[test]
    fn ca_build_attaches_blocking_and_classification_facts() {
        let budget = DetectorBudget { horizon: 32, samples: 16, ..Default::default() };
        let mk = |w| SystemSpec::Ca { wolfram: Some(w), states: None, radius: None, table: None };
        let identity = build_system(&mk(204), &budget).unwrap();
        assert!(identity.facts.isometry);
        assert_eq!(identity.facts.blocking.as_ref().unwrap().word.len(), 1);
        let and_rule = build_system(&mk(128), &budget).unwrap();
        assert_eq!(and_rule.facts.blocking.as_ref().unwrap().word, vec![0]);
        let shift = build_system(&mk(170), &budget).unwrap();
        assert!(shift.facts.blocking.is_none());
        assert!(!shift.facts.isometry);
    }

    #[test]
    fn density_shift_is_a_pseudo_metric_isometry() {
        let sys = density_shift_system(101).unwrap();
        assert!(sys.pseudo_metric && sys.facts.isometry);
        let mut rng = SplitMix64::new(5);
        let x = dyncore::sample_point(&sys, &mut rng).unwrap();
        let y = dyncore::sample_point(&sys, &mut rng).unwrap();
        let series = dyncore::distance_series(&sys, &x, &y, 30).unwrap();
        assert!(series.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-9));
    }
}
