//! End-to-end checks of the bundled systems against closed-form oracles.
//!
//! Each test covers one numbered criterion and prints one pass/fail
//! line. Expected values come from independent counting arguments
//! (binary word counts, Fibonacci numbers, lap counts, rotation coding
//! combinatorics), never from rerunning the estimators under test.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use chaoslab::ca::{
    besicovitch_estimate, blocking_word_search, ca_periodic_points, CaBoundary, CaRule, CaWindow,
};
use chaoslab::detectors::{
    bowen_entropy, distality_test, equicontinuity_point_test, lap_entropy, li_yorke_scan,
    numeric_transitivity_test, sensitivity_test,
};
use chaoslab::dyncore::sample_point;
use chaoslab::profile::PropertyId;
use chaoslab::report::{self, RunConfig, SystemEntry};
use chaoslab::rng::SplitMix64;
use chaoslab::symlang::{
    complexity_entropy, cover_entropy, factor_complexity, periodic_factor_scan, ComplexitySource,
    CoverElement, Cylinder, CylinderCover, SftGraph,
};
use chaoslab::systems::{
    build_system, language_sample, substitution_primitive, uniform_recurrence_probe, SystemSpec,
};
use chaoslab::verdict::{Certificate, DetectorBudget, Method, Outcome};

const LN_2: f64 = std::f64::consts::LN_2;
const GOLDEN_ALPHA: f64 = 0.618_033_988_749_894_9;

fn binary_alphabet() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

fn symbol_partition(alphabet: u8) -> CylinderCover {
    CylinderCover {
        elements: (0..alphabet)
            .map(|s| CoverElement { cylinders: vec![Cylinder { word: vec![s], anchor: 0 }] })
            .collect(),
    }
}

fn doubling_rules() -> BTreeMap<String, String> {
    let mut rules = BTreeMap::new();
    rules.insert("0".into(), "01".into());
    rules.insert("1".into(), "10".into());
    rules
}

fn chacon_rules() -> BTreeMap<String, String> {
    let mut rules = BTreeMap::new();
    rules.insert("0".into(), "0010".into());
    rules.insert("1".into(), "1".into());
    rules
}

/// Runs the full report pipeline on a single system with the default
/// budget and returns its report entry.
fn single_report(label: &str, spec: SystemSpec) -> report::SystemReport {
    let config = RunConfig {
        entries: vec![SystemEntry { label: label.into(), spec, budget: None }],
        budget: DetectorBudget::default(),
        properties: None,
    };
    let mut rep = report::run(&config);
    rep.systems.remove(0)
}

#[test]
fn criterion_01_full_shift_entropy_and_scrambling() {
    let start = Instant::now();
    let graph = SftGraph::full_shift(2).unwrap();

    // p(n) = 2^n makes ln p(12)/12 land on ln 2 without rounding.
    let table = factor_complexity(ComplexitySource::Graph(&graph), 12).unwrap();
    assert!(table.exact);
    let est = complexity_entropy(&table).unwrap();
    assert_eq!(est.rate, LN_2);

    let h = cover_entropy(&graph, &symbol_partition(2), 10).unwrap();
    assert!((h - LN_2).abs() <= 1e-9, "cover entropy {h} is off ln 2");

    assert!(graph.transitive());
    assert!(graph.dense_periodic());
    assert!(graph.product_transitive(2).unwrap());
    assert!(graph.product_transitive(3).unwrap());

    let budget = DetectorBudget { samples: 10_000, horizon: 512, ..DetectorBudget::default() };
    let spec = SystemSpec::FullShift { alphabet: binary_alphabet() };
    let sys = build_system(&spec, &budget).unwrap();
    let scan = li_yorke_scan(&sys, &budget).unwrap();
    assert_eq!(scan.verdict.outcome, Outcome::Holds);
    assert!(scan.scrambled >= 100, "only {} scrambled pairs", scan.scrambled);

    assert!(start.elapsed() < Duration::from_secs(30));
}

#[test]
fn criterion_02_golden_mean_entropy_and_inferred_sensitivity() {
    let graph = SftGraph::build(2, &[vec![1, 1]]).unwrap();
    let target = ((1.0 + 5f64.sqrt()) / 2.0).ln();

    let h = cover_entropy(&graph, &symbol_partition(2), 12).unwrap();
    assert!((h - target).abs() <= 0.05, "cover entropy {h} vs {target}");

    let table = factor_complexity(ComplexitySource::Graph(&graph), 12).unwrap();
    let est = complexity_entropy(&table).unwrap();
    assert!((est.rate - target).abs() <= 0.05, "rate {} vs {target}", est.rate);
    assert!((est.slope - target).abs() <= 0.05, "slope {} vs {target}", est.slope);

    assert!(graph.transitive());
    assert!(graph.dense_periodic());

    // Route one: the detector alone, empirical.
    let spec = SystemSpec::Sft { alphabet: binary_alphabet(), forbidden: vec!["11".into()] };
    let budget = DetectorBudget::default();
    let sys = build_system(&spec, &budget).unwrap();
    let direct = sensitivity_test(&sys, &budget).unwrap();
    assert_eq!(direct.outcome, Outcome::Holds);
    assert_eq!(direct.method, Method::Empirical);

    // Route two: the profile must upgrade the same property through the
    // transitive-plus-dense-periodic implication while keeping the
    // measured witness.
    let entry = single_report("golden", spec);
    let profile = entry.profile.expect("profile");
    let v = &profile.verdicts[&PropertyId::Sensitivity];
    assert_eq!(v.outcome, Outcome::Holds);
    assert_eq!(v.method, Method::InferredExact);
    assert!(v.note.contains("rule a"), "note: {}", v.note);
    assert!(v.witnesses.iter().any(|w| w.label == "sensitivity-constant"));
}

#[test]
fn criterion_03_sturmian_sensitive_without_scrambling() {
    let start = Instant::now();
    let spec = SystemSpec::Sturmian { alpha: GOLDEN_ALPHA };
    let budget = DetectorBudget { samples: 10_000, horizon: 4096, ..DetectorBudget::default() };
    let sys = build_system(&spec, &budget).unwrap();

    let v = sensitivity_test(&sys, &budget).unwrap();
    assert_eq!(v.outcome, Outcome::Holds);
    let eta = v.witnesses[0].values[0];
    assert!(eta >= 0.5, "separation constant {eta} below 1/2");

    let scan = li_yorke_scan(&sys, &budget).unwrap();
    assert_eq!(scan.scrambled, 0, "found scrambled pairs: {}", scan.scrambled);

    let sample = language_sample(&spec, 1_000_000, budget.seed).unwrap().expect("sample");
    let short = factor_complexity(ComplexitySource::Word(&sample), 30).unwrap();
    for n in 1..=30 {
        assert_eq!(short.counts[n], (n + 1) as u128, "p({n})");
    }
    let long = factor_complexity(ComplexitySource::Word(&sample), 120).unwrap();
    let est = complexity_entropy(&long).unwrap();
    assert!(est.slope <= 0.02, "entropy slope {}", est.slope);

    assert!(start.elapsed() < Duration::from_secs(60));
}

#[test]
fn criterion_04_doubling_substitution_minimal_and_sensitive() {
    let rules = doubling_rules();
    assert!(substitution_primitive(&rules).unwrap());

    let spec = SystemSpec::Substitution { rules, seed: "0".into() };
    let budget = DetectorBudget::default();
    let sys = build_system(&spec, &budget).unwrap();
    let v = sensitivity_test(&sys, &budget).unwrap();
    assert_eq!(v.outcome, Outcome::Holds);

    let sample = language_sample(&spec, 1_000_000, budget.seed).unwrap().expect("sample");
    let table = factor_complexity(ComplexitySource::Word(&sample), 120).unwrap();
    let est = complexity_entropy(&table).unwrap();
    assert!(est.slope <= 0.05, "entropy slope {}", est.slope);
}

#[test]
fn criterion_05_chacon_recurrence_without_periodic_factors() {
    let spec = SystemSpec::Substitution { rules: chacon_rules(), seed: "0".into() };
    let budget = DetectorBudget::default();

    let rec = uniform_recurrence_probe(&spec, 5, 100_000, budget.seed).unwrap();
    assert_eq!(rec.outcome, Outcome::Holds);

    let sample = language_sample(&spec, 100_000, budget.seed).unwrap().expect("sample");
    let hits = periodic_factor_scan(&sample, 12, 16).unwrap();
    assert!(hits.is_empty(), "cyclic factors detected: {hits:?}");

    let sys = build_system(&spec, &budget).unwrap();
    let scan = li_yorke_scan(&sys, &budget).unwrap();
    assert_eq!(scan.verdict.outcome, Outcome::Holds);
    assert!(scan.scrambled >= 3, "only {} scrambled pairs", scan.scrambled);

    let long = language_sample(&spec, 1_000_000, budget.seed).unwrap().expect("sample");
    let table = factor_complexity(ComplexitySource::Word(&long), 120).unwrap();
    let est = complexity_entropy(&table).unwrap();
    assert!(est.slope <= 0.05, "entropy slope {}", est.slope);
}

#[test]
fn criterion_06_tent_map_entropy_and_transitivity() {
    let budget = DetectorBudget::default();
    let sys = build_system(&SystemSpec::Tent, &budget).unwrap();

    // 2^10 monotone laps, so ln(laps)/10 is ln 2 on the nose.
    let lap = lap_entropy(&sys, 10).unwrap();
    assert_eq!(lap.laps, 1024);
    assert_eq!(lap.rate, LN_2);

    let bowen = bowen_entropy(&sys, 14, 2f64.powi(-8)).unwrap();
    assert!((bowen.slope - LN_2).abs() <= 0.1, "separated-set slope {}", bowen.slope);

    let sens = sensitivity_test(&sys, &budget).unwrap();
    assert_eq!(sens.outcome, Outcome::Holds);
    let trans = numeric_transitivity_test(&sys, 32, &budget).unwrap();
    assert_eq!(trans.outcome, Outcome::Holds);

    let entry = single_report("tent", SystemSpec::Tent);
    let profile = entry.profile.expect("profile");
    assert_eq!(profile.placements.partial, "positive entropy");
}

#[test]
fn criterion_07_isometries_are_equicontinuous() {
    let budget = DetectorBudget::default();
    let cases =
        [SystemSpec::Rotation { alpha: GOLDEN_ALPHA }, SystemSpec::Odometer { base: 2 }];

    for spec in &cases {
        let sys = build_system(spec, &budget).unwrap();

        let sens = sensitivity_test(&sys, &budget).unwrap();
        assert_eq!(sens.outcome, Outcome::Fails);
        assert_eq!(sens.certificate, Some(Certificate::Isometry));

        let mut rng = SplitMix64::new(budget.seed);
        for _ in 0..20 {
            let x = sample_point(&sys, &mut rng).unwrap();
            let v = equicontinuity_point_test(&sys, &x, &budget).unwrap();
            assert_eq!(v.outcome, Outcome::Holds);
        }

        let distal = distality_test(&sys, &budget).unwrap();
        assert_eq!(distal.outcome, Outcome::Holds);
    }

    let rot = build_system(&cases[0], &budget).unwrap();
    let bowen = bowen_entropy(&rot, 14, 2f64.powi(-8)).unwrap();
    assert!(bowen.slope.abs() <= 0.01, "rotation entropy slope {}", bowen.slope);

    for (label, spec) in [("rotation", cases[0].clone()), ("odometer", cases[1].clone())] {
        let entry = single_report(label, spec);
        let profile = entry.profile.expect("profile");
        let eze = &profile.verdicts[&PropertyId::EntropyZeroEvidence];
        assert_eq!(eze.outcome, Outcome::Holds);
        assert!(eze.witnesses[0].values[0] <= 0.01);
        assert_eq!(profile.placements.deterministic, "equicontinuity", "{label}");
    }
}

#[test]
fn criterion_08_automata_blocking_words_and_shift_density() {
    let start = Instant::now();

    let identity = CaRule::from_wolfram(204);
    let w204 = blocking_word_search(&identity, 12, 256).unwrap().expect("identity blocks");
    assert_eq!(w204.word.len(), 1);

    let sink = CaRule::from_wolfram(128);
    let w128 = blocking_word_search(&sink, 12, 256).unwrap().expect("absorbing state blocks");
    assert_eq!(w128.word, vec![0]);

    let shift = CaRule::from_wolfram(170);
    assert!(blocking_word_search(&shift, 12, 256).unwrap().is_none());

    let budget = DetectorBudget { horizon: 256, samples: 128, ..DetectorBudget::default() };
    let spec = SystemSpec::Ca { wolfram: Some(170), states: None, radius: None, table: None };
    let sys = build_system(&spec, &budget).unwrap();
    let sens = sensitivity_test(&sys, &budget).unwrap();
    assert_eq!(sens.outcome, Outcome::Holds);
    assert_eq!(sens.witnesses[0].values[0], 1.0);

    // The shift permutes width-4 periodic configurations, so every one
    // of the 16 is temporally periodic.
    let periodic = ca_periodic_points(&shift, 4, 16).unwrap();
    assert_eq!(periodic.len(), 16);

    let mut rng = SplitMix64::new(budget.seed ^ 0xBE5);
    let span = 512i64;
    let bound = 2.0 / (2.0 * span as f64 + 1.0) + 1e-12;
    for _ in 0..100 {
        let len = 4097usize;
        let a: Vec<u8> = (0..len).map(|_| (rng.next_u64() & 1) as u8).collect();
        let b: Vec<u8> = (0..len).map(|_| (rng.next_u64() & 1) as u8).collect();
        let x = CaWindow::from_cells(a, CaBoundary::Periodic).unwrap();
        let y = CaWindow::from_cells(b, CaBoundary::Periodic).unwrap();
        let before = besicovitch_estimate(&x, &y, span).unwrap();
        let after =
            besicovitch_estimate(&x.rotated(1).unwrap(), &y.rotated(1).unwrap(), span).unwrap();
        assert!(
            (after - before).abs() <= bound,
            "density moved {} under the shift",
            (after - before).abs()
        );
    }

    assert!(start.elapsed() < Duration::from_secs(60));
}

#[test]
fn criterion_09_zoo_profiles_are_consistent() {
    let start = Instant::now();
    let rep = report::run(&report::zoo_config());
    assert_eq!(rep.violation_total, 0);
    for sys in &rep.systems {
        assert!(sys.error.is_none(), "{} failed to build", sys.label);
        let profile = sys.profile.as_ref().expect("profile");
        assert!(profile.violations.is_empty(), "{}: {:?}", sys.label, profile.violations);
    }
    assert!(start.elapsed() < Duration::from_secs(600));
}

#[test]
fn criterion_10_zoo_runs_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_chaoslab");
    let run = || {
        let out = Command::new(bin).arg("zoo").output().expect("zoo run");
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let first = run();
    let second = run();
    assert!(!first.is_empty());
    assert_eq!(first, second, "reports differ between runs");
}
