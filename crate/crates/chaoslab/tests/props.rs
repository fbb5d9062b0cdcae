//! Randomized laws over the bundled systems: orbit algebra, metric
//! axioms, isometry behavior, automaton shift equivariance, estimator
//! route agreement, and closure algebra.

use std::sync::OnceLock;

use proptest::prelude::*;

use chaoslab::ca::{besicovitch_estimate, ca_step, CaBoundary, CaRule, CaWindow};
use chaoslab::detectors::{li_yorke_scan, scrambled_pair_test, sensitivity_test};
use chaoslab::dyncore::{
    distance, distance_series, iterate, sample_distinct_pair, sample_point, sample_point_seeded,
    step, MetricSystem,
};
use chaoslab::profile::{
    consistency_check, implication_closure, scale_placement, ClosureContext, PropertyId,
    VerdictMap,
};
use chaoslab::report;
use chaoslab::rng::SplitMix64;
use chaoslab::symlang::{factor_complexity, ComplexitySource, SftGraph};
use chaoslab::systems::{build_system, density_shift_system};
use chaoslab::verdict::{Certificate, DetectorBudget, Method, Outcome, Verdict, Witness};

/// Every bundled system with its resolved budget, built once.
fn zoo() -> &'static [(String, MetricSystem, DetectorBudget)] {
    static CELL: OnceLock<Vec<(String, MetricSystem, DetectorBudget)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let config = report::zoo_config();
        config
            .entries
            .iter()
            .map(|e| {
                let budget = e.budget.clone().unwrap_or_else(|| config.budget.clone());
                let sys = build_system(&e.spec, &budget).unwrap();
                (e.label.clone(), sys, budget)
            })
            .collect()
    })
}

fn zoo_system(label: &str) -> &'static MetricSystem {
    &zoo().iter().find(|(l, _, _)| l == label).unwrap().1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn iterating_in_two_stages_matches_one_stage(
        a in 0usize..=32,
        b in 0usize..=32,
        seed in any::<u64>(),
    ) {
        for (label, sys, _) in zoo() {
            let x = sample_point_seeded(sys, seed).unwrap();
            let direct = iterate(sys, &x, a + b).unwrap();
            let staged = iterate(sys, &iterate(sys, &x, a).unwrap(), b).unwrap();
            let gap = distance(sys, &direct, &staged).unwrap();
            prop_assert_eq!(gap, 0.0, "{}: split {}+{} drifted", label, a, b);
        }
    }
}

#[test]
fn metric_axioms_hold_on_sampled_triples() {
    let density = density_shift_system(257).unwrap();
    let mut systems: Vec<(&str, &MetricSystem)> =
        zoo().iter().map(|(l, s, _)| (l.as_str(), s)).collect();
    systems.push(("density-shift", &density));

    for (stream, (label, sys)) in systems.into_iter().enumerate() {
        let mut rng = SplitMix64::new(0xA71_0115).fork(stream as u64);
        for _ in 0..1000 {
            let x = sample_point(sys, &mut rng).unwrap();
            let y = sample_point(sys, &mut rng).unwrap();
            let z = sample_point(sys, &mut rng).unwrap();
            assert_eq!(distance(sys, &x, &x).unwrap(), 0.0, "{label}: d(x,x)");
            let dxy = distance(sys, &x, &y).unwrap();
            let dyx = distance(sys, &y, &x).unwrap();
            assert_eq!(dxy, dyx, "{label}: symmetry");
            assert!(dxy >= 0.0, "{label}: nonnegative");
            let dxz = distance(sys, &x, &z).unwrap();
            let dyz = distance(sys, &y, &z).unwrap();
            assert!(dxz <= dxy + dyz + 1e-12, "{label}: triangle {dxz} > {dxy} + {dyz}");
        }
    }
}

#[test]
fn isometries_keep_orbit_distances_constant() {
    let density = density_shift_system(1025).unwrap();
    let cases: Vec<(&str, &MetricSystem)> = vec![
        ("rotation", zoo_system("rotation")),
        ("odometer-2", zoo_system("odometer-2")),
        ("density-shift", &density),
    ];
    for (label, sys) in cases {
        let mut rng = SplitMix64::new(0x150_0EE7);
        for _ in 0..50 {
            let Some((x, y)) = sample_distinct_pair(sys, &mut rng).unwrap() else {
                continue;
            };
            // The step-by-step route must stay flat on its own; the
            // series helper is then allowed to shortcut.
            let mut manual = Vec::with_capacity(129);
            let mut cx = x.clone();
            let mut cy = y.clone();
            manual.push(distance(sys, &cx, &cy).unwrap());
            for _ in 0..128 {
                cx = step(sys, &cx).unwrap();
                cy = step(sys, &cy).unwrap();
                manual.push(distance(sys, &cx, &cy).unwrap());
            }
            let lo = manual.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = manual.iter().cloned().fold(0.0, f64::max);
            assert!(hi - lo <= 1e-9, "{label}: orbit distance moved by {}", hi - lo);

            let series = distance_series(sys, &x, &y, 128).unwrap();
            for (k, (s, m)) in series.iter().zip(&manual).enumerate() {
                assert!((s - m).abs() <= 1e-9, "{label}: series diverges at {k}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn automaton_step_commutes_with_rotation(
        rule in any::<u8>(),
        spec in (8usize..=64).prop_flat_map(|h| {
            (proptest::collection::vec(0u8..=1, 2 * h + 1), -256i64..=256)
        }),
    ) {
        let (cells, k) = spec;
        let rule = CaRule::from_wolfram(rule);
        let w = CaWindow::from_cells(cells, CaBoundary::Periodic).unwrap();
        let rotated_first = ca_step(&rule, &w.rotated(k).unwrap()).unwrap();
        let stepped_first = ca_step(&rule, &w).unwrap().rotated(k).unwrap();
        prop_assert_eq!(rotated_first.cells(), stepped_first.cells());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn disagreement_density_is_stable_under_rotation(
        pair in (1024usize..=2048).prop_flat_map(|h| {
            let len = 2 * h + 1;
            (
                proptest::collection::vec(0u8..=1, len),
                proptest::collection::vec(0u8..=1, len),
            )
        }),
        k in 1i64..=8,
    ) {
        let (a, b) = pair;
        let x = CaWindow::from_cells(a, CaBoundary::Periodic).unwrap();
        let y = CaWindow::from_cells(b, CaBoundary::Periodic).unwrap();
        let n = 512i64;
        let before = besicovitch_estimate(&x, &y, n).unwrap();
        let after =
            besicovitch_estimate(&x.rotated(k).unwrap(), &y.rotated(k).unwrap(), n).unwrap();
        let bound = 2.0 * k as f64 / (2.0 * n as f64 + 1.0) + 1e-12;
        prop_assert!((after - before).abs() <= bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shift_series_shortcut_matches_stepwise_distances(
        which in 0usize..4,
        seed in any::<u64>(),
        n in 1usize..=48,
    ) {
        let label = ["full-shift", "sft-golden", "sturmian", "morse"][which];
        let sys = zoo_system(label);
        let x = sample_point_seeded(sys, seed).unwrap();
        let y = sample_point_seeded(sys, seed ^ 0xABCD_1234).unwrap();
        let series = distance_series(sys, &x, &y, n).unwrap();
        let mut cx = x.clone();
        let mut cy = y.clone();
        for (k, s) in series.iter().enumerate() {
            if k > 0 {
                cx = step(sys, &cx).unwrap();
                cy = step(sys, &cy).unwrap();
            }
            let direct = distance(sys, &cx, &cy).unwrap();
            prop_assert_eq!(*s, direct, "{} at step {}", label, k);
        }
    }
}

const ALL_PROPERTIES: [PropertyId; 17] = [
    PropertyId::LiYorkeEvidence,
    PropertyId::ScrambledPairExists,
    PropertyId::Sensitivity,
    PropertyId::EquicontinuityPoints,
    PropertyId::Equicontinuous,
    PropertyId::Distal,
    PropertyId::Transitive,
    PropertyId::Minimal,
    PropertyId::DensePeriodic,
    PropertyId::AuslanderYorke,
    PropertyId::Devaney,
    PropertyId::WeakMixingProxy,
    PropertyId::PartialWeakMixingProbe,
    PropertyId::EntropyPositive,
    PropertyId::EntropyZeroEvidence,
    PropertyId::UPECandidate,
    PropertyId::PeriodicPointExists,
];

fn arbitrary_verdicts() -> impl Strategy<Value = VerdictMap> {
    proptest::collection::vec(proptest::option::of(0u8..4), ALL_PROPERTIES.len()).prop_map(
        |choices| {
            let budget = DetectorBudget::default();
            let mut map = VerdictMap::new();
            for (i, choice) in choices.into_iter().enumerate() {
                let Some(choice) = choice else { continue };
                let v = match choice {
                    0 => Verdict::holds(Method::Empirical, Witness::new("probe"), budget.clone()),
                    1 => Verdict::holds(Method::Exact, Witness::new("count"), budget.clone()),
                    2 => Verdict::fails(
                        Method::Exact,
                        Certificate::ExactReachability { detail: "generated case".into() },
                        budget.clone(),
                    ),
                    _ => Verdict::inconclusive(budget.clone(), "generated case"),
                };
                map.insert(ALL_PROPERTIES[i], v);
            }
            map
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_is_idempotent_and_keeps_settled_outcomes(
        direct in arbitrary_verdicts(),
        which in 0usize..4,
    ) {
        let label = ["tent", "sft-golden", "ca-110", "sturmian"][which];
        let (_, sys, budget) = zoo().iter().find(|(l, _, _)| l == label).unwrap();
        let ctx = ClosureContext::for_system(sys, budget);

        let closed = implication_closure(&direct, &ctx);
        let reclosed = implication_closure(&closed, &ctx);
        prop_assert_eq!(&closed, &reclosed, "{}: closure not a fixed point", label);

        for (prop, v) in &direct {
            if v.outcome != Outcome::Inconclusive {
                prop_assert_eq!(
                    closed[prop].outcome, v.outcome,
                    "{}: settled {:?} was rewritten", label, prop
                );
            }
        }
        // Rules only ever add settled conclusions.
        for (prop, v) in &closed {
            if !direct.contains_key(prop) {
                prop_assert_ne!(v.outcome, Outcome::Inconclusive, "{}: {:?}", label, prop);
            }
        }

        // The audit and the placement must accept any closed map.
        let _ = consistency_check(&closed, &ctx);
        let _ = scale_placement(&closed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn longer_horizons_never_flip_a_scrambled_verdict_to_fails(seed in any::<u64>()) {
        let sys = zoo_system("logistic-4");
        let x = sample_point_seeded(sys, seed).unwrap();
        let y = sample_point_seeded(sys, seed ^ 0x0DD_C0DE).unwrap();
        prop_assume!(distance(sys, &x, &y).unwrap() > 0.0);
        for horizon in [512usize, 1024, 2048] {
            let budget = DetectorBudget { horizon, ..DetectorBudget::default() };
            let v = scrambled_pair_test(sys, &x, &y, &budget).unwrap();
            prop_assert_ne!(v.outcome, Outcome::Fails);
        }
    }
}

#[test]
fn detectors_repeat_bit_for_bit() {
    for label in ["sft-golden", "ca-90", "sturmian"] {
        // Windows are sized for the budget a system was built with, so
        // the repeat runs reuse that budget with fewer samples.
        let (_, sys, built) = zoo().iter().find(|(l, _, _)| l == label).unwrap();
        let budget = DetectorBudget { samples: built.samples.min(512), ..built.clone() };
        let scan_a = li_yorke_scan(sys, &budget).unwrap();
        let scan_b = li_yorke_scan(sys, &budget).unwrap();
        assert_eq!(scan_a, scan_b, "{label}: scan drifted");
        let sens_a = sensitivity_test(sys, &budget).unwrap();
        let sens_b = sensitivity_test(sys, &budget).unwrap();
        assert_eq!(sens_a, sens_b, "{label}: sensitivity drifted");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_factor_counts_obey_growth_laws(
        raw in (2u8..=3).prop_flat_map(|a| {
            (
                Just(a),
                proptest::collection::vec(
                    proptest::collection::vec(0..a, 1..=3),
                    0..=2,
                ),
            )
        }),
    ) {
        let (alphabet, forbidden) = raw;
        let Ok(graph) = SftGraph::build(alphabet, &forbidden) else {
            // Everything was forbidden; nothing to measure.
            return Ok(());
        };
        let table = factor_complexity(ComplexitySource::Graph(&graph), 10).unwrap();
        prop_assert!(table.exact);
        prop_assert_eq!(table.counts[0], 1);
        prop_assert!(table.counts[1] <= alphabet as u128);
        for n in 1..10 {
            prop_assert!(table.counts[n + 1] >= table.counts[n], "shrank at {}", n);
            prop_assert!(
                table.counts[n + 1] <= alphabet as u128 * table.counts[n],
                "grew too fast at {}",
                n
            );
        }
    }

    #[test]
    fn word_factor_counts_obey_growth_laws(
        word in proptest::collection::vec(0u8..=1, 64..=512),
    ) {
        let table = factor_complexity(ComplexitySource::Word(&word), 12).unwrap();
        prop_assert_eq!(table.counts[0], 1);
        prop_assert!(table.counts[1] <= 2);
        for n in 1..12 {
            prop_assert!(table.counts[n + 1] <= 2 * table.counts[n]);
        }
    }
}
