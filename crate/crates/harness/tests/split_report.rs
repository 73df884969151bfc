use std::collections::BTreeSet;

use proptest::prelude::*;
use snapshot_ilp::{CostFunctionId, ExampleSet, GroundAtom};
use snapshot_ilp_harness::report::{parse_csv, parse_json, render, rows, ReportFormat};
use snapshot_ilp_harness::split::{part_sizes, split_examples};
use snapshot_ilp_harness::task::{PhaseWork, Timings};
use snapshot_ilp_harness::TaskResult;

fn examples(pos: usize, neg: usize) -> ExampleSet {
    let mk = |i: usize| GroundAtom::new("t", &[&format!("c{i}")]);
    ExampleSet::new((0..pos).map(mk).collect(), (pos..pos + neg).map(mk).collect())
}

fn names(atoms: &[GroundAtom]) -> Vec<String> {
    atoms.iter().map(|a| a.to_string()).collect()
}

proptest! {
    #[test]
    fn split_partitions_each_polarity(pos in 10usize..300, neg in 10usize..300, seed in any::<u64>()) {
        let e = examples(pos, neg);
        let s = split_examples(&e, seed).unwrap();
        for (all, parts) in [
            (&e.pos, [&s.train.pos, &s.valid.pos, &s.test.pos]),
            (&e.neg, [&s.train.neg, &s.valid.neg, &s.test.neg]),
        ] {
            let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
            prop_assert_eq!(sizes, part_sizes(all.len()).to_vec());
            let mut union: Vec<String> = parts.iter().flat_map(|p| names(p)).collect();
            let n = union.len();
            union.sort();
            union.dedup();
            prop_assert_eq!(union.len(), n);
            prop_assert_eq!(union.into_iter().collect::<BTreeSet<_>>(), names(all).into_iter().collect());
        }
        prop_assert_eq!(split_examples(&e, seed).unwrap(), s);
    }

    #[test]
    fn part_sizes_follow_the_ratio(n in 0usize..10_000) {
        let [a, b, c] = part_sizes(n);
        prop_assert_eq!(a + b + c, n);
        for (got, r) in [(a, 7.0), (b, 2.0), (c, 1.0)] {
            prop_assert!((got as f64 - n as f64 * r / 10.0).abs() < 1.0);
        }
    }
}

fn result(task: &str, cost_fn: CostFunctionId, seed: u64, base: f64, snap: f64) -> TaskResult {
    TaskResult {
        task: task.into(),
        cost_fn,
        seed,
        acc_base: base,
        acc_snap: snap,
        acc_bag: seed.is_multiple_of(2).then_some(0.5),
        acc_test_opt: base.max(snap),
        acc_test_worst: base.min(snap) / 2.0,
        overfit_gap: base.max(snap) - base,
        snap_improvement: snap - base,
        overhead_pct: 0.123_456_789,
        baseline: "t(A):-f(A).".into(),
        pool_size: 1,
        candidates: 1,
        exhausted: true,
        work: PhaseWork::default(),
        timings: Timings::default(),
    }
}

#[test]
fn csv_and_json_carry_the_same_rows() {
    let results = vec![
        result("b", CostFunctionId::Mdl, 1, 0.7, 0.75),
        result("a", CostFunctionId::Lexfnsize, 0, 1.0 / 3.0, 0.5),
        result("a", CostFunctionId::ErrorSize, 2, 0.9, 0.9),
        result("a", CostFunctionId::ErrorSize, 1, 0.9, 0.85),
    ];
    let csv = render(&results, ReportFormat::Csv).unwrap();
    let json = render(&results, ReportFormat::Json).unwrap();
    let from_csv = parse_csv(&csv).unwrap();
    assert_eq!(from_csv, parse_json(&json).unwrap());
    assert_eq!(from_csv, rows(&results));
    let order: Vec<(String, String, u64)> =
        from_csv.iter().map(|r| (r.task.clone(), r.cost_fn.to_string(), r.seed)).collect();
    assert_eq!(
        order,
        [
            ("a".into(), "errorsize".into(), 1),
            ("a".into(), "errorsize".into(), 2),
            ("a".into(), "lexfnsize".into(), 0),
            ("b".into(), "mdl".into(), 1),
        ]
    );
    for r in &from_csv {
        assert!((r.snap_improvement - (r.acc_snap - r.acc_base)).abs() <= 1e-6);
        assert!(r.acc_test_worst <= r.acc_test_opt);
    }
    assert!(csv.contains(",0.333333,0.500000,0.500000,"));
    assert!(csv.contains(",0.123457,"));
    // No "-0.000000" for a zero difference.
    assert!(!csv.contains("-0.000000"));
    assert_eq!(render(&results, ReportFormat::Csv).unwrap(), csv);
}
