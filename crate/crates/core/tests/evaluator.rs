mod common;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snapshot_ilp::eval::count;
use snapshot_ilp::{
    parse_examples, parse_program, Clause, Error, Evaluator, ExampleSet, GroundAtom, Hypothesis, Program,
};

use common::{naive_model, random_program_text};

/// Moves the last `k` rules of `p` into a hypothesis.
fn split_rules(p: &Program, k: usize) -> (Program, Hypothesis) {
    let cut = p.rules.len().saturating_sub(k);
    let bk = Program {
        facts: p.facts.clone(),
        rules: p.rules[..cut].to_vec(),
    };
    let h: Vec<Clause> = p.rules[cut..].to_vec();
    (bk, Hypothesis::new(h))
}

fn model_strings(ev: &Evaluator, h: &Hypothesis) -> BTreeSet<String> {
    ev.least_model(h).unwrap().atoms().iter().map(|a| a.to_string()).collect()
}

#[test]
fn semi_naive_matches_naive_on_random_programs() {
    for seed in 0..150u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = random_program_text(&mut rng, 8);
        let program = parse_program(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
        assert!(program.facts.len() <= 50 && program.rules.len() <= 6);
        let k = rng.gen_range(0..=program.rules.len());
        let (bk, h) = split_rules(&program, k);
        let ev = Evaluator::new(&bk).unwrap();
        let fast = model_strings(&ev, &h);
        let slow = naive_model(&bk, &h);
        assert_eq!(fast, slow, "seed {seed}\n{text}\nhypothesis {h}");
        // The memoized background model agrees with the empty hypothesis.
        assert_eq!(model_strings(&ev, &Hypothesis::empty()), naive_model(&bk, &Hypothesis::empty()));
    }
}

#[test]
fn adding_a_clause_never_shrinks_the_model() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let program = parse_program(&random_program_text(&mut rng, 6)).unwrap();
        if program.rules.is_empty() {
            continue;
        }
        let (bk, full) = split_rules(&program, program.rules.len());
        let ev = Evaluator::new(&bk).unwrap();
        let mut prev: BTreeSet<String> = model_strings(&ev, &Hypothesis::empty());
        for n in 1..=full.clauses().len() {
            let h = Hypothesis::new(full.clauses()[..n].to_vec());
            let m = model_strings(&ev, &h);
            assert!(prev.is_subset(&m), "seed {seed}: model shrank adding clause {n}");
            prev = m;
        }
    }
}

#[test]
fn entails_agrees_with_model_membership() {
    let consts = ["a", "b", "c", "d", "e", "f", "g"];
    for seed in 0..60u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + seed);
        let program = parse_program(&random_program_text(&mut rng, 5)).unwrap();
        let (bk, h) = split_rules(&program, 2);
        let ev = Evaluator::new(&bk).unwrap();
        let model = ev.least_model(&h).unwrap();
        let mut preds: Vec<_> = bk.predicates().into_iter().collect();
        preds.sort();
        if preds.is_empty() {
            continue;
        }
        for _ in 0..40 {
            let p = preds.choose(&mut rng).unwrap();
            let args: Vec<&str> = (0..p.arity).map(|_| *consts.choose(&mut rng).unwrap()).collect();
            let atom = GroundAtom::new(p.name.as_str(), &args);
            assert_eq!(ev.entails(&h, &atom).unwrap(), model.contains(&atom));
        }
    }
}

#[test]
fn confusion_counts_are_conserved() {
    for seed in 0..60u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + seed);
        let program = parse_program(&random_program_text(&mut rng, 4)).unwrap();
        let (bk, h) = split_rules(&program, 3);
        let ev = Evaluator::new(&bk).unwrap();
        let model = ev.least_model(&h).unwrap();
        let Some(p) = bk.predicates().into_iter().min() else { continue };
        let consts = ["a", "b", "c", "d"];
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for _ in 0..rng.gen_range(1..20) {
            let args: Vec<&str> = (0..p.arity).map(|_| *consts.choose(&mut rng).unwrap()).collect();
            let a = GroundAtom::new(p.name.as_str(), &args);
            if rng.gen_bool(0.5) {
                pos.push(a);
            } else {
                neg.push(a);
            }
        }
        let e = ExampleSet::new(pos, neg);
        let c = count(&model, &e);
        assert_eq!(c.tp + c.fn_, e.pos.len());
        assert_eq!(c.tn + c.fp, e.neg.len());
        assert_eq!(c, ev.confusion(&h, &e).unwrap());
    }
}

#[test]
fn atom_cap_aborts_only_the_offending_call() {
    let b = parse_program("n(a). n(b). n(c). n(d). n(e).").unwrap();
    let h = snapshot_ilp::parse_hypothesis("q(A,B,C):-n(A),n(B),n(C).").unwrap();
    let ev = Evaluator::with_cap(&b, 100).unwrap();
    assert_eq!(ev.least_model(&h).unwrap_err(), Error::ResourceLimit { limit: 100 });
    let small = snapshot_ilp::parse_hypothesis("q(A,A,A):-n(A).").unwrap();
    assert_eq!(ev.least_model(&small).unwrap().added().len(), 5);
    let e = parse_examples("pos(q(a,a,a)).").unwrap();
    assert_eq!(ev.confusion(&small, &e).unwrap().tp, 1);
}
