//! Shared test helpers: a naive fixpoint evaluator and a random Datalog
//! program generator.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use snapshot_ilp::symbol::Sym;
use snapshot_ilp::{Atom, Clause, GroundAtom, Hypothesis, Program, Term};

/// Naive immediate-consequence iteration to a fixpoint: every round applies
/// every rule to the whole current set.
pub fn naive_model(program: &Program, h: &Hypothesis) -> BTreeSet<String> {
    let rules: Vec<&Clause> = program.rules.iter().chain(h.clauses()).collect();
    let mut model: BTreeSet<GroundAtom> = program.facts.iter().cloned().collect();
    loop {
        let facts: Vec<GroundAtom> = model.iter().cloned().collect();
        let mut fresh = Vec::new();
        for r in &rules {
            let mut theta = HashMap::new();
            solve(&r.body, &facts, &mut theta, &mut |theta| {
                let args: Vec<&str> = r
                    .head
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Const(c) => c.as_str(),
                        Term::Var(v) => theta[v].as_str(),
                    })
                    .collect();
                fresh.push(GroundAtom::new(r.head.pred.as_str(), &args));
            });
        }
        let before = model.len();
        model.extend(fresh);
        if model.len() == before {
            return model.iter().map(|a| a.to_string()).collect();
        }
    }
}

fn solve(
    body: &[Atom],
    facts: &[GroundAtom],
    theta: &mut HashMap<Sym, Sym>,
    out: &mut dyn FnMut(&HashMap<Sym, Sym>),
) {
    let Some((first, rest)) = body.split_first() else {
        out(theta);
        return;
    };
    for f in facts {
        if f.pred != first.pred || f.args.len() != first.args.len() {
            continue;
        }
        let mut bound = Vec::new();
        let mut ok = true;
        for (t, &c) in first.args.iter().zip(f.args.iter()) {
            match t {
                Term::Const(k) => ok = *k == c,
                Term::Var(v) => match theta.get(v) {
                    Some(&x) => ok = x == c,
                    None => {
                        theta.insert(*v, c);
                        bound.push(*v);
                    }
                },
            }
            if !ok {
                break;
            }
        }
        if ok {
            solve(rest, facts, theta, out);
        }
        for v in bound {
            theta.remove(&v);
        }
    }
}

/// Text of a random program: up to `max_preds` predicates of arity 1 to 3,
/// up to 50 facts over six constants, up to 6 range-restricted rules (which
/// may be recursive, and may use constants).
pub fn random_program_text(rng: &mut impl Rng, max_preds: usize) -> String {
    let n_preds = rng.gen_range(1..=max_preds);
    let arities: Vec<usize> = (0..n_preds).map(|_| rng.gen_range(1..=3)).collect();
    let consts = ["a", "b", "c", "d", "e", "f"];
    let mut out = String::new();
    // Facts only for a prefix of predicates so some are purely derived.
    let extensional = rng.gen_range(1..=n_preds);
    let n_facts = rng.gen_range(0..=50);
    for _ in 0..n_facts {
        let p = rng.gen_range(0..extensional);
        let args: Vec<&str> = (0..arities[p]).map(|_| *consts.choose(rng).unwrap()).collect();
        out.push_str(&format!("p{p}({}).\n", args.join(",")));
    }
    let vars = ["A", "B", "C", "D"];
    let n_rules = rng.gen_range(0..=6);
    for _ in 0..n_rules {
        let body_len = rng.gen_range(1..=3);
        let mut body = Vec::new();
        let mut body_vars: Vec<&str> = Vec::new();
        for _ in 0..body_len {
            let p = rng.gen_range(0..n_preds);
            let args: Vec<&str> = (0..arities[p])
                .map(|_| {
                    if rng.gen_bool(0.15) {
                        *consts.choose(rng).unwrap()
                    } else {
                        let v = *vars.choose(rng).unwrap();
                        body_vars.push(v);
                        v
                    }
                })
                .collect();
            body.push(format!("p{p}({})", args.join(",")));
        }
        let hp = rng.gen_range(0..n_preds);
        let head_args: Vec<&str> = (0..arities[hp])
            .map(|_| {
                if body_vars.is_empty() || rng.gen_bool(0.1) {
                    *consts.choose(rng).unwrap()
                } else {
                    *body_vars.choose(rng).unwrap()
                }
            })
            .collect();
        out.push_str(&format!("p{hp}({}) :- {}.\n", head_args.join(","), body.join(", ")));
    }
    out
}
