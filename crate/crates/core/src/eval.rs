//! Bottom-up least-model evaluation and confusion counting.
//!
//! The model of the background knowledge is computed once by [`Evaluator::new`]
//! and reused as the starting point for every hypothesis. Hypothesis clauses
//! are first applied to that model in full, after which a semi-naive loop
//! propagates only newly derived atoms through all rules.

use std::collections::{HashMap, HashSet};

use rustc_hash::{FxHashMap, FxHashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{Clause, ExampleSet, GroundAtom, Hypothesis, Predicate, Program, Term};
use crate::symbol::Sym;

pub const DEFAULT_ATOM_CAP: usize = 10_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, tn: usize, fp: usize, fn_: usize) -> Self {
        ConfusionCounts { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn errors(&self) -> usize {
        self.fp + self.fn_
    }
}

impl fmt::Display for ConfusionCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tp={} tn={} fp={} fn={}",
            self.tp, self.tn, self.fp, self.fn_
        )
    }
}

type Tuple = Box<[Sym]>;

#[derive(Clone, Debug, Default)]
struct Relation {
    tuples: Vec<Tuple>,
    set: FxHashSet<Tuple>,
    // One index per argument position: value -> tuple offsets. Left empty
    // for relations that no rule body reads.
    indexed: bool,
    index: Vec<FxHashMap<Sym, Vec<u32>>>,
}

impl Relation {
    fn insert(&mut self, t: Tuple) -> bool {
        if self.set.contains(&t) {
            return false;
        }
        if self.indexed {
            if self.index.len() < t.len() {
                self.index.resize_with(t.len(), FxHashMap::default);
            }
            let at = self.tuples.len() as u32;
            for (i, v) in t.iter().enumerate() {
                self.index[i].entry(*v).or_default().push(at);
            }
        }
        self.set.insert(t.clone());
        self.tuples.push(t);
        true
    }

    fn contains(&self, t: &[Sym]) -> bool {
        self.set.contains(t)
    }

    fn len(&self) -> usize {
        self.tuples.len()
    }
}

/// A set of ground atoms grouped by predicate.
#[derive(Clone, Debug, Default)]
pub struct Database {
    rels: FxHashMap<Predicate, Relation>,
    size: usize,
}

impl Database {
    fn insert(&mut self, pred: Predicate, t: Tuple) -> bool {
        self.insert_with(pred, t, true)
    }

    /// `indexed` takes effect when the relation is first created.
    fn insert_with(&mut self, pred: Predicate, t: Tuple, indexed: bool) -> bool {
        let rel = self.rels.entry(pred).or_insert_with(|| Relation {
            indexed,
            ..Relation::default()
        });
        let added = rel.insert(t);
        if added {
            self.size += 1;
        }
        added
    }

    fn get(&self, pred: &Predicate) -> Option<&Relation> {
        self.rels.get(pred)
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.rels
            .get(&atom.predicate())
            .is_some_and(|r| r.contains(&atom.args))
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn extension_len(&self, pred: &Predicate) -> usize {
        self.rels.get(pred).map_or(0, Relation::len)
    }

    pub fn atoms(&self) -> impl Iterator<Item = GroundAtom> + '_ {
        self.rels.iter().flat_map(|(p, r)| {
            r.tuples.iter().map(move |t| GroundAtom {
                pred: p.name,
                args: t.clone(),
            })
        })
    }
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Var(usize),
    Const(Sym),
}

#[derive(Clone, Debug)]
struct Literal {
    pred: Predicate,
    args: Vec<Slot>,
}

#[derive(Clone, Debug)]
struct Rule {
    head: Literal,
    body: Vec<Literal>,
    nvars: usize,
}

impl Rule {
    fn compile(clause: &Clause) -> Rule {
        let mut vars: HashMap<Sym, usize> = HashMap::new();
        let mut lit = |a: &crate::logic::Atom| Literal {
            pred: a.predicate(),
            args: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => Slot::Const(*c),
                    Term::Var(v) => {
                        let n = vars.len();
                        Slot::Var(*vars.entry(*v).or_insert(n))
                    }
                })
                .collect(),
        };
        let head = lit(&clause.head);
        let body: Vec<Literal> = join_order(clause).into_iter().map(|i| lit(&clause.body[i])).collect();
        Rule {
            head,
            body,
            nvars: vars.len(),
        }
    }
}

/// Evaluation order for a clause body. Greedy: next comes a literal that
/// shares a bound variable, preferring ones that bind head variables; ties
/// keep textual order. Literals only reachable through body-only variables
/// thus come after the head is fully bound.
fn join_order(clause: &Clause) -> Vec<usize> {
    let head: HashSet<Sym> = clause.head.vars().collect();
    let mut bound: HashSet<Sym> = HashSet::new();
    let mut left: Vec<usize> = (0..clause.body.len()).collect();
    let mut order = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let rank = |i: usize| {
            let a = &clause.body[i];
            let connected = a.args.iter().any(|t| match t {
                Term::Const(_) => true,
                Term::Var(v) => bound.contains(v),
            });
            let binds_head = a.vars().any(|v| head.contains(&v) && !bound.contains(&v));
            (!connected, !binds_head)
        };
        let (k, _) = left
            .iter()
            .enumerate()
            .min_by_key(|&(_, &i)| rank(i))
            .expect("non-empty");
        let i = left.remove(k);
        bound.extend(clause.body[i].vars());
        order.push(i);
    }
    order
}

/// Layered read access: background model plus atoms derived for a hypothesis.
struct Layers<'a> {
    base: &'a Database,
    extra: &'a Database,
}

impl Layers<'_> {
    fn contains(&self, pred: &Predicate, t: &[Sym]) -> bool {
        self.base.get(pred).is_some_and(|r| r.contains(t))
            || self.extra.get(pred).is_some_and(|r| r.contains(t))
    }

    fn relations(&self, pred: &Predicate) -> impl Iterator<Item = &Relation> {
        self.base
            .get(pred)
            .into_iter()
            .chain(self.extra.get(pred))
    }
}

struct Join<'r, 's> {
    rule: &'r Rule,
    sources: Vec<Vec<&'s Relation>>,
    work: u64,
}

impl Join<'_, '_> {
    fn run(&mut self, out: &mut impl FnMut(Tuple)) {
        let mut bindings = vec![None; self.rule.nvars];
        self.step(0, &mut bindings, out);
    }

    /// Extends `bindings` through the body from literal `at`. Returns whether
    /// a head tuple was emitted. Once every head variable is bound, the rest
    /// of the body only needs one witness, so the first solution ends the
    /// search below that point.
    fn step(&mut self, at: usize, bindings: &mut [Option<Sym>], out: &mut impl FnMut(Tuple)) -> bool {
        let rule = self.rule;
        if at == rule.body.len() {
            let t: Tuple = rule
                .head
                .args
                .iter()
                .map(|s| match s {
                    Slot::Const(c) => *c,
                    Slot::Var(v) => bindings[*v].expect("range-restricted rule"),
                })
                .collect();
            out(t);
            return true;
        }
        let head_bound = rule.head.args.iter().all(|s| match s {
            Slot::Const(_) => true,
            Slot::Var(v) => bindings[*v].is_some(),
        });
        let mut emitted = false;
        let lit = &rule.body[at];
        let bound = |s: &Slot, b: &[Option<Sym>]| match s {
            Slot::Const(c) => Some(*c),
            Slot::Var(v) => b[*v],
        };
        for r in 0..self.sources[at].len() {
            let rel = self.sources[at][r];
            // Narrowest index over the bound argument positions.
            let mut bucket: Option<&[u32]> = None;
            let mut empty = false;
            for (i, s) in lit.args.iter().enumerate().filter(|_| rel.indexed) {
                if let Some(v) = bound(s, bindings) {
                    match rel.index.get(i).and_then(|ix| ix.get(&v)) {
                        Some(b) => {
                            if bucket.is_none_or(|cur| b.len() < cur.len()) {
                                bucket = Some(b);
                            }
                        }
                        None => {
                            empty = true;
                            break;
                        }
                    }
                }
            }
            if empty {
                continue;
            }
            let candidates: Box<dyn Iterator<Item = &Tuple>> = match bucket {
                Some(b) => Box::new(b.iter().map(|&k| &rel.tuples[k as usize])),
                None => Box::new(rel.tuples.iter()),
            };
            let mut fresh: Vec<usize> = Vec::with_capacity(lit.args.len());
            for tuple in candidates {
                self.work += 1;
                fresh.clear();
                let mut ok = true;
                for (s, &val) in lit.args.iter().zip(tuple.iter()) {
                    match s {
                        Slot::Const(c) => {
                            if *c != val {
                                ok = false;
                                break;
                            }
                        }
                        Slot::Var(v) => match bindings[*v] {
                            Some(b) if b != val => {
                                ok = false;
                                break;
                            }
                            Some(_) => {}
                            None => {
                                bindings[*v] = Some(val);
                                fresh.push(*v);
                            }
                        },
                    }
                }
                if ok {
                    let saved = std::mem::take(&mut fresh);
                    emitted |= self.step(at + 1, bindings, out);
                    fresh = saved;
                }
                for v in &fresh {
                    bindings[*v] = None;
                }
                if emitted && head_bound {
                    return true;
                }
            }
        }
        emitted
    }
}

/// Saturates `extra` (on top of `base`) under `rules`. `seed` rules are first
/// applied against everything; later rounds join through the newest atoms.
fn saturate(
    base: &Database,
    extra: &mut Database,
    seed: &[Rule],
    rules: &[Rule],
    cap: usize,
    already_derived: usize,
) -> Result<u64> {
    let mut work = 0u64;
    // Only atoms of predicates some rule body reads can feed later rounds.
    let read: FxHashSet<Predicate> = rules.iter().flat_map(|r| r.body.iter().map(|l| l.pred)).collect();

    let mut pending: Vec<(Predicate, Tuple)> = Vec::new();
    {
        let layers = Layers { base, extra: &*extra };
        for rule in seed {
            let sources = rule
                .body
                .iter()
                .map(|l| layers.relations(&l.pred).collect())
                .collect();
            let mut join = Join {
                rule,
                sources,
                work: 0,
            };
            join.run(&mut |t| {
                if !layers.contains(&rule.head.pred, &t) {
                    pending.push((rule.head.pred, t));
                }
            });
            work += join.work;
        }
    }

    loop {
        let mut delta = Database::default();
        for (p, t) in pending.drain(..) {
            if read.contains(&p) {
                if extra.insert_with(p, t.clone(), true) {
                    delta.insert(p, t);
                }
            } else {
                extra.insert_with(p, t, false);
            }
        }
        if already_derived + extra.len() > cap {
            return Err(Error::ResourceLimit { limit: cap });
        }
        if delta.is_empty() {
            return Ok(work);
        }
        let layers = Layers { base, extra: &*extra };
        for rule in rules {
            for (i, lit) in rule.body.iter().enumerate() {
                let Some(d) = delta.get(&lit.pred) else {
                    continue;
                };
                let sources = rule
                    .body
                    .iter()
                    .enumerate()
                    .map(|(j, l)| {
                        if j == i {
                            vec![d]
                        } else {
                            layers.relations(&l.pred).collect()
                        }
                    })
                    .collect();
                let mut join = Join {
                    rule,
                    sources,
                    work: 0,
                };
                join.run(&mut |t| {
                    if !layers.contains(&rule.head.pred, &t) {
                        pending.push((rule.head.pred, t));
                    }
                });
                work += join.work;
            }
        }
    }
}

/// The least Herbrand model of `B ∪ h`: the background model plus the atoms
/// the hypothesis adds to it.
#[derive(Debug)]
pub struct Model<'a> {
    base: &'a Database,
    extra: Database,
    work: u64,
}

impl Model<'_> {
    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.base.contains(atom) || self.extra.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.base.len() + self.extra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All atoms, sorted.
    pub fn atoms(&self) -> Vec<GroundAtom> {
        let mut all: Vec<GroundAtom> = self.base.atoms().chain(self.extra.atoms()).collect();
        all.sort();
        all
    }

    /// Atoms added on top of the background model.
    pub fn added(&self) -> &Database {
        &self.extra
    }

    /// Tuples visited while joining; a deterministic measure of effort.
    pub fn work(&self) -> u64 {
        self.work
    }
}

/// Evaluates hypotheses against fixed background knowledge.
#[derive(Clone, Debug)]
pub struct Evaluator {
    base: Database,
    rules: Vec<Rule>,
    declared: HashSet<Predicate>,
    cap: usize,
    base_derived: usize,
    base_work: u64,
}

impl Evaluator {
    pub fn new(program: &Program) -> Result<Self> {
        Self::with_cap(program, DEFAULT_ATOM_CAP)
    }

    pub fn with_cap(program: &Program, cap: usize) -> Result<Self> {
        let mut facts = Database::default();
        for f in &program.facts {
            facts.insert(f.predicate(), f.args.clone());
        }
        let rules: Vec<Rule> = program.rules.iter().map(Rule::compile).collect();
        let mut extra = Database::default();
        let base_work = saturate(&facts, &mut extra, &rules, &rules, cap, 0)?;
        let base_derived = extra.len();
        for (p, rel) in extra.rels {
            for t in rel.tuples {
                facts.insert(p, t);
            }
        }
        Ok(Evaluator {
            base: facts,
            rules,
            declared: program.predicates(),
            cap,
            base_derived,
            base_work,
        })
    }

    /// Marks a predicate (typically the learning target) as known even if
    /// nothing in the background knowledge mentions it.
    pub fn declare(&mut self, pred: Predicate) {
        self.declared.insert(pred);
    }

    pub fn is_declared(&self, pred: &Predicate) -> bool {
        self.declared.contains(pred)
    }

    pub fn background(&self) -> &Database {
        &self.base
    }

    /// Effort spent computing the background model.
    pub fn background_work(&self) -> u64 {
        self.base_work
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn least_model(&self, h: &Hypothesis) -> Result<Model<'_>> {
        let mut extra = Database::default();
        let work = if h.is_empty() {
            0
        } else {
            let hyp: Vec<Rule> = h.clauses().iter().map(Rule::compile).collect();
            let all: Vec<Rule> = self.rules.iter().chain(hyp.iter()).cloned().collect();
            saturate(
                &self.base,
                &mut extra,
                &hyp,
                &all,
                self.cap,
                self.base_derived,
            )?
        };
        Ok(Model {
            base: &self.base,
            extra,
            work,
        })
    }

    fn check_declared(&self, h: &Hypothesis, atom: &GroundAtom) -> Result<()> {
        let p = atom.predicate();
        let in_h = h
            .clauses()
            .iter()
            .any(|c| c.head.predicate() == p || c.mentions(p));
        if self.declared.contains(&p) || in_h {
            Ok(())
        } else {
            Err(Error::UndeclaredPredicate(p))
        }
    }

    pub fn entails(&self, h: &Hypothesis, atom: &GroundAtom) -> Result<bool> {
        self.check_declared(h, atom)?;
        Ok(self.least_model(h)?.contains(atom))
    }

    /// Confusion counts from a single model computation. Also returns the
    /// effort spent.
    pub fn confusion_with_work(
        &self,
        h: &Hypothesis,
        examples: &ExampleSet,
    ) -> Result<(ConfusionCounts, u64)> {
        if let Some((a, _)) = examples.labeled().next() {
            self.check_declared(h, a)?;
        }
        let model = self.least_model(h)?;
        Ok((count(&model, examples), model.work() + examples.len() as u64))
    }

    pub fn confusion(&self, h: &Hypothesis, examples: &ExampleSet) -> Result<ConfusionCounts> {
        self.confusion_with_work(h, examples).map(|(c, _)| c)
    }
}

/// Counts outcomes of `examples` against an already computed model.
pub fn count(model: &Model<'_>, examples: &ExampleSet) -> ConfusionCounts {
    let tp = examples.pos.iter().filter(|a| model.contains(a)).count();
    let fp = examples.neg.iter().filter(|a| model.contains(a)).count();
    let c = ConfusionCounts {
        tp,
        fn_: examples.pos.len() - tp,
        fp,
        tn: examples.neg.len() - fp,
    };
    debug_assert_eq!(c.tp + c.fn_, examples.pos.len());
    debug_assert_eq!(c.tn + c.fp, examples.neg.len());
    c
}

/// Least model of `B ∪ h` as a sorted atom list.
pub fn least_model(b: &Program, h: &Hypothesis) -> Result<Vec<GroundAtom>> {
    let ev = Evaluator::new(b)?;
    let model = ev.least_model(h)?;
    Ok(model.atoms())
}

pub fn entails(b: &Program, h: &Hypothesis, atom: &GroundAtom) -> Result<bool> {
    Evaluator::new(b)?.entails(h, atom)
}

/// Confusion counts of `h` on `examples`; the examples' predicate counts as
/// declared.
pub fn confusion(b: &Program, h: &Hypothesis, examples: &ExampleSet) -> Result<ConfusionCounts> {
    let mut ev = Evaluator::new(b)?;
    if let Some(t) = examples.target() {
        ev.declare(t);
    }
    ev.confusion(h, examples)
}
