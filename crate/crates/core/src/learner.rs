//! Generate-and-test hypothesis search.
//!
//! The bias defines a finite clause space: heads are the target predicate over
//! distinct variables, bodies are sets of up to `max_body` literals over
//! `max_vars` variables, and every clause is range-restricted. Hypotheses are
//! sets of up to `max_clauses` distinct clauses. [`CandidateStream`] emits them
//! by increasing size, ties broken by canonical string, each canonical class
//! exactly once.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use crate::bias::Bias;
use crate::cost::{cost_key, CostFunctionId, CostKey};
use crate::error::{Error, Result};
use crate::eval::{ConfusionCounts, Evaluator, DEFAULT_ATOM_CAP};
use crate::logic::{canonical_clause, var_name, Atom, Clause, ExampleSet, Hypothesis, Predicate, Program, Term};

/// Canonical clauses admitted by `bias`, sorted by size and printed form.
pub fn clause_space(bias: &Bias) -> Vec<(Clause, String)> {
    let head = Atom {
        pred: bias.target.name,
        args: (0..bias.target.arity).map(|i| Term::Var(var_name(i))).collect(),
    };
    let vars: Vec<Term> = (0..bias.max_vars).map(|i| Term::Var(var_name(i))).collect();
    let mut literals: Vec<Atom> = Vec::new();
    for p in bias.literal_preds() {
        let mut idx = vec![0usize; p.arity];
        loop {
            let atom = Atom {
                pred: p.name,
                args: idx.iter().map(|&i| vars[i]).collect(),
            };
            if atom != head {
                literals.push(atom);
            }
            // Odometer over max_vars^arity argument tuples.
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < bias.max_vars {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }

    let mut seen: HashSet<String> = HashSet::new();
    let mut out: Vec<(Clause, String)> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn combos(
        literals: &[Atom],
        start: usize,
        left: usize,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if !chosen.is_empty() {
            visit(chosen);
        }
        if left == 0 {
            return;
        }
        for i in start..literals.len() {
            chosen.push(i);
            combos(literals, i + 1, left - 1, chosen, visit);
            chosen.pop();
        }
    }
    combos(&literals, 0, bias.max_body, &mut chosen, &mut |ix| {
        let clause = Clause::new(head.clone(), ix.iter().map(|&i| literals[i].clone()).collect());
        if !clause.is_range_restricted() {
            return;
        }
        let canon = canonical_clause(&clause);
        let text = canon.to_string();
        if seen.insert(text.clone()) {
            out.push((canon, text));
        }
    });
    out.sort_by(|a, b| (a.0.size(), &a.1).cmp(&(b.0.size(), &b.1)));
    out
}

/// Predicates whose extension can grow once target atoms are derived.
fn target_dependents(program: &Program, target: Predicate) -> HashSet<Predicate> {
    let mut deps: HashSet<Predicate> = HashSet::from([target]);
    loop {
        let before = deps.len();
        for r in &program.rules {
            if r.body.iter().any(|a| deps.contains(&a.predicate())) {
                deps.insert(r.head.predicate());
            }
        }
        if deps.len() == before {
            return deps;
        }
    }
}

/// Sound pruning state computed from the background model.
#[derive(Clone, Debug, Default)]
pub struct Pruning {
    /// Clauses that can never derive anything new; dropped from the space.
    pub dead_clauses: usize,
    /// Per remaining clause: its body contains a target-dependent predicate
    /// with an empty background extension.
    starved: Vec<bool>,
}

/// Deterministic, exhaustive stream of candidate hypotheses.
#[derive(Clone, Debug)]
pub struct CandidateStream {
    clauses: Vec<(Clause, String)>,
    max_clauses: usize,
    next_level: usize,
    max_level: usize,
    pruning: Option<Pruning>,
    pending: std::vec::IntoIter<(String, Vec<u32>)>,
    emitted: usize,
}

impl CandidateStream {
    /// The full, unpruned space.
    pub fn new(bias: &Bias) -> Self {
        let clauses = clause_space(bias);
        Self::from_clauses(clauses, bias, None)
    }

    /// The space with clauses that provably add nothing removed, and
    /// hypotheses that provably derive nothing skipped.
    pub fn with_pruning(bias: &Bias, program: &Program, evaluator: &Evaluator) -> Result<Self> {
        let deps = target_dependents(program, bias.target);
        let mut kept = Vec::new();
        let mut starved = Vec::new();
        let mut dead = 0;
        for (clause, text) in clause_space(bias) {
            let dependent = clause.body.iter().any(|a| deps.contains(&a.predicate()));
            if dependent {
                let s = clause.body.iter().any(|a| {
                    let p = a.predicate();
                    deps.contains(&p) && evaluator.background().extension_len(&p) == 0
                });
                starved.push(s);
                kept.push((clause, text));
                continue;
            }
            let h = Hypothesis::from_canonical_parts(vec![(clause.clone(), text.clone())]);
            match evaluator.least_model(&h) {
                Ok(m) if m.added().is_empty() => dead += 1,
                // Over the cap on its own; keep it so the search records the abort.
                Ok(_) | Err(Error::ResourceLimit { .. }) => {
                    starved.push(false);
                    kept.push((clause, text));
                }
                Err(e) => return Err(e),
            }
        }
        let pruning = Pruning {
            dead_clauses: dead,
            starved,
        };
        Ok(Self::from_clauses(kept, bias, Some(pruning)))
    }

    fn from_clauses(clauses: Vec<(Clause, String)>, bias: &Bias, pruning: Option<Pruning>) -> Self {
        let widest = clauses.iter().map(|c| c.0.size()).max().unwrap_or(0);
        CandidateStream {
            clauses,
            max_clauses: bias.max_clauses,
            next_level: 1,
            max_level: widest * bias.max_clauses,
            pruning,
            pending: Vec::new().into_iter(),
            emitted: 0,
        }
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn pruning(&self) -> Option<&Pruning> {
        self.pruning.as_ref()
    }

    /// Candidates emitted so far.
    pub fn emitted(&self) -> usize {
        self.emitted
    }

    fn fill_level(&mut self, size: usize) -> Vec<(String, Vec<u32>)> {
        let mut level = Vec::new();
        let mut chosen: Vec<u32> = Vec::new();
        self.collect_level(0, size, &mut chosen, &mut level);
        level.sort_by(|a, b| a.0.cmp(&b.0));
        level
    }

    fn collect_level(
        &self,
        start: usize,
        left: usize,
        chosen: &mut Vec<u32>,
        level: &mut Vec<(String, Vec<u32>)>,
    ) {
        if left == 0 {
            if let Some(p) = &self.pruning {
                if chosen.iter().all(|&i| p.starved[i as usize]) {
                    return;
                }
            }
            let key = chosen
                .iter()
                .map(|&i| self.clauses[i as usize].1.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            level.push((key, chosen.clone()));
            return;
        }
        if chosen.len() == self.max_clauses {
            return;
        }
        for i in start..self.clauses.len() {
            let s = self.clauses[i].0.size();
            if s > left {
                break;
            }
            chosen.push(i as u32);
            self.collect_level(i + 1, left - s, chosen, level);
            chosen.pop();
        }
    }

    pub fn next_candidate(&mut self) -> Option<Hypothesis> {
        loop {
            if let Some((key, ix)) = self.pending.next() {
                self.emitted += 1;
                let clauses = ix.iter().map(|&i| self.clauses[i as usize].0.clone()).collect();
                return Some(Hypothesis::from_sorted(clauses, key));
            }
            if self.next_level > self.max_level {
                return None;
            }
            let level = self.fill_level(self.next_level);
            self.next_level += 1;
            self.pending = level.into_iter();
        }
    }
}

impl Iterator for CandidateStream {
    type Item = Hypothesis;

    fn next(&mut self) -> Option<Hypothesis> {
        self.next_candidate()
    }
}

/// Source of elapsed time for the anytime loops.
pub trait Clock {
    fn elapsed(&self) -> Duration;
}

pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

/// Result of scoring one candidate on the training examples.
#[derive(Clone, Debug, PartialEq)]
pub struct Scored {
    pub cost: CostKey,
    pub confusion: ConfusionCounts,
    pub size: usize,
    pub work: u64,
}

/// Anything that can assign a cost to a hypothesis.
pub trait CostOracle {
    fn score(&self, h: &Hypothesis) -> Result<Scored>;
}

/// Scores hypotheses against fixed background knowledge and examples.
#[derive(Clone, Debug)]
pub struct Scorer {
    evaluator: Evaluator,
    examples: ExampleSet,
    cost: CostFunctionId,
}

impl Scorer {
    pub fn new(evaluator: Evaluator, examples: ExampleSet, cost: CostFunctionId) -> Self {
        Scorer {
            evaluator,
            examples,
            cost,
        }
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn examples(&self) -> &ExampleSet {
        &self.examples
    }

    pub fn cost_function(&self) -> CostFunctionId {
        self.cost
    }
}

impl CostOracle for Scorer {
    fn score(&self, h: &Hypothesis) -> Result<Scored> {
        let (confusion, work) = self.evaluator.confusion_with_work(h, &self.examples)?;
        Ok(Scored {
            cost: cost_key(self.cost, &confusion, h.size()),
            confusion,
            size: h.size(),
            work,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub prune: bool,
    pub atom_cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            prune: true,
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub final_hypothesis: Hypothesis,
    pub final_cost: CostKey,
    pub final_confusion: ConfusionCounts,
    pub candidates_evaluated: usize,
    /// Candidates abandoned because they exceeded the derived-atom cap.
    pub aborted: usize,
    pub exhausted: bool,
    pub wall_time: Duration,
    pub work: u64,
}

/// A learning task bound to one cost function: scorer plus bias.
#[derive(Clone, Debug)]
pub struct Learner {
    program: Program,
    bias: Bias,
    scorer: Scorer,
    options: SearchOptions,
}

impl Learner {
    pub fn new(
        program: &Program,
        examples: &ExampleSet,
        bias: &Bias,
        cost: CostFunctionId,
        options: SearchOptions,
    ) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::EmptyExamples);
        }
        if let Some(t) = examples.target() {
            if t != bias.target {
                return Err(Error::InvalidArgument(format!(
                    "examples are for {t} but the bias targets {}",
                    bias.target
                )));
            }
        }
        let mut evaluator = Evaluator::with_cap(program, options.atom_cap)?;
        evaluator.declare(bias.target);
        Ok(Learner {
            program: program.clone(),
            bias: bias.clone(),
            scorer: Scorer::new(evaluator, examples.clone(), cost),
            options,
        })
    }

    pub fn scorer(&self) -> &Scorer {
        &self.scorer
    }

    pub fn evaluator(&self) -> &Evaluator {
        self.scorer.evaluator()
    }

    pub fn bias(&self) -> &Bias {
        &self.bias
    }

    pub fn stream(&self) -> Result<CandidateStream> {
        let stream = if self.options.prune {
            CandidateStream::with_pruning(&self.bias, &self.program, self.scorer.evaluator())?
        } else {
            CandidateStream::new(&self.bias)
        };
        if stream.clause_count() == 0 {
            return Err(Error::NoCandidates);
        }
        Ok(stream)
    }

    pub fn search(&self, timeout: Duration) -> Result<SearchOutcome> {
        let clock = WallClock::start();
        let stream = self.stream()?;
        search_stream(stream, &self.scorer, timeout, &clock)
    }
}

/// Evaluates candidates until the timeout or exhaustion and keeps the first
/// least-cost one. Time is checked before each candidate only.
pub fn search_stream(
    mut stream: impl Iterator<Item = Hypothesis>,
    oracle: &impl CostOracle,
    timeout: Duration,
    clock: &impl Clock,
) -> Result<SearchOutcome> {
    if timeout.is_zero() {
        return Err(Error::ZeroTimeout);
    }
    let mut best: Option<(Hypothesis, Scored)> = None;
    let (mut evaluated, mut aborted, mut work) = (0usize, 0usize, 0u64);
    let mut exhausted = false;
    let mut yielded = false;
    while clock.elapsed() < timeout {
        let Some(h) = stream.next() else {
            exhausted = true;
            break;
        };
        yielded = true;
        match oracle.score(&h) {
            Ok(s) => {
                evaluated += 1;
                work += s.work;
                if best.as_ref().is_none_or(|(_, b)| s.cost < b.cost) {
                    best = Some((h, s));
                }
            }
            Err(Error::ResourceLimit { limit }) => {
                log::debug!("candidate {h} exceeded the {limit}-atom cap");
                aborted += 1;
            }
            Err(e) => return Err(e),
        }
    }
    let wall_time = clock.elapsed();
    match best {
        Some((h, s)) => Ok(SearchOutcome {
            final_hypothesis: h,
            final_cost: s.cost,
            final_confusion: s.confusion,
            candidates_evaluated: evaluated,
            aborted,
            exhausted,
            wall_time,
            work,
        }),
        None if !yielded && exhausted => Err(Error::NoCandidates),
        None => Err(Error::EmptyPool),
    }
}

/// One-shot search with default options.
pub fn search(
    b: &Program,
    e: &ExampleSet,
    bias: &Bias,
    cost: CostFunctionId,
    timeout: Duration,
) -> Result<SearchOutcome> {
    Learner::new(b, e, bias, cost, SearchOptions::default())?.search(timeout)
}

/// Counts how often each canonical form occurs in a drained stream.
pub fn drain_counts(stream: CandidateStream) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    for h in stream {
        *counts.entry(h.canonical_form().to_owned()).or_insert(0) += 1;
    }
    counts
}
