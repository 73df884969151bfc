//! Snapshot ensembles built from a single anytime search.
//!
//! 1. [`collect_pool`] keeps every candidate whose cost is no larger than the
//!    best cost seen so far.
//! 2. [`assign_weights`] gives each snapshot the weight
//!    `coverage^beta * exp(-alpha * mdl)`, normalised to sum to one.
//! 3. [`WeightedEnsemble::predict_many`] predicts positive when the weighted
//!    vote of the snapshots reaches one half.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cost::{coverage, mdl_score, CostKey};
use crate::error::{Error, Result};
use crate::eval::{ConfusionCounts, Evaluator};
use crate::learner::{Clock, CostOracle};
use crate::logic::{GroundAtom, Hypothesis};
use crate::parse::parse_hypothesis;

pub const DEFAULT_ALPHA: f64 = 0.0017;
pub const DEFAULT_BETA: f64 = 2.0;

/// The validation grid for `alpha` (with `beta` fixed at 2).
pub const ALPHA_GRID: [f64; 7] = [0.0005, 0.001, 0.0013, 0.0017, 0.005, 0.03, 0.06];

// Slack on the 0.5 vote threshold for floating-point sums that are exactly
// one half in real arithmetic.
const VOTE_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub hypothesis: Hypothesis,
    pub cost: CostKey,
    pub confusion: ConfusionCounts,
    pub mdl: u64,
    pub coverage: f64,
    pub discovered_at: Duration,
}

impl Snapshot {
    pub fn new(
        hypothesis: Hypothesis,
        cost: CostKey,
        confusion: ConfusionCounts,
        discovered_at: Duration,
    ) -> Result<Self> {
        Ok(Snapshot {
            mdl: mdl_score(&confusion, hypothesis.size()),
            coverage: coverage(&confusion)?,
            hypothesis,
            cost,
            confusion,
            discovered_at,
        })
    }
}

/// Snapshots in discovery order, at most one per canonical hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotPool {
    snapshots: Vec<Snapshot>,
    best_cost: CostKey,
}

impl SnapshotPool {
    /// Builds a pool from snapshots in discovery order. Later duplicates of a
    /// canonical hypothesis are dropped.
    pub fn from_snapshots(snapshots: Vec<Snapshot>) -> Result<Self> {
        let mut seen = HashSet::new();
        let snapshots: Vec<Snapshot> = snapshots
            .into_iter()
            .filter(|s| seen.insert(s.hypothesis.canonical_form().to_owned()))
            .collect();
        let best_cost = min_cost(&snapshots)?.ok_or(Error::EmptyPool)?;
        Ok(SnapshotPool {
            snapshots,
            best_cost,
        })
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn best_cost(&self) -> &CostKey {
        &self.best_cost
    }

    /// The earliest-discovered snapshot of minimum cost: the single-run
    /// baseline.
    pub fn baseline(&self) -> &Snapshot {
        self.snapshots
            .iter()
            .find(|s| s.cost == self.best_cost)
            .expect("pool holds a snapshot at its best cost")
    }

    /// Line-oriented text form: a header, then one tab-separated record per
    /// snapshot (hypothesis, cost, tp/tn/fp/fn, mdl, seconds).
    pub fn to_text(&self) -> String {
        let mut out = String::from("# hypothesis\tcost\ttp,tn,fp,fn\tmdl\tdiscovered_s\n");
        for s in &self.snapshots {
            let c = &s.confusion;
            out.push_str(&format!(
                "{}\t{}\t{},{},{},{}\t{}\t{:.3}\n",
                s.hypothesis,
                s.cost,
                c.tp,
                c.tn,
                c.fp,
                c.fn_,
                s.mdl,
                s.discovered_at.as_secs_f64()
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut snaps = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::PoolFormat { line: line_no, msg };
            let fields: Vec<&str> = line.split('\t').collect();
            let [hyp, cost, conf, mdl, secs] = fields[..] else {
                return Err(bad(format!("expected 5 fields, found {}", fields.len())));
            };
            let hypothesis = parse_hypothesis(hyp).map_err(|e| bad(e.to_string()))?;
            let cost = CostKey::from_str(cost).map_err(|e| bad(e.to_string()))?;
            let counts = conf
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(e.to_string()))?;
            let [tp, tn, fp, fn_] = counts[..] else {
                return Err(bad("expected four confusion counts".into()));
            };
            let confusion = ConfusionCounts::new(tp, tn, fp, fn_);
            let secs: f64 = secs.trim().parse().map_err(|_| bad(format!("bad time {secs:?}")))?;
            let snap = Snapshot::new(hypothesis, cost, confusion, Duration::from_secs_f64(secs))
                .map_err(|e| bad(e.to_string()))?;
            if mdl.trim() != snap.mdl.to_string() {
                return Err(bad(format!("mdl {mdl} disagrees with counts ({})", snap.mdl)));
            }
            snaps.push(snap);
        }
        Self::from_snapshots(snaps)
    }
}

fn min_cost(snaps: &[Snapshot]) -> Result<Option<CostKey>> {
    let mut best: Option<&CostKey> = None;
    for s in snaps {
        match best {
            None => best = Some(&s.cost),
            Some(b) => match s.cost.partial_cmp(b) {
                Some(std::cmp::Ordering::Less) => best = Some(&s.cost),
                Some(_) => {}
                None => {
                    return Err(Error::InvalidArgument(
                        "pool mixes cost functions".into(),
                    ))
                }
            },
        }
    }
    Ok(best.cloned())
}

/// Outcome of one pool collection run.
#[derive(Clone, Debug)]
pub struct Collection {
    pub pool: SnapshotPool,
    pub candidates_evaluated: usize,
    pub aborted: usize,
    pub exhausted: bool,
    pub elapsed: Duration,
    pub work: u64,
}

/// Snapshot pool collection.
///
/// `bestCost` starts unbounded. Each candidate with cost `<= bestCost` joins
/// the pool (set union on canonical form); a strictly smaller cost also
/// lowers `bestCost`. The clock is checked at the top of every iteration.
pub fn collect_pool(
    mut stream: impl Iterator<Item = Hypothesis>,
    oracle: &impl CostOracle,
    timeout: Duration,
    clock: &impl Clock,
) -> Result<Collection> {
    if timeout.is_zero() {
        return Err(Error::ZeroTimeout);
    }
    let mut snapshots: Vec<Snapshot> = Vec::new();
    let mut members: HashSet<String> = HashSet::new();
    let mut best: Option<CostKey> = None;
    let (mut evaluated, mut aborted, mut work) = (0usize, 0usize, 0u64);
    let mut exhausted = false;
    while clock.elapsed() < timeout {
        let Some(h) = stream.next() else {
            exhausted = true;
            break;
        };
        let scored = match oracle.score(&h) {
            Ok(s) => s,
            Err(Error::ResourceLimit { limit }) => {
                log::debug!("candidate {h} exceeded the {limit}-atom cap");
                aborted += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        evaluated += 1;
        work += scored.work;
        let c = scored.cost;
        let admit = match &best {
            None => true,
            Some(b) => c <= *b,
        };
        if admit {
            if members.insert(h.canonical_form().to_owned()) {
                snapshots.push(Snapshot::new(h, c.clone(), scored.confusion, clock.elapsed())?);
            }
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
    }
    if snapshots.is_empty() {
        return Err(Error::EmptyPool);
    }
    Ok(Collection {
        pool: SnapshotPool::from_snapshots(snapshots)?,
        candidates_evaluated: evaluated,
        aborted,
        exhausted,
        elapsed: clock.elapsed(),
        work,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolFilter {
    Full,
    #[serde(rename = "optimal")]
    OptimalOnly,
    #[serde(rename = "final")]
    FinalOnly,
}

impl fmt::Display for PoolFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoolFilter::Full => "full",
            PoolFilter::OptimalOnly => "optimal",
            PoolFilter::FinalOnly => "final",
        })
    }
}

impl FromStr for PoolFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(PoolFilter::Full),
            "optimal" => Ok(PoolFilter::OptimalOnly),
            "final" => Ok(PoolFilter::FinalOnly),
            other => Err(Error::InvalidArgument(format!(
                "unknown pool filter {other:?} (expected full, optimal or final)"
            ))),
        }
    }
}

pub fn filter_pool(pool: &SnapshotPool, filter: PoolFilter) -> SnapshotPool {
    let snapshots = match filter {
        PoolFilter::Full => return pool.clone(),
        PoolFilter::OptimalOnly => pool
            .snapshots
            .iter()
            .filter(|s| s.cost == pool.best_cost)
            .cloned()
            .collect(),
        PoolFilter::FinalOnly => vec![pool.baseline().clone()],
    };
    SnapshotPool {
        snapshots,
        best_cost: pool.best_cost.clone(),
    }
}

/// A pool with normalised weights, one per snapshot in pool order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEnsemble {
    pub pool: SnapshotPool,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

/// Unnormalised log-weights `beta * ln(coverage) - alpha * mdl`.
pub fn log_weights(pool: &SnapshotPool, alpha: f64, beta: f64) -> Vec<f64> {
    pool.snapshots
        .iter()
        .map(|s| {
            // 0^0 = 1: with beta = 0 coverage has no influence.
            let likelihood = if beta == 0.0 { 0.0 } else { beta * s.coverage.ln() };
            likelihood - alpha * s.mdl as f64
        })
        .collect()
}

/// Normalises log-weights by shifting by their maximum before
/// exponentiating. All `-inf` falls back to uniform weights.
pub fn normalize_log_weights(logs: &[f64]) -> Vec<f64> {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if logs.is_empty() {
        return Vec::new();
    }
    if max == f64::NEG_INFINITY {
        log::warn!("every snapshot has zero coverage; using uniform weights");
        return vec![1.0 / logs.len() as f64; logs.len()];
    }
    let raw: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|r| r / total).collect()
}

pub fn assign_weights(pool: &SnapshotPool, alpha: f64, beta: f64) -> Result<WeightedEnsemble> {
    if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha and beta must be finite and non-negative (alpha={alpha}, beta={beta})"
        )));
    }
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let weights = normalize_log_weights(&log_weights(pool, alpha, beta));
    Ok(WeightedEnsemble {
        pool: pool.clone(),
        weights,
        alpha,
        beta,
    })
}

/// `1` iff the weighted vote reaches one half.
pub fn weighted_vote(weights: &[f64], votes: &[bool]) -> bool {
    let score: f64 = weights
        .iter()
        .zip(votes)
        .filter(|(_, &v)| v)
        .map(|(w, _)| w)
        .sum();
    score >= 0.5 - VOTE_EPS
}

/// Per-member predictions for each atom: `out[i][j]` is member `j` on atom `i`.
/// Each member's model is computed once. Also returns the effort spent.
pub fn member_predictions<'h>(
    evaluator: &Evaluator,
    members: impl IntoIterator<Item = &'h Hypothesis>,
    atoms: &[GroundAtom],
) -> Result<(Vec<Vec<bool>>, u64)> {
    let mut out = vec![Vec::new(); atoms.len()];
    let mut work = 0;
    for h in members {
        let model = evaluator.least_model(h)?;
        work += model.work() + atoms.len() as u64;
        for (row, a) in out.iter_mut().zip(atoms) {
            row.push(model.contains(a));
        }
    }
    Ok((out, work))
}

impl WeightedEnsemble {
    pub fn members(&self) -> impl Iterator<Item = &Hypothesis> {
        self.pool.snapshots.iter().map(|s| &s.hypothesis)
    }

    pub fn predict_many(&self, evaluator: &Evaluator, atoms: &[GroundAtom]) -> Result<Vec<bool>> {
        self.predict_many_with_work(evaluator, atoms).map(|(p, _)| p)
    }

    pub fn predict_many_with_work(
        &self,
        evaluator: &Evaluator,
        atoms: &[GroundAtom],
    ) -> Result<(Vec<bool>, u64)> {
        let (votes, work) = member_predictions(evaluator, self.members(), atoms)?;
        let preds = votes.iter().map(|v| weighted_vote(&self.weights, v)).collect();
        Ok((preds, work))
    }

    pub fn predict(&self, evaluator: &Evaluator, atom: &GroundAtom) -> Result<bool> {
        let target = self.pool.snapshots[0]
            .hypothesis
            .clauses()
            .first()
            .map(|c| c.head.predicate());
        if !evaluator.is_declared(&atom.predicate()) && target != Some(atom.predicate()) {
            return Err(Error::UndeclaredPredicate(atom.predicate()));
        }
        Ok(self.predict_many(evaluator, std::slice::from_ref(atom))?[0])
    }
}

/// `beta * ln(cov_max / cov_min) / (alpha * (mdl_max - mdl_min))`.
pub fn coverage_cost_ratio(
    cov_min: f64,
    cov_max: f64,
    mdl_min: f64,
    mdl_max: f64,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if !(cov_min > 0.0) {
        return Err(Error::InvalidArgument("cov_min must be positive".into()));
    }
    let denom = alpha * (mdl_max - mdl_min);
    if !(alpha > 0.0) || !(mdl_max > mdl_min) || denom == 0.0 {
        return Err(Error::InvalidArgument(
            "coverage-cost ratio needs alpha > 0 and mdl_max > mdl_min".into(),
        ));
    }
    Ok(beta * (cov_max / cov_min).ln() / denom)
}
