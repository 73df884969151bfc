//! Bootstrap aggregation over independent searches.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bias::Bias;
use crate::cost::CostFunctionId;
use crate::ensemble::{member_predictions, weighted_vote};
use crate::error::{Error, Result};
use crate::eval::Evaluator;
use crate::learner::{Learner, SearchOptions, SearchOutcome};
use crate::logic::{ExampleSet, GroundAtom, Hypothesis, Program};

pub const DEFAULT_BAG_SEEDS: [u64; 3] = [43, 44, 45];

#[derive(Clone, Debug, PartialEq)]
pub struct BagConfig {
    pub n_bags: usize,
    pub seeds: Vec<u64>,
    pub per_bag_timeout: Duration,
}

impl BagConfig {
    pub fn new(seeds: Vec<u64>, per_bag_timeout: Duration) -> Result<Self> {
        let cfg = BagConfig {
            n_bags: seeds.len(),
            seeds,
            per_bag_timeout,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bags == 0 {
            return Err(Error::InvalidArgument("bagging needs at least one bag".into()));
        }
        if self.seeds.len() != self.n_bags {
            return Err(Error::InvalidArgument(format!(
                "{} bags but {} seeds",
                self.n_bags,
                self.seeds.len()
            )));
        }
        if self.per_bag_timeout.is_zero() {
            return Err(Error::ZeroTimeout);
        }
        Ok(())
    }
}

impl Default for BagConfig {
    fn default() -> Self {
        BagConfig {
            n_bags: DEFAULT_BAG_SEEDS.len(),
            seeds: DEFAULT_BAG_SEEDS.to_vec(),
            per_bag_timeout: Duration::from_secs(10),
        }
    }
}

/// Draws `|E+| + |E-|` labelled examples uniformly with replacement from the
/// combined set, using ChaCha8 seeded with `seed`. Drawn positives and
/// negatives keep draw order within their polarity.
pub fn bootstrap_sample(e: &ExampleSet, seed: u64) -> Result<ExampleSet> {
    let k = e.len();
    if k == 0 {
        return Err(Error::EmptyExamples);
    }
    let labeled: Vec<(&GroundAtom, bool)> = e.labeled().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ExampleSet::default();
    for _ in 0..k {
        let (atom, positive) = labeled[rng.gen_range(0..k)];
        if positive {
            out.pos.push(atom.clone());
        } else {
            out.neg.push(atom.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct BaggedEnsemble {
    pub hypotheses: Vec<Hypothesis>,
    pub outcomes: Vec<SearchOutcome>,
    /// Sum of the per-bag wall times.
    pub wall_time: Duration,
}

impl BaggedEnsemble {
    pub fn weights(&self) -> Vec<f64> {
        vec![1.0 / self.hypotheses.len() as f64; self.hypotheses.len()]
    }

    pub fn predict_many(&self, evaluator: &Evaluator, atoms: &[GroundAtom]) -> Result<Vec<bool>> {
        let (votes, _) = member_predictions(evaluator, &self.hypotheses, atoms)?;
        let w = self.weights();
        Ok(votes.iter().map(|v| weighted_vote(&w, v)).collect())
    }
}

/// Trains one learner per bag, in bag order.
pub fn run_bagging(
    b: &Program,
    e: &ExampleSet,
    bias: &Bias,
    cost: CostFunctionId,
    cfg: &BagConfig,
) -> Result<BaggedEnsemble> {
    run_bagging_with(b, e, bias, cost, cfg, SearchOptions::default())
}

pub fn run_bagging_with(
    b: &Program,
    e: &ExampleSet,
    bias: &Bias,
    cost: CostFunctionId,
    cfg: &BagConfig,
    options: SearchOptions,
) -> Result<BaggedEnsemble> {
    cfg.validate()?;
    let mut hypotheses = Vec::with_capacity(cfg.n_bags);
    let mut outcomes = Vec::with_capacity(cfg.n_bags);
    let mut wall_time = Duration::ZERO;
    for (bag, &seed) in cfg.seeds.iter().enumerate() {
        let wrap = |source: Error| Error::Bag {
            bag,
            source: Box::new(source),
        };
        let start = Instant::now();
        let sample = bootstrap_sample(e, seed).map_err(wrap)?;
        let outcome = Learner::new(b, &sample, bias, cost, options)
            .and_then(|l| l.search(cfg.per_bag_timeout))
            .map_err(wrap)?;
        wall_time += start.elapsed();
        log::info!("bag {bag} (seed {seed}): {}", outcome.final_hypothesis);
        hypotheses.push(outcome.final_hypothesis.clone());
        outcomes.push(outcome);
    }
    Ok(BaggedEnsemble {
        hypotheses,
        outcomes,
        wall_time,
    })
}
