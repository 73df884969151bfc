//! Learning tasks on disk and the three-strategy experiment run.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;
use snapshot_ilp::bagging::run_bagging_with;
use snapshot_ilp::ensemble::member_predictions;
use snapshot_ilp::learner::WallClock;
use snapshot_ilp::{
    assign_weights, collect_pool, filter_pool, parse_examples, parse_program, Bias, CostFunctionId, ExampleSet,
    GroundAtom, Learner, Program, SnapshotPool,
};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::split::split_examples;

pub const BK_FILE: &str = "bk.pl";
pub const EXAMPLES_FILE: &str = "exs.pl";
pub const BIAS_FILE: &str = "bias.toml";

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub name: String,
    pub program: Program,
    pub examples: ExampleSet,
    pub bias: Bias,
}

impl Task {
    /// Loads `bk.pl`, `exs.pl` and `bias.toml` from `dir`; the task is named
    /// after the directory.
    pub fn load(dir: &Path) -> Result<Self> {
        let read = |f: &str| {
            let p = dir.join(f);
            fs::read_to_string(&p).map_err(|e| HarnessError::io(p, e))
        };
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        let data_err = |f: &str, e: snapshot_ilp::ParseError| HarnessError::Data(format!("{name}/{f}: {e}"));
        let program = parse_program(&read(BK_FILE)?).map_err(|e| data_err(BK_FILE, e))?;
        let examples = parse_examples(&read(EXAMPLES_FILE)?).map_err(|e| data_err(EXAMPLES_FILE, e))?;
        let bias = Bias::parse(&read(BIAS_FILE)?).map_err(|e| data_err(BIAS_FILE, e))?;
        if let Some(t) = examples.target() {
            if t != bias.target {
                return Err(HarnessError::Data(format!(
                    "{name}: examples are for {t} but the bias targets {}",
                    bias.target
                )));
            }
        }
        Ok(Task {
            name,
            program,
            examples,
            bias,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        for (f, text) in [
            (BK_FILE, self.program.to_string()),
            (EXAMPLES_FILE, self.examples.to_string()),
            (BIAS_FILE, self.bias.to_toml_string()),
        ] {
            let p = dir.join(f);
            fs::write(&p, text).map_err(|e| HarnessError::io(p, e))?;
        }
        Ok(())
    }
}

/// Wall-clock time per phase. Phase 1 is pool collection (including the
/// background model), phase 2 weighting, phase 3 ensemble prediction.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub phase1: Duration,
    pub phase2: Duration,
    pub phase3: Duration,
    pub bagging: Option<Duration>,
    pub total: Duration,
}

impl Timings {
    /// `100 * (t2 + t3) / t1` from wall-clock times.
    pub fn overhead_pct(&self) -> f64 {
        100.0 * (self.phase2 + self.phase3).as_secs_f64() / self.phase1.as_secs_f64()
    }

    /// Phases 1 to 3: the snapshot pipeline without bagging.
    pub fn pipeline(&self) -> Duration {
        self.phase1 + self.phase2 + self.phase3
    }
}

/// Deterministic effort per phase: tuples visited during evaluation plus one
/// unit per example lookup, and one unit per weighted snapshot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PhaseWork {
    pub phase1: u64,
    pub phase2: u64,
    pub phase3: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskResult {
    pub task: String,
    pub cost_fn: CostFunctionId,
    pub seed: u64,
    pub acc_base: f64,
    pub acc_snap: f64,
    pub acc_bag: Option<f64>,
    pub acc_test_opt: f64,
    pub acc_test_worst: f64,
    pub overfit_gap: f64,
    pub snap_improvement: f64,
    /// `100 * (work2 + work3) / work1`, a deterministic stand-in for the
    /// wall-clock ratio in [`Timings::overhead_pct`].
    pub overhead_pct: f64,
    pub baseline: String,
    pub pool_size: usize,
    pub candidates: usize,
    pub exhausted: bool,
    pub work: PhaseWork,
    pub timings: Timings,
}

/// Fraction of positions where prediction and label agree.
pub fn accuracy(predictions: &[bool], labels: &[bool]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(HarnessError::Data(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(HarnessError::Data("accuracy of an empty set".into()));
    }
    let hits = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Atoms and labels, positives first.
pub fn labeled(e: &ExampleSet) -> (Vec<GroundAtom>, Vec<bool>) {
    e.labeled().map(|(a, l)| (a.clone(), l)).unzip()
}

/// Splits `task` by `seed`, then on the test part compares the single-run
/// baseline, the snapshot ensemble and (if configured) bagging.
pub fn run_task(task: &Task, cost: CostFunctionId, cfg: &ExperimentConfig, seed: u64) -> Result<TaskResult> {
    run_task_with_pool(task, cost, cfg, seed).map(|(r, _)| r)
}

/// [`run_task`], also returning the full snapshot pool.
pub fn run_task_with_pool(
    task: &Task,
    cost: CostFunctionId,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<(TaskResult, SnapshotPool)> {
    cfg.validate()?;
    let tag = |source: snapshot_ilp::Error| HarnessError::Task {
        task: task.name.clone(),
        source,
    };
    let started = Instant::now();
    let split = split_examples(&task.examples, seed)?;
    let (atoms, labels) = labeled(&split.test);

    let t = Instant::now();
    let learner = Learner::new(&task.program, &split.train, &task.bias, cost, cfg.search_options()).map_err(tag)?;
    let stream = learner.stream().map_err(tag)?;
    let collection = collect_pool(stream, learner.scorer(), cfg.timeout(), &WallClock::start()).map_err(tag)?;
    let phase1 = t.elapsed();
    if !collection.exhausted {
        log::warn!("{}: search timed out before exhausting the space", task.name);
    }

    let t = Instant::now();
    let members = filter_pool(&collection.pool, cfg.filter);
    let ensemble = assign_weights(&members, cfg.alpha, cfg.beta).map_err(tag)?;
    let phase2 = t.elapsed();

    let evaluator = learner.evaluator();
    let t = Instant::now();
    let (snap_preds, work3) = ensemble.predict_many_with_work(evaluator, &atoms).map_err(tag)?;
    let phase3 = t.elapsed();

    // Per-snapshot test predictions over the full pool, outside the timed phases.
    let pool = &collection.pool;
    let (votes, _) =
        member_predictions(evaluator, pool.snapshots().iter().map(|s| &s.hypothesis), &atoms).map_err(tag)?;
    let mut member_acc = Vec::with_capacity(pool.len());
    for j in 0..pool.len() {
        let preds: Vec<bool> = votes.iter().map(|row| row[j]).collect();
        member_acc.push(accuracy(&preds, &labels)?);
    }
    let base_ix = pool
        .snapshots()
        .iter()
        .position(|s| s.hypothesis == pool.baseline().hypothesis)
        .expect("baseline is a pool member");
    let acc_base = member_acc[base_ix];
    let acc_snap = accuracy(&snap_preds, &labels)?;
    let acc_test_opt = member_acc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let acc_test_worst = member_acc.iter().copied().fold(f64::INFINITY, f64::min);

    let (acc_bag, bag_time) = match cfg.bag_config() {
        None => (None, None),
        Some(bag_cfg) => {
            let bag_cfg = bag_cfg?;
            let t = Instant::now();
            let bagged =
                run_bagging_with(&task.program, &split.train, &task.bias, cost, &bag_cfg, cfg.search_options())
                    .map_err(tag)?;
            let preds = bagged.predict_many(evaluator, &atoms).map_err(tag)?;
            let elapsed = t.elapsed();
            (Some(accuracy(&preds, &labels)?), Some(elapsed))
        }
    };

    let work = PhaseWork {
        phase1: collection.work + evaluator.background_work(),
        phase2: members.len() as u64,
        phase3: work3,
    };
    let result = TaskResult {
        task: task.name.clone(),
        cost_fn: cost,
        seed,
        acc_base,
        acc_snap,
        acc_bag,
        acc_test_opt,
        acc_test_worst,
        overfit_gap: acc_test_opt - acc_base,
        snap_improvement: acc_snap - acc_base,
        overhead_pct: 100.0 * (work.phase2 + work.phase3) as f64 / work.phase1.max(1) as f64,
        baseline: pool.baseline().hypothesis.to_string(),
        pool_size: pool.len(),
        candidates: collection.candidates_evaluated,
        exhausted: collection.exhausted,
        work,
        timings: Timings {
            phase1,
            phase2,
            phase3,
            bagging: bag_time,
            total: started.elapsed(),
        },
    };
    Ok((result, collection.pool))
}
