//! Experiment harness: stratified splits, the baseline / snapshot ensemble /
//! bagging comparison, statistics and reports, and the bundled tasks.

pub mod bundled;
pub mod config;
pub mod error;
pub mod report;
pub mod split;
pub mod stats;
pub mod task;

use std::path::PathBuf;

use snapshot_ilp::ensemble::{member_predictions, weighted_vote, ALPHA_GRID};
use snapshot_ilp::learner::WallClock;
use snapshot_ilp::{assign_weights, collect_pool, filter_pool, CostFunctionId, Learner};

pub use config::{BenchConfig, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use task::{run_task, run_task_with_pool, Task, TaskResult};

/// Runs every (task, cost function, seed) combination on `jobs` worker
/// threads. Results come back in a fixed order regardless of scheduling.
pub fn run_bench(tasks: &[Task], cfg: &BenchConfig, jobs: usize) -> Result<Vec<TaskResult>> {
    use rayon::prelude::*;
    let mut units = Vec::new();
    for t in tasks {
        for &f in &cfg.cost_fns {
            for &s in &cfg.seeds {
                units.push((t, f, s));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Usage(e.to_string()))?;
    let results: Vec<Result<TaskResult>> = pool.install(|| {
        units
            .par_iter()
            .map(|&(t, f, s)| {
                log::info!("running {} / {f} / seed {s}", t.name);
                run_task(t, f, &cfg.experiment, s)
            })
            .collect()
    });
    results.into_iter().collect()
}

pub fn load_tasks(dirs: &[PathBuf]) -> Result<Vec<Task>> {
    dirs.iter().map(|d| Task::load(d)).collect()
}

/// Validation accuracy of the snapshot ensemble for each `alpha` in the
/// grid, from a single pool collected on the training part.
pub fn sweep_alpha(
    task: &Task,
    cost: CostFunctionId,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let tag = |source| HarnessError::Task {
        task: task.name.clone(),
        source,
    };
    let split = split::split_examples(&task.examples, seed)?;
    let learner = Learner::new(&task.program, &split.train, &task.bias, cost, cfg.search_options()).map_err(tag)?;
    let stream = learner.stream().map_err(tag)?;
    let pool = collect_pool(stream, learner.scorer(), cfg.timeout(), &WallClock::start())
        .map_err(tag)?
        .pool;
    let pool = filter_pool(&pool, cfg.filter);
    let (atoms, labels) = task::labeled(&split.valid);
    let (votes, _) =
        member_predictions(learner.evaluator(), pool.snapshots().iter().map(|s| &s.hypothesis), &atoms)
            .map_err(tag)?;
    let mut out = Vec::new();
    for alpha in ALPHA_GRID {
        let ens = assign_weights(&pool, alpha, cfg.beta).map_err(tag)?;
        let preds: Vec<bool> = votes.iter().map(|v| weighted_vote(&ens.weights, v)).collect();
        out.push((alpha, task::accuracy(&preds, &labels)?));
    }
    Ok(out)
}
