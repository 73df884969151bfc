use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use snapshot_ilp::learner::WallClock;
use snapshot_ilp::{collect_pool, run_bagging_with, CostFunctionId, Learner, PoolFilter};
use snapshot_ilp_harness::config::BaggingConfig;
use snapshot_ilp_harness::report::{self, ReportFormat};
use snapshot_ilp_harness::split::split_examples;
use snapshot_ilp_harness::task::{accuracy, labeled};
use snapshot_ilp_harness::{bundled, load_tasks, run_bench, sweep_alpha, BenchConfig, ExperimentConfig, HarnessError, Result, Task};

#[derive(Parser, Debug)]
#[command(name = "snapilp", version, about = "Snapshot ensembles for an anytime ILP learner")]
struct Cli {
    /// Split seed (first trial seed for `bench` without a config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Search timeout in seconds.
    #[arg(long, global = true)]
    timeout: Option<f64>,
    /// Worker threads for `bench`.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file, or output directory for `bench` and `gen-tasks`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Weighting {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    filter: Option<PoolFilter>,
    /// Enumerate every candidate, including provably useless ones.
    #[arg(long)]
    no_prune: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Search a task on its training split and print the pool and the final hypothesis.
    Learn {
        task: PathBuf,
        #[arg(long, default_value = "mdl")]
        cost: CostFunctionId,
        #[arg(long)]
        no_prune: bool,
    },
    /// Baseline versus snapshot ensemble on one task.
    Ensemble {
        task: PathBuf,
        #[arg(long, default_value = "mdl")]
        cost: CostFunctionId,
        #[command(flatten)]
        weighting: Weighting,
    },
    /// Bootstrap aggregation on one task.
    Bag {
        task: PathBuf,
        #[arg(long, default_value = "mdl")]
        cost: CostFunctionId,
        #[arg(long)]
        bags: Option<usize>,
        /// Comma-separated bootstrap seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
    },
    /// Every task, cost function and trial; writes results.csv, results.json and timings.csv.
    Bench {
        /// Benchmark config (TOML). Task directories may be given instead.
        #[arg(long)]
        config: Option<PathBuf>,
        tasks: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        cost: Vec<CostFunctionId>,
        #[arg(long, default_value_t = 3)]
        trials: u64,
        #[arg(long)]
        no_bagging: bool,
    },
    /// Validation accuracy over the alpha grid, averaged across tasks.
    SweepAlpha {
        tasks: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        cost: Vec<CostFunctionId>,
    },
    /// Summary statistics for a results file (CSV or JSON).
    Report { results: PathBuf },
    /// Write the bundled tasks as task directories.
    GenTasks,
}

fn experiment(cli: &Cli, w: Option<&Weighting>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    if let Some(t) = cli.timeout {
        cfg.timeout_s = t;
    }
    if let Some(w) = w {
        if let Some(a) = w.alpha {
            cfg.alpha = a;
        }
        if let Some(b) = w.beta {
            cfg.beta = b;
        }
        if let Some(f) = w.filter {
            cfg.filter = f;
        }
        cfg.prune = !w.no_prune;
    }
    cfg
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| HarnessError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    let p = dir.join(name);
    fs::write(&p, text).map_err(|e| HarnessError::io(p, e))
}

fn learn(cli: &Cli, dir: &Path, cost: CostFunctionId, no_prune: bool) -> Result<()> {
    let mut cfg = experiment(cli, None);
    cfg.prune = !no_prune;
    cfg.validate()?;
    let task = Task::load(dir)?;
    let tag = |source| HarnessError::Task {
        task: task.name.clone(),
        source,
    };
    let split = split_examples(&task.examples, cli.seed.unwrap_or(0))?;
    let learner = Learner::new(&task.program, &split.train, &task.bias, cost, cfg.search_options()).map_err(tag)?;
    let stream = learner.stream().map_err(tag)?;
    let c = collect_pool(stream, learner.scorer(), cfg.timeout(), &WallClock::start()).map_err(tag)?;
    let base = c.pool.baseline();
    eprintln!(
        "{} candidates{}, {} snapshots, final cost {}",
        c.candidates_evaluated,
        if c.exhausted { " (exhausted)" } else { "" },
        c.pool.len(),
        base.cost
    );
    eprintln!("{}", base.hypothesis);
    emit(&cli.out, &c.pool.to_text())
}

fn ensemble(cli: &Cli, dir: &Path, cost: CostFunctionId, w: &Weighting) -> Result<()> {
    let mut cfg = experiment(cli, Some(w));
    cfg.bagging = None;
    let task = Task::load(dir)?;
    let r = snapshot_ilp_harness::run_task(&task, cost, &cfg, cli.seed.unwrap_or(0))?;
    emit(&cli.out, &report::render(&[r], ReportFormat::Csv)?)
}

fn bag(cli: &Cli, dir: &Path, cost: CostFunctionId, bags: Option<usize>, seeds: &[u64]) -> Result<()> {
    let mut cfg = experiment(cli, None);
    let mut seeds = if seeds.is_empty() {
        BaggingConfig::default().seeds
    } else {
        seeds.to_vec()
    };
    if let Some(n) = bags {
        if n == 0 {
            return Err(HarnessError::Usage("--bags must be at least 1".into()));
        }
        let last = *seeds.last().expect("at least one seed");
        while seeds.len() < n {
            seeds.push(last + (seeds.len() as u64));
        }
        seeds.truncate(n);
    }
    cfg.bagging = Some(BaggingConfig { seeds });
    cfg.validate()?;
    let bag_cfg = cfg.bag_config().expect("bagging configured")?;
    let task = Task::load(dir)?;
    let tag = |source| HarnessError::Task {
        task: task.name.clone(),
        source,
    };
    let split = split_examples(&task.examples, cli.seed.unwrap_or(0))?;
    let bagged = run_bagging_with(&task.program, &split.train, &task.bias, cost, &bag_cfg, cfg.search_options())
        .map_err(tag)?;
    let learner = Learner::new(&task.program, &split.train, &task.bias, cost, cfg.search_options()).map_err(tag)?;
    let (atoms, labels) = labeled(&split.test);
    let preds = bagged.predict_many(learner.evaluator(), &atoms).map_err(tag)?;
    let mut text = String::new();
    for (seed, h) in bag_cfg.seeds.iter().zip(&bagged.hypotheses) {
        text.push_str(&format!("# bag seed {seed}\n{h}\n"));
    }
    text.push_str(&format!("# test accuracy {:.6}\n", accuracy(&preds, &labels)?));
    emit(&cli.out, &text)
}

fn bench(
    cli: &Cli,
    config: Option<&Path>,
    dirs: &[PathBuf],
    cost: &[CostFunctionId],
    trials: u64,
    no_bagging: bool,
) -> Result<()> {
    let mut cfg = match config {
        Some(p) => BenchConfig::load(p)?,
        None => {
            if dirs.is_empty() {
                return Err(HarnessError::Usage("bench needs --config or task directories".into()));
            }
            let start = cli.seed.unwrap_or(0);
            BenchConfig {
                tasks: dirs.to_vec(),
                cost_fns: CostFunctionId::ALL.to_vec(),
                seeds: (start..start + trials).collect(),
                experiment: ExperimentConfig::default(),
            }
        }
    };
    if config.is_some() && !dirs.is_empty() {
        cfg.tasks = dirs.to_vec();
    }
    if !cost.is_empty() {
        cfg.cost_fns = cost.to_vec();
    }
    if let Some(t) = cli.timeout {
        cfg.experiment.timeout_s = t;
    }
    if no_bagging {
        cfg.experiment.bagging = None;
    }
    cfg.experiment.validate()?;
    let tasks = load_tasks(&cfg.tasks)?;
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let results = run_bench(&tasks, &cfg, jobs)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    fs::create_dir_all(&out).map_err(|e| HarnessError::io(&out, e))?;
    write_file(&out, "results.csv", &report::render(&results, ReportFormat::Csv)?)?;
    write_file(&out, "results.json", &report::render(&results, ReportFormat::Json)?)?;
    write_file(&out, "timings.csv", &report::timings_csv(&results)?)?;
    print!("{}", report::summary_table(&report::rows(&results))?);
    Ok(())
}

fn sweep(cli: &Cli, dirs: &[PathBuf], cost: &[CostFunctionId]) -> Result<()> {
    if dirs.is_empty() {
        return Err(HarnessError::Usage("sweep-alpha needs at least one task directory".into()));
    }
    let cfg = experiment(cli, None);
    cfg.validate()?;
    let costs = if cost.is_empty() { CostFunctionId::ALL.to_vec() } else { cost.to_vec() };
    let tasks = load_tasks(dirs)?;
    let seed = cli.seed.unwrap_or(0);
    let mut sums: Vec<(f64, f64)> = Vec::new();
    let mut n = 0usize;
    for t in &tasks {
        for &f in &costs {
            let accs = sweep_alpha(t, f, &cfg, seed)?;
            if sums.is_empty() {
                sums = accs.iter().map(|&(a, _)| (a, 0.0)).collect();
            }
            for (s, (_, acc)) in sums.iter_mut().zip(accs) {
                s.1 += acc;
            }
            n += 1;
        }
    }
    let mut text = String::from("alpha\tmean_valid_accuracy\n");
    for (a, s) in &sums {
        text.push_str(&format!("{a}\t{:.6}\n", s / n as f64));
    }
    emit(&cli.out, &text)
}

fn report_cmd(cli: &Cli, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let rows = if path.extension().is_some_and(|e| e == "json") {
        report::parse_json(&text)?
    } else {
        report::parse_csv(&text)?
    };
    if rows.is_empty() {
        return Err(HarnessError::Data(format!("{}: no result rows", path.display())));
    }
    emit(&cli.out, &report::summary_table(&rows)?)
}

fn gen_tasks(cli: &Cli) -> Result<()> {
    let out = cli
        .out
        .clone()
        .ok_or_else(|| HarnessError::Usage("gen-tasks needs --out".into()))?;
    for t in bundled::bundled_tasks() {
        t.write(&out.join(&t.name))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Learn { task, cost, no_prune } => learn(cli, task, *cost, *no_prune),
        Cmd::Ensemble { task, cost, weighting } => ensemble(cli, task, *cost, weighting),
        Cmd::Bag { task, cost, bags, seeds } => bag(cli, task, *cost, *bags, seeds),
        Cmd::Bench {
            config,
            tasks,
            cost,
            trials,
            no_bagging,
        } => bench(cli, config.as_deref(), tasks, cost, *trials, *no_bagging),
        Cmd::SweepAlpha { tasks, cost } => sweep(cli, tasks, cost),
        Cmd::Report { results } => report_cmd(cli, results),
        Cmd::GenTasks => gen_tasks(cli),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
