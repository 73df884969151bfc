use std::fs;
use std::path::Path;

use snapshot_ilp_harness::bundled::bundled_tasks;
use snapshot_ilp_harness::task::{BIAS_FILE, BK_FILE, EXAMPLES_FILE};
use snapshot_ilp_harness::{BenchConfig, Task};

fn tasks() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tasks")
}

#[test]
fn committed_tasks_match_the_generators() {
    let dir = tempfile::tempdir().unwrap();
    for t in bundled_tasks() {
        t.write(&dir.path().join(&t.name)).unwrap();
        for f in [BK_FILE, EXAMPLES_FILE, BIAS_FILE] {
            let fresh = fs::read_to_string(dir.path().join(&t.name).join(f)).unwrap();
            let committed = fs::read_to_string(tasks().join(&t.name).join(f)).unwrap();
            assert!(fresh == committed, "{}/{f} is stale; regenerate with `snapilp gen-tasks`", t.name);
        }
        assert_eq!(Task::load(&tasks().join(&t.name)).unwrap(), t);
    }
}

#[test]
fn bench_config_lists_every_task() {
    let cfg = BenchConfig::load(&tasks().join("bench.toml")).unwrap();
    let mut listed: Vec<String> = cfg
        .tasks
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    listed.sort();
    let names: Vec<String> = bundled_tasks().into_iter().map(|t| t.name).collect();
    assert_eq!(listed, names);
    assert!(cfg.tasks.iter().all(|p| p.is_dir()));
    assert_eq!(cfg.seeds, [0, 1, 2]);
    assert!(cfg.experiment.bagging.is_some());
}
