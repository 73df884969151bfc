//! Generators for the bundled desk-scale tasks.
//!
//! All generators are deterministic: each draws from ChaCha8 with a fixed
//! seed, so regenerating reproduces the committed task files exactly.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snapshot_ilp::{Bias, ExampleSet, GroundAtom, Predicate, Program};

use crate::task::Task;

pub const NOISY_INSTANCES: u64 = 10;

fn atom(p: &str, args: &[&str]) -> GroundAtom {
    GroundAtom::new(p, args)
}

/// A four-generation family; the target is `gp/2`.
pub fn kinship() -> Task {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b696e);
    let gen_sizes = [6, 12, 20, 28];
    let mut gens: Vec<Vec<String>> = Vec::new();
    let mut facts = Vec::new();
    let mut parent: Vec<(String, String)> = Vec::new();
    let mut next = 0;
    for (g, &n) in gen_sizes.iter().enumerate() {
        let people: Vec<String> = (0..n).map(|i| format!("p{:02}", next + i)).collect();
        next += n;
        for (i, p) in people.iter().enumerate() {
            // Alternate sexes so every generation can form couples.
            let sex = if i % 2 == 0 { "male" } else { "female" };
            facts.push(atom(sex, &[p]));
        }
        if g > 0 {
            let prev = &gens[g - 1];
            let couples: Vec<(&String, &String)> = prev.chunks(2).map(|c| (&c[0], &c[1])).collect();
            for child in &people {
                let (f, m) = couples[rng.gen_range(0..couples.len())];
                parent.push((f.clone(), child.clone()));
                parent.push((m.clone(), child.clone()));
            }
        }
        gens.push(people);
    }
    for (a, b) in &parent {
        facts.push(atom("parent", &[a, b]));
    }
    let mut gp: BTreeSet<(String, String)> = BTreeSet::new();
    for (a, b) in &parent {
        for (c, d) in &parent {
            if b == c {
                gp.insert((a.clone(), d.clone()));
            }
        }
    }
    let everyone: Vec<String> = gens.concat();
    let mut pos: Vec<(String, String)> = gp.iter().cloned().collect();
    pos.shuffle(&mut rng);
    pos.truncate(60);
    let mut neg = BTreeSet::new();
    while neg.len() < 60 {
        let a = everyone.choose(&mut rng).unwrap();
        let b = everyone.choose(&mut rng).unwrap();
        if a != b && !gp.contains(&(a.clone(), b.clone())) {
            neg.insert((a.clone(), b.clone()));
        }
    }
    let examples = ExampleSet::new(
        pos.iter().map(|(a, b)| atom("gp", &[a, b])).collect(),
        neg.iter().map(|(a, b)| atom("gp", &[a, b])).collect(),
    );
    let bias = Bias::new(
        Predicate::new("gp", 2),
        vec![Predicate::new("parent", 2), Predicate::new("male", 1), Predicate::new("female", 1)],
        2,
        2,
        3,
        false,
    )
    .expect("valid bias");
    Task {
        name: "kinship".into(),
        program: Program { facts, rules: Vec::new() },
        examples,
        bias,
    }
}

/// Reachability in a sparse random graph; the target `path/2` needs a
/// recursive clause.
pub fn path_reachability() -> Task {
    let mut rng = ChaCha8Rng::seed_from_u64(0x706174);
    let n = 30;
    let nodes: Vec<String> = (0..n).map(|i| format!("n{i:02}")).collect();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    while edges.len() < 34 {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.insert((a, b));
        }
    }
    let mut reach = vec![vec![false; n]; n];
    for &(a, b) in &edges {
        reach[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if reach[i][j] {
                pos.push((i, j));
            } else if i != j {
                neg.push((i, j));
            }
        }
    }
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    pos.truncate(60);
    neg.truncate(60);
    let name = |&(a, b): &(usize, usize)| atom("path", &[&nodes[a], &nodes[b]]);
    let facts = edges.iter().map(|&(a, b)| atom("edge", &[&nodes[a], &nodes[b]])).collect();
    let bias = Bias::new(
        Predicate::new("path", 2),
        vec![Predicate::new("edge", 2), Predicate::new("path", 2)],
        2,
        2,
        3,
        true,
    )
    .expect("valid bias");
    Task {
        name: "path".into(),
        program: Program { facts, rules: Vec::new() },
        examples: ExampleSet::new(pos.iter().map(name).collect(), neg.iter().map(name).collect()),
        bias,
    }
}

/// Shape of the noisy synthetic family.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyParams {
    pub objects: usize,
    pub features: usize,
    pub feature_density: f64,
    pub relations: usize,
    /// Expected out-degree of each relation.
    pub out_degree: f64,
    /// Fraction of negatives relabelled as positive.
    pub noise: f64,
}

impl Default for NoisyParams {
    fn default() -> Self {
        NoisyParams {
            objects: 1000,
            features: 8,
            feature_density: 0.5,
            relations: 1,
            out_degree: 1.0,
            noise: 0.2,
        }
    }
}

/// Instance `k` of the noisy family: objects with unary features and a sparse
/// binary relation, a target concept that is the conjunction of two features
/// picked by the instance seed, and a fraction of the negatives flipped to
/// positive.
pub fn noisy_task(k: u64, p: &NoisyParams) -> Task {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e6f6973 + k);
    let objs: Vec<String> = (0..p.objects).map(|i| format!("o{i:03}")).collect();
    let feat = |j: usize| format!("f{j}");
    let rel = |j: usize| format!("r{j}");
    let mut has = vec![vec![false; p.features]; p.objects];
    let mut facts = Vec::new();
    for (i, o) in objs.iter().enumerate() {
        for j in 0..p.features {
            if rng.gen_bool(p.feature_density) {
                has[i][j] = true;
                facts.push(atom(&feat(j), &[o]));
            }
        }
    }
    for j in 0..p.relations {
        let mut edges = HashSet::new();
        let target = (p.out_degree * p.objects as f64).round() as usize;
        while edges.len() < target {
            let a = rng.gen_range(0..p.objects);
            let b = rng.gen_range(0..p.objects);
            if a != b && edges.insert((a, b)) {
                facts.push(atom(&rel(j), &[&objs[a], &objs[b]]));
            }
        }
    }
    let mut pair: Vec<usize> = (0..p.features).collect();
    pair.shuffle(&mut rng);
    let (fa, fb) = (pair[0], pair[1]);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, o) in objs.iter().enumerate() {
        let a = atom("t", &[o]);
        if has[i][fa] && has[i][fb] {
            pos.push(a);
        } else {
            neg.push(a);
        }
    }
    neg.shuffle(&mut rng);
    let flipped = (p.noise * neg.len() as f64).round() as usize;
    pos.extend(neg.drain(..flipped));
    pos.sort();
    neg.sort();
    let body = (0..p.features)
        .map(|j| Predicate::new(&feat(j), 1))
        .chain((0..p.relations).map(|j| Predicate::new(&rel(j), 2)))
        .collect();
    let bias = Bias::new(Predicate::new("t", 1), body, 2, 2, 2, false).expect("valid bias");
    facts.sort();
    Task {
        name: format!("noisy_{k:02}"),
        program: Program { facts, rules: Vec::new() },
        examples: ExampleSet::new(pos, neg),
        bias,
    }
}

pub fn noisy_family() -> Vec<Task> {
    (0..NOISY_INSTANCES).map(|k| noisy_task(k, &NoisyParams::default())).collect()
}

/// Every bundled task, in name order.
pub fn bundled_tasks() -> Vec<Task> {
    let mut tasks = vec![kinship(), path_reachability()];
    tasks.extend(noisy_family());
    tasks.sort_by(|a, b| a.name.cmp(&b.name));
    tasks
}
