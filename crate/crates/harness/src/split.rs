//! Stratified train/validation/test splits.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use snapshot_ilp::{ExampleSet, GroundAtom};

use crate::error::{HarnessError, Result};

/// Relative sizes of the train, validation and test parts.
pub const RATIO: [u64; 3] = [7, 2, 1];

#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub train: ExampleSet,
    pub valid: ExampleSet,
    pub test: ExampleSet,
    pub seed: u64,
}

/// Part sizes for `n` items by largest-remainder rounding of `RATIO`; ties
/// in the remainder go to the earlier part.
pub fn part_sizes(n: usize) -> [usize; 3] {
    let total: u64 = RATIO.iter().sum();
    let n = n as u64;
    let mut sizes = RATIO.map(|r| (n * r / total) as usize);
    let rem = RATIO.map(|r| n * r % total);
    let mut left = n as usize - sizes.iter().sum::<usize>();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| rem[b].cmp(&rem[a]).then(a.cmp(&b)));
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        sizes[i] += 1;
        left -= 1;
    }
    sizes
}

fn cut(mut atoms: Vec<GroundAtom>, rng: &mut ChaCha8Rng) -> [Vec<GroundAtom>; 3] {
    atoms.shuffle(rng);
    let [a, b, _] = part_sizes(atoms.len());
    let test = atoms.split_off(a + b);
    let valid = atoms.split_off(a);
    [atoms, valid, test]
}

/// Shuffles each polarity with ChaCha8 seeded by `seed` (positives first,
/// then negatives, from one generator) and cuts it 7:2:1.
pub fn split_examples(e: &ExampleSet, seed: u64) -> Result<Split> {
    for (name, n) in [("positive", e.pos.len()), ("negative", e.neg.len())] {
        if n > 0 && part_sizes(n)[2] == 0 {
            return Err(HarnessError::Data(format!(
                "{n} {name} examples are too few for a non-empty test part"
            )));
        }
    }
    if e.is_empty() {
        return Err(HarnessError::Data("no examples to split".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [ptr, pva, pte] = cut(e.pos.clone(), &mut rng);
    let [ntr, nva, nte] = cut(e.neg.clone(), &mut rng);
    Ok(Split {
        train: ExampleSet::new(ptr, ntr),
        valid: ExampleSet::new(pva, nva),
        test: ExampleSet::new(pte, nte),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn examples(pos: usize, neg: usize) -> ExampleSet {
        let mk = |i: usize| GroundAtom::new("t", &[&format!("c{i}")]);
        ExampleSet::new((0..pos).map(mk).collect(), (pos..pos + neg).map(mk).collect())
    }

    #[test]
    fn sizes() {
        assert_eq!(part_sizes(10), [7, 2, 1]);
        assert_eq!(part_sizes(20), [14, 4, 2]);
        assert_eq!(part_sizes(0), [0, 0, 0]);
        // 7.7, 2.2, 1.1 -> 7, 2, 1 plus one for the largest remainder (.7).
        assert_eq!(part_sizes(11), [8, 2, 1]);
        // 3.5, 1.0, 0.5: the tie at .5 goes to train.
        assert_eq!(part_sizes(5), [4, 1, 0]);
        for n in 0..200 {
            assert_eq!(part_sizes(n).iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn stratified_cut() {
        let s = split_examples(&examples(10, 10), 1).unwrap();
        assert_eq!((s.train.pos.len(), s.train.neg.len()), (7, 7));
        assert_eq!((s.valid.pos.len(), s.valid.neg.len()), (2, 2));
        assert_eq!((s.test.pos.len(), s.test.neg.len()), (1, 1));
        let s = split_examples(&examples(20, 10), 1).unwrap();
        assert_eq!((s.train.pos.len(), s.train.neg.len()), (14, 7));
        assert_eq!((s.valid.pos.len(), s.valid.neg.len()), (4, 2));
        assert_eq!((s.test.pos.len(), s.test.neg.len()), (2, 1));
    }

    #[test]
    fn deterministic_partition() {
        let e = examples(33, 47);
        for seed in 0..50 {
            let s = split_examples(&e, seed).unwrap();
            assert_eq!(s, split_examples(&e, seed).unwrap());
            let mut all: Vec<String> = [&s.train, &s.valid, &s.test]
                .iter()
                .flat_map(|p| p.pos.iter().chain(&p.neg).map(|a| a.to_string()))
                .collect();
            all.sort();
            let mut want: Vec<String> = e.pos.iter().chain(&e.neg).map(|a| a.to_string()).collect();
            want.sort();
            assert_eq!(all, want);
            for part in [&s.train, &s.valid, &s.test] {
                assert!(part.pos.iter().all(|a| e.pos.contains(a)));
                assert!(part.neg.iter().all(|a| e.neg.contains(a)));
            }
        }
        assert_ne!(split_examples(&e, 1).unwrap(), split_examples(&e, 2).unwrap());
    }

    #[test]
    fn too_few() {
        assert!(split_examples(&examples(5, 10), 0).is_err());
        assert!(split_examples(&examples(0, 0), 0).is_err());
        assert!(split_examples(&examples(10, 0), 0).is_ok());
    }
}
