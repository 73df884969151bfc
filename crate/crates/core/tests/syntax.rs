mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use snapshot_ilp::{parse_hypothesis, parse_program, Clause, Hypothesis};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_is_a_fixpoint(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = common::random_program_text(&mut rng, 8);
        let p1 = parse_program(&text).unwrap();
        let printed = p1.to_string();
        let p2 = parse_program(&printed).unwrap();
        prop_assert_eq!(&p1, &p2);
        prop_assert_eq!(printed, p2.to_string());
    }

    #[test]
    fn canonical_form_ignores_renaming_and_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = parse_program(&common::random_program_text(&mut rng, 5)).unwrap();
        prop_assume!(!p.rules.is_empty());
        let h = Hypothesis::new(p.rules.clone());

        let fresh = ["P", "Q", "R", "S", "T"];
        let mut names: Vec<&str> = fresh.to_vec();
        names.shuffle(&mut rng);
        let mut renamed: Vec<Clause> = p.rules.iter().map(|c| {
            let mut text = c.to_string();
            for (old, new) in ["A", "B", "C", "D"].iter().zip(&names) {
                text = text.replace(&format!("({old}"), &format!("({new}"))
                    .replace(&format!(",{old}"), &format!(",{new}"));
            }
            let mut c = parse_hypothesis(&text).unwrap().clauses()[0].clone();
            c.body.shuffle(&mut rng);
            c
        }).collect();
        renamed.shuffle(&mut rng);
        let h2 = Hypothesis::new(renamed);
        prop_assert_eq!(h.canonical_form(), h2.canonical_form());
    }

    #[test]
    fn size_counts_printed_atoms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = parse_program(&common::random_program_text(&mut rng, 5)).unwrap();
        let h = Hypothesis::new(p.rules.clone());
        let printed = h.canonical_form();
        let atoms = printed.matches('(').count();
        prop_assert_eq!(h.size(), atoms);
        let reparsed = parse_hypothesis(printed).unwrap();
        prop_assert_eq!(reparsed.canonical_form(), printed);
    }
}
