//! Cost functions over confusion counts and hypothesis size.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::eval::ConfusionCounts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostFunctionId {
    Mdl,
    ErrorSize,
    Lexfnsize,
}

impl CostFunctionId {
    pub const ALL: [CostFunctionId; 3] = [
        CostFunctionId::Mdl,
        CostFunctionId::ErrorSize,
        CostFunctionId::Lexfnsize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostFunctionId::Mdl => "mdl",
            CostFunctionId::ErrorSize => "errorsize",
            CostFunctionId::Lexfnsize => "lexfnsize",
        }
    }
}

impl fmt::Display for CostFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CostFunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "mdl" => Ok(CostFunctionId::Mdl),
            "errorsize" => Ok(CostFunctionId::ErrorSize),
            "lexfnsize" => Ok(CostFunctionId::Lexfnsize),
            other => Err(Error::InvalidArgument(format!(
                "unknown cost function {other:?} (expected mdl, errorsize or lexfnsize)"
            ))),
        }
    }
}

/// A cost tuple compared lexicographically, tagged with the function that
/// produced it. Keys from different functions are unordered.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CostKey {
    func: CostFunctionId,
    parts: Vec<u64>,
}

impl CostKey {
    pub fn new(func: CostFunctionId, parts: Vec<u64>) -> Result<Self, Error> {
        let want = match func {
            CostFunctionId::Mdl => 1,
            CostFunctionId::ErrorSize => 2,
            CostFunctionId::Lexfnsize => 3,
        };
        if parts.len() != want {
            return Err(Error::InvalidArgument(format!(
                "{func} keys have {want} components, got {}",
                parts.len()
            )));
        }
        Ok(CostKey { func, parts })
    }

    pub fn func(&self) -> CostFunctionId {
        self.func
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }
}

impl PartialOrd for CostKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.func == other.func).then(|| self.parts.cmp(&other.parts))
    }
}

impl fmt::Display for CostKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u64::to_string).collect();
        write!(f, "{}({})", self.func, parts.join(","))
    }
}

impl FromStr for CostKey {
    type Err = Error;

    /// Parses the printed form, e.g. `lexfnsize(0,2,5)`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidArgument(format!("malformed cost key {s:?}"));
        let (name, rest) = s.trim().split_once('(').ok_or_else(bad)?;
        let inner = rest.strip_suffix(')').ok_or_else(bad)?;
        let parts = inner
            .split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        CostKey::new(name.parse()?, parts)
    }
}

/// `fp + fn + size`.
pub fn mdl_score(c: &ConfusionCounts, size: usize) -> u64 {
    (c.fp + c.fn_ + size) as u64
}

pub fn cost_key(func: CostFunctionId, c: &ConfusionCounts, size: usize) -> CostKey {
    let (fp, fn_, size) = (c.fp as u64, c.fn_ as u64, size as u64);
    let parts = match func {
        CostFunctionId::Mdl => vec![fp + fn_ + size],
        CostFunctionId::ErrorSize => vec![fp + fn_, size],
        CostFunctionId::Lexfnsize => vec![fn_, fp, size],
    };
    CostKey { func, parts }
}

/// Fraction of examples classified correctly, `(tp + tn) / total`.
pub fn coverage(c: &ConfusionCounts) -> Result<f64, Error> {
    let total = c.total();
    if total == 0 {
        return Err(Error::EmptyExamples);
    }
    Ok((c.tp + c.tn) as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cc(tp: usize, tn: usize, fp: usize, fn_: usize) -> ConfusionCounts {
        ConfusionCounts::new(tp, tn, fp, fn_)
    }

    #[test]
    fn mdl_examples() {
        assert_eq!(mdl_score(&cc(0, 0, 2, 1), 4), 7);
        assert_eq!(mdl_score(&cc(0, 0, 0, 0), 0), 0);
        assert_eq!(mdl_score(&cc(1, 1, 0, 0), 3), 3);
    }

    #[test]
    fn key_shapes() {
        let es = cost_key(CostFunctionId::ErrorSize, &cc(0, 0, 1, 1), 5);
        assert_eq!(es.parts(), &[2, 5]);
        let m = cost_key(CostFunctionId::Mdl, &cc(0, 0, 2, 1), 4);
        assert_eq!(m.parts(), &[7]);
        let small = cost_key(CostFunctionId::Lexfnsize, &cc(0, 0, 2, 0), 5);
        let large = cost_key(CostFunctionId::Lexfnsize, &cc(0, 0, 0, 1), 1);
        assert!(small < large);
    }

    #[test]
    fn keys_from_different_functions_are_unordered() {
        let a = cost_key(CostFunctionId::Mdl, &cc(0, 0, 0, 0), 2);
        let b = cost_key(CostFunctionId::ErrorSize, &cc(0, 0, 0, 0), 2);
        assert_eq!(a.partial_cmp(&b), None);
        assert_ne!(a, b);
    }

    #[test]
    fn key_text_round_trip() {
        let k = cost_key(CostFunctionId::Lexfnsize, &cc(3, 4, 2, 1), 6);
        assert_eq!(k.to_string(), "lexfnsize(1,2,6)");
        assert_eq!(k.to_string().parse::<CostKey>().unwrap(), k);
        assert!("mdl(1,2)".parse::<CostKey>().is_err());
        assert!("nope(1)".parse::<CostKey>().is_err());
    }

    #[test]
    fn coverage_examples() {
        assert!((coverage(&cc(3, 5, 1, 1)).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(coverage(&cc(0, 0, 2, 3)).unwrap(), 0.0);
        assert_eq!(coverage(&cc(1, 1, 0, 0)).unwrap(), 1.0);
        assert!(matches!(coverage(&cc(0, 0, 0, 0)), Err(Error::EmptyExamples)));
    }

    proptest! {
        #[test]
        fn keys_are_monotone_in_errors(
            tp in 0usize..50, tn in 0usize..50, fp in 0usize..50, fn_ in 0usize..50,
            size in 0usize..20, bump in 1usize..10,
        ) {
            for f in CostFunctionId::ALL {
                let base = cost_key(f, &cc(tp, tn, fp, fn_), size);
                let more_fp = cost_key(f, &cc(tp, tn, fp + bump, fn_), size);
                let more_fn = cost_key(f, &cc(tp, tn, fp, fn_ + bump), size);
                prop_assert!(base <= more_fp);
                prop_assert!(base <= more_fn);
            }
            let m = cost_key(CostFunctionId::Mdl, &cc(tp, tn, fp, fn_), size);
            prop_assert_eq!(m.parts(), &[mdl_score(&cc(tp, tn, fp, fn_), size)]);
        }

        #[test]
        fn lexfnsize_prioritises_false_negatives(
            fn_a in 0usize..20, extra in 1usize..20,
            fp_a in 0usize..1000, fp_b in 0usize..1000,
            size_a in 0usize..1000, size_b in 0usize..1000,
        ) {
            let a = cost_key(CostFunctionId::Lexfnsize, &cc(0, 0, fp_a, fn_a), size_a);
            let b = cost_key(CostFunctionId::Lexfnsize, &cc(0, 0, fp_b, fn_a + extra), size_b);
            prop_assert!(a < b);
        }
    }
}
