//! An anytime inductive logic programming learner over function-free Datalog,
//! with single-run snapshot ensembles and a bagging baseline.
//!
//! ```
//! use std::time::Duration;
//! use snapshot_ilp::{parse_examples, parse_program, search, Bias, CostFunctionId, Predicate};
//!
//! let b = parse_program("parent(a,b). parent(b,c). parent(c,d).").unwrap();
//! let e = parse_examples("pos(gp(a,c)). pos(gp(b,d)). neg(gp(a,b)).").unwrap();
//! let bias = Bias::new(Predicate::new("gp", 2), vec![Predicate::new("parent", 2)], 1, 2, 3, false).unwrap();
//! let out = search(&b, &e, &bias, CostFunctionId::Mdl, Duration::from_secs(10)).unwrap();
//! assert_eq!(out.final_hypothesis.to_string(), "gp(A,B):-parent(A,C),parent(C,B).");
//! ```

pub mod bagging;
pub mod bias;
pub mod cost;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod learner;
pub mod logic;
pub mod parse;
pub mod symbol;

pub use bagging::{bootstrap_sample, run_bagging, run_bagging_with, BagConfig, BaggedEnsemble};
pub use bias::Bias;
pub use cost::{cost_key, coverage, mdl_score, CostFunctionId, CostKey};
pub use ensemble::{
    assign_weights, collect_pool, coverage_cost_ratio, filter_pool, PoolFilter, Snapshot, SnapshotPool,
    WeightedEnsemble,
};
pub use error::{Error, ParseError, Result};
pub use eval::{confusion, entails, least_model, ConfusionCounts, Evaluator};
pub use learner::{search, CandidateStream, Learner, SearchOptions, SearchOutcome};
pub use logic::{Atom, Clause, ExampleSet, GroundAtom, Hypothesis, Predicate, Program, Term};
pub use parse::{parse_examples, parse_hypothesis, parse_program};
pub use symbol::Sym;
