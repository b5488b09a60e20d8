//! Fixed-confidence clustering and distribution matching with bandit feedback
//! over finite alphabets.
//!
//! The learner samples `K` unknown categorical arms one pull at a time and
//! must name which hypothesis (a set of disjoint clusters of identical arms)
//! the instance satisfies, with error probability at most `δ`. The crate
//! provides the Track-and-Stop learner with Frank–Wolfe sampling, a uniform
//! baseline, the hardness oracle `T*(P)`, the converse bound, and a sweep
//! harness that writes CSV.

pub mod divergence;
pub mod error;
pub mod experiment;
pub mod fw;
pub mod game;
pub mod model;
pub mod sampling;
pub mod score;
pub mod sim;
pub mod stopping;

pub use error::{Error, Result};
pub use fw::{lower_bound, solve_oracle, OracleOptions, OracleResult};
pub use model::{
    gen_matching_pairs, gen_nary_partition, gen_odd_arm, instance_hypothesis, make_hypothesis,
    Categorical, ClusteringProblem, Hypothesis, ProblemInstance, ProblemKind,
};
pub use sim::{run_episode, Algorithm, EpisodeResult};
