//! The published example instances.

use crate::model::{gen_matching_pairs, gen_nary_partition, gen_odd_arm, ClusteringProblem, ProblemInstance};

fn build(rows: Vec<Vec<f64>>) -> ProblemInstance {
    ProblemInstance::from_rows(rows).expect("built-in instance is valid")
}

/// Matching pairs, `K = 6`, two pairs, ternary alphabet. True clusters are
/// `{0,2}` and `{1,3}`; arms 4 and 5 are unconstrained.
pub fn matching_pairs_x3() -> ProblemInstance {
    let a = vec![0.1, 0.1, 0.8];
    let b = vec![0.4, 0.4, 0.2];
    build(vec![
        a.clone(),
        b.clone(),
        a,
        b,
        vec![0.5, 0.05, 0.45],
        vec![0.1, 0.8, 0.1],
    ])
}

/// Same structure as [`matching_pairs_x3`] over five symbols.
pub fn matching_pairs_x5() -> ProblemInstance {
    let a = vec![0.1, 0.1, 0.6, 0.1, 0.1];
    let b = vec![0.2; 5];
    build(vec![
        a.clone(),
        b.clone(),
        a,
        b,
        vec![0.4, 0.05, 0.1, 0.05, 0.4],
        vec![0.1, 0.6, 0.1, 0.1, 0.1],
    ])
}

pub fn matching_pairs_problem() -> ClusteringProblem {
    gen_matching_pairs(6, 2).expect("valid sizes")
}

/// Odd arm, `K = 7`: six identical arms and one outlier (arm 6).
pub fn odd_arm_k7() -> ProblemInstance {
    let mut rows = vec![vec![0.1, 0.1, 0.8]; 6];
    rows.push(vec![0.6, 0.2, 0.2]);
    build(rows)
}

pub fn odd_arm_problem() -> ClusteringProblem {
    gen_odd_arm(7).expect("valid size")
}

/// Three pairs of identical arms, `K = 6`.
pub fn nary_k6() -> ProblemInstance {
    let a = vec![0.6, 0.2, 0.2];
    let b = vec![0.25, 0.7, 0.05];
    let c = vec![0.05, 0.05, 0.9];
    build(vec![a.clone(), a, b.clone(), b, c.clone(), c])
}

pub fn nary_problem() -> ClusteringProblem {
    gen_nary_partition(6, 3).expect("valid sizes")
}

/// Every published instance with its problem and a short label.
pub fn all() -> Vec<(&'static str, ClusteringProblem, ProblemInstance)> {
    vec![
        ("matching-pairs-x3", matching_pairs_problem(), matching_pairs_x3()),
        ("matching-pairs-x5", matching_pairs_problem(), matching_pairs_x5()),
        ("odd-arm-k7", odd_arm_problem(), odd_arm_k7()),
        ("nary-k6", nary_problem(), nary_k6()),
    ]
}
