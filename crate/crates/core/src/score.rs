//! Hypothesis scores `g_P^σ(w)`, the alternative margin `G_P^σ(w)`, their
//! gradients, the current best estimate and the stopping statistic.
//!
//! All functions take arm pmfs as any `AsRef<[f64]>` so they work equally on
//! a true [`ProblemInstance`] and on empirical pmfs.

use crate::divergence::{kl_slices, mixture_into};
use crate::error::{Error, Result};
use crate::model::{ClusteringProblem, Hypothesis, ProblemInstance};

/// `G` of one cluster: weighted KL dispersion of its members around their
/// weighted mixture. `mix` is scratch space of alphabet length.
fn cluster_g<P: AsRef<[f64]>>(arms: &[P], w: &[f64], members: &[usize], mix: &mut [f64]) -> f64 {
    let total: f64 = members.iter().map(|&i| w[i]).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut weighted = members.iter().filter(|&&i| w[i] > 0.0).map(|&i| arms[i].as_ref());
    let first = weighted.next().expect("positive total weight");
    if weighted.all(|p| p == first) {
        return 0.0;
    }
    mix.iter_mut().for_each(|m| *m = 0.0);
    for &i in members {
        if w[i] > 0.0 {
            for (m, &pa) in mix.iter_mut().zip(arms[i].as_ref()) {
                *m += w[i] * pa;
            }
        }
    }
    mix.iter_mut().for_each(|m| *m /= total);
    members
        .iter()
        .filter(|&&i| w[i] > 0.0)
        .map(|&i| w[i] * kl_slices(arms[i].as_ref(), mix))
        .sum()
}

/// `g_P^σ(w)`: sum of cluster dispersions. Unconstrained arms contribute
/// nothing, and zero-weight arms drop out of their cluster's mixture.
pub fn hypothesis_score<P: AsRef<[f64]>>(arms: &[P], w: &[f64], h: &Hypothesis) -> f64 {
    let mut mix = vec![0.0; arms[0].as_ref().len()];
    score_with_buffer(arms, w, h, &mut mix)
}

fn score_with_buffer<P: AsRef<[f64]>>(arms: &[P], w: &[f64], h: &Hypothesis, mix: &mut [f64]) -> f64 {
    h.clusters().iter().map(|c| cluster_g(arms, w, c, mix)).sum()
}

/// Gradient of `g_P^σ` in `w`: entry `i` is `D(P_i || W_m)` for `i` in
/// cluster `m`, zero for unconstrained arms.
///
/// Defined for `w` positive on every clustered arm. A cluster whose weights
/// are all zero has no mixture and contributes zeros; a zero-weight member of
/// a weighted cluster gets its divergence to the mixture of the others.
pub fn grad_g<P: AsRef<[f64]>>(arms: &[P], w: &[f64], h: &Hypothesis) -> Vec<f64> {
    let mut grad = vec![0.0; w.len()];
    let mut mix = vec![0.0; arms[0].as_ref().len()];
    for c in h.clusters() {
        let ps: Vec<&[f64]> = c.iter().map(|&i| arms[i].as_ref()).collect();
        let ws: Vec<f64> = c.iter().map(|&i| w[i]).collect();
        if mixture_into(&ps, &ws, &mut mix) <= 0.0 {
            continue;
        }
        for &i in c {
            grad[i] = kl_slices(arms[i].as_ref(), &mix);
        }
    }
    grad
}

/// All hypothesis scores at one `(P, w)`, with the smallest and runner-up.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreBoard {
    scores: Vec<f64>,
    best: usize,
    runner_up: Option<usize>,
}

impl ScoreBoard {
    pub fn compute<P: AsRef<[f64]>>(arms: &[P], w: &[f64], problem: &ClusteringProblem) -> Self {
        let mut mix = vec![0.0; arms[0].as_ref().len()];
        let scores: Vec<f64> = problem
            .hypotheses()
            .iter()
            .map(|h| score_with_buffer(arms, w, h, &mut mix))
            .collect();
        let best = argmin_excluding(&scores, None).expect("problem has a hypothesis");
        let runner_up = argmin_excluding(&scores, Some(best));
        Self {
            scores,
            best,
            runner_up,
        }
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Index of the smallest score (lowest index on ties).
    pub fn best(&self) -> usize {
        self.best
    }

    pub fn best_score(&self) -> f64 {
        self.scores[self.best]
    }

    /// Index of the smallest score other than [`Self::best`].
    pub fn runner_up(&self) -> Option<usize> {
        self.runner_up
    }

    /// The second-smallest score, or `None` for a single-hypothesis problem.
    pub fn second_score(&self) -> Option<f64> {
        self.runner_up.map(|i| self.scores[i])
    }

    /// `G^σ`: smallest score over hypotheses other than `sigma`.
    pub fn margin(&self, sigma: usize) -> Option<(f64, usize)> {
        argmin_excluding(&self.scores, Some(sigma)).map(|i| (self.scores[i], i))
    }
}

fn argmin_excluding(scores: &[f64], skip: Option<usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        match best {
            Some(b) if scores[b] <= s => {}
            _ => best = Some(i),
        }
    }
    best
}

/// `G_P^σ(w)` together with the minimising alternative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternativeScore {
    pub value: f64,
    pub hypothesis: usize,
}

/// `G_P^σ(w) = min_{σ' != σ} g_P^{σ'}(w)`, ties resolved to the canonically
/// smallest alternative.
pub fn alternative_score<P: AsRef<[f64]>>(
    arms: &[P],
    w: &[f64],
    sigma: usize,
    problem: &ClusteringProblem,
) -> Result<AlternativeScore> {
    if problem.len() < 2 {
        return Err(Error::NoAlternative);
    }
    let board = ScoreBoard::compute(arms, w, problem);
    let (value, hypothesis) = board.margin(sigma).expect("at least two hypotheses");
    Ok(AlternativeScore { value, hypothesis })
}

/// Current best estimate: the hypothesis with the smallest score.
pub fn best_estimate<P: AsRef<[f64]>>(arms: &[P], w: &[f64], problem: &ClusteringProblem) -> usize {
    ScoreBoard::compute(arms, w, problem).best()
}

/// Stopping statistic `Z(t) = t * G^{σ̂}(w)` and the estimate `σ̂`.
/// For a single-hypothesis problem `Z` is `+inf`: there is nothing to rule out.
pub fn z_statistic<P: AsRef<[f64]>>(
    t: u64,
    arms: &[P],
    w: &[f64],
    problem: &ClusteringProblem,
) -> (f64, usize) {
    let board = ScoreBoard::compute(arms, w, problem);
    z_from_board(t, &board)
}

pub(crate) fn z_from_board(t: u64, board: &ScoreBoard) -> (f64, usize) {
    let z = board
        .second_score()
        .map_or(f64::INFINITY, |s| t as f64 * s);
    (z, board.best())
}

/// Regularity constants of the scores around a true hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LipschitzConstants {
    /// Lipschitz constant of every `g^{σ'}` (`σ' != σ`) in `w`.
    pub l: f64,
    /// Gradient Lipschitz constant is `d / γ` on the `γ`-interior.
    pub d: f64,
    /// Lipschitz constant of the scores in `P` (sup norm).
    pub e: f64,
    pub p_min: f64,
}

pub fn lipschitz_constants(
    p: &ProblemInstance,
    problem: &ClusteringProblem,
    sigma: usize,
) -> Result<LipschitzConstants> {
    let p_min = p.p_min();
    if p_min <= 0.0 {
        return Err(Error::ZeroMinProbability);
    }
    let arms = p.arms();
    let mut l: f64 = 0.0;
    for (idx, h) in problem.hypotheses().iter().enumerate() {
        if idx == sigma {
            continue;
        }
        for c in h.clusters() {
            for &i in c {
                for &j in c {
                    l = l.max(kl_slices(arms[i].probs(), arms[j].probs()));
                }
            }
        }
    }
    let size = p.alphabet_size() as f64;
    let d = problem.max_cluster_size() as f64 * size * (1.0 - p_min) / (4.0 * p_min);
    let e = size * ((2.0 - p_min) / p_min).ln();
    Ok(LipschitzConstants { l, d, e, p_min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gen_odd_arm, make_hypothesis, ProblemKind};

    fn two_arm_problem() -> ClusteringProblem {
        let h = make_hypothesis([vec![0, 1]], 2).unwrap();
        ClusteringProblem::new(ProblemKind::Custom, 2, vec![h]).unwrap()
    }

    #[test]
    fn score_of_disjoint_point_masses() {
        let arms = [vec![1.0, 0.0], vec![0.0, 1.0]];
        let h = make_hypothesis([vec![0, 1]], 2).unwrap();
        let v = hypothesis_score(&arms, &[0.5, 0.5], &h);
        assert!((v - 2f64.ln()).abs() < 1e-15);
        let g = grad_g(&arms, &[0.5, 0.5], &h);
        assert!((g[0] - 2f64.ln()).abs() < 1e-15);
        assert!((g[1] - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn conforming_scores_vanish() {
        let a = vec![0.2, 0.3, 0.5];
        let b = vec![0.6, 0.1, 0.3];
        let arms = [a.clone(), b.clone(), a.clone(), b.clone(), vec![0.1, 0.1, 0.8]];
        let h = make_hypothesis([vec![0, 2], vec![1, 3]], 5).unwrap();
        let w = [0.1, 0.3, 0.2, 0.15, 0.25];
        assert_eq!(hypothesis_score(&arms, &w, &h), 0.0);
        assert!(grad_g(&arms, &w, &h).iter().all(|&x| x == 0.0));
        // a cluster with all-zero weight contributes nothing
        let h2 = make_hypothesis([vec![0, 1], vec![3, 4]], 5).unwrap();
        let w2 = [0.0, 0.0, 0.5, 0.25, 0.25];
        let only_second = hypothesis_score(&arms, &w2, &make_hypothesis([vec![3, 4]], 5).unwrap());
        assert_eq!(hypothesis_score(&arms, &w2, &h2), only_second);
    }

    /// Odd arm with K = 3, arms (A, A, B).
    fn odd3() -> (Vec<Vec<f64>>, ClusteringProblem) {
        let a = vec![0.7, 0.2, 0.1];
        let b = vec![0.1, 0.3, 0.6];
        (vec![a.clone(), a, b], gen_odd_arm(3).unwrap())
    }

    #[test]
    fn alternative_score_on_odd_arm() {
        let (arms, problem) = odd3();
        let w = [1.0 / 3.0; 3];
        // hypotheses in canonical order: {{0,1}}, {{0,2}}, {{1,2}}; truth is {{0,1}}
        let truth = 0;
        let s02 = crate::divergence::g_fn(&[&arms[0][..], &arms[2][..]], &[w[0], w[2]]);
        let s12 = crate::divergence::g_fn(&[&arms[1][..], &arms[2][..]], &[w[1], w[2]]);
        let alt = alternative_score(&arms, &w, truth, &problem).unwrap();
        assert!((alt.value - s02.min(s12)).abs() < 1e-15);
        // s02 == s12 by symmetry; tie goes to the lower index
        assert_eq!(alt.hypothesis, 1);

        let (z, sigma) = z_statistic(10, &arms, &w, &problem);
        assert_eq!(sigma, truth);
        assert!((z - 10.0 * s02.min(s12)).abs() < 1e-12);
        assert!(z > 0.0);
        let (z2, _) = z_statistic(20, &arms, &w, &problem);
        assert!((z2 - 2.0 * z).abs() < 1e-12);

        // the truth fits perfectly, so from an alternative the margin is 0
        let from_alt = alternative_score(&arms, &w, 2, &problem).unwrap();
        assert_eq!(from_alt.value, 0.0);
        assert_eq!(from_alt.hypothesis, truth);
    }

    #[test]
    fn alternative_score_needs_two_hypotheses() {
        let arms = [vec![0.5, 0.5], vec![0.2, 0.8]];
        assert!(matches!(
            alternative_score(&arms, &[0.5, 0.5], 0, &two_arm_problem()),
            Err(Error::NoAlternative)
        ));
    }

    #[test]
    fn two_hypothesis_margin_is_the_other_score() {
        let arms = vec![vec![0.5, 0.5], vec![0.2, 0.8], vec![0.5, 0.5]];
        let h0 = make_hypothesis([vec![0, 1]], 3).unwrap();
        let h1 = make_hypothesis([vec![0, 2]], 3).unwrap();
        let problem = ClusteringProblem::new(ProblemKind::Custom, 3, vec![h0.clone(), h1]).unwrap();
        let w = [0.2, 0.5, 0.3];
        let alt = alternative_score(&arms, &w, 1, &problem).unwrap();
        assert_eq!(alt.hypothesis, 0);
        assert_eq!(alt.value, hypothesis_score(&arms, &w, &h0));
    }

    #[test]
    fn single_nonzero_weight_per_cluster_scores_zero() {
        let (arms, problem) = odd3();
        // only arm 0 weighted inside cluster {0,2}: that hypothesis scores 0
        // even though arms 0 and 2 differ
        let w = [1.0, 0.0, 0.0];
        let board = ScoreBoard::compute(&arms, &w, &problem);
        assert_eq!(board.scores()[1], 0.0);
        assert_eq!(board.scores()[0], 0.0);
        assert_eq!(board.best(), 0);
    }

    #[test]
    fn lipschitz_constants_examples() {
        let p = ProblemInstance::from_rows(vec![vec![0.5, 0.5], vec![0.25, 0.75]]).unwrap();
        let h = make_hypothesis([vec![0, 1]], 2).unwrap();
        let other = ClusteringProblem::new(ProblemKind::Custom, 2, vec![h]).unwrap();
        // sigma index beyond the list: every hypothesis counts as an alternative
        let c = lipschitz_constants(&p, &other, usize::MAX).unwrap();
        let k12 = kl_slices(&[0.5, 0.5], &[0.25, 0.75]);
        let k21 = kl_slices(&[0.25, 0.75], &[0.5, 0.5]);
        assert!((c.l - k12.max(k21)).abs() < 1e-15);

        let same = ProblemInstance::from_rows(vec![vec![0.3, 0.7]; 3]).unwrap();
        let c = lipschitz_constants(&same, &gen_odd_arm(3).unwrap(), 0).unwrap();
        assert_eq!(c.l, 0.0);

        // p_min = 0.1, |X| = 3, largest cluster 2
        let p = ProblemInstance::from_rows(vec![
            vec![0.1, 0.2, 0.7],
            vec![0.3, 0.3, 0.4],
            vec![0.2, 0.2, 0.6],
        ])
        .unwrap();
        let c = lipschitz_constants(&p, &gen_odd_arm(3).unwrap(), 0).unwrap();
        assert!((c.d - 13.5).abs() < 1e-12);
        assert!((c.e - 3.0 * 19f64.ln()).abs() < 1e-12);

        let zero = ProblemInstance::from_rows(vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            lipschitz_constants(&zero, &gen_odd_arm(3).unwrap(), 0),
            Err(Error::ZeroMinProbability)
        ));
    }

    #[test]
    fn best_estimate_survives_small_noise() {
        let ex1 = crate::experiment::instances::matching_pairs_x3();
        let problem = crate::model::gen_matching_pairs(6, 2).unwrap();
        let truth = crate::model::instance_hypothesis(&ex1, &problem, 1e-9).unwrap();
        let w = [1.0 / 6.0; 6];
        let noisy: Vec<Vec<f64>> = ex1
            .arms()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let mut p = a.probs().to_vec();
                let eps = if i % 2 == 0 { 1e-3 } else { -1e-3 };
                p[0] += eps;
                p[1] -= eps;
                p
            })
            .collect();
        assert_eq!(best_estimate(ex1.arms(), &w, &problem), truth);
        assert_eq!(best_estimate(&noisy, &w, &problem), truth);
    }
}
