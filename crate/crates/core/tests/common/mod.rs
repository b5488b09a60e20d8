//! Property checks shared by the property tests and the acceptance run.
//! Each returns `Ok(detail)` on success and `Err(detail)` on the first
//! violation.

#![allow(dead_code)]

use bandit_cluster::divergence::{g_fn, gllr_numerator_check, kl_slices};
use bandit_cluster::experiment::diagnostics::{gradient_spot_check, random_interior};
use bandit_cluster::experiment::instances;
use bandit_cluster::model::{
    gen_matching_pairs, gen_nary_partition, gen_odd_arm, instance_hypothesis, validate_no_dominance,
    ClusteringProblem, ProblemInstance, DEFAULT_MATCH_TOL,
};
use bandit_cluster::sampling::{ctrack_next, forced_index, forced_schedule};
use bandit_cluster::score::{alternative_score, hypothesis_score, lipschitz_constants};
use bandit_cluster::sim::{run_episode_with_truth, Algorithm};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random pmf with every entry at least `floor`.
pub fn random_pmf<R: Rng>(size: usize, floor: f64, rng: &mut R) -> Vec<f64> {
    random_interior(size, floor, rng)
}

/// The three published example problems (matching pairs over three symbols,
/// odd arm, three-way clustering).
pub fn example_problems() -> Vec<(&'static str, ClusteringProblem, ProblemInstance)> {
    vec![
        ("matching-pairs", instances::matching_pairs_problem(), instances::matching_pairs_x3()),
        ("odd-arm", instances::odd_arm_problem(), instances::odd_arm_k7()),
        ("nary", instances::nary_problem(), instances::nary_k6()),
    ]
}

/// Per-sequence likelihood ratio from counts equals the weighted dispersion
/// of the empirical pmfs.
pub fn gllr_identity(cases: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let k = rng.random_range(2..=5);
        let size = rng.random_range(2..=5);
        let counts: Vec<Vec<u64>> = (0..k)
            .map(|_| {
                let mut c: Vec<u64> = (0..size).map(|_| rng.random_range(0..=30)).collect();
                if c.iter().all(|&x| x == 0) {
                    c[rng.random_range(0..size)] = 1;
                }
                c
            })
            .collect();
        let total: u64 = counts.iter().flatten().sum();
        let pmfs: Vec<Vec<f64>> = counts
            .iter()
            .map(|c| {
                let n: u64 = c.iter().sum();
                c.iter().map(|&x| x as f64 / n as f64).collect()
            })
            .collect();
        let ws: Vec<f64> = counts
            .iter()
            .map(|c| c.iter().sum::<u64>() as f64 / total as f64)
            .collect();
        let lhs = gllr_numerator_check(&counts).map_err(|e| e.to_string())?;
        let rhs = g_fn(&pmfs, &ws);
        let diff = (lhs - rhs).abs();
        worst = worst.max(diff);
        if diff > 1e-12 {
            return Err(format!("case {case}: {lhs} vs {rhs} (diff {diff:e})"));
        }
    }
    Ok(format!("{cases} cases, max diff {worst:.2e}"))
}

/// Calls `f` on every grid point of the simplex of dimension `size` with
/// the given number of steps.
fn for_each_grid_point(size: usize, steps: usize, f: &mut impl FnMut(&[f64])) {
    fn rec(i: usize, left: usize, steps: usize, q: &mut [f64], f: &mut impl FnMut(&[f64])) {
        if i == q.len() - 1 {
            q[i] = left as f64 / steps as f64;
            f(q);
            return;
        }
        for take in 0..=left {
            q[i] = take as f64 / steps as f64;
            rec(i + 1, left - take, steps, q, f);
        }
    }
    let mut q = vec![0.0; size];
    rec(0, steps, steps, &mut q, f);
}

/// The weighted mixture minimises `Q -> Σ w_i D(P_i || Q)`: no grid point
/// does better, and the best grid point is as close to the mixture as the
/// excess objective allows (`excess = (Σw) D(W || Q) >= (Σw)/2 ||W - Q||_1^2`).
pub fn mixture_minimizer_grid(cases: usize, steps: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut worst_dist: f64 = 0.0;
    for case in 0..cases {
        let n = rng.random_range(2..=4);
        let size = rng.random_range(2..=4);
        let ps: Vec<Vec<f64>> = (0..n).map(|_| random_pmf(size, 0.01, &mut rng)).collect();
        let ws: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = ws.iter().sum();
        let mixture: Vec<f64> = (0..size)
            .map(|a| ps.iter().zip(&ws).map(|(p, w)| w * p[a]).sum::<f64>() / total)
            .collect();
        let objective = |q: &[f64]| -> f64 {
            ps.iter().zip(&ws).map(|(p, w)| w * kl_slices(p, q)).sum()
        };
        let at_mixture = objective(&mixture);
        // Σ w_i D(P_i||Q) = Σ w_i Σ P_i ln P_i - Σ_a (Σ w_i P_i(a)) ln Q(a)
        let neg_entropy: f64 = ps
            .iter()
            .zip(&ws)
            .map(|(p, w)| w * p.iter().map(|x| x * x.ln()).sum::<f64>())
            .sum();
        let mut best = (f64::INFINITY, Vec::new());
        for_each_grid_point(size, steps, &mut |q| {
            if q.contains(&0.0) {
                return;
            }
            let v = neg_entropy - (0..size).map(|a| total * mixture[a] * q[a].ln()).sum::<f64>();
            if v < best.0 {
                best = (v, q.to_vec());
            }
        });
        let grid_best = objective(&best.1);
        if at_mixture > grid_best + 1e-12 {
            return Err(format!("case {case}: grid {grid_best} beats mixture {at_mixture}"));
        }
        let dist: f64 = best.1.iter().zip(&mixture).map(|(a, b)| (a - b).abs()).sum();
        let allowed = (2.0 * (grid_best - at_mixture).max(0.0) / total).sqrt() + 1e-9;
        worst_dist = worst_dist.max(dist);
        if dist > allowed {
            return Err(format!("case {case}: grid minimiser {dist} from mixture, allowed {allowed}"));
        }
    }
    Ok(format!("{cases} cases, step 1/{steps}, max L1 distance {worst_dist:.2e}"))
}

/// Analytic score gradients agree with central differences.
pub fn gradient_vs_fd(points: usize, seed: u64) -> Check {
    let mut details = Vec::new();
    for (name, problem, p) in example_problems() {
        let err = gradient_spot_check(&p, &problem, points, seed);
        if err > 1e-6 {
            return Err(format!("{name}: max relative error {err:e}"));
        }
        details.push(format!("{name} {err:.1e}"));
    }
    Ok(format!("{points} points per problem, max rel error: {}", details.join(", ")))
}

/// Alternative scores are L-Lipschitz in `w` (sup norm) on the simplex.
pub fn lipschitz_in_w(pairs: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut details = Vec::new();
    for (name, problem, p) in example_problems() {
        let sigma = instance_hypothesis(&p, &problem, DEFAULT_MATCH_TOL).map_err(|e| e.to_string())?;
        let l = lipschitz_constants(&p, &problem, sigma).map_err(|e| e.to_string())?.l;
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let w = random_interior(p.num_arms(), 0.0, &mut rng);
            let v = random_interior(p.num_arms(), 0.0, &mut rng);
            let dist = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            for (idx, h) in problem.hypotheses().iter().enumerate() {
                if idx == sigma {
                    continue;
                }
                let diff = (hypothesis_score(p.arms(), &w, h) - hypothesis_score(p.arms(), &v, h)).abs();
                worst = worst.max(diff / (l * dist));
                if diff > l * dist + 1e-12 {
                    return Err(format!("{name}: |Δg| = {diff} > L·|Δw| = {}", l * dist));
                }
            }
        }
        details.push(format!("{name} {worst:.3}"));
    }
    Ok(format!("{pairs} pairs per problem, worst |Δg|/(L|Δw|): {}", details.join(", ")))
}

/// Scores and margins are E-Lipschitz in `P` (sup norm) for perturbations
/// smaller than `p_min / 2`.
pub fn lipschitz_in_p(pairs: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut details = Vec::new();
    for (name, problem, p) in example_problems() {
        let sigma = instance_hypothesis(&p, &problem, DEFAULT_MATCH_TOL).map_err(|e| e.to_string())?;
        let c = lipschitz_constants(&p, &problem, sigma).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let eps = rng.random_range(0.0..0.5) * c.p_min;
            let q: Vec<Vec<f64>> = p
                .arms()
                .iter()
                .map(|arm| {
                    let raw: Vec<f64> = (0..arm.alphabet_size()).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
                    let centred: Vec<f64> = raw.iter().map(|x| x - mean).collect();
                    let top = centred.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
                    arm.probs().iter().zip(&centred).map(|(a, d)| a + eps * d / top).collect()
                })
                .collect();
            let dist = p
                .arms()
                .iter()
                .zip(&q)
                .flat_map(|(a, b)| a.probs().iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max);
            let w = random_interior(p.num_arms(), 1e-6, &mut rng);
            let bound = c.e * dist + 1e-12;
            for h in problem.hypotheses() {
                let diff = (hypothesis_score(p.arms(), &w, h) - hypothesis_score(&q, &w, h)).abs();
                worst = worst.max(diff / (c.e * dist));
                if diff > bound {
                    return Err(format!("{name}: |Δg| = {diff} > E·ε = {bound}"));
                }
            }
            let gp = alternative_score(p.arms(), &w, sigma, &problem).map_err(|e| e.to_string())?.value;
            let gq = alternative_score(&q, &w, sigma, &problem).map_err(|e| e.to_string())?.value;
            if (gp - gq).abs() > bound {
                return Err(format!("{name}: margin moved {} > E·ε = {bound}", (gp - gq).abs()));
            }
        }
        details.push(format!("{name} {worst:.3}"));
    }
    Ok(format!("{pairs} pairs per problem, worst |Δg|/(E ε): {}", details.join(", ")))
}

/// C-tracking keeps every count within `K - 1` of the cumulative target
/// under adversarially varied targets.
pub fn ctracking_bound(steps: usize, k: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut cum = vec![0.0; k];
    let mut pulls = vec![0u64; k];
    let mut worst: f64 = 0.0;
    for t in 1..=steps {
        let z: Vec<f64> = match (t / 1000) % 3 {
            0 => {
                let mut v = vec![0.0; k];
                v[rng.random_range(0..k)] = 1.0;
                v
            }
            1 => random_interior(k, 0.0, &mut rng),
            _ => vec![1.0 / k as f64; k],
        };
        cum.iter_mut().zip(&z).for_each(|(c, zi)| *c += zi);
        let arm = ctrack_next(&cum, &pulls);
        pulls[arm] += 1;
        for (n, c) in pulls.iter().zip(&cum) {
            let gap = (*n as f64 - c).abs();
            worst = worst.max(gap);
            if gap > (k - 1) as f64 + 1e-9 {
                return Err(format!("step {t}: |N - Σz| = {gap} > {}", k - 1));
            }
        }
    }
    Ok(format!("{steps} steps, K={k}, max deviation {worst:.3}"))
}

/// `⌈√t ln t⌉ <= |forced ∩ [t]| <= ⌈√t ln t⌉ + 1` for every `t <= horizon`.
pub fn forced_count_bound(horizon: u64) -> Check {
    let mut count = 0u64;
    for t in 1..=horizon {
        if forced_index(t) {
            count += 1;
        }
        let lo = forced_schedule(t);
        if count < lo || count > lo + 1 {
            return Err(format!("t={t}: count {count} outside [{lo}, {}]", lo + 1));
        }
    }
    Ok(format!("all t <= {horizon}, final count {count}"))
}

/// `N_i(t) >= √t ln t / K - K + 1` at every step of full TaS-FW episodes.
pub fn pull_floor(episodes_per_problem: u64, delta: f64) -> Check {
    let mut steps = 0usize;
    let mut worst_track: f64 = 0.0;
    for (name, problem, p) in example_problems() {
        let truth = instance_hypothesis(&p, &problem, DEFAULT_MATCH_TOL).map_err(|e| e.to_string())?;
        let k = p.num_arms() as f64;
        for seed in 0..episodes_per_problem {
            let r = run_episode_with_truth(&problem, &p, truth, Algorithm::TasFw, delta, seed, 1_000_000, true)
                .map_err(|e| e.to_string())?;
            for s in r.trace.as_deref().unwrap_or_default() {
                let t = s.t as f64;
                let floor = t.sqrt() * t.ln() / k - k + 1.0;
                if (s.min_pulls as f64) < floor {
                    return Err(format!("{name} seed {seed} t={}: min pulls {} < {floor}", s.t, s.min_pulls));
                }
                if s.tracking_error > k - 1.0 + 1e-9 {
                    return Err(format!("{name} seed {seed} t={}: tracking error {}", s.t, s.tracking_error));
                }
                worst_track = worst_track.max(s.tracking_error);
                steps += 1;
            }
        }
    }
    Ok(format!("{steps} traced steps, max tracking error {worst_track:.3}"))
}

/// Monte Carlo check of `P[N Σ_m G >= β] <= (N+1)^{M|X|} e^{-β}` for two
/// clusters of two sequences over three symbols.
pub fn concentration(draws: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let sources = [vec![0.2, 0.5, 0.3], vec![0.6, 0.1, 0.3]];
    let clusters = [[0usize, 1], [2, 3]];
    let (m, size) = (clusters.len(), 3usize);
    let mut details = Vec::new();
    for total in [30usize, 100] {
        let lengths = [total / 4 + total % 4, total / 4, total / 4, total / 4];
        let mut stats = Vec::with_capacity(draws);
        for _ in 0..draws {
            let mut value = 0.0;
            for (ci, c) in clusters.iter().enumerate() {
                let mut pmfs = Vec::new();
                let mut ws = Vec::new();
                for &i in c {
                    let mut counts = vec![0usize; size];
                    for _ in 0..lengths[i] {
                        let u: f64 = rng.random();
                        let mut acc = 0.0;
                        let mut sym = size - 1;
                        for (a, &pa) in sources[ci].iter().enumerate() {
                            acc += pa;
                            if u < acc {
                                sym = a;
                                break;
                            }
                        }
                        counts[sym] += 1;
                    }
                    pmfs.push(counts.iter().map(|&x| x as f64 / lengths[i] as f64).collect::<Vec<_>>());
                    ws.push(lengths[i] as f64 / total as f64);
                }
                value += g_fn(&pmfs, &ws);
            }
            stats.push(total as f64 * value);
        }
        for beta in [2.0f64, 4.0, 8.0] {
            let hits = stats.iter().filter(|&&s| s >= beta).count() as f64 / draws as f64;
            let bound = ((total + 1) as f64).powi((m * size) as i32) * (-beta).exp();
            if hits > bound {
                return Err(format!("N={total} β={beta}: empirical {hits} > bound {bound:e}"));
            }
            details.push(format!("N={total} β={beta}: {hits:.4}"));
        }
    }
    Ok(format!("{draws} draws each; {}", details.join(", ")))
}

fn factorial_ratio(k: usize, m: usize) -> usize {
    ((k - 2 * m + 1)..=(k - m)).product()
}

fn stirling2(n: usize, k: usize) -> usize {
    let mut table = vec![vec![0usize; k + 1]; n + 1];
    table[0][0] = 1;
    for i in 1..=n {
        for j in 1..=k.min(i) {
            table[i][j] = j * table[i - 1][j] + table[i - 1][j - 1];
        }
    }
    table[n][k]
}

/// Hypothesis counts of the generators for every `K <= 10`.
pub fn hypothesis_counts() -> Check {
    let mut checked = 0;
    for k in 2..=10usize {
        for m in 1..=k / 2 {
            let n = gen_matching_pairs(k, m).map_err(|e| e.to_string())?.len();
            if n != factorial_ratio(k, m) {
                return Err(format!("matching pairs K={k} M={m}: {n} hypotheses"));
            }
            checked += 1;
        }
        for parts in 2..=k {
            let n = gen_nary_partition(k, parts).map_err(|e| e.to_string())?.len();
            if n != stirling2(k, parts) {
                return Err(format!("nary K={k} N={parts}: {n} hypotheses"));
            }
            checked += 1;
        }
        let two = gen_nary_partition(k, 2).map_err(|e| e.to_string())?.len();
        if two != (1 << (k - 1)) - 1 {
            return Err(format!("binary K={k}: {two} hypotheses"));
        }
        if k >= 3 {
            let odd = gen_odd_arm(k).map_err(|e| e.to_string())?;
            if odd.len() != k || validate_no_dominance(&odd).is_err() {
                return Err(format!("odd arm K={k}"));
            }
        }
    }
    Ok(format!("{checked} (K, M/N) combinations"))
}
