//! Arm models, hypotheses and clustering problems.
//!
//! Arms are 0-indexed everywhere in this crate. A [`Hypothesis`] is a set of
//! disjoint clusters (each of size at least two) over a subset of the arms;
//! the arms it leaves out form its unconstrained group.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`Categorical`].
pub const MASS_TOL: f64 = 1e-12;

/// Default tolerance used by [`instance_hypothesis`] for exactly constructed
/// instances.
pub const DEFAULT_MATCH_TOL: f64 = 1e-9;

/// A probability mass function on the alphabet `0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Categorical {
    probs: Vec<f64>,
}

impl Categorical {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "alphabet size must be at least 2, got {}",
                probs.len()
            )));
        }
        if let Some((a, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {a} is {p}; entries must be finite and non-negative"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Uniform distribution over `size` symbols.
    pub fn uniform(size: usize) -> Result<Self> {
        Self::new(vec![1.0 / size as f64; size])
    }

    /// Empirical distribution (type) of a symbol-count vector. `None` when
    /// every count is zero.
    pub fn from_counts(counts: &[u64]) -> Option<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 || counts.len() < 2 {
            return None;
        }
        let probs = counts.iter().map(|&c| c as f64 / n as f64).collect();
        Some(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest absolute coordinate difference.
    pub fn linf_distance(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl AsRef<[f64]> for Categorical {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}

impl TryFrom<Vec<f64>> for Categorical {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<Categorical> for Vec<f64> {
    fn from(c: Categorical) -> Self {
        c.probs
    }
}

/// The tuple of arm distributions (a problem instance).
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    arms: Vec<Categorical>,
}

impl ProblemInstance {
    pub fn new(arms: Vec<Categorical>) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 arms, got {}",
                arms.len()
            )));
        }
        let size = arms[0].alphabet_size();
        if let Some(bad) = arms.iter().find(|a| a.alphabet_size() != size) {
            return Err(Error::AlphabetMismatch {
                left: size,
                right: bad.alphabet_size(),
            });
        }
        Ok(Self { arms })
    }

    /// Builds an instance from raw rows, checking every row.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let arms = rows
            .into_iter()
            .map(Categorical::new)
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms)
    }

    pub fn arms(&self) -> &[Categorical] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.arms[0].alphabet_size()
    }

    /// Smallest probability over all arms and symbols.
    pub fn p_min(&self) -> f64 {
        self.arms
            .iter()
            .map(Categorical::min_prob)
            .fold(f64::INFINITY, f64::min)
    }
}

/// On-disk form of a [`ProblemInstance`]:
/// `{"alphabet_size": 3, "arms": [[0.1, 0.1, 0.8], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub alphabet_size: usize,
    pub arms: Vec<Vec<f64>>,
}

impl TryFrom<InstanceFile> for ProblemInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        let instance = ProblemInstance::from_rows(file.arms)?;
        if instance.alphabet_size() != file.alphabet_size {
            return Err(Error::AlphabetMismatch {
                left: file.alphabet_size,
                right: instance.alphabet_size(),
            });
        }
        Ok(instance)
    }
}

impl From<&ProblemInstance> for InstanceFile {
    fn from(p: &ProblemInstance) -> Self {
        Self {
            alphabet_size: p.alphabet_size(),
            arms: p.arms.iter().map(|a| a.probs.clone()).collect(),
        }
    }
}

/// A set of disjoint clusters over `0..num_arms`, in canonical form: members
/// sorted within each cluster, clusters sorted by their smallest member.
///
/// Hypotheses order lexicographically on their canonical cluster lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Hypothesis {
    clusters: Vec<Vec<usize>>,
    unconstrained: Vec<usize>,
    num_arms: usize,
}

impl Hypothesis {
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn unconstrained(&self) -> &[usize] {
        &self.unconstrained
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    /// Number of arms that belong to some cluster.
    pub fn clustered_arms(&self) -> usize {
        self.num_arms - self.unconstrained.len()
    }

    pub fn max_cluster_size(&self) -> usize {
        self.clusters.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The group (cluster index, or `num_clusters()` for the unconstrained
    /// group) that `arm` belongs to.
    pub fn group_of(&self, arm: usize) -> usize {
        self.clusters
            .iter()
            .position(|c| c.contains(&arm))
            .unwrap_or(self.clusters.len())
    }

    /// True iff every cluster of `self` is a subset of some cluster of `other`.
    pub fn dominates(&self, other: &Hypothesis) -> bool {
        self.clusters.iter().all(|a| {
            other
                .clusters
                .iter()
                .any(|b| a.iter().all(|i| b.binary_search(i).is_ok()))
        })
    }

    /// Clusters written 1-indexed, e.g. `{{1,3},{2,4}}`.
    pub fn display_one_indexed(&self) -> String {
        let inner: Vec<String> = self
            .clusters
            .iter()
            .map(|c| {
                let members: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
                format!("{{{}}}", members.join(","))
            })
            .collect();
        format!("{{{}}}", inner.join(","))
    }
}

impl Ord for Hypothesis {
    fn cmp(&self, other: &Self) -> Ordering {
        self.clusters
            .cmp(&other.clusters)
            .then(self.num_arms.cmp(&other.num_arms))
    }
}

impl PartialOrd for Hypothesis {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Builds a canonical hypothesis from cluster index sets over `num_arms` arms.
pub fn make_hypothesis<I, C>(clusters: I, num_arms: usize) -> Result<Hypothesis>
where
    I: IntoIterator<Item = C>,
    C: IntoIterator<Item = usize>,
{
    if num_arms < 2 {
        return Err(Error::InvalidHypothesis(format!(
            "need at least 2 arms, got {num_arms}"
        )));
    }
    let mut seen = vec![false; num_arms];
    let mut canon = Vec::new();
    for cluster in clusters {
        let members: BTreeSet<usize> = cluster.into_iter().collect();
        if members.len() < 2 {
            return Err(Error::InvalidHypothesis(format!(
                "cluster {members:?} has fewer than 2 arms"
            )));
        }
        for &i in &members {
            if i >= num_arms {
                return Err(Error::InvalidHypothesis(format!(
                    "arm {i} outside 0..{num_arms}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidHypothesis(format!(
                    "arm {i} appears in more than one cluster"
                )));
            }
            seen[i] = true;
        }
        canon.push(members.into_iter().collect::<Vec<_>>());
    }
    canon.sort_by_key(|c| c[0]);
    let unconstrained = (0..num_arms).filter(|&i| !seen[i]).collect();
    Ok(Hypothesis {
        clusters: canon,
        unconstrained,
        num_arms,
    })
}

/// The family of hypotheses a problem is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    MatchingPairs,
    OddArm,
    Nary,
    Custom,
}

/// A collection of hypotheses over `num_arms` arms, stored in canonical order
/// so that "lowest index" and "canonically smallest" coincide.
#[derive(Debug, Clone)]
pub struct ClusteringProblem {
    kind: ProblemKind,
    num_arms: usize,
    hypotheses: Vec<Hypothesis>,
    m_max: usize,
    k_tilde: usize,
    max_cluster_size: usize,
}

impl ClusteringProblem {
    pub fn new(kind: ProblemKind, num_arms: usize, mut hypotheses: Vec<Hypothesis>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::InvalidProblem("no hypotheses".into()));
        }
        if let Some(h) = hypotheses.iter().find(|h| h.num_arms != num_arms) {
            return Err(Error::InvalidProblem(format!(
                "hypothesis {} is defined on {} arms, problem has {num_arms}",
                h.display_one_indexed(),
                h.num_arms
            )));
        }
        hypotheses.sort();
        if let Some(w) = hypotheses.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidProblem(format!(
                "duplicate hypothesis {}",
                w[0].display_one_indexed()
            )));
        }
        let m_max = hypotheses.iter().map(Hypothesis::num_clusters).max().unwrap_or(0);
        let k_tilde = hypotheses.iter().map(Hypothesis::clustered_arms).max().unwrap_or(0);
        let max_cluster_size = hypotheses
            .iter()
            .map(Hypothesis::max_cluster_size)
            .max()
            .unwrap_or(0);
        Ok(Self {
            kind,
            num_arms,
            hypotheses,
            m_max,
            k_tilde,
            max_cluster_size,
        })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    /// Largest cluster count over all hypotheses.
    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// Largest number of clustered arms over all hypotheses.
    pub fn k_tilde(&self) -> usize {
        self.k_tilde
    }

    /// Largest single cluster over all hypotheses.
    pub fn max_cluster_size(&self) -> usize {
        self.max_cluster_size
    }

    pub fn index_of(&self, h: &Hypothesis) -> Option<usize> {
        self.hypotheses.binary_search(h).ok()
    }
}

/// Ordered pairs `(a, b)`, `a != b`, where hypothesis `a` dominates `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceViolations {
    pub pairs: Vec<(usize, usize)>,
}

/// Checks that no hypothesis dominates a distinct one.
pub fn validate_no_dominance(problem: &ClusteringProblem) -> Result<(), DominanceViolations> {
    let hs = problem.hypotheses();
    let mut pairs = Vec::new();
    for (a, ha) in hs.iter().enumerate() {
        for (b, hb) in hs.iter().enumerate() {
            if a != b && ha.dominates(hb) {
                pairs.push((a, b));
            }
        }
    }
    if pairs.is_empty() {
        Ok(())
    } else {
        Err(DominanceViolations { pairs })
    }
}

fn conforms(p: &ProblemInstance, h: &Hypothesis, tol: f64) -> bool {
    let arms = p.arms();
    let k = p.num_arms();
    let groups: Vec<usize> = (0..k).map(|i| h.group_of(i)).collect();
    let free = h.num_clusters();
    for i in 0..k {
        for j in (i + 1)..k {
            let d = arms[i].linf_distance(&arms[j]);
            if groups[i] == groups[j] {
                if groups[i] != free && d > tol {
                    return false;
                }
            } else if d <= tol {
                return false;
            }
        }
    }
    true
}

/// Index of the unique hypothesis the instance conforms to: arms inside a
/// cluster agree within `tol` (sup norm) and arms from different groups differ
/// by more than `tol`.
pub fn instance_hypothesis(
    p: &ProblemInstance,
    problem: &ClusteringProblem,
    tol: f64,
) -> Result<usize> {
    if p.num_arms() != problem.num_arms() {
        return Err(Error::InvalidInstance(format!(
            "instance has {} arms, problem has {}",
            p.num_arms(),
            problem.num_arms()
        )));
    }
    let matches: Vec<usize> = problem
        .hypotheses()
        .iter()
        .enumerate()
        .filter(|(_, h)| conforms(p, h, tol))
        .map(|(i, _)| i)
        .collect();
    match matches.as_slice() {
        [] => Err(Error::NoMatchingHypothesis),
        [one] => Ok(*one),
        [first, second, ..] => Err(Error::AmbiguousHypothesis {
            count: matches.len(),
            first: *first,
            second: *second,
        }),
    }
}

/// Matching pairs: nominal arms `0..m` are each matched to a distinct
/// candidate arm in `m..k`.
pub fn gen_matching_pairs(k: usize, m: usize) -> Result<ClusteringProblem> {
    if m == 0 || k < 2 * m {
        return Err(Error::InvalidProblem(format!(
            "matching pairs needs K >= 2M >= 2, got K={k}, M={m}"
        )));
    }
    let candidates: Vec<usize> = (m..k).collect();
    let mut hypotheses = Vec::new();
    let mut used = vec![false; candidates.len()];
    let mut current = Vec::with_capacity(m);
    injections(&candidates, m, &mut used, &mut current, &mut |choice| {
        let clusters = choice.iter().enumerate().map(|(i, &j)| vec![i, j]);
        hypotheses.push(make_hypothesis(clusters, k).expect("pairs are disjoint"));
    });
    ClusteringProblem::new(ProblemKind::MatchingPairs, k, hypotheses)
}

fn injections(
    candidates: &[usize],
    m: usize,
    used: &mut [bool],
    current: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if current.len() == m {
        emit(current);
        return;
    }
    for (idx, &c) in candidates.iter().enumerate() {
        if !used[idx] {
            used[idx] = true;
            current.push(c);
            injections(candidates, m, used, current, emit);
            current.pop();
            used[idx] = false;
        }
    }
}

/// Odd arm identification: hypothesis `k` clusters every arm except `k`.
pub fn gen_odd_arm(k: usize) -> Result<ClusteringProblem> {
    if k < 3 {
        return Err(Error::InvalidProblem(format!(
            "odd arm needs K >= 3, got K={k}"
        )));
    }
    let hypotheses = (0..k)
        .map(|odd| make_hypothesis([(0..k).filter(|&i| i != odd)], k))
        .collect::<Result<Vec<_>>>()?;
    ClusteringProblem::new(ProblemKind::OddArm, k, hypotheses)
}

/// N-ary clustering: one hypothesis per partition of the arms into exactly
/// `n` non-empty groups. Groups of size one form the unconstrained group.
pub fn gen_nary_partition(k: usize, n: usize) -> Result<ClusteringProblem> {
    if n < 2 || n > k {
        return Err(Error::InvalidProblem(format!(
            "n-ary clustering needs 2 <= N <= K, got K={k}, N={n}"
        )));
    }
    let mut hypotheses = Vec::new();
    let mut labels = vec![0usize; k];
    // Restricted growth strings: labels[0] = 0, labels[i] <= max(labels[..i]) + 1.
    fn recurse(
        i: usize,
        used: usize,
        n: usize,
        labels: &mut [usize],
        emit: &mut impl FnMut(&[usize]),
    ) {
        let k = labels.len();
        if i == k {
            if used == n {
                emit(labels);
            }
            return;
        }
        if n - used > k - i {
            return;
        }
        for label in 0..=used.min(n - 1) {
            labels[i] = label;
            recurse(i + 1, used.max(label + 1), n, labels, emit);
        }
    }
    recurse(1, 1, n, &mut labels, &mut |labels| {
        let mut blocks = vec![Vec::new(); n];
        for (arm, &l) in labels.iter().enumerate() {
            blocks[l].push(arm);
        }
        let clusters = blocks.into_iter().filter(|b| b.len() >= 2);
        hypotheses.push(make_hypothesis(clusters, k).expect("blocks are disjoint"));
    });
    ClusteringProblem::new(ProblemKind::Nary, k, hypotheses)
}
