//! KL divergence, entropy and the weighted dispersion function `G`.
//!
//! Everything is in nats. The conventions `0 log 0 = 0` and `0 log(0/0) = 0`
//! are applied explicitly by skipping zero-mass terms.

use crate::error::{Error, Result};
use crate::model::Categorical;

/// `sum_a p(a) ln(p(a)/q(a))` over raw pmf slices of equal length.
/// Returns `+inf` when `p` puts mass where `q` has none.
pub fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut total = 0.0;
    for (&pa, &qa) in p.iter().zip(q) {
        if pa == 0.0 {
            continue;
        }
        if qa == 0.0 {
            return f64::INFINITY;
        }
        total += pa * (pa / qa).ln();
    }
    // Rounding can leave a tiny negative residue when p == q.
    total.max(0.0)
}

/// KL divergence between two categorical distributions.
pub fn kl(p: &Categorical, q: &Categorical) -> Result<f64> {
    if p.alphabet_size() != q.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            left: p.alphabet_size(),
            right: q.alphabet_size(),
        });
    }
    Ok(kl_slices(p.probs(), q.probs()))
}

fn xlogy_ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::INFINITY
    } else {
        x * (x / y).ln()
    }
}

/// Binary KL divergence `d(p || q)`. Mismatched degenerate `q` gives `+inf`.
pub fn binary_kl(p: f64, q: f64) -> f64 {
    xlogy_ratio(p, q) + xlogy_ratio(1.0 - p, 1.0 - q)
}

/// Shannon entropy in nats.
pub fn entropy(p: &Categorical) -> f64 {
    entropy_slice(p.probs())
}

pub(crate) fn entropy_slice(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&pa| pa > 0.0)
        .map(|&pa| -pa * pa.ln())
        .sum()
}

/// Weighted average `sum_i w_i P_i / sum_i w_i` written into `out`.
/// Returns the total weight; `out` is untouched when it is zero.
///
/// When every weighted member is the same pmf the mixture is that pmf
/// exactly, so conforming clusters score exactly zero.
pub(crate) fn mixture_into<P: AsRef<[f64]>>(ps: &[P], ws: &[f64], out: &mut [f64]) -> f64 {
    let total: f64 = ws.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut weighted = ps.iter().zip(ws).filter(|(_, &w)| w > 0.0).map(|(p, _)| p.as_ref());
    let first = weighted.next().expect("positive total weight");
    if weighted.all(|p| p == first) {
        out.copy_from_slice(first);
        return total;
    }
    out.iter_mut().for_each(|o| *o = 0.0);
    for (p, &w) in ps.iter().zip(ws) {
        if w > 0.0 {
            for (o, &pa) in out.iter_mut().zip(p.as_ref()) {
                *o += w * pa;
            }
        }
    }
    out.iter_mut().for_each(|o| *o /= total);
    total
}

/// The mixture `sum_i w_i P_i / sum_i w_i`, the unique minimiser of
/// `Q -> sum_i w_i D(P_i || Q)`.
pub fn mixture(ps: &[Categorical], ws: &[f64]) -> Result<Categorical> {
    if ps.len() != ws.len() {
        return Err(Error::LengthMismatch {
            expected: ps.len(),
            got: ws.len(),
        });
    }
    if ps.is_empty() {
        return Err(Error::ZeroWeights);
    }
    let size = ps[0].alphabet_size();
    if let Some(bad) = ps.iter().find(|p| p.alphabet_size() != size) {
        return Err(Error::AlphabetMismatch {
            left: size,
            right: bad.alphabet_size(),
        });
    }
    if ws.iter().any(|w| w.is_nan() || *w < 0.0) {
        return Err(Error::InvalidDistribution("weights must be non-negative".into()));
    }
    let mut out = vec![0.0; size];
    if mixture_into(ps, ws, &mut out) <= 0.0 {
        return Err(Error::ZeroWeights);
    }
    // Renormalise away rounding so the result passes validation.
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|o| *o /= s);
    Categorical::new(out)
}

/// `G(P_A, w_A)`: zero when every weight is zero, otherwise
/// `sum_i w_i D(P_i || W)` with `W` the weighted mixture.
///
/// Always finite: each member with positive weight is absolutely continuous
/// with respect to the mixture.
pub fn g_fn<P: AsRef<[f64]>>(ps: &[P], ws: &[f64]) -> f64 {
    debug_assert_eq!(ps.len(), ws.len());
    if ps.is_empty() {
        return 0.0;
    }
    let mut mix = vec![0.0; ps[0].as_ref().len()];
    g_fn_with_buffer(ps, ws, &mut mix)
}

pub(crate) fn g_fn_with_buffer<P: AsRef<[f64]>>(ps: &[P], ws: &[f64], mix: &mut [f64]) -> f64 {
    if mixture_into(ps, ws, mix) <= 0.0 {
        return 0.0;
    }
    ps.iter()
        .zip(ws)
        .filter(|(_, &w)| w > 0.0)
        .map(|(p, &w)| w * kl_slices(p.as_ref(), mix))
        .sum()
}

/// `(1/N) ln` of the ratio between the per-sequence maximum likelihood and
/// the pooled maximum likelihood, computed from symbol counts through
/// empirical entropies. Equal to `g_fn` of the empirical pmfs weighted by
/// `n_i / N`.
pub fn gllr_numerator_check(counts: &[Vec<u64>]) -> Result<f64> {
    if counts.len() < 2 {
        return Err(Error::InvalidInstance("need at least 2 sequences".into()));
    }
    let size = counts[0].len();
    if let Some(bad) = counts.iter().find(|c| c.len() != size) {
        return Err(Error::AlphabetMismatch {
            left: size,
            right: bad.len(),
        });
    }
    let lengths: Vec<u64> = counts.iter().map(|c| c.iter().sum()).collect();
    if lengths.contains(&0) {
        return Err(Error::InvalidInstance("empty sequence".into()));
    }
    let total: u64 = lengths.iter().sum();
    // log max_P P^n(x^n) = -n H(type(x^n))
    let separate: f64 = counts
        .iter()
        .zip(&lengths)
        .map(|(c, &n)| {
            let pmf: Vec<f64> = c.iter().map(|&x| x as f64 / n as f64).collect();
            -(n as f64) * entropy_slice(&pmf)
        })
        .sum();
    let mut pooled_counts = vec![0u64; size];
    for c in counts {
        for (acc, &x) in pooled_counts.iter_mut().zip(c) {
            *acc += x;
        }
    }
    let pooled_pmf: Vec<f64> = pooled_counts.iter().map(|&x| x as f64 / total as f64).collect();
    let pooled = -(total as f64) * entropy_slice(&pooled_pmf);
    Ok((separate - pooled) / total as f64)
}
