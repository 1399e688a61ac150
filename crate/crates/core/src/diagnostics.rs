//! Recovery-theory diagnostics and recovery quality metrics.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::{BinarySignal, CsInstance, MeasurementMatrix};
use crate::qubo_ising::objective;
use crate::scalar::{norm, Scalar};

/// Advisory RIP threshold on `δ₂ₛ` for ℓ₀/ℓ₁ equivalence.
pub const RIP_DELTA_2S_THRESHOLD: f64 = 0.4931;

pub const DEFAULT_RIP_CAP: u128 = 1_000_000;
pub const DEFAULT_UNIQUENESS_CAP: usize = 20;

/// Absolute tolerance under which two objective values are tied.
pub const UNIQUENESS_TIE_TOL: f64 = 1e-12;

/// `max_{i≠j} |⟨aᵢ, aⱼ⟩| / (‖aᵢ‖ ‖aⱼ‖)` over columns.
pub fn mutual_coherence<T: Scalar>(a: &MeasurementMatrix<T>) -> Result<T> {
    let n = a.cols();
    if n < 2 {
        return Err(Error::dim("mutual coherence needs at least two columns"));
    }
    let cols: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let norms: Vec<T> = cols.iter().map(|c| norm(c)).collect();
    if let Some(j) = norms.iter().position(|&v| v == T::zero()) {
        return Err(Error::DegenerateColumn(j));
    }
    let mut mu = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let dot: T = cols[i].iter().zip(&cols[j]).map(|(&p, &q)| p * q).sum();
            mu = mu.max(dot.abs() / (norms[i] * norms[j]));
        }
    }
    Ok(mu.min(T::one()))
}

/// Largest sparsity the classical coherence bound `s < (1 + 1/μ)/2` admits.
pub fn coherence_sparsity_bound<T: Scalar>(mu: T) -> T {
    T::lit(0.5) * (T::one() + T::one() / mu)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Order-`s` restricted isometry constant by enumerating every
/// `s`-column submatrix: `max_S max(σ_max² − 1, 1 − σ_min²)`.
pub fn rip_constant<T: Scalar>(a: &MeasurementMatrix<T>, s: usize, enum_cap: u128) -> Result<T> {
    let n = a.cols();
    if s == 0 || s > n {
        return Err(Error::Invalid(format!("RIP order s = {s} must lie in 1..={n}")));
    }
    let count = binomial(n, s);
    if count > enum_cap {
        return Err(Error::Cap { count, cap: enum_cap });
    }
    let mut delta = T::zero();
    for cols in (0..n).combinations(s) {
        let sv = a.select_columns(&cols).singular_values();
        // fewer rows than columns means a zero singular value
        let smin = if a.rows() < s { T::zero() } else { sv[s - 1] };
        let smax = sv[0];
        delta = delta.max(smax * smax - T::one()).max(T::one() - smin * smin);
    }
    Ok(delta)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Uniqueness<T> {
    pub unique: bool,
    pub minimizers: Vec<BinarySignal>,
    pub min_objective: T,
}

/// Enumerates `{0,1}ⁿ` under the penalized objective, tracking the
/// residual `y − Ax` column by column in Gray-code order, then re-scores
/// the near-optimal states with [`objective`].
pub fn verify_uniqueness<T: Scalar>(inst: &CsInstance<T>, cap_n: usize) -> Result<Uniqueness<T>> {
    let (m, n) = inst.a().shape();
    if n > cap_n || n >= 63 {
        return Err(Error::Size { n, cap: cap_n.min(62) });
    }
    let cols: Vec<Vec<T>> = (0..n).map(|j| inst.a().column(j)).collect();
    let lambda = inst.lambda();
    let mut resid = inst.y().to_vec();
    let mut ones = 0usize;
    let score = |r: &[T], ones: usize| -> T { r.iter().map(|&v| v * v).sum::<T>() + lambda * T::from_count(ones) };
    let scale = crate::scalar::sq_norm(inst.y())
        + cols.iter().map(|c| crate::scalar::sq_norm(c)).sum::<T>() * T::from_count(n)
        + lambda * T::from_count(n);
    let tie = T::lit(UNIQUENESS_TIE_TOL);
    let window = tie + T::lit(1e4) * T::epsilon() * (T::one() + scale) * T::from_count(m);

    let mut bits = 0u64;
    let mut best = score(&resid, 0);
    let mut candidates = vec![(best, 0u64)];
    for i in 1u64..(1u64 << n) {
        let k = i.trailing_zeros() as usize;
        bits ^= 1 << k;
        let on = (bits >> k) & 1 == 1;
        for (r, &a) in resid.iter_mut().zip(&cols[k]) {
            *r = if on { *r - a } else { *r + a };
        }
        if on {
            ones += 1;
        } else {
            ones -= 1;
        }
        if i % 1024 == 0 {
            let x = BinarySignal::from_bits(n, bits);
            let ax = inst.a().mul_vec(&x.to_scalars())?;
            resid = inst.y().iter().zip(&ax).map(|(&y, &v)| y - v).collect();
        }
        let f = score(&resid, ones);
        if f < best {
            best = f;
            candidates.retain(|&(e, _)| e <= best + window);
        }
        if f <= best + window {
            candidates.push((f, bits));
        }
    }

    let mut scored = candidates
        .into_iter()
        .map(|(_, b)| {
            let x = BinarySignal::from_bits(n, b);
            Ok((objective(inst, &x)?, x))
        })
        .collect::<Result<Vec<_>>>()?;
    let min_objective = scored.iter().map(|(f, _)| *f).fold(T::infinity(), |a, b| a.min(b));
    scored.retain(|(f, _)| *f <= min_objective + tie);
    let mut minimizers: Vec<BinarySignal> = scored.into_iter().map(|(_, x)| x).collect();
    minimizers.sort();
    Ok(Uniqueness {
        unique: minimizers.len() == 1,
        minimizers,
        min_objective,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryMetrics<T> {
    pub exact_match: bool,
    pub hamming: usize,
    pub support_precision: T,
    pub support_recall: T,
    pub support_f1: T,
    pub residual: T,
}

/// Support precision is 1 for an empty estimate and recall is 1 for an
/// empty truth.
pub fn recovery_metrics<T: Scalar>(
    x_hat: &BinarySignal,
    x_true: &BinarySignal,
    inst: &CsInstance<T>,
) -> Result<RecoveryMetrics<T>> {
    if x_hat.len() != x_true.len() || x_hat.len() != inst.n() {
        return Err(Error::dim(format!(
            "lengths differ: estimate {}, truth {}, instance n = {}",
            x_hat.len(),
            x_true.len(),
            inst.n()
        )));
    }
    let pairs = x_hat.values().iter().zip(x_true.values());
    let hamming = pairs.clone().filter(|(a, b)| a != b).count();
    let tp = pairs.filter(|(&a, &b)| a == 1 && b == 1).count();
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            T::one()
        } else {
            T::from_count(num) / T::from_count(den)
        }
    };
    let precision = ratio(tp, x_hat.sparsity());
    let recall = ratio(tp, x_true.sparsity());
    let f1 = if precision + recall > T::zero() {
        T::lit(2.0) * precision * recall / (precision + recall)
    } else {
        T::zero()
    };
    let ax = inst.a().mul_vec(&x_hat.to_scalars())?;
    let r: Vec<T> = inst.y().iter().zip(&ax).map(|(&y, &v)| y - v).collect();
    Ok(RecoveryMetrics {
        exact_match: hamming == 0,
        hamming,
        support_precision: precision,
        support_recall: recall,
        support_f1: f1,
        residual: norm(&r),
    })
}
