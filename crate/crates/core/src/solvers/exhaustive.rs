use crate::error::{Error, Result};
use crate::qubo_ising::QuadraticModel;
use crate::scalar::Scalar;

use super::{finish_energy, BackendKind, Read, SolveResult};

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 25;

/// Most tied minimizers recorded before `truncated` is set.
pub const MINIMIZER_CAP: usize = 1024;

// Incremental energies are recomputed from scratch this often.
const RESYNC_EVERY: u64 = 1024;

/// Absolute tolerance under which two energies count as tied.
pub(crate) fn tie_tolerance<T: Scalar>(magnitude: T) -> T {
    T::lit(1e-12).max(T::lit(64.0) * T::epsilon() * (T::one() + magnitude.abs()))
}

/// Enumerates all `2ⁿ` states in Gray-code order.
///
/// Candidates are screened with incrementally updated energies and then
/// re-scored exactly, so the reported energies match
/// [`QuadraticModel::energy`] bit for bit.
pub fn solve_exhaustive<T, M>(model: &M, cap_n: usize) -> Result<SolveResult<T>>
where
    T: Scalar,
    M: QuadraticModel<T> + ?Sized,
{
    let n = model.num_vars();
    if n > cap_n || n >= 63 {
        return Err(Error::Size { n, cap: cap_n.min(62) });
    }
    let [lo, hi] = model.vartype().values();
    let step = T::lit((hi - lo) as f64);
    let adj = model.neighbors();
    let scale: T = model
        .linear()
        .iter()
        .chain(model.quadratic().values())
        .map(|v| v.abs())
        .sum();
    let window = tie_tolerance(scale) + T::lit(4.0 * RESYNC_EVERY as f64) * T::epsilon() * (T::one() + scale);

    let mut state = vec![lo; n];
    let local_fields = |state: &[i8]| -> Vec<T> {
        (0..n)
            .map(|k| {
                adj[k]
                    .iter()
                    .fold(model.linear()[k], |acc, &(j, w)| acc + w * T::lit(state[j] as f64))
            })
            .collect()
    };
    let mut fields = local_fields(&state);
    let mut energy = model.energy_unchecked(&state);

    let candidate_limit = 8 * MINIMIZER_CAP;
    let mut best = energy;
    let mut candidates: Vec<(T, u64)> = vec![(energy, 0)];
    let mut dropped_min = T::infinity();

    let mut bits: u64 = 0;
    for i in 1u64..(1u64 << n) {
        let k = i.trailing_zeros() as usize;
        let delta_s = if state[k] == lo { step } else { -step };
        state[k] = if state[k] == lo { hi } else { lo };
        bits ^= 1 << k;
        energy = energy + delta_s * fields[k];
        for &(j, w) in &adj[k] {
            fields[j] = fields[j] + w * delta_s;
        }
        if i % RESYNC_EVERY == 0 {
            fields = local_fields(&state);
            energy = model.energy_unchecked(&state);
        }

        if energy < best {
            best = energy;
            if candidates.iter().any(|&(e, _)| e > best + window) {
                candidates.retain(|&(e, _)| e <= best + window);
            }
        }
        if energy <= best + window {
            if candidates.len() < candidate_limit {
                candidates.push((energy, bits));
            } else {
                dropped_min = dropped_min.min(energy);
            }
        }
    }

    let decode = |bits: u64| -> Vec<i8> { (0..n).map(|i| if (bits >> i) & 1 == 1 { hi } else { lo }).collect() };
    let mut scored: Vec<(T, Vec<i8>)> = candidates
        .into_iter()
        .map(|(_, b)| {
            let s = decode(b);
            (finish_energy(model, &s), s)
        })
        .collect();
    let best_exact = scored
        .iter()
        .map(|(e, _)| *e)
        .fold(T::infinity(), |a, b| a.min(b));
    let tol = tie_tolerance(best_exact);
    scored.retain(|(e, _)| *e <= best_exact + tol);
    let mut minimizers: Vec<Vec<i8>> = scored.into_iter().map(|(_, s)| s).collect();
    minimizers.sort();
    let mut truncated = dropped_min <= best + window;
    if minimizers.len() > MINIMIZER_CAP {
        minimizers.truncate(MINIMIZER_CAP);
        truncated = true;
    }
    let best_state = minimizers[0].clone();
    let best_energy = finish_energy(model, &best_state);
    Ok(SolveResult {
        vartype: model.vartype(),
        reads: vec![Read {
            state: best_state.clone(),
            energy: best_energy,
        }],
        best_state,
        best_energy,
        minimizers,
        truncated,
        backend: BackendKind::Exhaustive,
        seed: 0,
    })
}
