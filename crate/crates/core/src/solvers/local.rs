use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qubo_ising::{IsingModel, QuadraticModel};
use crate::scalar::Scalar;
use crate::seeds::derive_seed;

use super::{finish_energy, BackendKind, Read, SolveResult};

/// Steepest single-flip descent from `starts` random states. Among equally
/// good flips the lowest index wins.
pub fn solve_local<T: Scalar>(model: &IsingModel<T>, starts: usize, seed: u64) -> Result<SolveResult<T>> {
    let n = model.n();
    if n == 0 {
        return Err(Error::dim("model has no variables"));
    }
    if starts == 0 {
        return Err(Error::Invalid("starts must be positive".into()));
    }
    let adj = model.neighbors();
    let two = T::lit(2.0);
    // Flips must beat rounding noise to count as improvements.
    let min_gain = T::lit(64.0) * T::epsilon() * (T::one() + model.max_abs_coefficient() * T::from_count(n));

    let reads: Vec<Read<T>> = (0..starts)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, s as u64));
            let mut z: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let mut fields: Vec<T> = (0..n)
                .map(|i| {
                    adj[i]
                        .iter()
                        .fold(model.field()[i], |acc, &(j, w)| acc + w * T::lit(z[j] as f64))
                })
                .collect();
            loop {
                let mut pick: Option<(usize, T)> = None;
                for i in 0..n {
                    let delta = -two * T::lit(z[i] as f64) * fields[i];
                    if delta < -min_gain && pick.is_none_or(|(_, d)| delta < d) {
                        pick = Some((i, delta));
                    }
                }
                let Some((i, _)) = pick else { break };
                let dz = -two * T::lit(z[i] as f64);
                z[i] = -z[i];
                for &(j, w) in &adj[i] {
                    fields[j] = fields[j] + w * dz;
                }
            }
            Read {
                energy: finish_energy(model, &z),
                state: z,
            }
        })
        .collect();

    let best = reads
        .iter()
        .min_by(|a, b| a.energy.partial_cmp(&b.energy).expect("finite energies"))
        .expect("at least one start")
        .clone();
    Ok(SolveResult {
        vartype: model.vartype(),
        best_state: best.state,
        best_energy: best.energy,
        minimizers: Vec::new(),
        truncated: false,
        reads,
        backend: BackendKind::Local,
        seed,
    })
}
