use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qubo_ising::{IsingModel, QuadraticModel};
use crate::scalar::Scalar;
use crate::seeds::derive_seed;

use super::{finish_energy, BackendKind, Read, SolveResult};

/// Geometric inverse-temperature ramp for single-spin Metropolis sweeps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnealSchedule<T> {
    pub sweeps: usize,
    pub beta_initial: T,
    pub beta_final: T,
    pub reads: usize,
}

impl<T: Scalar> AnnealSchedule<T> {
    pub fn new(sweeps: usize, beta_initial: T, beta_final: T, reads: usize) -> Result<Self> {
        let s = Self {
            sweeps,
            beta_initial,
            beta_final,
            reads,
        };
        s.validate()?;
        Ok(s)
    }

    /// 1000 sweeps, 32 reads, β from 0.1 up to `10 / max|coefficient|`.
    ///
    /// For models with coefficients above 100 the final β falls below 0.1;
    /// the start is then lowered to `β_final / 100`.
    pub fn default_for(model: &IsingModel<T>) -> Self {
        let beta_final = T::lit(10.0) / model.max_abs_coefficient().max(T::lit(1e-6));
        let mut beta_initial = T::lit(0.1);
        if beta_initial >= beta_final {
            beta_initial = beta_final / T::lit(100.0);
        }
        Self {
            sweeps: 1000,
            beta_initial,
            beta_final,
            reads: 32,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.reads == 0 {
            return Err(Error::Schedule("sweeps and reads must be positive".into()));
        }
        if !(self.beta_initial > T::zero()) || !self.beta_final.is_finite() {
            return Err(Error::Schedule(format!(
                "betas must be positive and finite, got {} and {}",
                self.beta_initial, self.beta_final
            )));
        }
        if !(self.beta_final > self.beta_initial) {
            return Err(Error::Schedule(format!(
                "beta_final ({}) must exceed beta_initial ({})",
                self.beta_final, self.beta_initial
            )));
        }
        Ok(())
    }

    /// Inverse temperature of sweep `k`.
    pub fn beta_at(&self, k: usize) -> T {
        if self.sweeps == 1 {
            return self.beta_final;
        }
        let frac = T::from_count(k) / T::from_count(self.sweeps - 1);
        self.beta_initial * (self.beta_final / self.beta_initial).powf(frac)
    }
}

/// Simulated annealing over `reads` independent chains, each seeded from
/// `derive_seed(seed, read)`.
pub fn solve_sa<T: Scalar>(model: &IsingModel<T>, schedule: &AnnealSchedule<T>, seed: u64) -> Result<SolveResult<T>> {
    schedule.validate()?;
    let n = model.n();
    if n == 0 {
        return Err(Error::dim("model has no variables"));
    }
    let adj = model.neighbors();
    let betas: Vec<T> = (0..schedule.sweeps).map(|k| schedule.beta_at(k)).collect();
    let two = T::lit(2.0);

    let reads: Vec<Read<T>> = (0..schedule.reads)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
            let mut z: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let mut fields: Vec<T> = (0..n)
                .map(|i| {
                    adj[i]
                        .iter()
                        .fold(model.field()[i], |acc, &(j, w)| acc + w * T::lit(z[j] as f64))
                })
                .collect();
            let mut energy = model.energy_unchecked(&z);
            let mut best = (energy, z.clone());
            for &beta in &betas {
                for i in 0..n {
                    let zi = T::lit(z[i] as f64);
                    let delta = -two * zi * fields[i];
                    let accept = delta <= T::zero() || {
                        let u: f64 = rng.random();
                        T::lit(u) < (-beta * delta).exp()
                    };
                    if accept {
                        z[i] = -z[i];
                        energy = energy + delta;
                        let dz = -two * zi;
                        for &(j, w) in &adj[i] {
                            fields[j] = fields[j] + w * dz;
                        }
                        if energy < best.0 {
                            best = (energy, z.clone());
                        }
                    }
                }
            }
            let state = best.1;
            Read {
                energy: finish_energy(model, &state),
                state,
            }
        })
        .collect();

    let best = reads
        .iter()
        .min_by(|a, b| a.energy.partial_cmp(&b.energy).expect("finite energies"))
        .expect("at least one read")
        .clone();
    Ok(SolveResult {
        vartype: model.vartype(),
        best_state: best.state,
        best_energy: best.energy,
        minimizers: Vec::new(),
        truncated: false,
        reads,
        backend: BackendKind::Sa,
        seed,
    })
}
