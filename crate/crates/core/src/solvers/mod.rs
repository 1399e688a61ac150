//! Minimization backends for QUBO and Ising models.
//!
//! [`solve_exhaustive`] is the ground-truth oracle; [`solve_sa`] and
//! [`solve_local`] are heuristics standing in for an annealer. Every energy
//! reported here includes the model offset.

mod anneal;
mod exhaustive;
mod local;

pub use anneal::{solve_sa, AnnealSchedule};
pub use exhaustive::{solve_exhaustive, DEFAULT_EXHAUSTIVE_CAP, MINIMIZER_CAP};
pub use local::solve_local;

use serde::Serialize;

use crate::error::Result;
use crate::qubo_ising::{qubo_to_ising, QuadraticModel, QuboModel, Vartype};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Exhaustive,
    Sa,
    Local,
}

impl std::fmt::Display for BackendKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BackendKind::Exhaustive => "exhaustive",
            BackendKind::Sa => "sa",
            BackendKind::Local => "local",
        })
    }
}

/// One independent run: its best state and that state's energy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Read<T> {
    pub state: Vec<i8>,
    pub energy: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveResult<T> {
    pub vartype: Vartype,
    pub best_state: Vec<i8>,
    pub best_energy: T,
    /// All optimal states, sorted; filled by the exhaustive backend only.
    pub minimizers: Vec<Vec<i8>>,
    /// Set when more optimal states exist than were recorded.
    pub truncated: bool,
    pub reads: Vec<Read<T>>,
    pub backend: BackendKind,
    pub seed: u64,
}

impl<T: Scalar> SolveResult<T> {
    /// Re-expresses states as bits (`z ↦ (z + 1)/2`); energies are unchanged
    /// since the spin model carries the matching offset.
    pub fn into_binary(mut self) -> Self {
        if self.vartype == Vartype::Spin {
            let to_bits = |s: &mut Vec<i8>| s.iter_mut().for_each(|v| *v = (*v + 1) / 2);
            to_bits(&mut self.best_state);
            self.minimizers.iter_mut().for_each(to_bits);
            self.reads.iter_mut().for_each(|r| to_bits(&mut r.state));
            self.vartype = Vartype::Binary;
        }
        self
    }
}

/// Backend selection with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Backend<T> {
    Exhaustive { cap_n: usize },
    /// `None` picks [`AnnealSchedule::default_for`] per model.
    Sa(Option<AnnealSchedule<T>>),
    Local { starts: usize },
}

impl<T> Backend<T> {
    pub fn kind(&self) -> BackendKind {
        match self {
            Backend::Exhaustive { .. } => BackendKind::Exhaustive,
            Backend::Sa(_) => BackendKind::Sa,
            Backend::Local { .. } => BackendKind::Local,
        }
    }
}

impl<T> Default for Backend<T> {
    fn default() -> Self {
        Backend::Exhaustive {
            cap_n: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

/// Minimizes a QUBO with any backend; states in the result are binary.
pub fn solve_qubo<T: Scalar>(q: &QuboModel<T>, backend: &Backend<T>, seed: u64) -> Result<SolveResult<T>> {
    match backend {
        Backend::Exhaustive { cap_n } => solve_exhaustive(q, *cap_n),
        Backend::Sa(schedule) => {
            let ising = qubo_to_ising(q);
            let schedule = match schedule {
                Some(s) => s.clone(),
                None => AnnealSchedule::default_for(&ising),
            };
            Ok(solve_sa(&ising, &schedule, seed)?.into_binary())
        }
        Backend::Local { starts } => Ok(solve_local(&qubo_to_ising(q), *starts, seed)?.into_binary()),
    }
}

pub(crate) fn finish_energy<T: Scalar, M: QuadraticModel<T> + ?Sized>(model: &M, state: &[i8]) -> T {
    model.energy_unchecked(state) + model.offset()
}
