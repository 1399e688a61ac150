//! Recovery under matrix uncertainty by alternating minimization.
//!
//! The joint objective is
//!
//! ```text
//! J(x, d) = ‖A(d)x − y‖² + ‖d‖²/γ + λ‖x‖₀,   A(d) = A₀ + Σᵢ dᵢAᵢ
//! ```
//!
//! With `d` fixed the `x`-subproblem is a QUBO; with `x` fixed the
//! `d`-subproblem is ridge regression `‖Gd − c‖² + ‖d‖²/γ` with
//! `G = [A₁x … A_rx]` and `c = y − A₀x`, solved by
//! `d* = (GᵀG + I/γ)⁻¹ Gᵀc`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::{BinarySignal, CsInstance, MeasurementMatrix, UncertainCsInstance};
use crate::linalg::{cholesky_solve, Matrix};
use crate::qubo_ising::{build_qubo, objective};
use crate::scalar::{all_finite, norm, sq_norm, Scalar};
use crate::seeds::derive_seed;
use crate::solvers::{solve_qubo, Backend};

pub const DEFAULT_MAX_ITERS: usize = 50;
/// Minimum objective decrease that counts as progress.
pub const STAGNATION_TOL: f64 = 1e-12;
/// Consecutive non-improving iterations before stopping.
pub const STAGNATION_PATIENCE: usize = 2;

/// `A₀ + Σᵢ dᵢAᵢ`.
pub fn assemble_a<T: Scalar>(inst: &UncertainCsInstance<T>, d: &[T]) -> Result<MeasurementMatrix<T>> {
    if d.len() != inst.r() {
        return Err(Error::dim(format!("len(d) = {} but r = {}", d.len(), inst.r())));
    }
    let mut a = inst.a0().clone();
    for (&di, ai) in d.iter().zip(inst.perturbations()) {
        a = a.add_scaled(di, ai)?;
    }
    Ok(a)
}

/// `G` (`m x r`, column `i` is `Aᵢx`) and `c = y − A₀x`.
pub fn build_gc<T: Scalar>(inst: &UncertainCsInstance<T>, x: &BinarySignal) -> Result<(Matrix<T>, Vec<T>)> {
    if x.len() != inst.n() {
        return Err(Error::dim(format!("len(x) = {} but n = {}", x.len(), inst.n())));
    }
    let xs = x.to_scalars::<T>();
    let (m, r) = (inst.m(), inst.r());
    let mut g = Matrix::zeros(m, r);
    for (i, ai) in inst.perturbations().iter().enumerate() {
        for (t, v) in ai.mul_vec(&xs)?.into_iter().enumerate() {
            g[(t, i)] = v;
        }
    }
    let a0x = inst.a0().mul_vec(&xs)?;
    let c = inst.y().iter().zip(&a0x).map(|(&y, &v)| y - v).collect();
    Ok((g, c))
}

/// Minimizer of `‖Gd − c‖² + ‖d‖²/γ` via a Cholesky solve of
/// `(GᵀG + I/γ) d = Gᵀc`.
pub fn solve_d<T: Scalar>(g: &Matrix<T>, c: &[T], gamma: T) -> Result<Vec<T>> {
    if c.len() != g.rows() {
        return Err(Error::dim(format!("len(c) = {} but G has {} rows", c.len(), g.rows())));
    }
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return Err(Error::Numeric(format!("gamma must be positive and finite, got {gamma}")));
    }
    if !all_finite(g.as_slice()) || !all_finite(c) {
        return Err(Error::Numeric("G and c must be finite".into()));
    }
    let mut normal = g.gram();
    let ridge = T::one() / gamma;
    for i in 0..normal.rows() {
        normal[(i, i)] = normal[(i, i)] + ridge;
    }
    let rhs = g.tr_mul_vec(c)?;
    cholesky_solve(&normal, &rhs)
}

/// `J(x, d)`, evaluated directly.
pub fn joint_objective<T: Scalar>(inst: &UncertainCsInstance<T>, x: &BinarySignal, d: &[T]) -> Result<T> {
    let a = assemble_a(inst, d)?;
    let cs = CsInstance::new(a, inst.y().to_vec(), inst.lambda())?;
    Ok(objective(&cs, x)? + sq_norm(d) / inst.gamma())
}

/// `‖A(d)x − y‖₂`.
pub fn residual<T: Scalar>(inst: &UncertainCsInstance<T>, x: &BinarySignal, d: &[T]) -> Result<T> {
    let ax = assemble_a(inst, d)?.mul_vec(&x.to_scalars())?;
    let r: Vec<T> = ax.iter().zip(inst.y()).map(|(&a, &y)| a - y).collect();
    Ok(norm(&r))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Iterate<T> {
    pub x: BinarySignal,
    pub d: Vec<T>,
    pub objective: T,
    pub residual: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Epsilon,
    MaxIters,
    Stagnation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryTrace<T> {
    pub iterations: Vec<Iterate<T>>,
    pub terminated_by: Termination,
    pub converged: bool,
}

impl<T> RecoveryTrace<T> {
    pub fn last(&self) -> &Iterate<T> {
        self.iterations.last().expect("trace has at least one iterate")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoverOptions<T> {
    pub backend: Backend<T>,
    pub eps: T,
    pub max_iters: usize,
    pub seed: u64,
}

impl<T: Scalar> RecoverOptions<T> {
    pub fn new(backend: Backend<T>, eps: T) -> Self {
        Self {
            backend,
            eps,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
        }
    }
}

/// Alternates a QUBO solve for `x` (with `d` fixed) and the closed-form
/// `d`-update, starting from `d = 0`.
///
/// A new `x` replaces the previous one only when it does not raise `J` at
/// the current `d`, which keeps the recorded objectives non-increasing even
/// with heuristic backends.
pub fn recover<T: Scalar>(inst: &UncertainCsInstance<T>, opts: &RecoverOptions<T>) -> Result<RecoveryTrace<T>> {
    if !(opts.eps > T::zero()) {
        return Err(Error::Invalid(format!("eps must be positive, got {}", opts.eps)));
    }
    if opts.max_iters == 0 {
        return Err(Error::Invalid("max_iters must be positive".into()));
    }
    let stall_tol = T::lit(STAGNATION_TOL);
    let mut d = vec![T::zero(); inst.r()];
    let mut x: Option<BinarySignal> = None;
    let mut iterations: Vec<Iterate<T>> = Vec::new();
    let mut stalls = 0;

    for iter in 0..opts.max_iters {
        let cs = CsInstance::new(assemble_a(inst, &d)?, inst.y().to_vec(), inst.lambda())?;
        let result = solve_qubo(&build_qubo(&cs), &opts.backend, derive_seed(opts.seed, iter as u64))?;
        let candidate = BinarySignal::new(result.best_state.iter().map(|&v| v as u8).collect())?;
        let accepted = match x.take() {
            Some(prev) if objective(&cs, &candidate)? > objective(&cs, &prev)? => prev,
            _ => candidate,
        };

        let (g, c) = build_gc(inst, &accepted)?;
        d = solve_d(&g, &c, inst.gamma())?;
        let record = Iterate {
            objective: joint_objective(inst, &accepted, &d)?,
            residual: residual(inst, &accepted, &d)?,
            d: d.clone(),
            x: accepted.clone(),
        };
        x = Some(accepted);

        let improved = iterations
            .last()
            .is_none_or(|prev| prev.objective - record.objective > stall_tol);
        stalls = if improved { 0 } else { stalls + 1 };
        let done_eps = record.residual <= opts.eps;
        iterations.push(record);

        let terminated_by = if done_eps {
            Some(Termination::Epsilon)
        } else if stalls >= STAGNATION_PATIENCE {
            Some(Termination::Stagnation)
        } else if iter + 1 == opts.max_iters {
            Some(Termination::MaxIters)
        } else {
            None
        };
        if let Some(terminated_by) = terminated_by {
            return Ok(RecoveryTrace {
                iterations,
                terminated_by,
                converged: done_eps,
            });
        }
    }
    unreachable!("loop returns on its final iteration")
}
