//! Binary compressive sensing through QUBO/Ising reductions.
//!
//! A binary signal `x ∈ {0,1}ⁿ` observed through `y = Ax` is recovered by
//! minimizing `‖y − Ax‖² + λ‖x‖₀`, which is exactly a QUBO (and, after
//! `z = 2x − 1`, an Ising model). The crate builds those models, solves them
//! with an exhaustive oracle or annealing-style heuristics, extends recovery
//! to an uncertain matrix `A(d) = A₀ + Σ dᵢAᵢ` by alternating minimization,
//! and models annealer hardware limits (coefficient ranges, precision,
//! Chimera connectivity, chains).
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below name the double-precision instantiations used by the
//! file formats and the CLI.

// `!(x > 0)` is how NaN gets rejected alongside nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod hardware;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod qubo_ising;
pub mod scalar;
pub mod seeds;
pub mod solvers;
pub mod uncertainty;

pub use error::{Error, Result};
pub use instances::{BinarySignal, CsInstance, Distribution, MeasurementMatrix, UncertainCsInstance};
pub use linalg::Matrix;
pub use qubo_ising::{IsingModel, QuadraticModel, QuboModel, Vartype};
pub use scalar::Scalar;
pub use solvers::{AnnealSchedule, Backend, SolveResult};
pub use uncertainty::RecoveryTrace;

pub type Matrix64 = Matrix<f64>;
pub type CsInstance64 = CsInstance<f64>;
pub type UncertainCsInstance64 = UncertainCsInstance<f64>;
pub type QuboModel64 = QuboModel<f64>;
pub type IsingModel64 = IsingModel<f64>;
pub type SolveResult64 = SolveResult<f64>;
pub type RecoveryTrace64 = RecoveryTrace<f64>;

pub type Matrix32 = Matrix<f32>;
pub type CsInstance32 = CsInstance<f32>;
pub type QuboModel32 = QuboModel<f32>;
pub type IsingModel32 = IsingModel<f32>;
