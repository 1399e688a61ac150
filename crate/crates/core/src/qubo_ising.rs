//! QUBO and Ising models for the penalized ℓ₀ objective, their energies and
//! the binary↔spin change of variables with offset bookkeeping.
//!
//! For an instance `(A, y, λ)` and binary `x`,
//!
//! ```text
//! ‖y − Ax‖² + λ‖x‖₀ = Σᵢ linᵢ xᵢ + Σ_{i<j} quadᵢⱼ xᵢ xⱼ + ‖y‖²
//! linᵢ  = λ + Σₜ Aₜᵢ (Aₜᵢ − 2yₜ)
//! quadᵢⱼ = 2 Σₜ Aₜᵢ Aₜⱼ
//! ```
//!
//! and the model offset carries `‖y‖²`, so `energy + offset` is always the
//! objective itself.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instances::{BinarySignal, CsInstance};
use crate::scalar::{sq_norm, Scalar};

/// Upper-triangular quadratic terms keyed by `(i, j)` with `i < j`.
pub type QuadTerms<T> = BTreeMap<(usize, usize), T>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vartype {
    /// Variables in `{0, 1}`.
    Binary,
    /// Variables in `{−1, +1}`.
    Spin,
}

impl Vartype {
    /// The two admissible values, low first.
    pub fn values(self) -> [i8; 2] {
        match self {
            Vartype::Binary => [0, 1],
            Vartype::Spin => [-1, 1],
        }
    }

    pub fn check(self, state: &[i8]) -> Result<()> {
        let [lo, hi] = self.values();
        match state.iter().position(|&v| v != lo && v != hi) {
            Some(i) => Err(Error::Domain(format!(
                "entry {i} is {}, expected {lo} or {hi}",
                state[i]
            ))),
            None => Ok(()),
        }
    }
}

/// Shared view of a quadratic model over binary or spin variables.
pub trait QuadraticModel<T: Scalar> {
    fn vartype(&self) -> Vartype;
    fn num_vars(&self) -> usize;
    fn linear(&self) -> &[T];
    fn quadratic(&self) -> &QuadTerms<T>;
    fn offset(&self) -> T;

    /// Energy without offset. Panics on length mismatch; callers validate.
    fn energy_unchecked(&self, state: &[i8]) -> T {
        let lin: T = self
            .linear()
            .iter()
            .zip(state)
            .map(|(&h, &s)| h * T::lit(s as f64))
            .sum();
        let quad: T = self
            .quadratic()
            .iter()
            .map(|(&(i, j), &w)| w * T::lit((state[i] * state[j]) as f64))
            .sum();
        lin + quad
    }

    /// Energy without offset, after checking length and domain.
    fn energy(&self, state: &[i8]) -> Result<T> {
        if state.len() != self.num_vars() {
            return Err(Error::dim(format!(
                "state has length {}, model has {} variables",
                state.len(),
                self.num_vars()
            )));
        }
        self.vartype().check(state)?;
        Ok(self.energy_unchecked(state))
    }

    /// Adjacency lists `i → [(j, w)]` of the quadratic terms, both directions.
    fn neighbors(&self) -> Vec<Vec<(usize, T)>> {
        let mut adj = vec![Vec::new(); self.num_vars()];
        for (&(i, j), &w) in self.quadratic() {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        adj
    }

    /// Largest absolute linear or quadratic coefficient.
    fn max_abs_coefficient(&self) -> T {
        self.linear()
            .iter()
            .chain(self.quadratic().values())
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }
}

fn canonical_terms<T: Scalar>(n: usize, terms: impl IntoIterator<Item = ((usize, usize), T)>) -> Result<QuadTerms<T>> {
    let mut out = QuadTerms::new();
    for ((a, b), w) in terms {
        if a == b {
            return Err(Error::dim(format!("quadratic term ({a}, {b}) is a self-loop")));
        }
        let key = (a.min(b), a.max(b));
        if key.1 >= n {
            return Err(Error::dim(format!("quadratic term {key:?} out of range for n = {n}")));
        }
        if !w.is_finite() {
            return Err(Error::Numeric(format!("quadratic term {key:?} is not finite")));
        }
        if out.insert(key, w).is_some() {
            return Err(Error::dim(format!("duplicate quadratic term {key:?}")));
        }
    }
    Ok(out)
}

fn check_linear<T: Scalar>(lin: &[T], offset: T) -> Result<()> {
    if !lin.iter().all(|v| v.is_finite()) || !offset.is_finite() {
        return Err(Error::Numeric("model coefficients must be finite".into()));
    }
    Ok(())
}

macro_rules! model_type {
    ($(#[$doc:meta])* $name:ident, $lin:ident, $quad:ident, $vartype:expr) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name<T> {
            $lin: Vec<T>,
            $quad: QuadTerms<T>,
            offset: T,
        }

        impl<T: Scalar> $name<T> {
            /// Builds a model; `(j, i)` keys are canonicalized to `(i, j)`, and
            /// a pair given twice is rejected.
            pub fn new(
                $lin: Vec<T>,
                $quad: impl IntoIterator<Item = ((usize, usize), T)>,
                offset: T,
            ) -> Result<Self> {
                check_linear(&$lin, offset)?;
                let $quad = canonical_terms($lin.len(), $quad)?;
                Ok(Self { $lin, $quad, offset })
            }

            pub fn zeros(n: usize) -> Self {
                Self {
                    $lin: vec![T::zero(); n],
                    $quad: QuadTerms::new(),
                    offset: T::zero(),
                }
            }

            pub fn n(&self) -> usize {
                self.$lin.len()
            }

            pub fn $lin(&self) -> &[T] {
                &self.$lin
            }

            pub fn $quad(&self) -> &QuadTerms<T> {
                &self.$quad
            }

            pub fn offset(&self) -> T {
                self.offset
            }

            /// Multiplies every coefficient and the offset by `c`.
            pub fn scaled(&self, c: T) -> Self {
                Self {
                    $lin: self.$lin.iter().map(|&v| v * c).collect(),
                    $quad: self.$quad.iter().map(|(&k, &v)| (k, v * c)).collect(),
                    offset: self.offset * c,
                }
            }
        }

        impl<T: Scalar> QuadraticModel<T> for $name<T> {
            fn vartype(&self) -> Vartype {
                $vartype
            }
            fn num_vars(&self) -> usize {
                self.$lin.len()
            }
            fn linear(&self) -> &[T] {
                &self.$lin
            }
            fn quadratic(&self) -> &QuadTerms<T> {
                &self.$quad
            }
            fn offset(&self) -> T {
                self.offset
            }
        }
    };
}

model_type!(
    /// `Σ linᵢ xᵢ + Σ_{i<j} quadᵢⱼ xᵢ xⱼ (+ offset)` over `x ∈ {0,1}ⁿ`.
    QuboModel, lin, quad, Vartype::Binary
);
model_type!(
    /// `Σ fieldᵢ zᵢ + Σ_{i<j} couplingᵢⱼ zᵢ zⱼ (+ offset)` over `z ∈ {−1,+1}ⁿ`.
    IsingModel, field, coupling, Vartype::Spin
);

/// QUBO whose energy plus offset equals the penalized objective of `inst`.
pub fn build_qubo<T: Scalar>(inst: &CsInstance<T>) -> QuboModel<T> {
    let a = inst.a();
    let y = inst.y();
    let (m, n) = a.shape();
    let two = T::lit(2.0);
    let lin = (0..n)
        .map(|i| {
            let s: T = (0..m).map(|t| a[(t, i)] * (a[(t, i)] - two * y[t])).sum();
            inst.lambda() + s
        })
        .collect();
    let gram = a.gram();
    let mut quad = QuadTerms::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = two * gram[(i, j)];
            if w != T::zero() {
                quad.insert((i, j), w);
            }
        }
    }
    QuboModel {
        lin,
        quad,
        offset: sq_norm(y),
    }
}

pub fn qubo_energy<T: Scalar>(q: &QuboModel<T>, x: &BinarySignal) -> Result<T> {
    let state: Vec<i8> = x.values().iter().map(|&b| b as i8).collect();
    q.energy(&state)
}

pub fn ising_energy<T: Scalar>(s: &IsingModel<T>, z: &[i8]) -> Result<T> {
    s.energy(z)
}

/// `‖y − Ax‖² + λ‖x‖₀`, evaluated from the instance directly.
pub fn objective<T: Scalar>(inst: &CsInstance<T>, x: &BinarySignal) -> Result<T> {
    if x.len() != inst.n() {
        return Err(Error::dim(format!(
            "signal has length {}, instance has n = {}",
            x.len(),
            inst.n()
        )));
    }
    let ax = inst.a().mul_vec(&x.to_scalars())?;
    let resid: T = inst.y().iter().zip(&ax).map(|(&y, &v)| (y - v) * (y - v)).sum();
    Ok(resid + inst.lambda() * T::from_count(x.sparsity()))
}

/// Substitutes `x = (z + 1)/2`.
pub fn qubo_to_ising<T: Scalar>(q: &QuboModel<T>) -> IsingModel<T> {
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let mut field: Vec<T> = q.lin.iter().map(|&l| l * half).collect();
    let mut coupling = QuadTerms::new();
    let mut offset = q.offset + q.lin.iter().copied().sum::<T>() * half;
    for (&(i, j), &w) in &q.quad {
        let qw = w * quarter;
        field[i] = field[i] + qw;
        field[j] = field[j] + qw;
        coupling.insert((i, j), qw);
        offset = offset + qw;
    }
    IsingModel {
        field,
        coupling,
        offset,
    }
}

/// Substitutes `z = 2x − 1`; inverse of [`qubo_to_ising`] up to rounding.
pub fn ising_to_qubo<T: Scalar>(s: &IsingModel<T>) -> QuboModel<T> {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let mut lin: Vec<T> = s.field.iter().map(|&h| two * h).collect();
    let mut quad = QuadTerms::new();
    let mut offset = s.offset - s.field.iter().copied().sum::<T>();
    for (&(i, j), &c) in &s.coupling {
        lin[i] = lin[i] - two * c;
        lin[j] = lin[j] - two * c;
        quad.insert((i, j), four * c);
        offset = offset + c;
    }
    QuboModel { lin, quad, offset }
}
