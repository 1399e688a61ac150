//! Instance data model and seeded generators for measurement matrices and
//! planted binary signals.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{all_finite, sq_norm, Scalar};
use crate::seeds::derive_seed;

/// Dense `m x n` sensing matrix.
pub type MeasurementMatrix<T> = Matrix<T>;

/// Vector in `{0,1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct BinarySignal(Vec<u8>);

impl BinarySignal {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        if let Some(i) = values.iter().position(|&v| v > 1) {
            return Err(Error::Domain(format!(
                "binary signal entry {i} is {}, expected 0 or 1",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Signal with ones exactly on `support`.
    pub fn from_support(n: usize, support: &[usize]) -> Result<Self> {
        let mut v = vec![0; n];
        for &i in support {
            if i >= n {
                return Err(Error::dim(format!("support index {i} out of range for n = {n}")));
            }
            v[i] = 1;
        }
        Ok(Self(v))
    }

    /// Decodes the low `n` bits of `bits`, bit `i` giving entry `i`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self((0..n).map(|i| ((bits >> i) & 1) as u8).collect())
    }

    /// Maps spins through `x = (z + 1) / 2`.
    pub fn from_spins(z: &[i8]) -> Result<Self> {
        z.iter()
            .map(|&s| match s {
                1 => Ok(1),
                -1 => Ok(0),
                other => Err(Error::Domain(format!("spin value {other} is not ±1"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }

    /// Maps bits through `z = 2x − 1`.
    pub fn to_spins(&self) -> Vec<i8> {
        self.0.iter().map(|&b| 2 * b as i8 - 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    /// Number of ones, i.e. the ℓ₀ norm.
    pub fn sparsity(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == 1).then_some(i))
            .collect()
    }

    pub fn to_scalars<T: Scalar>(&self) -> Vec<T> {
        self.0.iter().map(|&b| if b == 1 { T::one() } else { T::zero() }).collect()
    }
}

impl TryFrom<Vec<u8>> for BinarySignal {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BinarySignal> for Vec<u8> {
    fn from(s: BinarySignal) -> Self {
        s.0
    }
}

/// Standard instance: minimize `‖y − Ax‖² + λ‖x‖₀` over binary `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsInstance<T> {
    a: MeasurementMatrix<T>,
    y: Vec<T>,
    lambda: T,
}

impl<T: Scalar> CsInstance<T> {
    pub fn new(a: MeasurementMatrix<T>, y: Vec<T>, lambda: T) -> Result<Self> {
        check_matrix(&a, "A")?;
        if y.len() != a.rows() {
            return Err(Error::dim(format!(
                "len(y) = {} but A has {} rows",
                y.len(),
                a.rows()
            )));
        }
        if !all_finite(&y) {
            return Err(Error::Numeric("y has non-finite entries".into()));
        }
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be finite and ≥ 0, got {lambda}")));
        }
        Ok(Self { a, y, lambda })
    }

    pub fn a(&self) -> &MeasurementMatrix<T> {
        &self.a
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        Self::new(self.a.clone(), self.y.clone(), lambda)
    }
}

/// Instance with matrix uncertainty: `A(d) = A₀ + Σ dᵢ Aᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertainCsInstance<T> {
    a0: MeasurementMatrix<T>,
    perturbations: Vec<MeasurementMatrix<T>>,
    y: Vec<T>,
    gamma: T,
    lambda: T,
}

impl<T: Scalar> UncertainCsInstance<T> {
    pub fn new(
        a0: MeasurementMatrix<T>,
        perturbations: Vec<MeasurementMatrix<T>>,
        y: Vec<T>,
        gamma: T,
        lambda: T,
    ) -> Result<Self> {
        check_matrix(&a0, "A0")?;
        if perturbations.is_empty() {
            return Err(Error::dim("at least one perturbation matrix is required (r ≥ 1)"));
        }
        for (i, ai) in perturbations.iter().enumerate() {
            if ai.shape() != a0.shape() {
                return Err(Error::dim(format!(
                    "A{} has shape {:?}, expected {:?}",
                    i + 1,
                    ai.shape(),
                    a0.shape()
                )));
            }
            check_matrix(ai, "Ai")?;
        }
        if y.len() != a0.rows() {
            return Err(Error::dim(format!(
                "len(y) = {} but A0 has {} rows",
                y.len(),
                a0.rows()
            )));
        }
        if !all_finite(&y) {
            return Err(Error::Numeric("y has non-finite entries".into()));
        }
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be finite and > 0, got {gamma}")));
        }
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be finite and ≥ 0, got {lambda}")));
        }
        Ok(Self {
            a0,
            perturbations,
            y,
            gamma,
            lambda,
        })
    }

    pub fn a0(&self) -> &MeasurementMatrix<T> {
        &self.a0
    }

    pub fn perturbations(&self) -> &[MeasurementMatrix<T>] {
        &self.perturbations
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn m(&self) -> usize {
        self.a0.rows()
    }

    pub fn n(&self) -> usize {
        self.a0.cols()
    }

    /// Number of perturbation matrices.
    pub fn r(&self) -> usize {
        self.perturbations.len()
    }

    /// The nominal single-matrix instance `(A₀, y, λ)`.
    pub fn nominal(&self) -> Result<CsInstance<T>> {
        CsInstance::new(self.a0.clone(), self.y.clone(), self.lambda)
    }
}

fn check_matrix<T: Scalar>(a: &Matrix<T>, name: &str) -> Result<()> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::dim(format!("{name} must have positive dimensions")));
    }
    if !all_finite(a.as_slice()) {
        return Err(Error::Numeric(format!("{name} has non-finite entries")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// i.i.d. `N(0, 1/m)`.
    Gaussian,
    /// i.i.d. `±1/√m` with equal probability.
    Bernoulli,
}

impl std::str::FromStr for Distribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "bernoulli" => Ok(Self::Bernoulli),
            other => Err(Error::Invalid(format!("unknown distribution `{other}`"))),
        }
    }
}

/// Penalty assigned to generated instances: `10⁻³‖y‖²`, floored at `10⁻⁶`.
pub fn default_lambda<T: Scalar>(y: &[T]) -> T {
    (T::lit(1e-3) * sq_norm(y)).max(T::lit(1e-6))
}

pub fn gen_matrix<T: Scalar>(m: usize, n: usize, dist: Distribution, seed: u64) -> Result<MeasurementMatrix<T>> {
    if m == 0 || n == 0 {
        return Err(Error::dim(format!("matrix shape {m}x{n} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let data = match dist {
        Distribution::Gaussian => (0..m * n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                T::lit(z * scale)
            })
            .collect(),
        Distribution::Bernoulli => (0..m * n)
            .map(|_| T::lit(if rng.random_bool(0.5) { scale } else { -scale }))
            .collect(),
    };
    Matrix::from_row_major(m, n, data)
}

fn planted_signal(n: usize, s: usize, seed: u64) -> Result<BinarySignal> {
    if s > n {
        return Err(Error::Sparsity { s, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut support = index::sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    BinarySignal::from_support(n, &support)
}

/// Planted noiseless instance `y = A x*` with a uniformly random `s`-sparse support.
pub fn gen_planted<T: Scalar>(
    m: usize,
    n: usize,
    s: usize,
    dist: Distribution,
    seed: u64,
) -> Result<(CsInstance<T>, BinarySignal)> {
    if s > n {
        return Err(Error::Sparsity { s, n });
    }
    let a = gen_matrix::<T>(m, n, dist, derive_seed(seed, 0))?;
    let x = planted_signal(n, s, derive_seed(seed, 1))?;
    let y = a.mul_vec(&x.to_scalars())?;
    let lambda = default_lambda(&y);
    Ok((CsInstance::new(a, y, lambda)?, x))
}

/// Scale of the planted uncertainty vector entries.
pub const TRUE_D_STD: f64 = 0.1;

/// Planted uncertain instance `y = A(d) x* + e`, with `e ~ N(0, I/γ)` when
/// `noise` is set. Returns the instance, `x*` and the true `d`.
pub fn gen_uncertain_planted<T: Scalar>(
    m: usize,
    n: usize,
    s: usize,
    r: usize,
    gamma: T,
    noise: bool,
    seed: u64,
) -> Result<(UncertainCsInstance<T>, BinarySignal, Vec<T>)> {
    if s > n {
        return Err(Error::Sparsity { s, n });
    }
    if r == 0 {
        return Err(Error::dim("r must be at least 1"));
    }
    if !(gamma > T::zero()) {
        return Err(Error::Domain(format!("gamma must be > 0, got {gamma}")));
    }
    let a0 = gen_matrix::<T>(m, n, Distribution::Gaussian, derive_seed(seed, 0))?;
    let perturbations = (0..r)
        .map(|i| gen_matrix::<T>(m, n, Distribution::Gaussian, derive_seed(seed, 2 + i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let x = planted_signal(n, s, derive_seed(seed, 1))?;

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
    let d_law = Normal::new(0.0, TRUE_D_STD).expect("valid normal law");
    let true_d: Vec<T> = (0..r).map(|_| T::lit(d_law.sample(&mut rng))).collect();

    let mut a = a0.clone();
    for (&di, ai) in true_d.iter().zip(&perturbations) {
        a = a.add_scaled(di, ai)?;
    }
    let mut y = a.mul_vec(&x.to_scalars())?;
    if noise {
        let sd = 1.0 / gamma.as_f64().sqrt();
        let e_law = Normal::new(0.0, sd).map_err(|e| Error::Numeric(e.to_string()))?;
        for yi in &mut y {
            *yi = *yi + T::lit(e_law.sample(&mut rng));
        }
    }
    let lambda = default_lambda(&y);
    let inst = UncertainCsInstance::new(a0, perturbations, y, gamma, lambda)?;
    Ok((inst, x, true_d))
}
