use crate::error::{Error, Result};
use crate::qubo_ising::IsingModel;
use crate::scalar::Scalar;

/// Admissible field magnitude.
pub const FIELD_RANGE: f64 = 2.0;
/// Admissible coupling magnitude.
pub const COUPLING_RANGE: f64 = 1.0;
pub const DEFAULT_BITS: u32 = 5;

/// Divides the whole model (offset included) by the smallest `scale ≥ 1`
/// that brings fields into `[−2, 2]` and couplings into `[−1, 1]`.
pub fn normalize<T: Scalar>(model: &IsingModel<T>) -> (IsingModel<T>, T) {
    let max_field = model.field().iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let max_coupling = model.coupling().values().fold(T::zero(), |a, v| a.max(v.abs()));
    let scale = (max_field / T::lit(FIELD_RANGE))
        .max(max_coupling / T::lit(COUPLING_RANGE))
        .max(T::one());
    if scale == T::one() {
        return (model.clone(), scale);
    }
    let field = model.field().iter().map(|&v| v / scale).collect();
    let coupling = model.coupling().iter().map(|(&k, &v)| (k, v / scale));
    let scaled = IsingModel::new(field, coupling, model.offset() / scale).expect("scaling keeps a valid model");
    (scaled, scale)
}

fn snap<T: Scalar>(v: T, range: T, levels: T) -> T {
    (v * levels / range).round() * range / levels
}

/// Rounds fields to multiples of `2/L` and couplings to multiples of `1/L`,
/// `L = 2^(bits−1) − 1`, ties away from zero. The offset is untouched.
pub fn quantize<T: Scalar>(model: &IsingModel<T>, bits: u32) -> Result<IsingModel<T>> {
    if !(2..=8).contains(&bits) {
        return Err(Error::Invalid(format!("bits must lie in [2, 8], got {bits}")));
    }
    let (fr, cr) = (T::lit(FIELD_RANGE), T::lit(COUPLING_RANGE));
    if let Some(v) = model.field().iter().find(|v| v.abs() > fr) {
        return Err(Error::Range(format!("field {v} outside [−2, 2]; normalize first")));
    }
    if let Some(v) = model.coupling().values().find(|v| v.abs() > cr) {
        return Err(Error::Range(format!("coupling {v} outside [−1, 1]; normalize first")));
    }
    let levels = T::lit(((1u32 << (bits - 1)) - 1) as f64);
    let field = model.field().iter().map(|&v| snap(v, fr, levels)).collect();
    let coupling = model.coupling().iter().map(|(&k, &v)| (k, snap(v, cr, levels)));
    IsingModel::new(field, coupling, model.offset())
}
