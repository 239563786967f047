//! Character sums over residue rings and dyadic windows of `γ(w, z)`.

mod bilinear;
mod delta;
mod key;

pub use bilinear::{
    bilinear_scan, bilinear_sum, fit_decay_exponent, nonprimitive_contribution, window,
    BilinearScanResult, Coefficients, DecayFit, ScanConfig, ScanMode, Weighted,
};
pub use delta::{delta_table, sign_class, DeltaClass, DeltaTable, DELTA_MIN_SAMPLES};
pub use key::{
    key_cancellation_sum, key_cancellation_sum_full, periodicity_smoke, predicted_abs,
    primitive_ideals, CharSumResult, FULL_GRID_LIMIT, PERIOD_LIMIT,
};

use thiserror::Error;

use crate::quadring::QuadError;
use crate::symbols::SymbolError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharSumError {
    #[error("enumeration bound exceeded: {0} residues")]
    BoundExceeded(u128),
    #[error("{0} is not primitive")]
    NotPrimitive(String),
    #[error("delta not constant on class {0}")]
    NonConstantClass(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}
