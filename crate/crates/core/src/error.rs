use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range 1..=3")]
    IndexOutOfRange { index: usize },

    #[error("expected {expected} components, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not antisymmetric: residual {residual:.3e} exceeds {allowed:.3e}")]
    NotAntisymmetric { residual: f64, allowed: f64 },

    #[error("realized coefficient `{field}` has imaginary residue {residual:.3e}")]
    ImaginaryResidue { field: &'static str, residual: f64 },

    #[error("non-finite value in `{field}`")]
    NonFinite { field: &'static str },

    #[error("invalid step size dt={dt} for horizon T={horizon}")]
    StepSize { dt: f64, horizon: f64 },

    #[error("initial Bloch vector has norm {norm} > 1; not a density matrix")]
    InvalidState { norm: f64 },
}
