use thiserror::Error;

/// Errors raised by the group algebra, the character engines and the estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operands belong to different groups: {0}")]
    SpecMismatch(String),

    #[error("size cap exceeded: {what} would reach {requested}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("generator is not a bijection: {0}")]
    BadGenerator(String),

    #[error("character table spectrum stayed degenerate after {0} attempts")]
    DegenerateSpectrum(usize),

    #[error("character sum {value} is not within {tol} of an integer")]
    NonIntegral { value: f64, tol: f64 },

    #[error("expected a real result, imaginary part is {0}")]
    NonRealResult(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("angle {0} rad is within 1e-12 of the lattice 2πZ but not on it; pass it as an exact fraction of π")]
    AmbiguousInput(f64),

    #[error("eigenangles must sum to 0 mod 2π, residual is {0}")]
    ConstraintViolation(f64),

    #[error("N is not a subgroup of G⁰ × Δ: {0}")]
    NotASubgroup(String),

    #[error("N must be central in Δ: {0}")]
    NotCentral(String),

    #[error("N must embed diagonally as n ↦ (n, n⁻¹): {0}")]
    NotDiagonal(String),

    #[error("action is not a homomorphism Φ → GL_k(Z): {0}")]
    NotAHomomorphism(String),

    #[error("action matrix is not unimodular: {0}")]
    NotUnimodular(String),

    #[error("torus coordinates must be exact rationals: {0}")]
    IrrationalElement(String),

    #[error("no h0 solves [x, h0] = g")]
    NoWitness,

    #[error("sampling is not supported for {0}")]
    UnsupportedSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Validation problems (bad input) as opposed to computational failures
    /// such as caps or a broken character table.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::CapExceeded { .. }
                | Error::DegenerateSpectrum(_)
                | Error::NonIntegral { .. }
                | Error::NonRealResult(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
