use num_complex::Complex64;
use thiserror::Error;

use crate::potentials::Violation;

/// Errors produced by the solvers and special functions.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("series did not converge within {terms} terms ({what})")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("log-gamma pole at z = {0}")]
    Pole(Complex64),

    #[error("gamma function pole at argument {0} (parameter coincidence)")]
    GammaPole(Complex64),

    #[error("x = {x} lies outside the segment support [{lo}, {hi}]")]
    OutOfSupport { x: f64, lo: f64, hi: f64 },

    #[error("boundary value {which} vanishes at the support edge; logarithmic derivative undefined")]
    DegenerateBoundary { which: &'static str },

    #[error("Legendre order {0} is an integer; P^mu and P^-mu are linearly dependent")]
    WronskianCollapse(Complex64),

    #[error("no hypergeometric representation converges at xi = {0}")]
    RepresentationBreakdown(f64),

    #[error("matching system is singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("composite potential failed validation: {0:?}")]
    InvalidComposite(Vec<Violation>),

    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),

    #[error("zero incident energy: incoming current vanishes and the dwell time is unbounded")]
    ZeroEnergy,

    #[error("adaptive quadrature exhausted its budget of {evaluations} evaluations")]
    QuadratureFailure { evaluations: usize },

    #[error("integrator step underflowed to {step:e} before reaching tolerance")]
    StiffnessWarning { step: f64 },

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the failure stems from bad input (as opposed to a numerical breakdown).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidComposite(_)
                | Error::NonPositiveEnergy(_)
                | Error::ZeroEnergy
                | Error::OutOfSupport { .. }
                | Error::Parse(_)
        )
    }
}
