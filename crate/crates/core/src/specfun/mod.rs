//! Complex special functions used by the closed-form solutions.
//!
//! Everything here is evaluated by direct power series with an explicit
//! truncation rule (see [`SeriesControl`]); the solvers are responsible for
//! keeping arguments inside the documented convergence budgets.

mod gamma;
mod hypergeometric;
mod weber;

pub use gamma::log_gamma;
pub use hypergeometric::{gauss_f, gauss_f_deriv, kummer_m, kummer_m_deriv, GAUSS_F_MAX_ABS_Z, KUMMER_M_MAX_ABS_Z};
pub use weber::{weber_even, weber_odd};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type Complex = Complex64;

/// Imaginary unit.
pub const I: Complex = Complex::new(0.0, 1.0);

/// Truncation settings for the power series evaluators.
///
/// A series stops once two consecutive terms are both below
/// `rel_tol * |partial sum|`, which guards against an isolated small term in
/// an alternating or oscillating series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { rel_tol: 1e-14, max_terms: 10_000 }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::InvalidParameter(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::InvalidParameter("max_terms must be at least 1".into()));
        }
        Ok(SeriesControl { rel_tol, max_terms })
    }
}

/// `((1+xi)/(1-xi))^exponent` for real `xi` in (-1, 1), computed as the
/// exponential of a real logarithm so no complex branch cut is crossed.
pub fn ratio_power(xi: f64, exponent: Complex) -> Complex {
    let log_ratio = xi.ln_1p() - (-xi).ln_1p();
    (exponent * log_ratio).exp()
}

/// True when `z` is 0, -1, -2, ...
pub(crate) fn is_nonpositive_integer(z: Complex) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

pub(crate) fn check_finite(value: Complex, what: &'static str) -> Result<Complex> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter(format!("{what} produced a non-finite value")))
    }
}
