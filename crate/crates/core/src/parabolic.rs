//! Exact scattering off a single truncated parabolic barrier.
//!
//! Inside the support the Schrödinger equation reads
//! `psi'' + [beta^2 (x-gamma)^2 - (v0 - k^2)] psi = 0` with `v0 = 2 m U0 / hbar^2`
//! and `beta = sqrt(v0) / alpha`. Its even and odd solutions are
//!
//! ```text
//! psi_e = e^{-i beta y^2 / 2} M(a_e, 1/2, i beta y^2)
//! psi_o = sqrt(2 beta) y e^{-i beta y^2 / 2} M(a_o, 3/2, i beta y^2)
//! a_e = (1 + i k^2/beta - i alpha^2 beta) / 4,  a_o = a_e + 1/2,  y = x - gamma
//! ```
//!
//! normalized so that `psi_e(gamma) = 1`, `psi_o'(gamma) = sqrt(2 beta)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::potentials::ParabolicShape;
use crate::specfun::{kummer_m, kummer_m_deriv, weber_even, weber_odd, Complex, SeriesControl, I};
use crate::units::UnitSystem;

/// Boundary values smaller than this fraction of their scale make the
/// logarithmic derivative unusable.
pub const DEGENERATE_BOUNDARY_TOL: f64 = 1e-12;

/// Relative slack when deciding whether `x` lies in the closed support.
const SUPPORT_SLACK: f64 = 1e-12;

/// Values and x-derivatives of the even/odd pair at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicBasisPoint {
    pub psi_e: Complex,
    pub dpsi_e: Complex,
    pub psi_o: Complex,
    pub dpsi_o: Complex,
}

impl ParabolicBasisPoint {
    pub fn wronskian(&self) -> Complex {
        self.psi_e * self.dpsi_o - self.dpsi_e * self.psi_o
    }
}

/// Precomputed parameters of the even/odd basis for one `(shape, E)`.
#[derive(Debug, Clone)]
pub struct ParabolicBasis {
    shape: ParabolicShape,
    k: f64,
    beta: f64,
    a_even: Complex,
    a_odd: Complex,
    ctl: SeriesControl,
}

impl ParabolicBasis {
    pub fn new(shape: ParabolicShape, energy: f64, units: &UnitSystem) -> Result<Self> {
        if !(energy > 0.0) {
            return Err(Error::NonPositiveEnergy(energy));
        }
        let k = units.wave_number(energy);
        let beta = units.reduced(shape.u0).sqrt() / shape.alpha;
        let a_even = 0.25 * (1.0 + I * (k * k / beta) - I * (shape.alpha * shape.alpha * beta));
        Ok(ParabolicBasis { shape, k, beta, a_even, a_odd: a_even + 0.5, ctl: SeriesControl::default() })
    }

    pub fn shape(&self) -> &ParabolicShape {
        &self.shape
    }

    pub fn wave_number(&self) -> f64 {
        self.k
    }

    /// `beta = sqrt(2 m U0) / (hbar alpha)`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Parameter `a` of `w'' + (z^2/4 - a) w = 0`, equal to `(v0 - k^2) / (2 beta)`.
    pub fn weber_parameter(&self) -> f64 {
        (self.beta * self.beta * self.shape.alpha * self.shape.alpha - self.k * self.k) / (2.0 * self.beta)
    }

    /// Exact value of the constant Wronskian, `sqrt(2 beta)`.
    pub fn wronskian(&self) -> f64 {
        (2.0 * self.beta).sqrt()
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.shape.support();
        let slack = SUPPORT_SLACK * self.shape.alpha.max(self.shape.gamma.abs());
        x >= lo - slack && x <= hi + slack
    }

    pub fn at(&self, x: f64) -> Result<ParabolicBasisPoint> {
        if !self.contains(x) {
            let (lo, hi) = self.shape.support();
            return Err(Error::OutOfSupport { x, lo, hi });
        }
        self.eval(x - self.shape.gamma)
    }

    /// Evaluates at offset `y = x - gamma` without a support check.
    pub(crate) fn eval(&self, y: f64) -> Result<ParabolicBasisPoint> {
        let beta = self.beta;
        let z = I * (beta * y * y);
        let phase = (-I * (0.5 * beta * y * y)).exp();
        let half = Complex::new(0.5, 0.0);
        let three_halves = Complex::new(1.5, 0.0);
        let m_e = kummer_m(self.a_even, half, z, &self.ctl)?;
        let dm_e = kummer_m_deriv(self.a_even, half, z, &self.ctl)?;
        let m_o = kummer_m(self.a_odd, three_halves, z, &self.ctl)?;
        let dm_o = kummer_m_deriv(self.a_odd, three_halves, z, &self.ctl)?;
        let s = (2.0 * beta).sqrt();
        // d/dy of the phase is -i beta y, of the Kummer argument 2 i beta y
        let psi_e = phase * m_e;
        let dpsi_e = phase * I * (beta * y) * (2.0 * dm_e - m_e);
        let psi_o = s * y * phase * m_o;
        let dpsi_o = s * phase * (m_o + I * (beta * y * y) * (2.0 * dm_o - m_o));
        Ok(ParabolicBasisPoint { psi_e, dpsi_e, psi_o, dpsi_o })
    }

    /// Real even/odd values via the Weber power series: `w(a, sqrt(2 beta) y)`.
    pub fn eval_series(&self, y: f64) -> Result<(f64, f64)> {
        let a = self.weber_parameter();
        let z = (2.0 * self.beta).sqrt() * y;
        Ok((weber_even(a, z, &self.ctl)?, weber_odd(a, z, &self.ctl)?))
    }
}

/// Even/odd basis and x-derivatives at `x` for the barrier `shape` at energy `E`.
pub fn basis_at(shape: ParabolicShape, energy: f64, units: &UnitSystem, x: f64) -> Result<ParabolicBasisPoint> {
    ParabolicBasis::new(shape, energy, units)?.at(x)
}

/// How the coefficients were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingleMethod {
    /// Logarithmic-derivative closed form.
    LogDerivative,
    /// Direct 4x4 matching solve (boundary value too close to zero).
    Direct,
}

/// Coefficients of `e^{ikx} + r e^{-ikx}`, `A psi_e + B psi_o`, `t e^{ikx}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleBarrierScattering {
    pub r: Complex,
    pub t: Complex,
    pub a_coef: Complex,
    pub b_coef: Complex,
    pub big_r: f64,
    pub big_t: f64,
    /// `alpha psi_e'(alpha) / psi_e(alpha)`.
    pub l_e: f64,
    /// `alpha psi_o'(alpha) / psi_o(alpha)`.
    pub l_o: f64,
    pub method: SingleMethod,
}

/// Reflection and transmission for one parabolic barrier.
///
/// Uses the logarithmic-derivative form and falls back to the direct
/// matching solve when `psi_e` or `psi_o` nearly vanishes at the edge.
pub fn scattering_single(shape: ParabolicShape, energy: f64, units: &UnitSystem) -> Result<SingleBarrierScattering> {
    let basis = ParabolicBasis::new(shape, energy, units)?;
    match log_derivative_form(&basis) {
        Err(Error::DegenerateBoundary { .. }) => direct(&basis),
        other => other,
    }
}

/// The logarithmic-derivative closed form; fails with `DegenerateBoundary`
/// instead of falling back.
pub fn scattering_single_log_derivative(
    shape: ParabolicShape,
    energy: f64,
    units: &UnitSystem,
) -> Result<SingleBarrierScattering> {
    log_derivative_form(&ParabolicBasis::new(shape, energy, units)?)
}

/// Direct solve of the four matching equations at the two support edges.
pub fn scattering_single_direct(
    shape: ParabolicShape,
    energy: f64,
    units: &UnitSystem,
) -> Result<SingleBarrierScattering> {
    direct(&ParabolicBasis::new(shape, energy, units)?)
}

fn log_derivative_form(basis: &ParabolicBasis) -> Result<SingleBarrierScattering> {
    let alpha = basis.shape.alpha;
    let k = basis.k;
    let edge = basis.eval(alpha)?;
    for (value, deriv, which) in [(edge.psi_e, edge.dpsi_e, "psi_e(alpha)"), (edge.psi_o, edge.dpsi_o, "psi_o(alpha)")]
    {
        let scale = value.norm().max(alpha * deriv.norm());
        if value.norm() <= DEGENERATE_BOUNDARY_TOL * scale {
            return Err(Error::DegenerateBoundary { which });
        }
    }
    // psi_e and psi_o are real; the imaginary parts are series rounding
    let l_e = (alpha * edge.dpsi_e / edge.psi_e).re;
    let l_o = (alpha * edge.dpsi_o / edge.psi_o).re;
    let ka = k * alpha;
    let ika = I * ka;
    let even = (l_e + ika) / (l_e - ika);
    let odd = (l_o + ika) / (l_o - ika);
    let back = (-2.0 * ika).exp();
    let r0 = -0.5 * back * (even + odd);
    let t0 = -0.5 * back * (even - odd);
    let (fwd, bwd) = (ika.exp(), (-ika).exp());
    let a0 = ((t0 + r0) * fwd + bwd) / (2.0 * edge.psi_e);
    let b0 = ((t0 - r0) * fwd - bwd) / (2.0 * edge.psi_o);
    let denom = (l_e * l_e + ka * ka) * (l_o * l_o + ka * ka);
    let big_r = (l_e * l_o + ka * ka).powi(2) / denom;
    let big_t = ka * ka * (l_e - l_o).powi(2) / denom;
    Ok(translate(basis, r0, t0, a0, b0, big_r, big_t, l_e, l_o, SingleMethod::LogDerivative))
}

fn direct(basis: &ParabolicBasis) -> Result<SingleBarrierScattering> {
    let alpha = basis.shape.alpha;
    let k = basis.k;
    let left = basis.eval(-alpha)?;
    let right = basis.eval(alpha)?;
    let ik = I * k;
    // unknowns (r, A, B, t) in barrier-centered coordinates
    let mut m = Matrix::zeros(4);
    let e_l = (-ik * alpha).exp();
    let e_r = (ik * alpha).exp();
    m.set(0, 0, (ik * alpha).exp());
    m.set(0, 1, -left.psi_e);
    m.set(0, 2, -left.psi_o);
    m.set(1, 0, -ik * (ik * alpha).exp());
    m.set(1, 1, -left.dpsi_e);
    m.set(1, 2, -left.dpsi_o);
    m.set(2, 1, right.psi_e);
    m.set(2, 2, right.psi_o);
    m.set(2, 3, -e_r);
    m.set(3, 1, right.dpsi_e);
    m.set(3, 2, right.dpsi_o);
    m.set(3, 3, -ik * e_r);
    let rhs = [-e_l, -ik * e_l, Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)];
    let sol = linalg::solve(&m, &rhs)?;
    let (r0, a0, b0, t0) = (sol.x[0], sol.x[1], sol.x[2], sol.x[3]);
    let l_e = (alpha * right.dpsi_e / right.psi_e).re;
    let l_o = (alpha * right.dpsi_o / right.psi_o).re;
    let (big_r, big_t) = (r0.norm_sqr(), t0.norm_sqr());
    Ok(translate(basis, r0, t0, a0, b0, big_r, big_t, l_e, l_o, SingleMethod::Direct))
}

/// Moves centered-coordinate coefficients to a barrier centered at `gamma`:
/// `psi(x) = e^{ik gamma} psi_0(x - gamma)`.
#[allow(clippy::too_many_arguments)]
fn translate(
    basis: &ParabolicBasis,
    r0: Complex,
    t0: Complex,
    a0: Complex,
    b0: Complex,
    big_r: f64,
    big_t: f64,
    l_e: f64,
    l_o: f64,
    method: SingleMethod,
) -> SingleBarrierScattering {
    let shift = (I * (basis.k * basis.shape.gamma)).exp();
    SingleBarrierScattering {
        r: r0 * shift * shift,
        t: t0,
        a_coef: a0 * shift,
        b_coef: b0 * shift,
        big_r,
        big_t,
        l_e,
        l_o,
        method,
    }
}

/// `psi(x)` and `psi'(x)` of the assembled three-region solution.
pub fn wavefunction_single_with_derivative(
    basis: &ParabolicBasis,
    sol: &SingleBarrierScattering,
    x: f64,
) -> Result<(Complex, Complex)> {
    let (lo, hi) = basis.shape.support();
    let ik = I * basis.k;
    if x < lo {
        let (f, b) = ((ik * x).exp(), (-ik * x).exp());
        Ok((f + sol.r * b, ik * (f - sol.r * b)))
    } else if x > hi {
        let f = (ik * x).exp();
        Ok((sol.t * f, ik * sol.t * f))
    } else {
        let p = basis.eval(x - basis.shape.gamma)?;
        Ok((sol.a_coef * p.psi_e + sol.b_coef * p.psi_o, sol.a_coef * p.dpsi_e + sol.b_coef * p.dpsi_o))
    }
}

/// `psi(x)` of the assembled three-region solution.
pub fn wavefunction_single(
    shape: ParabolicShape,
    energy: f64,
    units: &UnitSystem,
    sol: &SingleBarrierScattering,
    x: f64,
) -> Result<Complex> {
    let basis = ParabolicBasis::new(shape, energy, units)?;
    Ok(wavefunction_single_with_derivative(&basis, sol, x)?.0)
}
