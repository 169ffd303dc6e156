//! The sech^2 barrier: associated Legendre solutions, closed-form `r`, `t`,
//! and the basis pair for the shifted compact variant.
//!
//! With `xi = tanh(alpha (x - gamma))` the Schrödinger equation becomes the
//! associated Legendre equation with degree `nu`, `nu (nu + 1) = -v0 / alpha^2`,
//! and order `mu = i k / alpha` (or `i sqrt(k^2 + beta^2) / alpha` when the
//! barrier is shifted down by `hbar^2 beta^2 / 2m`). Here `v0 = 2 m U0 / hbar^2`.
//!
//! The order sign is fixed to `+i`: `P^mu` then behaves like `e^{ikx}` as
//! `x -> +inf`, so it alone carries the scattering state. The opposite sign
//! swaps the roles of `P^mu` and `P^-mu`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::SechShape;
use crate::specfun::{gauss_f, gauss_f_deriv, log_gamma, Complex, SeriesControl, I};
use crate::units::UnitSystem;

/// Degree, order and argument of `P^mu_nu(xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreParams {
    pub mu: Complex,
    pub nu: Complex,
    pub xi: f64,
}

/// Two independent solutions of a region ODE and their x-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisPair {
    pub f1: Complex,
    pub df1: Complex,
    pub f2: Complex,
    pub df2: Complex,
}

impl BasisPair {
    pub fn wronskian(&self) -> Complex {
        self.f1 * self.df2 - self.df1 * self.f2
    }
}

/// Degree for `nu (nu + 1) = -strength`, where `strength = v0 / alpha^2`.
///
/// Real for `4 strength <= 1`; otherwise `-1/2 + (i/2) sqrt(4 strength - 1)`.
pub fn legendre_degree(strength: f64) -> Complex {
    let disc = 1.0 - 4.0 * strength;
    if disc >= 0.0 {
        Complex::new(0.5 * (-1.0 + disc.sqrt()), 0.0)
    } else {
        Complex::new(-0.5, 0.5 * (-disc).sqrt())
    }
}

fn lg(z: Complex) -> Result<Complex> {
    log_gamma(z).map_err(|e| match e {
        Error::Pole(z) => Error::GammaPole(z),
        other => other,
    })
}

/// `P^mu_nu(xi)` on `(-1, 1)`.
///
/// Uses the expansion about `xi = 1` for `xi >= 0` and the continued form
/// about `xi = -1` for `xi < 0`, so the hypergeometric argument never
/// exceeds one half.
pub fn legendre_p(p: LegendreParams, ctl: &SeriesControl) -> Result<Complex> {
    if !(p.xi > -1.0 && p.xi < 1.0) {
        return Err(Error::InvalidParameter(format!("xi must lie in (-1, 1), got {}", p.xi)));
    }
    Ok(legendre_at_rapidity(p.mu, p.nu, p.xi.atanh(), ctl)?.0)
}

/// Upper-branch value only (valid for any `xi` in (-1, 1) but meant for `xi >= 0`).
pub fn legendre_p_upper(p: LegendreParams, ctl: &SeriesControl) -> Result<Complex> {
    Ok(upper(p.mu, p.nu, p.xi.atanh(), ctl)?.0)
}

/// Lower-branch value only (meant for `xi < 0`).
pub fn legendre_p_lower(p: LegendreParams, ctl: &SeriesControl) -> Result<Complex> {
    Ok(lower(p.mu, p.nu, p.xi.atanh(), ctl)?.0)
}

/// `P^mu_nu(tanh s)` and its derivative with respect to `s`.
///
/// Working in `s` keeps `(1 +- xi)` and the power prefactor exact far out on
/// the tails, where `xi` rounds to `+-1`.
pub(crate) fn legendre_at_rapidity(
    mu: Complex,
    nu: Complex,
    s: f64,
    ctl: &SeriesControl,
) -> Result<(Complex, Complex)> {
    if !s.is_finite() {
        return Err(Error::RepresentationBreakdown(s.tanh()));
    }
    if s >= 0.0 {
        upper(mu, nu, s, ctl)
    } else {
        lower(mu, nu, s, ctl)
    }
}

/// `(1 - xi)/2`, `(1 + xi)/2` and `1 - xi^2` for `xi = tanh s`.
fn half_gaps(s: f64) -> (f64, f64, f64) {
    let lo = 1.0 / (1.0 + (2.0 * s).exp());
    let hi = 1.0 / (1.0 + (-2.0 * s).exp());
    (lo, hi, 4.0 * lo * hi)
}

fn upper(mu: Complex, nu: Complex, s: f64, ctl: &SeriesControl) -> Result<(Complex, Complex)> {
    let (z, _, sech2) = half_gaps(s);
    let (a, b, c) = (-nu, nu + 1.0, 1.0 - mu);
    // ((1+xi)/(1-xi))^{mu/2} = e^{mu s}
    let pref = (mu * s - lg(c)?).exp();
    let f = gauss_f(a, b, c, Complex::new(z, 0.0), ctl)?;
    let df = gauss_f_deriv(a, b, c, Complex::new(z, 0.0), ctl)?;
    Ok((pref * f, pref * (mu * f - 0.5 * sech2 * df)))
}

fn lower(mu: Complex, nu: Complex, s: f64, ctl: &SeriesControl) -> Result<(Complex, Complex)> {
    let (_, z, sech2) = half_gaps(s);
    let zc = Complex::new(z, 0.0);
    let (a, b) = (-nu, nu + 1.0);
    let c1 = (lg(-mu)? - lg(1.0 + nu - mu)? - lg(-nu - mu)? + mu * s).exp();
    let f1 = gauss_f(a, b, 1.0 + mu, zc, ctl)?;
    let df1 = gauss_f_deriv(a, b, 1.0 + mu, zc, ctl)?;
    let c2 = -(PI * nu).sin() / PI * (lg(mu)? - mu * s).exp();
    let f2 = gauss_f(a, b, 1.0 - mu, zc, ctl)?;
    let df2 = gauss_f_deriv(a, b, 1.0 - mu, zc, ctl)?;
    let value = c1 * f1 + c2 * f2;
    let deriv = c1 * (mu * f1 + 0.5 * sech2 * df1) + c2 * (-mu * f2 + 0.5 * sech2 * df2);
    Ok((value, deriv))
}

/// Closed-form transmission in the two regimes of `8 U0 / alpha^2` (with
/// `hbar = m = 1`), written in exponentially scaled form so large arguments
/// do not overflow.
pub fn landau_transmission_closed_form(kappa: f64, strength: f64) -> f64 {
    let s4 = 4.0 * strength;
    let a = 2.0 * PI * kappa;
    let (b, oscillating) = if s4 <= 1.0 { (0.0, PI * (1.0 - s4).sqrt()) } else { (PI * (s4 - 1.0).sqrt(), 0.0) };
    let m = a.max(b);
    if m < 600.0 {
        let sh = (PI * kappa).sinh();
        let c = if s4 <= 1.0 { oscillating.cos() } else { b.cosh() };
        return 2.0 * sh * sh / (c + a.cosh());
    }
    // numerator and denominator divided by e^m / 2
    let scaled_cosh = |x: f64| (x - m).exp() + (-x - m).exp();
    let num = scaled_cosh(a) - 2.0 * (-m).exp();
    let c = if s4 <= 1.0 { 2.0 * oscillating.cos() * (-m).exp() } else { scaled_cosh(b) };
    num / (c + scaled_cosh(a))
}

/// Closed-form scattering off the whole-line barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauScattering {
    pub r: Complex,
    pub t: Complex,
    pub big_r: f64,
    pub big_t: f64,
    /// Factor multiplying `P^mu_nu` in the scattering state (barrier at the origin).
    pub normalization: Complex,
    /// Transmission from the regime-specific trigonometric/hyperbolic form.
    pub big_t_closed_form: f64,
}

/// `r`, `t` for `u0 / cosh^2(alpha_inv (x - gamma))` on the whole line.
pub fn landau_scattering(shape: SechShape, energy: f64, units: &UnitSystem) -> Result<LandauScattering> {
    if shape.beta_shift != 0.0 {
        return Err(Error::InvalidParameter("the whole-line barrier takes no downward shift".into()));
    }
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    let k = units.wave_number(energy);
    let alpha = shape.alpha_inv;
    let kappa = k / alpha;
    let strength = units.reduced(shape.u0) / (alpha * alpha);
    let nu = legendre_degree(strength);
    let ik = I * kappa;
    let log_n = lg(-nu - ik)? + lg(1.0 + nu - ik)? - lg(-ik)?;
    let normalization = log_n.exp();
    let t0 = (log_n - lg(1.0 - ik)?).exp();
    let r0 = -(log_n + lg(ik)?).exp() * (PI * nu).sin() / PI;
    let shift = (I * (k * shape.gamma)).exp();
    let r = r0 * shift * shift;
    Ok(LandauScattering {
        r,
        t: t0,
        big_r: r0.norm_sqr(),
        big_t: t0.norm_sqr(),
        normalization,
        big_t_closed_form: landau_transmission_closed_form(kappa, strength),
    })
}

/// Evaluator for the scattering state of the whole-line barrier.
#[derive(Debug, Clone)]
pub struct LandauWave {
    shape: SechShape,
    k: f64,
    mu: Complex,
    nu: Complex,
    /// `N e^{ik gamma}`.
    amplitude: Complex,
    ctl: SeriesControl,
}

impl LandauWave {
    pub fn new(shape: SechShape, energy: f64, units: &UnitSystem, sol: &LandauScattering) -> Self {
        let k = units.wave_number(energy);
        let strength = units.reduced(shape.u0) / (shape.alpha_inv * shape.alpha_inv);
        LandauWave {
            shape,
            k,
            mu: I * (k / shape.alpha_inv),
            nu: legendre_degree(strength),
            amplitude: sol.normalization * (I * (k * shape.gamma)).exp(),
            ctl: SeriesControl::default(),
        }
    }

    /// `psi(x)` and `psi'(x)`.
    pub fn at(&self, x: f64) -> Result<(Complex, Complex)> {
        let s = self.shape.alpha_inv * (x - self.shape.gamma);
        let (p, dp) = legendre_at_rapidity(self.mu, self.nu, s, &self.ctl)?;
        Ok((self.amplitude * p, self.amplitude * self.shape.alpha_inv * dp))
    }

    pub fn wave_number(&self) -> f64 {
        self.k
    }
}

/// Basis `P^mu_nu(xi)`, `P^-mu_nu(xi)` of the shifted compact sech^2 segment.
#[derive(Debug, Clone)]
pub struct SechBasis {
    shape: SechShape,
    support: (f64, f64),
    mu: Complex,
    nu: Complex,
    ctl: SeriesControl,
}

impl SechBasis {
    pub fn new(shape: SechShape, energy: f64, units: &UnitSystem) -> Result<Self> {
        if !(energy > 0.0) {
            return Err(Error::NonPositiveEnergy(energy));
        }
        if !(shape.beta_shift > 0.0) {
            return Err(Error::InvalidParameter("compact sech^2 segment needs beta_shift > 0".into()));
        }
        let k2 = units.reduced(energy);
        let alpha = shape.alpha_inv;
        let mu = I * ((k2 + shape.beta_shift * shape.beta_shift).sqrt() / alpha);
        let nu = legendre_degree(units.reduced(shape.u0) / (alpha * alpha));
        let collapse = (PI * mu).sin().norm();
        if collapse <= 1e-300 || (mu.re.fract() == 0.0 && mu.im == 0.0) {
            return Err(Error::WronskianCollapse(mu));
        }
        Ok(SechBasis { shape, support: shape.support(units), mu, nu, ctl: SeriesControl::default() })
    }

    pub fn order(&self) -> Complex {
        self.mu
    }

    pub fn degree(&self) -> Complex {
        self.nu
    }

    /// Exact x-Wronskian `-2 alpha sin(mu pi) / pi` of the pair.
    pub fn wronskian(&self) -> Complex {
        -2.0 * self.shape.alpha_inv * (PI * self.mu).sin() / PI
    }

    pub fn at(&self, x: f64) -> Result<BasisPair> {
        let (lo, hi) = self.support;
        let slack = 1e-12 * (hi - lo).max(self.shape.gamma.abs());
        if x < lo - slack || x > hi + slack {
            return Err(Error::OutOfSupport { x, lo, hi });
        }
        self.eval(x)
    }

    pub(crate) fn eval(&self, x: f64) -> Result<BasisPair> {
        let alpha = self.shape.alpha_inv;
        let s = alpha * (x - self.shape.gamma);
        let (f1, d1) = legendre_at_rapidity(self.mu, self.nu, s, &self.ctl)?;
        let (f2, d2) = legendre_at_rapidity(-self.mu, self.nu, s, &self.ctl)?;
        Ok(BasisPair { f1, df1: alpha * d1, f2, df2: alpha * d2 })
    }
}

/// Basis pair of a compact sech^2 segment at `x`.
pub fn sech_basis_at(shape: SechShape, energy: f64, units: &UnitSystem, x: f64) -> Result<BasisPair> {
    SechBasis::new(shape, energy, units)?.at(x)
}
