//! Brute-force reference integrator for the stationary Schrödinger equation.
//!
//! Integrates `psi'' = (2m/hbar^2)(U - E) psi` from the right edge of the
//! potential's extent, where the solution is a pure transmitted wave, back to
//! the left edge, and decomposes the result there into incident and
//! reflected plane waves. Nothing here uses a closed-form solution.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::{CompositePotential, Shape};
use crate::specfun::{Complex, I};
use crate::units::UnitSystem;

/// Integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Initial step; `None` picks one from the potential's length scales and `E`.
    pub step: Option<f64>,
    /// Target relative change between successive halvings.
    pub rel_tol: f64,
    /// Free distance added on both sides of the extent before matching.
    pub domain_pad: f64,
    pub max_halvings: u32,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { step: None, rel_tol: 1e-9, domain_pad: 0.0, max_halvings: 12 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(h) = self.step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
            }
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if !(self.domain_pad >= 0.0 && self.domain_pad.is_finite()) {
            return Err(Error::InvalidParameter(format!("domain_pad must be non-negative, got {}", self.domain_pad)));
        }
        Ok(())
    }
}

/// Anything the oracle can integrate through.
pub trait OracleTarget {
    fn units(&self) -> &UnitSystem;

    /// Finite interval outside which `U = 0`; `None` for the free line.
    fn extent(&self) -> Result<Option<(f64, f64)>>;

    /// Points where `U` or its derivatives may jump. Steps never straddle them.
    fn breakpoints(&self) -> Vec<f64>;

    /// `U(x)` for `x` in the panel containing `panel_mid`, so values exactly
    /// at a breakpoint come from the panel being integrated.
    fn potential_in_panel(&self, x: f64, panel_mid: f64) -> f64;

    /// Shortest length over which `U` changes appreciably.
    fn length_scale(&self) -> Option<f64>;

    /// Largest value of `U`.
    fn peak(&self) -> f64;
}

impl OracleTarget for CompositePotential {
    fn units(&self) -> &UnitSystem {
        CompositePotential::units(self)
    }

    fn extent(&self) -> Result<Option<(f64, f64)>> {
        if self.as_landau().is_some() {
            return Err(Error::InvalidParameter(
                "the whole-line sech^2 barrier has no compact support; wrap it in TruncatedPotential".into(),
            ));
        }
        Ok(self.support())
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.interfaces().into_iter().filter(|x| x.is_finite()).collect()
    }

    fn potential_in_panel(&self, x: f64, panel_mid: f64) -> f64 {
        self.segments()[self.segment_index(panel_mid)].shape.value(x, CompositePotential::units(self))
    }

    fn length_scale(&self) -> Option<f64> {
        self.barriers().filter_map(|s| s.shape.length_scale()).reduce(f64::min)
    }

    fn peak(&self) -> f64 {
        self.max_peak()
    }
}

/// A composite cut off to `[lo, hi]`; used for the whole-line sech^2 barrier.
#[derive(Debug, Clone)]
pub struct TruncatedPotential<'a> {
    inner: &'a CompositePotential,
    lo: f64,
    hi: f64,
}

impl<'a> TruncatedPotential<'a> {
    pub fn new(inner: &'a CompositePotential, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad truncation window [{lo}, {hi}]")));
        }
        Ok(TruncatedPotential { inner, lo, hi })
    }

    /// Symmetric window of radius `radius` about the barrier center.
    pub fn around_center(inner: &'a CompositePotential, radius: f64) -> Result<Self> {
        let center = inner.barriers().filter_map(|s| s.shape.center()).next().unwrap_or(0.0);
        Self::new(inner, center - radius, center + radius)
    }
}

impl OracleTarget for TruncatedPotential<'_> {
    fn units(&self) -> &UnitSystem {
        self.inner.units()
    }

    fn extent(&self) -> Result<Option<(f64, f64)>> {
        Ok(Some((self.lo, self.hi)))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().into_iter().filter(|&x| x > self.lo && x < self.hi).collect()
    }

    fn potential_in_panel(&self, x: f64, panel_mid: f64) -> f64 {
        if panel_mid < self.lo || panel_mid > self.hi {
            0.0
        } else {
            self.inner.potential_in_panel(x, panel_mid)
        }
    }

    fn length_scale(&self) -> Option<f64> {
        OracleTarget::length_scale(self.inner)
    }

    fn peak(&self) -> f64 {
        self.inner.max_peak()
    }
}

/// Piecewise-linear potential through `(x, U)` samples, zero outside them.
///
/// Repeated `x` values encode jumps.
#[derive(Debug, Clone)]
pub struct SampledPotential {
    units: UnitSystem,
    xs: Vec<f64>,
    us: Vec<f64>,
}

impl SampledPotential {
    pub fn new(units: UnitSystem, xs: Vec<f64>, us: Vec<f64>) -> Result<Self> {
        if xs.len() != us.len() || xs.len() < 2 {
            return Err(Error::InvalidParameter("need at least two (x, U) samples of equal length".into()));
        }
        if xs.iter().chain(&us).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("samples must be finite".into()));
        }
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("sample x values must be non-decreasing".into()));
        }
        Ok(SampledPotential { units, xs, us })
    }

    /// Parses `x,U` rows; a non-numeric first row is taken as a header.
    pub fn from_csv(units: UnitSystem, text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut us = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed = match fields.as_slice() {
                [x, u] => x.parse::<f64>().and_then(|x| u.parse::<f64>().map(|u| (x, u))).ok(),
                _ => None,
            };
            match parsed {
                Some((x, u)) => {
                    xs.push(x);
                    us.push(u);
                }
                None if xs.is_empty() && n == 0 => continue,
                None => return Err(Error::Parse(format!("line {}: expected `x,U`, got {line:?}", n + 1))),
            }
        }
        Self::new(units, xs, us)
    }

    pub fn from_csv_file(units: UnitSystem, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_csv(units, &text)
    }

    fn interpolate_on(&self, i: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (u0, u1) = (self.us[i], self.us[i + 1]);
        u0 + (u1 - u0) * (x - x0) / (x1 - x0)
    }
}

impl OracleTarget for SampledPotential {
    fn units(&self) -> &UnitSystem {
        &self.units
    }

    fn extent(&self) -> Result<Option<(f64, f64)>> {
        Ok(Some((self.xs[0], self.xs[self.xs.len() - 1])))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.xs.clone()
    }

    fn potential_in_panel(&self, x: f64, panel_mid: f64) -> f64 {
        let n = self.xs.len();
        if panel_mid < self.xs[0] || panel_mid > self.xs[n - 1] {
            return 0.0;
        }
        // last interval whose left end is <= mid and which has positive width
        let i = self.xs.partition_point(|&v| v <= panel_mid).clamp(1, n - 1) - 1;
        if self.xs[i + 1] == self.xs[i] {
            return self.us[i + 1];
        }
        self.interpolate_on(i, x)
    }

    fn length_scale(&self) -> Option<f64> {
        let (lo, hi) = (self.xs[0], self.xs[self.xs.len() - 1]);
        Some((hi - lo).max(f64::MIN_POSITIVE))
    }

    fn peak(&self) -> f64 {
        self.us.iter().copied().fold(0.0, f64::max)
    }
}

/// Potential given by a closure on `[lo, hi]`, zero outside, with no
/// declared breakpoints. Used for shapes without a closed-form solution.
pub struct FnPotential<F: Fn(f64) -> f64> {
    units: UnitSystem,
    lo: f64,
    hi: f64,
    scale: f64,
    peak: f64,
    f: F,
}

impl<F: Fn(f64) -> f64> FnPotential<F> {
    pub fn new(units: UnitSystem, lo: f64, hi: f64, scale: f64, peak: f64, f: F) -> Self {
        FnPotential { units, lo, hi, scale, peak, f }
    }
}

impl<F: Fn(f64) -> f64> OracleTarget for FnPotential<F> {
    fn units(&self) -> &UnitSystem {
        &self.units
    }

    fn extent(&self) -> Result<Option<(f64, f64)>> {
        Ok(Some((self.lo, self.hi)))
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn potential_in_panel(&self, x: f64, _panel_mid: f64) -> f64 {
        (self.f)(x)
    }

    fn length_scale(&self) -> Option<f64> {
        Some(self.scale)
    }

    fn peak(&self) -> f64 {
        self.peak
    }
}

/// Oracle output, normalized to unit incident amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub r: Complex,
    pub t: Complex,
    pub big_r: f64,
    pub big_t: f64,
    /// Step of the finest run.
    pub step: f64,
    pub halvings: u32,
    /// Difference between the last two runs, relative to `|t| + |r|`.
    pub error_estimate: f64,
}

/// Step the oracle starts from when none is configured.
pub fn default_step(p: &impl OracleTarget, energy: f64) -> f64 {
    let units = p.units();
    let k = units.wave_number(energy);
    let kappa = (k * k + units.reduced(p.peak().max(0.0))).sqrt();
    let by_shape = p.length_scale().map_or(f64::INFINITY, |l| l / 200.0);
    by_shape.min(1.0 / (50.0 * kappa))
}

/// `r`, `t` by backward integration with step halving and Richardson
/// extrapolation until two runs agree to `cfg.rel_tol`.
pub fn integrate_scattering(p: &impl OracleTarget, energy: f64, cfg: &IntegratorConfig) -> Result<OracleResult> {
    cfg.validate()?;
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    let Some(window) = padded_extent(p, cfg)? else {
        return Ok(OracleResult {
            r: Complex::new(0.0, 0.0),
            t: Complex::new(1.0, 0.0),
            big_r: 0.0,
            big_t: 1.0,
            step: 0.0,
            halvings: 0,
            error_estimate: 0.0,
        });
    };
    let mut h = cfg.step.unwrap_or_else(|| default_step(p, energy));
    let mut prev = run_fixed(p, energy, window, h);
    for halving in 1..=cfg.max_halvings {
        h *= 0.5;
        if h < f64::EPSILON * (window.1 - window.0).max(1.0) {
            return Err(Error::StiffnessWarning { step: h });
        }
        let next = run_fixed(p, energy, window, h);
        let scale = next.0.norm() + next.1.norm();
        let diff = ((next.0 - prev.0).norm() + (next.1 - prev.1).norm()) / scale;
        if diff <= cfg.rel_tol {
            // fourth-order Richardson step
            let r = next.0 + (next.0 - prev.0) / 15.0;
            let t = next.1 + (next.1 - prev.1) / 15.0;
            return Ok(OracleResult {
                r,
                t,
                big_r: r.norm_sqr(),
                big_t: t.norm_sqr(),
                step: h,
                halvings: halving,
                error_estimate: diff,
            });
        }
        prev = next;
    }
    Err(Error::NonConvergence { what: "oracle step halving", terms: cfg.max_halvings as usize })
}

/// Fixed-step run returning `(r, t)` without extrapolation.
pub fn integrate_fixed(p: &impl OracleTarget, energy: f64, step: f64) -> Result<(Complex, Complex)> {
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    match p.extent()? {
        None => Ok((Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))),
        Some(window) => Ok(run_fixed(p, energy, window, step)),
    }
}

/// Observed order of accuracy from runs at `h`, `h/2`, `h/4`, with `h`
/// a coarse step (a twentieth of the potential's length scale).
pub fn convergence_order(p: &impl OracleTarget, energy: f64) -> Result<f64> {
    let h = p.length_scale().map_or(1.0, |l| l / 20.0).min(20.0 * default_step(p, energy));
    convergence_order_from(p, energy, h)
}

/// As [`convergence_order`] with an explicit coarsest step.
pub fn convergence_order_from(p: &impl OracleTarget, energy: f64, h: f64) -> Result<f64> {
    let (r1, t1) = integrate_fixed(p, energy, h)?;
    let (r2, t2) = integrate_fixed(p, energy, h / 2.0)?;
    let (r3, t3) = integrate_fixed(p, energy, h / 4.0)?;
    let d1 = (t1 - t2).norm() + (r1 - r2).norm();
    let d2 = (t2 - t3).norm() + (r2 - r3).norm();
    Ok((d1 / d2).log2())
}

fn padded_extent(p: &impl OracleTarget, cfg: &IntegratorConfig) -> Result<Option<(f64, f64)>> {
    Ok(p.extent()?.map(|(lo, hi)| (lo - cfg.domain_pad, hi + cfg.domain_pad)))
}

fn run_fixed(p: &impl OracleTarget, energy: f64, (lo, hi): (f64, f64), h: f64) -> (Complex, Complex) {
    let units = p.units();
    let k = units.wave_number(energy);
    let k2 = k * k;
    let ik = I * k;
    let mut nodes: Vec<f64> = p.breakpoints().into_iter().filter(|&x| x > lo && x < hi).collect();
    nodes.push(lo);
    nodes.push(hi);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let mut psi = (ik * hi).exp();
    let mut dpsi = ik * psi;
    for w in nodes.windows(2).rev() {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let n = ((b - a) / h).ceil().max(1.0) as usize;
        let step = -(b - a) / n as f64;
        let q = |x: f64| units.reduced(p.potential_in_panel(x, mid)) - k2;
        let mut x = b;
        let mut q0 = q(x);
        for j in 0..n {
            let x_end = if j + 1 == n { a } else { b + step * (j + 1) as f64 };
            let q_half = q(x + 0.5 * step);
            let q1 = q(x_end);
            let (k1p, k1d) = (dpsi, q0 * psi);
            let (k2p, k2d) = (dpsi + 0.5 * step * k1d, q_half * (psi + 0.5 * step * k1p));
            let (k3p, k3d) = (dpsi + 0.5 * step * k2d, q_half * (psi + 0.5 * step * k2p));
            let (k4p, k4d) = (dpsi + step * k3d, q1 * (psi + step * k3p));
            psi += step / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            dpsi += step / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            x = x_end;
            q0 = q1;
        }
    }
    let incident = (ik * psi + dpsi) / (2.0 * ik) * (-ik * lo).exp();
    let reflected = (ik * psi - dpsi) / (2.0 * ik) * (ik * lo).exp();
    (reflected / incident, 1.0 / incident)
}

/// Textbook transmission through a rectangular barrier of height `height`
/// and width `width`, derived independently of everything above.
pub fn rectangular_transmission(height: f64, width: f64, energy: f64, units: &UnitSystem) -> f64 {
    let (v, e) = (height, energy);
    if e < v {
        let kappa = units.wave_number(v - e);
        let s = (kappa * width).sinh();
        1.0 / (1.0 + v * v * s * s / (4.0 * e * (v - e)))
    } else if e > v {
        let q = units.wave_number(e - v);
        let s = (q * width).sin();
        1.0 / (1.0 + v * v * s * s / (4.0 * e * (e - v)))
    } else {
        let m = units.reduced(v);
        1.0 / (1.0 + m * width * width / 4.0)
    }
}

/// Whether the composite is a lone whole-line sech^2 barrier (needs truncation).
pub fn needs_truncation(p: &CompositePotential) -> bool {
    p.segments().iter().any(|s| matches!(s.shape, Shape::LandauInfinite(_)))
}
