//! Observables built on solved scattering states: incoming current, dwell
//! times, resonance energies and unit restoration.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multibarrier::{solve, GlobalSolution};
use crate::potentials::{CompositePotential, Shape};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::units::UnitSystem;

/// Flux `sqrt(2E/m)` of the unit-amplitude incident wave.
pub fn incoming_current(energy: f64, units: &UnitSystem) -> Result<f64> {
    if energy == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    Ok(units.incoming_current(energy))
}

/// Result of a dwell-time integration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DwellReport {
    pub interval: [f64; 2],
    pub energy: f64,
    /// Incoming current (velocity unit).
    pub j_in: f64,
    /// `integral of |psi|^2` over the interval (length unit).
    pub integral: f64,
    /// `integral / j_in` (time unit).
    pub tau: f64,
    pub unit_system: String,
    pub energy_unit: String,
    pub length_unit: String,
    pub time_unit: String,
    pub velocity_unit: String,
    pub evaluations: usize,
    pub error_estimate: f64,
}

/// Time spent in `[x1, x2]`, `(1/j_in) * integral of |psi|^2`.
///
/// The incident flux is used for every interval, inside barriers and between
/// them alike: for a stationary state with a unit-amplitude incident wave the
/// dwell time of any region is normalized by that one flux.
pub fn dwell_time(sol: &GlobalSolution, p: &CompositePotential, x1: f64, x2: f64) -> Result<DwellReport> {
    dwell_time_with(sol, p, x1, x2, &QuadratureConfig::default())
}

pub fn dwell_time_with(
    sol: &GlobalSolution,
    p: &CompositePotential,
    x1: f64,
    x2: f64,
    cfg: &QuadratureConfig,
) -> Result<DwellReport> {
    if !(x1 < x2 && x1.is_finite() && x2.is_finite()) {
        return Err(Error::InvalidParameter(format!("dwell interval needs x1 < x2, got [{x1}, {x2}]")));
    }
    let units = p.units();
    let j_in = incoming_current(sol.energy, units)?;
    let mut breaks = vec![x1];
    breaks.extend(sol.interfaces().into_iter().filter(|&x| x > x1 && x < x2));
    breaks.push(x2);
    let q = integrate(|x| Ok(sol.psi(x)?.norm_sqr()), &breaks, cfg)?;
    Ok(DwellReport {
        interval: [x1, x2],
        energy: sol.energy,
        j_in,
        integral: q.value,
        tau: q.value / j_in,
        unit_system: units.name.clone(),
        energy_unit: units.energy_unit.name.clone(),
        length_unit: units.length_unit.name.clone(),
        time_unit: units.time_unit.name.clone(),
        velocity_unit: units.velocity_unit_name(),
        evaluations: q.evaluations,
        error_estimate: q.error_estimate / j_in,
    })
}

/// Interval between the `i`-th and `j`-th turning points (1-based).
pub fn turning_interval(p: &CompositePotential, energy: f64, i: usize, j: usize) -> Result<(f64, f64)> {
    let points = p.turning_points(energy)?;
    let get = |n: usize| {
        n.checked_sub(1).and_then(|n| points.get(n).copied()).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "turning point {n} requested but only {} exist at E = {energy}",
                points.len()
            ))
        })
    };
    let (a, b) = (get(i)?, get(j)?);
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("turning points {i}..{j} do not form an interval")));
    }
    Ok((a, b))
}

/// A refined transmission maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub energy: f64,
    pub big_t: f64,
}

/// Outcome of a resonance search.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceSearch {
    /// No barrier: every energy transmits fully, so no energy is special.
    TriviallyTransparent,
    Found(Vec<Resonance>),
}

impl ResonanceSearch {
    pub fn energies(&self) -> Vec<f64> {
        match self {
            ResonanceSearch::TriviallyTransparent => Vec::new(),
            ResonanceSearch::Found(v) => v.iter().map(|r| r.energy).collect(),
        }
    }
}

/// Largest `1 - T` accepted as a resonance.
pub const RESONANCE_THRESHOLD: f64 = 1e-6;

/// Golden-section width, relative to the top of the search range.
pub const RESONANCE_ENERGY_TOL: f64 = 1e-11;

/// Energies in `[e_lo, e_hi]` where `T` peaks at 1.
///
/// Scans `grid_n` evenly spaced energies in parallel, then maximizes `T` by
/// golden section inside each bracket around a grid maximum.
pub fn find_resonances(p: &CompositePotential, e_lo: f64, e_hi: f64, grid_n: usize) -> Result<ResonanceSearch> {
    if !(e_lo > 0.0 && e_lo < e_hi && e_hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < e_lo < e_hi, got [{e_lo}, {e_hi}]")));
    }
    if grid_n < 2 {
        return Err(Error::InvalidParameter("grid_n must be at least 2".into()));
    }
    p.validate().map_err(Error::InvalidComposite)?;
    if p.is_barrier_free() {
        return Ok(ResonanceSearch::TriviallyTransparent);
    }
    let step = (e_hi - e_lo) / (grid_n - 1) as f64;
    let grid: Vec<f64> = (0..grid_n).map(|i| if i + 1 == grid_n { e_hi } else { e_lo + step * i as f64 }).collect();
    let t = |e: f64| solve(p, e).map(|s| s.big_t).unwrap_or(f64::NAN);
    let ts: Vec<f64> = grid.par_iter().map(|&e| t(e)).collect();

    let tol = RESONANCE_ENERGY_TOL * e_hi;
    let mut found: Vec<Resonance> = (1..grid_n - 1)
        .filter(|&i| ts[i] > ts[i - 1] && ts[i] >= ts[i + 1])
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i| golden_max(&t, grid[i - 1], grid[i + 1], tol))
        .filter(|r| 1.0 - r.big_t < RESONANCE_THRESHOLD)
        .collect();
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    found.dedup_by(|a, b| (a.energy - b.energy).abs() <= 10.0 * tol);
    Ok(ResonanceSearch::Found(found))
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Resonance {
    let ratio = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        // NaN compares false, steering away from failed points
        if fc >= fd || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let (energy, big_t) = if fc >= fd || fd.is_nan() { (c, fc) } else { (d, fd) };
    Resonance { energy, big_t }
}

/// Inputs re-expressed in another unit system with the derived wave numbers.
#[derive(Debug, Clone, Serialize)]
pub struct RestoredParameters {
    pub unit_system: String,
    pub energy: f64,
    /// `sqrt(2 m E) / hbar`.
    pub wave_number: f64,
    /// `sqrt(2E/m)`.
    pub incoming_current: f64,
    /// `sqrt(2 m U0) / (hbar alpha)` of each parabolic barrier.
    pub parabolic_curvatures: Vec<f64>,
    #[serde(skip)]
    pub potential: CompositePotential,
}

/// Rescales a potential and an energy into `target` units.
pub fn restore_units(p: &CompositePotential, energy: f64, target: &UnitSystem) -> Result<RestoredParameters> {
    target.validate()?;
    let ef = p.units().energy_factor(target)?;
    let potential = p.convert_units(target)?;
    let energy = energy * ef;
    let parabolic_curvatures = potential
        .barriers()
        .filter_map(|s| match s.shape {
            Shape::Parabolic(q) => Some(target.reduced(q.u0).sqrt() / q.alpha),
            _ => None,
        })
        .collect();
    Ok(RestoredParameters {
        unit_system: target.name.clone(),
        energy,
        wave_number: target.wave_number(energy),
        incoming_current: target.incoming_current(energy),
        parabolic_curvatures,
        potential,
    })
}
