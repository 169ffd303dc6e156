//! Scattering off a composite potential by matching value and slope at
//! every interface.
//!
//! Each region carries a basis pair and two coefficients. The outer regions
//! use plane waves with coefficients `(1, r)` on the left and `(t, 0)` on the
//! right, so the unknowns are `r`, `t` and one pair per interior region. The
//! `2(n-1)` matching equations are solved directly.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::landau::{landau_scattering, BasisPair, LandauWave, SechBasis};
use crate::linalg::{self, Matrix};
use crate::parabolic::ParabolicBasis;
use crate::potentials::{CompositePotential, Shape};
use crate::specfun::{Complex, I};
use crate::units::UnitSystem;

/// Basis of one region.
#[derive(Debug, Clone)]
pub enum RegionKind {
    /// `e^{ik(x - origin)}`, `e^{-ik(x - origin)}`.
    PlaneWaves {
        k: f64,
        origin: f64,
    },
    ParabolicPair(ParabolicBasis),
    SechPair(SechBasis),
    /// The scattering state of the whole-line sech^2 barrier and a zero partner.
    Landau(LandauWave),
}

#[derive(Debug, Clone)]
pub struct RegionBasis {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    pub kind: RegionKind,
}

impl RegionBasis {
    /// Basis values at `x`, extended analytically past the region if needed.
    pub fn eval(&self, x: f64) -> Result<BasisPair> {
        match &self.kind {
            RegionKind::PlaneWaves { k, origin } => {
                let ik = I * *k;
                let f1 = (ik * (x - origin)).exp();
                let f2 = f1.inv();
                Ok(BasisPair { f1, df1: ik * f1, f2, df2: -ik * f2 })
            }
            RegionKind::ParabolicPair(b) => {
                let p = b.eval(x - b.shape().gamma)?;
                Ok(BasisPair { f1: p.psi_e, df1: p.dpsi_e, f2: p.psi_o, df2: p.dpsi_o })
            }
            RegionKind::SechPair(b) => b.eval(x),
            RegionKind::Landau(w) => {
                let (f1, df1) = w.at(x)?;
                let zero = Complex::new(0.0, 0.0);
                Ok(BasisPair { f1, df1, f2: zero, df2: zero })
            }
        }
    }
}

/// Solved scattering state of a composite.
#[derive(Debug, Clone, Serialize)]
pub struct GlobalSolution {
    pub energy: f64,
    pub r: Complex,
    pub t: Complex,
    /// Coefficient pair of every region, outer ones included.
    pub coeffs: Vec<[Complex; 2]>,
    pub big_r: f64,
    pub big_t: f64,
    /// Largest value/slope mismatch over the interfaces, relative to the
    /// wavefunction scale there.
    pub residual: f64,
    /// `||A x - b|| / ||b||` of the matching system.
    pub system_residual: f64,
    /// Condition estimate of the matching system (1 when there is none).
    pub condition: f64,
    #[serde(skip)]
    regions: Vec<RegionBasis>,
    #[serde(skip)]
    k: f64,
}

impl GlobalSolution {
    pub fn regions(&self) -> &[RegionBasis] {
        &self.regions
    }

    pub fn wave_number(&self) -> f64 {
        self.k
    }

    fn region_of(&self, x: f64) -> usize {
        let n = self.regions.len();
        self.regions.iter().position(|r| x >= r.lo && x < r.hi).unwrap_or(if x < self.regions[0].lo {
            0
        } else {
            n - 1
        })
    }

    /// `psi(x)` and `psi'(x)`.
    pub fn psi_with_derivative(&self, x: f64) -> Result<(Complex, Complex)> {
        let i = self.region_of(x);
        let b = self.regions[i].eval(x)?;
        let [c1, c2] = self.coeffs[i];
        Ok((c1 * b.f1 + c2 * b.f2, c1 * b.df1 + c2 * b.df2))
    }

    pub fn psi(&self, x: f64) -> Result<Complex> {
        Ok(self.psi_with_derivative(x)?.0)
    }

    /// Finite interface positions.
    pub fn interfaces(&self) -> Vec<f64> {
        self.regions.windows(2).map(|w| w[0].hi).collect()
    }
}

fn region_kind(shape: &Shape, energy: f64, units: &UnitSystem, lo: f64, hi: f64) -> Result<RegionKind> {
    let k = units.wave_number(energy);
    Ok(match shape {
        Shape::Free => {
            let origin = if lo.is_finite() && hi.is_finite() { 0.5 * (lo + hi) } else { 0.0 };
            RegionKind::PlaneWaves { k, origin }
        }
        Shape::Parabolic(p) => RegionKind::ParabolicPair(ParabolicBasis::new(*p, energy, units)?),
        Shape::Sech(s) => RegionKind::SechPair(SechBasis::new(*s, energy, units)?),
        Shape::LandauInfinite(s) => {
            let sol = landau_scattering(*s, energy, units)?;
            RegionKind::Landau(LandauWave::new(*s, energy, units, &sol))
        }
    })
}

/// Scattering state for a unit-amplitude wave incident from the left.
pub fn solve(p: &CompositePotential, energy: f64) -> Result<GlobalSolution> {
    p.validate().map_err(Error::InvalidComposite)?;
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    let units = p.units();
    let k = units.wave_number(energy);
    let regions: Vec<RegionBasis> = p
        .segments()
        .iter()
        .enumerate()
        .map(|(index, s)| {
            Ok(RegionBasis { index, lo: s.lo, hi: s.hi, kind: region_kind(&s.shape, energy, units, s.lo, s.hi)? })
        })
        .collect::<Result<_>>()?;

    if let Some(shape) = p.as_landau() {
        let sol = landau_scattering(shape, energy, units)?;
        return Ok(GlobalSolution {
            energy,
            r: sol.r,
            t: sol.t,
            coeffs: vec![[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]],
            big_r: sol.big_r,
            big_t: sol.big_t,
            residual: 0.0,
            system_residual: 0.0,
            condition: 1.0,
            regions,
            k,
        });
    }

    let n = regions.len();
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    if n == 1 {
        return Ok(GlobalSolution {
            energy,
            r: zero,
            t: one,
            coeffs: vec![[one, zero]],
            big_r: 0.0,
            big_t: 1.0,
            residual: 0.0,
            system_residual: 0.0,
            condition: 1.0,
            regions,
            k,
        });
    }

    // unknown layout: r, (c1, c2) for regions 1..n-1, t
    let dim = 2 * (n - 1);
    let col = |region: usize, which: usize| -> Option<usize> {
        match (region, which) {
            (0, 0) => None,
            (0, 1) => Some(0),
            (r, 0) if r == n - 1 => Some(dim - 1),
            (r, 1) if r == n - 1 => None,
            (r, w) => Some(1 + 2 * (r - 1) + w),
        }
    };
    let mut a = Matrix::zeros(dim);
    let mut rhs = vec![zero; dim];
    for j in 0..n - 1 {
        let x = regions[j].hi;
        let left = regions[j].eval(x)?;
        let right = regions[j + 1].eval(x)?;
        let (rv, rd) = (2 * j, 2 * j + 1);
        for (region, pair, sign) in [(j, left, 1.0), (j + 1, right, -1.0)] {
            for (which, (f, df)) in [(0, (pair.f1, pair.df1)), (1, (pair.f2, pair.df2))] {
                match col(region, which) {
                    Some(c) => {
                        a.set(rv, c, a.get(rv, c) + sign * f);
                        a.set(rd, c, a.get(rd, c) + sign * df / k);
                    }
                    // the incident wave's coefficient is fixed at 1
                    None if region == 0 => {
                        rhs[rv] -= sign * f;
                        rhs[rd] -= sign * df / k;
                    }
                    None => {}
                }
            }
        }
    }
    let solved = linalg::solve(&a, &rhs)?;
    let x = &solved.x;
    let mut coeffs = Vec::with_capacity(n);
    coeffs.push([one, x[0]]);
    for r in 1..n - 1 {
        coeffs.push([x[1 + 2 * (r - 1)], x[2 + 2 * (r - 1)]]);
    }
    coeffs.push([x[dim - 1], zero]);
    let (r, t) = (x[0], x[dim - 1]);
    let mut sol = GlobalSolution {
        energy,
        r,
        t,
        coeffs,
        big_r: r.norm_sqr(),
        big_t: t.norm_sqr(),
        residual: 0.0,
        system_residual: solved.relative_residual,
        condition: solved.condition,
        regions,
        k,
    };
    sol.residual = interface_mismatch(&sol)?;
    Ok(sol)
}

/// Largest relative jump in `psi` or `psi'/k` across the interfaces.
pub fn interface_mismatch(sol: &GlobalSolution) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for w in sol.regions.windows(2) {
        let (l, r) = (&w[0], &w[1]);
        let x = l.hi;
        let bl = l.eval(x)?;
        let br = r.eval(x)?;
        let [a1, a2] = sol.coeffs[l.index];
        let [b1, b2] = sol.coeffs[r.index];
        let (vl, dl) = (a1 * bl.f1 + a2 * bl.f2, (a1 * bl.df1 + a2 * bl.df2) / sol.k);
        let (vr, dr) = (b1 * br.f1 + b2 * br.f2, (b1 * br.df1 + b2 * br.df2) / sol.k);
        let scale = vl.norm().max(dl.norm()).max(f64::MIN_POSITIVE);
        worst = worst.max((vl - vr).norm() / scale).max((dl - dr).norm() / scale);
    }
    Ok(worst)
}

/// `|psi(x)|^2`.
pub fn probability_density(sol: &GlobalSolution, x: f64) -> Result<f64> {
    Ok(sol.psi(x)?.norm_sqr())
}

/// One sweep point; failures are kept per point.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub energy: f64,
    pub big_t: f64,
    pub big_r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// `T` and `R` on an energy grid, in grid order, solved in parallel.
pub fn transmission_sweep(p: &CompositePotential, energies: &[f64]) -> Vec<SweepPoint> {
    energies
        .par_iter()
        .map(|&energy| match solve(p, energy) {
            Ok(s) => SweepPoint { energy, big_t: s.big_t, big_r: s.big_r, error: None },
            Err(e) => SweepPoint { energy, big_t: f64::NAN, big_r: f64::NAN, error: Some(e.to_string()) },
        })
        .collect()
}
