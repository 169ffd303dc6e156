//! Unit systems and the restoration of `hbar` and `m` in the solutions.
//!
//! Solvers never hard-code `hbar = m = 1`. They ask the active
//! [`UnitSystem`] for `k = sqrt(2 m E) / hbar`, for the reduced potential
//! `2 m U / hbar^2` and for the incoming current `sqrt(2 E / m)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which table of physical constants backs the SI scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantSet {
    /// Order-of-magnitude values: hbar = 1e-34 J s, m_e = 1e-30 kg,
    /// 3 eV = 0.125 hartree, 10 angstrom = 20 bohr.
    #[default]
    Rounded,
    /// CODATA 2018.
    Codata,
}

struct Constants {
    hbar: f64,
    electron_mass: f64,
    bohr: f64,
    electron_volt: f64,
}

impl ConstantSet {
    fn constants(self) -> Constants {
        match self {
            ConstantSet::Rounded => Constants {
                hbar: 1e-34,
                electron_mass: 1e-30,
                bohr: 5e-11,
                // 3 eV ~ 5e-19 J
                electron_volt: 5e-19 / 3.0,
            },
            ConstantSet::Codata => Constants {
                hbar: 1.054_571_817e-34,
                electron_mass: 9.109_383_701_5e-31,
                bohr: 5.291_772_109_03e-11,
                electron_volt: 1.602_176_634e-19,
            },
        }
    }

    /// Hartree energy in joules, derived as hbar^2 / (m a0^2) so the
    /// atomic system stays exactly self-consistent.
    pub fn hartree_joules(self) -> f64 {
        let c = self.constants();
        c.hbar * c.hbar / (c.electron_mass * c.bohr * c.bohr)
    }

    pub fn bohr_meters(self) -> f64 {
        self.constants().bohr
    }

    pub fn atomic_time_seconds(self) -> f64 {
        self.constants().hbar / self.hartree_joules()
    }

    pub fn electron_volt_joules(self) -> f64 {
        self.constants().electron_volt
    }
}

/// Physical dimension of a named unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Energy,
    Length,
    Time,
}

/// A named unit with its size in SI (`None` for dimensionless reference scales).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub name: String,
    pub si_scale: Option<f64>,
}

impl Unit {
    fn new(name: &str, si_scale: Option<f64>) -> Self {
        Unit { name: name.to_string(), si_scale }
    }
}

/// Looks up a named unit (`hartree`, `eV`, `J`, `bohr`, `angstrom`, `nm`, `m`, `aut`, `fs`, `s`).
pub fn named_unit(name: &str, constants: ConstantSet) -> Result<(Dimension, Unit)> {
    let (dim, scale) = match name {
        "hartree" | "Eh" | "h" => (Dimension::Energy, constants.hartree_joules()),
        "eV" | "ev" => (Dimension::Energy, constants.electron_volt_joules()),
        "J" | "joule" => (Dimension::Energy, 1.0),
        "bohr" | "b" | "a0" => (Dimension::Length, constants.bohr_meters()),
        "angstrom" | "A" | "Å" => (Dimension::Length, 1e-10),
        "nm" => (Dimension::Length, 1e-9),
        "m" | "meter" => (Dimension::Length, 1.0),
        "aut" => (Dimension::Time, constants.atomic_time_seconds()),
        "fs" => (Dimension::Time, 1e-15),
        "s" | "second" => (Dimension::Time, 1.0),
        other => return Err(Error::InvalidParameter(format!("unknown unit `{other}`"))),
    };
    Ok((dim, Unit::new(name, Some(scale))))
}

/// Converts `value` between two named units of the same dimension.
pub fn convert(value: f64, from: &str, to: &str, constants: ConstantSet) -> Result<f64> {
    let (d_from, u_from) = named_unit(from, constants)?;
    let (d_to, u_to) = named_unit(to, constants)?;
    if d_from != d_to {
        return Err(Error::InvalidParameter(format!("cannot convert {from} ({d_from:?}) to {to} ({d_to:?})")));
    }
    Ok(value * u_from.si_scale.unwrap_or(1.0) / u_to.si_scale.unwrap_or(1.0))
}

/// `(hbar, m, energy unit, length unit, time unit)`; `hbar` and `mass` are
/// expressed in this system's own units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub name: String,
    pub hbar: f64,
    pub mass: f64,
    pub energy_unit: Unit,
    pub length_unit: Unit,
    pub time_unit: Unit,
    pub constants: ConstantSet,
}

impl UnitSystem {
    /// Atomic units: hbar = m_e = 1, hartree / bohr / atomic time unit.
    pub fn atomic(constants: ConstantSet) -> Self {
        UnitSystem {
            name: "atomic".into(),
            hbar: 1.0,
            mass: 1.0,
            energy_unit: Unit::new("hartree", Some(constants.hartree_joules())),
            length_unit: Unit::new("bohr", Some(constants.bohr_meters())),
            time_unit: Unit::new("aut", Some(constants.atomic_time_seconds())),
            constants,
        }
    }

    /// Dimensionless units with hbar = m = 1 and no SI anchor.
    pub fn natural() -> Self {
        UnitSystem {
            name: "natural".into(),
            hbar: 1.0,
            mass: 1.0,
            energy_unit: Unit::new("1", None),
            length_unit: Unit::new("1", None),
            time_unit: Unit::new("1", None),
            constants: ConstantSet::default(),
        }
    }

    /// SI units for an electron.
    pub fn si(constants: ConstantSet) -> Self {
        let c = constants.constants();
        UnitSystem {
            name: "si".into(),
            hbar: c.hbar,
            mass: c.electron_mass,
            energy_unit: Unit::new("J", Some(1.0)),
            length_unit: Unit::new("m", Some(1.0)),
            time_unit: Unit::new("s", Some(1.0)),
            constants,
        }
    }

    /// Resolves a preset by name (`atomic`/`hartree`/`au`, `natural`, `si`).
    pub fn by_name(name: &str, constants: ConstantSet) -> Result<Self> {
        match name {
            "atomic" | "hartree" | "au" => Ok(Self::atomic(constants)),
            "natural" => Ok(Self::natural()),
            "si" | "SI" => Ok(Self::si(constants)),
            other => Err(Error::InvalidParameter(format!("unknown unit system `{other}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let scales = [&self.energy_unit, &self.length_unit, &self.time_unit];
        let ok = self.hbar > 0.0
            && self.mass > 0.0
            && self.hbar.is_finite()
            && self.mass.is_finite()
            && scales.iter().all(|u| u.si_scale.is_none_or(|s| s > 0.0 && s.is_finite()));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("unit system `{}` has non-positive scales", self.name)))
        }
    }

    /// `k = sqrt(2 m E) / hbar`.
    pub fn wave_number(&self, energy: f64) -> f64 {
        (2.0 * self.mass * energy).sqrt() / self.hbar
    }

    /// `2 m U / hbar^2`, the potential term of `psi'' = (2m/hbar^2)(U - E) psi`.
    pub fn reduced(&self, energy: f64) -> f64 {
        2.0 * self.mass * energy / (self.hbar * self.hbar)
    }

    /// Inverse of [`UnitSystem::reduced`].
    pub fn unreduced(&self, reduced: f64) -> f64 {
        reduced * self.hbar * self.hbar / (2.0 * self.mass)
    }

    /// Incoming probability current of a unit-amplitude plane wave, `sqrt(2E/m)`.
    pub fn incoming_current(&self, energy: f64) -> f64 {
        (2.0 * energy / self.mass).sqrt()
    }

    /// Probability current `(hbar/m) Im(psi* psi')`.
    pub fn probability_current(&self, psi: Complex64, dpsi: Complex64) -> f64 {
        self.hbar / self.mass * (psi.conj() * dpsi).im
    }

    pub fn velocity_unit_name(&self) -> String {
        format!("{}/{}", self.length_unit.name, self.time_unit.name)
    }

    fn factor(from: &Unit, to: &Unit, what: &str) -> Result<f64> {
        match (from.si_scale, to.si_scale) {
            (Some(a), Some(b)) => Ok(a / b),
            (None, None) if from.name == to.name => Ok(1.0),
            _ => Err(Error::InvalidParameter(format!(
                "no SI anchor to convert {what} from {} to {}",
                from.name, to.name
            ))),
        }
    }

    /// Multiplier taking an energy in `self` to an energy in `target`.
    pub fn energy_factor(&self, target: &UnitSystem) -> Result<f64> {
        Self::factor(&self.energy_unit, &target.energy_unit, "energy")
    }

    pub fn length_factor(&self, target: &UnitSystem) -> Result<f64> {
        Self::factor(&self.length_unit, &target.length_unit, "length")
    }

    pub fn time_factor(&self, target: &UnitSystem) -> Result<f64> {
        Self::factor(&self.time_unit, &target.time_unit, "time")
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem::atomic(ConstantSet::default())
    }
}
