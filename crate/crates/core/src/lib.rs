//! Exact one-dimensional scattering off compactly supported parabolic
//! barriers, sech-squared barriers and piecewise compositions of them.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod landau;
pub mod linalg;
pub mod multibarrier;
pub mod oracle;
pub mod parabolic;
pub mod potentials;
pub mod quadrature;
pub mod specfun;
pub mod units;

pub use analysis::{
    dwell_time, find_resonances, incoming_current, restore_units, turning_interval, DwellReport, Resonance,
    ResonanceSearch,
};
pub use error::{Error, Result};
pub use landau::{landau_scattering, sech_basis_at, BasisPair, LandauScattering};
pub use multibarrier::{probability_density, solve, transmission_sweep, GlobalSolution, SweepPoint};
pub use oracle::{integrate_scattering, IntegratorConfig, OracleResult, SampledPotential};
pub use parabolic::{basis_at, scattering_single, wavefunction_single, SingleBarrierScattering};
pub use potentials::{
    CompositePotential, ParabolicShape, PotentialDocument, PotentialSegment, SechShape, Shape, Violation,
};
pub use specfun::{Complex, SeriesControl};
pub use units::{ConstantSet, UnitSystem};
