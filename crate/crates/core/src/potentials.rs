//! Piecewise potentials: segment shapes, composition, evaluation and turning points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{ConstantSet, UnitSystem};

/// Relative tolerance for potential continuity at interfaces, as a fraction
/// of the largest barrier peak.
pub const CONTINUITY_TOL: f64 = 1e-12;

/// Relative distance below which two barrier endpoints are taken to touch.
pub const SNAP_TOL: f64 = 1e-12;

/// Truncated inverted parabola `u0 (1 - ((x - gamma)/alpha)^2)` on `[gamma - alpha, gamma + alpha]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParabolicShape {
    /// Half-width (length).
    pub alpha: f64,
    /// Peak height (energy).
    pub u0: f64,
    /// Center (length).
    #[serde(default)]
    pub gamma: f64,
}

impl ParabolicShape {
    pub fn new(alpha: f64, u0: f64, gamma: f64) -> Self {
        ParabolicShape { alpha, u0, gamma }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.gamma - self.alpha, self.gamma + self.alpha)
    }

    pub fn value(&self, x: f64) -> f64 {
        let y = (x - self.gamma) / self.alpha;
        self.u0 * (1.0 - y * y)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        -2.0 * self.u0 * (x - self.gamma) / (self.alpha * self.alpha)
    }

    fn check(&self) -> std::result::Result<(), String> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.u0 > 0.0 && self.u0.is_finite()) {
            return Err(format!("u0 must be positive, got {}", self.u0));
        }
        if !self.gamma.is_finite() {
            return Err("gamma must be finite".into());
        }
        Ok(())
    }
}

/// `u0 / cosh^2(alpha_inv (x - gamma)) - hbar^2 beta_shift^2 / (2m)`.
///
/// With `beta_shift > 0` the shape is cut off where it crosses zero, giving
/// compact support. With `beta_shift = 0` it is the whole-line barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SechShape {
    /// Steepness (inverse length).
    pub alpha_inv: f64,
    /// Peak height before the downward shift (energy).
    pub u0: f64,
    /// Downward shift as a wave number (inverse length).
    #[serde(default)]
    pub beta_shift: f64,
    #[serde(default)]
    pub gamma: f64,
}

impl SechShape {
    pub fn new(alpha_inv: f64, u0: f64, beta_shift: f64, gamma: f64) -> Self {
        SechShape { alpha_inv, u0, beta_shift, gamma }
    }

    pub fn landau(alpha_inv: f64, u0: f64, gamma: f64) -> Self {
        SechShape { alpha_inv, u0, beta_shift: 0.0, gamma }
    }

    /// Energy removed by the downward shift.
    pub fn shift_energy(&self, units: &UnitSystem) -> f64 {
        units.unreduced(self.beta_shift * self.beta_shift)
    }

    pub fn value(&self, x: f64, units: &UnitSystem) -> f64 {
        let c = (self.alpha_inv * (x - self.gamma)).cosh();
        self.u0 / (c * c) - self.shift_energy(units)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let t = self.alpha_inv * (x - self.gamma);
        let c = t.cosh();
        -2.0 * self.u0 * self.alpha_inv * t.tanh() / (c * c)
    }

    /// Distance from `gamma` to the zero crossing, `arccosh(sqrt(u0/shift))/alpha_inv`.
    pub fn half_width(&self, units: &UnitSystem) -> f64 {
        (self.u0 / self.shift_energy(units)).sqrt().acosh() / self.alpha_inv
    }

    pub fn support(&self, units: &UnitSystem) -> (f64, f64) {
        let w = self.half_width(units);
        (self.gamma - w, self.gamma + w)
    }

    fn check(&self, units: &UnitSystem, compact: bool) -> std::result::Result<(), String> {
        if !(self.alpha_inv > 0.0 && self.alpha_inv.is_finite()) {
            return Err(format!("alpha_inv must be positive, got {}", self.alpha_inv));
        }
        if !(self.u0 > 0.0 && self.u0.is_finite()) {
            return Err(format!("u0 must be positive, got {}", self.u0));
        }
        if !self.gamma.is_finite() {
            return Err("gamma must be finite".into());
        }
        if compact {
            let limit = (2.0 * units.mass * self.u0).sqrt() / units.hbar;
            if !(self.beta_shift > 0.0 && self.beta_shift < limit) {
                return Err(format!("beta_shift must lie in (0, {limit}), got {}", self.beta_shift));
            }
        } else if self.beta_shift != 0.0 {
            return Err("the whole-line sech^2 barrier takes no downward shift".into());
        }
        Ok(())
    }
}

/// Shape of one piece of a composite potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Free,
    Parabolic(ParabolicShape),
    Sech(SechShape),
    LandauInfinite(SechShape),
}

impl Shape {
    pub fn value(&self, x: f64, units: &UnitSystem) -> f64 {
        match self {
            Shape::Free => 0.0,
            Shape::Parabolic(p) => p.value(x),
            Shape::Sech(s) | Shape::LandauInfinite(s) => s.value(x, units),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Shape::Free => 0.0,
            Shape::Parabolic(p) => p.derivative(x),
            Shape::Sech(s) | Shape::LandauInfinite(s) => s.derivative(x),
        }
    }

    /// Maximum of the shape (its value at `gamma`).
    pub fn peak(&self, units: &UnitSystem) -> f64 {
        match self {
            Shape::Free => 0.0,
            Shape::Parabolic(p) => p.u0,
            Shape::Sech(s) | Shape::LandauInfinite(s) => s.u0 - s.shift_energy(units),
        }
    }

    /// Natural interval on which the shape is non-negative.
    pub fn support(&self, units: &UnitSystem) -> (f64, f64) {
        match self {
            Shape::Free | Shape::LandauInfinite(_) => (f64::NEG_INFINITY, f64::INFINITY),
            Shape::Parabolic(p) => p.support(),
            Shape::Sech(s) => s.support(units),
        }
    }

    /// Center of the shape, if it has one.
    pub fn center(&self) -> Option<f64> {
        match self {
            Shape::Free => None,
            Shape::Parabolic(p) => Some(p.gamma),
            Shape::Sech(s) | Shape::LandauInfinite(s) => Some(s.gamma),
        }
    }

    /// Length over which the shape varies appreciably.
    pub fn length_scale(&self) -> Option<f64> {
        match self {
            Shape::Free => None,
            Shape::Parabolic(p) => Some(p.alpha),
            Shape::Sech(s) | Shape::LandauInfinite(s) => Some(1.0 / s.alpha_inv),
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Shape::Free)
    }

    fn check(&self, units: &UnitSystem) -> std::result::Result<(), String> {
        match self {
            Shape::Free => Ok(()),
            Shape::Parabolic(p) => p.check(),
            Shape::Sech(s) => s.check(units, true),
            Shape::LandauInfinite(s) => s.check(units, false),
        }
    }
}

/// One piece of a piecewise potential with its interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSegment {
    pub lo: f64,
    pub hi: f64,
    pub shape: Shape,
}

impl PotentialSegment {
    pub fn new(lo: f64, hi: f64, shape: Shape) -> Self {
        PotentialSegment { lo, hi, shape }
    }

    /// Segment spanning the shape's own support.
    pub fn from_shape(shape: Shape, units: &UnitSystem) -> Self {
        let (lo, hi) = shape.support(units);
        PotentialSegment { lo, hi, shape }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Structured reason a composite fails validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    InvalidShape { segment: usize, reason: String },
    EmptyInterval { segment: usize, lo: f64, hi: f64 },
    Overlap { left: usize, right: usize, width: f64 },
    Gap { left: usize, right: usize, width: f64 },
    Discontinuity { at: f64, jump: f64 },
    UnboundedEnds,
    OuterNotFree,
    LandauNotAlone,
}

/// Ordered list of segments tiling the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositePotential {
    units: UnitSystem,
    segments: Vec<PotentialSegment>,
}

impl CompositePotential {
    /// Wraps explicit segments without checking them (see [`CompositePotential::validate`]).
    pub fn from_segments(units: UnitSystem, segments: Vec<PotentialSegment>) -> Self {
        CompositePotential { units, segments }
    }

    /// Lays barriers out on their natural supports, filling the gaps and the
    /// two outer half-lines with free segments. Barriers that touch share
    /// an endpoint directly.
    pub fn from_barriers(units: UnitSystem, barriers: Vec<PotentialSegment>) -> Self {
        let mut barriers: Vec<_> = barriers.into_iter().filter(|s| !s.shape.is_free()).collect();
        if let [only] = barriers.as_slice() {
            if matches!(only.shape, Shape::LandauInfinite(_)) {
                let seg = PotentialSegment::new(f64::NEG_INFINITY, f64::INFINITY, only.shape);
                return CompositePotential { units, segments: vec![seg] };
            }
        }
        barriers.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut segments = Vec::with_capacity(2 * barriers.len() + 1);
        let mut cursor = f64::NEG_INFINITY;
        for mut b in barriers {
            // endpoints computed from centers and widths may miss by an ulp
            if (b.lo - cursor).abs() <= SNAP_TOL * b.lo.abs().max(b.hi - b.lo) {
                b.lo = cursor;
            }
            if b.lo > cursor {
                segments.push(PotentialSegment::new(cursor, b.lo, Shape::Free));
            }
            cursor = cursor.max(b.hi);
            segments.push(b);
        }
        segments.push(PotentialSegment::new(cursor, f64::INFINITY, Shape::Free));
        CompositePotential { units, segments }
    }

    /// Convenience for barriers on their natural supports.
    pub fn from_shapes(units: UnitSystem, shapes: Vec<Shape>) -> Self {
        let barriers = shapes.into_iter().map(|s| PotentialSegment::from_shape(s, &units)).collect();
        Self::from_barriers(units, barriers)
    }

    /// The whole line with no barrier.
    pub fn free(units: UnitSystem) -> Self {
        let seg = PotentialSegment::new(f64::NEG_INFINITY, f64::INFINITY, Shape::Free);
        CompositePotential { units, segments: vec![seg] }
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    pub fn segments(&self) -> &[PotentialSegment] {
        &self.segments
    }

    /// Barrier segments only.
    pub fn barriers(&self) -> impl Iterator<Item = &PotentialSegment> {
        self.segments.iter().filter(|s| !s.shape.is_free())
    }

    pub fn is_barrier_free(&self) -> bool {
        self.barriers().next().is_none()
    }

    /// The single whole-line sech^2 barrier, if that is what this is.
    pub fn as_landau(&self) -> Option<SechShape> {
        match self.segments.as_slice() {
            [PotentialSegment { shape: Shape::LandauInfinite(s), .. }] => Some(*s),
            _ => None,
        }
    }

    /// Finite interface points between consecutive segments.
    pub fn interfaces(&self) -> Vec<f64> {
        self.segments.windows(2).map(|w| w[0].hi).collect()
    }

    /// Smallest interval outside of which the potential is zero.
    pub fn support(&self) -> Option<(f64, f64)> {
        let lo = self.barriers().map(|s| s.lo).fold(f64::INFINITY, f64::min);
        let hi = self.barriers().map(|s| s.hi).fold(f64::NEG_INFINITY, f64::max);
        (lo <= hi).then_some((lo, hi))
    }

    /// Index of the segment owning `x`; intervals are closed on the left,
    /// open on the right (the last one is closed).
    pub fn segment_index(&self, x: f64) -> usize {
        let n = self.segments.len();
        self.segments.iter().position(|s| x >= s.lo && x < s.hi).unwrap_or(if x.is_nan() || x < self.segments[0].lo {
            0
        } else {
            n - 1
        })
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        if self.segments.is_empty() {
            return 0.0;
        }
        self.segments[self.segment_index(x)].shape.value(x, &self.units)
    }

    /// Largest barrier peak.
    pub fn max_peak(&self) -> f64 {
        self.barriers().map(|s| s.shape.peak(&self.units)).fold(0.0, f64::max)
    }

    /// Checks the tiling and continuity invariants.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let segs = &self.segments;
        if segs.is_empty() {
            return Err(vec![Violation::Empty]);
        }
        for (i, s) in segs.iter().enumerate() {
            if let Err(reason) = s.shape.check(&self.units) {
                out.push(Violation::InvalidShape { segment: i, reason });
            }
            if !(s.lo < s.hi) {
                out.push(Violation::EmptyInterval { segment: i, lo: s.lo, hi: s.hi });
            }
        }
        let landau_count = segs.iter().filter(|s| matches!(s.shape, Shape::LandauInfinite(_))).count();
        if landau_count > 0 && segs.len() > 1 {
            out.push(Violation::LandauNotAlone);
        }
        if segs[0].lo != f64::NEG_INFINITY || segs[segs.len() - 1].hi != f64::INFINITY {
            out.push(Violation::UnboundedEnds);
        }
        if landau_count == 0 && (!segs[0].shape.is_free() || !segs[segs.len() - 1].shape.is_free()) {
            out.push(Violation::OuterNotFree);
        }
        let tol = CONTINUITY_TOL * self.max_peak().max(f64::MIN_POSITIVE);
        for (i, w) in segs.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            if a.hi > b.lo {
                out.push(Violation::Overlap { left: i, right: i + 1, width: a.hi - b.lo });
            } else if a.hi < b.lo {
                out.push(Violation::Gap { left: i, right: i + 1, width: b.lo - a.hi });
            }
            for x in [a.hi, b.lo] {
                if x.is_finite() {
                    let jump = (a.shape.value(x, &self.units) - b.shape.value(x, &self.units)).abs();
                    if jump > tol {
                        out.push(Violation::Discontinuity { at: x, jump });
                    }
                }
            }
        }
        out.dedup();
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    /// All real solutions of `U(x) = E`, ascending. Empty when `E` exceeds every peak.
    pub fn turning_points(&self, energy: f64) -> Result<Vec<f64>> {
        if !(energy > 0.0) {
            return Err(Error::NonPositiveEnergy(energy));
        }
        let mut roots = Vec::new();
        for seg in self.barriers() {
            roots.extend(segment_turning_points(seg, energy, &self.units));
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(b.abs()).max(1e-300));
        Ok(roots)
    }

    /// Mirror image `x -> -x`.
    pub fn mirrored(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| {
                let shape = match s.shape {
                    Shape::Free => Shape::Free,
                    Shape::Parabolic(p) => Shape::Parabolic(ParabolicShape { gamma: -p.gamma, ..p }),
                    Shape::Sech(q) => Shape::Sech(SechShape { gamma: -q.gamma, ..q }),
                    Shape::LandauInfinite(q) => Shape::LandauInfinite(SechShape { gamma: -q.gamma, ..q }),
                };
                PotentialSegment::new(-s.hi, -s.lo, shape)
            })
            .collect();
        CompositePotential { units: self.units.clone(), segments }
    }

    /// Re-expresses every parameter in `target` units; dimensionless
    /// observables are unchanged.
    pub fn convert_units(&self, target: &UnitSystem) -> Result<Self> {
        let anchored = |u: &UnitSystem| u.energy_unit.si_scale.is_some();
        if self.units.constants != target.constants && anchored(&self.units) && anchored(target) {
            return Err(Error::InvalidParameter(format!(
                "cannot convert between constant sets {:?} and {:?}",
                self.units.constants, target.constants
            )));
        }
        let ef = self.units.energy_factor(target)?;
        let lf = self.units.length_factor(target)?;
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let shape = match s.shape {
                    Shape::Free => Shape::Free,
                    Shape::Parabolic(p) => Shape::Parabolic(ParabolicShape::new(p.alpha * lf, p.u0 * ef, p.gamma * lf)),
                    Shape::Sech(q) => {
                        Shape::Sech(SechShape::new(q.alpha_inv / lf, q.u0 * ef, q.beta_shift / lf, q.gamma * lf))
                    }
                    Shape::LandauInfinite(q) => {
                        Shape::LandauInfinite(SechShape::landau(q.alpha_inv / lf, q.u0 * ef, q.gamma * lf))
                    }
                };
                PotentialSegment::new(s.lo * lf, s.hi * lf, shape)
            })
            .collect();
        Ok(CompositePotential { units: target.clone(), segments })
    }
}

fn segment_turning_points(seg: &PotentialSegment, energy: f64, units: &UnitSystem) -> Vec<f64> {
    let shape = seg.shape;
    if energy > shape.peak(units) {
        return Vec::new();
    }
    let candidates = match shape {
        Shape::Free => Vec::new(),
        Shape::Parabolic(p) => {
            let d = p.alpha * (1.0 - energy / p.u0).max(0.0).sqrt();
            vec![p.gamma - d, p.gamma + d]
        }
        Shape::Sech(s) | Shape::LandauInfinite(s) => {
            let f = |x: f64| s.value(x, units) - energy;
            // U is decreasing away from gamma on either side
            let mut reach = match shape {
                Shape::Sech(_) => s.half_width(units),
                _ => 1.0 / s.alpha_inv,
            };
            while f(s.gamma + reach) > 0.0 && reach.is_finite() {
                reach *= 2.0;
            }
            let right = bisect(f, s.gamma, s.gamma + reach);
            let left = bisect(f, s.gamma - reach, s.gamma);
            vec![left, right]
        }
    };
    candidates.into_iter().filter(|&x| seg.contains(x)).collect()
}

/// Bisection for a sign change of `f` on `[a, b]`, down to adjacent floats.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    if f(b) == 0.0 {
        return b;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// JSON document describing a composite potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDocument {
    pub unit_system: String,
    #[serde(default)]
    pub constants: ConstantSet,
    pub segments: Vec<SegmentSpec>,
}

/// One barrier in a [`PotentialDocument`]; free regions are implicit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentSpec {
    Parabolic {
        alpha: f64,
        u0: f64,
        #[serde(default)]
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<[f64; 2]>,
    },
    Sech {
        alpha_inv: f64,
        u0: f64,
        beta_shift: f64,
        #[serde(default)]
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<[f64; 2]>,
    },
    Landau {
        alpha_inv: f64,
        u0: f64,
        #[serde(default)]
        gamma: f64,
    },
}

impl PotentialDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("potential document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// Builds the composite. Shape and layout problems surface through
    /// [`CompositePotential::validate`], not here.
    pub fn build(&self) -> Result<CompositePotential> {
        let units = UnitSystem::by_name(&self.unit_system, self.constants)?;
        let barriers = self
            .segments
            .iter()
            .map(|spec| {
                let (shape, interval) = match *spec {
                    SegmentSpec::Parabolic { alpha, u0, gamma, interval } => {
                        (Shape::Parabolic(ParabolicShape::new(alpha, u0, gamma)), interval)
                    }
                    SegmentSpec::Sech { alpha_inv, u0, beta_shift, gamma, interval } => {
                        (Shape::Sech(SechShape::new(alpha_inv, u0, beta_shift, gamma)), interval)
                    }
                    SegmentSpec::Landau { alpha_inv, u0, gamma } => {
                        (Shape::LandauInfinite(SechShape::landau(alpha_inv, u0, gamma)), None)
                    }
                };
                match interval {
                    Some([lo, hi]) => PotentialSegment::new(lo, hi, shape),
                    None => PotentialSegment::from_shape(shape, &units),
                }
            })
            .collect();
        Ok(CompositePotential::from_barriers(units, barriers))
    }
}

impl CompositePotential {
    /// Document form with every barrier interval written out.
    pub fn to_document(&self) -> PotentialDocument {
        let segments = self
            .barriers()
            .map(|s| {
                let interval = Some([s.lo, s.hi]);
                match s.shape {
                    Shape::Parabolic(q) => {
                        SegmentSpec::Parabolic { alpha: q.alpha, u0: q.u0, gamma: q.gamma, interval }
                    }
                    Shape::Sech(q) => SegmentSpec::Sech {
                        alpha_inv: q.alpha_inv,
                        u0: q.u0,
                        beta_shift: q.beta_shift,
                        gamma: q.gamma,
                        interval,
                    },
                    Shape::LandauInfinite(q) => {
                        SegmentSpec::Landau { alpha_inv: q.alpha_inv, u0: q.u0, gamma: q.gamma }
                    }
                    Shape::Free => unreachable!("barriers() skips free segments"),
                }
            })
            .collect();
        PotentialDocument { unit_system: self.units().name.clone(), constants: self.units().constants, segments }
    }

    /// Parses and validates a JSON potential document.
    pub fn from_json(text: &str) -> Result<Self> {
        let p = PotentialDocument::from_json(text)?.build()?;
        p.validate().map_err(Error::InvalidComposite)?;
        Ok(p)
    }
}
