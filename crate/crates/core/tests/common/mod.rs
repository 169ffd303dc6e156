#![allow(dead_code)]

use barrierlab_core::{CompositePotential, GlobalSolution, ParabolicShape, SechShape, Shape, UnitSystem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn double_parabola() -> CompositePotential {
    CompositePotential::from_shapes(
        UnitSystem::atomic(Default::default()),
        vec![
            Shape::Parabolic(ParabolicShape::new(10.0, 0.125, -10.0)),
            Shape::Parabolic(ParabolicShape::new(10.0, 0.125, 10.0)),
        ],
    )
}

pub fn mixed_pair() -> CompositePotential {
    CompositePotential::from_shapes(
        UnitSystem::natural(),
        vec![Shape::Parabolic(ParabolicShape::new(1.0, 1.0, -1.5)), Shape::Sech(SechShape::new(1.0, 1.0, 0.5, 2.5))],
    )
}

/// 2 to 4 parabolic / compact sech^2 barriers, touching or separated.
pub fn random_composite(rng: &mut ChaCha8Rng) -> CompositePotential {
    let units = UnitSystem::natural();
    let n = rng.gen_range(2..=4);
    let mut cursor = rng.gen_range(-3.0..0.0);
    let mut shapes = Vec::with_capacity(n);
    for _ in 0..n {
        if rng.gen_bool(0.5) {
            cursor += rng.gen_range(0.0..1.5);
        }
        let u0 = rng.gen_range(0.2..2.0);
        let shape = if rng.gen_bool(0.5) {
            let alpha = rng.gen_range(0.3..2.0);
            let s = ParabolicShape::new(alpha, u0, cursor + alpha);
            cursor += 2.0 * alpha;
            Shape::Parabolic(s)
        } else {
            let alpha_inv = rng.gen_range(0.5..2.0);
            let beta = rng.gen_range(0.2..0.9) * (2.0 * u0).sqrt();
            let probe = SechShape::new(alpha_inv, u0, beta, 0.0);
            let w = probe.half_width(&units);
            let s = SechShape::new(alpha_inv, u0, beta, cursor + w);
            cursor += 2.0 * w;
            Shape::Sech(s)
        };
        shapes.push(shape);
    }
    CompositePotential::from_shapes(units, shapes)
}

/// Worst C^2 check over the interfaces: the centered second difference of
/// `psi` against `(v - k^2) psi`, as a multiple of its allowed tolerance.
///
/// The tolerance covers the `h/6` jump of `psi'''` (from the kink in `U`),
/// the `h^2` truncation term and rounding in the difference quotient.
pub fn c2_worst_ratio(p: &CompositePotential, sol: &GlobalSolution) -> f64 {
    let units = p.units();
    let k2 = units.reduced(sol.energy);
    let v_max = units.reduced(p.max_peak());
    let mut worst: f64 = 0.0;
    for x in sol.interfaces() {
        let scale = p.segments().iter().filter_map(|s| s.shape.length_scale()).fold(f64::INFINITY, f64::min);
        let h = 1e-4 * scale;
        let psi = |x: f64| sol.psi(x).unwrap();
        let (m, c, pl) = (psi(x - h), psi(x), psi(x + h));
        let second = (pl - 2.0 * c + m) / (h * h);
        let expected = (units.reduced(p.evaluate(x)) - k2) * c;
        let left = p.segments()[p.segment_index(x - h)].shape.derivative(x);
        let right = p.segments()[p.segment_index(x + h)].shape.derivative(x);
        let jump = units.reduced((left - right).abs());
        let size = m.norm().max(c.norm()).max(pl.norm());
        let tol = h / 3.0 * jump * size + (v_max + k2).powi(2) * h * h * size + 16.0 * f64::EPSILON * size / (h * h);
        worst = worst.max((second - expected).norm() / tol);
    }
    worst
}
