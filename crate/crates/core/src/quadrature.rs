//! Adaptive Simpson quadrature over a partition of panels.

use crate::error::{Error, Result};

/// Tolerances and evaluation budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: usize,
    /// Initial subdivisions of each supplied panel.
    pub initial_splits: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-10, rel_tol: 1e-10, max_evaluations: 1_000_000, initial_splits: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const MAX_DEPTH: u32 = 60;

struct Piece {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    depth: u32,
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, never placing a node
/// strictly across one of the `breaks`.
pub fn integrate<F>(mut f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidParameter("quadrature breaks must be ascending".into()));
    }
    let mut evaluations = 0usize;
    let mut eval = |x: f64, n: &mut usize| -> Result<f64> {
        *n += 1;
        if *n > cfg.max_evaluations {
            return Err(Error::QuadratureFailure { evaluations: cfg.max_evaluations });
        }
        f(x)
    };

    let mut pieces = Vec::new();
    let mut coarse = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi == lo {
            continue;
        }
        let n = cfg.initial_splits.max(1);
        let h = (hi - lo) / n as f64;
        let mut fa = eval(lo, &mut evaluations)?;
        for i in 0..n {
            let a = lo + h * i as f64;
            let b = if i + 1 == n { hi } else { lo + h * (i + 1) as f64 };
            let m = 0.5 * (a + b);
            let fm = eval(m, &mut evaluations)?;
            let fb = eval(b, &mut evaluations)?;
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            coarse += whole;
            pieces.push(Piece { a, b, fa, fm, fb, whole, depth: 0 });
            fa = fb;
        }
    }
    let span = breaks[breaks.len() - 1] - breaks[0];
    let target = cfg.abs_tol.max(cfg.rel_tol * coarse.abs());

    let mut value = 0.0;
    let mut error = 0.0;
    while let Some(p) = pieces.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(lm, &mut evaluations)?;
        let frm = eval(rm, &mut evaluations)?;
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let diff = left + right - p.whole;
        let local = target * (p.b - p.a) / span;
        if diff.abs() <= 15.0 * local || p.depth >= MAX_DEPTH || m <= p.a || m >= p.b {
            value += left + right + diff / 15.0;
            error += diff.abs() / 15.0;
        } else {
            pieces.push(Piece { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, depth: p.depth + 1 });
            pieces.push(Piece { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, depth: p.depth + 1 });
        }
    }
    Ok(Quadrature { value, error_estimate: error, evaluations })
}
