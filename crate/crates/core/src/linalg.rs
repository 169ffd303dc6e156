//! Dense complex linear solves for the interface-matching systems (n <= ~20).

use crate::error::{Error, Result};
use crate::specfun::Complex;

/// Condition estimates above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e14;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![Complex::new(0.0, 0.0); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, x: &[Complex]) -> Vec<Complex> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| lu.get(i, col).norm().total_cmp(&lu.get(j, col).norm()))
                .expect("non-empty pivot range");
            if lu.get(pivot, col).norm() == 0.0 {
                return Err(Error::SingularSystem { condition: f64::INFINITY });
            }
            if pivot != col {
                for j in 0..n {
                    lu.data.swap(col * n + j, pivot * n + j);
                }
                perm.swap(col, pivot);
            }
            let d = lu.get(col, col);
            for i in col + 1..n {
                let f = lu.get(i, col) / d;
                lu.set(i, col, f);
                for j in col + 1..n {
                    let v = lu.get(i, j) - f * lu.get(col, j);
                    lu.set(i, j, v);
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve(&self, b: &[Complex]) -> Vec<Complex> {
        let n = self.lu.dim();
        let mut x: Vec<Complex> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let v = x[i] - self.lu.get(i, j) * x[j];
                x[i] = v;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let v = x[i] - self.lu.get(i, j) * x[j];
                x[i] = v;
            }
            x[i] /= self.lu.get(i, i);
        }
        x
    }

    /// `||A^-1||_1` from explicit columns of the inverse.
    pub fn inverse_norm1(&self) -> f64 {
        let n = self.lu.dim();
        let mut best: f64 = 0.0;
        for j in 0..n {
            let mut e = vec![Complex::new(0.0, 0.0); n];
            e[j] = Complex::new(1.0, 0.0);
            let col = self.solve(&e);
            best = best.max(col.iter().map(|c| c.norm()).sum());
        }
        best
    }
}

/// Solution of a square system with diagnostics.
#[derive(Debug, Clone)]
pub struct Solved {
    pub x: Vec<Complex>,
    /// 1-norm condition estimate of the (column-equilibrated) system.
    pub condition: f64,
    /// `||A x - b||_inf / ||b||_inf`.
    pub relative_residual: f64,
}

/// Solves `A x = b`, equilibrating columns first so the condition estimate
/// reflects the matching problem rather than the basis normalization.
pub fn solve(a: &Matrix, b: &[Complex]) -> Result<Solved> {
    let n = a.dim();
    let scales: Vec<f64> = (0..n)
        .map(|j| {
            let m = (0..n).map(|i| a.get(i, j).norm()).fold(0.0, f64::max);
            if m > 0.0 {
                m
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    for i in 0..n {
        for (j, s) in scales.iter().enumerate() {
            scaled.set(i, j, a.get(i, j) / s);
        }
    }
    let lu = Lu::factor(&scaled)?;
    let condition = scaled.norm1() * lu.inverse_norm1();
    if !(condition < MAX_CONDITION) {
        return Err(Error::SingularSystem { condition });
    }
    let y = lu.solve(b);
    let x: Vec<Complex> = y.iter().zip(&scales).map(|(v, s)| v / s).collect();
    let ax = a.mul_vec(&x);
    let bnorm = b.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let relative_residual = ax.iter().zip(b).map(|(l, r)| (l - r).norm()).fold(0.0, f64::max) / bnorm;
    Ok(Solved { x, condition, relative_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn solves_small_complex_system() {
        let mut a = Matrix::zeros(3);
        let rows = [
            [c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0)],
            [c(3.0, 0.0), c(0.0, 0.0), c(0.5, 0.5)],
            [c(1.0, 1.0), c(-1.0, 0.0), c(2.0, 0.0)],
        ];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                a.set(i, j, *v);
            }
        }
        let x_true = vec![c(1.0, -2.0), c(0.5, 0.25), c(-3.0, 1.0)];
        let b = a.mul_vec(&x_true);
        let s = solve(&a, &b).unwrap();
        for (x, t) in s.x.iter().zip(&x_true) {
            assert!((x - t).norm() < 1e-14);
        }
        assert!(s.relative_residual < 1e-15);
        assert!(s.condition >= 1.0);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let mut a = Matrix::zeros(2);
        a.set(0, 1, c(1.0, 0.0));
        a.set(1, 0, c(1.0, 0.0));
        let s = solve(&a, &[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(s.x, vec![c(3.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = Matrix::zeros(2);
        a.set(0, 0, c(1.0, 0.0));
        a.set(0, 1, c(2.0, 0.0));
        a.set(1, 0, c(2.0, 0.0));
        a.set(1, 1, c(4.0, 0.0));
        assert!(matches!(solve(&a, &[c(1.0, 0.0), c(1.0, 0.0)]), Err(Error::SingularSystem { .. })));
    }
}
