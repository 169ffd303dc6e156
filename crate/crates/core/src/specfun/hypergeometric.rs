use super::{check_finite, is_nonpositive_integer, Complex, SeriesControl};
use crate::error::{Error, Result};

/// Largest `|z|` accepted by [`kummer_m`]. The series is entire, but terms
/// peak near `e^|z|` before decaying, so beyond this the cancellation eats
/// the double-precision budget.
pub const KUMMER_M_MAX_ABS_Z: f64 = 50.0;

/// Largest `|z|` accepted by [`gauss_f`]. Callers pick the Legendre
/// representation whose argument stays at or below one half.
pub const GAUSS_F_MAX_ABS_Z: f64 = 0.95;

/// Sums a hypergeometric-type series given the ratio of consecutive terms.
fn sum_series(ctl: &SeriesControl, what: &'static str, mut ratio: impl FnMut(usize) -> Complex) -> Result<Complex> {
    let mut term = Complex::new(1.0, 0.0);
    let mut sum = term;
    let mut small_run = 0;
    for n in 0..ctl.max_terms {
        term *= ratio(n);
        sum += term;
        if term.norm() <= ctl.rel_tol * sum.norm() {
            small_run += 1;
            if small_run == 2 {
                return check_finite(sum, what);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence { what, terms: ctl.max_terms })
}

/// Kummer's confluent hypergeometric function `M(a, b, z)`.
pub fn kummer_m(a: Complex, b: Complex, z: Complex, ctl: &SeriesControl) -> Result<Complex> {
    if is_nonpositive_integer(b) {
        return Err(Error::InvalidParameter(format!("Kummer M: b = {b} is a non-positive integer")));
    }
    if z.norm() > KUMMER_M_MAX_ABS_Z {
        return Err(Error::InvalidParameter(format!(
            "Kummer M: |z| = {} exceeds the series budget {KUMMER_M_MAX_ABS_Z}",
            z.norm()
        )));
    }
    if z == Complex::new(0.0, 0.0) {
        return Ok(Complex::new(1.0, 0.0));
    }
    sum_series(ctl, "kummer_m", |n| {
        let n = n as f64;
        (a + n) / (b + n) * z / (n + 1.0)
    })
}

/// `dM/dz = (a/b) M(a+1, b+1, z)`.
pub fn kummer_m_deriv(a: Complex, b: Complex, z: Complex, ctl: &SeriesControl) -> Result<Complex> {
    if is_nonpositive_integer(b) {
        return Err(Error::InvalidParameter(format!("Kummer M: b = {b} is a non-positive integer")));
    }
    let one = Complex::new(1.0, 0.0);
    Ok(a / b * kummer_m(a + one, b + one, z, ctl)?)
}

/// Gauss hypergeometric function `F(a, b; c; z)` for `|z| <= 0.95`.
pub fn gauss_f(a: Complex, b: Complex, c: Complex, z: Complex, ctl: &SeriesControl) -> Result<Complex> {
    if is_nonpositive_integer(c) {
        return Err(Error::InvalidParameter(format!("Gauss F: c = {c} is a non-positive integer")));
    }
    if z.norm() > GAUSS_F_MAX_ABS_Z {
        return Err(Error::NonConvergence { what: "gauss_f (|z| beyond convergence margin)", terms: 0 });
    }
    if z == Complex::new(0.0, 0.0) {
        return Ok(Complex::new(1.0, 0.0));
    }
    sum_series(ctl, "gauss_f", |n| {
        let n = n as f64;
        (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
    })
}

/// `dF/dz = (ab/c) F(a+1, b+1; c+1; z)`.
pub fn gauss_f_deriv(a: Complex, b: Complex, c: Complex, z: Complex, ctl: &SeriesControl) -> Result<Complex> {
    if is_nonpositive_integer(c) {
        return Err(Error::InvalidParameter(format!("Gauss F: c = {c} is a non-positive integer")));
    }
    let one = Complex::new(1.0, 0.0);
    Ok(a * b / c * gauss_f(a + one, b + one, c + one, z, ctl)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::I;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn kummer_at_origin_is_one() {
        let ctl = SeriesControl::default();
        let v = kummer_m(Complex::new(0.3, -1.2), c(0.5), c(0.0), &ctl).unwrap();
        assert_eq!(v, c(1.0));
    }

    #[test]
    fn kummer_collapses_to_exponential() {
        let ctl = SeriesControl::default();
        let v = kummer_m(c(1.0), c(1.0), c(1.0), &ctl).unwrap();
        assert!((v.re - std::f64::consts::E).abs() < 1e-15);
        // M(a, a, z) = e^z for complex z as well
        let z = Complex::new(0.4, 2.5);
        let v = kummer_m(Complex::new(0.7, 0.2), Complex::new(0.7, 0.2), z, &ctl).unwrap();
        assert!((v - z.exp()).norm() < 1e-14 * z.exp().norm());
    }

    #[test]
    fn kummer_terminates_for_negative_integer_a() {
        // M(-2, b, z) = 1 - 2z/b + z^2/(b(b+1))
        let ctl = SeriesControl::default();
        let (b, z) = (c(1.5), Complex::new(0.3, 0.4));
        let expected = c(1.0) - 2.0 * z / b + z * z / (b * (b + 1.0));
        let v = kummer_m(c(-2.0), b, z, &ctl).unwrap();
        assert!((v - expected).norm() < 1e-15);
    }

    #[test]
    fn kummer_rejects_forbidden_b() {
        let ctl = SeriesControl::default();
        assert!(matches!(kummer_m(c(1.0), c(-3.0), c(0.2), &ctl), Err(Error::InvalidParameter(_))));
        assert!(matches!(kummer_m(c(1.0), c(0.0), c(0.2), &ctl), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn kummer_reports_exhausted_budget() {
        let ctl = SeriesControl { rel_tol: 1e-14, max_terms: 3 };
        assert!(matches!(kummer_m(c(1.0), c(1.0), c(5.0), &ctl), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn kummer_derivative_matches_finite_difference() {
        let ctl = SeriesControl::default();
        let (a, b) = (Complex::new(0.25, -1.05), c(0.5));
        let z = Complex::new(0.0, 2.0);
        let h = 1e-5;
        let fd = (kummer_m(a, b, z + h, &ctl).unwrap() - kummer_m(a, b, z - h, &ctl).unwrap()) / (2.0 * h);
        let d = kummer_m_deriv(a, b, z, &ctl).unwrap();
        assert!((fd - d).norm() < 1e-8 * d.norm());
    }

    #[test]
    fn gauss_at_origin_is_one() {
        let ctl = SeriesControl::default();
        let v = gauss_f(c(0.5), Complex::new(0.5, 1.3), Complex::new(1.0, -0.3), c(0.0), &ctl).unwrap();
        assert_eq!(v, c(1.0));
    }

    #[test]
    fn gauss_binomial_identity() {
        let ctl = SeriesControl::default();
        let b = Complex::new(0.3, 0.7);
        let v = gauss_f(c(2.0), b, b, c(0.3), &ctl).unwrap();
        assert!((v - c(1.0 / 0.49)).norm() < 1e-13);
    }

    #[test]
    fn gauss_refuses_arguments_near_unit_circle() {
        let ctl = SeriesControl::default();
        assert!(matches!(gauss_f(c(0.5), c(0.5), c(1.5), c(0.96), &ctl), Err(Error::NonConvergence { .. })));
        assert!(matches!(gauss_f(c(0.5), c(0.5), c(-1.0), c(0.2), &ctl), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn gauss_tightening_tolerance_changes_little() {
        let ctl = SeriesControl::default();
        let fine = SeriesControl { rel_tol: ctl.rel_tol / 10.0, ..ctl };
        let (a, b, cc) = (Complex::new(0.5, -0.9), Complex::new(0.5, 0.9), Complex::new(1.0, -0.4));
        for z in [0.1, 0.3, 0.5, 0.8] {
            let v = gauss_f(a, b, cc, c(z), &ctl).unwrap();
            let w = gauss_f(a, b, cc, c(z), &fine).unwrap();
            assert!((v - w).norm() <= 10.0 * ctl.rel_tol * v.norm());
        }
    }

    #[test]
    fn gauss_derivative_matches_finite_difference() {
        let ctl = SeriesControl::default();
        let (a, b, cc) = (Complex::new(0.5, -0.9), Complex::new(0.5, 0.9), I * 0.7 + 1.0);
        let z = c(0.35);
        let h = 1e-5;
        let fd = (gauss_f(a, b, cc, z + h, &ctl).unwrap() - gauss_f(a, b, cc, z - h, &ctl).unwrap()) / (2.0 * h);
        let d = gauss_f_deriv(a, b, cc, z, &ctl).unwrap();
        assert!((fd - d).norm() < 1e-8 * d.norm());
    }
}
