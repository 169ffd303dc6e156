//! Real even/odd solutions of `w'' + (z^2/4 - a) w = 0` by power series.
//!
//! With `c_n = alpha_n / (2n)!` the three-term coefficient recursion becomes
//! `c_{n+2} = (a c_{n+1} - c_n / 4) / ((2n+3)(2n+4))`, and the odd analogue
//! with `(2n+4)(2n+5)`. Terms are carried already multiplied by `z^{2n}` so
//! no factorial is ever formed.

use super::SeriesControl;
use crate::error::{Error, Result};

/// Even solution with `w_e(a, 0) = 1`, `w_e'(a, 0) = 0`.
pub fn weber_even(a: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    check_inputs(a, z)?;
    sum_three_term(a, z * z, 3.0, 0.5, ctl, "weber_even")
}

/// Odd solution with `w_o(a, 0) = 0`, `w_o'(a, 0) = 1`.
pub fn weber_odd(a: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    check_inputs(a, z)?;
    Ok(z * sum_three_term(a, z * z, 4.0, 1.0 / 6.0, ctl, "weber_odd")?)
}

fn check_inputs(a: f64, z: f64) -> Result<()> {
    if a.is_finite() && z.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("weber series needs finite a, z (got {a}, {z})")))
    }
}

/// Sums `u_0 + u_1 + ...` with `u_0 = 1`, `u_1 = first * a * s` and
/// `u_{n+2} = (a s u_{n+1} - s^2 u_n / 4) / ((2n+offset)(2n+offset+1))`.
fn sum_three_term(a: f64, s: f64, offset: f64, first: f64, ctl: &SeriesControl, what: &'static str) -> Result<f64> {
    let mut prev = 1.0;
    let mut cur = first * a * s;
    let mut sum = prev + cur;
    let mut small_run = usize::from(cur.abs() <= ctl.rel_tol * sum.abs());
    for n in 0..ctl.max_terms {
        let m = 2.0 * n as f64;
        let next = (a * s * cur - 0.25 * s * s * prev) / ((m + offset) * (m + offset + 1.0));
        sum += next;
        prev = cur;
        cur = next;
        if cur.abs() <= ctl.rel_tol * sum.abs() {
            small_run += 1;
            if small_run >= 2 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence { what, terms: ctl.max_terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{kummer_m, Complex, I};
    use proptest::prelude::*;

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    /// e^{-iz^2/4} M(1/4 - ia/2, 1/2, iz^2/2) and its odd companion.
    fn complex_path(a: f64, z: f64, odd: bool) -> Complex {
        let arg = I * (z * z / 2.0);
        let phase = (-I * (z * z / 4.0)).exp();
        if odd {
            z * phase * kummer_m(0.75 - I * (a / 2.0), Complex::new(1.5, 0.0), arg, &ctl()).unwrap()
        } else {
            phase * kummer_m(0.25 - I * (a / 2.0), Complex::new(0.5, 0.0), arg, &ctl()).unwrap()
        }
    }

    #[test]
    fn values_at_origin() {
        for a in [-2.0, 0.0, 0.7, 5.0] {
            assert_eq!(weber_even(a, 0.0, &ctl()).unwrap(), 1.0);
            assert_eq!(weber_odd(a, 0.0, &ctl()).unwrap(), 0.0);
        }
    }

    #[test]
    fn parity_at_reference_point() {
        let (a, z) = (0.7, 1.3);
        assert_eq!(weber_even(a, -z, &ctl()).unwrap(), weber_even(a, z, &ctl()).unwrap());
        assert_eq!(weber_odd(a, -z, &ctl()).unwrap(), -weber_odd(a, z, &ctl()).unwrap());
    }

    #[test]
    fn agrees_with_kummer_representation() {
        let (a, z) = (1.2, 0.9);
        let tol = 10.0 * ctl().rel_tol;
        let even = weber_even(a, z, &ctl()).unwrap();
        let via_m = complex_path(a, z, false);
        assert!((even - via_m.re).abs() <= tol * even.abs());
        assert!(via_m.im.abs() <= tol * even.abs());
        let odd = weber_odd(a, z, &ctl()).unwrap();
        let via_m = complex_path(a, z, true);
        assert!((odd - via_m.re).abs() <= tol * odd.abs());
        assert!(via_m.im.abs() <= tol * odd.abs());
    }

    #[test]
    fn low_order_coefficients() {
        // alpha_2 = a^2 - 1/2, beta_2 = a^2 - 3/2
        let (a, z) = (0.3_f64, 1e-3_f64);
        let even = 1.0 + a * z * z / 2.0 + (a * a - 0.5) * z.powi(4) / 24.0;
        let odd = z + a * z.powi(3) / 6.0 + (a * a - 1.5) * z.powi(5) / 120.0;
        let got = weber_even(a, z, &ctl()).unwrap();
        assert!((got - even).abs() < 4e-16, "{got} vs {even}");
        assert!((weber_odd(a, z, &ctl()).unwrap() - odd).abs() < 1e-15 * odd.abs());
    }

    #[test]
    fn ode_residual_by_finite_differences() {
        // centered second difference with h = 1e-3 has truncation error
        // h^2/12 |w''''| plus rounding ~ 4 eps |w| / h^2
        let h = 1e-3;
        for a in [-1.5, 0.2, 2.4] {
            for i in 0..20 {
                let z = -3.0 + 0.31 * i as f64;
                for f in [weber_even as fn(f64, f64, &SeriesControl) -> Result<f64>, weber_odd] {
                    let w = |x: f64| f(a, x, &ctl()).unwrap();
                    let second = (w(z + h) - 2.0 * w(z) + w(z - h)) / (h * h);
                    let residual = second + (z * z / 4.0 - a) * w(z);
                    let scale = w(z).abs().max(1.0);
                    assert!(residual.abs() < 1e-5 * scale, "a={a} z={z} residual={residual}");
                }
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tight = SeriesControl { rel_tol: 1e-14, max_terms: 2 };
        assert!(matches!(weber_even(1.0, 4.0, &tight), Err(Error::NonConvergence { .. })));
    }

    proptest! {
        #[test]
        fn parity_is_exact(a in -4.0f64..4.0, z in -5.0f64..5.0) {
            prop_assert_eq!(weber_even(a, -z, &ctl()).unwrap(), weber_even(a, z, &ctl()).unwrap());
            prop_assert_eq!(weber_odd(a, -z, &ctl()).unwrap(), -weber_odd(a, z, &ctl()).unwrap());
        }

        #[test]
        fn dual_path_consistency(a in -3.0f64..3.0, z in -3.0f64..3.0) {
            let tol = 10.0 * ctl().rel_tol;
            // the complex path sums terms of size up to e^{z^2/2}; allow for that growth
            let growth = (z * z / 2.0).exp();
            let even = weber_even(a, z, &ctl()).unwrap();
            let m = complex_path(a, z, false);
            prop_assert!((even - m.re).abs() <= tol * growth * even.abs().max(1.0));
            prop_assert!(m.im.abs() <= tol * growth * even.abs().max(1.0));
            let odd = weber_odd(a, z, &ctl()).unwrap();
            let m = complex_path(a, z, true);
            prop_assert!((odd - m.re).abs() <= tol * growth * odd.abs().max(1.0));
            prop_assert!(m.im.abs() <= tol * growth * odd.abs().max(1.0));
        }

        #[test]
        fn dual_path_consistency_near_origin(a in -3.0f64..3.0, z in -1.5f64..1.5) {
            let tol = 10.0 * ctl().rel_tol;
            let even = weber_even(a, z, &ctl()).unwrap();
            let m = complex_path(a, z, false);
            prop_assert!((even - m.re).abs() <= tol * even.abs().max(1.0));
            prop_assert!(m.im.abs() <= tol * even.abs().max(1.0));
            let odd = weber_odd(a, z, &ctl()).unwrap();
            let m = complex_path(a, z, true);
            prop_assert!((odd - m.re).abs() <= tol * odd.abs().max(1.0));
            prop_assert!(m.im.abs() <= tol * odd.abs().max(1.0));
        }
    }
}
