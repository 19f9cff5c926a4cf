//! Numerical building blocks: dual numbers, quadrature, root isolation and
//! the branch-free cosine/sine-type functions.

pub mod dual;
pub mod quad;
pub mod roots;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this value of `|x| t^2` the scalar functions use their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;
const SERIES_TERMS: usize = 6;
/// Largest argument of `cosh` that stays finite in f64.
const COSH_LIMIT: f64 = 709.78;

/// `C(t, x) = cos(sqrt(x) t)`, continued to `cosh(sqrt(-x) t)` for `x < 0`.
pub fn c_scalar(t: f64, x: f64) -> Result<f64> {
    let z = x * t * t;
    if z.abs() < SERIES_THRESHOLD {
        return Ok(series(-z, 0));
    }
    if x > 0.0 {
        Ok((x.sqrt() * t).cos())
    } else {
        let m = (-x).sqrt() * t.abs();
        if m > COSH_LIMIT {
            return Err(Error::ScalarOverflow { magnitude: m });
        }
        Ok(m.cosh())
    }
}

/// `S(t, x) = sin(sqrt(x) t) / sqrt(x)`, equal to `t` at `x = 0` and
/// continued to `sinh(sqrt(-x) t) / sqrt(-x)` for `x < 0`.
pub fn s_scalar(t: f64, x: f64) -> Result<f64> {
    let z = x * t * t;
    if z.abs() < SERIES_THRESHOLD {
        return Ok(t * series(-z, 1));
    }
    if x > 0.0 {
        let r = x.sqrt();
        Ok((r * t).sin() / r)
    } else {
        let r = (-x).sqrt();
        let m = r * t.abs();
        if m > COSH_LIMIT {
            return Err(Error::ScalarOverflow { magnitude: m });
        }
        Ok((r * t).sinh() / r)
    }
}

/// `sum_n z^n / (2n + offset)!` truncated after six terms.
fn series(z: f64, offset: u32) -> f64 {
    let mut term = 1.0;
    let mut k = offset as f64;
    let mut sum = 0.0;
    for _ in 0..SERIES_TERMS {
        sum += term;
        term *= z / ((k + 1.0) * (k + 2.0));
        k += 2.0;
    }
    sum
}

/// Complex `C(p, lambda) = cos(sqrt(lambda) p)`; independent of the root taken.
pub fn c_complex(p: f64, lambda: Complex64) -> Complex64 {
    let z = lambda * p * p;
    if z.norm() < SERIES_THRESHOLD {
        return series_complex(-z, 0);
    }
    (lambda.sqrt() * p).cos()
}

/// Complex `S(p, lambda) = sin(sqrt(lambda) p) / sqrt(lambda)`.
pub fn s_complex(p: f64, lambda: Complex64) -> Complex64 {
    let z = lambda * p * p;
    if z.norm() < SERIES_THRESHOLD {
        return series_complex(-z, 1) * p;
    }
    let s = lambda.sqrt();
    (s * p).sin() / s
}

fn series_complex(z: Complex64, offset: u32) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut k = offset as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..SERIES_TERMS {
        sum += term;
        term *= z / ((k + 1.0) * (k + 2.0));
        k += 2.0;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn scalar_values_at_simple_points() {
        assert_eq!(c_scalar(2.0, 0.0).unwrap(), 1.0);
        assert_eq!(s_scalar(2.0, 0.0).unwrap(), 2.0);
        assert!((c_scalar(1.0, PI * PI).unwrap() + 1.0).abs() < 1e-15);
        for &t in &[0.5, 1.0, 3.0] {
            assert!((c_scalar(t, -1.0).unwrap() - t.cosh()).abs() < 1e-14 * t.cosh());
            assert!((s_scalar(t, -1.0).unwrap() - t.sinh()).abs() < 1e-14 * t.cosh());
        }
    }

    #[test]
    fn series_matches_closed_form_near_threshold() {
        for &x in &[2e-5, -3e-5, 9.9e-5, -9.9e-5] {
            let t = 1.0;
            let r = (x as f64).abs().sqrt();
            let (c, s) = if x > 0.0 {
                (r.cos(), r.sin() / r)
            } else {
                (r.cosh(), r.sinh() / r)
            };
            assert!((c_scalar(t, x).unwrap() - c).abs() < 1e-15);
            assert!((s_scalar(t, x).unwrap() - s).abs() < 1e-15);
        }
    }

    #[test]
    fn overflow_is_reported() {
        match c_scalar(800.0, -1.0) {
            Err(Error::ScalarOverflow { magnitude }) => assert_eq!(magnitude, 800.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_versions_are_branch_free() {
        let lam = Complex64::new(2.3, -0.7);
        let s = lam.sqrt();
        let p = 0.9;
        let c_other = (-s * p).cos();
        let s_other = (-s * p).sin() / (-s);
        assert!((c_complex(p, lam) - c_other).norm() < 1e-15);
        assert!((s_complex(p, lam) - s_other).norm() < 1e-15);
        let tiny = Complex64::new(1e-9, 1e-9);
        assert!((s_complex(p, tiny) - p).norm() < 1e-9);
    }
}
