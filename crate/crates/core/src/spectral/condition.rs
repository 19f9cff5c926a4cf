//! Characteristic functions whose zeros are the eigenvalues.
//!
//! For interval extensions the conditions are written with the entire
//! functions `C(a, λ) = cos(√λ a)` and `S(a, λ) = sin(√λ a)/√λ`, so they
//! are real analytic in `λ` and independent of the square root taken:
//!
//! - Dirichlet: `S(a, λ)`
//! - first kind: `(θ11 + θ22) C - λ S + (θ11 θ22 - |θ12|²) S + 2 Re θ12`
//! - second kind: `-C + 2 Re(w1 conj w2) - θ S`
//!
//! During root search they are evaluated in `s = √λ` on the positive axis and
//! in `κ = √-λ`, scaled by `e^{-κa}`, on the negative axis.

use num_complex::Complex64;

use crate::error::Result;
use crate::extension::{Base, Block, Problem};
use crate::numeric::dual::Dual;
use crate::numeric::{c_complex, c_scalar, s_complex, s_scalar};

fn first_kind_parts(theta11: f64, theta22: f64, theta12: Complex64) -> (f64, f64, f64) {
    (theta11 + theta22, theta11 * theta22 - theta12.norm_sqr(), 2.0 * theta12.re)
}

/// Characteristic function at `λ = s²`, differentiable in `s > 0`.
pub(crate) fn char_positive(base: &Base, s: Dual) -> Dual {
    let Some(a) = base.length() else {
        unreachable!("characteristic functions are only used on intervals")
    };
    let sa = s * a;
    let c = sa.cos();
    let sn = sa.sin() / s;
    match *base {
        Base::Dirichlet { .. } => sn,
        Base::FirstKind { theta11, theta22, theta12, .. } => {
            let (tr, det, re2) = first_kind_parts(theta11, theta22, theta12);
            c * tr - s * s * sn + sn * det + re2
        }
        Base::SecondKind { w1, w2, theta, .. } => {
            -c + 2.0 * (w1 * w2.conj()).re - sn * theta
        }
        _ => unreachable!(),
    }
}

/// Characteristic function at `λ = -κ²`, multiplied by `e^{-κa}` so it stays
/// bounded.
pub(crate) fn char_negative_scaled(base: &Base, kappa: Dual) -> Dual {
    let Some(a) = base.length() else { unreachable!() };
    let e2 = (kappa * (-2.0 * a)).exp_m1();
    let damp = (kappa * (-a)).exp();
    // e^{-κa} cosh κa and e^{-κa} sinh(κa)/κ.
    let ch = (e2 + 2.0) * 0.5;
    let sh = -(e2 / kappa) * 0.5;
    match *base {
        Base::Dirichlet { .. } => sh,
        Base::FirstKind { theta11, theta22, theta12, .. } => {
            let (tr, det, re2) = first_kind_parts(theta11, theta22, theta12);
            ch * tr + kappa * kappa * sh + sh * det + damp * re2
        }
        Base::SecondKind { w1, w2, theta, .. } => {
            -ch + damp * (2.0 * (w1 * w2.conj()).re) - sh * theta
        }
        _ => unreachable!(),
    }
}

/// Size of the terms in the characteristic function, against which a
/// vanishing value is judged.
pub(crate) fn term_scale(base: &Base, root: f64) -> f64 {
    let a = base.length().unwrap_or(1.0);
    let inv = if root > 0.0 { a.min(1.0 / root) } else { a };
    match *base {
        Base::Dirichlet { .. } => inv,
        Base::FirstKind { theta11, theta22, theta12, .. } => {
            theta11.abs() + theta22.abs() + root + (theta11 * theta22).abs().max(theta12.norm_sqr()) * inv
                + 2.0 * theta12.re.abs()
        }
        Base::SecondKind { w1, w2, theta, .. } => {
            1.0 + 2.0 * (w1 * w2.conj()).re.abs() + theta.abs() * inv
        }
        _ => 1.0,
    }
}

/// The algebraic zero-eigenvalue criteria; zero exactly when `0` is an
/// eigenvalue. Equal to minus the characteristic function at `λ = 0`.
pub(crate) fn zero_criterion(base: &Base) -> f64 {
    match *base {
        Base::Dirichlet { length } => length,
        Base::FirstKind { length: a, theta11, theta22, theta12 } => {
            a * theta12.norm_sqr() - theta11 - a * theta11 * theta22 - theta22 - 2.0 * theta12.re
        }
        Base::SecondKind { length: a, w1, w2, theta } => a * theta - 2.0 * (w1 * w2.conj()).re + 1.0,
        // Constants are eigenfunctions on the circle; nothing normalizable at
        // zero energy on the half-line.
        Base::Circle { .. } => 0.0,
        Base::Robin { .. } => 1.0,
    }
}

pub(crate) fn zero_scale(base: &Base) -> f64 {
    match *base {
        Base::FirstKind { length: a, theta11, theta22, theta12 } => {
            1.0 + a * theta12.norm_sqr() + theta11.abs() + theta22.abs() + a * (theta11 * theta22).abs()
                + 2.0 * theta12.re.abs()
        }
        Base::SecondKind { length: a, theta, .. } => 2.0 + a * theta.abs(),
        _ => 1.0,
    }
}

/// Real entire characteristic function `D(λ)` of a base extension. For the
/// circle this is `2 - 2 cos(√λ L)`; for the half-line the bound-state
/// condition `cos α + √-λ sin α` continued by its modulus on `λ >= 0`.
pub(crate) fn characteristic(base: &Base, lambda: f64) -> Result<f64> {
    let a = base.length().unwrap_or(0.0);
    Ok(match *base {
        Base::Circle { circumference } => 2.0 - 2.0 * c_scalar(circumference, lambda)?,
        Base::Robin { alpha } => robin_condition(alpha, lambda),
        Base::Dirichlet { .. } => s_scalar(a, lambda)?,
        Base::FirstKind { theta11, theta22, theta12, .. } => {
            let (tr, det, re2) = first_kind_parts(theta11, theta22, theta12);
            let (c, s) = (c_scalar(a, lambda)?, s_scalar(a, lambda)?);
            tr * c - lambda * s + det * s + re2
        }
        Base::SecondKind { w1, w2, theta, .. } => {
            let (c, s) = (c_scalar(a, lambda)?, s_scalar(a, lambda)?);
            -c + 2.0 * (w1 * w2.conj()).re - theta * s
        }
    })
}

fn robin_condition(alpha: f64, lambda: f64) -> f64 {
    if lambda < 0.0 {
        alpha.cos() + (-lambda).sqrt() * alpha.sin()
    } else if lambda == 0.0 {
        1.0
    } else {
        // Modulus of the Jost function: never zero on the continuum.
        (alpha.cos().powi(2) + lambda * alpha.sin().powi(2)).sqrt()
    }
}

/// Complex characteristic function, used to detect poles of the resolvent.
pub(crate) fn characteristic_complex(base: &Base, lambda: Complex64) -> Complex64 {
    let a = base.length().unwrap_or(0.0);
    match *base {
        Base::Circle { circumference } => 2.0 - 2.0 * c_complex(circumference, lambda),
        Base::Robin { .. } => Complex64::new(1.0, 0.0),
        Base::Dirichlet { .. } => s_complex(a, lambda),
        Base::FirstKind { theta11, theta22, theta12, .. } => {
            let (tr, det, re2) = first_kind_parts(theta11, theta22, theta12);
            let (c, s) = (c_complex(a, lambda), s_complex(a, lambda));
            tr * c - lambda * s + det * s + re2
        }
        Base::SecondKind { w1, w2, theta, .. } => {
            let (c, s) = (c_complex(a, lambda), s_complex(a, lambda));
            -c + 2.0 * (w1 * w2.conj()).re - theta * s
        }
    }
}

fn block_condition(block: &Block, lambda: f64) -> Result<f64> {
    let x = lambda - block.mu;
    if x == 0.0 {
        return Ok(zero_criterion(&block.base));
    }
    let d = characteristic(&block.base, x)?;
    Ok(match block.base {
        Base::Dirichlet { .. } | Base::FirstKind { .. } | Base::SecondKind { .. } => x.abs().sqrt() * d,
        _ => d,
    })
}

/// Eigenvalue condition: a real function of `λ` vanishing exactly on the
/// point spectrum.
///
/// On intervals, for `λ != 0` this is `√|λ| D(λ)` (so the Dirichlet case is
/// `sin(√λ a)` for `λ > 0`), and at `λ = 0` the algebraic zero criterion.
/// Mass shifts evaluate the inner condition at `λ - μ`; direct sums
/// multiply the component conditions.
pub fn eigenvalue_condition(problem: &Problem, lambda: f64) -> Result<f64> {
    problem.blocks().iter().try_fold(1.0, |acc, b| Ok(acc * block_condition(b, lambda)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::Extension;
    use crate::geometry::Manifold;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    fn on(a: f64, e: Extension) -> Problem {
        Problem::new(Manifold::Interval { length: a }, e).unwrap()
    }

    #[test]
    fn dirichlet_and_neumann_vanish_on_squares() {
        let d = eigenvalue_condition(&on(PI, Extension::IntervalDirichlet), 4.0).unwrap();
        assert!(d.abs() < 1e-14);
        let n = eigenvalue_condition(&on(PI, Extension::neumann()), 4.0).unwrap();
        assert!(n.abs() < 1e-14);
    }

    #[test]
    fn coupled_ends_at_pi_squared() {
        let p = on(1.0, Extension::first_kind(0.0, 0.0, Complex64::new(1.0, 0.0)));
        let r = eigenvalue_condition(&p, PI * PI).unwrap();
        assert!((r - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn periodic_second_kind_has_zero_mode() {
        let w = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let p = on(2.0 * PI, Extension::second_kind(w, w, 0.0));
        assert!(eigenvalue_condition(&p, 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn zero_criterion_is_the_limit_of_the_characteristic_function() {
        let bases = [
            Base::FirstKind { length: 1.3, theta11: 0.3, theta22: -0.7, theta12: Complex64::new(0.4, 0.9) },
            Base::SecondKind {
                length: 1.3,
                w1: Complex64::new(0.6, 0.0),
                w2: Complex64::from_polar(0.8, 0.7),
                theta: 0.9,
            },
        ];
        for b in &bases {
            let near = characteristic(b, 1e-9).unwrap();
            assert!((near + zero_criterion(b)).abs() < 1e-8);
        }
    }

    #[test]
    fn dual_forms_agree_with_scalar_forms() {
        let b = Base::FirstKind { length: 1.3, theta11: 0.3, theta22: -0.7, theta12: Complex64::new(0.4, 0.9) };
        for &s in &[0.2, 1.7, 9.0] {
            let d = char_positive(&b, Dual::variable(s)).v;
            assert!((d - characteristic(&b, s * s).unwrap()).abs() < 1e-12);
            let k = char_negative_scaled(&b, Dual::variable(s)).v * (s * 1.3f64).exp();
            let exact = characteristic(&b, -s * s).unwrap();
            assert!((k - exact).abs() < 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn robin_condition_vanishes_at_bound_state() {
        let p = Problem::new(Manifold::HalfLine, Extension::robin(-FRAC_PI_4)).unwrap();
        assert!(eigenvalue_condition(&p, -1.0).unwrap().abs() < 1e-15);
        assert!(eigenvalue_condition(&p, 2.0).unwrap() > 0.5);
    }
}
