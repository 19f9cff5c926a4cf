//! Integral kernels of the resolvent `(A - λ)⁻¹`.
//!
//! Interval and circle kernels are written with the entire functions
//! `C(p, λ)` and `S(p, λ)`, which makes them independent of the square root
//! of `λ`. The half-line kernel needs the root in the upper half-plane.
//! `greens_function_with_root` evaluates the same kernels in their explicit
//! `√λ` form for a caller-chosen root.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extension::{Base, Block, Problem};
use crate::geometry::Point;
use crate::numeric::quad::{Rule, NODES_PER_PANEL};
use crate::numeric::{c_complex, s_complex};

use super::condition::{characteristic_complex, term_scale};

/// Relative size below which the denominator of a kernel counts as zero.
const POLE_TOL: f64 = 1e-13;

/// A source term for [`resolvent_apply`]: `f` on `[lo, hi]` of one
/// component, zero elsewhere.
pub struct Source<'a> {
    pub component: usize,
    pub lo: f64,
    pub hi: f64,
    pub f: &'a (dyn Fn(f64) -> Complex64 + Sync),
}

/// `k` when `x < y`, `conj k` otherwise.
fn ordered(k: Complex64, x: f64, y: f64) -> Complex64 {
    if x < y {
        k
    } else {
        k.conj()
    }
}

fn upper_root(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

fn locate(problem: &Problem, p: Point) -> Result<(Block, f64)> {
    let block = problem.block(p.component)?;
    let (lo, hi) = problem.manifold.closure(p.component)?;
    if p.x.is_nan() || p.x < lo || p.x > hi {
        return Err(Error::NotInterior(format!("point {} outside [{lo}, {hi}]", p.x)));
    }
    let x = match block.base {
        Base::Circle { circumference } => p.x.rem_euclid(circumference),
        _ => p.x,
    };
    Ok((block, x))
}

fn nearest_eigenvalue(block: &Block, z: Complex64) -> Option<f64> {
    let width = 1e-6 * z.re.abs().max(1.0) + z.im.abs();
    super::block_eigenvalues(block, z.re - width, z.re + width, 4)
        .ok()?
        .into_iter()
        .map(|e| e.lambda + block.mu)
        .min_by(|a, b| (a - z.re - block.mu).abs().total_cmp(&(b - z.re - block.mu).abs()))
}

/// Rejects `z = λ - μ` when it lies in the spectrum of the base.
fn check_resolvent(block: &Block, z: Complex64) -> Result<()> {
    let lambda = z + block.mu;
    match block.base {
        Base::Robin { alpha } => {
            if z.im == 0.0 && z.re >= 0.0 {
                return Err(Error::OnContinuum(lambda));
            }
            let s = upper_root(z);
            let den = Complex64::new(alpha.cos(), 0.0) - Complex64::i() * s * alpha.sin();
            if den.norm() <= POLE_TOL * (1.0 + s.norm()) {
                return Err(Error::Pole { lambda, nearest: Some(-1.0 / alpha.tan().powi(2) + block.mu) });
            }
        }
        _ => {
            let d = characteristic_complex(&block.base, z);
            let pole = match block.base {
                Base::Circle { circumference } => {
                    // D = 2 - 2C vanishes to second order; compare with the
                    // nearest closed-form eigenvalue instead.
                    let n = (z.re.max(0.0).sqrt() * circumference / (2.0 * PI)).round();
                    let exact = (2.0 * PI * n / circumference).powi(2);
                    (z - exact).norm() <= POLE_TOL * exact.max(1.0) || d.norm() == 0.0
                }
                _ => d.norm() <= POLE_TOL * term_scale(&block.base, z.norm().sqrt()),
            };
            if pole || !d.is_finite() {
                return Err(Error::Pole { lambda, nearest: nearest_eigenvalue(block, z) });
            }
        }
    }
    Ok(())
}

/// Kernel of one block at `z = λ - μ`, points already reduced.
fn block_kernel(base: &Base, x: f64, y: f64, z: Complex64) -> Complex64 {
    let c = |p: f64| c_complex(p, z);
    let s = |p: f64| s_complex(p, z);
    let (big, small) = if x >= y { (x, y) } else { (y, x) };
    match *base {
        Base::Circle { circumference: l } => {
            let d = (x - y).abs();
            -c(d - 0.5 * l) / (2.0 * z * s(0.5 * l))
        }
        Base::Robin { alpha } => {
            let r = upper_root(z);
            let (sa, ca) = alpha.sin_cos();
            (ca * s(small) + sa * c(small)) * (Complex64::i() * r * big).exp() / (ca - Complex64::i() * r * sa)
        }
        Base::Dirichlet { length: a } => s(a - big) * s(small) / s(a),
        Base::FirstKind { length: a, theta11, theta22, theta12 } => {
            let det = theta11 * theta22 - theta12.norm_sqr();
            let num = c(a - big) * c(small)
                + theta22 * s(a - big) * c(small)
                + theta11 * c(a - big) * s(small)
                + det * s(a - big) * s(small)
                + ordered(theta12, x, y) * s(small - big);
            num / characteristic_complex(base, z)
        }
        Base::SecondKind { length: a, w1, w2, theta } => {
            let num = w1.norm_sqr() * s(big - a) * c(small)
                + ordered(w1 * w2.conj(), x, y) * s(small - big)
                + theta * s(big - a) * s(small)
                - w2.norm_sqr() * c(big - a) * s(small);
            num / characteristic_complex(base, z)
        }
    }
}

/// Green's function `g(x, y; λ)` of the extension. Points on different
/// components of a disjoint union do not interact.
pub fn greens_function(problem: &Problem, x: Point, y: Point, lambda: Complex64) -> Result<Complex64> {
    let (bx, xr) = locate(problem, x)?;
    let (by, yr) = locate(problem, y)?;
    let zx = lambda - bx.mu;
    check_resolvent(&bx, zx)?;
    if bx.component != by.component {
        check_resolvent(&by, lambda - by.mu)?;
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(block_kernel(&bx.base, xr, yr, zx))
}

/// The kernels in their explicit form in a chosen square root `root` of
/// `λ - μ`. On the half-line the root in the upper half-plane is always
/// used, as the kernel there is defined with it.
pub fn greens_function_with_root(problem: &Problem, x: Point, y: Point, root: Complex64) -> Result<Complex64> {
    let (bx, x) = locate(problem, x)?;
    let (by, y) = locate(problem, y)?;
    let z = root * root;
    check_resolvent(&bx, z)?;
    if bx.component != by.component {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s = root;
    let i = Complex64::i();
    let sin = |p: f64| (s * p).sin();
    let cos = |p: f64| (s * p).cos();
    let (big, small) = if x >= y { (x, y) } else { (y, x) };
    Ok(match bx.base {
        Base::Circle { circumference: l } => {
            let d = (x - y).abs();
            i / (2.0 * s) * ((i * s * d).exp() + 2.0 * cos(d) / ((-i * s * l).exp() - 1.0))
        }
        Base::Robin { alpha } => {
            let s = upper_root(z);
            let (sa, ca) = alpha.sin_cos();
            let amp = 1.0 / (s * (ca - i * s * sa));
            amp * (ca * (s * small).sin() + s * sa * (s * small).cos()) * (i * s * big).exp()
        }
        Base::Dirichlet { length: a } => sin(a - big) * sin(small) / (s * sin(a)),
        Base::FirstKind { length: a, theta11, theta22, theta12 } => {
            let den = s * ((theta11 + theta22) * s * cos(a) - z * sin(a)
                + (theta11 * theta22 - theta12.norm_sqr()) * sin(a)
                + 2.0 * theta12.re * s);
            let num = z * cos(a - big) * cos(small)
                + theta22 * s * sin(a - big) * cos(small)
                + theta11 * s * cos(a - big) * sin(small)
                + theta11 * theta22 * sin(a - big) * sin(small)
                + theta12.norm_sqr() * sin(big - a) * sin(small)
                + ordered(theta12, x, y) * s * sin(small - big);
            num / den
        }
        Base::SecondKind { length: a, w1, w2, theta } => {
            let den = s * (-s * cos(a) + 2.0 * (w1 * w2.conj()).re * s - theta * sin(a));
            let num = w1.norm_sqr() * s * sin(big - a) * cos(small)
                + s * ordered(w1 * w2.conj(), x, y) * sin(small - big)
                + theta * sin(big - a) * sin(small)
                - w2.norm_sqr() * s * cos(big - a) * sin(small);
            num / den
        }
    })
}

/// `u = (A - λ)⁻¹ f` at the given points, by Gauss-Legendre quadrature of
/// the kernel against the source with a panel break at each point.
pub fn resolvent_apply(problem: &Problem, source: &Source, points: &[Point], lambda: Complex64) -> Result<Vec<Complex64>> {
    let block = problem.block(source.component)?;
    let z = lambda - block.mu;
    check_resolvent(&block, z)?;
    let (clo, chi) = problem.manifold.closure(source.component)?;
    if !(source.lo >= clo && source.hi <= chi && source.lo <= source.hi) {
        return Err(Error::NotInterior(format!("source [{}, {}] outside [{clo}, {chi}]", source.lo, source.hi)));
    }
    let span = (source.hi - source.lo).max(f64::MIN_POSITIVE);
    let osc = z.norm().sqrt().max(1.0);
    let width = (span / 8.0).min(2.0 / osc);
    points
        .iter()
        .map(|&p| {
            let (b, x) = locate(problem, p)?;
            if b.component != source.component {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let rule = Rule::composite_with_breaks(source.lo, source.hi, &[x], width, NODES_PER_PANEL);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
                acc += w * block_kernel(&b.base, x, y, z) * (source.f)(y);
            }
            Ok(acc)
        })
        .collect()
}
