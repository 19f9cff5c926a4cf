//! The continuous spectrum `[μ, ∞)` of the half-line extensions.
//!
//! Generalized eigenfunctions are normalized against `δ(k - k')` in the
//! momentum `k = √(λ - μ)`:
//!
//! `ψ_k(x) = √(2/π) (k sin α cos kx + cos α sin kx) / √(k² sin² α + cos² α)`.
//!
//! The spectral density in `λ` is `ψ_k(x) ψ_k(y) / 2k`; [`continuum_density`]
//! recovers it independently from the resolvent kernel by Stone's formula.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extension::{Base, Problem};
use crate::geometry::Point;

use super::greens::greens_function;
use super::modes::ModeShape;

/// Offsets `ε / (1 + λ)` used for the Stone limit.
const EPSILONS: [f64; 3] = [1e-3, 1e-4, 1e-5];

/// `ψ_k` for the Robin parameter `alpha`.
pub fn generalized_eigenfunction(alpha: f64, k: f64) -> ModeShape {
    let (sa, ca) = alpha.sin_cos();
    let norm = (2.0 / PI).sqrt() / (k * k * sa * sa + ca * ca).sqrt();
    ModeShape::Trig { a: Complex64::new(norm * k * sa, 0.0), b: Complex64::new(norm * ca, 0.0), k }
}

fn robin_on(problem: &Problem, x: Point, y: Point) -> Result<Option<(f64, f64)>> {
    let b = problem.block(x.component)?;
    problem.block(y.component)?;
    let Base::Robin { alpha } = b.base else {
        return Err(Error::Unsupported(format!(
            "no continuous spectrum for {}",
            problem.extension.name()
        )));
    };
    if x.component != y.component {
        return Ok(None);
    }
    Ok(Some((alpha, b.mu)))
}

/// Closed-form density `ψ_k(x) ψ_k(y) / 2k` at `λ = k² + μ`.
pub fn continuum_density_exact(problem: &Problem, x: Point, y: Point, lambda: f64) -> Result<f64> {
    let Some((alpha, mu)) = robin_on(problem, x, y)? else { return Ok(0.0) };
    if !(lambda > mu) {
        return Err(Error::Unsupported(format!("density requested below the continuum at {lambda}")));
    }
    let k = (lambda - mu).sqrt();
    let psi = generalized_eigenfunction(alpha, k);
    Ok((psi.value(x.x) * psi.value(y.x)).re / (2.0 * k))
}

/// Density of the spectral measure by Stone's formula,
/// `lim (1/π) Im g(x, y; λ + iε)`, Richardson-extrapolated from three
/// offsets.
pub fn continuum_density(problem: &Problem, x: Point, y: Point, lambda: f64) -> Result<f64> {
    let Some((_, mu)) = robin_on(problem, x, y)? else { return Ok(0.0) };
    if !(lambda > mu) {
        return Err(Error::Unsupported(format!("density requested below the continuum at {lambda}")));
    }
    let scale = 1.0 + lambda.abs();
    let mut v = [0.0; 3];
    for (slot, e) in v.iter_mut().zip(EPSILONS) {
        let g = greens_function(problem, x, y, Complex64::new(lambda, e * scale))?;
        *slot = g.im / PI;
    }
    // Im g is smooth in ε: eliminate the linear and quadratic terms.
    let r1 = (10.0 * v[1] - v[0]) / 9.0;
    let r2 = (10.0 * v[2] - v[1]) / 9.0;
    let value = (100.0 * r2 - r1) / 99.0;
    let spread = (r2 - r1).abs();
    let size = v.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    if !value.is_finite() || spread > 1e-3 * size.max(value.abs()) {
        return Err(Error::ExtrapolationFailed { estimates: v.to_vec() });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::Extension;
    use crate::geometry::Manifold;

    #[test]
    fn eigenfunction_satisfies_robin_condition() {
        for &alpha in &[-0.7, 0.0, 0.4, PI / 2.0] {
            let psi = generalized_eigenfunction(alpha, 1.3);
            let r = alpha.cos() * psi.value(0.0) - alpha.sin() * psi.derivative(0.0);
            assert!(r.norm() < 1e-14);
        }
    }

    #[test]
    fn stone_formula_matches_closed_form() {
        let p = Problem::new(Manifold::HalfLine, Extension::robin(-0.3)).unwrap();
        for &(x, y, l) in &[(0.4, 1.1, 2.0), (0.7, 0.7, 5.0), (2.0, 0.1, 0.3)] {
            let (x, y) = (Point::on_first(x), Point::on_first(y));
            let s = continuum_density(&p, x, y, l).unwrap();
            let e = continuum_density_exact(&p, x, y, l).unwrap();
            assert!((s - e).abs() < 1e-8, "{s} vs {e}");
        }
    }
}
