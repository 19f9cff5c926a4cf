//! Closed-form eigenfunctions and their construction from boundary
//! conditions.
//!
//! At an eigenvalue the two-dimensional solution space of `-u'' = λu` is
//! spanned by a well-conditioned basis (cosine/sine for `λ > 0`, the two
//! decaying exponentials from either end for `λ < 0`, `1, x` at zero).
//! The boundary conditions applied to the basis give a 2x2 matrix whose null
//! space holds the eigenfunctions; normalization uses the exact Gram matrix
//! of the basis.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{Base, Block, BoundaryTrace};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Cos,
    Sin,
}

/// A closed-form solution of `-u'' = λu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum ModeShape {
    /// `a cos kx + b sin kx`.
    Trig { a: Complex64, b: Complex64, k: f64 },
    /// `left e^{-κx} + right e^{-κ(length - x)}`.
    Hyperbolic { left: Complex64, right: Complex64, kappa: f64, length: f64 },
    /// `a + b x`.
    Linear { a: Complex64, b: Complex64 },
    /// `c e^{-κx}`.
    ExponentialDecay { c: f64, kappa: f64 },
    /// Real Fourier mode on a circle, normalized.
    Fourier { n: u32, parity: Parity, circumference: f64 },
}

impl ModeShape {
    pub fn tag(&self) -> &'static str {
        match self {
            ModeShape::Trig { .. } => "trig",
            ModeShape::Hyperbolic { .. } => "hyperbolic",
            ModeShape::Linear { .. } => "linear",
            ModeShape::ExponentialDecay { .. } => "exponential_decay",
            ModeShape::Fourier { parity: Parity::Cos, .. } => "fourier_cos",
            ModeShape::Fourier { parity: Parity::Sin, .. } => "fourier_sin",
        }
    }

    /// The coefficient pair and rate written to tables:
    /// `(A, B, k or κ)`.
    pub fn coefficients(&self) -> (Complex64, Complex64, f64) {
        match *self {
            ModeShape::Trig { a, b, k } => (a, b, k),
            ModeShape::Hyperbolic { left, right, kappa, .. } => (left, right, kappa),
            ModeShape::Linear { a, b } => (a, b, 0.0),
            ModeShape::ExponentialDecay { c, kappa } => (Complex64::new(c, 0.0), ZERO, kappa),
            ModeShape::Fourier { n, circumference, .. } => {
                let amp = fourier_amplitude(n, circumference);
                (Complex64::new(amp, 0.0), ZERO, 2.0 * PI * n as f64 / circumference)
            }
        }
    }

    pub fn value(&self, x: f64) -> Complex64 {
        match *self {
            ModeShape::Trig { a, b, k } => {
                let (s, c) = (k * x).sin_cos();
                a * c + b * s
            }
            ModeShape::Hyperbolic { left, right, kappa, length } => {
                left * (-kappa * x).exp() + right * (-kappa * (length - x)).exp()
            }
            ModeShape::Linear { a, b } => a + b * x,
            ModeShape::ExponentialDecay { c, kappa } => Complex64::new(c * (-kappa * x).exp(), 0.0),
            ModeShape::Fourier { n, parity, circumference } => {
                let amp = fourier_amplitude(n, circumference);
                let arg = 2.0 * PI * n as f64 * x / circumference;
                Complex64::new(
                    amp * match parity {
                        Parity::Cos => arg.cos(),
                        Parity::Sin => arg.sin(),
                    },
                    0.0,
                )
            }
        }
    }

    pub fn derivative(&self, x: f64) -> Complex64 {
        match *self {
            ModeShape::Trig { a, b, k } => {
                let (s, c) = (k * x).sin_cos();
                (b * c - a * s) * k
            }
            ModeShape::Hyperbolic { left, right, kappa, length } => {
                (right * (-kappa * (length - x)).exp() - left * (-kappa * x).exp()) * kappa
            }
            ModeShape::Linear { b, .. } => b,
            ModeShape::ExponentialDecay { c, kappa } => Complex64::new(-kappa * c * (-kappa * x).exp(), 0.0),
            ModeShape::Fourier { n, parity, circumference } => {
                let amp = fourier_amplitude(n, circumference);
                let k = 2.0 * PI * n as f64 / circumference;
                let arg = k * x;
                Complex64::new(
                    amp * k * match parity {
                        Parity::Cos => -arg.sin(),
                        Parity::Sin => arg.cos(),
                    },
                    0.0,
                )
            }
        }
    }
}

fn fourier_amplitude(n: u32, circumference: f64) -> f64 {
    if n == 0 {
        (1.0 / circumference).sqrt()
    } else {
        (2.0 / circumference).sqrt()
    }
}

/// A normalized eigenfunction on one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub component: usize,
    pub lambda: f64,
    pub shape: ModeShape,
}

impl Mode {
    pub fn value(&self, x: f64) -> Complex64 {
        self.shape.value(x)
    }

    pub fn derivative(&self, x: f64) -> Complex64 {
        self.shape.derivative(x)
    }

    /// Boundary trace at `0` and, when `length` is given, at `length`.
    pub fn trace(&self, length: Option<f64>) -> BoundaryTrace {
        trace_of(&self.shape, length)
    }
}

fn trace_of(shape: &ModeShape, length: Option<f64>) -> BoundaryTrace {
    match length {
        Some(a) => BoundaryTrace::interval(shape.value(0.0), shape.value(a), shape.derivative(0.0), shape.derivative(a)),
        None => BoundaryTrace::half_line(shape.value(0.0), shape.derivative(0.0)),
    }
}

/// Basis of solutions of `-u'' = λu` on `(0, a)` with its Gram matrix.
struct SolutionBasis {
    shapes: [ModeShape; 2],
    gram: [[f64; 2]; 2],
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn solution_basis(lambda: f64, a: f64) -> SolutionBasis {
    if lambda > 0.0 {
        let k = lambda.sqrt();
        let s2 = (2.0 * k * a).sin() / (4.0 * k);
        let cross = (k * a).sin().powi(2) / (2.0 * k);
        SolutionBasis {
            shapes: [
                ModeShape::Trig { a: c(1.0), b: ZERO, k },
                ModeShape::Trig { a: ZERO, b: c(1.0), k },
            ],
            gram: [[0.5 * a + s2, cross], [cross, 0.5 * a - s2]],
        }
    } else if lambda < 0.0 {
        let kappa = (-lambda).sqrt();
        let diag = -(-2.0 * kappa * a).exp_m1() / (2.0 * kappa);
        let cross = a * (-kappa * a).exp();
        SolutionBasis {
            shapes: [
                ModeShape::Hyperbolic { left: c(1.0), right: ZERO, kappa, length: a },
                ModeShape::Hyperbolic { left: ZERO, right: c(1.0), kappa, length: a },
            ],
            gram: [[diag, cross], [cross, diag]],
        }
    } else {
        SolutionBasis {
            shapes: [ModeShape::Linear { a: c(1.0), b: ZERO }, ModeShape::Linear { a: ZERO, b: c(1.0) }],
            gram: [[a, 0.5 * a * a], [0.5 * a * a, a * a * a / 3.0]],
        }
    }
}

fn combine(basis: &SolutionBasis, v: [Complex64; 2]) -> ModeShape {
    match basis.shapes[0] {
        ModeShape::Trig { k, .. } => ModeShape::Trig { a: v[0], b: v[1], k },
        ModeShape::Hyperbolic { kappa, length, .. } => {
            ModeShape::Hyperbolic { left: v[0], right: v[1], kappa, length }
        }
        ModeShape::Linear { .. } => ModeShape::Linear { a: v[0], b: v[1] },
        _ => unreachable!(),
    }
}

fn gram_inner(g: &[[f64; 2]; 2], u: [Complex64; 2], v: [Complex64; 2]) -> Complex64 {
    // <u, v> = ∫ u conj(v)
    let mut s = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            s += u[i] * v[j].conj() * g[i][j];
        }
    }
    s
}

fn normalize(g: &[[f64; 2]; 2], v: [Complex64; 2]) -> [Complex64; 2] {
    let n = gram_inner(g, v, v).re.sqrt();
    let mut w = [v[0] / n, v[1] / n];
    // Fix the phase so the largest coefficient is real positive.
    let lead = if w[0].norm() >= w[1].norm() { w[0] } else { w[1] };
    let phase = lead.conj() / lead.norm();
    w[0] *= phase;
    w[1] *= phase;
    w
}

/// Relative tolerance for a boundary residual row to count as zero.
const NULL_TOL: f64 = 1e-8;

/// Orthonormal eigenfunctions of a block at the (unshifted) eigenvalue
/// `x`. Errors when the boundary conditions admit no nonzero solution.
pub(crate) fn block_modes(block: &Block, x: f64) -> Result<Vec<Mode>> {
    let lambda = x + block.mu;
    let mode = |shape| Mode { component: block.component, lambda, shape };
    match block.base {
        Base::Circle { circumference } => {
            let n = (x.max(0.0).sqrt() * circumference / (2.0 * PI)).round();
            let exact = (2.0 * PI * n / circumference).powi(2);
            if (x - exact).abs() > 1e-10 * exact.max(1.0) {
                return Err(Error::NotAnEigenvalue { lambda, residual: (x - exact).abs() });
            }
            let n = n as u32;
            let cos = mode(ModeShape::Fourier { n, parity: Parity::Cos, circumference });
            if n == 0 {
                return Ok(vec![cos]);
            }
            Ok(vec![cos, mode(ModeShape::Fourier { n, parity: Parity::Sin, circumference })])
        }
        Base::Robin { alpha } => {
            let kappa = -1.0 / alpha.tan();
            let bound = alpha < 0.0 && x < 0.0;
            let residual = if bound { ((-x).sqrt() - kappa).abs() } else { f64::INFINITY };
            if !bound || residual > 1e-10 * kappa.max(1.0) {
                return Err(Error::NotAnEigenvalue { lambda, residual });
            }
            let kappa = (-x).sqrt();
            Ok(vec![mode(ModeShape::ExponentialDecay { c: (2.0 * kappa).sqrt(), kappa })])
        }
        _ => {
            let a = block.base.length().expect("interval base");
            let basis = solution_basis(x, a);
            let rows: Vec<[Complex64; 2]> = {
                let r0 = block.base.residual(&trace_of(&basis.shapes[0], Some(a)));
                let r1 = block.base.residual(&trace_of(&basis.shapes[1], Some(a)));
                (0..r0.len()).map(|i| [r0[i], r1[i]]).collect()
            };
            let row_norm = |r: &[Complex64; 2]| (r[0].norm_sqr() + r[1].norm_sqr()).sqrt();
            let scale = 1.0 + x.abs().sqrt() + boundary_scale(&block.base);
            let (big, small) = if row_norm(&rows[0]) >= row_norm(&rows[1]) {
                (rows[0], rows[1])
            } else {
                (rows[1], rows[0])
            };
            let g = &basis.gram;
            if row_norm(&big) <= NULL_TOL * scale {
                let e1 = normalize(g, [c(1.0), ZERO]);
                let p = gram_inner(g, [ZERO, c(1.0)], e1);
                let e2 = normalize(g, [-p * e1[0], c(1.0) - p * e1[1]]);
                return Ok(vec![mode(combine(&basis, e1)), mode(combine(&basis, e2))]);
            }
            let v = [-big[1], big[0]];
            let residual = (small[0] * v[0] + small[1] * v[1]).norm() / (row_norm(&v) * scale);
            if residual > NULL_TOL {
                return Err(Error::NotAnEigenvalue { lambda, residual });
            }
            Ok(vec![mode(combine(&basis, normalize(g, v)))])
        }
    }
}

fn boundary_scale(base: &Base) -> f64 {
    match *base {
        Base::FirstKind { theta11, theta22, theta12, .. } => theta11.abs() + theta22.abs() + theta12.norm(),
        Base::SecondKind { theta, .. } => theta.abs(),
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quad::Rule;

    fn l2_norm(shape: &ModeShape, a: f64) -> f64 {
        Rule::composite(0.0, a, a / 64.0, 32).integrate(|x| shape.value(x).norm_sqr())
    }

    #[test]
    fn gram_matrices_match_quadrature() {
        let a = 1.7;
        for &lam in &[-9.0, -0.01, 0.0, 0.3, 40.0] {
            let b = solution_basis(lam, a);
            for i in 0..2 {
                for j in 0..2 {
                    let q = Rule::composite(0.0, a, a / 64.0, 32)
                        .integrate(|x| (b.shapes[i].value(x) * b.shapes[j].value(x).conj()).re);
                    assert!((q - b.gram[i][j]).abs() < 1e-13, "{lam} {i}{j}: {q} vs {}", b.gram[i][j]);
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let shapes = [
            ModeShape::Trig { a: c(0.3), b: Complex64::new(0.1, 0.4), k: 2.5 },
            ModeShape::Hyperbolic { left: c(1.0), right: Complex64::new(0.0, -2.0), kappa: 1.5, length: 1.0 },
            ModeShape::Linear { a: c(2.0), b: c(-1.0) },
            ModeShape::ExponentialDecay { c: 1.2, kappa: 0.7 },
            ModeShape::Fourier { n: 3, parity: Parity::Sin, circumference: 2.0 },
        ];
        let h = 1e-5;
        for s in &shapes {
            let fd = (s.value(0.4 + h) - s.value(0.4 - h)) / (2.0 * h);
            assert!((fd - s.derivative(0.4)).norm() < 1e-7, "{s:?}");
        }
    }

    #[test]
    fn dirichlet_mode_is_normalized_sine() {
        let block = Block { component: 0, base: Base::Dirichlet { length: PI }, mu: 0.0 };
        let m = block_modes(&block, 4.0).unwrap();
        assert_eq!(m.len(), 1);
        let expect = (2.0 / PI).sqrt();
        for &x in &[0.3, 1.1, 2.9] {
            assert!((m[0].value(x) - expect * (2.0 * x).sin()).norm() < 1e-14);
        }
    }

    #[test]
    fn non_eigenvalue_is_rejected() {
        let block = Block { component: 0, base: Base::Dirichlet { length: PI }, mu: 0.0 };
        assert!(matches!(block_modes(&block, 4.5), Err(Error::NotAnEigenvalue { .. })));
    }

    #[test]
    fn periodic_pair_is_orthonormal() {
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let block = Block { component: 0, base: Base::SecondKind { length: 2.0, w1: w, w2: w, theta: 0.0 }, mu: 0.0 };
        let k = PI;
        let m = block_modes(&block, k * k).unwrap();
        assert_eq!(m.len(), 2);
        let rule = Rule::composite(0.0, 2.0, 1.0 / 32.0, 32);
        let ip = |u: &Mode, v: &Mode| {
            let re = rule.integrate(|x| (u.value(x) * v.value(x).conj()).re);
            let im = rule.integrate(|x| (u.value(x) * v.value(x).conj()).im);
            Complex64::new(re, im)
        };
        assert!((ip(&m[0], &m[0]) - 1.0).norm() < 1e-13);
        assert!((ip(&m[1], &m[1]) - 1.0).norm() < 1e-13);
        assert!(ip(&m[0], &m[1]).norm() < 1e-13);
    }

    #[test]
    fn negative_mode_satisfies_boundary_conditions() {
        // θ11 = θ22 = -2 has two negative eigenvalues; find one from the
        // characteristic function by bisection and check the mode.
        let base = Base::FirstKind { length: 1.0, theta11: -2.0, theta22: -2.0, theta12: ZERO };
        let f = |k: f64| crate::spectral::condition::characteristic(&base, -k * k).unwrap();
        let k = crate::numeric::roots::bisect(f, 1.0, 3.0, f(1.0));
        let block = Block { component: 0, base, mu: 0.0 };
        let m = block_modes(&block, -k * k).unwrap();
        assert_eq!(m.len(), 1);
        let r = base.residual(&m[0].trace(Some(1.0)));
        assert!(r.iter().all(|z| z.norm() < 1e-10));
        assert!((l2_norm(&m[0].shape, 1.0) - 1.0).abs() < 1e-12);
    }
}
