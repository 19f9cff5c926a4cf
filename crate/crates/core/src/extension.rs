//! Self-adjoint extensions of `-d²/dx²` on the catalog manifolds, as values:
//! boundary conditions, validation against a manifold, canonical forms,
//! mass shifts and finite direct sums.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Manifold;

/// An extension of minus the Laplacian, i.e. a choice of boundary
/// conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Extension {
    /// The unique extension on the circle.
    CircleClosure,
    /// `cos α φ(0) = sin α φ'(0)` on the half-line, `α ∈ (-π/2, π/2]`.
    HalfLineRobin { alpha: f64 },
    /// `φ(0) = φ(a) = 0`.
    IntervalDirichlet,
    /// `(φ'(0), -φ'(a)) = θ (φ(0), φ(a))` for the Hermitian matrix
    /// `θ = [[θ11, θ12], [conj θ12, θ22]]`. All zeros is Neumann.
    IntervalFirstKind {
        theta11: f64,
        theta22: f64,
        #[serde(with = "complex_serde")]
        theta12: Complex64,
    },
    /// `(φ(0), φ(a))` parallel to `w = (w1, w2)`, and
    /// `conj w1 (θ φ(0) - φ'(0)) + conj w2 (θ φ(a) + φ'(a)) = 0`.
    IntervalSecondKind {
        #[serde(with = "complex_serde")]
        w1: Complex64,
        #[serde(with = "complex_serde")]
        w2: Complex64,
        theta: f64,
    },
    /// `A + μ`, shifting the spectrum up by the squared mass `μ`.
    MassShift { inner: Box<Extension>, mu: f64 },
    /// Orthogonal sum over the components of a disjoint union, one summand
    /// per component in order.
    DirectSum { components: Vec<Extension> },
}

impl Extension {
    pub fn robin(alpha: f64) -> Self {
        Extension::HalfLineRobin { alpha }
    }

    pub fn neumann() -> Self {
        Extension::first_kind(0.0, 0.0, Complex64::new(0.0, 0.0))
    }

    pub fn first_kind(theta11: f64, theta22: f64, theta12: Complex64) -> Self {
        Extension::IntervalFirstKind { theta11, theta22, theta12 }
    }

    pub fn second_kind(w1: Complex64, w2: Complex64, theta: f64) -> Self {
        Extension::IntervalSecondKind { w1, w2, theta }
    }

    pub fn mass_shift(self, mu: f64) -> Self {
        Extension::MassShift { inner: Box::new(self), mu }
    }

    pub fn name(&self) -> String {
        match self {
            Extension::CircleClosure => "circle_closure".into(),
            Extension::HalfLineRobin { .. } => "half_line_robin".into(),
            Extension::IntervalDirichlet => "interval_dirichlet".into(),
            Extension::IntervalFirstKind { .. } => "interval_first_kind".into(),
            Extension::IntervalSecondKind { .. } => "interval_second_kind".into(),
            Extension::MassShift { inner, .. } => format!("mass_shift({})", inner.name()),
            Extension::DirectSum { components } => format!("direct_sum[{}]", components.len()),
        }
    }

    /// Checks parameter ranges and compatibility with the manifold.
    pub fn validate(&self, m: &Manifold) -> Result<()> {
        let incompatible = || Error::Incompatible { extension: self.name(), manifold: m.name() };
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidExtension(format!("{what} must be finite, got {v}")))
            }
        };
        match self {
            Extension::CircleClosure => {
                if !m.is_circle() {
                    return Err(incompatible());
                }
            }
            Extension::HalfLineRobin { alpha } => {
                if *m != Manifold::HalfLine {
                    return Err(incompatible());
                }
                if !(*alpha > -FRAC_PI_2 && *alpha <= FRAC_PI_2) {
                    return Err(Error::InvalidExtension(format!(
                        "alpha must lie in (-pi/2, pi/2], got {alpha}"
                    )));
                }
            }
            Extension::IntervalDirichlet => {
                if !matches!(m, Manifold::Interval { .. }) {
                    return Err(incompatible());
                }
            }
            Extension::IntervalFirstKind { theta11, theta22, theta12 } => {
                if !matches!(m, Manifold::Interval { .. }) {
                    return Err(incompatible());
                }
                finite(*theta11, "theta11")?;
                finite(*theta22, "theta22")?;
                finite(theta12.re, "theta12.re")?;
                finite(theta12.im, "theta12.im")?;
            }
            Extension::IntervalSecondKind { w1, w2, theta } => {
                if !matches!(m, Manifold::Interval { .. }) {
                    return Err(incompatible());
                }
                finite(*theta, "theta")?;
                let norm = (w1.norm_sqr() + w2.norm_sqr()).sqrt();
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(Error::InvalidExtension("(w1, w2) must be a nonzero vector".into()));
                }
            }
            Extension::MassShift { inner, mu } => {
                if !(*mu >= 0.0 && mu.is_finite()) {
                    return Err(Error::InvalidExtension(format!("mu must be >= 0, got {mu}")));
                }
                inner.validate(m)?;
            }
            Extension::DirectSum { components } => {
                let Manifold::DisjointHalfLines { count } = *m else {
                    return Err(incompatible());
                };
                if components.len() != count {
                    return Err(Error::InvalidExtension(format!(
                        "direct sum has {} summands for {count} components",
                        components.len()
                    )));
                }
                for c in components {
                    c.validate(&Manifold::HalfLine)?;
                }
            }
        }
        Ok(())
    }
}

/// Serialize complex numbers as `{ re, im }` tables.
pub mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        #[serde(default)]
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Parts { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let p = Parts::deserialize(d)?;
        Ok(Complex64::new(p.re, p.im))
    }
}

/// A manifold together with an extension that has been checked against it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub manifold: Manifold,
    pub extension: Extension,
}

impl Problem {
    pub fn new(manifold: Manifold, extension: Extension) -> Result<Self> {
        manifold.validate()?;
        extension.validate(&manifold)?;
        Ok(Problem { manifold, extension })
    }

    /// The problem split into independent one-component blocks.
    pub fn blocks(&self) -> Vec<Block> {
        let mut out = Vec::new();
        collect_blocks(&self.manifold, &self.extension, 0, 0.0, &mut out);
        out
    }

    pub fn block(&self, component: usize) -> Result<Block> {
        self.blocks()
            .into_iter()
            .find(|b| b.component == component)
            .ok_or(Error::NoSuchComponent { component, count: self.manifold.component_count() })
    }
}

fn collect_blocks(m: &Manifold, e: &Extension, component: usize, mu: f64, out: &mut Vec<Block>) {
    let base = match (e, *m) {
        (Extension::CircleClosure, Manifold::Circle { circumference }) => {
            Base::Circle { circumference }
        }
        (Extension::HalfLineRobin { alpha }, _) => Base::Robin { alpha: *alpha },
        (Extension::IntervalDirichlet, Manifold::Interval { length }) => Base::Dirichlet { length },
        (Extension::IntervalFirstKind { theta11, theta22, theta12 }, Manifold::Interval { length }) => {
            Base::FirstKind { length, theta11: *theta11, theta22: *theta22, theta12: *theta12 }
        }
        (Extension::IntervalSecondKind { w1, w2, theta }, Manifold::Interval { length }) => {
            let (w1, w2) = canonical_direction(*w1, *w2);
            Base::SecondKind { length, w1, w2, theta: *theta }
        }
        (Extension::MassShift { inner, mu: extra }, _) => {
            return collect_blocks(m, inner, component, mu + extra, out);
        }
        (Extension::DirectSum { components }, _) => {
            for (i, c) in components.iter().enumerate() {
                collect_blocks(&Manifold::HalfLine, c, i, mu, out);
            }
            return;
        }
        _ => unreachable!("validated extension does not match manifold"),
    };
    out.push(Block { component, base, mu });
}

/// One indecomposable summand: a base extension on one component plus a
/// nonnegative spectral shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub component: usize,
    pub base: Base,
    pub mu: f64,
}

/// The base extensions with their geometry folded in. Second-kind vectors
/// are canonical (unit norm, fixed phase).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Base {
    Circle { circumference: f64 },
    Robin { alpha: f64 },
    Dirichlet { length: f64 },
    FirstKind { length: f64, theta11: f64, theta22: f64, theta12: Complex64 },
    SecondKind { length: f64, w1: Complex64, w2: Complex64, theta: f64 },
}

impl Base {
    pub fn length(&self) -> Option<f64> {
        match *self {
            Base::Dirichlet { length }
            | Base::FirstKind { length, .. }
            | Base::SecondKind { length, .. } => Some(length),
            _ => None,
        }
    }

    /// Residual of the boundary conditions on a trace.
    pub fn residual(&self, tr: &BoundaryTrace) -> Vec<Complex64> {
        let right = || tr.right.unwrap_or_default();
        match *self {
            Base::Circle { .. } => Vec::new(),
            Base::Robin { alpha } => vec![alpha.cos() * tr.left.value - alpha.sin() * tr.left.inward],
            Base::Dirichlet { .. } => vec![tr.left.value, right().value],
            Base::FirstKind { theta11, theta22, theta12, .. } => {
                let (l, r) = (tr.left, right());
                // φ'(a) = -inward derivative at a.
                vec![
                    theta11 * l.value - l.inward + theta12 * r.value,
                    theta12.conj() * l.value + theta22 * r.value - r.inward,
                ]
            }
            Base::SecondKind { w1, w2, theta, .. } => {
                let (l, r) = (tr.left, right());
                vec![
                    w2 * l.value - w1 * r.value,
                    w1.conj() * (theta * l.value - l.inward) + w2.conj() * (theta * r.value - r.inward),
                ]
            }
        }
    }
}

/// Value and inward normal derivative at one boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EndTrace {
    pub value: Complex64,
    pub inward: Complex64,
}

/// Boundary data of a function: `φ(0), φ'(0)` and, on an interval,
/// `φ(a), -φ'(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryTrace {
    pub left: EndTrace,
    pub right: Option<EndTrace>,
}

impl BoundaryTrace {
    pub fn half_line(value: Complex64, derivative: Complex64) -> Self {
        BoundaryTrace { left: EndTrace { value, inward: derivative }, right: None }
    }

    /// From `φ(0), φ(a), φ'(0), φ'(a)` (ordinary derivatives).
    pub fn interval(phi0: Complex64, phia: Complex64, dphi0: Complex64, dphia: Complex64) -> Self {
        BoundaryTrace {
            left: EndTrace { value: phi0, inward: dphi0 },
            right: Some(EndTrace { value: phia, inward: -dphia }),
        }
    }
}

/// Residual of the extension's boundary conditions; empty on the circle.
/// Zero exactly when the trace satisfies them.
pub fn boundary_residual(problem: &Problem, trace: &BoundaryTrace) -> Result<Vec<Complex64>> {
    let blocks = problem.blocks();
    if blocks.len() != 1 {
        return Err(Error::Unsupported(
            "a direct sum has one trace per component; use boundary_residual_of".into(),
        ));
    }
    Ok(blocks[0].base.residual(trace))
}

/// Residual for one component of a possibly decomposed problem.
pub fn boundary_residual_of(problem: &Problem, component: usize, trace: &BoundaryTrace) -> Result<Vec<Complex64>> {
    Ok(problem.block(component)?.base.residual(trace))
}

fn canonical_direction(w1: Complex64, w2: Complex64) -> (Complex64, Complex64) {
    let norm = (w1.norm_sqr() + w2.norm_sqr()).sqrt();
    let (w1, w2) = (w1 / norm, w2 / norm);
    if w1.norm() > 0.0 {
        let phase = w1.conj() / w1.norm();
        (Complex64::new(w1.norm(), 0.0), w2 * phase)
    } else {
        (Complex64::new(0.0, 0.0), Complex64::new(w2.norm(), 0.0))
    }
}

/// Canonical representative: unit `(w1, w2)` with the first nonzero entry
/// real positive, nested mass shifts merged, zero shifts dropped.
pub fn canonicalize(e: &Extension) -> Result<Extension> {
    Ok(match e {
        Extension::IntervalSecondKind { w1, w2, theta } => {
            if w1.norm_sqr() + w2.norm_sqr() == 0.0 {
                return Err(Error::InvalidExtension("(w1, w2) must be a nonzero vector".into()));
            }
            let (w1, w2) = canonical_direction(*w1, *w2);
            Extension::IntervalSecondKind { w1, w2, theta: *theta }
        }
        Extension::MassShift { inner, mu } => {
            let inner = canonicalize(inner)?;
            let (inner, mu) = match inner {
                Extension::MassShift { inner, mu: m2 } => (*inner, mu + m2),
                other => (other, *mu),
            };
            if mu == 0.0 {
                inner
            } else {
                Extension::MassShift { inner: Box::new(inner), mu }
            }
        }
        Extension::DirectSum { components } => Extension::DirectSum {
            components: components.iter().map(canonicalize).collect::<Result<_>>()?,
        },
        other => other.clone(),
    })
}

/// How an additive mass term acts on spectral data: eigenvalues move up by
/// `mu`, kernels are evaluated at `lambda - mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralShift {
    pub mu: f64,
}

impl SpectralShift {
    pub fn eigenvalue(&self, base: f64) -> f64 {
        base + self.mu
    }

    pub fn kernel_argument(&self, lambda: Complex64) -> Complex64 {
        lambda - self.mu
    }

    pub fn is_identity(&self) -> bool {
        self.mu == 0.0
    }
}

/// The shift describing `e + mu`, including any shift already inside `e`.
pub fn mass_shift_spectrum(e: &Extension, mu: f64) -> Result<SpectralShift> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidExtension(format!("mu must be >= 0, got {mu}")));
    }
    let inner = match canonicalize(e)? {
        Extension::MassShift { mu, .. } => mu,
        _ => 0.0,
    };
    Ok(SpectralShift { mu: inner + mu })
}
