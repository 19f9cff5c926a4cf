//! Initial data: finite sums of smooth bumps and eigenmodes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::Problem;
use crate::geometry::{Manifold, Piece, Point, SpatialSet};
use crate::spectral::{block_spectrum, Mode};

/// `amplitude * exp(1 - 1/(1 - u²))` with `u = (x - center)/halfwidth`,
/// zero for `|u| >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    #[serde(default)]
    pub component: usize,
    pub center: f64,
    pub halfwidth: f64,
    pub amplitude: f64,
}

/// A bump on the first component.
pub fn make_bump(center: f64, halfwidth: f64, amplitude: f64) -> Bump {
    Bump { component: 0, center, halfwidth, amplitude }
}

fn bump_shape(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

fn bump_slope(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - u * u;
        -2.0 * u / (q * q) * (1.0 - 1.0 / q).exp()
    }
}

impl Bump {
    pub fn on(component: usize, center: f64, halfwidth: f64, amplitude: f64) -> Self {
        Bump { component, center, halfwidth, amplitude }
    }

    /// Offset from the center, taken on the circle along the shorter arc.
    fn offset(&self, m: &Manifold, x: f64) -> f64 {
        let d = x - self.center;
        match *m {
            Manifold::Circle { circumference: l } => d - l * (d / l).round(),
            _ => d,
        }
    }

    pub fn value(&self, m: &Manifold, p: Point) -> f64 {
        if p.component != self.component {
            return 0.0;
        }
        self.amplitude * bump_shape(self.offset(m, p.x) / self.halfwidth)
    }

    pub fn derivative(&self, m: &Manifold, p: Point) -> f64 {
        if p.component != self.component {
            return 0.0;
        }
        self.amplitude * bump_slope(self.offset(m, p.x) / self.halfwidth) / self.halfwidth
    }

    pub fn support(&self) -> Piece {
        Piece::new(self.component, self.center - self.halfwidth, self.center + self.halfwidth)
    }

    pub fn validate(&self, m: &Manifold) -> Result<()> {
        if !(self.halfwidth > 0.0) || !self.center.is_finite() || !self.amplitude.is_finite() {
            return Err(Error::InvalidManifold(format!("bad bump {self:?}")));
        }
        let (lo, hi) = m.closure(self.component)?;
        let ok = match *m {
            Manifold::Circle { circumference } => 2.0 * self.halfwidth < circumference,
            _ => self.center - self.halfwidth > lo && self.center + self.halfwidth < hi,
        };
        if !ok {
            return Err(Error::NotInterior(format!(
                "bump [{}, {}] on component {}",
                self.center - self.halfwidth,
                self.center + self.halfwidth,
                self.component
            )));
        }
        Ok(())
    }
}

/// One term of an initial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    Bump(Bump),
    /// The `x`-derivative of a bump. With `φ̇₀ = -b'` and `φ₀ = b` the data
    /// moves to the right.
    Slope(Bump),
    /// `amplitude` times the `index`-th eigenmode (counted from zero with
    /// multiplicity, in increasing eigenvalue order) of one component.
    Mode {
        #[serde(default)]
        component: usize,
        index: usize,
        amplitude: f64,
    },
}

/// A finite sum of terms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile {
    pub terms: Vec<Term>,
}

impl Profile {
    pub fn zero() -> Self {
        Profile::default()
    }

    pub fn bump(b: Bump) -> Self {
        Profile { terms: vec![Term::Bump(b)] }
    }

    pub fn mode(index: usize, amplitude: f64) -> Self {
        Profile { terms: vec![Term::Mode { component: 0, index, amplitude }] }
    }

    pub fn plus(mut self, other: Profile) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// The profile times `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match *t {
                Term::Bump(b) => Term::Bump(Bump { amplitude: s * b.amplitude, ..b }),
                Term::Slope(b) => Term::Slope(Bump { amplitude: s * b.amplitude, ..b }),
                Term::Mode { component, index, amplitude } => Term::Mode { component, index, amplitude: s * amplitude },
            })
            .collect();
        Profile { terms }
    }

    /// The compactly supported terms.
    pub fn bumps(&self) -> impl Iterator<Item = &Bump> {
        self.terms.iter().filter_map(|t| match t {
            Term::Bump(b) | Term::Slope(b) => Some(b),
            Term::Mode { .. } => None,
        })
    }

    /// `b` plus `-b'` in the velocity: a pulse travelling right.
    pub fn right_moving(b: Bump) -> (Profile, Profile) {
        (Profile::bump(b), Profile { terms: vec![Term::Slope(Bump { amplitude: -b.amplitude, ..b })] })
    }

    pub fn has_modes(&self) -> bool {
        self.terms.iter().any(|t| matches!(t, Term::Mode { .. }))
    }

    /// Value of the bump terms; mode terms need a spectrum and are evaluated
    /// by the basis.
    pub fn bump_value(&self, m: &Manifold, p: Point) -> f64 {
        self.terms
            .iter()
            .map(|t| match t {
                Term::Bump(b) => b.value(m, p),
                Term::Slope(b) => b.derivative(m, p),
                Term::Mode { .. } => 0.0,
            })
            .sum()
    }
}

/// Cauchy data `(φ₀, φ̇₀)` with a declared support `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyData {
    pub phi0: Profile,
    pub phidot0: Profile,
    support: Option<SpatialSet>,
}

impl CauchyData {
    /// Data whose support is declared as the union of the bump supports.
    /// When mode terms are present no compact support is declared.
    pub fn new(m: &Manifold, phi0: Profile, phidot0: Profile) -> Result<Self> {
        for b in phi0.bumps().chain(phidot0.bumps()) {
            b.validate(m)?;
        }
        let support = if phi0.has_modes() || phidot0.has_modes() {
            None
        } else {
            Some(SpatialSet::new(m, phi0.bumps().chain(phidot0.bumps()).map(Bump::support))?)
        };
        Ok(CauchyData { phi0, phidot0, support })
    }

    pub fn zero() -> Self {
        CauchyData { phi0: Profile::zero(), phidot0: Profile::zero(), support: Some(SpatialSet::empty()) }
    }

    /// Declares a larger support `K`, which must contain the bumps and lie
    /// strictly inside the manifold.
    pub fn with_support(mut self, m: &Manifold, k: SpatialSet) -> Result<Self> {
        if !k.is_interior(m) {
            return Err(Error::NotInterior(format!("{:?}", k.pieces())));
        }
        if let Some(own) = &self.support {
            if !own.is_subset_of(&k) {
                return Err(Error::NotInterior(format!("data support {:?} not inside {:?}", own.pieces(), k.pieces())));
            }
        }
        self.support = Some(k);
        Ok(self)
    }

    /// The declared support, if the data is compactly supported.
    pub fn support(&self) -> Option<&SpatialSet> {
        self.support.as_ref()
    }

    /// `(φ₀, -φ̇₀)`.
    pub fn reversed(&self) -> Self {
        CauchyData { phi0: self.phi0.clone(), phidot0: self.phidot0.scaled(-1.0), support: self.support.clone() }
    }

    /// `(-φ̇₀, φ₀)`, the partner that makes the symplectic pairing a norm.
    pub fn rotated(&self) -> Self {
        CauchyData { phi0: self.phidot0.scaled(-1.0), phidot0: self.phi0.clone(), support: self.support.clone() }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, m: &Manifold, a: f64, other: &CauchyData, b: f64) -> Self {
        let support = match (&self.support, &other.support) {
            (Some(x), Some(y)) => {
                let mut pieces: Vec<Piece> = x.pieces().to_vec();
                pieces.extend_from_slice(y.pieces());
                Some(SpatialSet::new(m, pieces).expect("pieces of valid supports"))
            }
            _ => None,
        };
        CauchyData {
            phi0: self.phi0.scaled(a).plus(other.phi0.scaled(b)),
            phidot0: self.phidot0.scaled(a).plus(other.phidot0.scaled(b)),
            support,
        }
    }

    /// The part of the data living on one component.
    pub fn restrict(&self, m: &Manifold, component: usize) -> Self {
        let keep = |p: &Profile| Profile {
            terms: p
                .terms
                .iter()
                .filter(|t| match t {
                    Term::Bump(b) | Term::Slope(b) => b.component == component,
                    Term::Mode { component: c, .. } => *c == component,
                })
                .copied()
                .collect(),
        };
        let support = self.support.as_ref().map(|s| {
            SpatialSet::new(m, s.pieces().iter().filter(|p| p.component == component).copied())
                .expect("pieces of a valid support")
        });
        CauchyData { phi0: keep(&self.phi0), phidot0: keep(&self.phidot0), support }
    }

    /// Moves every term to component 0, for evolving one half-line of a
    /// disjoint union as a problem of its own.
    pub fn relabel_to_first(&self) -> Self {
        let shift = |p: &Profile| Profile {
            terms: p
                .terms
                .iter()
                .map(|t| match *t {
                    Term::Bump(b) => Term::Bump(Bump { component: 0, ..b }),
                    Term::Slope(b) => Term::Slope(Bump { component: 0, ..b }),
                    Term::Mode { index, amplitude, .. } => Term::Mode { component: 0, index, amplitude },
                })
                .collect(),
        };
        let support = self.support.as_ref().map(|s| {
            SpatialSet::new(&Manifold::HalfLine, s.pieces().iter().map(|p| Piece::new(0, p.lo, p.hi)))
                .expect("half-line pieces")
        });
        CauchyData { phi0: shift(&self.phi0), phidot0: shift(&self.phidot0), support }
    }
}

/// Values of `(φ₀, φ̇₀)` at points, with mode terms evaluated from the
/// eigenfunctions of the problem.
pub fn sample_data(problem: &Problem, data: &CauchyData, points: &[Point]) -> Result<Vec<(Complex64, Complex64)>> {
    let m = &problem.manifold;
    let mut modes: Vec<(usize, Vec<Mode>)> = Vec::new();
    for block in problem.blocks() {
        let comp = block.component;
        let need = [&data.phi0, &data.phidot0]
            .iter()
            .flat_map(|p| p.terms.iter())
            .filter_map(|t| match *t {
                Term::Mode { component, index, .. } if component == comp => Some(index + 1),
                _ => None,
            })
            .max();
        if let Some(n) = need {
            let found: Vec<Mode> = block_spectrum(&block, n)?.into_iter().flat_map(|p| p.modes).collect();
            if found.len() < n {
                return Err(Error::Unsupported(format!("mode index {} beyond the point spectrum", n - 1)));
            }
            modes.push((comp, found));
        }
    }
    let eval = |prof: &Profile, p: Point| -> Complex64 {
        let mut v = Complex64::new(prof.bump_value(m, p), 0.0);
        for t in &prof.terms {
            if let Term::Mode { component, index, amplitude } = *t {
                if component == p.component {
                    let list = &modes.iter().find(|(c, _)| *c == component).expect("modes collected").1;
                    v += amplitude * list[index].value(p.x);
                }
            }
        }
        v
    };
    Ok(points.iter().map(|&p| (eval(&data.phi0, p), eval(&data.phidot0, p))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quad::Rule;

    #[test]
    fn bump_values() {
        let m = Manifold::Interval { length: 1.0 };
        let b = make_bump(0.5, 0.2, 3.0);
        assert_eq!(b.value(&m, Point::on_first(0.5)), 3.0);
        assert_eq!(b.value(&m, Point::on_first(0.3)), 0.0);
        assert_eq!(b.value(&m, Point::on_first(0.7)), 0.0);
    }

    #[test]
    fn bump_integral_constant() {
        // Reference value from a 30-digit adaptive quadrature.
        let rule = Rule::composite(-1.0, 1.0, 1.0 / 64.0, 32);
        let integral = rule.integrate(bump_shape);
        assert!((integral - 1.2069003224378762).abs() < 1e-12, "{integral:.15}");
        let m = Manifold::Interval { length: 3.0 };
        let b = make_bump(1.0, 0.4, 2.0);
        let r = Rule::composite(0.6, 1.4, 0.01, 32);
        let direct = r.integrate(|x| b.value(&m, Point::on_first(x)));
        assert!((direct - 1.2069003224378762 * 0.4 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn bump_slope_matches_differences() {
        let m = Manifold::HalfLine;
        let b = make_bump(2.0, 0.5, 1.5);
        for &x in &[1.6, 1.9, 2.3] {
            let h = 1e-6;
            let fd = (b.value(&m, Point::on_first(x + h)) - b.value(&m, Point::on_first(x - h))) / (2.0 * h);
            assert!((fd - b.derivative(&m, Point::on_first(x))).abs() < 1e-7);
        }
    }

    #[test]
    fn bumps_must_be_interior() {
        let m = Manifold::Interval { length: 1.0 };
        assert!(make_bump(0.1, 0.1, 1.0).validate(&m).is_err());
        assert!(make_bump(0.5, 0.49, 1.0).validate(&m).is_ok());
        let c = Manifold::Circle { circumference: 1.0 };
        assert!(make_bump(0.05, 0.2, 1.0).validate(&c).is_ok());
    }

    #[test]
    fn circle_bumps_wrap() {
        let c = Manifold::Circle { circumference: 1.0 };
        let b = make_bump(0.05, 0.1, 1.0);
        let v1 = b.value(&c, Point::on_first(0.98));
        let v2 = b.value(&c, Point::on_first(-0.02));
        assert!(v1 > 0.0 && (v1 - v2).abs() < 1e-12);
    }
}
