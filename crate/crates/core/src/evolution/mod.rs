//! The propagator `φ_t = C(t, A)φ₀ + S(t, A)φ̇₀` as a sum over the atoms of
//! a [`Basis`], with `φ̇_t = -A S(t, A)φ₀ + C(t, A)φ̇₀` from its own formula.

pub mod basis;
pub mod data;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::extension::Problem;
use crate::geometry::Point;
use crate::numeric::{c_scalar, s_scalar};

pub use basis::{Atom, Basis, BasisOptions, BlockReport, CoefficientState, ModeCoefficients};
pub use data::{make_bump, sample_data, Bump, CauchyData, Profile, Term};

/// Samples of `φ_t` and `φ̇_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub t: f64,
    pub points: Vec<Point>,
    pub phi: Vec<Complex64>,
    pub phidot: Vec<Complex64>,
}

/// `(C(t, λ), S(t, λ), -λ S(t, λ))` for one atom.
fn propagator(t: f64, lambda: f64) -> Result<(f64, f64, f64)> {
    let c = c_scalar(t, lambda)?;
    let s = s_scalar(t, lambda)?;
    Ok((c, s, -lambda * s))
}

/// Evolves coefficients from time `s.t` by `dt`.
pub fn advance(basis: &Basis, s: &CoefficientState, dt: f64) -> Result<CoefficientState> {
    basis.check(s)?;
    let mut c = Vec::with_capacity(s.c.len());
    let mut d = Vec::with_capacity(s.d.len());
    for (j, atom) in basis.atoms().iter().enumerate() {
        let (cc, ss, ls) = propagator(dt, atom.lambda())?;
        c.push(s.c[j] * cc + s.d[j] * ss);
        d.push(s.c[j] * ls + s.d[j] * cc);
    }
    Ok(CoefficientState { t: s.t + dt, c, d, basis_id: s.basis_id })
}

/// A solution of the field equation as a function of time, `G(s) = F(σs + τ)`
/// for the solution `F` with the given data and `σ = ±1`.
#[derive(Debug, Clone)]
pub struct Solution {
    basis: Arc<Basis>,
    initial: CoefficientState,
    sign: f64,
    shift: f64,
}

impl Solution {
    pub fn new(basis: Arc<Basis>, data: &CauchyData) -> Result<Self> {
        let initial = basis.project(data)?.state;
        Ok(Solution { basis, initial, sign: 1.0, shift: 0.0 })
    }

    pub fn from_state(basis: Arc<Basis>, initial: CoefficientState) -> Result<Self> {
        basis.check(&initial)?;
        let shift = initial.t;
        Ok(Solution { basis, initial: CoefficientState { t: 0.0, ..initial }, sign: 1.0, shift })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    /// Coefficients of `(G(s), G'(s))`.
    pub fn state(&self, s: f64) -> Result<CoefficientState> {
        let u = self.sign * s + self.shift;
        let mut st = advance(&self.basis, &self.initial, u)?;
        if self.sign < 0.0 {
            st.d.iter_mut().for_each(|d| *d = -*d);
        }
        st.t = s;
        Ok(st)
    }

    pub fn field(&self, s: f64, points: &[Point]) -> Result<FieldState> {
        let st = self.state(s)?;
        let values = self.basis.evaluate_many(&st, points)?;
        Ok(FieldState {
            t: s,
            points: points.to_vec(),
            phi: values.iter().map(|v| v.0).collect(),
            phidot: values.iter().map(|v| v.1).collect(),
        })
    }

    /// `(T_t G)(s) = G(s - t)`.
    pub fn translate(&self, t: f64) -> Solution {
        Solution { shift: self.shift - self.sign * t, ..self.clone() }
    }

    /// `(P G)(s) = G(-s)`.
    pub fn reflect(&self) -> Solution {
        Solution { sign: -self.sign, ..self.clone() }
    }
}

/// Builds a basis for `data` resolved up to `|t|` and evaluates `φ_t` at the
/// points.
pub fn evolve(problem: &Problem, data: &CauchyData, t: f64, points: &[Point]) -> Result<FieldState> {
    let basis = Arc::new(Basis::for_data(problem, &[data], BasisOptions::with_horizon(t))?);
    Solution::new(basis, data)?.field(t, points)
}

/// Coefficients of `data` in a basis built for it.
pub fn mode_coefficients(problem: &Problem, data: &CauchyData) -> Result<(Arc<Basis>, ModeCoefficients)> {
    let basis = Arc::new(Basis::for_data(problem, &[data], BasisOptions::default())?);
    let mc = basis.project(data)?;
    Ok((basis, mc))
}

/// `‖a - b‖` over `(φ, φ̇)` in the norm of the represented functions.
fn state_distance(basis: &Basis, a: &CoefficientState, b: &CoefficientState) -> f64 {
    let mut s = 0.0;
    for (j, atom) in basis.atoms().iter().enumerate() {
        s += atom.weight * ((a.c[j] - b.c[j]).norm_sqr() + (a.d[j] - b.d[j]).norm_sqr());
    }
    s.sqrt()
}

fn state_norm(basis: &Basis, a: &CoefficientState) -> f64 {
    let (x, y) = basis.norms(a);
    (x + y).sqrt()
}

fn relative(defect: f64, size: f64) -> f64 {
    if size == 0.0 {
        defect
    } else {
        defect / size
    }
}

/// Relative defect of `evolve(t1 + t2)` against evolving, by `t2`, the
/// field at `t1` resampled as new data.
pub fn check_composition(problem: &Problem, data: &CauchyData, t1: f64, t2: f64) -> Result<f64> {
    check_composition_with(problem, data, t1, t2, BasisOptions::default())
}

/// [`check_composition`] with explicit truncation settings; the horizon is
/// raised to `|t1| + |t2|`.
pub fn check_composition_with(problem: &Problem, data: &CauchyData, t1: f64, t2: f64, opts: BasisOptions) -> Result<f64> {
    let horizon = opts.horizon.max(t1.abs() + t2.abs());
    let basis = Basis::for_data(problem, &[data], BasisOptions { horizon, ..opts })?;
    let start = basis.project(data)?.state;
    let direct = advance(&basis, &start, t1 + t2)?;
    let mid = advance(&basis, &start, t1)?;
    let resampled = basis.resample(&mid, t1)?;
    let composed = advance(&basis, &resampled, t2)?;
    Ok(relative(state_distance(&basis, &direct, &composed), state_norm(&basis, &direct)))
}

/// Relative defect of `(A S(t)² + C(t)²)` applied to the data.
pub fn check_pythagoras(problem: &Problem, data: &CauchyData, t: f64) -> Result<f64> {
    let basis = Basis::for_data(problem, &[data], BasisOptions::with_horizon(t))?;
    let start = basis.project(data)?.state;
    let mut image = start.clone();
    for (j, atom) in basis.atoms().iter().enumerate() {
        let (c, s, _) = propagator(t, atom.lambda())?;
        let f = atom.lambda() * s * s + c * c;
        image.c[j] *= f;
        image.d[j] *= f;
    }
    Ok(relative(state_distance(&basis, &image, &start), state_norm(&basis, &start)))
}

/// `‖(φ_{t+h} - 2φ_t + φ_{t-h})/h² + A φ_t‖`.
pub fn second_derivative_check(problem: &Problem, data: &CauchyData, t: f64, h: f64) -> Result<f64> {
    let basis = Basis::for_data(problem, &[data], BasisOptions::with_horizon(t.abs() + h.abs()))?;
    let start = basis.project(data)?.state;
    let at = |s: f64| advance(&basis, &start, s);
    let (plus, mid, minus) = (at(t + h)?, at(t)?, at(t - h)?);
    let mut sum = 0.0;
    for (j, atom) in basis.atoms().iter().enumerate() {
        let second = (plus.c[j] - 2.0 * mid.c[j] + minus.c[j]) / (h * h);
        sum += atom.weight * (second + atom.lambda() * mid.c[j]).norm_sqr();
    }
    Ok(sum.sqrt())
}
