//! Second-order finite differences in space and leapfrog in time: an
//! independent check on the spectral propagator.
//!
//! Boundary conditions enter through ghost points eliminated with the
//! condition itself. The second-kind coupling is carried by one unknown
//! `β` with `(φ(0), φ(a)) = β w`. Half-lines are cut at a finite length with
//! a Dirichlet end placed beyond the reach of the signal.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{sample_data, CauchyData, FieldState, Solution};
use crate::extension::{Base, Block, Problem};
use crate::geometry::{causal_slice, Point, SpatialSet};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spatial step `h` and time step `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdGrid {
    pub h: f64,
    pub k: f64,
}

impl FdGrid {
    /// Largest accepted `k/h`.
    pub const MAX_COURANT: f64 = 0.9;

    pub fn new(h: f64, k: f64) -> Result<Self> {
        if !(h > 0.0) || !(k > 0.0) {
            return Err(Error::Unsupported(format!("grid steps must be positive, got h = {h}, k = {k}")));
        }
        let ratio = k / h;
        if ratio > Self::MAX_COURANT {
            return Err(Error::CflViolation { ratio, limit: Self::MAX_COURANT });
        }
        Ok(FdGrid { h, k })
    }

    /// `k = r h`.
    pub fn with_courant(h: f64, r: f64) -> Result<Self> {
        Self::new(h, r * h)
    }
}

impl Default for FdGrid {
    fn default() -> Self {
        FdGrid { h: 1.0 / 512.0, k: 0.5 / 512.0 }
    }
}

/// Discretization of one block.
#[derive(Debug, Clone)]
struct Stencil {
    component: usize,
    base: Base,
    mu: f64,
    h: f64,
    /// Node coordinates; on the circle the last node is not repeated.
    nodes: Vec<f64>,
}

impl Stencil {
    fn new(block: &Block, h: f64, half_line_length: f64) -> Self {
        let (len, periodic) = match block.base {
            Base::Circle { circumference } => (circumference, true),
            Base::Robin { .. } => (half_line_length, false),
            _ => (block.base.length().expect("interval base"), false),
        };
        let n = ((len / h).ceil() as usize).max(2);
        let step = len / n as f64;
        let count = if periodic { n } else { n + 1 };
        Stencil {
            component: block.component,
            base: block.base,
            mu: block.mu,
            h: step,
            nodes: (0..count).map(|i| i as f64 * step).collect(),
        }
    }

    fn weights(&self) -> Vec<f64> {
        let n = self.nodes.len();
        let mut w = vec![self.h; n];
        if !matches!(self.base, Base::Circle { .. }) {
            w[0] *= 0.5;
            w[n - 1] *= 0.5;
        }
        w
    }

    /// Puts initial samples on the discrete constraint set.
    fn constrain(&self, u: &mut [Complex64]) {
        let n = u.len() - 1;
        match self.base {
            Base::Dirichlet { .. } => {
                u[0] = ZERO;
                u[n] = ZERO;
            }
            Base::Robin { alpha } => {
                if alpha.sin() == 0.0 {
                    u[0] = ZERO;
                }
                u[n] = ZERO;
            }
            Base::SecondKind { w1, w2, .. } => {
                let beta = w1.conj() * u[0] + w2.conj() * u[n];
                u[0] = beta * w1;
                u[n] = beta * w2;
            }
            _ => {}
        }
    }

    /// `-A_h u`, the discrete `u'' - μ u` with the boundary rows.
    fn apply(&self, u: &[Complex64], out: &mut [Complex64]) {
        let n = u.len();
        let h2 = self.h * self.h;
        let last = n - 1;
        for i in 1..last {
            out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / h2;
        }
        match self.base {
            Base::Circle { .. } => {
                out[0] = (u[last] - 2.0 * u[0] + u[1]) / h2;
                out[last] = (u[last - 1] - 2.0 * u[last] + u[0]) / h2;
            }
            Base::Dirichlet { .. } => {
                out[0] = ZERO;
                out[last] = ZERO;
            }
            Base::Robin { alpha } => {
                out[0] = if alpha.sin() == 0.0 {
                    ZERO
                } else {
                    let slope = alpha.cos() / alpha.sin() * u[0];
                    2.0 * (u[1] - u[0] - self.h * slope) / h2
                };
                out[last] = ZERO;
            }
            Base::FirstKind { theta11, theta22, theta12, .. } => {
                let left = theta11 * u[0] + theta12 * u[last];
                let right = theta12.conj() * u[0] + theta22 * u[last];
                out[0] = 2.0 * (u[1] - u[0] - self.h * left) / h2;
                out[last] = 2.0 * (u[last - 1] - u[last] - self.h * right) / h2;
            }
            Base::SecondKind { w1, w2, theta, .. } => {
                let beta = w1.conj() * u[0] + w2.conj() * u[last];
                let flux = w1.conj() * (u[1] - u[0]) + w2.conj() * (u[last - 1] - u[last]);
                let accel = 2.0 * flux / h2 - 2.0 * theta / self.h * beta;
                out[0] = accel * w1;
                out[last] = accel * w2;
            }
        }
        let pinned = |i: usize| match self.base {
            Base::Dirichlet { .. } => i == 0 || i == last,
            Base::Robin { alpha } => i == last || (i == 0 && alpha.sin() == 0.0),
            _ => false,
        };
        for (i, o) in out.iter_mut().enumerate() {
            if !pinned(i) {
                *o -= self.mu * u[i];
            }
        }
    }
}

/// Leapfrog evolution of one block, with outputs at integer step counts.
struct Leapfrog<'a> {
    stencil: &'a Stencil,
    weights: Vec<f64>,
    k: f64,
    prev: Vec<Complex64>,
    cur: Vec<Complex64>,
    step: usize,
    scratch: Vec<Complex64>,
}

impl<'a> Leapfrog<'a> {
    /// Taylor start `u¹ = u⁰ + k u̇⁰ + (k²/2) L u⁰`.
    fn new(stencil: &'a Stencil, mut u0: Vec<Complex64>, mut v0: Vec<Complex64>, k: f64) -> Self {
        stencil.constrain(&mut u0);
        stencil.constrain(&mut v0);
        let mut scratch = vec![ZERO; u0.len()];
        stencil.apply(&u0, &mut scratch);
        let u1: Vec<Complex64> = (0..u0.len()).map(|i| u0[i] + k * v0[i] + 0.5 * k * k * scratch[i]).collect();
        Leapfrog { stencil, weights: stencil.weights(), k, prev: u0, cur: u1, step: 1, scratch }
    }

    fn advance(&mut self) {
        self.stencil.apply(&self.cur, &mut self.scratch);
        let k2 = self.k * self.k;
        for i in 0..self.cur.len() {
            let next = 2.0 * self.cur[i] - self.prev[i] + k2 * self.scratch[i];
            self.prev[i] = self.cur[i];
            self.cur[i] = next;
        }
        self.step += 1;
    }

    /// Staggered energy `‖(u¹ - u⁰)/k‖² - Re⟨u¹, L u⁰⟩` of the last step.
    fn energy(&mut self) -> f64 {
        self.stencil.apply(&self.prev, &mut self.scratch);
        let mut e = 0.0;
        for i in 0..self.cur.len() {
            let v = (self.cur[i] - self.prev[i]) / self.k;
            e += self.weights[i] * (v.norm_sqr() - (self.cur[i].conj() * self.scratch[i]).re);
        }
        e
    }
}

fn v0_constrained(s: &Stencil, slice: &[(Complex64, Complex64)], sign: f64) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = slice.iter().map(|x| sign * x.1).collect();
    s.constrain(&mut v);
    v.iter_mut().for_each(|x| *x *= sign);
    v
}

/// Output of [`fd_evolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdRun {
    /// One state per requested time, on the grid nodes of every component.
    pub states: Vec<FieldState>,
    /// Trapezoid weights of the nodes, in the order of `states[i].points`.
    pub weights: Vec<f64>,
    /// Discrete energy at each requested time, exactly conserved by the
    /// scheme up to rounding.
    pub energy: Vec<f64>,
    /// Time step used for each requested time.
    pub steps: Vec<f64>,
    /// Length at which half-lines were cut.
    pub half_line_length: Option<f64>,
}

/// Length at which a half-line is cut so that nothing from the data
/// reaches the artificial end by time `horizon`, and bound-state tails are
/// below `1e-8` there.
fn cut_length(problem: &Problem, data: &CauchyData, horizon: f64) -> f64 {
    let extent = match data.support() {
        Some(k) => k.pieces().iter().map(|p| p.hi).fold(0.0, f64::max),
        None => 0.0,
    };
    let mut len = extent + horizon + 1.0;
    if data.phi0.has_modes() || data.phidot0.has_modes() {
        for b in problem.blocks() {
            if let Base::Robin { alpha } = b.base {
                if alpha < 0.0 {
                    let kappa = -alpha.cos() / alpha.sin();
                    len = len.max((1e8f64.ln() + kappa * horizon + 1.0) / kappa);
                } else {
                    len = len.max(horizon + 10.0);
                }
            }
        }
    }
    len
}

/// Evolves `data` with the finite-difference scheme to each of `times`.
/// Negative times run the reversed data forward.
pub fn fd_evolve(problem: &Problem, data: &CauchyData, times: &[f64], grid: FdGrid) -> Result<FdRun> {
    FdGrid::new(grid.h, grid.k)?;
    let horizon = times.iter().map(|t| t.abs()).fold(0.0, f64::max);
    let blocks = problem.blocks();
    let cut = cut_length(problem, data, horizon);
    let stencils: Vec<Stencil> = blocks.iter().map(|b| Stencil::new(b, grid.h, cut)).collect();
    for s in &stencils {
        let ratio = grid.k / s.h;
        if ratio > FdGrid::MAX_COURANT {
            return Err(Error::CflViolation { ratio, limit: FdGrid::MAX_COURANT });
        }
    }
    let points: Vec<Point> = stencils
        .iter()
        .flat_map(|s| s.nodes.iter().map(move |&x| Point::new(s.component, x)))
        .collect();
    let weights: Vec<f64> = stencils.iter().flat_map(|s| s.weights()).collect();
    let samples = sample_data(problem, data, &points)?;

    let mut run = FdRun {
        states: Vec::with_capacity(times.len()),
        weights,
        energy: Vec::with_capacity(times.len()),
        steps: Vec::with_capacity(times.len()),
        half_line_length: blocks.iter().any(|b| matches!(b.base, Base::Robin { .. })).then_some(cut),
    };
    for &t in times {
        let span = t.abs();
        let n = ((span / grid.k).ceil() as usize).max(1);
        let k = if span > 0.0 { span / n as f64 } else { grid.k };
        let sign = if t < 0.0 { -1.0 } else { 1.0 };
        let mut phi = Vec::with_capacity(points.len());
        let mut phidot = Vec::with_capacity(points.len());
        let mut energy = 0.0;
        let mut offset = 0;
        for s in &stencils {
            let m = s.nodes.len();
            let slice = &samples[offset..offset + m];
            offset += m;
            let u0: Vec<Complex64> = slice.iter().map(|v| v.0).collect();
            let v0: Vec<Complex64> = slice.iter().map(|v| sign * v.1).collect();
            let mut lf = Leapfrog::new(s, u0, v0, k);
            if span == 0.0 {
                let mut v = v0_constrained(s, slice, sign);
                phi.extend_from_slice(&lf.prev);
                phidot.append(&mut v);
            } else {
                while lf.step < n {
                    lf.advance();
                }
                let lo = lf.prev.clone();
                lf.advance();
                for i in 0..m {
                    phi.push(lf.prev[i]);
                    phidot.push(sign * (lf.cur[i] - lo[i]) / (2.0 * k));
                }
            }
            energy += lf.energy();
        }
        run.states.push(FieldState { t, points: points.clone(), phi, phidot });
        run.energy.push(energy);
        run.steps.push(k);
    }
    Ok(run)
}

/// `(Σ w |a - b|²)^{1/2}` and the same norm of `b`, over `φ`.
pub fn weighted_l2(weights: &[f64], a: &[Complex64], b: &[Complex64]) -> (f64, f64) {
    let mut diff = 0.0;
    let mut size = 0.0;
    for i in 0..weights.len() {
        diff += weights[i] * (a[i] - b[i]).norm_sqr();
        size += weights[i] * b[i].norm_sqr();
    }
    (diff.sqrt(), size.sqrt())
}

/// Leakage of the finite-difference solution out of the causal slice of
/// `support` at time `t`, normalized like the spectral diagnostic.
pub fn fd_leakage(problem: &Problem, data: &CauchyData, support: &SpatialSet, t: f64, grid: FdGrid) -> Result<f64> {
    let run = fd_evolve(problem, data, &[0.0, t], grid)?;
    let slice = causal_slice(&problem.manifold, support, t)?;
    let norm = |st: &FieldState| -> f64 { st.phi.iter().zip(&run.weights).map(|(v, w)| w * v.norm_sqr()).sum() };
    let st = &run.states[1];
    let outside: f64 = st
        .points
        .iter()
        .zip(&st.phi)
        .zip(&run.weights)
        .filter(|((p, _), _)| !slice.set.contains(**p))
        .map(|((_, v), w)| w * v.norm_sqr())
        .sum();
    let denom = norm(&run.states[0]).max(norm(st));
    Ok(if denom == 0.0 { 0.0 } else { (outside / denom).clamp(0.0, 1.0) })
}

/// Spectral and finite-difference fields at one time on the grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdComparison {
    pub t: f64,
    pub h: f64,
    /// Weighted `L²` distance between the two `φ_t`.
    pub l2_error: f64,
    /// The same over the `L²` norm of the spectral `φ_t`.
    pub relative_error: f64,
    pub spectral: FieldState,
    pub fd: FieldState,
    pub weights: Vec<f64>,
}

/// Runs both solvers to time `t` and compares them on the grid.
pub fn compare_with_spectral(solution: &Solution, data: &CauchyData, t: f64, grid: FdGrid) -> Result<FdComparison> {
    let problem = solution.basis().problem();
    let run = fd_evolve(problem, data, &[t], grid)?;
    let fd = run.states.into_iter().next().expect("one time requested");
    let spectral = solution.field(t, &fd.points)?;
    let (l2_error, size) = weighted_l2(&run.weights, &fd.phi, &spectral.phi);
    let relative_error = if size > 0.0 { l2_error / size } else { l2_error };
    Ok(FdComparison { t, h: grid.h, l2_error, relative_error, spectral, fd, weights: run.weights })
}

/// Errors against the spectral solution over a sequence of grid sizes and
/// the fitted order of convergence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub t: f64,
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log h`; absent when the
    /// errors vanish.
    pub order: Option<f64>,
}

/// Measures the convergence order of the scheme at time `t` with Courant
/// ratio `courant`.
pub fn convergence_order(solution: &Solution, data: &CauchyData, t: f64, hs: &[f64], courant: f64) -> Result<ConvergenceReport> {
    let mut errors = Vec::with_capacity(hs.len());
    for &h in hs {
        errors.push(compare_with_spectral(solution, data, t, FdGrid::with_courant(h, courant)?)?.l2_error);
    }
    let usable: Vec<(f64, f64)> =
        hs.iter().zip(&errors).filter(|(_, e)| **e > 0.0).map(|(h, e)| (h.ln(), e.ln())).collect();
    let order = if usable.len() >= 2 {
        let n = usable.len() as f64;
        let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
        let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    Ok(ConvergenceReport { t, h: hs.to_vec(), errors, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{make_bump, Profile};
    use crate::extension::Extension;
    use crate::geometry::Manifold;
    use std::f64::consts::PI;

    #[test]
    fn courant_limit_is_enforced() {
        assert!(matches!(FdGrid::new(0.01, 0.0095), Err(Error::CflViolation { .. })));
        assert!(FdGrid::with_courant(0.01, 0.5).is_ok());
    }

    #[test]
    fn dirichlet_mode_matches_cosine() {
        let p = Problem::new(Manifold::Interval { length: PI }, Extension::IntervalDirichlet).unwrap();
        let d = CauchyData::new(&p.manifold, Profile::mode(0, 1.0), Profile::zero()).unwrap();
        let run = fd_evolve(&p, &d, &[1.0], FdGrid::with_courant(PI / 256.0, 0.5).unwrap()).unwrap();
        let st = &run.states[0];
        let exact: Vec<Complex64> =
            st.points.iter().map(|q| Complex64::new(1.0f64.cos() * (2.0 / PI).sqrt() * q.x.sin(), 0.0)).collect();
        let (err, _) = weighted_l2(&run.weights, &st.phi, &exact);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn discrete_energy_is_conserved() {
        let bases = [
            Extension::first_kind(0.3, -0.2, Complex64::new(0.4, 0.7)),
            Extension::second_kind(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), 1.5),
        ];
        for e in bases {
            let p = Problem::new(Manifold::Interval { length: 1.0 }, e).unwrap();
            let d = CauchyData::new(&p.manifold, Profile::bump(make_bump(0.5, 0.3, 1.0)), Profile::zero()).unwrap();
            let run = fd_evolve(&p, &d, &[0.5, 2.0, 4.0], FdGrid::with_courant(1.0 / 128.0, 0.5).unwrap()).unwrap();
            let e0 = run.energy[0];
            for e in &run.energy {
                assert!((e - e0).abs() < 1e-10 * e0.abs().max(1.0), "{e} vs {e0}");
            }
        }
    }
}
