//! Energy and symplectic forms, their conservation, and the causal-support
//! diagnostic.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{Basis, BasisOptions, CauchyData, CoefficientState, Solution};
use crate::extension::Problem;
use crate::geometry::{causal_slice, SpatialSet};

/// `E(φ, φ') = ⟨φ̇, φ̇'⟩ + ⟨φ, A φ'⟩ = Σ w (d conj d' + λ c conj c')`.
pub fn energy(basis: &Basis, a: &CoefficientState, b: &CoefficientState) -> Result<Complex64> {
    basis.check(a)?;
    basis.check(b)?;
    let mut e = Complex64::new(0.0, 0.0);
    for (j, atom) in basis.atoms().iter().enumerate() {
        e += atom.weight * (a.d[j] * b.d[j].conj() + atom.lambda() * a.c[j] * b.c[j].conj());
    }
    Ok(e)
}

/// `σ(φ, φ') = ⟨φ, φ̇'⟩ - ⟨φ̇, φ'⟩`.
pub fn symplectic(basis: &Basis, a: &CoefficientState, b: &CoefficientState) -> Result<Complex64> {
    basis.check(a)?;
    basis.check(b)?;
    let mut s = Complex64::new(0.0, 0.0);
    for (j, atom) in basis.atoms().iter().enumerate() {
        s += atom.weight * (a.c[j] * b.d[j].conj() - a.d[j] * b.c[j].conj());
    }
    Ok(s)
}

/// `Σ w (|d|² + |λ| |c|²)`: the size of the terms entering the energy.
pub fn energy_scale(basis: &Basis, a: &CoefficientState) -> f64 {
    basis
        .atoms()
        .iter()
        .enumerate()
        .map(|(j, atom)| atom.weight * (a.d[j].norm_sqr() + atom.lambda().abs() * a.c[j].norm_sqr()))
        .sum()
}

/// `Σ w (|c| |d'| + |d| |c'|)`: the size of the terms entering `σ`.
pub fn symplectic_scale(basis: &Basis, a: &CoefficientState, b: &CoefficientState) -> f64 {
    basis
        .atoms()
        .iter()
        .enumerate()
        .map(|(j, atom)| atom.weight * (a.c[j].norm() * b.d[j].norm() + a.d[j].norm() * b.c[j].norm()))
        .sum()
}

/// Conserved quantities sampled over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservedSeries {
    pub times: Vec<f64>,
    /// `E(φ, φ)`.
    pub energy: Vec<f64>,
    /// `σ(φ, ψ)` for the partner solution `ψ`.
    pub symplectic: Vec<f64>,
    /// Leakage out of the causal slice; absent without a compact support.
    pub leakage: Vec<Option<f64>>,
    /// `‖φ_t‖`.
    pub phi_norm: Vec<f64>,
    /// `max |E(t) - E(0)|` over the energy scale of the data.
    pub energy_drift: f64,
    /// `max |σ(t) - σ(0)|` over the scale of the pairing at `t = 0`.
    pub symplectic_drift: f64,
}

fn drift(values: &[f64], scale: f64) -> f64 {
    let Some(&first) = values.first() else { return 0.0 };
    let worst = values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}

/// Energy of `data`, its symplectic pairing with `partner` (by default the
/// rotated data `(-φ̇₀, φ₀)`), leakage and norm at each time.
pub fn conserved_series(
    problem: &Problem,
    data: &CauchyData,
    partner: Option<&CauchyData>,
    times: &[f64],
) -> Result<ConservedSeries> {
    let rotated;
    let partner = match partner {
        Some(p) => p,
        None => {
            rotated = data.rotated();
            &rotated
        }
    };
    let horizon = times.iter().map(|t| t.abs()).fold(0.0, f64::max);
    let basis = Arc::new(Basis::for_data(problem, &[data, partner], BasisOptions::with_horizon(horizon))?);
    let a = Solution::new(basis.clone(), data)?;
    let b = Solution::new(basis.clone(), partner)?;
    let (a0, b0) = (a.state(0.0)?, b.state(0.0)?);
    let e_scale = energy_scale(&basis, &a0);
    let s_scale = symplectic_scale(&basis, &a0, &b0);
    let mut out = ConservedSeries {
        times: times.to_vec(),
        energy: Vec::with_capacity(times.len()),
        symplectic: Vec::with_capacity(times.len()),
        leakage: Vec::with_capacity(times.len()),
        phi_norm: Vec::with_capacity(times.len()),
        energy_drift: 0.0,
        symplectic_drift: 0.0,
    };
    for &t in times {
        let (sa, sb) = (a.state(t)?, b.state(t)?);
        out.energy.push(energy(&basis, &sa, &sa)?.re);
        out.symplectic.push(symplectic(&basis, &sa, &sb)?.re);
        out.phi_norm.push(basis.norms(&sa).0.sqrt());
        out.leakage.push(match data.support() {
            Some(k) => Some(leakage_at(&a, k, t)?),
            None => None,
        });
    }
    out.energy_drift = drift(&out.energy, e_scale);
    out.symplectic_drift = drift(&out.symplectic, s_scale);
    Ok(out)
}

/// `∫_{Σ \ J(K) ∩ Σ_t} |φ_t|² / max(‖φ₀‖², ‖φ_t‖²)` for a solution whose data
/// is supported in `support`. On half-lines the integral stops at the edge
/// of the region the basis resolves.
pub fn leakage_at(solution: &Solution, support: &SpatialSet, t: f64) -> Result<f64> {
    let basis = solution.basis();
    let m = &basis.problem().manifold;
    let slice = causal_slice(m, support, t)?;
    let mut reach = f64::INFINITY;
    for c in 0..m.component_count() {
        let (_, hi) = basis.resolved_region(c)?;
        if hi.is_finite() && !m.closure(c)?.1.is_finite() {
            reach = reach.min(hi);
        }
    }
    let outside = slice.set.complement(m, reach);
    let st = solution.state(t)?;
    let mut integral = 0.0;
    for piece in outside.pieces() {
        let grid = basis.resolving_grid(piece.component, piece.lo, piece.hi)?;
        let values = basis.synthesize(&st, &grid)?;
        integral += values.iter().zip(grid.weights()).map(|(v, w)| w * v.0.norm_sqr()).sum::<f64>();
    }
    let start = solution.state(0.0)?;
    let denom = basis.norms(&start).0.max(basis.norms(&st).0);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((integral / denom).clamp(0.0, 1.0))
}

/// Leakage of the solution with data `data` at time `t`.
pub fn leakage(problem: &Problem, data: &CauchyData, t: f64) -> Result<f64> {
    let support = data
        .support()
        .ok_or_else(|| Error::Unsupported("leakage needs data with a declared compact support".into()))?;
    let basis = Arc::new(Basis::for_data(problem, &[data], BasisOptions::with_horizon(t))?);
    leakage_at(&Solution::new(basis, data)?, support, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{make_bump, Profile};
    use crate::extension::Extension;
    use crate::geometry::Manifold;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn pair_basis(p: &Problem, a: &CauchyData, b: &CauchyData) -> Arc<Basis> {
        Arc::new(Basis::for_data(p, &[a, b], BasisOptions::with_horizon(5.0)).unwrap())
    }

    #[test]
    fn energy_of_first_dirichlet_mode() {
        let p = Problem::new(Manifold::Interval { length: PI }, Extension::IntervalDirichlet).unwrap();
        let d = CauchyData::new(&p.manifold, Profile::mode(0, 1.0), Profile::zero()).unwrap();
        let basis = pair_basis(&p, &d, &d);
        let s = basis.project(&d).unwrap().state;
        assert!((energy(&basis, &s, &s).unwrap().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn energy_of_robin_bound_state_is_negative() {
        let p = Problem::new(Manifold::HalfLine, Extension::robin(-FRAC_PI_4)).unwrap();
        let d = CauchyData::new(&p.manifold, Profile::mode(0, 1.0), Profile::zero()).unwrap();
        let basis = pair_basis(&p, &d, &d);
        let s = basis.project(&d).unwrap().state;
        assert!((energy(&basis, &s, &s).unwrap().re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn symplectic_pairing_of_mode_pair() {
        let p = Problem::new(Manifold::Interval { length: PI }, Extension::IntervalDirichlet).unwrap();
        let a = CauchyData::new(&p.manifold, Profile::mode(0, 1.0), Profile::zero()).unwrap();
        let b = CauchyData::new(&p.manifold, Profile::zero(), Profile::mode(0, 1.0)).unwrap();
        let basis = pair_basis(&p, &a, &b);
        let (sa, sb) = (basis.project(&a).unwrap().state, basis.project(&b).unwrap().state);
        assert!((symplectic(&basis, &sa, &sb).unwrap().re - 1.0).abs() < 1e-14);
        assert!(symplectic(&basis, &sa, &sa).unwrap().norm() < 1e-15);
    }

    #[test]
    fn leakage_vanishes_at_time_zero() {
        let p = Problem::new(Manifold::Interval { length: 1.0 }, Extension::IntervalDirichlet).unwrap();
        let d = CauchyData::new(&p.manifold, Profile::bump(make_bump(0.5, 0.1, 1.0)), Profile::zero()).unwrap();
        let l = leakage(&p, &d, 0.0).unwrap();
        // Only the truncated tail of the mode sum lies outside the support.
        assert!(l < 1e-8, "{l}");
    }
}
