//! The `verify` command: the invariant battery on one scenario.

use std::sync::Arc;

use anyhow::Result;
use kgsae::evolution::{check_composition_with, check_pythagoras};
use kgsae::fd::compare_with_spectral;
use kgsae::observables::{energy_scale, leakage_at, symplectic_scale};
use kgsae::{eigenfunction, energy, find_eigenvalues, symplectic, t_infinity, Basis, BasisOptions, Problem, Solution, Window};
use serde::Serialize;

use crate::config::Scenario;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), value, tolerance, pass: value <= tolerance, detail: detail.into() }
    }

    fn vacuous(name: &str, tolerance: f64, detail: &str) -> Self {
        Check { name: name.into(), value: 0.0, tolerance, pass: true, detail: format!("vacuous: {detail}") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

/// Each listed value must be an eigenvalue: the eigenfunction solve rejects
/// points where the eigenvalue condition does not vanish.
pub fn check_eigenvalues(problem: &Problem, lambdas: &[f64]) -> Check {
    let bad: Vec<String> = lambdas
        .iter()
        .filter(|&&l| eigenfunction(problem, l).map_or(true, |m| m.is_empty()))
        .map(|l| format!("{l}"))
        .collect();
    let detail = if bad.is_empty() {
        format!("{} eigenvalues confirmed", lambdas.len())
    } else {
        format!("not eigenvalues: {}", bad.join(", "))
    };
    Check::new("eigenvalues", bad.len() as f64, 0.0, detail)
}

const IDENTITY_TOL: f64 = 1e-8;
const SUPPORT_TOL: f64 = 1e-6;
const FD_TOL: f64 = 1e-3;

pub fn run_verify(sc: &Scenario) -> Result<Report> {
    let cfg = &sc.config;
    let (p, data) = (&sc.problem, &sc.data);
    let mut checks = Vec::new();

    let found = find_eigenvalues(p, Window::lowest(cfg.spectrum.count))?;
    checks.push(check_eigenvalues(p, &found.iter().map(|e| e.lambda).collect::<Vec<_>>()));

    let names = ["composition", "pythagoras", "energy_conservation", "symplectic_conservation", "symmetry", "support", "fd_comparison"];
    if data.phi0.terms.is_empty() && data.phidot0.terms.is_empty() {
        for n in names {
            checks.push(Check::vacuous(n, IDENTITY_TOL, "zero data"));
        }
        return Ok(report(cfg.name.clone(), checks));
    }

    let horizon = cfg.time.horizon().max(1e-3);
    let opts = cfg.basis_options();
    // Resampling a band-limited field costs about the square root of the
    // continuum mass past the cutoff.
    let continuum = p.manifold.closure(0)?.1.is_infinite();
    let comp_tol = if continuum { IDENTITY_TOL.max(10.0 * opts.tolerance.sqrt()) } else { IDENTITY_TOL };
    let (t1, t2) = (0.4 * horizon, 0.3 * horizon);
    let c = check_composition_with(p, data, t1, t2, opts)?;
    checks.push(Check::new("composition", c, comp_tol, format!("T({t1})T({t2}) against T({})", t1 + t2)));
    let py = check_pythagoras(p, data, horizon)?;
    checks.push(Check::new("pythagoras", py, IDENTITY_TOL, format!("at t = {horizon}")));

    let partner = data.rotated();
    let wide = BasisOptions { horizon: 2.0 * horizon, ..opts };
    let basis = Arc::new(Basis::for_data(p, &[data, &partner], wide)?);
    let (a, b) = (Solution::new(basis.clone(), data)?, Solution::new(basis.clone(), &partner)?);
    let (a0, b0) = (a.state(0.0)?, b.state(0.0)?);
    let (e_scale, s_scale) = (energy_scale(&basis, &a0).max(f64::MIN_POSITIVE), symplectic_scale(&basis, &a0, &b0).max(f64::MIN_POSITIVE));
    let (e0, s0) = (energy(&basis, &a0, &a0)?, symplectic(&basis, &a0, &b0)?);
    let (mut e_drift, mut s_drift, mut sym): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let stride = (sc.times.len() / 10).max(1);
    for (i, &t) in sc.times.iter().enumerate() {
        let (sa, sb) = (a.state(t)?, b.state(t)?);
        e_drift = e_drift.max((energy(&basis, &sa, &sa)? - e0).norm() / e_scale);
        s_drift = s_drift.max((symplectic(&basis, &sa, &sb)? - s0).norm() / s_scale);
        if i % stride != 0 {
            continue;
        }
        let s = 0.5 * t;
        let (us, vs) = (a.state(s)?, b.state(s)?);
        let (ut, vt) = (a.translate(t).state(s)?, b.translate(t).state(s)?);
        let (up, vp) = (a.reflect().state(s)?, b.reflect().state(s)?);
        let (e, sg) = (energy(&basis, &us, &vs)?, symplectic(&basis, &us, &vs)?);
        sym = sym
            .max((energy(&basis, &ut, &vt)? - e).norm() / e_scale)
            .max((energy(&basis, &up, &vp)? - e).norm() / e_scale)
            .max((symplectic(&basis, &ut, &vt)? - sg).norm() / s_scale)
            .max((symplectic(&basis, &up, &vp)? + sg).norm() / s_scale);
    }
    checks.push(Check::new("energy_conservation", e_drift, IDENTITY_TOL, "drift relative to the energy scale"));
    checks.push(Check::new("symplectic_conservation", s_drift, IDENTITY_TOL, "drift relative to the pairing scale"));
    checks.push(Check::new("symmetry", sym, IDENTITY_TOL, "time translation and reflection laws"));

    match data.support() {
        Some(k) if !k.is_empty() => {
            let window = t_infinity(&p.manifold, k)? - 2.0 * cfg.space.spacing;
            let inside: Vec<f64> = sc.times.iter().copied().filter(|t| t.abs() <= window).collect();
            if inside.is_empty() {
                checks.push(Check::vacuous("support", SUPPORT_TOL, "no sampled time inside the causal window"));
            } else {
                let mut worst: f64 = 0.0;
                for &t in &inside {
                    worst = worst.max(leakage_at(&a, k, t)?);
                }
                checks.push(Check::new("support", worst, SUPPORT_TOL, format!("{} times with |t| <= {window}", inside.len())));
            }
        }
        _ => checks.push(Check::vacuous("support", SUPPORT_TOL, "no compact support declared")),
    }

    let t_fd = cfg.time.end;
    let cmp = compare_with_spectral(&a, data, t_fd, cfg.fd_grid()?)?;
    checks.push(Check::new(
        "fd_comparison",
        cmp.l2_error,
        FD_TOL,
        format!("L2 difference at t = {t_fd}, h = {} (relative {:.3e})", cfg.fd.h, cmp.relative_error),
    ));

    Ok(report(cfg.name.clone(), checks))
}

fn report(name: String, checks: Vec<Check>) -> Report {
    Report { name, pass: checks.iter().all(|c| c.pass), checks }
}
