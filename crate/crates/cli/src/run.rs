//! The `simulate`, `spectrum` and `greens` commands.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use kgsae::fd::weighted_l2;
use kgsae::observables::leakage_at;
use kgsae::{
    causal_slice, classify, eigenvalue_condition, energy, fd_evolve, greens_function, spectrum, symplectic, t_infinity,
    Basis, CauchyData, FdRun, FieldState, Manifold, Point, Problem, Solution, SpatialSet, Window,
};
use serde_json::{json, Value};

use crate::config::{Scenario, ScenarioConfig, SolverKind};
use crate::output::{conserved_csv, num, snapshots_csv, spectrum_csv, Bundle, ConservedRow};

/// Summary of a `simulate` run.
#[derive(Debug, Clone)]
pub struct SimulateSummary {
    pub files: Vec<String>,
    pub content_hash: String,
    /// Largest relative `L²` difference between the solvers, with `both`.
    pub fd_difference: Option<f64>,
}

fn geometry(problem: &Problem, data: &CauchyData) -> Result<Value> {
    Ok(match data.support() {
        Some(k) if !k.is_empty() => {
            let t_inf = t_infinity(&problem.manifold, k)?;
            json!({ "support": k.pieces(), "t_infinity": t_inf.is_finite().then_some(t_inf) })
        }
        _ => json!({ "support": null, "t_infinity": null }),
    })
}

fn problem_summary(problem: &Problem) -> Result<Value> {
    Ok(json!({
        "manifold": problem.manifold.name(),
        "extension": problem.extension.name(),
        "classification": classify(problem)?,
    }))
}

fn finish(mut bundle: Bundle, mut meta: Value) -> Result<(Vec<String>, String)> {
    let hash = bundle.content_hash();
    let files: serde_json::Map<String, Value> = bundle.blob_hashes().into_iter().map(|(n, h)| (n, Value::String(h))).collect();
    let mut names: Vec<String> = files.keys().cloned().collect();
    meta["files"] = Value::Object(files);
    meta["content_hash"] = Value::String(hash.clone());
    bundle.write_json("meta.json", &meta)?;
    names.push("meta.json".into());
    Ok((names, hash))
}

/// `‖φ‖` and the leakage of a sampled field on trapezoid weights.
fn sampled_norms(m: &Manifold, support: Option<&SpatialSet>, st: &FieldState, weights: &[f64], norm0: f64) -> Result<(f64, Option<f64>)> {
    let total: f64 = weights.iter().zip(&st.phi).map(|(w, f)| w * f.norm_sqr()).sum();
    let leakage = match support {
        Some(k) if !k.is_empty() => {
            let slice = causal_slice(m, k, st.t)?.set;
            let outside: f64 = st
                .points
                .iter()
                .zip(weights)
                .zip(&st.phi)
                .filter(|((p, _), _)| !slice.contains(**p))
                .map(|((_, w), f)| w * f.norm_sqr())
                .sum();
            let denom = norm0.max(total);
            Some(if denom == 0.0 { 0.0 } else { (outside / denom).clamp(0.0, 1.0) })
        }
        _ => None,
    };
    Ok((total.sqrt(), leakage))
}

/// Every `stride`-th node of each component.
fn subsample(st: &FieldState, stride: usize) -> FieldState {
    let mut keep = Vec::new();
    let mut local = 0;
    for (i, p) in st.points.iter().enumerate() {
        if i > 0 && st.points[i - 1].component != p.component {
            local = 0;
        }
        if local % stride == 0 {
            keep.push(i);
        }
        local += 1;
    }
    FieldState {
        t: st.t,
        points: keep.iter().map(|&i| st.points[i]).collect(),
        phi: keep.iter().map(|&i| st.phi[i]).collect(),
        phidot: keep.iter().map(|&i| st.phidot[i]).collect(),
    }
}

fn fd_conserved(problem: &Problem, data: &CauchyData, run: &FdRun) -> Result<Vec<ConservedRow>> {
    let norm0 = run.weights.iter().zip(&run.states[0].phi).map(|(w, f)| w * f.norm_sqr()).sum::<f64>();
    run.states
        .iter()
        .zip(&run.energy)
        .map(|(st, &e)| {
            let (phi_norm, leakage) = sampled_norms(&problem.manifold, data.support(), st, &run.weights, norm0)?;
            Ok(ConservedRow { t: st.t, energy: e, sigma: None, leakage, phi_norm })
        })
        .collect()
}

pub fn simulate(sc: &Scenario, out: &Path) -> Result<SimulateSummary> {
    let cfg = &sc.config;
    let (p, data) = (&sc.problem, &sc.data);
    let mut bundle = Bundle::new(out)?;
    let sd = spectrum(p, Window::lowest(cfg.spectrum.count)).context("computing the spectrum")?;
    bundle.write("spectrum.csv", spectrum_csv(&sd))?;

    let mut meta = json!({
        "command": "simulate",
        "name": cfg.name,
        "solver": cfg.solver,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "problem": problem_summary(p)?,
        "geometry": geometry(p, data)?,
        "data_restriction": "finite sums of compactly supported bumps, bump slopes and eigenmodes",
    });

    let mut solution = None;
    if cfg.solver.spectral() {
        let partner = data.rotated();
        let basis = Arc::new(Basis::for_data(p, &[data, &partner], cfg.basis_options()).context("building the basis")?);
        let a = Solution::new(basis.clone(), data)?;
        let b = Solution::new(basis.clone(), &partner)?;
        let mut states = Vec::with_capacity(sc.times.len());
        let mut rows = Vec::with_capacity(sc.times.len());
        for &t in &sc.times {
            states.push(a.field(t, &sc.points).with_context(|| format!("evaluating at t = {t}"))?);
            let (sa, sb) = (a.state(t)?, b.state(t)?);
            let norm = basis.norms(&sa).0;
            let leakage = match data.support() {
                Some(k) if !k.is_empty() => Some(leakage_at(&a, k, t)?),
                _ => None,
            };
            rows.push(ConservedRow {
                t,
                energy: energy(&basis, &sa, &sa)?.re,
                sigma: Some(symplectic(&basis, &sa, &sb)?.re),
                leakage,
                phi_norm: norm.sqrt(),
            });
        }
        bundle.write("snapshots.csv", snapshots_csv(&states))?;
        bundle.write("conserved.csv", conserved_csv(&rows))?;
        let reports = basis.reports();
        meta["truncation"] = json!({
            "modes": basis.atoms().iter().filter(|a| a.momentum.is_none()).count(),
            "continuum_nodes": basis.atoms().iter().filter(|a| a.momentum.is_some()).count(),
            "parseval_defect": reports.iter().map(|r| r.parseval_defect).fold(0.0, f64::max),
            "blocks": reports,
        });
        solution = Some(a);
    }

    let mut fd_difference = None;
    if cfg.solver.fd() {
        let grid = cfg.fd_grid()?;
        let run = fd_evolve(p, data, &sc.times, grid).context("running the finite-difference solver")?;
        let stride = ((cfg.space.spacing / grid.h).round() as usize).max(1);
        let snaps: Vec<FieldState> = run.states.iter().map(|s| subsample(s, stride)).collect();
        let name = if cfg.solver == SolverKind::Fd { "snapshots.csv" } else { "snapshots_fd.csv" };
        bundle.write(name, snapshots_csv(&snaps))?;
        if cfg.solver == SolverKind::Fd {
            bundle.write("conserved.csv", conserved_csv(&fd_conserved(p, data, &run)?))?;
        }
        meta["fd"] = json!({
            "solver": "fd",
            "h": grid.h,
            "k": grid.k,
            "snapshot_stride": stride,
            "half_line_length": run.half_line_length,
        });
        if let Some(a) = &solution {
            let mut csv = String::from("t,l2_difference,relative_difference\n");
            let mut worst: f64 = 0.0;
            for st in &run.states {
                let spec = a.field(st.t, &st.points)?;
                let (diff, size) = weighted_l2(&run.weights, &st.phi, &spec.phi);
                let rel = if size > 0.0 { diff / size } else { diff };
                worst = worst.max(rel);
                let _ = writeln!(csv, "{},{},{}", num(st.t), num(diff), num(rel));
            }
            bundle.write("comparison.csv", csv)?;
            meta["fd"]["max_relative_difference"] = json!(worst);
            fd_difference = Some(worst);
        }
    }

    let (files, content_hash) = finish(bundle, meta)?;
    Ok(SimulateSummary { files, content_hash, fd_difference })
}

/// Eigenvalues, the zero-eigenvalue criterion and the classification.
pub fn spectrum_report(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<String>> {
    let p = Problem::new(cfg.manifold, cfg.extension.clone())?;
    let mut bundle = Bundle::new(out)?;
    let sd = spectrum(&p, Window::lowest(cfg.spectrum.count))?;
    bundle.write("spectrum.csv", spectrum_csv(&sd))?;
    let zero_found = sd.discrete.iter().any(|e| e.lambda == 0.0);
    let meta = json!({
        "command": "spectrum",
        "name": cfg.name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "problem": problem_summary(&p)?,
        "zero_criterion": eigenvalue_condition(&p, 0.0)?,
        "zero_eigenvalue": zero_found,
        "infimum": sd.infimum(),
        "eigenvalues": sd.discrete.iter().map(|e| json!({ "lambda": e.lambda, "multiplicity": e.multiplicity() })).collect::<Vec<_>>(),
        "continuum": sd.continuum,
    });
    Ok(finish(bundle, meta)?.0)
}

fn kernel_points(cfg: &ScenarioConfig, p: &Problem) -> Result<Vec<Point>> {
    let m = &p.manifold;
    let n = cfg.greens.points;
    let mut out = Vec::new();
    for c in 0..m.component_count() {
        let (lo, hi) = m.closure(c)?;
        let (hi, count) = match *m {
            Manifold::Circle { .. } => (hi, n),
            _ if hi.is_finite() => (hi, n - 1),
            _ => (lo + cfg.space.half_line_extent.unwrap_or(4.0), n - 1),
        };
        let step = (hi - lo) / count as f64;
        out.extend((0..n).map(|i| Point::new(c, lo + step * i as f64)));
    }
    Ok(out)
}

/// The kernel of `(A - λ)⁻¹` tabulated on a grid:
/// `x_component,x,y_component,y,re_g,im_g`.
pub fn greens_table(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<String>> {
    let p = Problem::new(cfg.manifold, cfg.extension.clone())?;
    let lambda = cfg.greens.lambda;
    let pts = kernel_points(cfg, &p)?;
    let mut csv = String::from("x_component,x,y_component,y,re_g,im_g\n");
    for &x in &pts {
        for &y in &pts {
            let g = greens_function(&p, x, y, lambda).with_context(|| format!("kernel at lambda = {lambda}"))?;
            let _ = writeln!(csv, "{},{},{},{},{},{}", x.component, num(x.x), y.component, num(y.x), num(g.re), num(g.im));
        }
    }
    let mut bundle = Bundle::new(out)?;
    bundle.write("greens.csv", csv)?;
    let meta = json!({
        "command": "greens",
        "name": cfg.name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "problem": problem_summary(&p)?,
    });
    Ok(finish(bundle, meta)?.0)
}
