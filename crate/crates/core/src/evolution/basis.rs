//! Expansion of data in (generalized) eigenfunctions.
//!
//! A basis is a list of atoms `(λ_j, w_j, ψ_j)`. Eigenmodes have weight 1;
//! on half-lines the continuum is sampled by Gauss-Legendre panels in the
//! momentum `k`, each node an atom weighted by its quadrature weight. Every
//! function of the operator then acts as `f(A)φ = Σ w_j f(λ_j) c_j ψ_j` with
//! `c_j = ⟨ψ_j, φ⟩`.

use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{Base, Block, Problem};
use crate::geometry::{Manifold, Point, SpatialSet};
use crate::numeric::quad::{reference_rule, Rule, NODES_PER_PANEL};
use crate::spectral::{block_spectrum, generalized_eigenfunction, Mode, ModeShape};

use super::data::{CauchyData, Profile, Term};

/// Truncation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisOptions {
    /// Fixed number of eigenmodes per component; chosen from the data when
    /// absent.
    pub modes: Option<usize>,
    /// Largest number of eigenmodes per component when choosing.
    pub max_modes: usize,
    /// Target relative Parseval defect.
    pub tolerance: f64,
    /// Largest time the basis will be evaluated at; sets the resolution of
    /// the continuum.
    pub horizon: f64,
    /// Largest continuum momentum before giving up.
    pub k_cap: f64,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions { modes: None, max_modes: 512, tolerance: 1e-8, horizon: 1.0, k_cap: 4000.0 }
    }
}

impl BasisOptions {
    pub fn with_horizon(horizon: f64) -> Self {
        BasisOptions { horizon: horizon.abs(), ..Self::default() }
    }
}

/// One term of the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub mode: Mode,
    pub weight: f64,
    /// Momentum of a continuum atom.
    pub momentum: Option<f64>,
}

impl Atom {
    pub fn lambda(&self) -> f64 {
        self.mode.lambda
    }
}

/// What was kept on one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub component: usize,
    pub eigenmodes: usize,
    /// Momentum cutoff of the continuum, if any.
    pub k_max: Option<f64>,
    /// Extent `[0, reach]` on a half-line within which evaluation is
    /// resolved.
    pub reach: Option<f64>,
    /// Relative Parseval defect of the data the basis was built for.
    pub parseval_defect: f64,
    /// The mode cap was hit before the tolerance was met.
    pub capped: bool,
}

/// Atoms of a problem, grouped by component.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    problem: Problem,
    atoms: Vec<Atom>,
    blocks: Vec<(Block, Range<usize>)>,
    /// Highest oscillation rate per block, for sizing quadrature panels.
    rates: Vec<f64>,
    reports: Vec<BlockReport>,
    id: u64,
}

/// Coefficients `c_j = ⟨ψ_j, φ⟩` and `d_j = ⟨ψ_j, φ̇⟩`, possibly evolved to
/// time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientState {
    pub t: f64,
    pub c: Vec<Complex64>,
    pub d: Vec<Complex64>,
    pub(crate) basis_id: u64,
}

/// The expansion of one data set, with its Parseval bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub state: CoefficientState,
    /// `‖φ₀‖²` and `‖φ̇₀‖²` computed directly.
    pub norms: (f64, f64),
    /// `|‖φ₀‖² - Σ w|c|²| + |‖φ̇₀‖² - Σ w|d|²|` relative to the total.
    pub parseval_defect: f64,
}

impl ModeCoefficients {
    /// True when the defect exceeds the warning threshold.
    pub fn truncation_insufficient(&self) -> bool {
        self.parseval_defect > 1e-4
    }
}

fn next_id() -> u64 {
    use std::sync::atomic::{AtomicU64, Ordering};
    static NEXT: AtomicU64 = AtomicU64::new(1);
    NEXT.fetch_add(1, Ordering::Relaxed)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Quadrature of the bump part of the data on one component, with panels
/// fine enough for oscillation rate `rate`.
struct DataRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    phi: Vec<f64>,
    phidot: Vec<f64>,
}

impl DataRule {
    fn new(m: &Manifold, component: usize, data: &[&CauchyData], which: usize, rate: f64) -> Result<Self> {
        let bumps: Vec<_> = data
            .iter()
            .flat_map(|d| d.phi0.bumps().chain(d.phidot0.bumps()))
            .filter(|b| b.component == component)
            .copied()
            .collect();
        let mut rule = Rule::default();
        if !bumps.is_empty() {
            let set = SpatialSet::new(m, bumps.iter().map(|b| b.support()))?;
            let narrow = bumps.iter().map(|b| b.halfwidth).fold(f64::INFINITY, f64::min);
            let width = (narrow / 4.0).min(3.0 / rate.max(1e-300));
            for p in set.pieces() {
                rule.extend(Rule::composite(p.lo, p.hi, width, NODES_PER_PANEL));
            }
        }
        let d = data[which];
        let sample = |prof: &Profile| -> Vec<f64> {
            rule.nodes.iter().map(|&x| prof.bump_value(m, Point::new(component, x))).collect()
        };
        let phi = sample(&d.phi0);
        let phidot = sample(&d.phidot0);
        Ok(DataRule { nodes: rule.nodes, weights: rule.weights, phi, phidot })
    }

    fn norms(&self) -> (f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        for i in 0..self.nodes.len() {
            a += self.weights[i] * self.phi[i] * self.phi[i];
            b += self.weights[i] * self.phidot[i] * self.phidot[i];
        }
        (a, b)
    }

    fn project(&self, shape: &crate::spectral::ModeShape) -> (Complex64, Complex64) {
        let mut c = ZERO;
        let mut d = ZERO;
        for i in 0..self.nodes.len() {
            let v = shape.value(self.nodes[i]).conj() * self.weights[i];
            c += v * self.phi[i];
            d += v * self.phidot[i];
        }
        (c, d)
    }
}

/// Mode terms of one component, summed per index.
fn mode_terms(p: &Profile, component: usize) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for t in &p.terms {
        if let Term::Mode { component: c, index, amplitude } = *t {
            if c != component {
                continue;
            }
            match out.iter_mut().find(|(i, _)| *i == index) {
                Some(slot) => slot.1 += amplitude,
                None => out.push((index, amplitude)),
            }
        }
    }
    out
}

fn highest_mode_index(data: &[&CauchyData], component: usize) -> Option<usize> {
    data.iter()
        .flat_map(|d| mode_terms(&d.phi0, component).into_iter().chain(mode_terms(&d.phidot0, component)))
        .map(|(i, _)| i)
        .max()
}

/// Bookkeeping of norms for one component: bump norms plus the cross terms
/// with exact mode terms.
fn component_norms(rule: &DataRule, data: &CauchyData, component: usize, bump_coeffs: &[(Complex64, Complex64)]) -> (f64, f64) {
    let (mut a, mut b) = rule.norms();
    for (i, amp) in mode_terms(&data.phi0, component) {
        a += amp * amp + 2.0 * amp * bump_coeffs[i].0.re;
    }
    for (i, amp) in mode_terms(&data.phidot0, component) {
        b += amp * amp + 2.0 * amp * bump_coeffs[i].1.re;
    }
    (a, b)
}

fn relative_defect(norms: (f64, f64), kept: (f64, f64)) -> f64 {
    let total = norms.0 + norms.1;
    if total == 0.0 {
        return 0.0;
    }
    ((norms.0 - kept.0).abs() + (norms.1 - kept.1).abs()) / total
}

/// Atoms and projected data of one block.
struct BlockBuild {
    atoms: Vec<Atom>,
    rate: f64,
    report: BlockReport,
}

fn discrete_block(m: &Manifold, block: &Block, data: &[&CauchyData], opts: &BasisOptions) -> Result<BlockBuild> {
    let component = block.component;
    let needed = highest_mode_index(data, component).map_or(0, |i| i + 1);
    let fixed = opts.modes.map(|n| n.max(needed));
    let count = fixed.unwrap_or(opts.max_modes.max(needed));
    let pairs = block_spectrum(block, count)?;
    if let Some(last) = pairs.iter().map(|p| p.modes.len()).sum::<usize>().checked_sub(1) {
        if last + 1 < needed {
            return Err(Error::Unsupported(format!("mode index {} beyond the spectrum", needed - 1)));
        }
    }
    let rate = pairs.iter().map(|p| (p.lambda - block.mu).abs().sqrt()).fold(1.0, f64::max);
    let rules: Vec<DataRule> = (0..data.len()).map(|i| DataRule::new(m, component, data, i, rate)).collect::<Result<_>>()?;
    let modes: Vec<Mode> = pairs.iter().flat_map(|p| p.modes.iter().copied()).collect();
    let coeffs: Vec<Vec<(Complex64, Complex64)>> = rules
        .iter()
        .map(|r| modes.par_iter().map(|md| r.project(&md.shape)).collect())
        .collect();
    let norms: Vec<(f64, f64)> = (0..data.len())
        .map(|i| component_norms(&rules[i], data[i], component, &with_modes(&coeffs[i], data[i], component)))
        .collect();
    // Smallest eigenspace-aligned prefix meeting the tolerance for all data.
    let mut keep = modes.len();
    let mut defect = 0.0;
    let mut kept = vec![(0.0, 0.0); data.len()];
    let mut n = 0;
    let mut capped = true;
    for p in &pairs {
        for _ in 0..p.modes.len() {
            for (i, d) in data.iter().enumerate() {
                let full = with_modes(&coeffs[i], d, component);
                kept[i].0 += full[n].0.norm_sqr();
                kept[i].1 += full[n].1.norm_sqr();
            }
            n += 1;
        }
        defect = (0..data.len()).map(|i| relative_defect(norms[i], kept[i])).fold(0.0, f64::max);
        if fixed.is_none() && n >= needed && defect < opts.tolerance {
            keep = n;
            capped = false;
            break;
        }
    }
    if fixed.is_some() {
        capped = false;
    }
    let atoms: Vec<Atom> = modes[..keep].iter().map(|&mode| Atom { mode, weight: 1.0, momentum: None }).collect();
    let rate = atoms.iter().map(|a| (a.lambda() - block.mu).abs().sqrt()).fold(1.0, f64::max);
    Ok(BlockBuild {
        atoms,
        rate,
        report: BlockReport { component, eigenmodes: keep, k_max: None, reach: None, parseval_defect: defect, capped },
    })
}

/// Bump coefficients with the exact mode terms of one data set added.
fn with_modes(bump: &[(Complex64, Complex64)], data: &CauchyData, component: usize) -> Vec<(Complex64, Complex64)> {
    let mut out = bump.to_vec();
    for (i, a) in mode_terms(&data.phi0, component) {
        out[i].0 += a;
    }
    for (i, a) in mode_terms(&data.phidot0, component) {
        out[i].1 += a;
    }
    out
}

/// Width in `k` of one chunk of continuum panels.
const K_CHUNK: f64 = 4.0;

fn half_line_block(m: &Manifold, block: &Block, alpha: f64, data: &[&CauchyData], opts: &BasisOptions) -> Result<BlockBuild> {
    let component = block.component;
    let needed = highest_mode_index(data, component).map_or(0, |i| i + 1);
    let pairs = block_spectrum(block, 1)?;
    let modes: Vec<Mode> = pairs.iter().flat_map(|p| p.modes.iter().copied()).collect();
    if needed > modes.len() {
        return Err(Error::Unsupported(format!("mode index {} beyond the point spectrum", needed - 1)));
    }
    let extent = data
        .iter()
        .flat_map(|d| d.phi0.bumps().chain(d.phidot0.bumps()))
        .filter(|b| b.component == component)
        .map(|b| b.center + b.halfwidth)
        .fold(0.0, f64::max);
    let reach = extent + opts.horizon + 1.0;
    // Oscillation of ψ_k(x) ψ_k(y) cos(kt) over the resolved region.
    let spread = reach + extent + opts.horizon + 1.0;
    let panel = 8.0 / spread;

    let mut atoms: Vec<Atom> = modes.iter().map(|&mode| Atom { mode, weight: 1.0, momentum: None }).collect();
    let base_rules: Vec<DataRule> = (0..data.len()).map(|i| DataRule::new(m, component, data, i, 1.0)).collect::<Result<_>>()?;
    let mut kept = vec![(0.0, 0.0); data.len()];
    let mut norms = vec![(0.0, 0.0); data.len()];
    for (i, d) in data.iter().enumerate() {
        let bump: Vec<(Complex64, Complex64)> = modes.iter().map(|md| base_rules[i].project(&md.shape)).collect();
        norms[i] = component_norms(&base_rules[i], d, component, &bump);
        for (c, dd) in with_modes(&bump, d, component) {
            kept[i].0 += c.norm_sqr();
            kept[i].1 += dd.norm_sqr();
        }
    }
    let total: f64 = norms.iter().map(|n| n.0 + n.1).sum();
    let continuum_mass: f64 = norms.iter().zip(&kept).map(|(n, k)| (n.0 - k.0).abs() + (n.1 - k.1).abs()).sum();

    let mut k_lo = 0.0;
    let mut quiet = 0;
    let mut tail = 0.0;
    let has_bumps = !base_rules.iter().all(|r| r.nodes.is_empty());
    while has_bumps && continuum_mass > 0.0 {
        if k_lo >= opts.k_cap {
            return Err(Error::ContinuumCutoff { k_cap: opts.k_cap, tail });
        }
        let k_hi = (k_lo + K_CHUNK).min(opts.k_cap);
        let rule = Rule::composite(k_lo, k_hi, panel, 16);
        let rules: Vec<DataRule> =
            (0..data.len()).map(|i| DataRule::new(m, component, data, i, k_hi)).collect::<Result<_>>()?;
        let chunk: Vec<(Atom, Vec<(Complex64, Complex64)>)> = rule
            .nodes
            .par_iter()
            .zip(rule.weights.par_iter())
            .map(|(&k, &w)| {
                let shape = generalized_eigenfunction(alpha, k);
                let atom = Atom { mode: Mode { component, lambda: k * k + block.mu, shape }, weight: w, momentum: Some(k) };
                (atom, rules.iter().map(|r| r.project(&shape)).collect())
            })
            .collect();
        let mut mass = 0.0;
        for (atom, cs) in chunk {
            for (i, (c, d)) in cs.iter().enumerate() {
                kept[i].0 += atom.weight * c.norm_sqr();
                kept[i].1 += atom.weight * d.norm_sqr();
                mass += atom.weight * (c.norm_sqr() + d.norm_sqr());
            }
            atoms.push(atom);
        }
        k_lo = k_hi;
        tail = mass / total;
        quiet = if tail < 1e-3 * opts.tolerance { quiet + 1 } else { 0 };
        if quiet >= 2 {
            break;
        }
    }
    let defect = (0..data.len()).map(|i| relative_defect(norms[i], kept[i])).fold(0.0, f64::max);
    Ok(BlockBuild {
        atoms,
        rate: k_lo.max(modes.iter().map(|md| (block.mu - md.lambda).abs().sqrt()).fold(1.0, f64::max)),
        report: BlockReport {
            component,
            eigenmodes: modes.len(),
            k_max: Some(k_lo),
            reach: Some(reach),
            parseval_defect: defect,
            capped: false,
        },
    })
}

impl Basis {
    /// A basis resolving every data set in `data` to the requested
    /// tolerance.
    pub fn for_data(problem: &Problem, data: &[&CauchyData], opts: BasisOptions) -> Result<Basis> {
        let m = &problem.manifold;
        let mut atoms = Vec::new();
        let mut blocks = Vec::new();
        let mut rates = Vec::new();
        let mut reports = Vec::new();
        for block in problem.blocks() {
            let built = match block.base {
                Base::Robin { alpha } => half_line_block(m, &block, alpha, data, &opts)?,
                _ => discrete_block(m, &block, data, &opts)?,
            };
            let start = atoms.len();
            atoms.extend(built.atoms);
            blocks.push((block, start..atoms.len()));
            rates.push(built.rate);
            reports.push(built.report);
        }
        Ok(Basis { problem: problem.clone(), atoms, blocks, rates, reports, id: next_id() })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn reports(&self) -> &[BlockReport] {
        &self.reports
    }

    /// Range of atoms living on a component.
    pub fn component_range(&self, component: usize) -> Result<Range<usize>> {
        self.blocks
            .iter()
            .find(|(b, _)| b.component == component)
            .map(|(_, r)| r.clone())
            .ok_or(Error::NoSuchComponent { component, count: self.blocks.len() })
    }

    /// Coefficients of `data` in this basis.
    pub fn project(&self, data: &CauchyData) -> Result<ModeCoefficients> {
        let m = &self.problem.manifold;
        let mut c = vec![ZERO; self.atoms.len()];
        let mut d = vec![ZERO; self.atoms.len()];
        let mut norms = (0.0, 0.0);
        for (i, (block, range)) in self.blocks.iter().enumerate() {
            let component = block.component;
            let rule = DataRule::new(m, component, &[data], 0, self.rates[i])?;
            let atoms = &self.atoms[range.clone()];
            let bump: Vec<(Complex64, Complex64)> = atoms.par_iter().map(|a| rule.project(&a.mode.shape)).collect();
            let eigen = atoms.iter().take_while(|a| a.momentum.is_none()).count();
            let modes_needed = highest_mode_index(&[data], component).map_or(0, |i| i + 1);
            if modes_needed > eigen {
                return Err(Error::Unsupported(format!(
                    "mode index {} outside the {eigen} modes kept",
                    modes_needed - 1
                )));
            }
            let full = with_modes(&bump, data, component);
            let n = component_norms(&rule, data, component, &bump);
            norms.0 += n.0;
            norms.1 += n.1;
            for (j, (cj, dj)) in full.into_iter().enumerate() {
                c[range.start + j] = cj;
                d[range.start + j] = dj;
            }
        }
        let state = CoefficientState { t: 0.0, c, d, basis_id: self.id };
        let kept = self.norms(&state);
        Ok(ModeCoefficients { parseval_defect: relative_defect(norms, kept), norms, state })
    }

    /// `(Σ w|c|², Σ w|d|²)`: the squared norms of `φ` and `φ̇` represented by
    /// a state.
    pub fn norms(&self, s: &CoefficientState) -> (f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        for (j, atom) in self.atoms.iter().enumerate() {
            a += atom.weight * s.c[j].norm_sqr();
            b += atom.weight * s.d[j].norm_sqr();
        }
        (a, b)
    }

    pub fn check(&self, s: &CoefficientState) -> Result<()> {
        if s.basis_id != self.id || s.c.len() != self.atoms.len() {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    /// `(φ, φ̇)` of a state at a point.
    pub fn evaluate(&self, s: &CoefficientState, p: Point) -> Result<(Complex64, Complex64)> {
        self.check(s)?;
        let (lo, hi) = self.problem.manifold.closure(p.component)?;
        let circle = self.problem.manifold.is_circle();
        if !circle && (p.x < lo || p.x > hi) {
            return Err(Error::NotInterior(format!("point {} outside [{lo}, {hi}]", p.x)));
        }
        let range = self.component_range(p.component)?;
        let mut phi = ZERO;
        let mut phidot = ZERO;
        for j in range {
            let a = &self.atoms[j];
            let v = a.mode.value(p.x) * a.weight;
            phi += v * s.c[j];
            phidot += v * s.d[j];
        }
        Ok((phi, phidot))
    }

    /// Evaluates at many points in parallel; the sum at each point is taken
    /// in a fixed order.
    pub fn evaluate_many(&self, s: &CoefficientState, points: &[Point]) -> Result<Vec<(Complex64, Complex64)>> {
        points.par_iter().map(|&p| self.evaluate(s, p)).collect()
    }

    /// Spatial quadrature able to resolve every atom over `[lo, hi]` of a
    /// component.
    pub fn resolving_rule(&self, component: usize, lo: f64, hi: f64) -> Result<Rule> {
        let g = self.resolving_grid(component, lo, hi)?;
        Ok(Rule { nodes: g.nodes(), weights: g.weights() })
    }

    /// Equal Gauss-Legendre panels over `[lo, hi]` fine enough for every
    /// atom of a component.
    pub fn resolving_grid(&self, component: usize, lo: f64, hi: f64) -> Result<PanelGrid> {
        let i = self
            .blocks
            .iter()
            .position(|(b, _)| b.component == component)
            .ok_or(Error::NoSuchComponent { component, count: self.blocks.len() })?;
        let width = (3.0 / self.rates[i]).min(0.25);
        Ok(PanelGrid::new(component, lo, hi, width))
    }

    /// Region on which states of this basis are resolved: the whole
    /// component, or `[0, reach]` on a half-line.
    pub fn resolved_region(&self, component: usize) -> Result<(f64, f64)> {
        let (lo, hi) = self.problem.manifold.closure(component)?;
        let reach = self.reports.iter().find(|r| r.component == component).and_then(|r| r.reach);
        Ok((lo, reach.map_or(hi, |r| hi.min(r))))
    }

    /// `(φ, φ̇)` of a state at every node of a grid, in node order.
    ///
    /// Trigonometric atoms are evaluated by angle addition from the panel
    /// midpoints, one `sin_cos` per atom and panel.
    pub fn synthesize(&self, s: &CoefficientState, grid: &PanelGrid) -> Result<Vec<(Complex64, Complex64)>> {
        self.check(s)?;
        let range = self.component_range(grid.component)?;
        let reference = reference_rule(NODES_PER_PANEL);
        let half = grid.half();
        let mut trig = Vec::new();
        let mut other = Vec::new();
        for j in range {
            let a = &self.atoms[j];
            let (u, v) = (s.c[j] * a.weight, s.d[j] * a.weight);
            match a.mode.shape {
                ModeShape::Trig { a, b, k } => trig.push((k, [u * a, u * b, v * a, v * b])),
                _ => other.push(j),
            }
        }
        let offsets: Vec<Complex64> =
            trig.iter().flat_map(|&(k, _)| reference.iter().map(move |&(xi, _)| cis(k * half * xi))).collect();
        let panels: Vec<Vec<(Complex64, Complex64)>> = (0..grid.panels)
            .into_par_iter()
            .map(|q| {
                let mid = grid.mid(q);
                let mut acc = vec![(ZERO, ZERO); NODES_PER_PANEL];
                for (j, (k, w)) in trig.iter().enumerate() {
                    let p = cis(k * mid);
                    let off = &offsets[j * NODES_PER_PANEL..(j + 1) * NODES_PER_PANEL];
                    for (m, o) in off.iter().enumerate() {
                        let e = p * o;
                        acc[m].0 += w[0] * e.re + w[1] * e.im;
                        acc[m].1 += w[2] * e.re + w[3] * e.im;
                    }
                }
                for (m, &(xi, _)) in reference.iter().enumerate() {
                    let x = mid + half * xi;
                    for &j in &other {
                        let v = self.atoms[j].mode.value(x) * self.atoms[j].weight;
                        acc[m].0 += v * s.c[j];
                        acc[m].1 += v * s.d[j];
                    }
                }
                acc
            })
            .collect();
        Ok(panels.concat())
    }

    /// `(Σ w conj(ψ_j) f, Σ w conj(ψ_j) g)` over a grid for every atom of
    /// the grid's component, from samples `(f, g)` at the nodes.
    fn project_samples(&self, grid: &PanelGrid, samples: &[(Complex64, Complex64)]) -> Result<Vec<(Complex64, Complex64)>> {
        let range = self.component_range(grid.component)?;
        let reference = reference_rule(NODES_PER_PANEL);
        let half = grid.half();
        let weighted: Vec<(Complex64, Complex64)> =
            samples.iter().zip(grid.weights()).map(|(&(f, g), w)| (f * w, g * w)).collect();
        Ok(self.atoms[range]
            .par_iter()
            .map(|atom| match atom.mode.shape {
                ModeShape::Trig { a, b, k } => {
                    let off: Vec<Complex64> = reference.iter().map(|&(xi, _)| cis(k * half * xi)).collect();
                    let mut sums = [ZERO; 4];
                    for q in 0..grid.panels {
                        let p = cis(k * grid.mid(q));
                        let panel = &weighted[q * NODES_PER_PANEL..(q + 1) * NODES_PER_PANEL];
                        for (o, &(f, g)) in off.iter().zip(panel) {
                            let e = p * o;
                            sums[0] += f * e.re;
                            sums[1] += f * e.im;
                            sums[2] += g * e.re;
                            sums[3] += g * e.im;
                        }
                    }
                    let (a, b) = (a.conj(), b.conj());
                    (a * sums[0] + b * sums[1], a * sums[2] + b * sums[3])
                }
                _ => {
                    let mut pc = ZERO;
                    let mut pd = ZERO;
                    for (x, &(f, g)) in grid.nodes().into_iter().zip(&weighted) {
                        let v = atom.mode.value(x).conj();
                        pc += v * f;
                        pd += v * g;
                    }
                    (pc, pd)
                }
            })
            .collect())
    }

    fn assemble<F>(&self, t: f64, mut per_block: F) -> Result<CoefficientState>
    where
        F: FnMut(&PanelGrid) -> Result<Vec<(Complex64, Complex64)>>,
    {
        let mut c = vec![ZERO; self.atoms.len()];
        let mut d = vec![ZERO; self.atoms.len()];
        for (block, range) in &self.blocks {
            let comp = block.component;
            let (lo, hi) = self.resolved_region(comp)?;
            let grid = self.resolving_grid(comp, lo, hi)?;
            let samples = per_block(&grid)?;
            for (j, (pc, pd)) in self.project_samples(&grid, &samples)?.into_iter().enumerate() {
                c[range.start + j] = pc;
                d[range.start + j] = pd;
            }
        }
        Ok(CoefficientState { t, c, d, basis_id: self.id })
    }

    /// Coefficients of arbitrary functions `(φ, φ̇)` given pointwise, by
    /// quadrature over the resolved region of each component.
    pub fn project_fn<F>(&self, t: f64, f: F) -> Result<CoefficientState>
    where
        F: Fn(Point) -> (Complex64, Complex64) + Sync,
    {
        self.assemble(t, |grid| Ok(grid.nodes().par_iter().map(|&x| f(Point::new(grid.component, x))).collect()))
    }

    /// Samples a state on the resolved region and projects the samples back,
    /// labelled with time `t`. Exact on intervals up to quadrature error; on
    /// half-lines it drops what lies past the continuum cutoff.
    pub fn resample(&self, s: &CoefficientState, t: f64) -> Result<CoefficientState> {
        self.assemble(t, |grid| self.synthesize(s, grid))
    }
}

fn cis(x: f64) -> Complex64 {
    let (s, c) = x.sin_cos();
    Complex64::new(c, s)
}

/// Equal Gauss-Legendre panels over an interval of one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelGrid {
    pub component: usize,
    lo: f64,
    width: f64,
    panels: usize,
}

impl PanelGrid {
    /// Panels no wider than `max_width`; empty when `hi <= lo`.
    pub fn new(component: usize, lo: f64, hi: f64, max_width: f64) -> Self {
        if hi <= lo {
            return PanelGrid { component, lo, width: 0.0, panels: 0 };
        }
        let panels = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        PanelGrid { component, lo, width: (hi - lo) / panels as f64, panels }
    }

    fn half(&self) -> f64 {
        0.5 * self.width
    }

    fn mid(&self, q: usize) -> f64 {
        self.lo + q as f64 * self.width + self.half()
    }

    pub fn len(&self) -> usize {
        self.panels * NODES_PER_PANEL
    }

    pub fn is_empty(&self) -> bool {
        self.panels == 0
    }

    pub fn nodes(&self) -> Vec<f64> {
        let half = self.half();
        (0..self.panels).flat_map(|q| reference_rule(NODES_PER_PANEL).iter().map(move |&(xi, _)| self.mid(q) + half * xi)).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        let half = self.half();
        (0..self.panels).flat_map(|_| reference_rule(NODES_PER_PANEL).iter().map(move |&(_, w)| half * w)).collect()
    }

    pub fn points(&self) -> Vec<Point> {
        self.nodes().into_iter().map(|x| Point::new(self.component, x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::data::make_bump;
    use crate::extension::Extension;
    use std::f64::consts::PI;

    #[test]
    fn unit_mode_data_has_unit_coefficient() {
        let p = Problem::new(Manifold::Interval { length: PI }, Extension::IntervalDirichlet).unwrap();
        let data = CauchyData::new(&p.manifold, Profile::mode(0, 1.0), Profile::zero()).unwrap();
        let basis = Basis::for_data(&p, &[&data], BasisOptions::default()).unwrap();
        let mc = basis.project(&data).unwrap();
        assert_eq!(mc.state.c[0], Complex64::new(1.0, 0.0));
        assert!(mc.state.c[1..].iter().all(|c| c.norm() == 0.0));
        assert!(mc.parseval_defect < 1e-15);
    }

    #[test]
    fn zero_data_has_zero_coefficients() {
        let p = Problem::new(Manifold::Interval { length: 1.0 }, Extension::neumann()).unwrap();
        let data = CauchyData::zero();
        let basis = Basis::for_data(&p, &[&data], BasisOptions::default()).unwrap();
        let mc = basis.project(&data).unwrap();
        assert!(mc.state.c.iter().chain(&mc.state.d).all(|c| c.norm() == 0.0));
    }

    #[test]
    fn bump_truncation_meets_tolerance() {
        let p = Problem::new(Manifold::Interval { length: 1.0 }, Extension::IntervalDirichlet).unwrap();
        let b = make_bump(0.5, 0.1, 1.0);
        let data = CauchyData::new(&p.manifold, Profile::bump(b), Profile::zero()).unwrap();
        let basis = Basis::for_data(&p, &[&data], BasisOptions::default()).unwrap();
        let r = &basis.reports()[0];
        assert!(!r.capped && r.parseval_defect < 1e-8, "{r:?}");
        assert!(r.eigenmodes < 512);
    }

    #[test]
    fn half_line_parseval() {
        let p = Problem::new(Manifold::HalfLine, Extension::robin(-0.6)).unwrap();
        let b = make_bump(1.5, 0.5, 1.0);
        let data = CauchyData::new(&p.manifold, Profile::bump(b), Profile::zero()).unwrap();
        let basis = Basis::for_data(&p, &[&data], BasisOptions::default()).unwrap();
        let mc = basis.project(&data).unwrap();
        assert!(mc.parseval_defect < 1e-8, "{}", mc.parseval_defect);
    }
}
