//! Point spectra, eigenfunctions, resolvent kernels and the continuum of the
//! half-line extensions.

pub mod condition;
pub mod continuum;
pub mod greens;
pub mod modes;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{Base, Block, Problem};
use crate::numeric::dual::Dual;
use crate::numeric::roots::{scan_roots, ScanConfig};

pub use condition::eigenvalue_condition;
pub use continuum::{continuum_density, continuum_density_exact, generalized_eigenfunction};
pub use greens::{greens_function, greens_function_with_root, resolvent_apply, Source};
pub use modes::{Mode, ModeShape, Parity};

/// An eigenvalue with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub multiplicity: usize,
}

/// An eigenvalue with an orthonormal basis of its eigenspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub lambda: f64,
    pub modes: Vec<Mode>,
}

impl Eigenpair {
    pub fn multiplicity(&self) -> usize {
        self.modes.len()
    }
}

/// The continuous part `[μ, ∞)` carried by half-line components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumPart {
    pub component: usize,
    pub alpha: f64,
    pub mu: f64,
}

/// Discrete spectrum (sorted, strictly increasing) and the continuum, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub discrete: Vec<Eigenpair>,
    pub continuum: Vec<ContinuumPart>,
}

impl SpectralData {
    /// All eigenmodes in eigenvalue order, multiplicities expanded.
    pub fn modes(&self) -> impl Iterator<Item = &Mode> {
        self.discrete.iter().flat_map(|e| e.modes.iter())
    }

    pub fn mode_count(&self) -> usize {
        self.discrete.iter().map(Eigenpair::multiplicity).sum()
    }

    pub fn infimum(&self) -> Option<f64> {
        let d = self.discrete.first().map(|e| e.lambda);
        let c = self.continuum.iter().map(|c| c.mu).reduce(f64::min);
        match (d, c) {
            (Some(d), Some(c)) => Some(d.min(c)),
            (d, c) => d.or(c),
        }
    }
}

/// Search window for [`find_eigenvalues`]: `max_count` counts modes, with
/// multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub max_count: usize,
}

impl Window {
    pub fn new(lambda_min: f64, lambda_max: f64, max_count: usize) -> Self {
        Window { lambda_min, lambda_max, max_count }
    }

    /// The lowest `count` modes.
    pub fn lowest(count: usize) -> Self {
        Window { lambda_min: f64::NEG_INFINITY, lambda_max: f64::INFINITY, max_count: count }
    }
}

/// Step of the scan in `s = √λ`, relative to `π/a`.
const S_STEP: f64 = 1.0 / 8.0;
/// Step of the scan in `κ = √-λ`, in units of `1/a` (capped at 0.05).
const KAPPA_STEP: f64 = 0.05;
/// Smallest root of the scan variable that is resolved; closer to zero the
/// conditions are dominated by the zero-eigenvalue criterion.
const ROOT_FLOOR: f64 = 1e-6;
const DOUBLE_TOL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-12;

/// Largest number of negative eigenvalues (with multiplicity) a block can
/// have: the deficiency index of the underlying symmetric operator.
fn negative_bound(base: &Base) -> usize {
    match base {
        Base::Circle { .. } => 0,
        Base::Robin { .. } => 1,
        _ => 2,
    }
}

/// Upper end of the `κ` range that can hold a negative eigenvalue when the
/// caller does not bound it.
fn kappa_ceiling(base: &Base) -> f64 {
    let a = base.length().unwrap_or(1.0);
    let size = match *base {
        Base::FirstKind { theta11, theta22, theta12, .. } => {
            theta11.abs() + theta22.abs() + 2.0 * theta12.norm()
        }
        Base::SecondKind { theta, .. } => theta.abs(),
        _ => 0.0,
    };
    50.0 / a + 4.0 * size
}

/// Eigenvalues of one block in `[lo, hi]` of the unshifted operator.
fn block_eigenvalues(block: &Block, lo: f64, hi: f64, max_count: usize) -> Result<Vec<Eigenvalue>> {
    let mut out = Vec::new();
    if max_count == 0 || lo > hi {
        return Ok(out);
    }
    match block.base {
        Base::Circle { circumference } => {
            let mut n: u64 = if lo > 0.0 { (lo.sqrt() * circumference / (2.0 * PI)).floor() as u64 } else { 0 };
            let mut count = 0;
            loop {
                let lambda = (2.0 * PI * n as f64 / circumference).powi(2);
                if lambda > hi || count >= max_count {
                    break;
                }
                if lambda >= lo {
                    let multiplicity = if n == 0 { 1 } else { 2 };
                    out.push(Eigenvalue { lambda, multiplicity });
                    count += multiplicity;
                }
                n += 1;
            }
        }
        Base::Robin { alpha } => {
            if alpha < 0.0 {
                let kappa = -1.0 / alpha.tan();
                let lambda = -kappa * kappa;
                if lambda >= lo && lambda <= hi {
                    out.push(Eigenvalue { lambda, multiplicity: 1 });
                }
            }
        }
        _ => interval_eigenvalues(&block.base, lo, hi, max_count, &mut out)?,
    }
    let negatives: usize = out.iter().filter(|e| e.lambda < 0.0).map(|e| e.multiplicity).sum();
    let bound = negative_bound(&block.base);
    if negatives > bound {
        return Err(Error::NegativeBoundExceeded { count: negatives, bound });
    }
    Ok(out)
}

fn roots_to_eigenvalues(roots: &[crate::numeric::roots::Root], to_lambda: impl Fn(f64) -> f64) -> Vec<Eigenvalue> {
    roots
        .iter()
        .map(|r| Eigenvalue { lambda: to_lambda(r.x), multiplicity: if r.double { 2 } else { 1 } })
        .collect()
}

fn interval_eigenvalues(base: &Base, lo: f64, hi: f64, max_count: usize, out: &mut Vec<Eigenvalue>) -> Result<()> {
    let a = base.length().expect("interval");
    let mut count = 0usize;
    // Negative axis, scanned in κ; κ decreasing means λ increasing.
    if lo < 0.0 {
        let k_hi = if lo.is_finite() { (-lo).sqrt() } else { kappa_ceiling(base) };
        let k_lo = if hi < 0.0 { (-hi).sqrt() } else { ROOT_FLOOR / a };
        let cfg = ScanConfig {
            lo: k_lo,
            hi: k_hi,
            step: KAPPA_STEP.min(KAPPA_STEP / a),
            double_tol: DOUBLE_TOL,
            max_roots: usize::MAX,
        };
        let roots = scan_roots(|k: Dual| condition::char_negative_scaled(base, k), |k| condition::term_scale(base, k), &cfg);
        let mut neg = roots_to_eigenvalues(&roots, |k| -k * k);
        neg.reverse();
        let found: usize = neg.iter().map(|e| e.multiplicity).sum();
        if found > negative_bound(base) {
            return Err(Error::NegativeBoundExceeded { count: found, bound: negative_bound(base) });
        }
        for e in neg {
            if count >= max_count {
                return Ok(());
            }
            count += e.multiplicity;
            out.push(e);
        }
    }
    if lo <= 0.0 && hi >= 0.0 && count < max_count {
        let crit = condition::zero_criterion(base);
        if crit.abs() <= ZERO_TOL * condition::zero_scale(base) {
            let block = Block { component: 0, base: *base, mu: 0.0 };
            let multiplicity = modes::block_modes(&block, 0.0)?.len();
            count += multiplicity;
            out.push(Eigenvalue { lambda: 0.0, multiplicity });
        }
    }
    if hi <= 0.0 || count >= max_count {
        return Ok(());
    }
    let step = S_STEP * PI / a;
    let mut s_lo = if lo > 0.0 { lo.sqrt() } else { ROOT_FLOOR / a };
    let s_end = hi.sqrt();
    // Scan in chunks so an unbounded window stops once enough modes are found.
    let chunk = 64.0 * PI / a;
    while count < max_count && s_lo < s_end {
        let s_hi = (s_lo + chunk).min(s_end);
        let cfg = ScanConfig { lo: s_lo, hi: s_hi, step, double_tol: DOUBLE_TOL, max_roots: max_count - count };
        let roots = scan_roots(|s: Dual| condition::char_positive(base, s), |s| condition::term_scale(base, s), &cfg);
        for e in roots_to_eigenvalues(&roots, |s| s * s) {
            // A root exactly on a chunk edge is reported by both chunks.
            if out.last().map_or(false, |l: &Eigenvalue| l.lambda == e.lambda) {
                continue;
            }
            count += e.multiplicity;
            out.push(e);
        }
        s_lo = s_hi;
    }
    Ok(())
}

/// Sorted eigenvalues in `[lambda_min, lambda_max]`, stopping after
/// `max_count` modes. Direct sums return the merged union of the summands'
/// spectra.
pub fn find_eigenvalues(problem: &Problem, window: Window) -> Result<Vec<Eigenvalue>> {
    if !(window.lambda_min < window.lambda_max) {
        return Err(Error::InvalidExtension(format!(
            "empty search window [{}, {}]",
            window.lambda_min, window.lambda_max
        )));
    }
    let mut all = Vec::new();
    for b in problem.blocks() {
        let found = block_eigenvalues(&b, window.lambda_min - b.mu, window.lambda_max - b.mu, window.max_count)?;
        all.extend(found.into_iter().map(|e| Eigenvalue { lambda: e.lambda + b.mu, ..e }));
    }
    all.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
    let mut merged: Vec<Eigenvalue> = Vec::with_capacity(all.len());
    for e in all {
        match merged.last_mut() {
            Some(last) if last.lambda == e.lambda => last.multiplicity += e.multiplicity,
            _ => merged.push(e),
        }
    }
    let mut count = 0;
    merged.retain(|e| {
        let keep = count < window.max_count;
        count += e.multiplicity;
        keep
    });
    Ok(merged)
}

/// Orthonormal eigenfunctions for an eigenvalue of the problem.
pub fn eigenfunction(problem: &Problem, lambda: f64) -> Result<Vec<Mode>> {
    let mut modes = Vec::new();
    let mut best = f64::INFINITY;
    for b in problem.blocks() {
        match modes::block_modes(&b, lambda - b.mu) {
            Ok(m) => modes.extend(m),
            Err(Error::NotAnEigenvalue { residual, .. }) => best = best.min(residual),
            Err(e) => return Err(e),
        }
    }
    if modes.is_empty() {
        return Err(Error::NotAnEigenvalue { lambda, residual: best });
    }
    Ok(modes)
}

/// Eigenvalues and eigenmodes in a window, plus the continuum descriptor.
/// Multiplicities are those of the computed eigenspaces.
pub fn spectrum(problem: &Problem, window: Window) -> Result<SpectralData> {
    let blocks = problem.blocks();
    let mut pairs = Vec::new();
    for b in &blocks {
        let found = block_eigenvalues(b, window.lambda_min - b.mu, window.lambda_max - b.mu, window.max_count)?;
        for e in found {
            pairs.push(Eigenpair { lambda: e.lambda + b.mu, modes: modes::block_modes(b, e.lambda)? });
        }
    }
    pairs.sort_by(|x, y| x.lambda.total_cmp(&y.lambda).then(x.modes[0].component.cmp(&y.modes[0].component)));
    let mut discrete: Vec<Eigenpair> = Vec::with_capacity(pairs.len());
    let mut count = 0;
    for p in pairs {
        if count >= window.max_count {
            break;
        }
        count += p.modes.len();
        match discrete.last_mut() {
            Some(last) if last.lambda == p.lambda => last.modes.extend(p.modes),
            _ => discrete.push(p),
        }
    }
    let continuum = blocks
        .iter()
        .filter_map(|b| match b.base {
            Base::Robin { alpha } => Some(ContinuumPart { component: b.component, alpha, mu: b.mu }),
            _ => None,
        })
        .collect();
    Ok(SpectralData { discrete, continuum })
}

/// The lowest eigenpairs of one block, at least `count` modes unless the
/// block has fewer, never splitting an eigenspace.
pub(crate) fn block_spectrum(block: &Block, count: usize) -> Result<Vec<Eigenpair>> {
    let found = block_eigenvalues(block, f64::NEG_INFINITY, f64::INFINITY, count)?;
    found
        .into_iter()
        .map(|e| Ok(Eigenpair { lambda: e.lambda + block.mu, modes: modes::block_modes(block, e.lambda)? }))
        .collect()
}

/// Spectral classification of an extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Spectrum in `[0, ∞)`.
    Positive,
    /// Spectrum bounded below but with negative points.
    BoundedBelow,
    /// Acceptable (as an orthogonal sum of bounded-below pieces) but with
    /// spectrum unbounded below.
    AcceptableUnboundedBelow,
}

/// Lowest point of the spectrum of a single block.
fn block_infimum(b: &Block) -> Result<f64> {
    let lowest = block_eigenvalues(b, f64::NEG_INFINITY, f64::INFINITY, 1)?;
    let continuum = matches!(b.base, Base::Robin { .. }).then_some(0.0);
    let d = lowest.first().map(|e| e.lambda);
    let inf = match (d, continuum) {
        (Some(d), Some(c)) => d.min(c),
        (d, c) => d.or(c).unwrap_or(0.0),
    };
    Ok(inf + b.mu)
}

/// Every extension in the catalog, and every finite orthogonal sum of them,
/// is bounded below; it is positive when no spectral point is negative.
pub fn classify(problem: &Problem) -> Result<Classification> {
    let inf = spectral_infimum(problem)?;
    Ok(if inf >= 0.0 { Classification::Positive } else { Classification::BoundedBelow })
}

/// `inf σ(A)`.
pub fn spectral_infimum(problem: &Problem) -> Result<f64> {
    problem.blocks().iter().try_fold(f64::INFINITY, |acc, b| Ok(acc.min(block_infimum(b)?)))
}

/// Trend of the spectral infimum over a family of growing truncations of an
/// infinite orthogonal sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationTrend {
    pub sizes: Vec<usize>,
    pub infima: Vec<f64>,
    pub classification: Classification,
}

/// Classifies the limit of a sequence of truncations. The limit is reported
/// unbounded below when the infima decrease strictly and the decrements do
/// not shrink, i.e. the sequence shows no sign of converging.
pub fn classify_truncations(family: &[(usize, Problem)]) -> Result<TruncationTrend> {
    let sizes: Vec<usize> = family.iter().map(|(n, _)| *n).collect();
    let infima = family.iter().map(|(_, p)| spectral_infimum(p)).collect::<Result<Vec<_>>>()?;
    let steps: Vec<f64> = infima.windows(2).map(|w| w[0] - w[1]).collect();
    let diverging = steps.len() >= 2
        && steps.iter().all(|&d| d > 0.0)
        && steps.windows(2).all(|w| w[1] >= w[0]);
    let classification = if diverging {
        Classification::AcceptableUnboundedBelow
    } else if infima.iter().all(|&v| v >= 0.0) {
        Classification::Positive
    } else {
        Classification::BoundedBelow
    };
    Ok(TruncationTrend { sizes, infima, classification })
}
