//! Bracketed root isolation for smooth real functions with exact derivatives.
//!
//! The scan samples `f` and `f'` on a uniform grid. Critical points of `f`
//! split each cell into monotone pieces, so a pair of nearly coincident roots
//! inside one cell is still separated, and a critical point where `f` itself
//! vanishes is reported as a double root.

use super::dual::Dual;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// True when the root coincides with a critical point of `f`.
    pub double: bool,
}

/// `f` maps a dual variable to a dual value; `scale(x)` is the magnitude
/// against which `|f(x)|` is judged zero at a critical point.
pub struct ScanConfig {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    /// Relative zero threshold at critical points.
    pub double_tol: f64,
    /// Stop once this many roots (counting doubles twice) were found.
    pub max_roots: usize,
}

pub fn scan_roots<F, S>(f: F, scale: S, cfg: &ScanConfig) -> Vec<Root>
where
    F: Fn(Dual) -> Dual,
    S: Fn(f64) -> f64,
{
    let mut roots = Vec::new();
    if !(cfg.hi > cfg.lo) {
        return roots;
    }
    let cells = ((cfg.hi - cfg.lo) / cfg.step).ceil().max(1.0) as usize;
    let width = (cfg.hi - cfg.lo) / cells as f64;
    let eval = |x: f64| f(Dual::variable(x));
    let mut count = 0usize;
    let mut left = eval(cfg.lo);
    let mut left_x = cfg.lo;
    if left.v == 0.0 {
        push(&mut roots, &mut count, left_x, is_flat(left, scale(left_x), cfg.double_tol));
    }
    for i in 1..=cells {
        if count >= cfg.max_roots {
            break;
        }
        let right_x = if i == cells { cfg.hi } else { cfg.lo + i as f64 * width };
        let right = eval(right_x);
        // Split at a critical point when the derivative changes sign.
        let mut pieces = vec![(left_x, left)];
        if left.d.signum() != right.d.signum() && left.d != 0.0 && right.d != 0.0 {
            let c = bisect(|x| eval(x).d, left_x, right_x, left.d);
            let fc = eval(c);
            let sc = scale(c);
            if fc.v.abs() <= cfg.double_tol * sc && left.v.signum() == right.v.signum() {
                // Touches zero without crossing: double root.
                push(&mut roots, &mut count, c, true);
                left = right;
                left_x = right_x;
                if right.v == 0.0 {
                    push(&mut roots, &mut count, right_x, false);
                }
                continue;
            }
            pieces.push((c, fc));
        }
        pieces.push((right_x, right));
        for w in pieces.windows(2) {
            let (a, fa) = w[0];
            let (b, fb) = w[1];
            if b == right_x && fb.v == 0.0 {
                continue;
            }
            if fb.v == 0.0 {
                push(&mut roots, &mut count, b, false);
            } else if fa.v != 0.0 && fa.v.signum() != fb.v.signum() {
                let x = refine(&eval, a, b, fa.v);
                push(&mut roots, &mut count, x, false);
            }
        }
        if right.v == 0.0 {
            push(&mut roots, &mut count, right_x, is_flat(right, scale(right_x), cfg.double_tol));
        }
        left = right;
        left_x = right_x;
    }
    roots
}

fn is_flat(f: Dual, scale: f64, tol: f64) -> bool {
    f.d.abs() <= tol.sqrt() * scale
}

fn push(roots: &mut Vec<Root>, count: &mut usize, x: f64, double: bool) {
    *count += if double { 2 } else { 1 };
    roots.push(Root { x, double });
}

/// Bisection on a sign change of `g` over `[a, b]`, `ga = g(a)`.
pub fn bisect<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, ga: f64) -> f64 {
    let sa = ga.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Bisection to machine resolution followed by one Newton polish that is
/// kept only if it stays inside the final bracket.
fn refine<F: Fn(f64) -> Dual>(f: &F, a: f64, b: f64, fa: f64) -> f64 {
    let x = bisect(|x| f(x).v, a, b, fa);
    let fx = f(x);
    if fx.d != 0.0 {
        let polished = x - fx.v / fx.d;
        if polished >= a && polished <= b && f(polished).v.abs() <= fx.v.abs() {
            return polished;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(lo: f64, hi: f64, step: f64) -> ScanConfig {
        ScanConfig { lo, hi, step, double_tol: 1e-10, max_roots: usize::MAX }
    }

    #[test]
    fn finds_simple_roots_of_sine() {
        let roots = scan_roots(|x| x.sin(), |_| 1.0, &cfg(0.5, 10.0, 0.3));
        let xs: Vec<f64> = roots.iter().map(|r| r.x).collect();
        assert_eq!(xs.len(), 3);
        for (x, k) in xs.iter().zip(1..) {
            assert!((x - k as f64 * std::f64::consts::PI).abs() < 1e-14);
        }
        assert!(roots.iter().all(|r| !r.double));
    }

    #[test]
    fn detects_double_roots() {
        // 1 - cos x has double roots at multiples of 2 pi.
        let roots = scan_roots(|x| Dual::constant(1.0) - x.cos(), |_| 2.0, &cfg(0.5, 20.0, 0.2));
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(|r| r.double));
        assert!((roots[0].x - 2.0 * std::f64::consts::PI).abs() < 1e-7);
    }

    #[test]
    fn separates_close_pair_inside_one_cell() {
        let (r1, r2) = (1.0, 1.0 + 1e-5);
        let f = |x: Dual| (x - r1) * (x - r2);
        let roots = scan_roots(f, |_| 1.0, &cfg(0.0, 3.0, 0.5));
        assert_eq!(roots.len(), 2);
        assert!((roots[0].x - r1).abs() < 1e-13 && (roots[1].x - r2).abs() < 1e-13);
    }

    #[test]
    fn respects_root_budget() {
        let mut c = cfg(0.5, 100.0, 0.3);
        c.max_roots = 4;
        let roots = scan_roots(|x| x.sin(), |_| 1.0, &c);
        assert_eq!(roots.len(), 4);
    }
}
