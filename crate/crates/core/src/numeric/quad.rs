//! Composite Gauss-Legendre quadrature.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

/// Nodes per panel used throughout the crate.
pub const NODES_PER_PANEL: usize = 32;

/// Reference nodes and weights on [-1, 1].
pub fn reference_rule(n: usize) -> &'static [(f64, f64)] {
    static RULE16: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static RULE32: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let build = |n: usize| {
        let mut pairs = GaussLegendre::new(n)
            .expect("Gauss-Legendre degree >= 2")
            .as_node_weight_pairs()
            .to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    };
    match n {
        16 => RULE16.get_or_init(|| build(16)),
        32 => RULE32.get_or_init(|| build(32)),
        _ => panic!("unsupported Gauss-Legendre order {n}"),
    }
}

/// A quadrature rule: sorted nodes with positive weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Composite rule over `[lo, hi]` with panels no wider than `max_width`.
    pub fn composite(lo: f64, hi: f64, max_width: f64, order: usize) -> Rule {
        let mut rule = Rule::default();
        rule.push_composite(lo, hi, max_width, order);
        rule
    }

    /// Same as [`Rule::composite`] but also splits at every breakpoint inside
    /// the range, so kinks of the integrand sit on panel edges.
    pub fn composite_with_breaks(
        lo: f64,
        hi: f64,
        breaks: &[f64],
        max_width: f64,
        order: usize,
    ) -> Rule {
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut rule = Rule::default();
        let mut left = lo;
        for c in cuts.into_iter().chain(std::iter::once(hi)) {
            rule.push_composite(left, c, max_width, order);
            left = c;
        }
        rule
    }

    fn push_composite(&mut self, lo: f64, hi: f64, max_width: f64, order: usize) {
        if hi <= lo {
            return;
        }
        let panels = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let width = (hi - lo) / panels as f64;
        let reference = reference_rule(order);
        self.nodes.reserve(panels * order);
        self.weights.reserve(panels * order);
        for p in 0..panels {
            let a = lo + p as f64 * width;
            let half = 0.5 * width;
            let mid = a + half;
            for &(x, w) in reference {
                self.nodes.push(mid + half * x);
                self.weights.push(half * w);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn extend(&mut self, other: Rule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }
}
