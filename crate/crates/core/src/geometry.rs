//! Flat metric geometry of the one-dimensional base manifolds and the causal
//! calculus built on it: closed neighborhoods, causal slices, the compactness
//! horizon `t_infinity` and its ladder.
//!
//! With unit lapse the slices of the static spacetime are isometric to the
//! base, so `J(K)` restricted to the slice at time `t` is the closed
//! neighborhood `C(K, |t|)` whenever the latter is compact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The spatial manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Manifold {
    Circle { circumference: f64 },
    HalfLine,
    Interval { length: f64 },
    DisjointHalfLines { count: usize },
}

impl Manifold {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Manifold::Circle { circumference: l } if !(l > 0.0 && l.is_finite()) => {
                Err(Error::InvalidManifold(format!("circumference must be positive, got {l}")))
            }
            Manifold::Interval { length: a } if !(a > 0.0 && a.is_finite()) => {
                Err(Error::InvalidManifold(format!("interval length must be positive, got {a}")))
            }
            Manifold::DisjointHalfLines { count: 0 } => {
                Err(Error::InvalidManifold("a disjoint union needs at least one half-line".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn component_count(&self) -> usize {
        match *self {
            Manifold::DisjointHalfLines { count } => count,
            _ => 1,
        }
    }

    /// Coordinate range `[lo, hi]` of the closure of a component.
    pub fn closure(&self, component: usize) -> Result<(f64, f64)> {
        let count = self.component_count();
        if component >= count {
            return Err(Error::NoSuchComponent { component, count });
        }
        Ok(match *self {
            Manifold::Circle { circumference } => (0.0, circumference),
            Manifold::Interval { length } => (0.0, length),
            Manifold::HalfLine | Manifold::DisjointHalfLines { .. } => (0.0, f64::INFINITY),
        })
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, Manifold::Circle { .. })
    }

    /// Whether the manifold is complete, i.e. has no boundary to run into.
    pub fn is_complete(&self) -> bool {
        self.is_circle()
    }

    pub fn name(&self) -> String {
        match *self {
            Manifold::Circle { circumference } => format!("circle(L={circumference})"),
            Manifold::HalfLine => "half-line".into(),
            Manifold::Interval { length } => format!("interval(a={length})"),
            Manifold::DisjointHalfLines { count } => format!("{count} disjoint half-lines"),
        }
    }
}

/// A point of the manifold: a component index and a coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub component: usize,
    pub x: f64,
}

impl Point {
    pub const fn new(component: usize, x: f64) -> Self {
        Point { component, x }
    }

    pub const fn on_first(x: f64) -> Self {
        Point { component: 0, x }
    }
}

fn check_in_closure(m: &Manifold, p: Point) -> Result<()> {
    let (lo, hi) = m.closure(p.component)?;
    if p.x.is_nan() || p.x < lo || p.x > hi {
        return Err(Error::NotInterior(format!("point {} outside [{lo}, {hi}]", p.x)));
    }
    Ok(())
}

/// Path distance of the flat metric. Points on different components of a
/// disjoint union are at infinite distance.
pub fn distance(m: &Manifold, p: Point, q: Point) -> Result<f64> {
    check_in_closure(m, p)?;
    check_in_closure(m, q)?;
    if p.component != q.component {
        return Ok(f64::INFINITY);
    }
    let d = (p.x - q.x).abs();
    Ok(match *m {
        Manifold::Circle { circumference } => d.min(circumference - d),
        _ => d,
    })
}

/// A closed interval `[lo, hi]` on one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub component: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Piece {
    pub const fn new(component: usize, lo: f64, hi: f64) -> Self {
        Piece { component, lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, p: Point) -> bool {
        p.component == self.component && p.x >= self.lo && p.x <= self.hi
    }
}

/// Finite union of closed intervals, kept sorted and merged.
///
/// On the circle an arc through the base point is stored as two pieces,
/// `[lo, L]` and `[0, hi]`; `wraps` records that they are one arc.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpatialSet {
    pieces: Vec<Piece>,
    wraps: bool,
}

impl SpatialSet {
    pub fn empty() -> Self {
        SpatialSet::default()
    }

    /// Builds a normalized set, checking each piece lies in the closure of
    /// its component. Circle pieces may extend past `[0, L]`; they are
    /// wrapped.
    pub fn new(m: &Manifold, pieces: impl IntoIterator<Item = Piece>) -> Result<Self> {
        let mut out = Vec::new();
        for p in pieces {
            if !(p.lo <= p.hi) {
                return Err(Error::InvalidManifold(format!(
                    "piece [{}, {}] has lo > hi",
                    p.lo, p.hi
                )));
            }
            let (lo, hi) = m.closure(p.component)?;
            if let Manifold::Circle { circumference: l } = *m {
                out.extend(wrap_arc(p.lo, p.hi, l));
                continue;
            }
            if p.lo < lo || p.hi > hi {
                return Err(Error::NotInterior(format!(
                    "piece [{}, {}] outside [{lo}, {hi}]",
                    p.lo, p.hi
                )));
            }
            out.push(p);
        }
        Ok(Self::normalized(m, out))
    }

    /// A single interval on component 0.
    pub fn interval(m: &Manifold, lo: f64, hi: f64) -> Result<Self> {
        Self::new(m, [Piece::new(0, lo, hi)])
    }

    fn normalized(m: &Manifold, mut pieces: Vec<Piece>) -> Self {
        pieces.sort_by(|a, b| a.component.cmp(&b.component).then(a.lo.total_cmp(&b.lo)));
        let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match merged.last_mut() {
                Some(last) if last.component == p.component && p.lo <= last.hi => {
                    last.hi = last.hi.max(p.hi);
                }
                _ => merged.push(p),
            }
        }
        let wraps = match *m {
            Manifold::Circle { circumference: l } => {
                merged.len() > 1
                    && merged[0].lo == 0.0
                    && merged.last().map_or(false, |p| p.hi == l)
            }
            _ => false,
        };
        SpatialSet { pieces: merged, wraps }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// True on the circle when an arc passes through the base point.
    pub fn wraps(&self) -> bool {
        self.wraps
    }

    pub fn contains(&self, p: Point) -> bool {
        self.pieces.iter().any(|q| q.contains(p))
    }

    pub fn measure(&self) -> f64 {
        self.pieces.iter().map(Piece::len).sum()
    }

    /// `self ⊆ other`, piece by piece.
    pub fn is_subset_of(&self, other: &SpatialSet) -> bool {
        self.pieces.iter().all(|p| {
            other
                .pieces
                .iter()
                .any(|q| q.component == p.component && q.lo <= p.lo && p.hi <= q.hi)
        })
    }

    /// Closure of the complement within each component's range, truncated
    /// at `reach` on unbounded components.
    pub fn complement(&self, m: &Manifold, reach: f64) -> SpatialSet {
        let mut out = Vec::new();
        for c in 0..m.component_count() {
            let (lo, hi) = m.closure(c).expect("component in range");
            let hi = hi.min(reach);
            let mut cursor = lo;
            for p in self.pieces.iter().filter(|p| p.component == c) {
                if p.lo > cursor {
                    out.push(Piece::new(c, cursor, p.lo.min(hi)));
                }
                cursor = cursor.max(p.hi);
            }
            if cursor < hi {
                out.push(Piece::new(c, cursor, hi));
            }
        }
        out.retain(|p| p.hi > p.lo);
        Self::normalized(m, out)
    }

    /// Whether every piece lies strictly inside the open manifold.
    pub fn is_interior(&self, m: &Manifold) -> bool {
        if m.is_circle() {
            return true;
        }
        self.pieces.iter().all(|p| {
            let (lo, hi) = m.closure(p.component).expect("component in range");
            p.lo > lo && p.hi < hi
        })
    }
}

fn wrap_arc(lo: f64, hi: f64, l: f64) -> Vec<Piece> {
    if hi - lo >= l {
        return vec![Piece::new(0, 0.0, l)];
    }
    let shift = (lo / l).floor() * l;
    let (lo, hi) = (lo - shift, hi - shift);
    if hi <= l {
        vec![Piece::new(0, lo, hi)]
    } else {
        vec![Piece::new(0, lo, l), Piece::new(0, 0.0, hi - l)]
    }
}

/// `C(K, t)` clipped to the manifold, and whether it is compact in the open
/// manifold (stays strictly away from every boundary point).
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub set: SpatialSet,
    pub compact: bool,
}

pub fn closed_neighborhood(m: &Manifold, k: &SpatialSet, t: f64) -> Result<Neighborhood> {
    if !(t >= 0.0) {
        return Err(Error::InvalidManifold(format!("neighborhood radius must be >= 0, got {t}")));
    }
    let mut compact = true;
    let mut grown = Vec::with_capacity(k.pieces.len());
    for p in &k.pieces {
        let (lo, hi) = m.closure(p.component)?;
        let (a, b) = (p.lo - t, p.hi + t);
        if m.is_circle() {
            grown.push(Piece::new(p.component, a, b));
            continue;
        }
        if a <= lo || b >= hi {
            compact = false;
        }
        grown.push(Piece::new(p.component, a.max(lo), b.min(hi)));
    }
    Ok(Neighborhood { set: SpatialSet::new(m, grown)?, compact })
}

/// `J(K) ∩ Σ_t`. `exact` is false when `C(K, |t|)` is not compact, in which
/// case the returned set is only the clipped neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalSlice {
    pub set: SpatialSet,
    pub exact: bool,
}

pub fn causal_slice(m: &Manifold, k: &SpatialSet, t: f64) -> Result<CausalSlice> {
    let n = closed_neighborhood(m, k, t.abs())?;
    Ok(CausalSlice { set: n.set, exact: n.compact })
}

/// Supremum of the times for which `J+(K) ∩ Σ_t` stays compact; infinite on
/// the circle.
pub fn t_infinity(m: &Manifold, k: &SpatialSet) -> Result<f64> {
    if !k.is_interior(m) {
        return Err(Error::NotInterior(format!("{:?}", k.pieces)));
    }
    if m.is_complete() {
        return Ok(f64::INFINITY);
    }
    let mut t = f64::INFINITY;
    for p in &k.pieces {
        let (lo, hi) = m.closure(p.component)?;
        t = t.min(p.lo - lo).min(hi - p.hi);
    }
    Ok(t)
}

/// The horizon `t_infinity(K)` with its ladder `t_n = (1 - 2^-n) t_infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausalWindow {
    pub t_infinity: f64,
}

impl CausalWindow {
    pub fn new(m: &Manifold, k: &SpatialSet) -> Result<Self> {
        Ok(CausalWindow { t_infinity: t_infinity(m, k)? })
    }

    /// `t_n`; for an infinite horizon every rung past `t_0` is infinite.
    pub fn ladder(&self, n: u32) -> f64 {
        if n == 0 {
            return 0.0;
        }
        if self.t_infinity.is_infinite() {
            return f64::INFINITY;
        }
        (1.0 - 0.5f64.powi(n as i32)) * self.t_infinity
    }
}

pub fn t_ladder(m: &Manifold, k: &SpatialSet, n: u32) -> Result<f64> {
    Ok(CausalWindow::new(m, k)?.ladder(n))
}

/// Whether `(t, x)` lies in the Cauchy development of the slice at time 0,
/// i.e. whether the ball of radius `|t|` around `x` is compact.
pub fn in_cauchy_development(m: &Manifold, t: f64, x: Point) -> Result<bool> {
    let (lo, hi) = m.closure(x.component)?;
    if m.is_circle() {
        return Ok(true);
    }
    if !(x.x > lo && x.x < hi) {
        return Err(Error::NotInterior(format!("point {} is on the boundary", x.x)));
    }
    Ok(x.x - t.abs() > lo && x.x + t.abs() < hi)
}
