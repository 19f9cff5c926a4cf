//! Scenario files.

use kgsae::extension::complex_serde;
use kgsae::geometry::Piece;
use kgsae::{BasisOptions, CauchyData, Extension, FdGrid, Manifold, Point, Problem, Profile, SpatialSet, Term};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A configuration error, located by the path of the offending field.
#[derive(Debug, Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

fn at(path: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError { path: path.into(), message: message.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Spectral,
    Fd,
    Both,
}

impl SolverKind {
    pub fn spectral(self) -> bool {
        matches!(self, SolverKind::Spectral | SolverKind::Both)
    }

    pub fn fd(self) -> bool {
        matches!(self, SolverKind::Fd | SolverKind::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default)]
    pub phi0: Vec<Term>,
    #[serde(default)]
    pub phidot0: Vec<Term>,
    /// Declared support `K`; defaults to the union of the bump supports.
    #[serde(default)]
    pub support: Option<Vec<Piece>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid { start: 0.0, end: 1.0, steps: 10 }
    }
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let dt = (self.end - self.start) / self.steps as f64;
        (0..=self.steps).map(|i| if i == self.steps { self.end } else { self.start + i as f64 * dt }).collect()
    }

    pub fn horizon(&self) -> f64 {
        self.start.abs().max(self.end.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceGrid {
    /// Distance between snapshot points.
    pub spacing: f64,
    /// How far along each half-line snapshots go; by default past the
    /// data support by the time horizon plus one.
    #[serde(default)]
    pub half_line_extent: Option<f64>,
}

impl Default for SpaceGrid {
    fn default() -> Self {
        SpaceGrid { spacing: 1.0 / 64.0, half_line_extent: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    #[serde(default)]
    pub modes: Option<usize>,
    pub max_modes: usize,
    pub tolerance: f64,
    pub k_cap: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        let d = BasisOptions::default();
        Truncation { modes: d.modes, max_modes: d.max_modes, tolerance: d.tolerance, k_cap: d.k_cap }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdConfig {
    pub h: f64,
    pub courant: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { h: 1.0 / 512.0, courant: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Number of eigenmodes listed, with multiplicity.
    pub count: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig { count: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreensConfig {
    #[serde(with = "complex_serde")]
    pub lambda: Complex64,
    /// Grid points per component for the kernel table.
    pub points: usize,
}

impl Default for GreensConfig {
    fn default() -> Self {
        GreensConfig { lambda: Complex64::new(-1.0, 0.5), points: 21 }
    }
}

/// Everything a run needs, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub manifold: Manifold,
    pub extension: Extension,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub time: TimeGrid,
    #[serde(default)]
    pub space: SpaceGrid,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default)]
    pub fd: FdConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub greens: GreensConfig,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub problem: Problem,
    pub data: CauchyData,
    pub times: Vec<f64>,
    pub points: Vec<Point>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            at(path, e.into_inner().message().trim())
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    pub fn basis_options(&self) -> BasisOptions {
        BasisOptions {
            modes: self.truncation.modes,
            max_modes: self.truncation.max_modes,
            tolerance: self.truncation.tolerance,
            horizon: self.time.horizon(),
            k_cap: self.truncation.k_cap,
        }
    }

    pub fn fd_grid(&self) -> Result<FdGrid, ConfigError> {
        FdGrid::with_courant(self.fd.h, self.fd.courant).map_err(|e| at("fd", e))
    }

    pub fn validate(&self) -> Result<Scenario, ConfigError> {
        let problem = Problem::new(self.manifold, self.extension.clone()).map_err(|e| at("extension", e))?;
        let m = &problem.manifold;
        for (field, terms) in [("data.phi0", &self.data.phi0), ("data.phidot0", &self.data.phidot0)] {
            for (i, term) in terms.iter().enumerate() {
                check_term(m, term).map_err(|e| at(format!("{field}[{i}]"), e))?;
            }
        }
        let phi0 = Profile { terms: self.data.phi0.clone() };
        let phidot0 = Profile { terms: self.data.phidot0.clone() };
        let mut data = CauchyData::new(m, phi0, phidot0).map_err(|e| at("data", e))?;
        if let Some(pieces) = &self.data.support {
            let k = SpatialSet::new(m, pieces.iter().copied()).map_err(|e| at("data.support", e))?;
            data = data.with_support(m, k).map_err(|e| at("data.support", e))?;
        }
        let t = &self.time;
        if !(t.start.is_finite() && t.end.is_finite()) || t.steps == 0 {
            return Err(at("time", "need finite start and end and at least one step"));
        }
        let tr = &self.truncation;
        if !(tr.tolerance > 0.0 && tr.tolerance < 1.0) {
            return Err(at("truncation.tolerance", format!("must lie in (0, 1), got {}", tr.tolerance)));
        }
        if tr.max_modes == 0 || tr.modes == Some(0) {
            return Err(at("truncation", "mode counts must be positive"));
        }
        if !(self.space.spacing > 0.0) {
            return Err(at("space.spacing", format!("must be positive, got {}", self.space.spacing)));
        }
        if let Some(e) = self.space.half_line_extent {
            if !(e > 0.0 && e.is_finite()) {
                return Err(at("space.half_line_extent", format!("must be positive, got {e}")));
            }
        }
        self.fd_grid()?;
        if self.greens.points < 2 {
            return Err(at("greens.points", "need at least two points"));
        }
        let points = self.snapshot_points(&problem, &data);
        Ok(Scenario { config: self.clone(), problem, data, times: t.times(), points })
    }

    /// How far snapshots extend along a half-line.
    pub fn half_line_extent(&self, data: &CauchyData) -> f64 {
        self.space.half_line_extent.unwrap_or_else(|| {
            let reach = data.support().map(|k| k.pieces().iter().map(|p| p.hi).fold(0.0, f64::max)).unwrap_or(1.0);
            reach + self.time.horizon() + 1.0
        })
    }

    fn snapshot_points(&self, problem: &Problem, data: &CauchyData) -> Vec<Point> {
        let m = &problem.manifold;
        let h = self.space.spacing;
        let mut out = Vec::new();
        for c in 0..m.component_count() {
            let (lo, hi) = m.closure(c).expect("component exists");
            let (hi, closed) = match *m {
                Manifold::Circle { .. } => (hi, false),
                _ if hi.is_finite() => (hi, true),
                _ => (lo + self.half_line_extent(data), true),
            };
            let n = ((hi - lo) / h).round().max(1.0) as usize;
            let last = if closed { n } else { n - 1 };
            out.extend((0..=last).map(|i| Point::new(c, if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })));
        }
        out
    }
}

fn check_term(m: &Manifold, term: &Term) -> kgsae::Result<()> {
    match term {
        Term::Bump(b) | Term::Slope(b) => b.validate(m),
        Term::Mode { component, .. } => m.closure(*component).map(|_| ()),
    }
}

/// Shipped scenarios, one per worked example of the extension catalog.
pub const PRESETS: &[(&str, &str)] = &[
    ("circle", include_str!("../presets/circle.toml")),
    ("circle_mass_shift", include_str!("../presets/circle_mass_shift.toml")),
    ("interval_dirichlet", include_str!("../presets/interval_dirichlet.toml")),
    ("interval_neumann", include_str!("../presets/interval_neumann.toml")),
    ("interval_first_kind", include_str!("../presets/interval_first_kind.toml")),
    ("interval_second_kind_periodic", include_str!("../presets/interval_second_kind_periodic.toml")),
    ("half_line_robin", include_str!("../presets/half_line_robin.toml")),
    ("half_line_robin_bound_state", include_str!("../presets/half_line_robin_bound_state.toml")),
    ("direct_sum_half_lines", include_str!("../presets/direct_sum_half_lines.toml")),
    ("nonlocal_counterexample", include_str!("../presets/nonlocal_counterexample.toml")),
];

pub fn preset(name: &str) -> Result<ScenarioConfig, ConfigError> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| at("preset", format!("unknown preset {name:?}; known: {}", preset_names().join(", "))))?;
    ScenarioConfig::from_toml(text)
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in preset_names() {
            let cfg = preset(name).unwrap();
            assert_eq!(cfg.name, name);
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn errors_carry_field_paths() {
        let text = "[manifold]\nkind = \"interval\"\nlength = 1.0\n[extension]\nkind = \"half_line_robin\"\nalpha = 0.1\n";
        assert_eq!(ScenarioConfig::from_toml(text).unwrap().validate().unwrap_err().path, "extension");
        let text = "[manifold]\nkind = \"interval\"\nlength = \"one\"\n[extension]\nkind = \"interval_dirichlet\"\n";
        assert_eq!(ScenarioConfig::from_toml(text).unwrap_err().path, "manifold");
        let text = "[manifold]\nkind = \"interval\"\nlength = 1.0\n[extension]\nkind = \"interval_dirichlet\"\n\
                    [data]\nphi0 = [{ kind = \"bump\", center = 0.95, halfwidth = 0.1, amplitude = 1.0 }]\n";
        assert_eq!(ScenarioConfig::from_toml(text).unwrap().validate().unwrap_err().path, "data.phi0[0]");
    }

    #[test]
    fn toml_round_trip_is_exact() {
        for name in preset_names() {
            let cfg = preset(name).unwrap();
            assert_eq!(ScenarioConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        }
    }

    #[test]
    fn time_grid_ends_exactly() {
        let t = TimeGrid { start: 0.0, end: 0.7, steps: 7 }.times();
        assert_eq!(t.len(), 8);
        assert_eq!(t[7], 0.7);
    }
}
