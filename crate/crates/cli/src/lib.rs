//! Scenario files, run orchestration and deterministic outputs for the
//! `kgsae` command-line tool.

pub mod config;
pub mod output;
pub mod run;
pub mod verify;

pub use config::{preset, preset_names, ConfigError, Scenario, ScenarioConfig, SolverKind};
pub use run::{greens_table, simulate, spectrum_report, SimulateSummary};
pub use verify::{check_eigenvalues, run_verify, Check, Report};
