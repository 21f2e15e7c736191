//! Scenario runner for `wpt-coop-core`: TOML scenarios in, CSV tables out.
//!
//! [`presets`] holds the canned figure scenarios, [`config`] parses and
//! validates scenario files, [`run`] executes them and [`report`] writes the
//! resulting tables.

pub mod config;
pub mod error;
pub mod presets;
pub mod report;
pub mod run;

pub use config::ScenarioConfig;
pub use error::{CliError, Result};
pub use presets::{preset_config, preset_report, run_preset, PRESET_NAMES};
pub use report::ReportTable;
pub use run::{run_config, run_scenario, Report};
