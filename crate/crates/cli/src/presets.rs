//! Canned scenarios reproducing the reference figures.
//!
//! Each preset is an ordinary scenario file, so running its text through
//! [`crate::run::run_config`] gives the same bytes as the preset.

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::report::ReportTable;
use crate::run::{run_scenario, Report};

pub const PRESET_NAMES: [&str; 7] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

const PRESETS: [(&str, &str); 7] = [
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig6", include_str!("../presets/fig6.toml")),
    ("fig7", include_str!("../presets/fig7.toml")),
    ("fig8", include_str!("../presets/fig8.toml")),
];

/// Scenario text of a preset.
pub fn preset_config(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| CliError::UnknownPreset {
            name: name.to_string(),
            valid: &PRESET_NAMES,
        })
}

pub fn preset_report(name: &str) -> Result<Report> {
    let config = ScenarioConfig::from_toml(preset_config(name)?)?;
    run_scenario(&config.validate()?)
}

/// The single table a preset produces.
pub fn run_preset(name: &str) -> Result<ReportTable> {
    let mut report = preset_report(name)?;
    Ok(report.tables.remove(0))
}
