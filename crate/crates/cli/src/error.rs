use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("config does not parse: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("invalid config field `{field}`: {constraint}")]
    Invalid { field: String, constraint: String },

    #[error("unknown preset `{name}`; valid presets: {}", valid.join(", "))]
    UnknownPreset {
        name: String,
        valid: &'static [&'static str],
    },

    #[error("table `{table}`: {reason}")]
    Table { table: String, reason: String },

    #[error("{context}: {source}")]
    Core {
        context: String,
        source: wpt_coop_core::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub(crate) fn invalid(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Self::Invalid {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    /// Maps a parameter error from the numerical layer onto the config
    /// section it came from.
    pub(crate) fn from_core(section: &str, err: wpt_coop_core::Error) -> Self {
        match err {
            wpt_coop_core::Error::InvalidParameter {
                field,
                value,
                constraint,
            } => Self::invalid(
                format!("{section}.{field}"),
                format!("{constraint} (got {value})"),
            ),
            wpt_coop_core::Error::DegenerateCosts { ratio } => Self::invalid(
                format!("{section}.C_PUR"),
                format!("critical ratio (C_S - C_PUR) / (C_S + C_H) must lie in [0, 1] (got {ratio})"),
            ),
            other => Self::Core {
                context: section.to_string(),
                source: other,
            },
        }
    }
}
