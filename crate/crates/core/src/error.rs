use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the numerical layer.
///
/// `field` names are static so the configuration layer can map them back to
/// the user's input without string matching.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} = {value} violates: {constraint}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("{what} is outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("critical ratio {ratio} is outside [0, 1]; costs are degenerate")]
    DegenerateCosts { ratio: f64 },

    #[error("{level} is not a level of the demand support")]
    NotSupportLevel { level: f64 },

    #[error("support level {level} has no successor")]
    LastSupportLevel { level: f64 },

    #[error("order-up-to level {order_up_to} is below existing stock {stock}")]
    OrderBelowStock { order_up_to: f64, stock: f64 },

    #[error("game kind {found} does not match the {expected} solver")]
    WrongGame {
        expected: &'static str,
        found: &'static str,
    },

    #[error("market has no suppliers")]
    NoSuppliers,

    #[error("stackelberg game needs at least one leader and one follower (leaders={leaders}, followers={followers})")]
    LeaderFollowerSplit { leaders: usize, followers: usize },

    #[error("static baseline requires identical cost coefficients (supplier {index} has {found}, expected {expected})")]
    NonUniformSuppliers {
        index: usize,
        expected: f64,
        found: f64,
    },

    #[error("demand support is malformed: {reason}")]
    MalformedDistribution { reason: &'static str },
}

pub(crate) fn check(
    ok: bool,
    field: &'static str,
    value: f64,
    constraint: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            value,
            constraint,
        })
    }
}
