use super::SupplierProfile;
use crate::error::{Error, Result};

/// Demander utility: bits bought minus the quadratic congestion term minus
/// the bill. The pairwise cross terms make the quadratic part
/// `(sum p)^2 / 2`.
pub fn demander_payoff(allocations: &[f64], market_constant: f64, price: f64) -> f64 {
    let total: f64 = allocations.iter().sum();
    market_constant * total - 0.5 * total * total - price * total
}

/// Price at which the demander's payoff is stationary: `k_d - sum(p)`.
/// Not floored at zero.
pub fn market_price(allocations: &[f64], market_constant: f64) -> f64 {
    market_constant - allocations.iter().sum::<f64>()
}

/// Cost to the supplier of giving up `volume`: `w D (P_req p / S)^2`.
pub fn selling_cost(profile: &SupplierProfile, volume: f64) -> Result<f64> {
    if !(volume >= 0.0) {
        return Err(Error::Domain {
            what: "sold volume",
            value: volume,
        });
    }
    Ok(match profile.coefficient_override {
        Some(c) => c * volume * volume,
        None => {
            let shortfall = profile.required_power * volume / profile.stored_energy;
            profile.cost_weight * profile.traffic_quantity * shortfall * shortfall
        }
    })
}

/// The same cost written through the supplier efficiency
/// `k_s = P_req / (S / D)`: `w D (P_req - k_s (S - p) / D)^2`.
///
/// Agrees with [`selling_cost`] for every profile without a coefficient
/// override.
pub fn selling_cost_by_efficiency(profile: &SupplierProfile, volume: f64) -> Result<f64> {
    if !(volume >= 0.0) {
        return Err(Error::Domain {
            what: "sold volume",
            value: volume,
        });
    }
    if profile.traffic_quantity == 0.0 {
        return Ok(0.0);
    }
    let k_s = profile.supplier_efficiency();
    let gap = profile.required_power
        - k_s * (profile.stored_energy - volume) / profile.traffic_quantity;
    Ok(profile.cost_weight * profile.traffic_quantity * gap * gap)
}

/// `(k_d - others - p) p - c p^2`.
pub fn supplier_payoff(
    profile: &SupplierProfile,
    volume: f64,
    others_total: f64,
    market_constant: f64,
) -> f64 {
    payoff_with_coefficient(profile.cost_coefficient(), volume, others_total, market_constant)
}

pub(crate) fn payoff_with_coefficient(
    coefficient: f64,
    volume: f64,
    others_total: f64,
    market_constant: f64,
) -> f64 {
    (market_constant - others_total - volume) * volume - coefficient * volume * volume
}

/// Volume maximizing [`supplier_payoff`] against `others_total`:
/// `(k_d - others) / (2 + 2c)`, clamped to `[0, capacity]`.
pub fn cournot_best_response(
    profile: &SupplierProfile,
    others_total: f64,
    market_constant: f64,
) -> f64 {
    let c = profile.cost_coefficient();
    clamp_volume(
        (market_constant - others_total) / (2.0 + 2.0 * c),
        profile.capacity,
    )
}

pub(crate) fn clamp_volume(volume: f64, capacity: f64) -> f64 {
    volume.max(0.0).min(capacity)
}
