use alloc::vec::Vec;

use super::payoff::payoff_with_coefficient;
use super::solve::residual_share;
use super::{EquilibriumResult, GameKind, MarketScenario};

/// Payoff gain below which a deviation does not count as an improvement.
pub const NASH_SLACK: f64 = 1e-6;

/// Unilateral-deviation test on a grid of spacing `step` over
/// `[0, min(k_d, capacity)]`.
///
/// Each supplier's payoff at the result is compared against every grid
/// volume with all other suppliers held fixed. In a Stackelberg result,
/// followers are tested that way; a leader's deviation is scored with the
/// followers' aggregate reaction re-evaluated, since that is what a leader
/// optimizes against.
///
/// Returns `false` for non-converged results and for a non-positive `step`.
pub fn nash_check(result: &EquilibriumResult, scenario: &MarketScenario, step: f64) -> bool {
    if !result.converged || !(step > 0.0) || result.allocations.len() != scenario.suppliers.len() {
        return false;
    }
    let k = scenario.market_constant;
    let coefficients = scenario.cost_coefficients();
    let leaders = match result.game {
        GameKind::Stackelberg => result.leaders,
        _ => 0,
    };
    let alpha = residual_share(&coefficients[leaders..]);
    let lead_total: f64 = result.allocations[..leaders].iter().sum();
    let total: f64 = result.allocations.iter().sum();

    for (i, (&volume, profile)) in result.allocations.iter().zip(&scenario.suppliers).enumerate() {
        let c = coefficients[i];
        let upper = k.min(profile.capacity);
        let payoff: &dyn Fn(f64) -> f64 = if i < leaders {
            let others = lead_total - volume;
            &move |b: f64| leader_payoff(alpha, c, b, others, k)
        } else {
            let others = total - volume;
            &move |p: f64| payoff_with_coefficient(c, p, others, k)
        };
        let at_equilibrium = payoff(volume);
        let points = libm::floor(upper / step) as usize;
        let improves = (0..=points)
            .map(|j| (j as f64 * step).min(upper))
            .chain(core::iter::once(upper))
            .any(|p| payoff(p) > at_equilibrium + NASH_SLACK);
        if improves {
            return false;
        }
    }
    true
}

/// Leader payoff when followers react to the leaders' total:
/// followers take the share `1 - alpha` of the residual demand.
fn leader_payoff(alpha: f64, c: f64, volume: f64, other_leaders: f64, k: f64) -> f64 {
    let residual = (k - other_leaders - volume).max(0.0);
    let followers = (1.0 - alpha) * residual;
    (k - other_leaders - volume - followers) * volume - c * volume * volume
}

/// First-order residuals of the leaders' anticipating payoffs,
/// `alpha (k_d - B) - alpha B_x - 2 c_x B_x`, projected onto the bounds
/// `[0, capacity]`. Empty unless the result is a Stackelberg game.
pub fn leader_foc_residuals(result: &EquilibriumResult, scenario: &MarketScenario) -> Vec<f64> {
    if result.game != GameKind::Stackelberg {
        return Vec::new();
    }
    let leaders = result.leaders;
    let k = scenario.market_constant;
    let coefficients = scenario.cost_coefficients();
    let alpha = residual_share(&coefficients[leaders..]);
    let lead_total: f64 = result.allocations[..leaders].iter().sum();
    result.allocations[..leaders]
        .iter()
        .zip(&scenario.suppliers[..leaders])
        .zip(&coefficients[..leaders])
        .map(|((&b, profile), &c)| {
            let gradient = alpha * (k - lead_total) - alpha * b - 2.0 * c * b;
            if (b <= 0.0 && gradient < 0.0) || (b >= profile.capacity && gradient > 0.0) {
                0.0
            } else {
                gradient
            }
        })
        .collect()
}
