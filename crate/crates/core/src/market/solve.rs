use alloc::vec;
use alloc::vec::Vec;

use super::payoff::{clamp_volume, cournot_best_response, supplier_payoff};
use super::{Damping, EquilibriumResult, GameKind, MarketScenario, SolverSettings};
use crate::error::{Error, Result};

/// Dispatches on `scenario.game`.
pub fn solve(scenario: &MarketScenario) -> Result<EquilibriumResult> {
    match scenario.game {
        GameKind::Static => static_solve(scenario),
        GameKind::Cournot => cournot_solve(scenario),
        GameKind::Stackelberg => stackelberg_solve(scenario),
    }
}

/// Simultaneous best-response dynamics.
///
/// Every round each supplier answers the previous round's volumes of the
/// others. The game stops once no volume moves by `convergence_tol` or more
/// for `stability_rounds` rounds in a row. Running out of iterations is not
/// an error: the result comes back with `converged == false` and the full
/// trace.
pub fn cournot_solve(scenario: &MarketScenario) -> Result<EquilibriumResult> {
    prepare(scenario, GameKind::Cournot)?;
    let k = scenario.market_constant;
    let suppliers = &scenario.suppliers;
    let slopes: Vec<f64> = scenario
        .cost_coefficients()
        .iter()
        .map(|c| 1.0 / (2.0 + 2.0 * c))
        .collect();
    let theta = step_size(&scenario.settings, &[&slopes]);

    let run = iterate(&initial_volumes(scenario), &scenario.settings, theta, |x, next| {
        let total: f64 = x.iter().sum();
        for (i, profile) in suppliers.iter().enumerate() {
            next[i] = cournot_best_response(profile, total - x[i], k);
        }
    });
    Ok(finish(scenario, run))
}

/// Leader/follower game. The first `scenario.leaders` suppliers lead.
///
/// Followers facing leader volume `B` settle where each plays
/// `p_f = (k_d - B - P) / (1 + 2 c_f)`, so their total is
/// `P = sigma (k_d - B) / (1 + sigma)` with `sigma = sum 1 / (1 + 2 c_f)`.
/// A leader therefore sees the residual demand `alpha (k_d - B)` with
/// `alpha = 1 / (1 + sigma)` and, given the other leaders, sells
/// `alpha (k_d - B_others) / (2 alpha + 2 c_x)`.
///
/// Leaders iterate that response against each other's previous volumes
/// while followers best-respond to the previous round, under the same
/// stability rule as [`cournot_solve`]. Follower capacities are not part of
/// the leaders' anticipation.
pub fn stackelberg_solve(scenario: &MarketScenario) -> Result<EquilibriumResult> {
    prepare(scenario, GameKind::Stackelberg)?;
    let leaders = scenario.leaders;
    let followers = scenario.followers();
    if leaders == 0 || followers == 0 {
        return Err(Error::LeaderFollowerSplit {
            leaders,
            followers,
        });
    }
    let k = scenario.market_constant;
    let suppliers = &scenario.suppliers;
    let coefficients = scenario.cost_coefficients();
    let alpha = residual_share(&coefficients[leaders..]);

    let leader_slopes: Vec<f64> = coefficients[..leaders]
        .iter()
        .map(|c| alpha / (2.0 * alpha + 2.0 * c))
        .collect();
    let follower_slopes: Vec<f64> = coefficients[leaders..]
        .iter()
        .map(|c| 1.0 / (2.0 + 2.0 * c))
        .collect();
    let theta = step_size(&scenario.settings, &[&leader_slopes, &follower_slopes]);

    let run = iterate(&initial_volumes(scenario), &scenario.settings, theta, |x, next| {
        let lead_total: f64 = x[..leaders].iter().sum();
        let follow_total: f64 = x[leaders..].iter().sum();
        for i in 0..leaders {
            let others = lead_total - x[i];
            let c = coefficients[i];
            next[i] = clamp_volume(
                alpha * (k - others) / (2.0 * alpha + 2.0 * c),
                suppliers[i].capacity,
            );
        }
        for i in leaders..x.len() {
            let others = lead_total + follow_total - x[i];
            next[i] = cournot_best_response(&suppliers[i], others, k);
        }
    });
    Ok(finish(scenario, run))
}

/// Share `alpha` of the residual demand `k_d - B` left to the leaders once
/// followers with the given cost coefficients have reacted.
pub(crate) fn residual_share(follower_coefficients: &[f64]) -> f64 {
    let sigma: f64 = follower_coefficients
        .iter()
        .map(|c| 1.0 / (1.0 + 2.0 * c))
        .sum();
    1.0 / (1.0 + sigma)
}

/// Equal-share baseline: all `M` suppliers commit to the same volume and
/// maximize `(k_d - M p) p - c p^2`, giving `p = k_d / (2M + 2c)`.
///
/// Only defined for suppliers sharing one cost coefficient.
pub fn static_solve(scenario: &MarketScenario) -> Result<EquilibriumResult> {
    prepare(scenario, GameKind::Static)?;
    let coefficients = scenario.cost_coefficients();
    let c = coefficients[0];
    for (index, &found) in coefficients.iter().enumerate() {
        if (found - c).abs() > 1e-12 * c.abs().max(1.0) {
            return Err(Error::NonUniformSuppliers {
                index,
                expected: c,
                found,
            });
        }
    }
    let m = scenario.suppliers.len() as f64;
    let share = scenario.market_constant / (2.0 * m + 2.0 * c);
    let allocations: Vec<f64> = scenario
        .suppliers
        .iter()
        .map(|s| clamp_volume(share, s.capacity))
        .collect();
    let run = Run {
        trace: vec![initial_volumes(scenario), allocations.clone()],
        allocations,
        iterations: 1,
        converged: true,
    };
    Ok(finish(scenario, run))
}

fn prepare(scenario: &MarketScenario, expected: GameKind) -> Result<()> {
    if scenario.game != expected {
        return Err(Error::WrongGame {
            expected: expected.name(),
            found: scenario.game.name(),
        });
    }
    if scenario.suppliers.is_empty() {
        return Err(Error::NoSuppliers);
    }
    scenario.settings.validate()
}

fn initial_volumes(scenario: &MarketScenario) -> Vec<f64> {
    scenario
        .suppliers
        .iter()
        .map(|s| clamp_volume(s.initial_offer, s.capacity))
        .collect()
}

/// Step size for damped best responses.
///
/// Within a group of `g` players whose responses have slopes `L_i` against
/// the others' total, the linearized update has eigenvalues in
/// `[-(g - 1) L_max, L_max]`. Undamped iteration contracts when
/// `(g - 1) L_max < 1`; otherwise `2 / (2 + (g - 2) L_max)` balances the two
/// ends of that interval. With several groups the smallest step is used.
fn step_size(settings: &SolverSettings, groups: &[&[f64]]) -> f64 {
    match settings.damping {
        Damping::Fixed(theta) => theta,
        Damping::Auto => groups
            .iter()
            .filter(|g| !g.is_empty())
            .map(|g| {
                let size = g.len() as f64;
                let slope = g.iter().copied().fold(0.0, f64::max);
                if (size - 1.0) * slope < 1.0 {
                    1.0
                } else {
                    2.0 / (2.0 + (size - 2.0) * slope)
                }
            })
            .fold(1.0, f64::min),
    }
}

struct Run {
    allocations: Vec<f64>,
    trace: Vec<Vec<f64>>,
    iterations: usize,
    converged: bool,
}

fn iterate(
    initial: &[f64],
    settings: &SolverSettings,
    theta: f64,
    mut respond: impl FnMut(&[f64], &mut [f64]),
) -> Run {
    let mut current = initial.to_vec();
    let mut target = vec![0.0; current.len()];
    let mut trace = vec![current.clone()];
    let mut stable = 0;
    for round in 1..=settings.max_iterations {
        respond(&current, &mut target);
        let mut change: f64 = 0.0;
        for (x, t) in current.iter_mut().zip(&target) {
            let next = if theta == 1.0 { *t } else { *x + theta * (t - *x) };
            change = change.max((next - *x).abs());
            *x = next;
        }
        trace.push(current.clone());
        if change < settings.convergence_tol {
            stable += 1;
            if stable >= settings.stability_rounds {
                return Run {
                    allocations: current,
                    trace,
                    iterations: round,
                    converged: true,
                };
            }
        } else {
            stable = 0;
        }
    }
    Run {
        allocations: current,
        trace,
        iterations: settings.max_iterations,
        converged: false,
    }
}

fn finish(scenario: &MarketScenario, run: Run) -> EquilibriumResult {
    let k = scenario.market_constant;
    let total_volume: f64 = run.allocations.iter().sum();
    let payoffs = scenario
        .suppliers
        .iter()
        .zip(&run.allocations)
        .map(|(s, &p)| supplier_payoff(s, p, total_volume - p, k))
        .collect();
    EquilibriumResult {
        game: scenario.game,
        price: k - total_volume,
        total_volume,
        payoffs,
        iterations: run.iterations,
        trace: run.trace,
        converged: run.converged,
        leaders: if scenario.game == GameKind::Stackelberg {
            scenario.leaders
        } else {
            0
        },
        allocations: run.allocations,
    }
}
