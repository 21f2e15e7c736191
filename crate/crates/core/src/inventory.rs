//! (s, S) energy inventory under stochastic demand.
//!
//! A node stores harvested energy up to an order-up-to level `S*` chosen to
//! minimize expected holding plus shortage cost, and tops up whenever its
//! stock falls to the reorder point `s`. Both levels are restricted to the
//! demand support.
//!
//! The optimum is the critical-ratio quantile: the smallest level whose
//! demand cdf reaches `F = (C_S - C_PUR) / (C_S + C_H)`. This holds because
//! the cost increment between consecutive levels,
//! `(cdf(S_a) - F) (C_H + C_S) (S_{a+1} - S_a)`, is non-decreasing in `a`.

use crate::demand::DemandDistribution;
use crate::error::{check, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub holding: f64,
    pub shortage: f64,
    pub purchase: f64,
    pub setup: f64,
}

impl CostParams {
    /// All costs are per energy unit except `setup`, which is per order.
    ///
    /// `shortage < purchase` is accepted here; it surfaces as
    /// [`Error::DegenerateCosts`] once an optimum is requested.
    pub fn new(holding: f64, shortage: f64, purchase: f64, setup: f64) -> Result<Self> {
        for (field, value) in [
            ("C_H", holding),
            ("C_S", shortage),
            ("C_PUR", purchase),
            ("c_se", setup),
        ] {
            check(
                value.is_finite() && value >= 0.0,
                field,
                value,
                "cost must be finite and >= 0",
            )?;
        }
        check(
            holding + shortage > 0.0,
            "C_H + C_S",
            holding + shortage,
            "must be > 0 (critical ratio denominator)",
        )?;
        Ok(Self {
            holding,
            shortage,
            purchase,
            setup,
        })
    }

    /// Holding and shortage only; free energy, free orders.
    pub fn holding_shortage(holding: f64, shortage: f64) -> Result<Self> {
        Self::new(holding, shortage, 0.0, 0.0)
    }
}

/// Energy already in the battery when the order decision is made.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExistingStock(f64);

impl ExistingStock {
    pub fn new(level: f64) -> Result<Self> {
        check(
            level.is_finite() && level >= 0.0,
            "I",
            level,
            "existing stock must be finite and >= 0",
        )?;
        Ok(Self(level))
    }

    pub fn level(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InventoryPolicy {
    pub reorder_point: f64,
    pub order_up_to: f64,
    pub expected_cost: f64,
}

/// Expected holding plus shortage cost of holding `level` against `dist`.
pub fn holding_shortage_cost(level: f64, dist: &DemandDistribution, costs: &CostParams) -> f64 {
    let mut holding = 0.0;
    let mut shortage = 0.0;
    for (&d, &p) in dist.support().iter().zip(dist.probabilities()) {
        if d <= level {
            holding += (level - d) * p;
        } else {
            shortage += (d - level) * p;
        }
    }
    costs.holding * holding + costs.shortage * shortage
}

/// Expected cost of ordering up to `order_up_to` from `stock`:
/// `c_se + C_PUR (S - I) + C_H E[(S - d)+] + C_S E[(d - S)+]`.
///
/// `order_up_to` need not be a support level. When a setup or purchase cost
/// is charged, ordering below the existing stock is rejected.
pub fn expected_cost(
    order_up_to: f64,
    dist: &DemandDistribution,
    costs: &CostParams,
    stock: ExistingStock,
) -> Result<f64> {
    let ordering = costs.setup > 0.0 || costs.purchase > 0.0;
    if ordering && order_up_to < stock.level() {
        return Err(Error::OrderBelowStock {
            order_up_to,
            stock: stock.level(),
        });
    }
    Ok(costs.setup
        + costs.purchase * (order_up_to - stock.level())
        + holding_shortage_cost(order_up_to, dist, costs))
}

/// `F = (C_S - C_PUR) / (C_S + C_H)`. Values outside `[0, 1]` mean the
/// costs are degenerate; the caller decides what to do with them.
pub fn critical_ratio(costs: &CostParams) -> f64 {
    (costs.shortage - costs.purchase) / (costs.shortage + costs.holding)
}

fn checked_ratio(costs: &CostParams) -> Result<f64> {
    let ratio = critical_ratio(costs);
    if (0.0..=1.0).contains(&ratio) {
        Ok(ratio)
    } else {
        Err(Error::DegenerateCosts { ratio })
    }
}

/// Cost increment from support level `level` to its successor.
///
/// Equals `expected_cost(S_{a+1}) - expected_cost(S_a)`; the setup cost
/// cancels, the purchase cost is folded into the critical ratio.
pub fn delta_cost(level: f64, dist: &DemandDistribution, costs: &CostParams) -> Result<f64> {
    let a = dist
        .index_of(level)
        .ok_or(Error::NotSupportLevel { level })?;
    delta_cost_at(a, dist, costs)
}

fn delta_cost_at(a: usize, dist: &DemandDistribution, costs: &CostParams) -> Result<f64> {
    let support = dist.support();
    if a + 1 >= support.len() {
        return Err(Error::LastSupportLevel { level: support[a] });
    }
    let step = support[a + 1] - support[a];
    Ok((dist.cdf_at_index(a) - critical_ratio(costs)) * (costs.holding + costs.shortage) * step)
}

/// Order-up-to level minimizing expected cost: the smallest support level
/// whose cdf reaches the critical ratio.
///
/// Very light traffic (the first level already meets the ratio) returns the
/// first level; very heavy traffic (no level short of the last meets it)
/// returns the last.
pub fn optimal_inventory(dist: &DemandDistribution, costs: &CostParams) -> Result<f64> {
    let ratio = checked_ratio(costs)?;
    let support = dist.support();
    let a = (0..support.len())
        .find(|&a| dist.cdf_at_index(a) >= ratio)
        .unwrap_or(support.len() - 1);
    Ok(support[a])
}

/// Smallest support level `s <= S*` at which not ordering is no more
/// expensive than ordering up to `S*`:
///
/// `C_PUR s + L(s) <= c_se + C_PUR S* + L(S*)`
///
/// where `L` is the expected holding plus shortage cost. The difference of
/// the two sides is accumulated from [`delta_cost`] increments so that the
/// zero-setup case lands exactly on `S*`.
pub fn reorder_point(
    dist: &DemandDistribution,
    costs: &CostParams,
    order_up_to: f64,
) -> Result<f64> {
    checked_ratio(costs)?;
    let top = dist
        .index_of(order_up_to)
        .ok_or(Error::NotSupportLevel { level: order_up_to })?;
    let support = dist.support();
    // gap = cost(S*) - cost(S_a), accumulated downward from S*.
    let mut gap = 0.0;
    let mut best = top;
    for a in (0..top).rev() {
        gap += delta_cost_at(a, dist, costs)?;
        if costs.setup + gap >= 0.0 {
            best = a;
        }
    }
    Ok(support[best])
}

/// Exhaustive argmin of [`expected_cost`] over the support, ties to the
/// smaller level. Independent of the critical-ratio argument.
pub fn brute_force_optimum(dist: &DemandDistribution, costs: &CostParams) -> f64 {
    let mut best_level = dist.support()[0];
    let mut best_cost = f64::INFINITY;
    for &level in dist.support() {
        let cost = costs.setup
            + costs.purchase * level
            + holding_shortage_cost(level, dist, costs);
        if cost < best_cost {
            best_cost = cost;
            best_level = level;
        }
    }
    best_level
}

/// Full (s, S) policy for one node.
pub fn optimal_policy(
    dist: &DemandDistribution,
    costs: &CostParams,
    stock: ExistingStock,
) -> Result<InventoryPolicy> {
    let order_up_to = optimal_inventory(dist, costs)?;
    let reorder_point = reorder_point(dist, costs, order_up_to)?;
    let expected_cost = if order_up_to >= stock.level() {
        expected_cost(order_up_to, dist, costs, stock)?
    } else {
        // Already above S*: nothing is ordered, so no setup or purchase.
        holding_shortage_cost(order_up_to, dist, costs)
    };
    Ok(InventoryPolicy {
        reorder_point,
        order_up_to,
        expected_cost,
    })
}
