//! Reference parameter set: Berkeley-mote style links and the uniform
//! supplier market used throughout the figure presets.

use alloc::vec::Vec;

use crate::channel::{dbm_to_watts, ChannelParams};
use crate::inventory::CostParams;
use crate::market::{GameKind, MarketScenario, SupplierProfile};

/// Market intercept `k_d` used by the reference games.
pub const MARKET_CONSTANT: f64 = 357.0;

/// Selling cost coefficient used by the reference games. The exact
/// `w D (P_req / S)^2` of [`mote_supplier`] is 4.21875.
pub const COST_COEFFICIENT: f64 = 4.0;

/// Previous-game offers (uW) seeding the best-response dynamics; cycled
/// when a market has more suppliers.
pub const OFFER_HISTORIES: [f64; 6] = [29.5, 21.6, 24.7, 23.4, 20.4, 26.4];

/// Fraction of transferred energy that reaches the demander.
pub const TRANSFER_EFFICIENCY: f64 = 0.5;

pub const TRAFFIC_QUANTITIES: [f64; 3] = [5.0, 10.0, 20.0];

/// 40 kbit/s over 10 MHz with -50 dBm/Hz noise.
pub fn mote_channel() -> ChannelParams {
    ChannelParams::new(10.0e6, dbm_to_watts(-50.0), 40.0e3).expect("reference channel is valid")
}

/// `S_i = 160`, `P_req = 120`, `D_i = 15`, `w = 0.5`.
pub fn mote_supplier() -> SupplierProfile {
    SupplierProfile::new(160.0, 120.0, 15.0, 0.5).expect("reference supplier is valid")
}

/// Holding dearer than shortage: `C_H = 4`, `C_S = 3`.
pub fn high_holding_costs() -> CostParams {
    CostParams::holding_shortage(4.0, 3.0).expect("reference costs are valid")
}

/// Holding cheaper than shortage: `C_H = 1`, `C_S = 4`.
pub fn low_holding_costs() -> CostParams {
    CostParams::holding_shortage(1.0, 4.0).expect("reference costs are valid")
}

/// `count` identical suppliers with coefficient [`COST_COEFFICIENT`],
/// seeded from [`OFFER_HISTORIES`].
pub fn uniform_suppliers(count: usize) -> Vec<SupplierProfile> {
    (0..count)
        .map(|i| {
            SupplierProfile::with_coefficient(COST_COEFFICIENT)
                .and_then(|s| s.initial_offer(OFFER_HISTORIES[i % OFFER_HISTORIES.len()]))
                .expect("reference supplier is valid")
        })
        .collect()
}

/// Reference market with `leaders` first movers (ignored unless
/// Stackelberg).
pub fn uniform_market(count: usize, game: GameKind, leaders: usize) -> MarketScenario {
    MarketScenario::new(MARKET_CONSTANT, uniform_suppliers(count), game)
        .expect("reference market is valid")
        .with_leaders(leaders)
}
