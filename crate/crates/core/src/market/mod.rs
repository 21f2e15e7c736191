//! Energy trading among supplier nodes.
//!
//! A demander with efficiency `k_d` (bits per unit energy) buys energy from
//! several suppliers. Maximizing the demander's quadratic payoff gives the
//! linear inverse demand `q = k_d - sum(p_i)`. Supplier `i` selling `p_i`
//! earns `q p_i - c_i p_i^2`, where the selling cost coefficient
//! `c_i = w D_i (P_req / S_i)^2` grows with traffic and with how tight the
//! supplier's own storage is.
//!
//! Three ways of settling the volumes are provided:
//!
//! * [`cournot_solve`]: simultaneous best responses until stable.
//! * [`stackelberg_solve`]: leaders commit first, anticipating the
//!   followers' aggregate reaction.
//! * [`static_solve`]: every supplier sells the same volume, the baseline
//!   without strategic interaction.

mod nash;
mod payoff;
mod solve;

use alloc::vec::Vec;

use crate::error::{check, Result};

pub use nash::{leader_foc_residuals, nash_check, NASH_SLACK};
pub use payoff::{
    cournot_best_response, demander_payoff, market_price, selling_cost, selling_cost_by_efficiency,
    supplier_payoff,
};
pub use solve::{cournot_solve, solve, stackelberg_solve, static_solve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameKind {
    Static,
    Cournot,
    Stackelberg,
}

impl GameKind {
    pub fn name(self) -> &'static str {
        match self {
            GameKind::Static => "static",
            GameKind::Cournot => "cournot",
            GameKind::Stackelberg => "stackelberg",
        }
    }
}

impl core::fmt::Display for GameKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// One energy supplier as seen by the market.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupplierProfile {
    /// Energy currently stored, `S_i`.
    pub stored_energy: f64,
    /// Energy the node needs for its own traffic, `P_req`.
    pub required_power: f64,
    /// Expected packet count, `D_i`.
    pub traffic_quantity: f64,
    /// Weight `w` of the selling cost.
    pub cost_weight: f64,
    /// Volume offered in the previous game; seeds the best-response dynamics.
    pub initial_offer: f64,
    /// Most the supplier can sell; infinite unless set by the caller.
    pub capacity: f64,
    /// Replaces `w D (P_req / S)^2` when set.
    pub coefficient_override: Option<f64>,
}

impl SupplierProfile {
    pub fn new(
        stored_energy: f64,
        required_power: f64,
        traffic_quantity: f64,
        cost_weight: f64,
    ) -> Result<Self> {
        check(
            stored_energy.is_finite() && stored_energy > 0.0,
            "S_i",
            stored_energy,
            "stored energy must be finite and > 0",
        )?;
        check(
            required_power.is_finite() && required_power >= 0.0,
            "P_req",
            required_power,
            "required power must be finite and >= 0",
        )?;
        check(
            traffic_quantity.is_finite() && traffic_quantity >= 0.0,
            "D_i",
            traffic_quantity,
            "traffic quantity must be finite and >= 0",
        )?;
        check(
            cost_weight.is_finite() && cost_weight >= 0.0,
            "w",
            cost_weight,
            "cost weight must be finite and >= 0",
        )?;
        let profile = Self {
            stored_energy,
            required_power,
            traffic_quantity,
            cost_weight,
            initial_offer: 0.0,
            capacity: f64::INFINITY,
            coefficient_override: None,
        };
        let c = profile.cost_coefficient();
        check(
            c.is_finite(),
            "w*D_i*(P_req/S_i)^2",
            c,
            "cost coefficient must be finite",
        )?;
        Ok(profile)
    }

    /// A supplier described only by its cost coefficient.
    pub fn with_coefficient(coefficient: f64) -> Result<Self> {
        check(
            coefficient.is_finite() && coefficient >= 0.0,
            "cost_coefficient",
            coefficient,
            "cost coefficient must be finite and >= 0",
        )?;
        let mut profile = Self::new(1.0, 0.0, 0.0, 0.0)?;
        profile.coefficient_override = Some(coefficient);
        Ok(profile)
    }

    pub fn initial_offer(mut self, offer: f64) -> Result<Self> {
        check(
            offer.is_finite() && offer >= 0.0,
            "initial_offer",
            offer,
            "offer history must be finite and >= 0",
        )?;
        self.initial_offer = offer;
        Ok(self)
    }

    pub fn capacity(mut self, capacity: f64) -> Result<Self> {
        check(
            capacity >= 0.0,
            "capacity",
            capacity,
            "capacity must be >= 0",
        )?;
        self.capacity = capacity;
        Ok(self)
    }

    /// `c_i` in the selling cost `c_i p^2`.
    pub fn cost_coefficient(&self) -> f64 {
        self.coefficient_override.unwrap_or_else(|| {
            let ratio = self.required_power / self.stored_energy;
            self.cost_weight * self.traffic_quantity * ratio * ratio
        })
    }

    /// `P_req / (S_i / D_i)`: required energy over stored energy per packet.
    pub fn supplier_efficiency(&self) -> f64 {
        self.required_power / (self.stored_energy / self.traffic_quantity)
    }
}

/// How far each best-response update moves toward the new target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    /// Undamped whenever the undamped map already contracts; otherwise the
    /// step that minimizes the worst-case linear contraction factor.
    Auto,
    /// Fixed step in `(0, 1]`; `1` is the plain simultaneous update.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Largest per-supplier change that still counts as "unchanged".
    pub convergence_tol: f64,
    /// Consecutive unchanged rounds required to stop.
    pub stability_rounds: usize,
    pub max_iterations: usize,
    pub damping: Damping,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            convergence_tol: 1e-6,
            stability_rounds: 3,
            max_iterations: 1000,
            damping: Damping::Auto,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        check(
            self.convergence_tol.is_finite() && self.convergence_tol > 0.0,
            "tol",
            self.convergence_tol,
            "convergence tolerance must be > 0",
        )?;
        check(
            self.stability_rounds >= 1,
            "stability_rounds",
            self.stability_rounds as f64,
            "stability rounds must be >= 1",
        )?;
        check(
            self.max_iterations >= 1,
            "max_iterations",
            self.max_iterations as f64,
            "max iterations must be >= 1",
        )?;
        if let Damping::Fixed(theta) = self.damping {
            check(
                theta > 0.0 && theta <= 1.0,
                "damping",
                theta,
                "damping must lie in (0, 1]",
            )?;
        }
        Ok(())
    }
}

/// A complete market: demander constant, suppliers and how they play.
///
/// For Stackelberg games the first `leaders` suppliers move first.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketScenario {
    pub market_constant: f64,
    pub suppliers: Vec<SupplierProfile>,
    pub game: GameKind,
    pub leaders: usize,
    pub settings: SolverSettings,
}

impl MarketScenario {
    pub fn new(market_constant: f64, suppliers: Vec<SupplierProfile>, game: GameKind) -> Result<Self> {
        check(
            market_constant.is_finite() && market_constant > 0.0,
            "k_d",
            market_constant,
            "market constant must be finite and > 0",
        )?;
        Ok(Self {
            market_constant,
            suppliers,
            game,
            leaders: 0,
            settings: SolverSettings::default(),
        })
    }

    pub fn with_leaders(mut self, leaders: usize) -> Self {
        self.leaders = leaders;
        self
    }

    pub fn with_settings(mut self, settings: SolverSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn followers(&self) -> usize {
        self.suppliers.len().saturating_sub(self.leaders)
    }

    pub fn cost_coefficients(&self) -> Vec<f64> {
        self.suppliers.iter().map(|s| s.cost_coefficient()).collect()
    }
}

/// Outcome of one market game.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub game: GameKind,
    /// Per-supplier volumes, in scenario order.
    pub allocations: Vec<f64>,
    /// `k_d - total_volume`.
    pub price: f64,
    pub total_volume: f64,
    pub payoffs: Vec<f64>,
    /// Number of update rounds played.
    pub iterations: usize,
    /// Allocation vector before the first round and after every round.
    pub trace: Vec<Vec<f64>>,
    pub converged: bool,
    pub leaders: usize,
}

impl EquilibriumResult {
    /// Linear inverse demand was pushed below zero. The price is reported
    /// as is; callers decide whether that is acceptable.
    pub fn is_oversupplied(&self) -> bool {
        self.price < 0.0
    }
}
