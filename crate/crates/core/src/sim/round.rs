use alloc::vec::Vec;

use thiserror::Error;

use super::node::{classify_nodes, NodeState};
use crate::channel::demander_efficiency;
use crate::error::Error;
use crate::market::{solve, EquilibriumResult, GameKind, MarketScenario, SolverSettings, SupplierProfile};

/// Market and transfer settings for cooperation rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoopConfig {
    pub game: GameKind,
    /// First movers in a Stackelberg round; capped at one less than the
    /// number of suppliers present.
    pub leaders: usize,
    /// `k_d` override in bits per uJ. `None` derives it from the
    /// demander's channel.
    pub market_constant: Option<f64>,
    pub cost_weight: f64,
    pub coefficient_override: Option<f64>,
    pub settings: SolverSettings,
    /// Fraction of sold energy that arrives, `1 - loss`.
    pub transfer_efficiency: f64,
}

impl Default for CoopConfig {
    fn default() -> Self {
        Self {
            game: GameKind::Stackelberg,
            leaders: 1,
            market_constant: None,
            cost_weight: 0.5,
            coefficient_override: None,
            settings: SolverSettings::default(),
            transfer_efficiency: 0.5,
        }
    }
}

/// One executed request: who asked, who sold, what arrived.
#[derive(Debug, Clone, PartialEq)]
pub struct CooperationRound {
    pub demander_id: usize,
    pub requested_energy: f64,
    /// In market order: by surplus, largest first.
    pub supplier_ids: Vec<usize>,
    pub equilibrium: EquilibriumResult,
    pub delivered_energy: f64,
    pub lost_energy: f64,
}

/// Why a round was not executed. Node state is untouched in every case.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoundAbort {
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("node {0} has no energy deficit")]
    NoDeficit(usize),
    #[error("no node has surplus energy to sell")]
    NoSuppliers,
    #[error("market game did not settle within {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("market setup failed: {0}")]
    Market(#[from] Error),
}

/// Runs the request/trade/transfer protocol for one demander.
///
/// The demander's deficit is broadcast, every current supplier enters the
/// market with its surplus as capacity and its previous sale as offer
/// history, and once the game settles each supplier sends its volume. The
/// demander receives `transfer_efficiency` of the total.
///
/// All checks and the market solve happen before any state is touched, so
/// an aborted round leaves `nodes` exactly as it was.
pub fn run_cooperation_round(
    nodes: &mut [NodeState],
    demander_id: usize,
    config: &CoopConfig,
) -> Result<CooperationRound, RoundAbort> {
    let demander = position(nodes, demander_id)?;
    let requested_energy = nodes[demander].deficit();
    if !(requested_energy > 0.0) {
        return Err(RoundAbort::NoDeficit(demander_id));
    }

    let mut suppliers = classify_nodes(nodes).suppliers;
    if suppliers.is_empty() {
        return Err(RoundAbort::NoSuppliers);
    }
    suppliers.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut profiles = Vec::with_capacity(suppliers.len());
    let mut seats = Vec::with_capacity(suppliers.len());
    for &(id, surplus) in &suppliers {
        let at = position(nodes, id)?;
        let node = &nodes[at];
        let mut profile = SupplierProfile::new(
            node.stored(),
            node.policy().order_up_to,
            node.traffic().traffic_quantity(),
            config.cost_weight,
        )?
        .capacity(surplus)?
        .initial_offer(node.last_offer().min(surplus))?;
        profile.coefficient_override = config.coefficient_override;
        profiles.push(profile);
        seats.push(at);
    }

    let market_constant = match config.market_constant {
        Some(k) => k,
        None => demander_efficiency(nodes[demander].channel())? * 1e-6,
    };
    // A lone supplier has nobody to lead; the monopoly answer is the same
    // under every game.
    let (game, leaders) = match config.game {
        GameKind::Stackelberg if profiles.len() == 1 => (GameKind::Cournot, 0),
        GameKind::Stackelberg => (GameKind::Stackelberg, config.leaders.clamp(1, profiles.len() - 1)),
        other => (other, 0),
    };
    let scenario = MarketScenario::new(market_constant, profiles, game)?
        .with_leaders(leaders)
        .with_settings(config.settings);
    let equilibrium = solve(&scenario)?;
    if !equilibrium.converged {
        return Err(RoundAbort::NotConverged {
            iterations: equilibrium.iterations,
        });
    }

    let delivered_energy = config.transfer_efficiency * equilibrium.total_volume;
    for (&at, &volume) in seats.iter().zip(&equilibrium.allocations) {
        nodes[at].send(volume);
    }
    nodes[demander].receive(delivered_energy);

    Ok(CooperationRound {
        demander_id,
        requested_energy,
        supplier_ids: suppliers.iter().map(|s| s.0).collect(),
        lost_energy: equilibrium.total_volume - delivered_energy,
        delivered_energy,
        equilibrium,
    })
}

fn position(nodes: &[NodeState], id: usize) -> Result<usize, RoundAbort> {
    nodes
        .iter()
        .position(|n| n.id() == id)
        .ok_or(RoundAbort::UnknownNode(id))
}
