use alloc::vec::Vec;

use crate::channel::ChannelParams;
use crate::demand::{demand_distribution, DemandDistribution, TrafficProcess, DEFAULT_MASS_TOL};
use crate::error::{check, Result};
use crate::inventory::{optimal_policy, CostParams, ExistingStock, InventoryPolicy};

/// One sensor node: battery, harvester, traffic and its inventory policy.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    id: usize,
    stored: f64,
    harvest_rate: f64,
    traffic: TrafficProcess,
    channel: ChannelParams,
    costs: CostParams,
    distribution: DemandDistribution,
    policy: InventoryPolicy,
    /// Net energy received through cooperation since the start; positive
    /// means received.
    transfer_ledger: f64,
    last_offer: f64,
    scheduled: Vec<(u64, TrafficProcess)>,
}

impl NodeState {
    pub fn new(
        id: usize,
        stored: f64,
        harvest_rate: f64,
        traffic: TrafficProcess,
        channel: ChannelParams,
        costs: CostParams,
    ) -> Result<Self> {
        check(
            stored.is_finite() && stored >= 0.0,
            "stored_energy",
            stored,
            "stored energy must be finite and >= 0",
        )?;
        check(
            harvest_rate.is_finite() && harvest_rate >= 0.0,
            "harvest_rate",
            harvest_rate,
            "harvest rate must be finite and >= 0",
        )?;
        let distribution = demand_distribution(&traffic, DEFAULT_MASS_TOL)?;
        let policy = optimal_policy(&distribution, &costs, ExistingStock::new(stored)?)?;
        Ok(Self {
            id,
            stored,
            harvest_rate,
            traffic,
            channel,
            costs,
            distribution,
            policy,
            transfer_ledger: 0.0,
            last_offer: 0.0,
            scheduled: Vec::new(),
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn stored(&self) -> f64 {
        self.stored
    }

    pub fn harvest_rate(&self) -> f64 {
        self.harvest_rate
    }

    pub fn traffic(&self) -> &TrafficProcess {
        &self.traffic
    }

    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }

    pub fn costs(&self) -> &CostParams {
        &self.costs
    }

    pub fn distribution(&self) -> &DemandDistribution {
        &self.distribution
    }

    pub fn policy(&self) -> &InventoryPolicy {
        &self.policy
    }

    pub fn transfer_ledger(&self) -> f64 {
        self.transfer_ledger
    }

    pub fn last_offer(&self) -> f64 {
        self.last_offer
    }

    /// Energy above the order-up-to level, or zero.
    pub fn surplus(&self) -> f64 {
        (self.stored - self.policy.order_up_to).max(0.0)
    }

    /// Energy missing to reach the order-up-to level, or zero.
    pub fn deficit(&self) -> f64 {
        (self.policy.order_up_to - self.stored).max(0.0)
    }

    /// Switches to `traffic` at the start of `slot`.
    pub fn schedule_traffic(&mut self, slot: u64, traffic: TrafficProcess) {
        let at = self.scheduled.partition_point(|(s, _)| *s <= slot);
        self.scheduled.insert(at, (slot, traffic));
    }

    /// Applies traffic changes due at `slot`; re-optimizes the policy when
    /// anything changed.
    pub(crate) fn apply_schedule(&mut self, slot: u64) -> Result<bool> {
        let due = self.scheduled.partition_point(|(s, _)| *s <= slot);
        if due == 0 {
            return Ok(false);
        }
        let (_, traffic) = self.scheduled[due - 1];
        self.scheduled.drain(..due);
        if traffic == self.traffic {
            return Ok(false);
        }
        let distribution = demand_distribution(&traffic, DEFAULT_MASS_TOL)?;
        self.policy = optimal_policy(&distribution, &self.costs, ExistingStock::new(self.stored)?)?;
        self.distribution = distribution;
        self.traffic = traffic;
        Ok(true)
    }

    pub(crate) fn add(&mut self, energy: f64) {
        self.stored += energy;
    }

    /// Takes up to `amount`; returns what was actually available.
    pub(crate) fn draw(&mut self, amount: f64) -> f64 {
        let taken = amount.min(self.stored);
        self.stored -= taken;
        taken
    }

    pub(crate) fn send(&mut self, energy: f64) {
        self.stored -= energy;
        self.transfer_ledger -= energy;
        self.last_offer = energy;
    }

    pub(crate) fn receive(&mut self, energy: f64) {
        self.stored += energy;
        self.transfer_ledger += energy;
    }
}

/// Suppliers hold more than their order-up-to level, demanders less; a
/// node exactly at the level is idle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Classification {
    /// `(node id, surplus)`.
    pub suppliers: Vec<(usize, f64)>,
    /// `(node id, deficit)`.
    pub demanders: Vec<(usize, f64)>,
    pub idle: Vec<usize>,
}

pub fn classify_nodes(nodes: &[NodeState]) -> Classification {
    let mut out = Classification::default();
    for node in nodes {
        let level = node.policy.order_up_to;
        if node.stored > level {
            out.suppliers.push((node.id, node.stored - level));
        } else if node.stored < level {
            out.demanders.push((node.id, level - node.stored));
        } else {
            out.idle.push(node.id);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::TrafficProcess;
    use crate::inventory::CostParams;
    use crate::scenarios::mote_channel;

    /// Node whose order-up-to level is 120: deterministic-ish heavy traffic
    /// with shortage much dearer than holding.
    fn node(id: usize, stored: f64) -> NodeState {
        let traffic = TrafficProcess::with_quantity(120.0, 1.0).unwrap();
        let costs = CostParams::holding_shortage(1.0, 1.0).unwrap();
        NodeState::new(id, stored, 0.0, traffic, mote_channel(), costs).unwrap()
    }

    #[test]
    fn median_policy_level() {
        // F = 1/2 picks the Poisson median, 120 for mean 120.
        assert_eq!(node(0, 0.0).policy().order_up_to, 120.0);
    }

    #[test]
    fn classification_examples() {
        let nodes = [node(0, 160.0), node(1, 120.0), node(2, 90.0)];
        let c = classify_nodes(&nodes);
        assert_eq!(c.suppliers, [(0, 40.0)]);
        assert_eq!(c.idle, [1]);
        assert_eq!(c.demanders, [(2, 30.0)]);
    }

    #[test]
    fn schedule_recomputes_policy() {
        let mut n = node(0, 10.0);
        n.schedule_traffic(5, TrafficProcess::with_quantity(5.0, 1.0).unwrap());
        assert!(!n.apply_schedule(4).unwrap());
        assert!(n.apply_schedule(5).unwrap());
        assert_eq!(n.policy().order_up_to, 5.0);
        assert!(!n.apply_schedule(6).unwrap());
    }
}
