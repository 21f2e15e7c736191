use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::node::{classify_nodes, NodeState};
use super::round::{run_cooperation_round, CoopConfig, CooperationRound, RoundAbort};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub slots: u64,
    pub seed: u64,
    pub coop: CoopConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            slots: 100,
            seed: 0,
            coop: CoopConfig::default(),
        }
    }
}

/// What one node harvested and consumed during the physical part of a slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotDraw {
    pub node: usize,
    pub harvested: f64,
    pub demand: f64,
    pub consumed: f64,
    /// Demand that found the battery empty.
    pub unmet: f64,
}

/// Per-node event log entry, written after the slot's trading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRecord {
    pub slot: u64,
    pub node: usize,
    pub stored: f64,
    pub harvested: f64,
    pub demand: f64,
    pub consumed: f64,
    pub unmet: f64,
    pub sent: f64,
    pub received: f64,
    /// Price of the last round this node traded in this slot.
    pub price: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub slot: u64,
    pub demander_id: usize,
    pub outcome: core::result::Result<CooperationRound, RoundAbort>,
}

/// Running energy totals over a whole run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyLedger {
    pub initial: f64,
    pub harvested: f64,
    pub demand: f64,
    pub unmet: f64,
    pub sent: f64,
    pub delivered: f64,
    pub lost: f64,
    pub current: f64,
}

impl EnergyLedger {
    /// `initial + harvested - demand + unmet - lost - current`; zero up to
    /// rounding for a consistent run.
    pub fn imbalance(&self) -> f64 {
        self.initial + self.harvested - self.demand + self.unmet - self.lost - self.current
    }
}

/// Physical half of a slot: traffic changes, harvest, then a random
/// demand per node drawn by inverse cdf. Consumption is capped by what is
/// stored, the rest is reported as unmet.
pub fn step<R: RngCore>(nodes: &mut [NodeState], slot: u64, rng: &mut R) -> Result<Vec<SlotDraw>> {
    let mut draws = Vec::with_capacity(nodes.len());
    for node in nodes.iter_mut() {
        node.apply_schedule(slot)?;
        let harvested = node.harvest_rate();
        node.add(harvested);
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let demand = node.distribution().quantile(u);
        let consumed = node.draw(demand);
        draws.push(SlotDraw {
            node: node.id(),
            harvested,
            demand,
            consumed,
            unmet: demand - consumed,
        });
    }
    Ok(draws)
}

/// A seeded network run with its event log and energy ledger.
#[derive(Debug, Clone)]
pub struct Simulation {
    nodes: Vec<NodeState>,
    config: SimConfig,
    rng: ChaCha8Rng,
    slot: u64,
    records: Vec<SlotRecord>,
    rounds: Vec<RoundRecord>,
    ledger: EnergyLedger,
}

impl Simulation {
    pub fn new(mut nodes: Vec<NodeState>, config: SimConfig) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for node in &nodes {
            if !ids.insert(node.id()) {
                return Err(Error::InvalidParameter {
                    field: "node_id",
                    value: node.id() as f64,
                    constraint: "node ids must be unique",
                });
            }
        }
        crate::error::check(
            config.coop.transfer_efficiency >= 0.0 && config.coop.transfer_efficiency <= 1.0,
            "transfer_efficiency",
            config.coop.transfer_efficiency,
            "transfer efficiency must lie in [0, 1]",
        )?;
        config.coop.settings.validate()?;
        nodes.sort_by_key(|n| n.id());
        let initial = nodes.iter().map(|n| n.stored()).sum();
        Ok(Self {
            nodes,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            slot: 0,
            records: Vec::new(),
            rounds: Vec::new(),
            ledger: EnergyLedger {
                initial,
                current: initial,
                ..EnergyLedger::default()
            },
        })
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Index of the next slot to run.
    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn records(&self) -> &[SlotRecord] {
        &self.records
    }

    pub fn rounds(&self) -> &[RoundRecord] {
        &self.rounds
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    /// Runs one slot: physical step, then one cooperation round per
    /// demander, largest deficit first.
    pub fn step(&mut self) -> Result<()> {
        let slot = self.slot;
        let draws = step(&mut self.nodes, slot, &mut self.rng)?;

        let n = self.nodes.len();
        let mut sent = alloc::vec![0.0; n];
        let mut received = alloc::vec![0.0; n];
        let mut price = alloc::vec![None; n];

        let mut demanders = classify_nodes(&self.nodes).demanders;
        demanders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for (demander_id, _) in demanders {
            let outcome = run_cooperation_round(&mut self.nodes, demander_id, &self.config.coop);
            if let Ok(round) = &outcome {
                let q = round.equilibrium.price;
                for (id, &volume) in round.supplier_ids.iter().zip(&round.equilibrium.allocations) {
                    let at = self.index(*id);
                    sent[at] += volume;
                    price[at] = Some(q);
                }
                let at = self.index(demander_id);
                received[at] += round.delivered_energy;
                price[at] = Some(q);
                self.ledger.sent += round.equilibrium.total_volume;
                self.ledger.delivered += round.delivered_energy;
                self.ledger.lost += round.lost_energy;
            }
            self.rounds.push(RoundRecord {
                slot,
                demander_id,
                outcome,
            });
        }

        for (i, draw) in draws.iter().enumerate() {
            self.ledger.harvested += draw.harvested;
            self.ledger.demand += draw.demand;
            self.ledger.unmet += draw.unmet;
            self.records.push(SlotRecord {
                slot,
                node: draw.node,
                stored: self.nodes[i].stored(),
                harvested: draw.harvested,
                demand: draw.demand,
                consumed: draw.consumed,
                unmet: draw.unmet,
                sent: sent[i],
                received: received[i],
                price: price[i],
            });
        }
        self.ledger.current = self.nodes.iter().map(|n| n.stored()).sum();
        self.slot += 1;
        Ok(())
    }

    /// Runs the configured number of slots from where the run stands.
    pub fn run(&mut self) -> Result<()> {
        while self.slot < self.config.slots {
            self.step()?;
        }
        Ok(())
    }

    fn index(&self, id: usize) -> usize {
        self.nodes
            .binary_search_by_key(&id, |n| n.id())
            .expect("round ids come from the node list")
    }
}
