//! Discrete-time network of energy-harvesting nodes that trade energy.
//!
//! Each slot every node harvests, consumes a random demand drawn from its
//! traffic law, and then nodes below their order-up-to level buy from nodes
//! above it through the configured market game. Transfers lose a fixed
//! fraction of the energy in flight.

mod network;
mod node;
mod round;

pub use network::{step, EnergyLedger, RoundRecord, SimConfig, Simulation, SlotDraw, SlotRecord};
pub use node::{classify_nodes, Classification, NodeState};
pub use round::{run_cooperation_round, CoopConfig, CooperationRound, RoundAbort};
