//! Energy cooperation for energy-harvesting wireless sensor networks with
//! wireless power transfer.
//!
//! Each node keeps an (s, S) energy inventory sized against its Poisson
//! traffic load ([`inventory`]). Nodes holding more than their order-up-to
//! level sell the surplus to nodes in deficit through a quantity-setting
//! market ([`market`]): a Cournot game, a Stackelberg leader/follower game,
//! or a static equal-share baseline. [`sim`] runs the whole cooperation
//! protocol over a seeded discrete-time network.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channel;
pub mod demand;
mod error;
pub mod inventory;
pub mod market;
pub mod scenarios;
pub mod sim;

pub use error::{Error, Result};
