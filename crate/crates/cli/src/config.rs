//! Scenario files.
//!
//! A scenario is a TOML document. Which tables a run produces depends on
//! which sections are present:
//!
//! * `[traffic]`: expected cost against inventory level, one column per
//!   traffic quantity.
//! * `[market]` with `game`: best-response trace of one market game.
//! * `[market]` with `sweep`: equilibrium totals and prices against the
//!   number of suppliers for every game.
//! * `[sim]` with `slots > 0`: node classification and the per-slot trace.
//!
//! Every field is checked before anything is computed; errors name the
//! field as `section.key`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use wpt_coop_core::channel::{dbm_to_watts, demander_efficiency, ChannelParams};
use wpt_coop_core::demand::TrafficProcess;
use wpt_coop_core::inventory::{CostParams, ExistingStock};
use wpt_coop_core::market::{Damping, GameKind, MarketScenario, SolverSettings, SupplierProfile};
use wpt_coop_core::scenarios::{self, OFFER_HISTORIES};
use wpt_coop_core::sim::{CoopConfig, NodeState, SimConfig};

use crate::error::{CliError, Result};

pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traffic: Option<TrafficSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<CostsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub market: Option<MarketSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficSection {
    /// Packet arrival rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Window length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Energy per packet.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Traffic quantities to tabulate; replaces `mu * tau` when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_tau: Option<Vec<f64>>,
    /// Highest inventory level in the cost table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_level: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostsSection {
    #[serde(rename = "C_H", default, skip_serializing_if = "Option::is_none")]
    pub holding: Option<f64>,
    #[serde(rename = "C_S", default, skip_serializing_if = "Option::is_none")]
    pub shortage: Option<f64>,
    #[serde(rename = "C_PUR", default, skip_serializing_if = "Option::is_none")]
    pub purchase: Option<f64>,
    #[serde(rename = "c_se", default, skip_serializing_if = "Option::is_none")]
    pub setup: Option<f64>,
    /// Existing stock.
    #[serde(rename = "I", default, skip_serializing_if = "Option::is_none")]
    pub stock: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    /// Rate threshold, bit/s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_b: Option<f64>,
    /// Bandwidth, Hz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_i: Option<f64>,
    /// Noise spectral density, dBm/Hz.
    #[serde(rename = "N_0", default, skip_serializing_if = "Option::is_none")]
    pub noise_dbm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameName {
    Static,
    Cournot,
    Stackelberg,
}

impl From<GameName> for GameKind {
    fn from(g: GameName) -> Self {
        match g {
            GameName::Static => GameKind::Static,
            GameName::Cournot => GameKind::Cournot,
            GameName::Stackelberg => GameKind::Stackelberg,
        }
    }
}

/// `"auto"` or a fixed step in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DampingSpec {
    Fixed(f64),
    Named(String),
}

/// A scalar shared by every supplier or one value per supplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerSupplier {
    One(f64),
    Each(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepColumns {
    Total,
    Price,
    Both,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameName>,
    /// Demander efficiency in bits per uJ; derived from `[channel]` when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_d: Option<f64>,
    /// Selling cost weight.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(rename = "D_i", default, skip_serializing_if = "Option::is_none")]
    pub traffic_quantity: Option<PerSupplier>,
    #[serde(rename = "P_req", default, skip_serializing_if = "Option::is_none")]
    pub required_power: Option<PerSupplier>,
    #[serde(rename = "S_i", default, skip_serializing_if = "Option::is_none")]
    pub stored_energy: Option<PerSupplier>,
    /// Replaces `w D_i (P_req / S_i)^2` for every supplier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suppliers: Option<usize>,
    /// Stackelberg leaders.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Stackelberg followers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Offers from the previous game, cycled over the suppliers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histories: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability_rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<DampingSpec>,
    /// Supplier counts for the sweep table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_columns: Option<SweepColumns>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer_efficiency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    /// Initial stored energy per node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stored: Option<PerSupplier>,
    /// Harvest per slot per node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harvest: Option<PerSupplier>,
    /// Traffic quantity per node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_tau: Option<PerSupplier>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Significant digits in CSV cells.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
}

/// Inventory cost curves.
#[derive(Debug, Clone, PartialEq)]
pub struct InventoryPlan {
    pub quantities: Vec<f64>,
    pub energy_per_packet: f64,
    pub costs: CostParams,
    pub stock: ExistingStock,
    pub max_level: Option<f64>,
    pub hash: String,
}

/// One market game.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketPlan {
    pub scenario: MarketScenario,
    pub hash: String,
}

/// Every game across a range of supplier counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub counts: Vec<usize>,
    pub columns: SweepColumns,
    pub market_constant: f64,
    pub supplier: SupplierProfile,
    pub histories: Vec<f64>,
    pub settings: SolverSettings,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimPlan {
    pub nodes: Vec<NodeState>,
    pub config: SimConfig,
    pub hash: String,
}

/// A validated scenario, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub inventory: Option<InventoryPlan>,
    pub market: Option<MarketPlan>,
    pub sweep: Option<SweepPlan>,
    pub sim: Option<SimPlan>,
    pub precision: usize,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config always serializes")
    }

    /// Replaces the simulation seed; no effect without a `[sim]` section.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let Some(sim) = self.sim.as_mut() {
            sim.seed = Some(seed);
        }
        self
    }

    pub fn output_dir(&self) -> Option<&str> {
        self.output.as_ref().and_then(|o| o.dir.as_deref())
    }

    pub fn validate(&self) -> Result<Scenario> {
        let precision = self
            .output
            .as_ref()
            .and_then(|o| o.precision)
            .unwrap_or(DEFAULT_PRECISION);
        if !(1..=17).contains(&precision) {
            return Err(CliError::invalid(
                "output.precision",
                format!("significant digits must lie in 1..=17 (got {precision})"),
            ));
        }
        let costs = self.cost_params()?;
        let market = self.market.clone().unwrap_or_default();
        let scenario = Scenario {
            inventory: self.inventory_plan(costs)?,
            market: match market.game {
                Some(game) => Some(self.market_plan(&market, game.into())?),
                None => None,
            },
            sweep: match &market.sweep {
                Some(counts) => Some(self.sweep_plan(&market, counts)?),
                None => None,
            },
            sim: self.sim_plan(&market, costs)?,
            precision,
        };
        if scenario.inventory.is_none()
            && scenario.market.is_none()
            && scenario.sweep.is_none()
            && scenario.sim.is_none()
        {
            return Err(CliError::invalid(
                "scenario",
                "nothing to run: add [traffic], market.game, market.sweep or [sim] with slots > 0",
            ));
        }
        Ok(scenario)
    }

    fn cost_params(&self) -> Result<(CostParams, ExistingStock)> {
        let c = self.costs.clone().unwrap_or_default();
        let holding = c.holding.unwrap_or(4.0);
        let shortage = c.shortage.unwrap_or(3.0);
        let purchase = c.purchase.unwrap_or(0.0);
        if holding + shortage <= 0.0 || (holding + shortage).is_nan() {
            return Err(CliError::invalid(
                "costs.C_S + costs.C_H",
                format!(
                    "critical ratio (C_S - C_PUR) / (C_S + C_H) needs C_S + C_H > 0 (got {})",
                    holding + shortage
                ),
            ));
        }
        let params = CostParams::new(holding, shortage, purchase, c.setup.unwrap_or(0.0))
            .map_err(|e| CliError::from_core("costs", e))?;
        let ratio = wpt_coop_core::inventory::critical_ratio(&params);
        if !(0.0..=1.0).contains(&ratio) {
            return Err(CliError::invalid(
                "costs.C_PUR",
                format!("critical ratio (C_S - C_PUR) / (C_S + C_H) must lie in [0, 1] (got {ratio})"),
            ));
        }
        let stock =
            ExistingStock::new(c.stock.unwrap_or(0.0)).map_err(|e| CliError::from_core("costs", e))?;
        Ok((params, stock))
    }

    fn traffic_defaults(&self) -> (f64, f64, f64) {
        let t = self.traffic.clone().unwrap_or_default();
        (
            t.mu.unwrap_or(5.0),
            t.tau.unwrap_or(1.0),
            t.a.unwrap_or(1.0),
        )
    }

    fn inventory_plan(&self, (costs, stock): (CostParams, ExistingStock)) -> Result<Option<InventoryPlan>> {
        let Some(t) = &self.traffic else {
            return Ok(None);
        };
        let (mu, tau, a) = self.traffic_defaults();
        let base = TrafficProcess::new(mu, tau, a).map_err(|e| CliError::from_core("traffic", e))?;
        let quantities = match &t.mu_tau {
            Some(list) if list.is_empty() => {
                return Err(CliError::invalid("traffic.mu_tau", "list must not be empty"))
            }
            Some(list) => {
                for &q in list {
                    TrafficProcess::with_quantity(q, a)
                        .map_err(|_| CliError::invalid("traffic.mu_tau", format!("traffic quantity must be finite and >= 0 (got {q})")))?;
                }
                list.clone()
            }
            None => vec![base.traffic_quantity()],
        };
        if let Some(level) = t.max_level {
            if !(level.is_finite() && level >= 0.0) {
                return Err(CliError::invalid(
                    "traffic.max_level",
                    format!("must be finite and >= 0 (got {level})"),
                ));
            }
        }
        let hash = digest(&[
            ("traffic", section_toml(&self.traffic)),
            ("costs", section_toml(&self.costs)),
        ]);
        Ok(Some(InventoryPlan {
            quantities,
            energy_per_packet: a,
            costs,
            stock,
            max_level: t.max_level,
            hash,
        }))
    }

    fn channel(&self) -> Result<ChannelParams> {
        let c = self.channel.clone().unwrap_or_default();
        let reference = scenarios::mote_channel();
        let noise = match c.noise_dbm {
            Some(dbm) if !dbm.is_finite() => {
                return Err(CliError::invalid("channel.N_0", format!("must be finite dBm/Hz (got {dbm})")))
            }
            Some(dbm) => dbm_to_watts(dbm),
            None => reference.noise_psd(),
        };
        ChannelParams::new(
            c.b_i.unwrap_or(reference.bandwidth()),
            noise,
            c.r_b.unwrap_or(reference.rate_threshold()),
        )
        .map_err(|e| CliError::from_core("channel", e))
    }

    fn market_constant(&self, market: &MarketSection) -> Result<f64> {
        match market.k_d {
            Some(k) if k.is_finite() && k > 0.0 => Ok(k),
            Some(k) => Err(CliError::invalid("market.k_d", format!("must be finite and > 0 (got {k})"))),
            None => {
                let ch = self.channel()?;
                demander_efficiency(&ch)
                    .map(|e| e * 1e-6)
                    .map_err(|_| CliError::invalid("channel.r_b", "must be > 0 to derive market.k_d"))
            }
        }
    }

    fn settings(market: &MarketSection) -> Result<SolverSettings> {
        let defaults = SolverSettings::default();
        let damping = match &market.damping {
            None => Damping::Auto,
            Some(DampingSpec::Named(name)) if name == "auto" => Damping::Auto,
            Some(DampingSpec::Named(name)) => {
                return Err(CliError::invalid(
                    "market.damping",
                    format!("expected \"auto\" or a number in (0, 1] (got \"{name}\")"),
                ))
            }
            Some(DampingSpec::Fixed(theta)) => Damping::Fixed(*theta),
        };
        let settings = SolverSettings {
            convergence_tol: market.tol.unwrap_or(defaults.convergence_tol),
            stability_rounds: market.stability_rounds.unwrap_or(defaults.stability_rounds),
            max_iterations: market.max_iterations.unwrap_or(defaults.max_iterations),
            damping,
        };
        settings.validate().map_err(|e| CliError::from_core("market", e))?;
        Ok(settings)
    }

    fn histories(market: &MarketSection) -> Result<Vec<f64>> {
        let histories = market
            .histories
            .clone()
            .unwrap_or_else(|| OFFER_HISTORIES.to_vec());
        if histories.is_empty() {
            return Err(CliError::invalid("market.histories", "list must not be empty"));
        }
        if let Some(h) = histories.iter().find(|h| !(h.is_finite() && **h >= 0.0)) {
            return Err(CliError::invalid(
                "market.histories",
                format!("offers must be finite and >= 0 (got {h})"),
            ));
        }
        Ok(histories)
    }

    /// Supplier `index` out of `count`.
    fn supplier(market: &MarketSection, index: usize, count: usize, offer: f64) -> Result<SupplierProfile> {
        let reference = scenarios::mote_supplier();
        let pick = |value: &Option<PerSupplier>, field: &str, default: f64| -> Result<f64> {
            match value {
                None => Ok(default),
                Some(PerSupplier::One(v)) => Ok(*v),
                Some(PerSupplier::Each(list)) if list.len() == count => Ok(list[index]),
                Some(PerSupplier::Each(list)) => Err(CliError::invalid(
                    format!("market.{field}"),
                    format!("needs one value or {count} values (got {})", list.len()),
                )),
            }
        };
        let mut profile = SupplierProfile::new(
            pick(&market.stored_energy, "S_i", reference.stored_energy)?,
            pick(&market.required_power, "P_req", reference.required_power)?,
            pick(&market.traffic_quantity, "D_i", reference.traffic_quantity)?,
            market.w.unwrap_or(reference.cost_weight),
        )
        .and_then(|p| p.initial_offer(offer))
        .map_err(|e| CliError::from_core("market", e))?;
        if let Some(c) = market.coefficient {
            if !(c.is_finite() && c >= 0.0) {
                return Err(CliError::invalid(
                    "market.coefficient",
                    format!("must be finite and >= 0 (got {c})"),
                ));
            }
            profile.coefficient_override = Some(c);
        }
        Ok(profile)
    }

    fn market_plan(&self, market: &MarketSection, game: GameKind) -> Result<MarketPlan> {
        let histories = Self::histories(market)?;
        let leaders = if game == GameKind::Stackelberg {
            market.m.unwrap_or(1)
        } else {
            0
        };
        let count = match (market.suppliers, game, market.n) {
            (Some(count), _, _) => count,
            (None, GameKind::Stackelberg, Some(n)) => leaders + n,
            (None, _, _) => histories.len(),
        };
        if count == 0 {
            return Err(CliError::invalid("market.suppliers", "market needs at least one supplier"));
        }
        if game == GameKind::Stackelberg {
            if let Some(n) = market.n {
                if leaders + n != count {
                    return Err(CliError::invalid(
                        "market.n",
                        format!("m + n must equal the supplier count {count} (got {})", leaders + n),
                    ));
                }
            }
            if leaders == 0 || leaders >= count {
                return Err(CliError::invalid(
                    "market.m",
                    format!("stackelberg needs 1 <= m < suppliers = {count} (got {leaders})"),
                ));
            }
        }
        let suppliers = (0..count)
            .map(|i| Self::supplier(market, i, count, histories[i % histories.len()]))
            .collect::<Result<Vec<_>>>()?;
        let scenario = MarketScenario::new(self.market_constant(market)?, suppliers, game)
            .map_err(|e| CliError::from_core("market", e))?
            .with_leaders(leaders)
            .with_settings(Self::settings(market)?);
        if game == GameKind::Static {
            let c = scenario.suppliers[0].cost_coefficient();
            if let Some(i) = scenario.suppliers.iter().position(|s| s.cost_coefficient() != c) {
                return Err(CliError::invalid(
                    "market",
                    format!("static game needs identical suppliers; supplier {} differs from supplier 1", i + 1),
                ));
            }
        }
        Ok(MarketPlan {
            scenario,
            hash: self.market_hash(),
        })
    }

    fn sweep_plan(&self, market: &MarketSection, counts: &[usize]) -> Result<SweepPlan> {
        if counts.is_empty() || counts.contains(&0) {
            return Err(CliError::invalid(
                "market.sweep",
                "needs a non-empty list of supplier counts >= 1",
            ));
        }
        for (field, value) in [
            ("S_i", &market.stored_energy),
            ("P_req", &market.required_power),
            ("D_i", &market.traffic_quantity),
        ] {
            if matches!(value, Some(PerSupplier::Each(_))) {
                return Err(CliError::invalid(
                    format!("market.{field}"),
                    "a sweep uses identical suppliers; give a single value",
                ));
            }
        }
        Ok(SweepPlan {
            counts: counts.to_vec(),
            columns: market.sweep_columns.unwrap_or(SweepColumns::Both),
            market_constant: self.market_constant(market)?,
            supplier: Self::supplier(market, 0, 1, 0.0)?,
            histories: Self::histories(market)?,
            settings: Self::settings(market)?,
            hash: self.market_hash(),
        })
    }

    fn market_hash(&self) -> String {
        let channel = match self.market.as_ref().and_then(|m| m.k_d) {
            Some(_) => String::new(),
            None => section_toml(&self.channel),
        };
        digest(&[("channel", channel), ("market", section_toml(&self.market))])
    }

    fn sim_plan(
        &self,
        market: &MarketSection,
        (costs, _): (CostParams, ExistingStock),
    ) -> Result<Option<SimPlan>> {
        let Some(sim) = &self.sim else {
            return Ok(None);
        };
        let slots = sim.slots.unwrap_or(0);
        if slots == 0 {
            return Ok(None);
        }
        let list_len = [&sim.stored, &sim.harvest, &sim.mu_tau]
            .into_iter()
            .find_map(|v| match v {
                Some(PerSupplier::Each(list)) => Some(list.len()),
                _ => None,
            });
        let count = sim.nodes.or(list_len).unwrap_or(10);
        if count == 0 {
            return Err(CliError::invalid("sim.nodes", "network needs at least one node"));
        }
        let pick = |value: &Option<PerSupplier>, field: &str, i: usize, default: f64| -> Result<f64> {
            match value {
                None => Ok(default),
                Some(PerSupplier::One(v)) => Ok(*v),
                Some(PerSupplier::Each(list)) if list.len() == count => Ok(list[i]),
                Some(PerSupplier::Each(list)) => Err(CliError::invalid(
                    format!("sim.{field}"),
                    format!("needs one value or {count} values (got {})", list.len()),
                )),
            }
        };
        let (_, _, a) = self.traffic_defaults();
        let channel = self.channel()?;
        let nodes = (0..count)
            .map(|i| {
                let stored = pick(&sim.stored, "stored", i, 3.0 * i as f64)?;
                let harvest = pick(&sim.harvest, "harvest", i, [2.0, 9.0, 4.0, 12.0, 5.0][i % 5])?;
                let mu_tau = pick(&sim.mu_tau, "mu_tau", i, [5.0, 6.0, 8.0, 4.0, 10.0][(i * 3) % 5])?;
                let traffic = TrafficProcess::with_quantity(mu_tau, a)
                    .map_err(|e| CliError::from_core("sim", e))?;
                NodeState::new(i, stored, harvest, traffic, channel, costs).map_err(|e| match e {
                    wpt_coop_core::Error::InvalidParameter { field: "stored_energy", .. } => {
                        CliError::invalid("sim.stored", "stored energy must be finite and >= 0")
                    }
                    wpt_coop_core::Error::InvalidParameter { field: "harvest_rate", .. } => {
                        CliError::invalid("sim.harvest", "harvest must be finite and >= 0")
                    }
                    other => CliError::from_core("sim", other),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let efficiency = sim
            .transfer_efficiency
            .unwrap_or(scenarios::TRANSFER_EFFICIENCY);
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(CliError::invalid(
                "sim.transfer_efficiency",
                format!("must lie in [0, 1] (got {efficiency})"),
            ));
        }
        let w = market.w.unwrap_or(scenarios::mote_supplier().cost_weight);
        if !(w.is_finite() && w >= 0.0) {
            return Err(CliError::invalid("market.w", format!("must be finite and >= 0 (got {w})")));
        }
        if let Some(c) = market.coefficient {
            if !(c.is_finite() && c >= 0.0) {
                return Err(CliError::invalid(
                    "market.coefficient",
                    format!("must be finite and >= 0 (got {c})"),
                ));
            }
        }
        let coop = CoopConfig {
            game: market.game.map(GameKind::from).unwrap_or(GameKind::Stackelberg),
            leaders: market.m.unwrap_or(1).max(1),
            market_constant: match market.k_d {
                Some(_) => Some(self.market_constant(market)?),
                None => None,
            },
            cost_weight: w,
            coefficient_override: market.coefficient,
            settings: Self::settings(market)?,
            transfer_efficiency: efficiency,
        };
        let mut hashed = self.clone();
        hashed.output = None;
        Ok(Some(SimPlan {
            nodes,
            config: SimConfig {
                slots,
                seed: sim.seed.unwrap_or(0),
                coop,
            },
            hash: digest(&[("scenario", hashed.to_toml())]),
        }))
    }
}

fn section_toml<T: Serialize>(section: &Option<T>) -> String {
    match section {
        Some(s) => toml::to_string(s).expect("config sections always serialize"),
        None => String::new(),
    }
}

/// SHA-256 over the named parts, hex encoded.
fn digest(parts: &[(&str, String)]) -> String {
    let mut hasher = Sha256::new();
    for (name, body) in parts {
        hasher.update(format!("[{name}]\n{body}\n").as_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
