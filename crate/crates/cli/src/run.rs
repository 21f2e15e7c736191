use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use wpt_coop_core::demand::{demand_distribution, TrafficProcess, DEFAULT_MASS_TOL};
use wpt_coop_core::inventory::{expected_cost, optimal_policy};
use wpt_coop_core::market::{
    leader_foc_residuals, nash_check, solve, EquilibriumResult, GameKind, MarketScenario,
};
use wpt_coop_core::sim::{classify_nodes, RoundAbort, Simulation};
use wpt_coop_core::Error;

use crate::config::{InventoryPlan, MarketPlan, Scenario, ScenarioConfig, SimPlan, SweepColumns, SweepPlan};
use crate::error::{CliError, Result};
use crate::report::{format_number, ReportTable};

/// Grid spacing of the unilateral-deviation check noted in market tables.
pub const NASH_STEP: f64 = 1e-3;

/// Tables from one run, with the precision they are written at.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub tables: Vec<ReportTable>,
    pub precision: usize,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&ReportTable> {
        self.tables.iter().find(|t| t.name() == name)
    }

    pub fn csv(&self, name: &str) -> Option<String> {
        self.table(name).map(|t| t.to_csv_string(self.precision))
    }

    /// Writes `<dir>/<stem>-<table>.csv` per table, or `<dir>/<stem>.csv`
    /// when there is a single table and `single_name` is set. Returns the
    /// paths written.
    pub fn write_files(&self, dir: &Path, stem: &str, single_name: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut written = Vec::new();
        for table in &self.tables {
            let file = if single_name && self.tables.len() == 1 {
                format!("{stem}.csv")
            } else {
                format!("{stem}-{}.csv", table.name())
            };
            let path = dir.join(file);
            fs::write(&path, table.to_csv_string(self.precision)).map_err(|source| CliError::Write {
                path: path.clone(),
                source,
            })?;
            written.push(path);
        }
        Ok(written)
    }

    /// All tables one after another, separated by blank lines.
    pub fn write_stream<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                writeln!(out).map_err(csv::Error::from)?;
            }
            table.write_csv(&mut out, self.precision)?;
        }
        Ok(())
    }
}

pub fn run_config(path: &Path) -> Result<Report> {
    let config = load_config(path)?;
    run_scenario(&config.validate()?)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ScenarioConfig::from_toml(&text)
}

pub fn run_scenario(scenario: &Scenario) -> Result<Report> {
    let p = scenario.precision;
    let mut tables = Vec::new();
    if let Some(plan) = &scenario.inventory {
        tables.push(inventory_table(plan, p)?);
    }
    if let Some(plan) = &scenario.market {
        tables.push(market_table(plan, p)?);
    }
    if let Some(plan) = &scenario.sweep {
        tables.push(sweep_table(plan)?);
    }
    if let Some(plan) = &scenario.sim {
        tables.extend(sim_tables(plan, p)?);
    }
    Ok(Report {
        tables,
        precision: p,
    })
}

fn core(context: &str) -> impl Fn(Error) -> CliError + '_ {
    move |source| CliError::Core {
        context: context.to_string(),
        source,
    }
}

fn inventory_table(plan: &InventoryPlan, precision: usize) -> Result<ReportTable> {
    let a = plan.energy_per_packet;
    let dists = plan
        .quantities
        .iter()
        .map(|&q| {
            TrafficProcess::with_quantity(q, a)
                .and_then(|t| demand_distribution(&t, DEFAULT_MASS_TOL))
                .map_err(core("inventory"))
        })
        .collect::<Result<Vec<_>>>()?;
    let top = plan.max_level.unwrap_or_else(|| {
        dists
            .iter()
            .map(|d| d.support()[d.len() - 1])
            .fold(0.0, f64::max)
    });
    let steps = (top / a + 1e-9).floor() as usize;

    let mut columns = vec!["S".to_string()];
    columns.extend(plan.quantities.iter().map(|q| format!("cost_mu_tau_{q}")));
    let mut table = ReportTable::new("inventory", columns, plan.hash.clone());
    table.note("costs", format!(
        "C_H={} C_S={} C_PUR={} c_se={} I={}",
        plan.costs.holding,
        plan.costs.shortage,
        plan.costs.purchase,
        plan.costs.setup,
        plan.stock.level()
    ));
    for (q, d) in plan.quantities.iter().zip(&dists) {
        let policy = optimal_policy(d, &plan.costs, plan.stock).map_err(core("inventory"))?;
        table.note(
            format!("optimum mu_tau={q}"),
            format!(
                "S*={} s={} cost={}",
                format_number(policy.order_up_to, precision),
                format_number(policy.reorder_point, precision),
                format_number(policy.expected_cost, precision)
            ),
        );
    }
    for j in 0..=steps {
        let level = j as f64 * a;
        let mut row = vec![Some(level)];
        for d in &dists {
            row.push(match expected_cost(level, d, &plan.costs, plan.stock) {
                Ok(c) => Some(c),
                Err(Error::OrderBelowStock { .. }) => None,
                Err(e) => return Err(core("inventory")(e)),
            });
        }
        table.push_row(row)?;
    }
    Ok(table)
}

fn market_table(plan: &MarketPlan, precision: usize) -> Result<ReportTable> {
    let scenario = &plan.scenario;
    let result = solve(scenario).map_err(core("market"))?;
    let count = scenario.suppliers.len();
    let mut columns = vec!["iteration".to_string()];
    columns.extend((1..=count).map(|i| format!("supplier_{i}")));
    columns.extend(["total".to_string(), "price".to_string()]);
    let mut table = ReportTable::new("market", columns, plan.hash.clone());
    table.note("game", result.game);
    table.note("suppliers", count);
    if result.game == GameKind::Stackelberg {
        table.note("leaders", result.leaders);
    }
    table.note("k_d", format_number(scenario.market_constant, precision));
    note_equilibrium(&mut table, &result, scenario, precision);
    for (i, volumes) in result.trace.iter().enumerate() {
        let total: f64 = volumes.iter().sum();
        let mut row = vec![i as f64];
        row.extend(volumes);
        row.push(total);
        row.push(scenario.market_constant - total);
        table.push_values(&row)?;
    }
    Ok(table)
}

fn note_equilibrium(table: &mut ReportTable, r: &EquilibriumResult, s: &MarketScenario, precision: usize) {
    table.note("converged", r.converged);
    table.note("iterations", r.iterations);
    if r.game != GameKind::Static {
        table.note("nash", nash_check(r, s, NASH_STEP));
    }
    if r.game == GameKind::Stackelberg {
        let worst = leader_foc_residuals(r, s)
            .into_iter()
            .fold(0.0, |m: f64, g| m.max(g.abs()));
        table.note("leader_foc_residual", format_number(worst, precision));
    }
    table.note("total", format_number(r.total_volume, precision));
    table.note("price", format_number(r.price, precision));
}

/// Sweep columns in output order: totals are named after the method,
/// prices carry a `_price` suffix.
pub const SWEEP_METHODS: [&str; 4] = ["static", "cournot", "stackelberg_1", "stackelberg_2"];

fn sweep_table(plan: &SweepPlan) -> Result<ReportTable> {
    let mut columns = vec!["suppliers".to_string()];
    let totals = matches!(plan.columns, SweepColumns::Total | SweepColumns::Both);
    let prices = matches!(plan.columns, SweepColumns::Price | SweepColumns::Both);
    if totals {
        columns.extend(SWEEP_METHODS.iter().map(|m| m.to_string()));
    }
    if prices {
        columns.extend(SWEEP_METHODS.iter().map(|m| format!("{m}_price")));
    }
    let mut table = ReportTable::new("sweep", columns, plan.hash.clone());
    table.note("k_d", plan.market_constant);
    table.note("cost_coefficient", plan.supplier.cost_coefficient());
    table.note("stackelberg_1", "one leader, M-1 followers");
    table.note("stackelberg_2", "M-1 leaders, one follower");
    let mut unconverged = Vec::new();
    for &m in &plan.counts {
        let results = [
            Some((GameKind::Static, 0)),
            Some((GameKind::Cournot, 0)),
            (m >= 2).then_some((GameKind::Stackelberg, 1)),
            (m >= 2).then_some((GameKind::Stackelberg, m - 1)),
        ]
        .into_iter()
        .zip(SWEEP_METHODS)
        .map(|(spec, method)| {
            let Some((game, leaders)) = spec else {
                return Ok(None);
            };
            let suppliers = (0..m)
                .map(|i| {
                    let mut s = plan.supplier;
                    s.initial_offer = plan.histories[i % plan.histories.len()];
                    s
                })
                .collect();
            let scenario = MarketScenario::new(plan.market_constant, suppliers, game)
                .map_err(core("sweep"))?
                .with_leaders(leaders)
                .with_settings(plan.settings);
            let r = solve(&scenario).map_err(core("sweep"))?;
            if !r.converged {
                unconverged.push(format!("{method}@{m}"));
            }
            Ok(Some(r))
        })
        .collect::<Result<Vec<_>>>()?;
        let mut row = vec![Some(m as f64)];
        if totals {
            row.extend(results.iter().map(|r| r.as_ref().map(|r| r.total_volume)));
        }
        if prices {
            row.extend(results.iter().map(|r| r.as_ref().map(|r| r.price)));
        }
        table.push_row(row)?;
    }
    if !unconverged.is_empty() {
        table.note("unconverged", unconverged.join(" "));
    }
    Ok(table)
}

fn sim_tables(plan: &SimPlan, precision: usize) -> Result<Vec<ReportTable>> {
    let mut nodes = ReportTable::new(
        "nodes",
        [
            "node",
            "stored",
            "harvest",
            "mu_tau",
            "order_up_to",
            "reorder_point",
            "role",
            "surplus",
            "deficit",
        ]
        .map(String::from)
        .to_vec(),
        plan.hash.clone(),
    );
    nodes.note("role", "1 supplier, -1 demander, 0 idle");
    let classes = classify_nodes(&plan.nodes);
    for n in &plan.nodes {
        let role = if classes.suppliers.iter().any(|s| s.0 == n.id()) {
            1.0
        } else if classes.demanders.iter().any(|d| d.0 == n.id()) {
            -1.0
        } else {
            0.0
        };
        nodes.push_values(&[
            n.id() as f64,
            n.stored(),
            n.harvest_rate(),
            n.traffic().traffic_quantity(),
            n.policy().order_up_to,
            n.policy().reorder_point,
            role,
            n.surplus(),
            n.deficit(),
        ])?;
    }

    let mut sim = Simulation::new(plan.nodes.clone(), plan.config).map_err(core("sim"))?;
    sim.run().map_err(core("sim"))?;

    let mut trace = ReportTable::new(
        "trace",
        [
            "slot", "node", "stored", "harvested", "demand", "consumed", "unmet", "sent", "received",
            "price",
        ]
        .map(String::from)
        .to_vec(),
        plan.hash.clone(),
    );
    let cfg = &plan.config;
    trace.note("seed", cfg.seed);
    trace.note("slots", cfg.slots);
    trace.note("game", cfg.coop.game);
    trace.note("transfer_efficiency", cfg.coop.transfer_efficiency);
    let rounds = sim.rounds();
    let count = |f: &dyn Fn(&RoundAbort) -> bool| {
        rounds
            .iter()
            .filter(|r| matches!(&r.outcome, Err(e) if f(e)))
            .count()
    };
    trace.note("rounds_completed", rounds.iter().filter(|r| r.outcome.is_ok()).count());
    trace.note(
        "rounds_no_suppliers",
        count(&|e| matches!(e, RoundAbort::NoSuppliers)),
    );
    trace.note(
        "rounds_not_converged",
        count(&|e| matches!(e, RoundAbort::NotConverged { .. })),
    );
    trace.note("rounds_failed", count(&|e| matches!(e, RoundAbort::Market(_))));
    let ledger = sim.ledger();
    trace.note("energy_lost", format_number(ledger.lost, precision));
    trace.note("ledger_imbalance", format!("{:e}", ledger.imbalance()));
    for r in sim.records() {
        trace.push_row(vec![
            Some(r.slot as f64),
            Some(r.node as f64),
            Some(r.stored),
            Some(r.harvested),
            Some(r.demand),
            Some(r.consumed),
            Some(r.unmet),
            Some(r.sent),
            Some(r.received),
            r.price,
        ])?;
    }
    Ok(vec![nodes, trace])
}
