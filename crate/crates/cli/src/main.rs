use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use wpt_coop::config::{
    CostsSection, DampingSpec, GameName, MarketSection, ScenarioConfig, SimSection, SweepColumns,
    TrafficSection,
};
use wpt_coop::run::{load_config, run_scenario, Report};
use wpt_coop::{preset_config, preset_report};

const OUT_ENV: &str = "WPT_COOP_OUT_DIR";

#[derive(Parser)]
#[command(name = "wpt-coop", version, about = "Energy cooperation scenarios for harvesting sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce one of the reference figures as a table.
    Preset {
        /// fig2 .. fig8
        name: String,
        /// Print the preset's scenario file instead of running it.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a TOML scenario file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Expected cost against inventory level.
    Inventory(InventoryArgs),
    /// One market game, or a sweep over supplier counts.
    Market(MarketArgs),
    /// Seeded network simulation.
    Sim(SimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Args)]
struct Common {
    /// Output directory, or `-` for stdout. Defaults to $WPT_COOP_OUT_DIR,
    /// then the current directory.
    #[arg(long)]
    out: Option<String>,
    /// Simulation seed; replaces the scenario's own.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct InventoryArgs {
    /// Traffic quantities, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 20.0])]
    mu_tau: Vec<f64>,
    /// Energy per packet.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 4.0)]
    holding: f64,
    #[arg(long, default_value_t = 3.0)]
    shortage: f64,
    #[arg(long, default_value_t = 0.0)]
    purchase: f64,
    #[arg(long, default_value_t = 0.0)]
    setup: f64,
    /// Energy already stored.
    #[arg(long, default_value_t = 0.0)]
    stock: f64,
    #[arg(long)]
    max_level: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Game {
    Static,
    Cournot,
    Stackelberg,
}

impl From<Game> for GameName {
    fn from(g: Game) -> Self {
        match g {
            Game::Static => GameName::Static,
            Game::Cournot => GameName::Cournot,
            Game::Stackelberg => GameName::Stackelberg,
        }
    }
}

#[derive(Args)]
struct MarketArgs {
    #[arg(long, value_enum, default_value = "cournot")]
    game: Game,
    #[arg(long, default_value_t = 4)]
    suppliers: usize,
    /// Stackelberg leaders.
    #[arg(long, default_value_t = 1)]
    leaders: usize,
    /// Demander efficiency, bits per uJ.
    #[arg(long, default_value_t = 357.0)]
    k_d: f64,
    /// Selling cost coefficient shared by all suppliers.
    #[arg(long, default_value_t = 4.0)]
    coefficient: f64,
    /// Previous offers, comma separated, cycled over suppliers.
    #[arg(long, value_delimiter = ',')]
    histories: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Fixed damping step in (0, 1]; automatic when absent.
    #[arg(long)]
    damping: Option<f64>,
    /// Supplier counts, comma separated; produces a sweep over all games
    /// instead of one game.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SimArgs {
    /// Start from a scenario file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    slots: Option<u64>,
    #[arg(long, value_enum)]
    game: Option<Game>,
    #[arg(long)]
    transfer_efficiency: Option<f64>,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Preset {
            name,
            print_config,
            common,
        } => {
            if print_config {
                print!("{}", preset_config(&name)?);
                return Ok(());
            }
            let report = preset_report(&name)?;
            emit(&report, &common, None, &name, true)
        }
        Command::Run { config, common } => {
            let mut scenario = load_config(&config)?;
            if let Some(seed) = common.seed {
                scenario = scenario.with_seed(seed);
            }
            let stem = config
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("scenario")
                .to_string();
            let report = run_scenario(&scenario.validate()?)?;
            emit(&report, &common, scenario.output_dir(), &stem, false)
        }
        Command::Inventory(args) => {
            let scenario = ScenarioConfig {
                traffic: Some(TrafficSection {
                    a: Some(args.a),
                    mu_tau: Some(args.mu_tau),
                    max_level: args.max_level,
                    ..TrafficSection::default()
                }),
                costs: Some(CostsSection {
                    holding: Some(args.holding),
                    shortage: Some(args.shortage),
                    purchase: Some(args.purchase),
                    setup: Some(args.setup),
                    stock: Some(args.stock),
                }),
                ..ScenarioConfig::default()
            };
            let report = run_scenario(&scenario.validate()?)?;
            emit(&report, &args.common, None, "inventory", true)
        }
        Command::Market(args) => {
            let sweep = args.sweep.is_some();
            let game: GameName = args.game.into();
            let market = MarketSection {
                game: (!sweep).then_some(game),
                k_d: Some(args.k_d),
                coefficient: Some(args.coefficient),
                suppliers: Some(args.suppliers),
                m: (game == GameName::Stackelberg).then_some(args.leaders),
                histories: args.histories,
                tol: Some(args.tol),
                max_iterations: args.max_iterations,
                damping: args.damping.map(DampingSpec::Fixed),
                sweep: args.sweep,
                sweep_columns: sweep.then_some(SweepColumns::Both),
                ..MarketSection::default()
            };
            let scenario = ScenarioConfig {
                market: Some(market),
                ..ScenarioConfig::default()
            };
            let report = run_scenario(&scenario.validate()?)?;
            emit(&report, &args.common, None, "market", true)
        }
        Command::Sim(args) => {
            let mut scenario = match &args.config {
                Some(path) => load_config(path)?,
                None => ScenarioConfig::default(),
            };
            let sim = scenario.sim.get_or_insert_with(SimSection::default);
            if args.nodes.is_some() {
                sim.nodes = args.nodes;
            }
            sim.slots = args.slots.or(sim.slots).or(Some(100));
            if args.transfer_efficiency.is_some() {
                sim.transfer_efficiency = args.transfer_efficiency;
            }
            if let Some(seed) = args.common.seed {
                sim.seed = Some(seed);
            }
            if let Some(game) = args.game {
                scenario.market.get_or_insert_with(MarketSection::default).game = Some(game.into());
            }
            let mut plan = scenario.validate()?;
            plan.inventory = None;
            plan.market = None;
            plan.sweep = None;
            let report = run_scenario(&plan)?;
            let dir = scenario.output_dir().map(str::to_string);
            emit(&report, &args.common, dir.as_deref(), "sim", false)
        }
    }
}

/// Writes every table to the chosen destination and lists the files on
/// stderr.
fn emit(report: &Report, common: &Common, config_dir: Option<&str>, stem: &str, single: bool) -> anyhow::Result<()> {
    let Format::Csv = common.format;
    let env_dir = std::env::var(OUT_ENV).ok();
    let out = common
        .out
        .as_deref()
        .or(config_dir)
        .or(env_dir.as_deref())
        .unwrap_or(".");
    if out == "-" {
        let mut buf = Vec::new();
        report.write_stream(&mut buf)?;
        return match io::stdout().lock().write_all(&buf) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        };
    }
    let written = report
        .write_files(Path::new(out), stem, single)
        .with_context(|| format!("writing tables to {out}"))?;
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
