use std::fs;
use std::process::Command;

use proptest::prelude::*;
use tempfile::TempDir;

use wpt_coop::report::{format_number, round_significant};
use wpt_coop::{preset_config, preset_report, run_config, run_preset, CliError, ReportTable, ScenarioConfig, PRESET_NAMES};

const BIN: &str = env!("CARGO_BIN_EXE_wpt-coop");

const SMALL_NETWORK: &str = r#"
[market]
game = "cournot"
k_d = 357.0
coefficient = 4.0
suppliers = 4
histories = [29.5, 21.6, 24.7, 23.4]

[sim]
slots = 50
seed = 7
nodes = 6
"#;

fn write(dir: &TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn preset_config_file_reproduces_preset() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "fig2.toml", preset_config("fig2").unwrap());
    let from_file = run_config(&path).unwrap();
    let preset = preset_report("fig2").unwrap();
    assert_eq!(from_file.csv("inventory").unwrap(), preset.csv("inventory").unwrap());
}

#[test]
fn presets_are_reproducible() {
    for name in PRESET_NAMES {
        let a = run_preset(name).unwrap();
        let b = run_preset(name).unwrap();
        assert_eq!(a.to_csv_string(12), b.to_csv_string(12), "{name}");
    }
}

#[test]
fn inventory_preset_optimum() {
    let t = run_preset("fig2").unwrap();
    let costs = t.column("cost_mu_tau_5").unwrap();
    let levels = t.column("S").unwrap();
    let (at, best) = costs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|c| (i, c)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert_eq!(levels[at], Some(4.0));
    assert!((best - 6.057904946346).abs() < 1e-9);
}

#[test]
fn sweep_static_four_suppliers() {
    let t = run_preset("fig6").unwrap();
    let m = t.column("suppliers").unwrap();
    let at = m.iter().position(|v| *v == Some(4.0)).unwrap();
    assert_eq!(t.column("static").unwrap()[at], Some(89.25));
}

#[test]
fn sweep_prices_complement_totals() {
    let t = run_preset("fig8").unwrap();
    for method in ["static", "cournot", "stackelberg_1", "stackelberg_2"] {
        let totals = t.column(method).unwrap();
        let prices = t.column(&format!("{method}_price")).unwrap();
        for (total, price) in totals.iter().zip(&prices) {
            let (total, price) = (total.unwrap(), price.unwrap());
            assert!((price - (357.0 - total)).abs() < 1e-9, "{method}: {price} vs {total}");
        }
    }
}

#[test]
fn cournot_preset_converges_to_symmetric_offer() {
    let t = run_preset("fig4").unwrap();
    let last = t.rows().last().unwrap();
    for cell in &last[1..5] {
        assert!((cell.unwrap() - 357.0 / 13.0).abs() < 1e-6);
    }
    assert!(t.notes().iter().any(|(k, v)| k == "nash" && v == "true"));
}

#[test]
fn degenerate_critical_ratio_names_field() {
    let cfg = ScenarioConfig::from_toml("[traffic]\nmu_tau = [5.0]\n[costs]\nC_H = 0.0\nC_S = 0.0\n").unwrap();
    let err = cfg.validate().unwrap_err();
    let text = err.to_string();
    assert!(matches!(err, CliError::Invalid { .. }), "{text}");
    assert!(text.contains("costs.C_S + costs.C_H"), "{text}");
    assert!(text.contains("critical ratio"), "{text}");
}

#[test]
fn unknown_fields_are_rejected() {
    assert!(ScenarioConfig::from_toml("[costs]\nC_X = 1.0\n").is_err());
    assert!(ScenarioConfig::from_toml("[bogus]\n").is_err());
}

#[test]
fn out_of_range_values_name_their_field() {
    let cases = [
        ("[traffic]\nmu_tau = [-1.0]\n", "traffic"),
        ("[market]\ngame = \"cournot\"\nsuppliers = 0\n", "market"),
        ("[market]\ngame = \"cournot\"\ntol = 0.0\n", "market.tol"),
        ("[sim]\nslots = 10\ntransfer_efficiency = 1.5\n", "sim.transfer_efficiency"),
    ];
    for (text, field) in cases {
        let err = ScenarioConfig::from_toml(text).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains(field), "{text}: {err}");
    }
}

#[test]
fn empty_scenario_is_an_error() {
    assert!(ScenarioConfig::default().validate().is_err());
}

#[test]
fn seed_changes_only_the_simulation() {
    let base = ScenarioConfig::from_toml(SMALL_NETWORK).unwrap();
    let a = wpt_coop::run_scenario(&base.validate().unwrap()).unwrap();
    let b = wpt_coop::run_scenario(&base.clone().with_seed(8).validate().unwrap()).unwrap();
    assert_eq!(a.csv("market").unwrap(), b.csv("market").unwrap());
    assert_ne!(a.csv("trace").unwrap(), b.csv("trace").unwrap());
    let again = wpt_coop::run_scenario(&base.validate().unwrap()).unwrap();
    assert_eq!(a.csv("trace").unwrap(), again.csv("trace").unwrap());
}

#[test]
fn trace_ledger_balances() {
    let cfg = ScenarioConfig::from_toml(SMALL_NETWORK).unwrap();
    let report = wpt_coop::run_scenario(&cfg.validate().unwrap()).unwrap();
    let trace = report.table("trace").unwrap();
    let imbalance: f64 = trace
        .notes()
        .iter()
        .find(|(k, _)| k == "ledger_imbalance")
        .unwrap()
        .1
        .parse()
        .unwrap();
    assert!(imbalance.abs() < 1e-9);
}

#[test]
fn config_round_trips_through_toml() {
    let cfg = ScenarioConfig::from_toml(SMALL_NETWORK).unwrap();
    assert_eq!(ScenarioConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
}

#[test]
fn csv_round_trips() {
    let t = run_preset("fig8").unwrap();
    let text = t.to_csv_string(12);
    let back = ReportTable::from_csv(&text).unwrap();
    assert_eq!(back.to_csv_string(12), text);
    assert_eq!(back.columns(), t.columns());
}

proptest! {
    #[test]
    fn cells_keep_twelve_digits(x in prop_oneof![-1e6..1e6f64, 1e-12..1e-3f64, 1e14..1e20f64]) {
        let text = format_number(x, 12);
        let parsed: f64 = text.parse().unwrap();
        prop_assert_eq!(parsed, round_significant(x, 12));
        if x != 0.0 {
            prop_assert!(((parsed - x) / x).abs() <= 5e-12);
        }
    }

    #[test]
    fn table_cells_round_trip(values in prop::collection::vec(prop::option::of(-1e9..1e9f64), 1..30)) {
        let mut t = ReportTable::new("p", vec!["v".into()], "h");
        for v in &values {
            t.push_row(vec![*v]).unwrap();
        }
        let back = ReportTable::from_csv(&t.to_csv_string(12)).unwrap();
        let expected: Vec<Option<f64>> = values.iter().map(|v| v.map(|x| round_significant(x, 12))).collect();
        prop_assert_eq!(back.column("v").unwrap(), expected);
    }
}

#[test]
fn binary_writes_to_out_dir() {
    let dir = TempDir::new().unwrap();
    let status = Command::new(BIN)
        .args(["preset", "fig4", "--out"])
        .arg(dir.path())
        .env_remove("WPT_COOP_OUT_DIR")
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(dir.path().join("fig4.csv")).unwrap();
    assert_eq!(text, run_preset("fig4").unwrap().to_csv_string(12));
}

#[test]
fn binary_streams_to_stdout() {
    let out = Command::new(BIN).args(["preset", "fig7", "--out", "-"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# tool: wpt-coop "));
    assert!(text.contains("# table: sweep"));
}

#[test]
fn binary_honours_env_dir() {
    let dir = TempDir::new().unwrap();
    let status = Command::new(BIN)
        .args(["inventory", "--mu-tau", "5"])
        .env("WPT_COOP_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("inventory.csv").exists());
}

#[test]
fn binary_runs_config_files() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "net.toml", SMALL_NETWORK);
    let out = dir.path().join("out");
    let status = Command::new(BIN)
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("net-market.csv").exists());
    assert!(out.join("net-trace.csv").exists());
}

#[test]
fn binary_fails_cleanly() {
    let out = Command::new(BIN).args(["preset", "fig9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error:"), "{err}");
    assert!(err.contains("fig2"), "{err}");

    let dir = TempDir::new().unwrap();
    let path = write(&dir, "bad.toml", "[costs]\nC_H = 0.0\nC_S = 0.0\n[traffic]\nmu_tau = [5.0]\n");
    let out = Command::new(BIN).arg("run").arg(&path).arg("--out").arg("-").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("costs.C_S + costs.C_H"));

    let out = Command::new(BIN).arg("run").arg(dir.path().join("missing.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
