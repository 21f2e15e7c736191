use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use wpt_coop_core::demand::TrafficProcess;
use wpt_coop_core::inventory::CostParams;
use wpt_coop_core::market::GameKind;
use wpt_coop_core::scenarios::mote_channel;
use wpt_coop_core::sim::{
    classify_nodes, run_cooperation_round, step, CoopConfig, NodeState, RoundAbort, SimConfig, Simulation,
};

fn node(id: usize, stored: f64, harvest: f64, mu_tau: f64) -> NodeState {
    let traffic = TrafficProcess::with_quantity(mu_tau, 1.0).unwrap();
    let costs = CostParams::holding_shortage(4.0, 3.0).unwrap();
    NodeState::new(id, stored, harvest, traffic, mote_channel(), costs).unwrap()
}

fn ten_nodes() -> Vec<NodeState> {
    (0..10)
        .map(|i| {
            let harvest = [2.0, 9.0, 4.0, 12.0, 5.0][i % 5];
            let mu_tau = [5.0, 6.0, 8.0, 4.0, 10.0][(i * 3) % 5];
            node(i, 3.0 * i as f64, harvest, mu_tau)
        })
        .collect()
}

fn reference_round() -> CoopConfig {
    CoopConfig {
        game: GameKind::Cournot,
        market_constant: Some(357.0),
        coefficient_override: Some(4.0),
        ..CoopConfig::default()
    }
}

#[test]
fn four_uniform_suppliers_debit_and_credit() {
    let mut nodes = vec![
        node(0, 0.0, 0.0, 5.0),
        node(1, 1000.0, 0.0, 5.0),
        node(2, 1000.0, 0.0, 5.0),
        node(3, 1000.0, 0.0, 5.0),
        node(4, 1000.0, 0.0, 5.0),
    ];
    let round = run_cooperation_round(&mut nodes, 0, &reference_round()).unwrap();
    let debit: f64 = nodes[1..].iter().map(|n| 1000.0 - n.stored()).sum();
    assert!((debit - 109.846_153_846).abs() < 1e-5, "{debit}");
    assert!((nodes[0].stored() - 54.923_076_923).abs() < 1e-5);
    assert_eq!(round.delivered_energy, 0.5 * round.equilibrium.total_volume);
    for (n, p) in nodes[1..].iter().zip(&round.equilibrium.allocations) {
        assert_eq!(n.transfer_ledger(), -p);
    }
}

#[test]
fn classification_is_a_partition() {
    let nodes = ten_nodes();
    let c = classify_nodes(&nodes);
    let mut ids: Vec<usize> = c
        .suppliers
        .iter()
        .map(|s| s.0)
        .chain(c.demanders.iter().map(|d| d.0))
        .chain(c.idle.iter().copied())
        .collect();
    ids.sort_unstable();
    assert_eq!(ids, (0..10).collect::<Vec<_>>());
}

#[test]
fn zero_harvest_zero_traffic_is_static() {
    let mut nodes = vec![node(0, 7.0, 0.0, 0.0), node(1, 3.0, 0.0, 0.0)];
    let before = nodes.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for slot in 0..100 {
        step(&mut nodes, slot, &mut rng).unwrap();
    }
    assert_eq!(nodes, before);
}

#[test]
fn harvest_minus_demand_drift() {
    let config = SimConfig {
        slots: 1000,
        seed: 2024,
        ..SimConfig::default()
    };
    let mut sim = Simulation::new(vec![node(0, 100.0, 10.0, 5.0)], config).unwrap();
    sim.run().unwrap();
    let drift = (sim.nodes()[0].stored() - 100.0) / 1000.0;
    assert!((drift - 5.0).abs() < 0.5, "{drift}");
}

#[test]
fn ten_node_run_balances_and_replays() {
    let config = SimConfig {
        slots: 1000,
        seed: 77,
        ..SimConfig::default()
    };
    let mut a = Simulation::new(ten_nodes(), config).unwrap();
    a.run().unwrap();
    assert!(a.ledger().imbalance().abs() < 1e-9, "{:?}", a.ledger());
    assert!(a.rounds().iter().any(|r| r.outcome.is_ok()));
    assert!(a.records().iter().all(|r| r.stored >= 0.0));

    let mut b = Simulation::new(ten_nodes(), config).unwrap();
    b.run().unwrap();
    assert_eq!(a.records(), b.records());
    assert_eq!(a.rounds(), b.rounds());

    let mut c = Simulation::new(ten_nodes(), SimConfig { seed: 78, ..config }).unwrap();
    c.run().unwrap();
    assert_ne!(a.records(), c.records());
}

#[test]
fn scheduled_traffic_changes_policy() {
    let mut n = node(0, 50.0, 0.0, 5.0);
    n.schedule_traffic(3, TrafficProcess::with_quantity(20.0, 1.0).unwrap());
    let mut sim = Simulation::new(vec![n], SimConfig { slots: 5, ..SimConfig::default() }).unwrap();
    sim.run().unwrap();
    assert_eq!(sim.nodes()[0].policy().order_up_to, 19.0);
}

#[test]
fn aborts_are_recorded() {
    let nodes = vec![node(0, 0.0, 0.0, 5.0), node(1, 0.0, 0.0, 5.0)];
    let mut sim = Simulation::new(nodes, SimConfig { slots: 1, ..SimConfig::default() }).unwrap();
    sim.run().unwrap();
    assert!(!sim.rounds().is_empty());
    assert!(sim.rounds().iter().all(|r| r.outcome == Err(RoundAbort::NoSuppliers)));
}

fn network() -> impl Strategy<Value = Vec<NodeState>> {
    prop::collection::vec((0.0f64..60.0, 0.0f64..12.0, 0.5f64..12.0), 2..8).prop_map(|specs| {
        specs
            .into_iter()
            .enumerate()
            .map(|(i, (s, h, mu))| node(i, s, h, mu))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ledger_identity_holds(nodes in network(), seed in any::<u64>(), game in prop::sample::select(vec![GameKind::Static, GameKind::Cournot, GameKind::Stackelberg])) {
        let coop = CoopConfig { game, ..CoopConfig::default() };
        let config = SimConfig { slots: 60, seed, coop };
        let mut sim = Simulation::new(nodes, config).unwrap();
        sim.run().unwrap();
        let l = sim.ledger();
        prop_assert!(l.imbalance().abs() < 1e-9 * (1.0 + l.initial + l.harvested));
        prop_assert!((l.sent - l.delivered - l.lost).abs() < 1e-9 * (1.0 + l.sent));
        prop_assert!(sim.nodes().iter().all(|n| n.stored() >= 0.0));
    }

    #[test]
    fn failed_rounds_leave_state_untouched(nodes in network(), demander in 0usize..8) {
        let mut nodes = nodes;
        let cfg = CoopConfig {
            game: GameKind::Cournot,
            settings: wpt_coop_core::market::SolverSettings { max_iterations: 1, ..Default::default() },
            ..CoopConfig::default()
        };
        let before = nodes.clone();
        let outcome = run_cooperation_round(&mut nodes, demander, &cfg);
        if outcome.is_err() {
            prop_assert_eq!(&nodes, &before);
            for (a, b) in nodes.iter().zip(&before) {
                prop_assert_eq!(a.stored().to_bits(), b.stored().to_bits());
            }
        }
    }

    #[test]
    fn successful_rounds_conserve(nodes in network(), demander in 0usize..8) {
        let mut nodes = nodes;
        let before = nodes.clone();
        if let Ok(round) = run_cooperation_round(&mut nodes, demander, &CoopConfig::default()) {
            for (id, p) in round.supplier_ids.iter().zip(&round.equilibrium.allocations) {
                let delta = before[*id].stored() - nodes[*id].stored();
                prop_assert!((delta - p).abs() < 1e-12 * (1.0 + p));
                prop_assert!(nodes[*id].stored() >= nodes[*id].policy().order_up_to - 1e-9);
            }
            let gain = nodes[demander].stored() - before[demander].stored();
            prop_assert!((gain - round.delivered_energy).abs() < 1e-12 * (1.0 + gain));
        }
    }
}
