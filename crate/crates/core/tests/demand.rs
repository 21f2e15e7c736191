use proptest::prelude::*;
use wpt_coop_core::demand::{
    demand_cdf, demand_distribution, packet_pmf, DemandDistribution, TrafficProcess, DEFAULT_MASS_TOL,
};

fn dist(mu_tau: f64, a: f64) -> DemandDistribution {
    demand_distribution(&TrafficProcess::with_quantity(mu_tau, a).unwrap(), DEFAULT_MASS_TOL).unwrap()
}

#[test]
fn frozen_poisson_values() {
    let p = TrafficProcess::with_quantity(5.0, 1.0).unwrap();
    assert!((packet_pmf(&p, 0).unwrap() - 0.006737946999085467).abs() < 1e-15);
    assert!((packet_pmf(&p, 5).unwrap() - 0.1754673697678507).abs() < 1e-14);
    let d = dist(5.0, 1.0);
    assert!((demand_cdf(&d, 4.0) - 0.4404932850652124).abs() < 1e-13);
    assert!((demand_cdf(&d, 7.0) - 0.8666283259299927).abs() < 1e-13);
}

#[test]
fn negative_count_is_a_domain_error() {
    let p = TrafficProcess::with_quantity(5.0, 1.0).unwrap();
    assert!(packet_pmf(&p, -1).is_err());
}

#[test]
fn window_and_rate_only_enter_as_product() {
    let a = TrafficProcess::new(2.0, 5.0, 1.0).unwrap();
    let b = TrafficProcess::new(10.0, 1.0, 1.0).unwrap();
    for k in 0..30 {
        assert_eq!(packet_pmf(&a, k).unwrap(), packet_pmf(&b, k).unwrap());
    }
}

#[test]
fn energy_per_packet_scales_support() {
    let d = dist(7.0, 2.5);
    for (i, &level) in d.support().iter().enumerate() {
        assert_eq!(level, 2.5 * i as f64);
    }
}

proptest! {
    #[test]
    fn mass_and_monotone_cdf(mu_tau in 0.0f64..200.0) {
        let d = dist(mu_tau, 1.0);
        let mass = d.total_mass();
        prop_assert!(mass >= 1.0 - DEFAULT_MASS_TOL - 1e-12);
        prop_assert!(mass <= 1.0 + 1e-12);
        for i in 1..d.len() {
            prop_assert!(d.cdf_at_index(i) >= d.cdf_at_index(i - 1));
        }
    }

    #[test]
    fn pmf_matches_recurrence(mu_tau in 0.01f64..300.0) {
        let p = TrafficProcess::with_quantity(mu_tau, 1.0).unwrap();
        let mut expected = (-mu_tau).exp();
        for k in 0..60i64 {
            let got = packet_pmf(&p, k).unwrap();
            if expected > 1e-250 {
                prop_assert!((got - expected).abs() <= 1e-10 * expected);
            }
            expected *= mu_tau / (k + 1) as f64;
        }
    }

    #[test]
    fn mode_is_floor_of_mean(mu_tau in 0.1f64..100.0) {
        prop_assume!((mu_tau - mu_tau.round()).abs() > 1e-6);
        let d = dist(mu_tau, 1.0);
        let mode = d
            .probabilities()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        prop_assert_eq!(mode, mu_tau.floor() as usize);
    }

    #[test]
    fn mean_tracks_traffic_quantity(mu_tau in 0.0f64..150.0, a in 0.1f64..5.0) {
        let d = dist(mu_tau, a);
        prop_assert!((d.mean() - a * mu_tau).abs() <= 1e-9 * (1.0 + a * mu_tau));
    }

    #[test]
    fn quantile_inverts_cdf(mu_tau in 0.5f64..50.0, u in 0.0f64..0.999_999) {
        let d = dist(mu_tau, 1.0);
        let level = d.quantile(u);
        prop_assert!(demand_cdf(&d, level) > u);
        if level > 0.0 {
            prop_assert!(demand_cdf(&d, level - 1.0) <= u);
        }
    }
}

#[test]
fn malformed_parts_are_rejected() {
    assert!(DemandDistribution::from_parts(vec![0.0, 1.0], vec![0.5]).is_err());
    assert!(DemandDistribution::from_parts(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
    assert!(DemandDistribution::from_parts(vec![0.0, 1.0], vec![0.5, 0.4]).is_err());
    assert!(DemandDistribution::from_parts(vec![0.0, 1.0], vec![-0.1, 1.1]).is_err());
    assert!(DemandDistribution::from_parts(vec![0.0, 1.0], vec![0.5, 0.5]).is_ok());
}

#[test]
fn invalid_traffic_names_the_field() {
    let err = TrafficProcess::new(-1.0, 1.0, 1.0).unwrap_err().to_string();
    assert!(err.contains("mu"), "{err}");
    let err = TrafficProcess::new(1.0, 0.0, 1.0).unwrap_err().to_string();
    assert!(err.contains("tau"), "{err}");
}
