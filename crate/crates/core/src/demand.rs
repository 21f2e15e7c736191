//! Packet arrivals and the energy demand they induce at a node.
//!
//! Packets arrive as a Poisson process with rate `mu` over a window `tau`;
//! each packet costs `a` energy units, so the demand takes the discrete
//! values `a * k` with Poisson(`mu * tau`) probabilities.

use alloc::vec::Vec;

use crate::error::{check, Error, Result};

/// Default truncation: the omitted Poisson tail carries less mass than this.
pub const DEFAULT_MASS_TOL: f64 = 1e-12;

/// Largest truncation tolerance accepted by [`demand_distribution`].
pub const MAX_MASS_TOL: f64 = 1e-6;

/// Poisson packet arrivals over one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficProcess {
    arrival_rate: f64,
    window: f64,
    energy_per_packet: f64,
}

impl TrafficProcess {
    pub fn new(arrival_rate: f64, window: f64, energy_per_packet: f64) -> Result<Self> {
        check(
            arrival_rate.is_finite() && arrival_rate >= 0.0,
            "mu",
            arrival_rate,
            "arrival rate must be finite and >= 0",
        )?;
        check(
            window.is_finite() && window > 0.0,
            "tau",
            window,
            "window must be finite and > 0",
        )?;
        check(
            energy_per_packet.is_finite() && energy_per_packet > 0.0,
            "a",
            energy_per_packet,
            "energy per packet must be finite and > 0",
        )?;
        let quantity = arrival_rate * window;
        check(
            quantity.is_finite(),
            "mu*tau",
            quantity,
            "traffic quantity must be finite",
        )?;
        Ok(Self {
            arrival_rate,
            window,
            energy_per_packet,
        })
    }

    /// A process over a unit window whose traffic quantity is `mu_tau`.
    pub fn with_quantity(mu_tau: f64, energy_per_packet: f64) -> Result<Self> {
        Self::new(mu_tau, 1.0, energy_per_packet)
    }

    pub fn arrival_rate(&self) -> f64 {
        self.arrival_rate
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn energy_per_packet(&self) -> f64 {
        self.energy_per_packet
    }

    /// Expected packet count over the window, `mu * tau`.
    pub fn traffic_quantity(&self) -> f64 {
        self.arrival_rate * self.window
    }
}

/// Probability of exactly `k` arrivals in one window.
///
/// Evaluated as `exp(k ln(mu tau) - mu tau - ln k!)` so large counts do not
/// overflow.
pub fn packet_pmf(process: &TrafficProcess, k: i64) -> Result<f64> {
    if k < 0 {
        return Err(Error::Domain {
            what: "packet count",
            value: k as f64,
        });
    }
    Ok(poisson_pmf(process.traffic_quantity(), k as u64))
}

pub(crate) fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let k = k as f64;
    libm::exp(k * libm::log(lambda) - lambda - libm::lgamma(k + 1.0))
}

/// Demand levels `d_0 < d_1 < ... < d_n` with their probabilities.
///
/// Probabilities are stored as given (a truncated Poisson law is not
/// renormalized); the cumulative sums are cached for cdf queries.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandDistribution {
    support: Vec<f64>,
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DemandDistribution {
    /// Builds a distribution from explicit levels and probabilities.
    ///
    /// Total mass must lie in `[1 - MAX_MASS_TOL, 1]` up to rounding.
    pub fn from_parts(support: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::MalformedDistribution {
                reason: "support is empty",
            });
        }
        if support.len() != probabilities.len() {
            return Err(Error::MalformedDistribution {
                reason: "support and probabilities differ in length",
            });
        }
        if support.iter().any(|d| !d.is_finite()) {
            return Err(Error::MalformedDistribution {
                reason: "support levels must be finite",
            });
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedDistribution {
                reason: "support must be strictly increasing",
            });
        }
        if probabilities
            .iter()
            .any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0)
        {
            return Err(Error::MalformedDistribution {
                reason: "probabilities must lie in [0, 1]",
            });
        }
        let cumulative = prefix_sums(&probabilities);
        let total = cumulative[cumulative.len() - 1];
        if !(1.0 - MAX_MASS_TOL..=1.0 + 1e-12).contains(&total) {
            return Err(Error::MalformedDistribution {
                reason: "probabilities must sum to 1 within the truncation tolerance",
            });
        }
        Ok(Self {
            support,
            probabilities,
            cumulative,
        })
    }

    /// All mass on one level.
    pub fn deterministic(level: f64) -> Result<Self> {
        Self::from_parts(alloc::vec![level], alloc::vec![1.0])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Probability mass on levels `d_0..=d_index`.
    pub fn cdf_at_index(&self, index: usize) -> f64 {
        self.cumulative[index]
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Index of `level` if it is exactly one of the support points.
    pub fn index_of(&self, level: f64) -> Option<usize> {
        self.support
            .binary_search_by(|d| d.total_cmp(&level))
            .ok()
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probabilities)
            .map(|(d, p)| d * p)
            .sum()
    }

    /// Level whose cumulative mass first exceeds `u`; the last level when
    /// `u` falls in the truncated tail.
    pub fn quantile(&self, u: f64) -> f64 {
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.support[idx.min(self.support.len() - 1)]
    }
}

fn prefix_sums(probabilities: &[f64]) -> Vec<f64> {
    probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Truncated energy-demand law for a traffic process.
///
/// The support is `{a k : k = 0..=n}` with `n` the smallest count whose
/// Poisson cdf reaches `1 - mass_tol`. Probabilities are not renormalized.
pub fn demand_distribution(process: &TrafficProcess, mass_tol: f64) -> Result<DemandDistribution> {
    check(
        mass_tol > 0.0 && mass_tol <= MAX_MASS_TOL,
        "mass_tol",
        mass_tol,
        "truncation tolerance must lie in (0, 1e-6]",
    )?;
    let lambda = process.traffic_quantity();
    let a = process.energy_per_packet();
    let target = 1.0 - mass_tol;
    // Past this count the tail is far below any tolerance; it only guards
    // against rounding keeping the partial sum a hair under `target`.
    let hard_cap = (lambda + 50.0 * libm::sqrt(lambda) + 50.0) as u64;

    let mut support = Vec::new();
    let mut probabilities = Vec::new();
    let mut cumulative = Vec::new();
    let mut total = 0.0;
    let mut k: u64 = 0;
    loop {
        let p = poisson_pmf(lambda, k);
        total += p;
        support.push(a * k as f64);
        probabilities.push(p);
        cumulative.push(total);
        if total >= target || k >= hard_cap {
            break;
        }
        k += 1;
    }
    Ok(DemandDistribution {
        support,
        probabilities,
        cumulative,
    })
}

/// Mass on demand levels at or below `level`.
pub fn demand_cdf(dist: &DemandDistribution, level: f64) -> f64 {
    let idx = dist.support.partition_point(|&d| d <= level);
    if idx == 0 {
        0.0
    } else {
        dist.cumulative[idx - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(mu_tau: f64) -> TrafficProcess {
        TrafficProcess::with_quantity(mu_tau, 1.0).unwrap()
    }

    #[test]
    fn pmf_reference_values() {
        // Frozen from 30-digit evaluation of 5^k e^-5 / k!.
        let p0 = packet_pmf(&unit(5.0), 0).unwrap();
        assert!((p0 - 0.006_737_946_999_085_467).abs() < 1e-15);
        let p5 = packet_pmf(&unit(5.0), 5).unwrap();
        assert!((p5 - 0.175_467_369_767_850_7).abs() < 1e-13);
        assert_eq!(packet_pmf(&unit(0.0), 0).unwrap(), 1.0);
        assert_eq!(packet_pmf(&unit(0.0), 3).unwrap(), 0.0);
    }

    #[test]
    fn negative_count_is_a_domain_error() {
        assert!(matches!(
            packet_pmf(&unit(5.0), -1),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn truncation_reaches_target_mass() {
        let dist = demand_distribution(&unit(5.0), 1e-12).unwrap();
        assert!(dist.total_mass() >= 1.0 - 1e-12);
        assert!(dist.cdf_at_index(dist.len() - 2) < 1.0 - 1e-12);
        assert_eq!(dist.support()[0], 0.0);
    }

    #[test]
    fn cdf_reference_values() {
        let dist = demand_distribution(&unit(5.0), DEFAULT_MASS_TOL).unwrap();
        assert!((demand_cdf(&dist, 4.0) - 0.440_493_285_065_212_4).abs() < 1e-12);
        assert!((demand_cdf(&dist, 7.0) - 0.866_628_325_929_992_7).abs() < 1e-12);
        assert_eq!(demand_cdf(&dist, -0.5), 0.0);
        assert_eq!(demand_cdf(&dist, 1e9), dist.total_mass());
    }

    #[test]
    fn levels_scale_with_energy_per_packet() {
        let proc = TrafficProcess::with_quantity(10.0, 2.0).unwrap();
        let dist = demand_distribution(&proc, DEFAULT_MASS_TOL).unwrap();
        assert_eq!(dist.support()[3], 6.0);
    }

    #[test]
    fn zero_rate_is_a_point_mass_at_zero() {
        let dist = demand_distribution(&unit(0.0), DEFAULT_MASS_TOL).unwrap();
        assert_eq!(dist.support(), &[0.0]);
        assert_eq!(dist.probabilities(), &[1.0]);
    }

    #[test]
    fn large_traffic_quantity_stays_usable() {
        let dist = demand_distribution(&unit(1.0e4), DEFAULT_MASS_TOL).unwrap();
        assert!(dist.total_mass() > 1.0 - 1e-9);
        assert!((dist.mean() - 1.0e4).abs() < 1e-6 * 1.0e4);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(TrafficProcess::new(-1.0, 1.0, 1.0).is_err());
        assert!(TrafficProcess::new(1.0, 0.0, 1.0).is_err());
        assert!(TrafficProcess::new(1.0, 1.0, 0.0).is_err());
        assert!(demand_distribution(&unit(1.0), 1e-3).is_err());
        assert!(DemandDistribution::from_parts(alloc::vec![1.0, 1.0], alloc::vec![0.5, 0.5]).is_err());
        assert!(DemandDistribution::from_parts(alloc::vec![1.0, 2.0], alloc::vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        let dist = demand_distribution(&unit(5.0), DEFAULT_MASS_TOL).unwrap();
        assert_eq!(dist.quantile(0.0), 0.0);
        assert_eq!(dist.quantile(0.44), 4.0);
        assert_eq!(dist.quantile(0.4405), 5.0);
        assert_eq!(dist.quantile(1.0), *dist.support().last().unwrap());
    }
}
