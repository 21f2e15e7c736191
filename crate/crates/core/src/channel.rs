//! Band-limited AWGN link: rate, required transmit power and the
//! demander's energy efficiency. All quantities are SI.

use core::f64::consts::LN_2;

use crate::error::{check, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    bandwidth: f64,
    noise_psd: f64,
    rate_threshold: f64,
}

impl ChannelParams {
    /// `bandwidth` in Hz, `noise_psd` in W/Hz, `rate_threshold` in bit/s.
    pub fn new(bandwidth: f64, noise_psd: f64, rate_threshold: f64) -> Result<Self> {
        check(
            bandwidth.is_finite() && bandwidth > 0.0,
            "b_i",
            bandwidth,
            "bandwidth must be finite and > 0",
        )?;
        check(
            noise_psd.is_finite() && noise_psd > 0.0,
            "N_0",
            noise_psd,
            "noise spectral density must be finite and > 0",
        )?;
        check(
            rate_threshold.is_finite() && rate_threshold >= 0.0,
            "r_b",
            rate_threshold,
            "rate threshold must be finite and >= 0",
        )?;
        Ok(Self {
            bandwidth,
            noise_psd,
            rate_threshold,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn noise_psd(&self) -> f64 {
        self.noise_psd
    }

    pub fn rate_threshold(&self) -> f64 {
        self.rate_threshold
    }

    pub fn with_rate_threshold(self, rate_threshold: f64) -> Result<Self> {
        Self::new(self.bandwidth, self.noise_psd, rate_threshold)
    }
}

/// dBm (per Hz) to W (per Hz).
pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

/// Shannon rate `b log2(1 + P / (b N0))` for transmit power `power` (W).
pub fn achievable_rate(ch: &ChannelParams, power: f64) -> Result<f64> {
    if !(power >= 0.0) {
        return Err(Error::Domain {
            what: "transmit power",
            value: power,
        });
    }
    let snr = power / (ch.bandwidth * ch.noise_psd);
    Ok(ch.bandwidth * libm::log1p(snr) / LN_2)
}

/// Power needed to sustain the rate threshold: `b N0 (2^(r/b) - 1)`.
pub fn required_power(ch: &ChannelParams) -> f64 {
    ch.bandwidth * ch.noise_psd * libm::expm1(ch.rate_threshold / ch.bandwidth * LN_2)
}

/// Bits delivered per joule at the rate threshold, `r_b / required_power`.
pub fn demander_efficiency(ch: &ChannelParams) -> Result<f64> {
    if ch.rate_threshold == 0.0 {
        return Err(Error::Domain {
            what: "rate threshold for efficiency",
            value: 0.0,
        });
    }
    Ok(ch.rate_threshold / required_power(ch))
}
