//! Signal-to-noise ratio, decision threshold and error probability for a
//! receiver that sums `M` independent outcomes.
//!
//! The per-mode spread `ΔR_i` in the threshold and error terms is the
//! variance `Δ²O_i` of the observable, which keeps the threshold and the SNR
//! dimensionally consistent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observable::ObservableStats;
use crate::special::{erfc, ln_erfc};

/// Outcome of one receiver on one hypothesis pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub mean_on: f64,
    pub mean_off: f64,
    pub var_on: f64,
    pub var_off: f64,
    /// `M (R_on − R_off)² / (2(√Δ²O_on + √Δ²O_off)²)`.
    pub snr: f64,
    /// Decision threshold on the summed outcome.
    pub threshold: f64,
    /// `½ erfc(√SNR)`; underflows to zero for SNR above roughly 700.
    pub p_err: f64,
    /// `ln p_err`, finite even when `p_err` underflows.
    pub ln_p_err: f64,
}

pub fn snr_value(mean_on: f64, mean_off: f64, var_on: f64, var_off: f64, m_modes: u64) -> Result<f64> {
    if var_on < 0.0 || var_off < 0.0 || !var_on.is_finite() || !var_off.is_finite() {
        return Err(Error::Numerical(format!("invalid variances ({var_on}, {var_off})")));
    }
    let diff = mean_on - mean_off;
    let spread = var_on.sqrt() + var_off.sqrt();
    if spread == 0.0 {
        if diff == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Numerical("zero variance on both hypotheses with distinct means".into()));
    }
    let snr = m_modes as f64 * diff * diff / (2.0 * spread * spread);
    if !snr.is_finite() {
        return Err(Error::Numerical("SNR is not finite".into()));
    }
    Ok(snr)
}

/// Threshold `M(R_0√ΔR_1 + R_1√ΔR_0)/(√ΔR_0 + √ΔR_1)` that equalises the two
/// error arguments; the midpoint when both variances vanish.
pub fn threshold(mean_on: f64, mean_off: f64, var_on: f64, var_off: f64, m_modes: u64) -> f64 {
    let m = m_modes as f64;
    let (s_on, s_off) = (var_on.max(0.0).sqrt(), var_off.max(0.0).sqrt());
    if s_on + s_off == 0.0 {
        return 0.5 * m * (mean_on + mean_off);
    }
    m * (mean_off * s_on + mean_on * s_off) / (s_off + s_on)
}

/// Arguments of the miss and false-alarm `erfc` terms at a given threshold,
/// oriented so that both are positive when the threshold separates the means.
pub fn error_arguments(
    mean_on: f64,
    mean_off: f64,
    var_on: f64,
    var_off: f64,
    m_modes: u64,
    threshold: f64,
) -> (f64, f64) {
    let m = m_modes as f64;
    let sign = if mean_on >= mean_off { 1.0 } else { -1.0 };
    let miss = sign * (m * mean_on - threshold) / (2.0 * m * var_on).sqrt();
    let false_alarm = sign * (threshold - m * mean_off) / (2.0 * m * var_off).sqrt();
    (miss, false_alarm)
}

/// `½ erfc(√SNR)`.
pub fn p_err(snr: f64) -> f64 {
    0.5 * erfc(snr.max(0.0).sqrt())
}

pub fn ln_p_err(snr: f64) -> f64 {
    0.5f64.ln() + ln_erfc(snr.max(0.0).sqrt())
}

/// Exponential upper bound `e^{−SNR}` on the error probability.
pub fn p_err_bound(snr: f64) -> f64 {
    (-snr).exp()
}

impl SnrReport {
    pub fn from_moments(mean_on: f64, mean_off: f64, var_on: f64, var_off: f64, m_modes: u64) -> Result<Self> {
        let snr = snr_value(mean_on, mean_off, var_on, var_off, m_modes)?;
        Ok(Self {
            mean_on,
            mean_off,
            var_on,
            var_off,
            snr,
            threshold: threshold(mean_on, mean_off, var_on, var_off, m_modes),
            p_err: p_err(snr),
            ln_p_err: ln_p_err(snr),
        })
    }

    pub fn from_stats(on: ObservableStats, off: ObservableStats, m_modes: u64) -> Result<Self> {
        Self::from_moments(on.mean, off.mean, on.variance, off.variance, m_modes)
    }

    pub fn p_err_bound(&self) -> f64 {
        p_err_bound(self.snr)
    }
}
