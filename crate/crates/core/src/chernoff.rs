//! Quantum Chernoff bound between two Gaussian states.
//!
//! `Q_s = Tr(ρ_on^s ρ_off^{1−s})` is evaluated in closed form from the
//! Williamson data of both states. Internally the covariance is doubled so the
//! vacuum has unit variance, and with `x_k = 2ν_k`
//!
//! ```text
//! G_p(x) = 2^p / ((x+1)^p − (x−1)^p)
//! Λ_p(x) = ((x+1)^p + (x−1)^p) / ((x+1)^p − (x−1)^p)
//! V(p)   = S [⊕ Λ_p(x_k) I₂] Sᵀ
//! Q_s    = 2^n Π G_s(x_k^on) G_{1−s}(x_k^off) / √det Σ_s · exp(−½ dᵀ Σ_s⁻¹ d)
//! ```
//!
//! where `Σ_s = V_on(s) + V_off(1−s)` and `d` is the difference of the
//! doubled-convention means. The bound on the `M`-copy error probability is
//! `½ (min_s Q_s)^M`.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channel::{HypothesisPair, NoiseModel, ScenarioParams};
use crate::error::{domain, Error, Result};
use crate::gaussian::GaussianState;
use crate::optimize::bracketed_min;
use crate::symplectic::{williamson, Williamson};

pub use crate::symplectic::williamson as williamson_decomposition;

/// Edge of the open interval searched for the optimal `s`.
pub const S_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcbResult {
    /// Minimising exponent `s* ∈ (0, 1)`.
    pub s_star: f64,
    /// Single-copy overlap `Q_{s*}`.
    pub q_value: f64,
    /// `−M ln Q_{s*}`.
    pub exponent: f64,
    /// `½ Q_{s*}^M`.
    pub p_err_bound: f64,
}

impl QcbResult {
    fn from_log_q(s_star: f64, log_q: f64, m_modes: u64) -> Self {
        let log_q = log_q.min(0.0);
        let exponent = -(m_modes as f64) * log_q;
        Self { s_star, q_value: log_q.exp(), exponent, p_err_bound: 0.5 * (-exponent).exp() }
    }

    /// Per-copy exponent `−ln Q_{s*}`.
    pub fn exponent_per_copy(&self, m_modes: u64) -> f64 {
        self.exponent / m_modes as f64
    }
}

/// Precomputed Williamson data for evaluating `Q_s` repeatedly.
#[derive(Debug, Clone)]
pub struct ChernoffOverlap {
    n_modes: usize,
    on: Williamson,
    off: Williamson,
    mean_diff: DVector<f64>,
}

fn ln_g_and_lambda(x: f64, p: f64) -> (f64, f64) {
    if x <= 1.0 {
        return (0.0, 1.0);
    }
    // r = ((x−1)/(x+1))^p, 1 − r via expm1 to keep precision near p → 0.
    let log_ratio = ((x - 1.0) / (x + 1.0)).ln();
    let r = (p * log_ratio).exp();
    let one_minus_r = -(p * log_ratio).exp_m1();
    let ln_g = p * std::f64::consts::LN_2 - p * (x + 1.0).ln() - one_minus_r.ln();
    (ln_g, (1.0 + r) / one_minus_r)
}

impl ChernoffOverlap {
    pub fn new(pair: &HypothesisPair) -> Result<Self> {
        let n = pair.on.n_modes();
        if pair.off.n_modes() != n {
            return Err(Error::Dimension { expected: n, found: pair.off.n_modes() });
        }
        pair.on.ensure_physical()?;
        pair.off.ensure_physical()?;
        let q_on = pair.on.to_quadrature();
        let q_off = pair.off.to_quadrature();
        let on = williamson(&(q_on.cov * 2.0))?;
        let off = williamson(&(q_off.cov * 2.0))?;
        let mean_diff = (q_on.mean - q_off.mean) * std::f64::consts::SQRT_2;
        Ok(Self { n_modes: n, on, off, mean_diff })
    }

    /// `ln Q_s` for `s ∈ (0, 1)`.
    pub fn log_q(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(domain(format!("Chernoff parameter must lie in (0, 1), got {s}")));
        }
        let mut log_q = self.n_modes as f64 * std::f64::consts::LN_2;
        for &x in &self.on.nu {
            log_q += ln_g_and_lambda(x, s).0;
        }
        for &x in &self.off.nu {
            log_q += ln_g_and_lambda(x, 1.0 - s).0;
        }
        let sigma: DMatrix<f64> =
            self.on.map_spectrum(|x| ln_g_and_lambda(x, s).1) + self.off.map_spectrum(|x| ln_g_and_lambda(x, 1.0 - s).1);
        let sigma = (&sigma + sigma.transpose()) * 0.5;
        let chol = Cholesky::new(sigma).ok_or_else(|| Error::Numerical("Σ_s is not positive definite".into()))?;
        let log_det: f64 = chol.l().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
        log_q -= 0.5 * log_det;
        if self.mean_diff.amax() >= 1e-14 {
            let solved = chol.solve(&self.mean_diff);
            log_q -= 0.5 * self.mean_diff.dot(&solved);
        }
        if !log_q.is_finite() {
            return Err(Error::Numerical(format!("ln Q_s is not finite at s = {s}")));
        }
        Ok(log_q)
    }

    pub fn q(&self, s: f64) -> Result<f64> {
        Ok(self.log_q(s)?.exp())
    }

    /// Minimises `Q_s` over `s`.
    pub fn minimize(&self, m_modes: u64) -> Result<QcbResult> {
        let mut failure = None;
        let best = bracketed_min(
            |s| match self.log_q(s) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
            S_MARGIN,
            1.0 - S_MARGIN,
            101,
            1e-10,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(QcbResult::from_log_q(best.x, best.value, m_modes))
    }
}

/// Quantum Chernoff bound for distinguishing `pair.on` from `pair.off` with
/// `M` copies.
pub fn qcb(pair: &HypothesisPair, m_modes: u64) -> Result<QcbResult> {
    if m_modes == 0 {
        return Err(domain("m_modes must be at least 1"));
    }
    ChernoffOverlap::new(pair)?.minimize(m_modes)
}

/// Bhattacharyya overlap `Q_{1/2}`.
pub fn bhattacharyya(pair: &HypothesisPair) -> Result<f64> {
    ChernoffOverlap::new(pair)?.q(0.5)
}

/// Per-copy coherent-illumination exponent `κ N_S (√(N_B+1) − √N_B)²`.
pub fn coherent_exponent_per_copy(kappa: f64, n_s: f64, n_b: f64) -> f64 {
    // (√(N_B+1) − √N_B)² = 1 / (√(N_B+1) + √N_B)², written without cancellation.
    let s = (n_b + 1.0).sqrt() + n_b.sqrt();
    kappa * n_s / (s * s)
}

/// Closed-form coherent-state Chernoff bound with signal amplitude √N_S.
///
/// Requires the constant background model, where both hypotheses share the
/// covariance `thermal(N_B)` and only the means differ; the bound is then
/// attained at `s = 1/2`.
pub fn coherent_qcb_closed(params: &ScenarioParams) -> Result<QcbResult> {
    params.validate()?;
    if params.noise_model != NoiseModel::Constant {
        return Err(domain("closed-form coherent bound needs the constant background model"));
    }
    let per_copy = coherent_exponent_per_copy(params.kappa, params.n_s, params.n_b);
    Ok(QcbResult::from_log_q(0.5, -per_copy, params.m_modes))
}

/// Chernoff bound of a state against itself; always `Q = 1`.
pub fn self_overlap(state: &GaussianState, m_modes: u64) -> Result<QcbResult> {
    qcb(&HypothesisPair { on: state.clone(), off: state.clone() }, m_modes)
}
