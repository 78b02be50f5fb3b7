//! Target interaction channel.
//!
//! The signal mode meets a beam splitter of reflectance `κ` whose other port
//! carries thermal background light. Two background conventions are
//! supported:
//!
//! * [`NoiseModel::Constant`]: the injected thermal mean is `N_B/(1−κ)`, so the
//!   received background is `N_B` whatever `κ` is.
//! * [`NoiseModel::NonConstant`]: the injected mean is `N_B`, so the received
//!   background is `(1−κ)N_B` and itself depends on the target.
//!
//! Target absent is the `κ = 0` channel with background `N_B` in both models,
//! i.e. the signal is replaced by `thermal(N_B)`. The idler is never touched.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian::{make_cct, make_coherent, make_thermal, make_tmsv, GaussianState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    Constant,
    NonConstant,
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseModel::Constant => "constant",
            NoiseModel::NonConstant => "nonconstant",
        })
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "constant" => Ok(NoiseModel::Constant),
            "nonconstant" | "non-constant" => Ok(NoiseModel::NonConstant),
            other => Err(Error::Config(format!(
                "unknown noise model '{other}' (expected constant or nonconstant)"
            ))),
        }
    }
}

/// One experiment configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Target reflectance κ ∈ [0, 1].
    pub kappa: f64,
    /// Signal mean photon number N_S.
    pub n_s: f64,
    /// Idler mean photon number N_I; only used by classically correlated and
    /// coherent sources.
    pub n_i: f64,
    /// Background thermal mean photon number N_B.
    pub n_b: f64,
    /// Number of signal–idler mode pairs M.
    pub m_modes: u64,
    pub noise_model: NoiseModel,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            kappa: 0.01,
            n_s: 0.01,
            n_i: 1.0,
            n_b: 30.0,
            m_modes: 10_000_000,
            noise_model: NoiseModel::Constant,
        }
    }
}

impl ScenarioParams {
    pub fn new(kappa: f64, n_s: f64, n_b: f64, m_modes: u64, noise_model: NoiseModel) -> Self {
        Self { kappa, n_s, n_i: 0.0, n_b, m_modes, noise_model }
    }

    pub fn with_idler(mut self, n_i: f64) -> Self {
        self.n_i = n_i;
        self
    }

    pub fn with_noise(mut self, noise_model: NoiseModel) -> Self {
        self.noise_model = noise_model;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(domain(format!("kappa must lie in [0, 1], got {}", self.kappa)));
        }
        for (name, v) in [("n_s", self.n_s), ("n_i", self.n_i), ("n_b", self.n_b)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if self.m_modes == 0 {
            return Err(domain("m_modes must be at least 1"));
        }
        Ok(())
    }

    /// Received background photons when the target is present.
    pub fn received_background(&self) -> f64 {
        match self.noise_model {
            NoiseModel::Constant => self.n_b,
            NoiseModel::NonConstant => (1.0 - self.kappa) * self.n_b,
        }
    }
}

/// Target-present and target-absent output states, same mode ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisPair {
    pub on: GaussianState,
    pub off: GaussianState,
}

impl HypothesisPair {
    /// Appends the same uncoupled state to both hypotheses.
    pub fn tensor(&self, extra: &GaussianState) -> HypothesisPair {
        HypothesisPair { on: self.on.tensor(extra), off: self.off.tensor(extra) }
    }

    pub fn swapped(&self) -> HypothesisPair {
        HypothesisPair { on: self.off.clone(), off: self.on.clone() }
    }
}

/// Probe states prepared before the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    /// Two-mode squeezed vacuum with N_S photons per mode.
    Tmsv,
    /// Classically correlated thermal pair (N_S, N_I).
    Cct,
    /// Product of coherent states with real amplitudes √N_S and √N_I.
    Coherent,
}

/// Sends `signal_mode` of `input` through the target channel.
pub fn apply_target(
    input: &GaussianState,
    signal_mode: usize,
    params: &ScenarioParams,
    present: bool,
) -> Result<GaussianState> {
    params.validate()?;
    let n = input.n_modes();
    if signal_mode >= n {
        return Err(domain(format!("signal mode {signal_mode} out of range for {n} modes")));
    }
    let (kappa, env_mean) = if present {
        let env = match params.noise_model {
            NoiseModel::Constant => {
                if params.kappa >= 1.0 {
                    return Err(domain(
                        "constant background needs kappa < 1 (injected thermal mean N_B/(1-kappa) diverges)",
                    ));
                }
                params.n_b / (1.0 - params.kappa)
            }
            NoiseModel::NonConstant => params.n_b,
        };
        (params.kappa, env)
    } else {
        (0.0, params.n_b)
    };
    let t = kappa.sqrt();
    let r = (1.0 - kappa).sqrt();
    let norm = (t * t + r * r).sqrt();
    let joint = input.tensor(&make_thermal(env_mean)?);
    let mixed = joint.apply_beam_splitter(signal_mode, n, t / norm, r / norm, 0.0)?;
    let keep: Vec<usize> = (0..n).collect();
    mixed.reduced(&keep)
}

/// Input state for a source; mode 0 is the signal, mode 1 the idler.
pub fn source_state(source: Source, params: &ScenarioParams) -> Result<GaussianState> {
    params.validate()?;
    match source {
        Source::Tmsv => make_tmsv(params.n_s),
        Source::Cct => make_cct(params.n_s, params.n_i),
        Source::Coherent => {
            let s = make_coherent(Complex64::new(params.n_s.sqrt(), 0.0))?;
            let i = make_coherent(Complex64::new(params.n_i.sqrt(), 0.0))?;
            Ok(s.tensor(&i))
        }
    }
}

pub fn hypothesis_pair(source: Source, params: &ScenarioParams) -> Result<HypothesisPair> {
    let input = source_state(source, params)?;
    Ok(HypothesisPair {
        on: apply_target(&input, 0, params, true)?,
        off: apply_target(&input, 0, params, false)?,
    })
}
