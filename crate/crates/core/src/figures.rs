//! Parameter sweeps behind each figure preset.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{hypothesis_pair, HypothesisPair, NoiseModel, ScenarioParams, Source};
use crate::chernoff::{coherent_qcb_closed, qcb};
use crate::error::{Error, Result};
use crate::receivers::{
    optimal_beta_closed, optimize_family_closed, snr_bound_constant, snr_cct, snr_closed_dh, snr_closed_double_htd,
    snr_closed_opa_corrected, snr_closed_pc, snr_closed_separate_htd, snr_coherent_hd, snr_coherent_off, snr_generic,
    snr_nearly_bound_closed, FamilyOptimum, ReceiverSpec, OPA_GAIN, PC_MU, PC_NU,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    S1,
    S2,
    Custom,
}

impl Figure {
    pub const PRESETS: [Figure; 8] =
        [Figure::Fig1, Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5a, Figure::Fig5b, Figure::S1, Figure::S2];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
            Figure::S1 => "s1",
            Figure::S2 => "s2",
            Figure::Custom => "custom",
        }
    }

    /// Curve labels produced by default, in output order.
    pub fn default_curves(self) -> &'static [&'static str] {
        match self {
            Figure::Fig1 | Figure::Fig3 => &["coh-qcb", "bound", "nearly-bound", "pc", "opa", "dh"],
            Figure::Fig2 => &["bound-minus-coh", "pc-minus-coh"],
            Figure::Fig4 => &["coh-hd", "dhtd", "htd-separate", "hd-product", "coh-hd-minus-htd-separate"],
            Figure::Fig5a => &["cct-qcb-ni1", "cct-off-ni1", "cct-qcb-ni2", "cct-off-ni2"],
            Figure::Fig5b => &["cct-qcb", "cct-off", "coh-qcb"],
            Figure::S1 => &["beta"],
            Figure::S2 => &["alpha", "beta"],
            Figure::Custom => &["coh-qcb", "bound", "nearly-bound"],
        }
    }

    /// Every label the figure accepts in a receiver selection.
    pub fn available_curves(self) -> &'static [&'static str] {
        match self {
            Figure::Custom => CUSTOM_CURVES,
            Figure::Fig1 | Figure::Fig3 => {
                &["coh-qcb", "coh-hd", "bound", "nearly-bound", "pc", "opa", "dh"]
            }
            other => other.default_curves(),
        }
    }

    fn axis(self) -> Axis {
        if self == Figure::Fig5a {
            Axis::Kappa
        } else {
            Axis::SignalPhotons
        }
    }

    fn default_noise(self) -> NoiseModel {
        match self {
            Figure::Fig3 | Figure::S2 => NoiseModel::NonConstant,
            _ => NoiseModel::Constant,
        }
    }
}

const CUSTOM_CURVES: &[&str] = &[
    "coh-qcb",
    "coh-hd",
    "coh-off",
    "bound",
    "nearly-bound",
    "pc",
    "opa",
    "dh",
    "dhtd",
    "htd-separate",
    "hd-product",
    "tmsv-qcb",
    "cct-off",
    "cct-qcb",
];

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Figure::PRESETS
            .iter()
            .chain(std::iter::once(&Figure::Custom))
            .find(|f| f.name() == lower)
            .copied()
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown figure '{s}'; expected one of fig1, fig2, fig3, fig4, fig5a, fig5b, s1, s2, custom"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// N_S (and N_I where the figure ties them together).
    SignalPhotons,
    Kappa,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::SignalPhotons => "N_S",
            Axis::Kappa => "kappa",
        }
    }
}

/// Sampling of the swept variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl Sweep {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) || !(self.min < self.max) {
            return Err(Error::Config(format!(
                "sweep range must be finite and increasing, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.log && !(self.min > 0.0) {
            return Err(Error::Config(format!("log-spaced sweeps need a positive lower end, got {}", self.min)));
        }
        if self.points < 2 {
            return Err(Error::Config(format!("a sweep needs at least 2 points, got {}", self.points)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        let mut xs: Vec<f64> = (0..self.points)
            .map(|k| {
                let u = k as f64 / last;
                if self.log {
                    (self.min.ln() + u * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + u * (self.max - self.min)
                }
            })
            .collect();
        // Pin the end points exactly.
        xs[0] = self.min;
        xs[self.points - 1] = self.max;
        xs
    }
}

/// Everything needed to produce one figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub figure: Figure,
    /// Fixed parameters; the swept one is overwritten at each point.
    pub params: ScenarioParams,
    pub sweep: Sweep,
    /// Curve selection; `None` means the figure's default set.
    pub receivers: Option<Vec<String>>,
}

impl SweepConfig {
    /// Defaults for a figure: κ = 0.01, N_B = 30, M = 10⁷, 200 log-spaced
    /// points on N_S ∈ [0.01, 10] or κ ∈ [0.001, 0.1].
    pub fn preset(figure: Figure) -> Self {
        let mut params = ScenarioParams::default().with_noise(figure.default_noise());
        let sweep = match figure.axis() {
            Axis::Kappa => {
                params.n_s = 1.0;
                Sweep { min: 1e-3, max: 0.1, points: 200, log: true }
            }
            Axis::SignalPhotons => Sweep { min: 1e-2, max: 10.0, points: 200, log: true },
        };
        Self { figure, params, sweep, receivers: None }
    }

    pub fn curves(&self) -> Vec<String> {
        match &self.receivers {
            Some(list) => list.clone(),
            None => self.figure.default_curves().iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sweep.validate()?;
        let mut probe = self.params;
        match self.figure.axis() {
            Axis::Kappa => probe.kappa = self.sweep.max,
            Axis::SignalPhotons => probe.n_s = self.sweep.max,
        }
        probe.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.figure.axis() == Axis::SignalPhotons && self.sweep.min < 0.0 {
            return Err(Error::Config("N_S sweep must be non-negative".into()));
        }
        if probe.noise_model == NoiseModel::Constant && probe.kappa >= 1.0 {
            return Err(Error::Config("constant background needs kappa < 1".into()));
        }
        if self.figure.axis() == Axis::Kappa && self.sweep.min < 0.0 {
            return Err(Error::Config("kappa sweep must be non-negative".into()));
        }
        let curves = self.curves();
        if curves.is_empty() {
            return Err(Error::Config("no curves selected".into()));
        }
        let available = self.figure.available_curves();
        for (i, c) in curves.iter().enumerate() {
            if !available.contains(&c.as_str()) {
                return Err(Error::Config(format!(
                    "figure {} has no curve '{c}'; available: {}",
                    self.figure,
                    available.join(", ")
                )));
            }
            if curves[..i].contains(c) {
                return Err(Error::Config(format!("curve '{c}' selected twice")));
            }
        }
        Ok(())
    }
}

/// One labelled curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Labelled sweep output in a fixed curve order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub curves: Vec<Curve>,
}

impl CurveSet {
    /// Checks that there is at least one curve, every value is finite and
    /// each curve's abscissae strictly increase.
    pub fn validate(&self) -> Result<()> {
        if self.curves.is_empty() {
            return Err(Error::Config("curve set is empty".into()));
        }
        for c in &self.curves {
            if c.points.is_empty() {
                return Err(Error::Config(format!("curve '{}' has no points", c.label)));
            }
            if let Some(&(x, y)) = c.points.iter().find(|(x, y)| !x.is_finite() || !y.is_finite()) {
                return Err(Error::Numerical(format!("curve '{}' has a non-finite point ({x}, {y})", c.label)));
            }
            if c.points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                return Err(Error::Config(format!("curve '{}' abscissae are not strictly increasing", c.label)));
            }
        }
        Ok(())
    }

    pub fn curve(&self, label: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.label == label)
    }
}

fn y_label(figure: Figure) -> &'static str {
    match figure {
        Figure::Fig2 => "SNR difference",
        Figure::S1 => "|beta|",
        Figure::S2 => "optimal parameter",
        _ => "SNR",
    }
}

fn title(cfg: &SweepConfig) -> String {
    let p = &cfg.params;
    let fixed = match cfg.figure.axis() {
        Axis::Kappa => format!("N_S={}", p.n_s),
        Axis::SignalPhotons => format!("kappa={}", p.kappa),
    };
    format!("{} ({fixed}, N_B={}, M={}, {} background)", cfg.figure, p.n_b, p.m_modes, p.noise_model)
}

/// Coherent-state Chernoff exponent on the signal mode alone.
pub fn coherent_bound(params: &ScenarioParams) -> Result<f64> {
    if params.noise_model == NoiseModel::Constant {
        return Ok(coherent_qcb_closed(params)?.exponent);
    }
    let pair = hypothesis_pair(Source::Coherent, params)?;
    let single = HypothesisPair { on: pair.on.reduced(&[0])?, off: pair.off.reduced(&[0])? };
    Ok(qcb(&single, params.m_modes)?.exponent)
}

/// Point-wise evaluator; the bound-family optimum is computed at most once.
struct Point {
    params: ScenarioParams,
    family: Option<FamilyOptimum>,
}

impl Point {
    fn family(&mut self) -> Result<FamilyOptimum> {
        if let Some(f) = self.family {
            return Ok(f);
        }
        let (opt, _) = optimize_family_closed(&self.params, None)?;
        self.family = Some(opt);
        Ok(opt)
    }

    fn bound(&mut self) -> Result<f64> {
        match self.params.noise_model {
            NoiseModel::Constant => Ok(snr_bound_constant(&self.params, None)?.snr),
            NoiseModel::NonConstant => Ok(self.family()?.snr_per_mode * self.params.m_modes as f64),
        }
    }

    fn with_idler(&self, n_i: f64) -> ScenarioParams {
        self.params.with_idler(n_i)
    }

    fn eval(&mut self, label: &str) -> Result<f64> {
        let p = self.params;
        Ok(match label {
            "coh-qcb" => coherent_bound(&p)?,
            "coh-hd" => snr_coherent_hd(&p)?.snr,
            "coh-off" => snr_coherent_off(&p)?.snr,
            "bound" => self.bound()?,
            "nearly-bound" => snr_nearly_bound_closed(&p)?.snr,
            "pc" => snr_closed_pc(&p, PC_MU, PC_NU)?.snr,
            "opa" => snr_closed_opa_corrected(&p, OPA_GAIN)?.snr,
            "dh" => snr_closed_dh(&p)?.snr,
            "dhtd" => snr_closed_double_htd(&p)?.snr,
            "htd-separate" => snr_closed_separate_htd(&p)?.snr,
            "hd-product" => {
                let pair = hypothesis_pair(Source::Tmsv, &p)?;
                snr_generic(&ReceiverSpec::hd_product_default(), &pair, p.m_modes)?.snr
            }
            "tmsv-qcb" => qcb(&hypothesis_pair(Source::Tmsv, &p)?, p.m_modes)?.exponent,
            "cct-off" => snr_cct(&p)?.snr,
            "cct-qcb" => qcb(&hypothesis_pair(Source::Cct, &p)?, p.m_modes)?.exponent,
            "bound-minus-coh" => self.bound()? - coherent_bound(&p)?,
            "pc-minus-coh" => snr_closed_pc(&p, PC_MU, PC_NU)?.snr - coherent_bound(&p)?,
            "coh-hd-minus-htd-separate" => snr_coherent_hd(&p)?.snr - snr_closed_separate_htd(&p)?.snr,
            "cct-qcb-ni1" | "cct-qcb-ni2" | "cct-off-ni1" | "cct-off-ni2" => {
                let q = self.with_idler(if label.ends_with("ni1") { 1.0 } else { 2.0 });
                if label.starts_with("cct-qcb") {
                    qcb(&hypothesis_pair(Source::Cct, &q)?, q.m_modes)?.exponent
                } else {
                    snr_cct(&q)?.snr
                }
            }
            "alpha" => self.family()?.alpha,
            "beta" if self.params.noise_model == NoiseModel::NonConstant => self.family()?.beta,
            "beta" => {
                if p.kappa * p.n_s == 0.0 {
                    0.0
                } else {
                    optimal_beta_closed(&p)?
                }
            }
            other => return Err(Error::Config(format!("unknown curve '{other}'"))),
        })
    }
}

fn point_params(cfg: &SweepConfig, x: f64) -> ScenarioParams {
    let mut p = cfg.params;
    match cfg.figure.axis() {
        Axis::Kappa => p.kappa = x,
        Axis::SignalPhotons => {
            p.n_s = x;
            if cfg.figure == Figure::Fig5b {
                p.n_i = x;
            }
        }
    }
    p
}

/// Runs a sweep. Points are evaluated in parallel on the current rayon pool;
/// the output order does not depend on scheduling.
pub fn run_figure(cfg: &SweepConfig) -> Result<CurveSet> {
    cfg.validate()?;
    let labels = cfg.curves();
    let xs = cfg.sweep.values();
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| {
            let mut point = Point { params: point_params(cfg, x), family: None };
            labels
                .iter()
                .map(|l| {
                    let v = point.eval(l)?;
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::Numerical(format!("curve '{l}' is not finite at x = {x}")))
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let curves = labels
        .iter()
        .enumerate()
        .map(|(j, label)| Curve { label: label.clone(), points: xs.iter().zip(&rows).map(|(&x, r)| (x, r[j])).collect() })
        .collect();
    let set = CurveSet {
        title: title(cfg),
        x_label: cfg.figure.axis().label().to_string(),
        y_label: y_label(cfg.figure).to_string(),
        log_x: cfg.sweep.log,
        curves,
    };
    set.validate()?;
    Ok(set)
}
