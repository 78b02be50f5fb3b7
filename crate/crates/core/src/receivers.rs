//! Receivers: observables for each detection scheme, their SNR on a
//! hypothesis pair, closed-form SNRs and the optimal bound-observable
//! parameters.
//!
//! The closed forms are written for both background models. With the received
//! background `b` (`N_B` for the constant model, `(1−κ)N_B` otherwise) the
//! signal-mode occupation is `A = κN_S + b` under target presence and `N_B`
//! under absence, and `C = √(κN_S(N_S+1))`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::channel::{HypothesisPair, NoiseModel, ScenarioParams};
use crate::error::{domain, Error, Result};
use crate::gaussian::make_vacuum;
use crate::observable::{
    heterodyne_degrade, obs_bound, obs_dh, obs_hd_product, obs_number, obs_number_difference, obs_off, obs_opa,
    obs_pc, obs_quadrature, obs_squeeze_correlation, HeterodyneVariant, ObservableStats, QuadraticObservable,
};
use crate::optimize::{bracketed_min, nelder_mead_with_steps};
use crate::snr::SnrReport;

/// Phase-conjugate receiver parameters used by default.
pub const PC_MU: f64 = std::f64::consts::SQRT_2;
pub const PC_NU: f64 = 1.0;
/// Default OPA gain, `G − 1 = 7.4e−5`.
pub const OPA_GAIN: f64 = 1.0 + 7.4e-5;

/// Search box for the bound-observable parameters.
pub const FAMILY_BOX: f64 = 50.0;
/// Coarse grid resolution per axis.
pub const FAMILY_GRID: usize = 201;
/// Simplex iteration budget.
pub const FAMILY_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ReceiverSpec {
    /// `a_S† a_I† + a_S a_I + α n_S + β n_I` with fixed parameters.
    Bound { alpha: f64, beta: f64 },
    /// `α = 0`, `β = −|β|`; `None` maximises over `β`.
    BoundConstant { beta: Option<f64> },
    /// Both `α` and `β` maximised.
    BoundNonConstant,
    NearlyBound,
    Pc { mu: f64, nu: f64 },
    Opa { gain: f64 },
    Dh,
    /// Photon-number difference after a beam splitter on (signal, idler).
    Pndm { t: f64, r: f64, phi: f64 },
    /// Homodyne on the signal mode.
    CoherentHd { phi: f64 },
    /// `a_S† a_I + a_I† a_S` on a coherent pair.
    CoherentOff,
    /// `a_S† a_I + a_I† a_S` on a classically correlated pair.
    CctOff,
    /// Squeeze correlation read out by heterodyne on signal and idler.
    SeparateHtd,
    /// Squeeze correlation read out by heterodyne on both outputs of a 50:50
    /// beam splitter.
    DoubleHtd,
    /// Cross-number observable read out by heterodyne on signal and idler.
    CiHeterodyne,
    /// `X_S(θ) X_I(φ)` by homodyne on each mode.
    HdProduct { theta: f64, phi: f64 },
}

impl ReceiverSpec {
    pub fn pc_default() -> Self {
        ReceiverSpec::Pc { mu: PC_MU, nu: PC_NU }
    }

    pub fn opa_default() -> Self {
        ReceiverSpec::Opa { gain: OPA_GAIN }
    }

    /// 50:50 splitter with the phase that maps the number difference onto
    /// `−(a_S† a_I + a_I† a_S)`.
    pub fn pndm_default() -> Self {
        ReceiverSpec::Pndm { t: FRAC_1_SQRT_2, r: FRAC_1_SQRT_2, phi: FRAC_PI_2 }
    }

    /// Quadrature product at `θ + φ = π`.
    pub fn hd_product_default() -> Self {
        ReceiverSpec::HdProduct { theta: 0.0, phi: PI }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ReceiverSpec::Pc { mu, nu } => obs_pc(mu, nu).map(|_| ()),
            ReceiverSpec::Opa { gain } => obs_opa(gain).map(|_| ()),
            ReceiverSpec::Pndm { t, r, .. } => {
                if (t * t + r * r - 1.0).abs() > 1e-12 {
                    return Err(domain(format!("beam splitter needs t² + r² = 1, got t = {t}, r = {r}")));
                }
                Ok(())
            }
            ReceiverSpec::Bound { alpha, beta } if !(alpha.is_finite() && beta.is_finite()) => {
                Err(domain("bound-observable parameters must be finite"))
            }
            _ => Ok(()),
        }
    }

    /// Fixed observable for specs that need no optimisation.
    pub fn observable(&self) -> Result<QuadraticObservable> {
        self.validate()?;
        Ok(match *self {
            ReceiverSpec::Bound { alpha, beta } => obs_bound(alpha, beta),
            ReceiverSpec::BoundConstant { beta: Some(b) } => obs_bound(0.0, -b.abs()),
            ReceiverSpec::BoundConstant { beta: None } | ReceiverSpec::BoundNonConstant => {
                return Err(domain("optimised bound receiver has no fixed observable"))
            }
            ReceiverSpec::NearlyBound | ReceiverSpec::SeparateHtd | ReceiverSpec::DoubleHtd => {
                obs_squeeze_correlation()
            }
            ReceiverSpec::Pc { mu, nu } => obs_pc(mu, nu)?,
            ReceiverSpec::Opa { gain } => obs_opa(gain)?,
            ReceiverSpec::Dh => obs_dh(),
            ReceiverSpec::Pndm { t, r, phi } => obs_number_difference(2, 0, 1).transform_by_beam_splitter(0, 1, t, r, phi)?,
            ReceiverSpec::CoherentHd { phi } => obs_quadrature(2, 0, phi),
            ReceiverSpec::CoherentOff | ReceiverSpec::CctOff | ReceiverSpec::CiHeterodyne => obs_off(),
            ReceiverSpec::HdProduct { theta, phi } => obs_hd_product(theta, phi),
        })
    }

    fn heterodyne(&self) -> Option<HeterodyneVariant> {
        match self {
            ReceiverSpec::SeparateHtd => Some(HeterodyneVariant::SeparateHtdQi),
            ReceiverSpec::DoubleHtd => Some(HeterodyneVariant::DoubleHtdAfterBs),
            ReceiverSpec::CiHeterodyne => Some(HeterodyneVariant::DualModeCi),
            _ => None,
        }
    }
}

/// Observable statistics on both hypotheses, adding vacuum ancillas when the
/// observable acts on more modes than the pair carries.
pub fn receiver_stats(spec: &ReceiverSpec, pair: &HypothesisPair) -> Result<(ObservableStats, ObservableStats)> {
    let obs = spec.observable()?;
    let n = pair.on.n_modes();
    let pair = if obs.n_modes() > n { pair.tensor(&make_vacuum(obs.n_modes() - n)?) } else { pair.clone() };
    let obs = obs.embed(pair.on.n_modes())?;
    let mut on = obs.stats(&pair.on)?;
    let mut off = obs.stats(&pair.off)?;
    if let Some(variant) = spec.heterodyne() {
        on = heterodyne_degrade(on, variant, &pair.on)?;
        off = heterodyne_degrade(off, variant, &pair.off)?;
    }
    Ok((on, off))
}

/// SNR of a receiver evaluated with the exact moment engine.
pub fn snr_generic(spec: &ReceiverSpec, pair: &HypothesisPair, m_modes: u64) -> Result<SnrReport> {
    match *spec {
        ReceiverSpec::BoundConstant { beta: None } => {
            let family = FamilyPair::from_pair(pair)?;
            let beta = family.optimal_beta();
            family.report(0.0, beta, m_modes)
        }
        ReceiverSpec::BoundNonConstant => {
            let family = FamilyPair::from_pair(pair)?;
            let opt = maximize_family(&family, None);
            family.report(opt.alpha, opt.beta, m_modes)
        }
        _ => {
            let (on, off) = receiver_stats(spec, pair)?;
            SnrReport::from_stats(on, off, m_modes)
        }
    }
}

/// Means and covariances of `(a_S† a_I† + a_S a_I, n_S, n_I)` on one state.
///
/// Every member of the bound family `S + α n_S + β n_I` has mean `wᵀμ` and
/// variance `wᵀΣw` with `w = (1, α, β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyMoments {
    pub mean: [f64; 3],
    pub cov: [[f64; 3]; 3],
}

impl FamilyMoments {
    pub fn from_state(state: &crate::gaussian::GaussianState) -> Result<Self> {
        let n = state.n_modes();
        let parts = [obs_squeeze_correlation().embed(n)?, obs_number(n, 0), obs_number(n, 1)];
        let stats: Vec<ObservableStats> = parts.iter().map(|o| o.stats(state)).collect::<Result<_>>()?;
        let mut cov = [[0.0; 3]; 3];
        for i in 0..3 {
            cov[i][i] = stats[i].variance;
            for j in 0..i {
                // Polarisation: Cov(X, Y) = (Var(X + Y) − Var X − Var Y)/2.
                let sum = (parts[i].clone() + parts[j].clone()).stats(state)?;
                let c = 0.5 * (sum.variance - stats[i].variance - stats[j].variance);
                cov[i][j] = c;
                cov[j][i] = c;
            }
        }
        Ok(Self { mean: [stats[0].mean, stats[1].mean, stats[2].mean], cov })
    }

    /// Closed-form moments for a signal occupation `a` and correlation `c`.
    fn closed(a: f64, c: f64, n_s: f64) -> Self {
        let s_var = (a + 1.0) * (n_s + 1.0) + 2.0 * c * c + a * n_s;
        let cross_s = c * (2.0 * a + 1.0);
        let cross_i = c * (2.0 * n_s + 1.0);
        Self {
            mean: [2.0 * c, a, n_s],
            cov: [
                [s_var, cross_s, cross_i],
                [cross_s, a * (a + 1.0), c * c],
                [cross_i, c * c, n_s * (n_s + 1.0)],
            ],
        }
    }

    pub fn stats(&self, alpha: f64, beta: f64) -> ObservableStats {
        let w = [1.0, alpha, beta];
        let mean = (0..3).map(|i| w[i] * self.mean[i]).sum();
        let mut variance = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                variance += w[i] * self.cov[i][j] * w[j];
            }
        }
        ObservableStats { mean, variance: variance.max(0.0) }
    }
}

/// Family moments on both hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyPair {
    pub on: FamilyMoments,
    pub off: FamilyMoments,
}

impl FamilyPair {
    pub fn from_pair(pair: &HypothesisPair) -> Result<Self> {
        Ok(Self { on: FamilyMoments::from_state(&pair.on)?, off: FamilyMoments::from_state(&pair.off)? })
    }

    /// Closed-form moments for the two-mode squeezed vacuum probe.
    pub fn closed(params: &ScenarioParams) -> Result<Self> {
        params.validate()?;
        let (a_on, a_off, c) = occupations(params);
        Ok(Self { on: FamilyMoments::closed(a_on, c, params.n_s), off: FamilyMoments::closed(a_off, 0.0, params.n_s) })
    }

    /// Single-mode SNR of `S + α n_S + β n_I`.
    pub fn snr_per_mode(&self, alpha: f64, beta: f64) -> f64 {
        let on = self.on.stats(alpha, beta);
        let off = self.off.stats(alpha, beta);
        let spread = on.variance.sqrt() + off.variance.sqrt();
        if spread == 0.0 {
            return 0.0;
        }
        let d = on.mean - off.mean;
        d * d / (2.0 * spread * spread)
    }

    pub fn report(&self, alpha: f64, beta: f64, m_modes: u64) -> Result<SnrReport> {
        SnrReport::from_stats(self.on.stats(alpha, beta), self.off.stats(alpha, beta), m_modes)
    }

    /// `β` maximising the SNR at `α = 0`.
    pub fn optimal_beta(&self) -> f64 {
        let f = |b: f64| -self.snr_per_mode(0.0, b);
        bracketed_min(f, -FAMILY_BOX, FAMILY_BOX, 2001, 1e-12).x
    }
}

/// `(A_on, A_off, C)` for the two-mode squeezed vacuum probe.
fn occupations(params: &ScenarioParams) -> (f64, f64, f64) {
    let ScenarioParams { kappa, n_s, n_b, .. } = *params;
    (kappa * n_s + params.received_background(), n_b, (kappa * n_s * (n_s + 1.0)).sqrt())
}

fn report_from(mean_on: f64, mean_off: f64, var_on: f64, var_off: f64, params: &ScenarioParams) -> Result<SnrReport> {
    SnrReport::from_moments(mean_on, mean_off, var_on, var_off, params.m_modes)
}

/// Variance of the squeeze correlation, `(A+1)(N_S+1) + 2C² + AN_S`.
pub fn squeeze_variance(a: f64, c: f64, n_s: f64) -> f64 {
    (a + 1.0) * (n_s + 1.0) + 2.0 * c * c + a * n_s
}

/// Nearly-bound receiver, `2MC² / (√Δ²O_κ + √Δ²O_0)²`.
pub fn snr_nearly_bound_closed(params: &ScenarioParams) -> Result<SnrReport> {
    params.validate()?;
    let (a_on, a_off, c) = occupations(params);
    let n_s = params.n_s;
    report_from(2.0 * c, 0.0, squeeze_variance(a_on, c, n_s), squeeze_variance(a_off, 0.0, n_s), params)
}

/// Bound family with parameters `(α, β)`:
/// `M[2C + αΔA]² / 2[√(Δ²O_κ + l(κ)) + √(Δ²O_0 + l(0))]²` with
/// `l = α²A(A+1) + β²N_S(N_S+1) + 2αC(2A+1) + 2βC(2N_S+1) + 2αβC²`.
pub fn snr_bound_family_closed(params: &ScenarioParams, alpha: f64, beta: f64) -> Result<SnrReport> {
    let family = FamilyPair::closed(params)?;
    family.report(alpha, beta, params.m_modes)
}

/// Optimal `|β|` for the bound observable under the constant background:
/// `(1+2N_S)/√(κN_S(N_S+1)³) · [f − √(f(f − κ(N_S+1)))]`,
/// `f = 1 + N_S + N_B + 2N_S N_B`.
pub fn optimal_beta_closed(params: &ScenarioParams) -> Result<f64> {
    params.validate()?;
    let ScenarioParams { kappa, n_s, n_b, .. } = *params;
    if params.noise_model != NoiseModel::Constant {
        return Err(domain("the closed-form optimal beta assumes the constant background model"));
    }
    if kappa * n_s == 0.0 {
        return Err(domain("optimal beta is singular when kappa * n_s = 0"));
    }
    let f = 1.0 + n_s + n_b + 2.0 * n_s * n_b;
    // f − √(f(f−x)) = f·x / (f + √(f(f−x))) avoids cancellation for small x.
    let x = kappa * (n_s + 1.0);
    let bracket = f * x / (f + (f * (f - x)).sqrt());
    Ok((1.0 + 2.0 * n_s) / (kappa * n_s * (n_s + 1.0).powi(3)).sqrt() * bracket)
}

/// Bound observable `S − |β| n_I` under the constant background; `None`
/// uses [`optimal_beta_closed`], or `β = 0` where that is singular.
pub fn snr_bound_constant(params: &ScenarioParams, beta: Option<f64>) -> Result<SnrReport> {
    if params.noise_model != NoiseModel::Constant {
        return Err(domain("this bound receiver assumes the constant background model"));
    }
    let beta = match beta {
        Some(b) => b.abs(),
        None => match optimal_beta_closed(params) {
            Ok(b) => b,
            Err(_) if params.kappa * params.n_s == 0.0 => 0.0,
            Err(e) => return Err(e),
        },
    };
    snr_bound_family_closed(params, 0.0, -beta)
}

/// Phase-conjugate receiver: the squeeze-correlation variances gain
/// `(μ²/ν²)N_S` from the vacuum ancilla.
pub fn snr_closed_pc(params: &ScenarioParams, mu: f64, nu: f64) -> Result<SnrReport> {
    obs_pc(mu, nu)?;
    params.validate()?;
    let (a_on, a_off, c) = occupations(params);
    let n_s = params.n_s;
    let extra = mu * mu / (nu * nu) * n_s;
    report_from(2.0 * c, 0.0, squeeze_variance(a_on, c, n_s) + extra, squeeze_variance(a_off, 0.0, n_s) + extra, params)
}

fn opa_report(params: &ScenarioParams, gain: f64, idler_weight: f64) -> Result<SnrReport> {
    obs_opa(gain)?;
    params.validate()?;
    let (a_on, a_off, c) = occupations(params);
    let n_s = params.n_s;
    let g = gain;
    let x = (g - 1.0) / g;
    let root = (g * (g - 1.0)).sqrt();
    let q = |a: f64, c: f64| {
        x * a * (a + 1.0)
            + n_s * (n_s + 1.0) / x
            + c / root * ((g - 1.0) * (4.0 * a + 2.0) + g * (4.0 * n_s + idler_weight))
            + 2.0 * c * c
    };
    // Observable divided by √(G(G−1)): S + √x (n_S + 1) + n_I/√x.
    let mean = |a: f64, c: f64| 2.0 * c + x.sqrt() * (a + 1.0) + n_s / x.sqrt();
    report_from(
        mean(a_on, c),
        mean(a_off, 0.0),
        squeeze_variance(a_on, c, n_s) + q(a_on, c),
        squeeze_variance(a_off, 0.0, n_s) + q(a_off, 0.0),
        params,
    )
}

/// OPA receiver with a unit-weight idler term in the variance,
/// containing `G(4N_S + 1)`.
pub fn snr_closed_opa(params: &ScenarioParams, gain: f64) -> Result<SnrReport> {
    opa_report(params, gain, 1.0)
}

/// OPA receiver with the idler cross term `G(4N_S + 2)` that follows from
/// expanding the observable.
pub fn snr_closed_opa_corrected(params: &ScenarioParams, gain: f64) -> Result<SnrReport> {
    opa_report(params, gain, 2.0)
}

/// Double-homodyne receiver:
/// `2M(C − ΔA/2)² / [√(Δ²O_κ + p(κ)) + √(Δ²O_0 + p(0))]²`,
/// `p = A(A+1) + N_S(N_S+1) + 2C² − 4C(A + N_S + 1)`.
pub fn snr_closed_dh(params: &ScenarioParams) -> Result<SnrReport> {
    params.validate()?;
    let (a_on, a_off, c) = occupations(params);
    let n_s = params.n_s;
    let p = |a: f64, c: f64| a * (a + 1.0) + n_s * (n_s + 1.0) + 2.0 * c * c - 4.0 * c * (a + n_s + 1.0);
    let mean = |a: f64, c: f64| -2.0 * c + a + 1.0 + n_s;
    report_from(
        mean(a_on, c),
        mean(a_off, 0.0),
        squeeze_variance(a_on, c, n_s) + p(a_on, c),
        squeeze_variance(a_off, 0.0, n_s) + p(a_off, 0.0),
        params,
    )
}

/// Cross-number variance `4κN_S N_I·w + κN_S + y` with
/// `y = N_I + b(1 + 2N_I)`; `w = 1` for thermal, `0` for coherent light.
fn off_variance(params: &ScenarioParams, background: f64, present: bool, correlated: bool) -> f64 {
    let ScenarioParams { kappa, n_s, n_i, .. } = *params;
    let y = n_i + background * (1.0 + 2.0 * n_i);
    if !present {
        return y;
    }
    let w = if correlated { 4.0 * kappa * n_s * n_i } else { 0.0 };
    w + kappa * n_s + y
}

/// Classically correlated thermal probe with the cross-number observable:
/// `2MκN_S N_I / [√(4κN_S N_I + κN_S + y) + √y]²`, `y = N_I + N_B(1 + 2N_I)`.
pub fn snr_cct(params: &ScenarioParams) -> Result<SnrReport> {
    params.validate()?;
    let d = (params.kappa * params.n_s * params.n_i).sqrt();
    report_from(
        2.0 * d,
        0.0,
        off_variance(params, params.received_background(), true, true),
        off_variance(params, params.n_b, false, true),
        params,
    )
}

/// Coherent probe with the cross-number observable; as [`snr_cct`] without
/// the `4κN_S N_I` term.
pub fn snr_coherent_off(params: &ScenarioParams) -> Result<SnrReport> {
    params.validate()?;
    let d = (params.kappa * params.n_s * params.n_i).sqrt();
    report_from(
        2.0 * d,
        0.0,
        off_variance(params, params.received_background(), true, false),
        off_variance(params, params.n_b, false, false),
        params,
    )
}

/// Coherent probe with homodyne detection of the signal quadrature,
/// `MκN_S / (√(b + ½) + √(N_B + ½))²`; `MκN_S/(4N_B + 2)` for the constant
/// background.
pub fn snr_coherent_hd(params: &ScenarioParams) -> Result<SnrReport> {
    params.validate()?;
    let amp = (2.0 * params.kappa * params.n_s).sqrt();
    report_from(amp, 0.0, params.received_background() + 0.5, params.n_b + 0.5, params)
}

/// Squeeze correlation read out through heterodyne detection, expressed on
/// the rescaled observable: variances `Δ²O + k + ⟨n_S + n_I⟩`.
fn heterodyne_closed(params: &ScenarioParams, k: f64) -> Result<SnrReport> {
    params.validate()?;
    let (a_on, a_off, c) = occupations(params);
    let n_s = params.n_s;
    report_from(
        c,
        0.0,
        0.25 * (squeeze_variance(a_on, c, n_s) + k + a_on + n_s),
        0.25 * (squeeze_variance(a_off, 0.0, n_s) + k + a_off + n_s),
        params,
    )
}

/// Separate heterodyne on signal and idler; added variance
/// `1 + N_B + (1+κ)N_S` for the constant background.
pub fn snr_closed_separate_htd(params: &ScenarioParams) -> Result<SnrReport> {
    heterodyne_closed(params, HeterodyneVariant::SeparateHtdQi.vacuum_constant())
}

/// Double heterodyne after a 50:50 beam splitter; the total photon number is
/// unchanged by the splitter, so the added variance is as for
/// [`snr_closed_separate_htd`].
pub fn snr_closed_double_htd(params: &ScenarioParams) -> Result<SnrReport> {
    heterodyne_closed(params, HeterodyneVariant::DoubleHtdAfterBs.vacuum_constant())
}

/// Alternative reading of the double-heterodyne noise with the added variance
/// multiplied by four, `Δ²O + 4[1 + A + N_S]`. Kept for comparison only; the
/// mode-level simulation does not support it.
pub fn snr_double_htd_fourfold(params: &ScenarioParams) -> Result<SnrReport> {
    params.validate()?;
    let (a_on, a_off, c) = occupations(params);
    let n_s = params.n_s;
    report_from(
        2.0 * c,
        0.0,
        squeeze_variance(a_on, c, n_s) + 4.0 * (1.0 + a_on + n_s),
        squeeze_variance(a_off, 0.0, n_s) + 4.0 * (1.0 + a_off + n_s),
        params,
    )
}

/// `MκN_S / (2N_B)`, the small-signal limit of the nearly-bound receiver.
pub fn nearly_bound_asymptote(params: &ScenarioParams) -> f64 {
    params.m_modes as f64 * params.kappa * params.n_s / (2.0 * params.n_b)
}

/// `MκN_S / (4N_B)`, the limit of the correlated-thermal receiver.
pub fn cct_asymptote(params: &ScenarioParams) -> f64 {
    params.m_modes as f64 * params.kappa * params.n_s / (4.0 * params.n_b)
}

/// Maximiser of the bound-family SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyOptimum {
    pub alpha: f64,
    pub beta: f64,
    /// Single-mode SNR at the optimum.
    pub snr_per_mode: f64,
    /// Euclidean norm of the gradient of `ln SNR` at the optimum.
    pub gradient_norm: f64,
    pub converged: bool,
}

/// Stationarity threshold on `‖∇ ln SNR‖`.
pub const FAMILY_GRADIENT_TOL: f64 = 1e-8;

impl FamilyPair {
    /// Gradient of `ln SNR` with respect to `(α, β)`.
    pub fn grad_ln_snr(&self, alpha: f64, beta: f64) -> [f64; 2] {
        let w = [1.0, alpha, beta];
        let diff: Vec<f64> = (0..3).map(|i| self.on.mean[i] - self.off.mean[i]).collect();
        let d: f64 = (0..3).map(|i| w[i] * diff[i]).sum();
        let sigma_w = |m: &FamilyMoments| -> [f64; 3] {
            let mut out = [0.0; 3];
            for (i, o) in out.iter_mut().enumerate() {
                *o = (0..3).map(|j| m.cov[i][j] * w[j]).sum();
            }
            out
        };
        let (s_on, s_off) = (sigma_w(&self.on), sigma_w(&self.off));
        let v_on: f64 = (0..3).map(|i| w[i] * s_on[i]).sum::<f64>().max(f64::MIN_POSITIVE);
        let v_off: f64 = (0..3).map(|i| w[i] * s_off[i]).sum::<f64>().max(f64::MIN_POSITIVE);
        let spread = v_on.sqrt() + v_off.sqrt();
        // ln SNR = 2 ln|d| − 2 ln(√v_on + √v_off) − ln 2, with ∂v/∂w = 2Σw.
        let mut g = [0.0; 2];
        for (k, gk) in g.iter_mut().enumerate() {
            let i = k + 1;
            let d_spread = s_on[i] / v_on.sqrt() + s_off[i] / v_off.sqrt();
            *gk = 2.0 * diff[i] / d - 2.0 * d_spread / spread;
        }
        g
    }
}

fn norm2(g: [f64; 2]) -> f64 {
    g[0].hypot(g[1])
}

/// Newton iterations on the analytic gradient of `ln SNR`, with a
/// finite-difference Jacobian and step halving.
fn polish_family(family: &FamilyPair, x0: [f64; 2]) -> [f64; 2] {
    let grad = |x: [f64; 2]| family.grad_ln_snr(x[0], x[1]);
    let mut x = x0;
    let mut g = grad(x);
    for _ in 0..50 {
        if norm2(g) < 1e-14 {
            break;
        }
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let h = 1e-6 * (1.0 + x[k].abs());
            let (mut up, mut down) = (x, x);
            up[k] += h;
            down[k] -= h;
            let (gu, gd) = (grad(up), grad(down));
            for r in 0..2 {
                jac[r][k] = (gu[r] - gd[r]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !(det.abs() > 0.0) || !det.is_finite() {
            break;
        }
        let step = [
            -(jac[1][1] * g[0] - jac[0][1] * g[1]) / det,
            -(jac[0][0] * g[1] - jac[1][0] * g[0]) / det,
        ];
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..20 {
            let trial = [x[0] + scale * step[0], x[1] + scale * step[1]];
            let in_box = trial.iter().all(|v| v.abs() <= FAMILY_BOX);
            let gt = grad(trial);
            if in_box && norm2(gt) < norm2(g) {
                x = trial;
                g = gt;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    x
}

/// Maximises `S + α n_S + β n_I` over `(α, β) ∈ [−50, 50]²`.
///
/// Without a start point a 201×201 grid picks the seed. A simplex search
/// (500 iterations) and Newton steps on the gradient of `ln SNR` then polish
/// it. The SNR is very flat along `β` near the optimum, so the Newton stage is
/// what pins `β` down.
pub fn maximize_family(family: &FamilyPair, start: Option<[f64; 2]>) -> FamilyOptimum {
    let objective = |v: &[f64]| {
        if v.iter().any(|x| x.abs() > FAMILY_BOX) {
            return f64::INFINITY;
        }
        let s = family.snr_per_mode(v[0], v[1]);
        if s > 0.0 {
            -s.ln()
        } else {
            f64::INFINITY
        }
    };
    let grid_step = 2.0 * FAMILY_BOX / (FAMILY_GRID - 1) as f64;
    let seed = match start {
        Some(s) => s,
        None => {
            let mut best = ([0.0, 0.0], f64::INFINITY);
            for i in 0..FAMILY_GRID {
                for j in 0..FAMILY_GRID {
                    let p = [-FAMILY_BOX + grid_step * i as f64, -FAMILY_BOX + grid_step * j as f64];
                    let v = objective(&p);
                    if v < best.1 {
                        best = (p, v);
                    }
                }
            }
            best.0
        }
    };
    if !objective(&seed).is_finite() {
        return FamilyOptimum { alpha: 0.0, beta: 0.0, snr_per_mode: 0.0, gradient_norm: 0.0, converged: true };
    }
    // Initial edges point towards the box centre so corner starts stay inside.
    let edge = if start.is_some() { 0.1 * FAMILY_BOX } else { grid_step };
    let steps: Vec<f64> = seed.iter().map(|&x| if x > 0.0 { -edge } else { edge }).collect();
    let simplex = nelder_mead_with_steps(objective, &seed, &steps, FAMILY_ITERATIONS, 1e-12);
    let x = polish_family(family, [simplex.x[0], simplex.x[1]]);
    let gradient_norm = norm2(family.grad_ln_snr(x[0], x[1]));
    FamilyOptimum {
        alpha: x[0],
        beta: x[1],
        snr_per_mode: family.snr_per_mode(x[0], x[1]),
        gradient_norm,
        converged: gradient_norm < FAMILY_GRADIENT_TOL,
    }
}

/// Numerically optimal `(α, β)` for the nonconstant background model.
pub fn optimize_alpha_beta_nonconstant(params: &ScenarioParams) -> Result<(f64, f64, SnrReport)> {
    optimize_alpha_beta_nonconstant_from(params, None)
}

/// As [`optimize_alpha_beta_nonconstant`] from a chosen start point.
pub fn optimize_alpha_beta_nonconstant_from(
    params: &ScenarioParams,
    start: Option<[f64; 2]>,
) -> Result<(f64, f64, SnrReport)> {
    if params.noise_model != NoiseModel::NonConstant {
        return Err(domain("the (alpha, beta) optimisation targets the nonconstant background model"));
    }
    let (opt, report) = optimize_family_closed(params, start)?;
    Ok((opt.alpha, opt.beta, report))
}

/// Optimises the bound family on the closed-form moments for either model.
pub fn optimize_family_closed(params: &ScenarioParams, start: Option<[f64; 2]>) -> Result<(FamilyOptimum, SnrReport)> {
    let family = FamilyPair::closed(params)?;
    let opt = maximize_family(&family, start);
    if !opt.snr_per_mode.is_finite() {
        return Err(Error::Numerical("bound-family optimisation diverged".into()));
    }
    let report = family.report(opt.alpha, opt.beta, params.m_modes)?;
    Ok((opt, report))
}
