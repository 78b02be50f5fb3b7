//! Small-photon scenarios shared by the oracle comparisons.

use gillum::channel::{NoiseModel, ScenarioParams, Source};
use gillum::observable::{obs_bound, obs_dh, obs_hd_product, obs_off, obs_opa, obs_quadrature_product, QuadraticObservable};

use super::fock::FockState;
use super::ladder::{receivers as lp, LadderPoly};

pub fn two_mode_cases() -> Vec<(&'static str, QuadraticObservable, LadderPoly)> {
    vec![
        ("bound", obs_bound(0.4, -0.7), lp::bound(0.4, -0.7)),
        ("opa", obs_opa(1.3).unwrap(), lp::opa(1.3)),
        ("dh", obs_dh(), lp::dh()),
        ("cross-number", obs_off(), lp::cross_number()),
        ("quadrature-product", obs_hd_product(0.3, 1.1), lp::quadrature_product(0.3, 1.1)),
        ("quadrature-square", obs_quadrature_product(2, 1, 0.7, 1, 0.7), lp::quadrature_square(1, 0.7)),
    ]
}

pub struct Scenario {
    pub params: ScenarioParams,
    pub source: Source,
    pub cutoff: usize,
}

pub fn scenarios() -> Vec<Scenario> {
    let mut out = Vec::new();
    for noise in [NoiseModel::Constant, NoiseModel::NonConstant] {
        for (kappa, n_s, n_b) in [(0.3, 0.2, 0.3), (0.05, 0.08, 0.15)] {
            let p = ScenarioParams::new(kappa, n_s, n_b, 1, noise);
            out.push(Scenario { params: p, source: Source::Tmsv, cutoff: 24 });
            out.push(Scenario { params: p.with_idler(0.15), source: Source::Coherent, cutoff: 24 });
        }
        let p = ScenarioParams::new(0.2, 0.1, 0.2, 1, noise).with_idler(0.15);
        out.push(Scenario { params: p, source: Source::Cct, cutoff: 24 });
    }
    // Largest photon numbers of the small-signal regime; the environment is
    // thermal with mean 0.5 in both models.
    for (noise, n_b) in [(NoiseModel::Constant, 0.25), (NoiseModel::NonConstant, 0.5)] {
        let p = ScenarioParams::new(0.5, 0.5, n_b, 1, noise);
        out.push(Scenario { params: p, source: Source::Tmsv, cutoff: 30 });
        out.push(Scenario { params: p.with_idler(0.5), source: Source::Coherent, cutoff: 30 });
    }
    out
}

fn fock_source(s: &Scenario) -> FockState {
    let p = &s.params;
    match s.source {
        Source::Tmsv => FockState::tmsv(p.n_s, s.cutoff),
        Source::Coherent => FockState::coherent(p.n_s.sqrt(), p.n_i.sqrt(), 16),
        Source::Cct => FockState::split_thermal(p.n_s, p.n_i, s.cutoff),
    }
}

/// Both hypotheses built photon by photon; the absent target is full
/// replacement of the signal by background.
pub fn fock_pair(s: &Scenario) -> (FockState, FockState) {
    let p = &s.params;
    let input = fock_source(s);
    let env_on = match p.noise_model {
        NoiseModel::Constant => p.n_b / (1.0 - p.kappa),
        NoiseModel::NonConstant => p.n_b,
    };
    (input.through_target(p.kappa, env_on, s.cutoff), input.through_target(0.0, p.n_b, s.cutoff))
}
