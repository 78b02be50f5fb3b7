//! Hermitian observables quadratic in mode operators and their exact
//! moments on Gaussian states.
//!
//! An observable is kept in normal order,
//!
//! ```text
//! O = c0 + Σ h_ij a_i† a_j + Σ (g_ij a_i† a_j† + g_ij* a_i a_j) + Σ (l_i a_i† + l_i* a_i)
//! ```
//!
//! with `h` Hermitian and `g` symmetric; constants produced by reordering
//! (`a a† = a† a + 1`) are folded into `c0` when the observable is built.
//!
//! Moments are evaluated in the quadrature picture. Writing the observable as
//! `O = k + fᵀr + rᵀWr` with `W` real symmetric, a Gaussian state with mean
//! `m` and symmetrised covariance `σ` gives
//!
//! ```text
//! ⟨O⟩  = k + fᵀm + tr(Wσ) + mᵀWm
//! Var O = 2 tr(WσWσ) + ½ tr(WΩWΩ) + (f + 2Wm)ᵀ σ (f + 2Wm)
//! ```
//!
//! which is the Isserlis factorisation of the fourth moments with the
//! commutator `[r_i, r_j] = iΩ_ij` kept.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Neg};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian::{beam_splitter_matrix, ladder_transform, GaussianState};
use crate::symplectic::symplectic_form;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Variance values in `[−VARIANCE_CLAMP, 0)` are reported as zero.
pub const VARIANCE_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObservable {
    n_modes: usize,
    /// Constant term.
    pub c0: f64,
    /// Coefficients of `a_i† a_j`.
    pub h: DMatrix<Complex64>,
    /// Coefficients of `a_i† a_j†`.
    pub g: DMatrix<Complex64>,
    /// Coefficients of `a_i†`.
    pub linear: DVector<Complex64>,
}

/// Mean and variance of an observable on one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableStats {
    pub mean: f64,
    pub variance: f64,
}

/// `O = k + fᵀ r + rᵀ W r` in quadrature variables.
#[derive(Debug, Clone)]
pub struct QuadratureForm {
    pub constant: f64,
    pub linear: DVector<f64>,
    pub quadratic: DMatrix<f64>,
}

impl QuadraticObservable {
    pub fn zero(n_modes: usize) -> Self {
        Self {
            n_modes,
            c0: 0.0,
            h: DMatrix::from_element(n_modes, n_modes, ZERO),
            g: DMatrix::from_element(n_modes, n_modes, ZERO),
            linear: DVector::from_element(n_modes, ZERO),
        }
    }

    /// Builds an observable from raw blocks, checking Hermiticity of `h` and
    /// symmetry of `g` to 1e−12.
    pub fn from_parts(
        c0: f64,
        h: DMatrix<Complex64>,
        g: DMatrix<Complex64>,
        linear: DVector<Complex64>,
    ) -> Result<Self> {
        let n = h.nrows();
        for (name, rows, cols) in [("h", h.nrows(), h.ncols()), ("g", g.nrows(), g.ncols())] {
            if rows != n || cols != n {
                return Err(domain(format!("{name} must be {n}x{n}")));
            }
        }
        if linear.len() != n {
            return Err(Error::Dimension { expected: n, found: linear.len() });
        }
        if (&h - h.adjoint()).camax() > 1e-12 {
            return Err(domain("h must be Hermitian"));
        }
        if (&g - g.transpose()).camax() > 1e-12 {
            return Err(domain("g must be symmetric"));
        }
        if !c0.is_finite() {
            return Err(domain("constant term must be finite"));
        }
        Ok(Self { n_modes: n, c0, h, g, linear })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Adds `z a_i† a_j + z* a_j† a_i` (or `Re z · a_i† a_i` when `i == j`).
    pub fn add_number(mut self, i: usize, j: usize, z: Complex64) -> Self {
        if i == j {
            self.h[(i, i)] += Complex64::new(z.re, 0.0);
        } else {
            self.h[(i, j)] += z;
            self.h[(j, i)] += z.conj();
        }
        self
    }

    /// Adds `z a_i a_i†` for real `z`, normal ordered as `z a_i† a_i + z`.
    pub fn add_anti_number(mut self, i: usize, z: f64) -> Self {
        self.h[(i, i)] += Complex64::new(z, 0.0);
        self.c0 += z;
        self
    }

    /// Adds `z a_i† a_j† + z* a_i a_j`.
    pub fn add_pair(mut self, i: usize, j: usize, z: Complex64) -> Self {
        if i == j {
            self.g[(i, i)] += z;
        } else {
            self.g[(i, j)] += z * 0.5;
            self.g[(j, i)] += z * 0.5;
        }
        self
    }

    /// Adds `z a_i† + z* a_i`.
    pub fn add_linear(mut self, i: usize, z: Complex64) -> Self {
        self.linear[i] += z;
        self
    }

    pub fn add_constant(mut self, c: f64) -> Self {
        self.c0 += c;
        self
    }

    /// Multiplies every coefficient by a real factor.
    pub fn scaled(mut self, a: f64) -> Self {
        self.c0 *= a;
        self.h *= Complex64::new(a, 0.0);
        self.g *= Complex64::new(a, 0.0);
        self.linear *= Complex64::new(a, 0.0);
        self
    }

    /// Same observable acting on `n_modes ≥ self.n_modes()` modes.
    pub fn embed(&self, n_modes: usize) -> Result<Self> {
        if n_modes < self.n_modes {
            return Err(domain("cannot embed into fewer modes"));
        }
        let mut out = Self::zero(n_modes);
        let k = self.n_modes;
        out.c0 = self.c0;
        out.h.view_mut((0, 0), (k, k)).copy_from(&self.h);
        out.g.view_mut((0, 0), (k, k)).copy_from(&self.g);
        out.linear.rows_mut(0, k).copy_from(&self.linear);
        Ok(out)
    }

    /// Heisenberg substitution `a → B a` for an `n × n` mode matrix.
    pub fn transform_passive(&self, b: &DMatrix<Complex64>) -> Result<Self> {
        let n = self.n_modes;
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::Dimension { expected: n, found: b.nrows() });
        }
        let bh = b.adjoint();
        let h = &bh * &self.h * b;
        let g = &bh * &self.g * b.map(|z| z.conj());
        let linear = &bh * &self.linear;
        Ok(Self {
            n_modes: n,
            c0: self.c0,
            h: (&h + h.adjoint()) * Complex64::new(0.5, 0.0),
            g: (&g + g.transpose()) * Complex64::new(0.5, 0.0),
            linear,
        })
    }

    /// Expresses an observable on the beam-splitter outputs in terms of its
    /// inputs, with the convention of
    /// [`beam_splitter_matrix`](crate::gaussian::beam_splitter_matrix).
    pub fn transform_by_beam_splitter(&self, i: usize, j: usize, t: f64, r: f64, phi: f64) -> Result<Self> {
        let b = beam_splitter_matrix(self.n_modes, i, j, t, r, phi)?;
        self.transform_passive(&b)
    }

    /// Complex quadrature form; imaginary parts vanish for Hermitian input.
    fn complex_form(&self) -> (Complex64, DVector<Complex64>, DMatrix<Complex64>) {
        let n = self.n_modes;
        let mut z = DMatrix::from_element(2 * n, 2 * n, ZERO);
        for i in 0..n {
            for j in 0..n {
                z[(n + i, j)] += self.h[(i, j)];
                z[(n + i, n + j)] += self.g[(i, j)];
                z[(i, j)] += self.g[(i, j)].conj();
            }
        }
        let mut l = DVector::from_element(2 * n, ZERO);
        for i in 0..n {
            l[i] = self.linear[i].conj();
            l[n + i] = self.linear[i];
        }
        let u = ladder_transform(n);
        let y = u.transpose() * z * &u;
        let ys = (&y + y.transpose()) * Complex64::new(0.5, 0.0);
        let ya = (&y - y.transpose()) * Complex64::new(0.5, 0.0);
        let omega = symplectic_form(n);
        let mut k = Complex64::new(self.c0, 0.0);
        for a in 0..2 * n {
            for b in 0..2 * n {
                k += ya[(a, b)] * Complex64::new(0.0, 0.5 * omega[(a, b)]);
            }
        }
        let f = u.transpose() * l;
        (k, f, ys)
    }

    /// Real quadrature form `k + fᵀr + rᵀWr`.
    pub fn quadrature_form(&self) -> QuadratureForm {
        let (k, f, w) = self.complex_form();
        QuadratureForm { constant: k.re, linear: f.map(|z| z.re), quadratic: w.map(|z| z.re) }
    }

    /// Exact mean and variance on a Gaussian state.
    pub fn stats(&self, state: &GaussianState) -> Result<ObservableStats> {
        stats(self, state)
    }
}

impl Add for QuadraticObservable {
    type Output = QuadraticObservable;

    /// Sum of two observables on the same number of modes.
    ///
    /// Panics on a mode-count mismatch.
    fn add(self, rhs: QuadraticObservable) -> QuadraticObservable {
        assert_eq!(self.n_modes, rhs.n_modes, "observables act on different mode counts");
        QuadraticObservable {
            n_modes: self.n_modes,
            c0: self.c0 + rhs.c0,
            h: self.h + rhs.h,
            g: self.g + rhs.g,
            linear: self.linear + rhs.linear,
        }
    }
}

impl Mul<QuadraticObservable> for f64 {
    type Output = QuadraticObservable;

    fn mul(self, rhs: QuadraticObservable) -> QuadraticObservable {
        rhs.scaled(self)
    }
}

impl Neg for QuadraticObservable {
    type Output = QuadraticObservable;

    fn neg(self) -> QuadraticObservable {
        self.scaled(-1.0)
    }
}

/// Exact mean and variance of `obs` on a Gaussian `state`.
pub fn stats(obs: &QuadraticObservable, state: &GaussianState) -> Result<ObservableStats> {
    if obs.n_modes() != state.n_modes() {
        return Err(Error::Dimension { expected: obs.n_modes(), found: state.n_modes() });
    }
    let n = obs.n_modes();
    let (k, f, w) = obs.complex_form();
    let q = state.to_quadrature();
    let m = q.mean.map(|x| Complex64::new(x, 0.0));
    let sigma = q.cov.map(|x| Complex64::new(x, 0.0));
    let wm = &w * &m;
    let mean = k + f.dot(&m) + (&w * &sigma).trace() + m.dot(&wm);
    if mean.im.abs() > 1e-10 * mean.re.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "observable mean has imaginary part {:.3e}; coefficients are not Hermitian",
            mean.im
        )));
    }

    let wr = w.map(|z| z.re);
    let ws = &wr * &q.cov;
    let omega = symplectic_form(n);
    let wo = &wr * &omega;
    let grad = f.map(|z| z.re) + 2.0 * (&wr * &q.mean);
    let variance = 2.0 * (&ws * &ws).trace() + 0.5 * (&wo * &wo).trace() + grad.dot(&(&q.cov * &grad));
    let variance = clamp_variance(variance)?;
    Ok(ObservableStats { mean: mean.re, variance })
}

pub(crate) fn clamp_variance(v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::Numerical("variance is not finite".into()));
    }
    if v < -VARIANCE_CLAMP {
        return Err(Error::Numerical(format!("negative variance {v:.3e}")));
    }
    Ok(v.max(0.0))
}

impl ObservableStats {
    /// Statistics of `a·O + b`.
    pub fn affine(&self, a: f64, b: f64) -> ObservableStats {
        ObservableStats { mean: a * self.mean + b, variance: a * a * self.variance }
    }
}

fn two_mode() -> QuadraticObservable {
    QuadraticObservable::zero(2)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `a_S† a_I† + a_S a_I + α a_S† a_S + β a_I† a_I` on modes (signal, idler).
///
/// `(0, 0)` is the pure squeeze-correlation observable and `(0, −|β|)` the
/// constant-background optimum.
pub fn obs_bound(alpha: f64, beta: f64) -> QuadraticObservable {
    two_mode()
        .add_pair(0, 1, re(1.0))
        .add_number(0, 0, re(alpha))
        .add_number(1, 1, re(beta))
}

/// `a_S† a_I† + a_S a_I`.
pub fn obs_squeeze_correlation() -> QuadraticObservable {
    obs_bound(0.0, 0.0)
}

/// Phase-conjugate receiver on (signal, idler, vacuum ancilla):
/// `ν(a_S† a_I† + a_S a_I) + μ(a_I a_V† + a_V a_I†)` with `μ² − ν² = 1`.
pub fn obs_pc(mu: f64, nu: f64) -> Result<QuadraticObservable> {
    if !mu.is_finite() || !nu.is_finite() || (mu * mu - nu * nu - 1.0).abs() > 1e-12 {
        return Err(domain(format!("phase-conjugate receiver needs μ² − ν² = 1, got μ = {mu}, ν = {nu}")));
    }
    Ok(QuadraticObservable::zero(3).add_pair(0, 1, re(nu)).add_number(2, 1, re(mu)))
}

/// Optical-parametric-amplifier receiver with gain `G > 1`:
/// `√(G(G−1))(a_S† a_I† + a_S a_I) + (G−1) a_S a_S† + G a_I† a_I`.
pub fn obs_opa(gain: f64) -> Result<QuadraticObservable> {
    if !(gain > 1.0) || !gain.is_finite() {
        return Err(domain(format!("OPA gain must exceed 1, got {gain}")));
    }
    Ok(two_mode()
        .add_pair(0, 1, re((gain * (gain - 1.0)).sqrt()))
        .add_anti_number(0, gain - 1.0)
        .add_number(1, 1, re(gain)))
}

/// Double-homodyne receiver `−(a_S† a_I† + a_S a_I) + a_S a_S† + a_I† a_I`.
pub fn obs_dh() -> QuadraticObservable {
    two_mode().add_pair(0, 1, re(-1.0)).add_anti_number(0, 1.0).add_number(1, 1, re(1.0))
}

/// Cross-number observable `a_S† a_I + a_I† a_S`.
pub fn obs_off() -> QuadraticObservable {
    two_mode().add_number(0, 1, re(1.0))
}

/// `a_i† a_i − a_j† a_j` on `n_modes` modes.
pub fn obs_number_difference(n_modes: usize, i: usize, j: usize) -> QuadraticObservable {
    QuadraticObservable::zero(n_modes).add_number(i, i, re(1.0)).add_number(j, j, re(-1.0))
}

/// `a_i† a_i`.
pub fn obs_number(n_modes: usize, i: usize) -> QuadraticObservable {
    QuadraticObservable::zero(n_modes).add_number(i, i, re(1.0))
}

/// Rotated quadrature `X(φ) = (a† e^{iφ} + a e^{−iφ})/√2` on one mode.
pub fn obs_quadrature(n_modes: usize, mode: usize, phi: f64) -> QuadraticObservable {
    QuadraticObservable::zero(n_modes).add_linear(mode, Complex64::from_polar(FRAC_1_SQRT_2, phi))
}

/// Symmetrised product `X_i(θ) X_j(φ)` of rotated quadratures; the square
/// `X_i(θ)²` when `i == j`.
pub fn obs_quadrature_product(n_modes: usize, i: usize, theta: f64, j: usize, phi: f64) -> QuadraticObservable {
    let obs = QuadraticObservable::zero(n_modes);
    if i == j {
        // ½(e^{2iθ} a†² + e^{−2iθ} a² + 2a†a + 1); cos(θ − φ) weights the number part.
        let w = (theta - phi).cos();
        return obs
            .add_pair(i, i, Complex64::from_polar(0.5, theta + phi))
            .add_number(i, i, re(w))
            .add_constant(0.5 * w);
    }
    obs.add_pair(i, j, Complex64::from_polar(0.5, theta + phi))
        .add_number(i, j, Complex64::from_polar(0.5, theta - phi))
}

/// Product of rotated quadratures `X_S(θ) X_I(φ)` on (signal, idler).
pub fn obs_hd_product(theta: f64, phi: f64) -> QuadraticObservable {
    obs_quadrature_product(2, 0, theta, 1, phi)
}

/// Heterodyne set-ups that add vacuum noise to a two-mode observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HeterodyneVariant {
    /// Heterodyne on signal and idler separately, measuring the cross-number
    /// observable `X_S X_I + P_S P_I`.
    DualModeCi,
    /// Heterodyne on signal and idler separately, measuring the squeeze
    /// correlation `X_S X_I − P_S P_I`.
    SeparateHtdQi,
    /// Both outputs of a 50:50 beam splitter heterodyned and squared.
    DoubleHtdAfterBs,
}

impl HeterodyneVariant {
    /// Added vacuum constant `k` in `Var → ¼[Var + k + ⟨n_A + n_B⟩]`.
    pub fn vacuum_constant(self) -> f64 {
        match self {
            HeterodyneVariant::DualModeCi => 2.0,
            HeterodyneVariant::SeparateHtdQi | HeterodyneVariant::DoubleHtdAfterBs => 1.0,
        }
    }
}

/// Statistics after the vacuum noise of heterodyne detection:
/// mean halves and the variance becomes `¼[Var + k + ⟨n_A + n_B⟩]`, where
/// `A, B` are modes 0 and 1 of `state`.
pub fn heterodyne_degrade(
    base: ObservableStats,
    variant: HeterodyneVariant,
    state: &GaussianState,
) -> Result<ObservableStats> {
    if state.n_modes() < 2 {
        return Err(Error::Dimension { expected: 2, found: state.n_modes() });
    }
    let photons = state.mean_photon_number(0) + state.mean_photon_number(1);
    Ok(ObservableStats {
        mean: 0.5 * base.mean,
        variance: 0.25 * (base.variance + variant.vacuum_constant() + photons),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{hypothesis_pair, NoiseModel, ScenarioParams, Source};
    use crate::gaussian::{make_coherent, make_thermal, make_tmsv, make_vacuum};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn thermal_number_statistics() {
        for n in [0.0, 0.5, 3.0, 30.0] {
            let s = stats(&obs_number(1, 0), &make_thermal(n).unwrap()).unwrap();
            assert_relative_eq!(s.mean, n, epsilon = 1e-12);
            assert_relative_eq!(s.variance, n * (n + 1.0), epsilon = 1e-10, max_relative = 1e-12);
        }
    }

    #[test]
    fn squeeze_correlation_variance_formula() {
        let (k, ns, nb) = (0.01, 0.7, 30.0);
        let p = ScenarioParams::new(k, ns, nb, 1, NoiseModel::Constant);
        let pair = hypothesis_pair(Source::Tmsv, &p).unwrap();
        let a = k * ns + nb;
        let c = (k * ns * (ns + 1.0)).sqrt();
        let s = stats(&obs_squeeze_correlation(), &pair.on).unwrap();
        assert_relative_eq!(s.mean, 2.0 * c, epsilon = 1e-12);
        let expect = (a + 1.0) * (ns + 1.0) + 2.0 * c * c + a * ns;
        assert_relative_eq!(s.variance, expect, max_relative = 1e-12);
    }

    #[test]
    fn coherent_quadrature() {
        let s = stats(&obs_quadrature(1, 0, 0.0), &make_coherent(re(2.0)).unwrap()).unwrap();
        assert_relative_eq!(s.mean, 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(s.variance, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn double_homodyne_on_vacuum() {
        let s = stats(&obs_dh(), &make_vacuum(2).unwrap()).unwrap();
        assert_relative_eq!(s.mean, 1.0, epsilon = 1e-14);
        // Only the a_S† a_I† term acts on |0,0⟩, giving −|1,1⟩.
        assert_relative_eq!(s.variance, 1.0, epsilon = 1e-12);
        // −(pair) + a a† + a† a = obs_bound(1, 1) with the pair term negated, plus 1.
        let alt = two_mode().add_pair(0, 1, re(-1.0)).add_number(0, 0, re(1.0)).add_number(1, 1, re(1.0)).add_constant(1.0);
        assert_eq!(obs_dh(), alt);
    }

    #[test]
    fn receiver_constructors_validate() {
        assert!(obs_pc(2f64.sqrt(), 1.0).is_ok());
        assert!(obs_pc(1.0, 0.0).is_ok());
        assert!(obs_pc(1.0, 1.0).is_err());
        assert!(obs_opa(1.0).is_err());
        assert!(obs_opa(1.0 + 7.4e-5).is_ok());
    }

    #[test]
    fn cross_number_on_uncorrelated_states() {
        let s = make_thermal(2.0).unwrap().tensor(&make_thermal(3.0).unwrap());
        let st = stats(&obs_off(), &s).unwrap();
        assert!(st.mean.abs() < 1e-14);
        assert_relative_eq!(st.variance, 2.0 * 2.0 * 3.0 + 2.0 + 3.0, epsilon = 1e-10);
    }

    #[test]
    fn quadrature_product_on_vacuum() {
        let s = stats(&obs_hd_product(0.3, -1.1), &make_vacuum(2).unwrap()).unwrap();
        assert!(s.mean.abs() < 1e-14);
        assert_relative_eq!(s.variance, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn number_difference_through_balanced_splitter() {
        let h = FRAC_1_SQRT_2;
        let t = obs_number_difference(2, 0, 1).transform_by_beam_splitter(0, 1, h, h, FRAC_PI_2).unwrap();
        let expect = -obs_off();
        assert!((t.h - expect.h).camax() < 1e-15);
        assert!(t.g.camax() < 1e-15);
        assert_eq!(t.c0, 0.0);
    }

    #[test]
    fn number_difference_general_transform() {
        let (t, r, phi) = (0.8f64, 0.6f64, 0.7f64);
        let o = obs_number_difference(2, 0, 1).transform_by_beam_splitter(0, 1, t, r, phi).unwrap();
        // (t²−r²)(n_S − n_I) − 2rt[(a_S†a_I + h.c.) sin φ − i(a_S†a_I − a_I†a_S) cos φ]
        let coupling = Complex64::new(-2.0 * r * t * phi.sin(), 2.0 * r * t * phi.cos());
        assert_relative_eq!(o.h[(0, 0)].re, t * t - r * r, epsilon = 1e-15);
        assert_relative_eq!(o.h[(1, 1)].re, r * r - t * t, epsilon = 1e-15);
        assert!((o.h[(0, 1)] - coupling).norm() < 1e-15);
    }

    #[test]
    fn identity_transform() {
        let o = obs_opa(1.5).unwrap();
        assert_eq!(o.transform_by_beam_splitter(0, 1, 1.0, 0.0, 0.4).unwrap(), o);
    }

    #[test]
    fn quadrature_product_mean_and_phase() {
        let p = ScenarioParams::new(0.01, 0.5, 30.0, 1, NoiseModel::Constant);
        let pair = hypothesis_pair(Source::Tmsv, &p).unwrap();
        let c = (0.01f64 * 0.5 * 1.5).sqrt();
        let diff = |theta: f64, phi: f64| {
            let o = obs_hd_product(theta, phi);
            stats(&o, &pair.on).unwrap().mean - stats(&o, &pair.off).unwrap().mean
        };
        assert_relative_eq!(diff(0.0, 0.0), c, epsilon = 1e-12);
        let best = (0..=200)
            .map(|k| -PI + 2.0 * PI * k as f64 / 200.0)
            .map(|phi| diff(PI - phi, phi).abs())
            .fold(0.0, f64::max);
        assert_relative_eq!(best, c, epsilon = 1e-12);
        assert!(diff(0.3, FRAC_PI_2 - 0.3).abs() < 1e-12);
    }

    #[test]
    fn heterodyne_constants() {
        let base = ObservableStats { mean: 2.0, variance: 10.0 };
        let state = make_thermal(1.0).unwrap().tensor(&make_thermal(2.0).unwrap());
        let d = heterodyne_degrade(base, HeterodyneVariant::DualModeCi, &state).unwrap();
        assert_relative_eq!(d.mean, 1.0);
        assert_relative_eq!(4.0 * d.variance, 10.0 + 2.0 + 3.0);
        let d = heterodyne_degrade(base, HeterodyneVariant::SeparateHtdQi, &state).unwrap();
        assert_relative_eq!(4.0 * d.variance, 10.0 + 1.0 + 3.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            stats(&obs_off(), &make_vacuum(3).unwrap()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn non_hermitian_parts_rejected() {
        let mut h = DMatrix::from_element(2, 2, ZERO);
        h[(0, 1)] = re(1.0);
        assert!(QuadraticObservable::from_parts(0.0, h, DMatrix::from_element(2, 2, ZERO), DVector::from_element(2, ZERO)).is_err());
    }

    #[test]
    fn pure_tmsv_pair_variance_is_exact() {
        let s = make_tmsv(1.0).unwrap();
        // a_S†a_S − a_I†a_I annihilates every |n,n⟩ term.
        let st = stats(&obs_number_difference(2, 0, 1), &s).unwrap();
        assert!(st.mean.abs() < 1e-14);
        assert!(st.variance.abs() < 1e-12);
    }
}
