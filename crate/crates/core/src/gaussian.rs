//! Multimode Gaussian states.
//!
//! A [`GaussianState`] stores first moments and the covariance matrix in the
//! ladder-operator ordering `ξ = (a_1, ..., a_n, a_1†, ..., a_n†)`:
//!
//! ```text
//! mean = ⟨ξ⟩,     cov_jk = ⟨ξ_j ξ_k†⟩ − ⟨ξ_j⟩⟨ξ_k†⟩
//! ```
//!
//! so the upper-left block holds `⟨a_i a_j†⟩`, the upper-right block
//! `⟨a_i a_j⟩` and the lower-right block `⟨a_i† a_j⟩`. For a two-mode squeezed
//! vacuum sent through the target channel the entries are literally
//! `(A+1, N_S+1, A, N_S, C)`.
//!
//! [`QuadratureState`] is the real picture with `x = (a + a†)/√2`,
//! `p = (a − a†)/(i√2)`, ordered `(x_1, p_1, ..., x_n, p_n)`, and a
//! symmetrised covariance whose vacuum value is `I/2`. Every conversion
//! between the two lives in this module.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::symplectic::{self, PHYSICALITY_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// First and second moments of an `n`-mode Gaussian state in ladder ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<Complex64>,
    cov: DMatrix<Complex64>,
}

/// Real quadrature representation of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureState {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl QuadratureState {
    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic::symplectic_eigenvalues(&self.cov)
    }

    /// `true` when every symplectic eigenvalue is at least `1/2 − 1e−9`.
    pub fn is_physical(&self) -> bool {
        matches!(symplectic::physicality_margin(&self.cov), Ok(m) if m >= -PHYSICALITY_TOL)
    }
}

/// `r = T ξ`.
fn quadrature_transform(n: usize) -> DMatrix<Complex64> {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut t = DMatrix::from_element(2 * n, 2 * n, ZERO);
    for k in 0..n {
        t[(2 * k, k)] = s;
        t[(2 * k, n + k)] = s;
        t[(2 * k + 1, k)] = -I * s;
        t[(2 * k + 1, n + k)] = I * s;
    }
    t
}

/// `ξ = T⁻¹ r`.
pub(crate) fn ladder_transform(n: usize) -> DMatrix<Complex64> {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut u = DMatrix::from_element(2 * n, 2 * n, ZERO);
    for k in 0..n {
        u[(k, 2 * k)] = s;
        u[(k, 2 * k + 1)] = I * s;
        u[(n + k, 2 * k)] = s;
        u[(n + k, 2 * k + 1)] = -I * s;
    }
    u
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(domain(format!("{name} must be a finite non-negative number, got {v}")));
    }
    Ok(())
}

fn check_unitary_pair(t: f64, r: f64) -> Result<()> {
    if !t.is_finite() || !r.is_finite() || ((t * t + r * r) - 1.0).abs() > 1e-12 {
        return Err(domain(format!(
            "beam splitter needs t² + r² = 1, got t = {t}, r = {r}"
        )));
    }
    Ok(())
}

/// Mode matrix `B` of a two-mode beam splitter embedded in `n` modes, acting as
/// `a_i → t a_i + i e^{iφ} r a_j`, `a_j → t a_j + i e^{−iφ} r a_i`.
///
/// This is the annihilation-operator form of
/// `a_i† → t a_i† − i e^{−iφ} r a_j†`, `a_j† → t a_j† − i e^{iφ} r a_i†`.
pub fn beam_splitter_matrix(
    n_modes: usize,
    i: usize,
    j: usize,
    t: f64,
    r: f64,
    phi: f64,
) -> Result<DMatrix<Complex64>> {
    check_unitary_pair(t, r)?;
    if i == j || i >= n_modes || j >= n_modes {
        return Err(domain(format!(
            "beam splitter modes ({i}, {j}) must be distinct and below {n_modes}"
        )));
    }
    let mut b = DMatrix::identity(n_modes, n_modes);
    let e = Complex64::from_polar(1.0, phi);
    b[(i, i)] = Complex64::new(t, 0.0);
    b[(j, j)] = Complex64::new(t, 0.0);
    b[(i, j)] = I * e * r;
    b[(j, i)] = I * e.conj() * r;
    Ok(b)
}

impl GaussianState {
    /// Builds a state from `d_i = ⟨a_i⟩`, `N_ij = ⟨Δa_i† Δa_j⟩` and
    /// `M_ij = ⟨Δa_i Δa_j⟩`.
    pub fn from_moments(
        displacement: &[Complex64],
        number: &DMatrix<Complex64>,
        squeeze: &DMatrix<Complex64>,
    ) -> Result<Self> {
        let n = displacement.len();
        if n == 0 {
            return Err(domain("a state needs at least one mode"));
        }
        for m in [number, squeeze] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension { expected: n, found: m.nrows() });
            }
        }
        let mut mean = DVector::from_element(2 * n, ZERO);
        let mut cov = DMatrix::from_element(2 * n, 2 * n, ZERO);
        for i in 0..n {
            mean[i] = displacement[i];
            mean[n + i] = displacement[i].conj();
            for j in 0..n {
                let delta = if i == j { ONE } else { ZERO };
                cov[(i, j)] = delta + number[(j, i)];
                cov[(i, n + j)] = squeeze[(i, j)];
                cov[(n + i, j)] = squeeze[(i, j)].conj();
                cov[(n + i, n + j)] = number[(i, j)];
            }
        }
        Ok(Self { n_modes: n, mean, cov })
    }

    /// Builds a state from raw ladder-ordered moments, checking the conjugate
    /// symmetries that every such matrix must satisfy.
    pub fn from_raw(mean: DVector<Complex64>, cov: DMatrix<Complex64>) -> Result<Self> {
        if !mean.len().is_multiple_of(2) || mean.is_empty() {
            return Err(domain("mean must have even, non-zero length"));
        }
        let n = mean.len() / 2;
        if cov.nrows() != 2 * n || cov.ncols() != 2 * n {
            return Err(Error::Dimension { expected: n, found: cov.nrows() / 2 });
        }
        let state = Self { n_modes: n, mean, cov };
        state.check_structure(1e-9)?;
        Ok(state)
    }

    fn check_structure(&self, tol: f64) -> Result<()> {
        let n = self.n_modes;
        for i in 0..n {
            if (self.mean[n + i] - self.mean[i].conj()).norm() > tol {
                return Err(domain("mean violates conjugate symmetry"));
            }
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                let aad = self.cov[(i, j)];
                let ada = self.cov[(n + j, n + i)];
                if (aad - delta - ada).norm() > tol {
                    return Err(domain("⟨a a†⟩ and ⟨a† a⟩ blocks are inconsistent"));
                }
                if (self.cov[(i, n + j)] - self.cov[(j, n + i)]).norm() > tol {
                    return Err(domain("⟨a a⟩ block is not symmetric"));
                }
                if (self.cov[(n + i, j)] - self.cov[(i, n + j)].conj()).norm() > tol {
                    return Err(domain("⟨a† a†⟩ block is not the conjugate of ⟨a a⟩"));
                }
                if (self.cov[(n + i, n + j)] - self.cov[(n + j, n + i)].conj()).norm() > tol {
                    return Err(domain("⟨a† a⟩ block is not Hermitian"));
                }
            }
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// `(⟨a_1⟩, ..., ⟨a_n⟩, ⟨a_1†⟩, ..., ⟨a_n†⟩)`.
    pub fn mean(&self) -> &DVector<Complex64> {
        &self.mean
    }

    /// The ladder-ordered covariance matrix.
    pub fn cov(&self) -> &DMatrix<Complex64> {
        &self.cov
    }

    /// `⟨a_i⟩`.
    pub fn displacement(&self, mode: usize) -> Complex64 {
        self.mean[mode]
    }

    /// Centered `N_ij = ⟨Δa_i† Δa_j⟩`.
    pub fn number_block(&self) -> DMatrix<Complex64> {
        let n = self.n_modes;
        self.cov.view((n, n), (n, n)).into_owned()
    }

    /// Centered `M_ij = ⟨Δa_i Δa_j⟩`.
    pub fn squeeze_block(&self) -> DMatrix<Complex64> {
        let n = self.n_modes;
        self.cov.view((0, n), (n, n)).into_owned()
    }

    /// Total mean photon number of one mode, displacement included.
    pub fn mean_photon_number(&self, mode: usize) -> f64 {
        let n = self.n_modes;
        self.cov[(n + mode, n + mode)].re + self.mean[mode].norm_sqr()
    }

    pub fn total_photon_number(&self) -> f64 {
        (0..self.n_modes).map(|k| self.mean_photon_number(k)).sum()
    }

    pub fn to_quadrature(&self) -> QuadratureState {
        let t = quadrature_transform(self.n_modes);
        let mean = (&t * &self.mean).map(|z| z.re);
        let cov = (&t * &self.cov * t.adjoint()).map(|z| z.re);
        let cov = (&cov + cov.transpose()) * 0.5;
        QuadratureState { mean, cov }
    }

    pub fn from_quadrature(q: &QuadratureState) -> Result<Self> {
        let dim = q.mean.len();
        if dim == 0 || !dim.is_multiple_of(2) || q.cov.nrows() != dim || q.cov.ncols() != dim {
            return Err(domain("quadrature state must have matching 2n mean and 2n x 2n covariance"));
        }
        let n = dim / 2;
        let u = ladder_transform(n);
        let omega = symplectic::symplectic_form(n);
        let gamma = DMatrix::from_fn(dim, dim, |i, j| {
            Complex64::new(0.5 * (q.cov[(i, j)] + q.cov[(j, i)]), 0.5 * omega[(i, j)])
        });
        let mean = &u * q.mean.map(|x| Complex64::new(x, 0.0));
        let cov = &u * gamma * u.adjoint();
        Ok(Self { n_modes: n, mean, cov })
    }

    /// Symplectic eigenvalues of the quadrature covariance, ascending.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        self.to_quadrature().symplectic_eigenvalues()
    }

    pub fn is_physical(&self) -> bool {
        self.to_quadrature().is_physical()
    }

    /// Errors with [`Error::Unphysical`] unless every `ν_k ≥ 1/2 − 1e−9`.
    pub fn ensure_physical(&self) -> Result<()> {
        let margin = symplectic::physicality_margin(&self.to_quadrature().cov)?;
        if margin < -PHYSICALITY_TOL {
            return Err(Error::Unphysical(margin + 0.5));
        }
        Ok(())
    }

    /// Product state `self ⊗ other`; the modes of `other` follow those of `self`.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (n1, n2) = (self.n_modes, other.n_modes);
        let n = n1 + n2;
        let mut d = Vec::with_capacity(n);
        d.extend((0..n1).map(|k| self.mean[k]));
        d.extend((0..n2).map(|k| other.mean[k]));
        let mut number = DMatrix::from_element(n, n, ZERO);
        let mut squeeze = DMatrix::from_element(n, n, ZERO);
        number.view_mut((0, 0), (n1, n1)).copy_from(&self.number_block());
        number.view_mut((n1, n1), (n2, n2)).copy_from(&other.number_block());
        squeeze.view_mut((0, 0), (n1, n1)).copy_from(&self.squeeze_block());
        squeeze.view_mut((n1, n1), (n2, n2)).copy_from(&other.squeeze_block());
        GaussianState::from_moments(&d, &number, &squeeze).expect("block sizes agree")
    }

    /// Reduced state on the listed modes, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Result<GaussianState> {
        if modes.is_empty() {
            return Err(domain("reduced state needs at least one mode"));
        }
        if let Some(&bad) = modes.iter().find(|&&m| m >= self.n_modes) {
            return Err(domain(format!("mode {bad} out of range for {} modes", self.n_modes)));
        }
        let number = self.number_block();
        let squeeze = self.squeeze_block();
        let k = modes.len();
        let d: Vec<Complex64> = modes.iter().map(|&m| self.mean[m]).collect();
        let nb = DMatrix::from_fn(k, k, |i, j| number[(modes[i], modes[j])]);
        let sb = DMatrix::from_fn(k, k, |i, j| squeeze[(modes[i], modes[j])]);
        GaussianState::from_moments(&d, &nb, &sb)
    }

    /// Applies `a → B a` for an `n × n` unitary mode matrix `B`.
    pub fn apply_passive(&self, b: &DMatrix<Complex64>) -> Result<GaussianState> {
        let n = self.n_modes;
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::Dimension { expected: n, found: b.nrows() });
        }
        let defect = (b * b.adjoint() - DMatrix::<Complex64>::identity(n, n)).camax();
        if defect > 1e-12 {
            return Err(domain(format!("mode transformation is not unitary (defect {defect:.2e})")));
        }
        let mut s = DMatrix::from_element(2 * n, 2 * n, ZERO);
        s.view_mut((0, 0), (n, n)).copy_from(b);
        s.view_mut((n, n), (n, n)).copy_from(&b.map(|z| z.conj()));
        Ok(GaussianState {
            n_modes: n,
            mean: &s * &self.mean,
            cov: &s * &self.cov * s.adjoint(),
        })
    }

    /// Two-mode beam splitter between modes `i` and `j`; see
    /// [`beam_splitter_matrix`] for the convention.
    pub fn apply_beam_splitter(&self, i: usize, j: usize, t: f64, r: f64, phi: f64) -> Result<GaussianState> {
        let b = beam_splitter_matrix(self.n_modes, i, j, t, r, phi)?;
        self.apply_passive(&b)
    }

    /// Phase rotation `a_k → e^{−iθ} a_k` on one mode.
    pub fn apply_phase(&self, mode: usize, theta: f64) -> Result<GaussianState> {
        if mode >= self.n_modes {
            return Err(domain(format!("mode {mode} out of range")));
        }
        let mut b = DMatrix::identity(self.n_modes, self.n_modes);
        b[(mode, mode)] = Complex64::from_polar(1.0, -theta);
        self.apply_passive(&b)
    }
}

pub fn make_vacuum(n_modes: usize) -> Result<GaussianState> {
    if n_modes == 0 {
        return Err(domain("n_modes must be at least 1"));
    }
    let z = DMatrix::from_element(n_modes, n_modes, ZERO);
    GaussianState::from_moments(&vec![ZERO; n_modes], &z, &z)
}

/// Single-mode thermal state with `⟨a†a⟩ = n_mean`.
pub fn make_thermal(n_mean: f64) -> Result<GaussianState> {
    nonneg("thermal mean photon number", n_mean)?;
    let number = DMatrix::from_element(1, 1, Complex64::new(n_mean, 0.0));
    GaussianState::from_moments(&[ZERO], &number, &DMatrix::from_element(1, 1, ZERO))
}

pub fn make_coherent(amplitude: Complex64) -> Result<GaussianState> {
    if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
        return Err(domain("coherent amplitude must be finite"));
    }
    let z = DMatrix::from_element(1, 1, ZERO);
    GaussianState::from_moments(&[amplitude], &z, &z)
}

/// Two-mode squeezed vacuum with `n_s` photons per mode; mode 0 is the
/// signal, mode 1 the idler, and `⟨a_S a_I⟩ = √(n_s(n_s+1))`.
pub fn make_tmsv(n_s: f64) -> Result<GaussianState> {
    nonneg("signal mean photon number", n_s)?;
    let c = Complex64::new((n_s * (n_s + 1.0)).sqrt(), 0.0);
    let number = DMatrix::from_diagonal_element(2, 2, Complex64::new(n_s, 0.0));
    let squeeze = DMatrix::from_row_slice(2, 2, &[ZERO, c, c, ZERO]);
    GaussianState::from_moments(&[ZERO, ZERO], &number, &squeeze)
}

/// Classically correlated thermal pair: a thermal beam of mean `n_s + n_i`
/// split so the signal (mode 0) carries `n_s` and the idler (mode 1) `n_i`,
/// with real cross term `⟨a_S† a_I⟩ = √(n_s n_i)`.
pub fn make_cct(n_s: f64, n_i: f64) -> Result<GaussianState> {
    nonneg("signal mean photon number", n_s)?;
    nonneg("idler mean photon number", n_i)?;
    let total = n_s + n_i;
    if total == 0.0 {
        return make_vacuum(2);
    }
    let t = (n_s / total).sqrt();
    let r = (n_i / total).sqrt();
    // Renormalise so t² + r² = 1 holds to rounding.
    let norm = (t * t + r * r).sqrt();
    let source = make_thermal(total)?.tensor(&make_vacuum(1)?);
    source.apply_beam_splitter(0, 1, t / norm, r / norm, std::f64::consts::FRAC_PI_2)
}
