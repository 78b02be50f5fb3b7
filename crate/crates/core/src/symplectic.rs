//! Symplectic spectra of real quadrature covariance matrices.
//!
//! Quadratures are ordered `(x_1, p_1, ..., x_n, p_n)` and the symplectic
//! form is `Ω = ⊕ [[0, 1], [-1, 0]]`, so `[r_i, r_j] = i Ω_ij`. With this
//! normalisation the vacuum covariance is `I/2` and every physical state has
//! symplectic eigenvalues `ν_k ≥ 1/2`.

use nalgebra::{DMatrix, Schur, SymmetricEigen};

use crate::error::{Error, Result};

/// Tolerance used when judging `ν_k ≥ 1/2`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// The standard symplectic form for `n` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Williamson normal form `cov = S · diag(ν_1, ν_1, ..., ν_n, ν_n) · Sᵀ`.
#[derive(Debug, Clone)]
pub struct Williamson {
    /// Symplectic eigenvalues in ascending order.
    pub nu: Vec<f64>,
    /// Symplectic matrix `S` whose column pairs match `nu`.
    pub basis: DMatrix<f64>,
}

impl Williamson {
    /// `S · diag(ν ⊕ ν) · Sᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            2 * self.nu.len(),
            self.nu.iter().flat_map(|&v| [v, v]),
        ));
        &self.basis * d * self.basis.transpose()
    }

    /// `S f(D) Sᵀ` for a function applied to each symplectic eigenvalue.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            2 * self.nu.len(),
            self.nu.iter().flat_map(|&v| {
                let y = f(v);
                [y, y]
            }),
        ));
        &self.basis * d * self.basis.transpose()
    }
}

fn check_square_even(cov: &DMatrix<f64>) -> Result<usize> {
    if cov.nrows() != cov.ncols() || !cov.nrows().is_multiple_of(2) || cov.nrows() == 0 {
        return Err(Error::Domain(format!(
            "covariance must be a non-empty 2n x 2n matrix, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("covariance has non-finite entries".into()));
    }
    Ok(cov.nrows() / 2)
}

/// Symmetric square root and inverse square root of a positive definite matrix.
fn sqrt_pair(cov: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let sym = (cov + cov.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        return Err(Error::Unphysical(min));
    }
    let q = &eig.eigenvectors;
    let sq = nalgebra::DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|v| v.sqrt()));
    let isq = sq.map(|v| 1.0 / v);
    let root = q * DMatrix::from_diagonal(&sq) * q.transpose();
    let inv_root = q * DMatrix::from_diagonal(&isq) * q.transpose();
    Ok((root, inv_root))
}

/// Symplectic eigenvalues of a real covariance matrix, ascending.
///
/// Fails with [`Error::Unphysical`] when the matrix is not positive definite.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = check_square_even(cov)?;
    let (root, _) = sqrt_pair(cov)?;
    let a = &root * symplectic_form(n) * &root;
    let neg_sq = -(&a * &a);
    let neg_sq = (&neg_sq + neg_sq.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(neg_sq)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// Smallest symplectic eigenvalue minus one half; negative means unphysical.
pub fn physicality_margin(cov: &DMatrix<f64>) -> Result<f64> {
    match symplectic_eigenvalues(cov) {
        Ok(nu) => Ok(nu[0] - 0.5),
        Err(Error::Unphysical(_)) => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

/// Williamson decomposition of a positive definite covariance matrix.
pub fn williamson(cov: &DMatrix<f64>) -> Result<Williamson> {
    let n = check_square_even(cov)?;
    let (root, inv_root) = sqrt_pair(cov)?;
    // K has eigenvalues ±i/ν and is antisymmetric, so its real Schur form is
    // block diagonal with blocks [[0, b], [-b, 0]].
    let k = &inv_root * symplectic_form(n) * &inv_root;
    let k = (&k - k.transpose()) * 0.5;
    let (mut q, t) = Schur::new(k).unpack();

    let dim = 2 * n;
    let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut i = 0;
    while i < dim {
        if i + 1 >= dim {
            return Err(Error::Numerical("odd Schur block structure".into()));
        }
        let b = t[(i, i + 1)];
        let c = t[(i + 1, i)];
        if b.abs() < 1e-300 || c.abs() < 1e-300 || b * c >= 0.0 {
            return Err(Error::Numerical(format!(
                "Schur form of symplectic generator is not block diagonal at {i}"
            )));
        }
        if b < 0.0 {
            q.swap_columns(i, i + 1);
        }
        pairs.push((2.0 / (b.abs() + c.abs()), i));
        i += 2;
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut basis = DMatrix::zeros(dim, dim);
    let mut nu = Vec::with_capacity(n);
    for (slot, &(v, col)) in pairs.iter().enumerate() {
        let scale = 1.0 / v.sqrt();
        basis.set_column(2 * slot, &(q.column(col) * scale));
        basis.set_column(2 * slot + 1, &(q.column(col + 1) * scale));
        nu.push(v);
    }
    let basis = root * basis;
    Ok(Williamson { nu, basis })
}
