//! Normally ordered moments from the characteristic function
//! `χ(u, v) = ⟨exp(Σ u_i a_i†) exp(Σ v_i a_i)⟩`, which for a Gaussian state is
//! the exponential of a quadratic form in `(u, v)`.
//!
//! Derivatives at the origin are taken numerically by sampling `χ` on a
//! circle in each active variable and applying the discrete Cauchy formula.

use std::f64::consts::TAU;

use gillum::gaussian::GaussianState;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::ladder::LadderPoly;

/// Samples per circle beyond the derivative order.
const EXTRA_SAMPLES: usize = 14;

pub struct CharFn {
    n: usize,
    d: DVector<Complex64>,
    number: DMatrix<Complex64>,
    squeeze: DMatrix<Complex64>,
    radius: f64,
}

impl CharFn {
    pub fn new(state: &GaussianState) -> Self {
        let n = state.n_modes();
        let d = DVector::from_fn(n, |i, _| state.displacement(i));
        let number = state.number_block();
        let squeeze = state.squeeze_block();
        let scale = number.camax().max(squeeze.camax()).max(d.camax() * d.camax());
        Self { n, d, number, squeeze, radius: 1.0 / (1.0 + scale).sqrt() }
    }

    /// `ln χ` at a point `(u, v)`.
    fn log_chi(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let mut k = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            k += u[i] * self.d[i].conj() + v[i] * self.d[i];
            for j in 0..self.n {
                k += u[i] * v[j] * self.number[(i, j)];
                k += 0.5 * v[i] * v[j] * self.squeeze[(i, j)];
                k += 0.5 * u[i] * u[j] * self.squeeze[(i, j)].conj();
            }
        }
        k
    }

    /// `⟨Π a_i†^{p_i} Π a_i^{q_i}⟩`.
    pub fn moment(&self, p: &[u32], q: &[u32]) -> Complex64 {
        // Active variables: index < n is u_i, otherwise v_{i−n}.
        let active: Vec<(usize, u32)> =
            p.iter().chain(q).copied().enumerate().filter(|&(_, e)| e > 0).collect();
        let sizes: Vec<usize> = active.iter().map(|&(_, e)| e as usize + EXTRA_SAMPLES).collect();
        let total: usize = sizes.iter().product();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut u = vec![Complex64::new(0.0, 0.0); self.n];
        let mut v = vec![Complex64::new(0.0, 0.0); self.n];
        let mut idx = vec![0usize; active.len()];
        for _ in 0..total {
            let mut phase = 0.0;
            for (a, (&(var, e), &m)) in active.iter().zip(&sizes).enumerate() {
                let theta = TAU * idx[a] as f64 / m as f64;
                let z = Complex64::from_polar(self.radius, theta);
                if var < self.n {
                    u[var] = z;
                } else {
                    v[var - self.n] = z;
                }
                phase -= theta * e as f64;
            }
            acc += self.log_chi(&u, &v).exp() * Complex64::from_polar(1.0, phase);
            for a in 0..idx.len() {
                idx[a] += 1;
                if idx[a] < sizes[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        let mut scale = total as f64;
        let mut fact = 1.0;
        for &(_, e) in &active {
            scale *= self.radius.powi(e as i32);
            fact *= (1..=e).map(f64::from).product::<f64>();
        }
        acc * fact / scale
    }

    pub fn expectation(&self, obs: &LadderPoly) -> Complex64 {
        assert_eq!(obs.n_modes, self.n);
        obs.terms.iter().map(|((p, q), c)| c * self.moment(p, q)).sum()
    }

    /// `(⟨O⟩, Var O)` with `O²` normal ordered symbolically.
    pub fn moments(&self, obs: &LadderPoly) -> (f64, f64) {
        let mean = self.expectation(obs).re;
        let second = self.expectation(&(obs * obs)).re;
        (mean, second - mean * mean)
    }
}
