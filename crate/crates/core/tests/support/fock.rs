//! Two-mode density matrices in a truncated Fock basis, built from the
//! physical preparation of each probe and of the lossy thermal target.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ladder::LadderPoly;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Density matrix on (signal, idler); basis index `s · dims[1] + i`.
#[derive(Debug, Clone)]
pub struct FockState {
    pub dims: [usize; 2],
    pub rho: DMatrix<Complex64>,
}

fn thermal_weights(n_mean: f64, cutoff: usize) -> Vec<f64> {
    let ratio = n_mean / (n_mean + 1.0);
    (0..cutoff).map(|n| ratio.powi(n as i32) / (n_mean + 1.0)).collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn coherent_amplitudes(alpha: f64, cutoff: usize) -> Vec<f64> {
    (0..cutoff).map(|n| (-alpha * alpha / 2.0).exp() * alpha.powi(n as i32) / factorial(n).sqrt()).collect()
}

/// Expansion of `(x a† + y b†)^j (z a† + w b†)^k / √(j! k!) |0,0⟩` as
/// amplitudes indexed by the photon number left in mode `a`.
fn rotate_pair(j: usize, k: usize, [x, y, z, w]: [f64; 4]) -> Vec<f64> {
    let mut amp = vec![0.0; j + k + 1];
    for u in 0..=j {
        for v in 0..=k {
            let c = binomial(j, u) * x.powi(u as i32) * y.powi((j - u) as i32)
                * binomial(k, v) * z.powi(v as i32) * w.powi((k - v) as i32);
            let m = u + v;
            amp[m] += c * (factorial(m) * factorial(j + k - m)).sqrt();
        }
    }
    let norm = (factorial(j) * factorial(k)).sqrt();
    amp.iter().map(|a| a / norm).collect()
}

impl FockState {
    fn pure(dims: [usize; 2], psi: &[f64]) -> Self {
        let n = dims[0] * dims[1];
        let rho = DMatrix::from_fn(n, n, |r, c| Complex64::new(psi[r] * psi[c], 0.0));
        Self { dims, rho }
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `Σ_n c_n |n, n⟩` with thermal weights `c_n²`.
    pub fn tmsv(n_s: f64, cutoff: usize) -> Self {
        let w = thermal_weights(n_s, cutoff);
        let mut psi = vec![0.0; cutoff * cutoff];
        for n in 0..cutoff {
            psi[n * cutoff + n] = w[n].sqrt();
        }
        Self::pure([cutoff, cutoff], &psi)
    }

    /// `|α_S⟩ ⊗ |α_I⟩` with real amplitudes.
    pub fn coherent(alpha_s: f64, alpha_i: f64, cutoff: usize) -> Self {
        let a = coherent_amplitudes(alpha_s, cutoff);
        let b = coherent_amplitudes(alpha_i, cutoff);
        let psi: Vec<f64> = (0..cutoff * cutoff).map(|k| a[k / cutoff] * b[k % cutoff]).collect();
        Self::pure([cutoff, cutoff], &psi)
    }

    /// A thermal beam of `n_s + n_i` photons divided between signal and idler
    /// in the ratio `n_s : n_i`.
    pub fn split_thermal(n_s: f64, n_i: f64, cutoff: usize) -> Self {
        let total = n_s + n_i;
        let t = (n_s / total).sqrt();
        let r = (n_i / total).sqrt();
        let p = thermal_weights(total, cutoff);
        let d = cutoff * cutoff;
        let mut rho = DMatrix::from_element(d, d, ZERO);
        for (n, &pn) in p.iter().enumerate().take(cutoff) {
            let amp = rotate_pair(n, 0, [t, r, 0.0, 1.0]);
            let psi: Vec<(usize, f64)> = (0..=n).map(|m| (m * cutoff + (n - m), amp[m])).collect();
            for &(a, x) in &psi {
                for &(b, y) in &psi {
                    rho[(a, b)] += Complex64::new(pn * x * y, 0.0);
                }
            }
        }
        Self { dims: [cutoff, cutoff], rho }
    }

    /// Mixes the signal with a thermal mode of mean `env_mean` on a beam
    /// splitter of transmissivity `kappa`, then discards the thermal mode.
    pub fn through_target(&self, kappa: f64, env_mean: f64, env_cutoff: usize) -> Self {
        let [ds, di] = self.dims;
        let out_s = ds + env_cutoff - 1;
        let (t, r) = (kappa.sqrt(), (1.0 - kappa).sqrt());
        let p = thermal_weights(env_mean, env_cutoff);
        let d_out = out_s * di;
        let mut rho = DMatrix::from_element(d_out, d_out, ZERO);
        let entries: Vec<(usize, usize, Complex64)> = (0..ds * di)
            .flat_map(|a| (0..ds * di).map(move |b| (a, b)))
            .map(|(a, b)| (a, b, self.rho[(a, b)]))
            .filter(|e| e.2 != ZERO)
            .collect();
        for (k, &pk) in p.iter().enumerate() {
            let u: Vec<Vec<f64>> = (0..ds).map(|j| rotate_pair(j, k, [t, r, -r, t])).collect();
            for &(a, b, v) in &entries {
                let (j, i, jp, ip) = (a / di, a % di, b / di, b % di);
                // The thermal mode keeps e photons in both branches.
                for e in 0..=(j.min(jp) + k) {
                    let (m, mp) = (j + k - e, jp + k - e);
                    rho[(m * di + i, mp * di + ip)] += v * (pk * u[j][m] * u[jp][mp]);
                }
            }
        }
        Self { dims: [out_s, di], rho }
    }

    /// `(⟨O⟩, Var O)` for a two-mode observable. Intermediate states of
    /// `O²` are not truncated, so only the state itself carries a cutoff.
    pub fn moments(&self, obs: &LadderPoly) -> (f64, f64) {
        assert_eq!(obs.n_modes, 2);
        let [ds, di] = self.dims;
        let rho = |c: (usize, usize), r: (usize, usize)| {
            if r.0 < ds && r.1 < di {
                self.rho[(c.0 * di + c.1, r.0 * di + r.1)]
            } else {
                ZERO
            }
        };
        let (mut mean, mut second) = (ZERO, ZERO);
        for s in 0..ds {
            for i in 0..di {
                for (mid, v1) in apply(obs, (s, i)) {
                    mean += v1 * rho((s, i), mid);
                    for (r, v2) in apply(obs, mid) {
                        second += v2 * v1 * rho((s, i), r);
                    }
                }
            }
        }
        (mean.re, second.re - mean.re * mean.re)
    }
}

fn lower_raise(n: usize, p: u32, q: u32) -> Option<(usize, f64)> {
    let (p, q) = (p as usize, q as usize);
    if q > n {
        return None;
    }
    let m = n - q + p;
    Some((m, (factorial(n) / factorial(n - q) * factorial(m) / factorial(n - q)).sqrt()))
}

/// `O |s, i⟩` as a list of basis states and amplitudes.
fn apply(obs: &LadderPoly, (s, i): (usize, usize)) -> Vec<((usize, usize), Complex64)> {
    obs.terms
        .iter()
        .filter_map(|((p, q), c)| {
            let (s2, ws) = lower_raise(s, p[0], q[0])?;
            let (i2, wi) = lower_raise(i, p[1], q[1])?;
            Some(((s2, i2), c * ws * wi))
        })
        .collect()
}
