//! Normal-ordered polynomials in ladder operators.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

type Key = (Vec<u32>, Vec<u32>);

/// `Σ c · Π a_i†^{p_i} Π a_i^{q_i}`, keyed by `(p, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderPoly {
    pub n_modes: usize,
    pub terms: BTreeMap<Key, Complex64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

impl LadderPoly {
    pub fn zero(n_modes: usize) -> Self {
        Self { n_modes, terms: BTreeMap::new() }
    }

    pub fn constant(n_modes: usize, c: Complex64) -> Self {
        let mut p = Self::zero(n_modes);
        p.push(vec![0; n_modes], vec![0; n_modes], c);
        p
    }

    pub fn real(n_modes: usize, c: f64) -> Self {
        Self::constant(n_modes, Complex64::new(c, 0.0))
    }

    /// `a_i†`.
    pub fn create(n_modes: usize, i: usize) -> Self {
        let mut p = vec![0; n_modes];
        p[i] = 1;
        let mut out = Self::zero(n_modes);
        out.push(p, vec![0; n_modes], Complex64::new(1.0, 0.0));
        out
    }

    /// `a_i`.
    pub fn annihilate(n_modes: usize, i: usize) -> Self {
        let mut q = vec![0; n_modes];
        q[i] = 1;
        let mut out = Self::zero(n_modes);
        out.push(vec![0; n_modes], q, Complex64::new(1.0, 0.0));
        out
    }

    /// `(a† e^{iφ} + a e^{−iφ}) / √2`.
    pub fn quadrature(n_modes: usize, i: usize, phi: f64) -> Self {
        let w = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, phi);
        Self::create(n_modes, i).scale(w) + Self::annihilate(n_modes, i).scale(w.conj())
    }

    fn push(&mut self, p: Vec<u32>, q: Vec<u32>, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let key = (p, q);
        let sum = self.terms.get(&key).copied().unwrap_or_default() + c;
        if sum == Complex64::new(0.0, 0.0) {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn scale(mut self, c: Complex64) -> Self {
        for v in self.terms.values_mut() {
            *v *= c;
        }
        self
    }

    pub fn times(self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_modes);
        for ((p, q), c) in &self.terms {
            out.push(q.clone(), p.clone(), c.conj());
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(p, q)| p.iter().chain(q).sum::<u32>()).max().unwrap_or(0)
    }
}

/// `a^q a†^r = Σ_j C(q,j) C(r,j) j! a†^{r−j} a^{q−j}` for one mode.
fn reorder(q: u32, r: u32) -> Vec<(u32, u32, f64)> {
    (0..=q.min(r)).map(|j| (r - j, q - j, binomial(q, j) * binomial(r, j) * factorial(j))).collect()
}

fn multiply_monomials(a: &Key, b: &Key) -> Vec<(Key, f64)> {
    let n = a.0.len();
    let mut acc: Vec<(Key, f64)> = vec![((Vec::with_capacity(n), Vec::with_capacity(n)), 1.0)];
    for m in 0..n {
        let options = reorder(a.1[m], b.0[m]);
        let mut next = Vec::with_capacity(acc.len() * options.len());
        for ((p, q), c) in &acc {
            for &(cre, ann, w) in &options {
                let mut p = p.clone();
                let mut q = q.clone();
                p.push(a.0[m] + cre);
                q.push(ann + b.1[m]);
                next.push(((p, q), c * w));
            }
        }
        acc = next;
    }
    acc
}

impl Mul for &LadderPoly {
    type Output = LadderPoly;

    fn mul(self, rhs: &LadderPoly) -> LadderPoly {
        assert_eq!(self.n_modes, rhs.n_modes);
        let mut out = LadderPoly::zero(self.n_modes);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                for ((p, q), w) in multiply_monomials(ka, kb) {
                    out.push(p, q, ca * cb * w);
                }
            }
        }
        out
    }
}

impl Mul for LadderPoly {
    type Output = LadderPoly;

    fn mul(self, rhs: LadderPoly) -> LadderPoly {
        &self * &rhs
    }
}

impl Add for LadderPoly {
    type Output = LadderPoly;

    fn add(mut self, rhs: LadderPoly) -> LadderPoly {
        assert_eq!(self.n_modes, rhs.n_modes);
        for ((p, q), c) in rhs.terms {
            self.push(p, q, c);
        }
        self
    }
}

impl Neg for LadderPoly {
    type Output = LadderPoly;

    fn neg(self) -> LadderPoly {
        self.times(-1.0)
    }
}

impl Sub for LadderPoly {
    type Output = LadderPoly;

    fn sub(self, rhs: LadderPoly) -> LadderPoly {
        self + (-rhs)
    }
}

/// Receiver observables written out term by term.
pub mod receivers {
    use super::LadderPoly;

    fn cr(n: usize, i: usize) -> LadderPoly {
        LadderPoly::create(n, i)
    }

    fn an(n: usize, i: usize) -> LadderPoly {
        LadderPoly::annihilate(n, i)
    }

    /// `a_S† a_I† + a_S a_I` on `n` modes.
    pub fn pair(n: usize) -> LadderPoly {
        cr(n, 0) * cr(n, 1) + an(n, 0) * an(n, 1)
    }

    pub fn bound(alpha: f64, beta: f64) -> LadderPoly {
        pair(2) + (cr(2, 0) * an(2, 0)).times(alpha) + (cr(2, 1) * an(2, 1)).times(beta)
    }

    pub fn opa(gain: f64) -> LadderPoly {
        pair(2).times((gain * (gain - 1.0)).sqrt())
            + (an(2, 0) * cr(2, 0)).times(gain - 1.0)
            + (cr(2, 1) * an(2, 1)).times(gain)
    }

    pub fn dh() -> LadderPoly {
        -pair(2) + an(2, 0) * cr(2, 0) + cr(2, 1) * an(2, 1)
    }

    /// Modes (signal, idler, ancilla).
    pub fn pc(mu: f64, nu: f64) -> LadderPoly {
        pair(3).times(nu) + (an(3, 1) * cr(3, 2) + an(3, 2) * cr(3, 1)).times(mu)
    }

    pub fn cross_number() -> LadderPoly {
        cr(2, 0) * an(2, 1) + cr(2, 1) * an(2, 0)
    }

    pub fn quadrature_product(theta: f64, phi: f64) -> LadderPoly {
        LadderPoly::quadrature(2, 0, theta) * LadderPoly::quadrature(2, 1, phi)
    }

    pub fn quadrature_square(mode: usize, theta: f64) -> LadderPoly {
        let x = LadderPoly::quadrature(2, mode, theta);
        &x * &x
    }
}
