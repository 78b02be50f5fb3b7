//! Complementary error function helpers.

use std::f64::consts::PI;

/// `erfc(x)` to double precision.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `ln erfc(x)`, finite for arguments where `erfc` underflows.
pub fn ln_erfc(x: f64) -> f64 {
    if x < 5.0 {
        return erfc(x).ln();
    }
    // erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let mut tail = x;
    for k in (1..=60).rev() {
        tail = x + 0.5 * k as f64 / tail;
    }
    -x * x - 0.5 * PI.ln() - tail.ln()
}

/// Leading term of the asymptotic expansion, `e^{-x²}/(√π x)`, an upper bound
/// on `erfc(x)` for `x > 0`.
pub fn erfc_asymptotic_bound(x: f64) -> f64 {
    (-x * x).exp() / (PI.sqrt() * x)
}
