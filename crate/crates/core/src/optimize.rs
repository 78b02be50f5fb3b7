//! Small deterministic derivative-free optimisers.

/// Result of a one-dimensional search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum1d {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of a unimodal function on `[a, b]` until the
/// bracket is narrower than `tol`.
pub fn golden_section_min(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Minimum1d {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evaluations = 2;
    while hi - lo > tol && evaluations < 500 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        evaluations += 1;
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Minimum1d { x, value, evaluations }
}

pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Minimum1d {
    let mut m = golden_section_min(|x| -f(x), a, b, tol);
    m.value = -m.value;
    m
}

/// Minimises on `[a, b]` by sampling `points` evenly spaced values, then
/// refining with golden section: over the whole interval when the samples are
/// unimodal, otherwise inside the bracket around the best sample.
pub fn bracketed_min(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, points: usize, tol: f64) -> Minimum1d {
    let points = points.max(3);
    let xs: Vec<f64> = (0..points).map(|k| a + (b - a) * k as f64 / (points - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let best = ys
        .iter()
        .enumerate()
        .min_by(|l, r| l.1.total_cmp(r.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let unimodal = ys[..=best].windows(2).all(|w| w[1] <= w[0]) && ys[best..].windows(2).all(|w| w[1] >= w[0]);
    let (lo, hi) = if unimodal {
        (a, b)
    } else {
        (xs[best.saturating_sub(1)], xs[(best + 1).min(points - 1)])
    };
    let mut m = golden_section_min(&mut f, lo, hi, tol);
    m.evaluations += points;
    if ys[best] < m.value {
        m.x = xs[best];
        m.value = ys[best];
    }
    m
}

/// Result of a Nelder–Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead minimisation from `x0` with an axis-aligned initial simplex of
/// edge `step`. Stops when the spread of simplex values and the simplex
/// diameter both fall below `tol`, or after `max_iter` iterations.
pub fn nelder_mead(f: impl FnMut(&[f64]) -> f64, x0: &[f64], step: f64, max_iter: usize, tol: f64) -> SimplexMinimum {
    nelder_mead_with_steps(f, x0, &vec![step; x0.len()], max_iter, tol)
}

/// Nelder–Mead with a separate, possibly negative, initial edge per axis.
pub fn nelder_mead_with_steps(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    max_iter: usize,
    tol: f64,
) -> SimplexMinimum {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = (values[n] - values[0]).abs();
        let diameter = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= tol * (1.0 + values[0].abs()) && diameter <= tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let toward = |coef: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n]).map(|(c, w)| c + coef * (c - w)).collect()
        };

        let xr = toward(alpha);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = toward(gamma);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = toward(rho * alpha);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = toward(-rho);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = best.iter().zip(&simplex[i]).map(|(b, v)| b + sigma * (v - b)).collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    SimplexMinimum { x: simplex[best].clone(), value: values[best], iterations, converged }
}

/// Central-difference gradient.
pub fn gradient(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + h;
            let up = f(&p);
            p[i] = orig - h;
            let down = f(&p);
            p[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Newton steps on a two-variable function using central-difference
/// derivatives; a step is kept only while it shrinks the gradient, which
/// stays meaningful after function values stop resolving the progress.
pub fn newton_polish_2d(mut f: impl FnMut(&[f64]) -> f64, x0: [f64; 2], h: f64, steps: usize) -> [f64; 2] {
    let grad_h = h * 1e-2;
    let norm = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = x0;
    let mut g = gradient(&mut f, &x, grad_h);
    for _ in 0..steps {
        let fx = f(&x);
        let at = |f: &mut dyn FnMut(&[f64]) -> f64, dx: f64, dy: f64| f(&[x[0] + dx, x[1] + dy]);
        let hxx = (at(&mut f, h, 0.0) - 2.0 * fx + at(&mut f, -h, 0.0)) / (h * h);
        let hyy = (at(&mut f, 0.0, h) - 2.0 * fx + at(&mut f, 0.0, -h)) / (h * h);
        let hxy = (at(&mut f, h, h) - at(&mut f, h, -h) - at(&mut f, -h, h) + at(&mut f, -h, -h)) / (4.0 * h * h);
        let det = hxx * hyy - hxy * hxy;
        if !(det > 0.0) || !(hxx > 0.0) {
            break;
        }
        let dx = -(hyy * g[0] - hxy * g[1]) / det;
        let dy = -(hxx * g[1] - hxy * g[0]) / det;
        let trial = [x[0] + dx, x[1] + dy];
        let gt = gradient(&mut f, &trial, grad_h);
        if !(norm(&gt) < norm(&g)) {
            break;
        }
        x = trial;
        g = gt;
    }
    x
}
