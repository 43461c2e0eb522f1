#![allow(dead_code)]

use lookback_core::calibrator::Calibrator;
use rand::Rng;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

/// `int_1^inf value(y) / y^2 dy` by composite Gauss-Legendre after `y = e^s`,
/// with panel edges at every discontinuity in `kinks`.
pub fn quadrature_integral(value: impl Fn(f64) -> f64, kinks: &[f64]) -> f64 {
    const S_MAX: f64 = 400.0;
    const WIDTH: f64 = 0.25;
    let rule = gauss_legendre(10);

    let mut edges: Vec<f64> = (0..=(S_MAX / WIDTH) as usize)
        .map(|i| i as f64 * WIDTH)
        .collect();
    edges.extend(kinks.iter().filter(|&&b| b > 1.0).map(|b| b.ln()));
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut total = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        for &(x, wt) in &rule {
            let s = mid + half * x;
            total += wt * half * value(s.exp()) * (-s).exp();
        }
    }
    total
}

pub fn calibrator_quadrature(f: &Calibrator) -> f64 {
    let kinks = match f {
        Calibrator::Step(s) => s.breakpoints().to_vec(),
        Calibrator::Power(_) => Vec::new(),
    };
    quadrature_integral(|y| f.value(y), &kinks)
}

/// Closed-form integral of a step function, computed here from scratch.
pub fn step_integral(breakpoints: &[f64], values: &[f64]) -> f64 {
    (0..breakpoints.len())
        .map(|k| {
            let next = breakpoints.get(k + 1).map_or(0.0, |b| 1.0 / b);
            values[k] * (1.0 / breakpoints[k] - next)
        })
        .sum()
}

/// Random increasing breakpoints starting at 1 and nondecreasing values,
/// before normalization.
pub fn random_step_parts<R: Rng + ?Sized>(rng: &mut R, levels: usize) -> (Vec<f64>, Vec<f64>) {
    let mut breakpoints = vec![1.0];
    let mut values = vec![rng.random_range(0.0..1.0)];
    for _ in 1..levels {
        let last: f64 = *breakpoints.last().unwrap();
        // sometimes land on a tenth so that evaluation grids hit the jump
        let next = if rng.random_bool(0.3) {
            ((last * 10.0).floor() + rng.random_range(1..20) as f64) / 10.0
        } else {
            last * rng.random_range(1.01..3.0)
        };
        breakpoints.push(next);
        let v = *values.last().unwrap();
        values.push(v + rng.random_range(0.0..2.0) * next / 10.0);
    }
    (breakpoints, values)
}

/// A random step calibrator with integral exactly `target` up to rounding.
pub fn random_step_with_integral<R: Rng + ?Sized>(
    rng: &mut R,
    levels: usize,
    target: f64,
) -> Calibrator {
    let (b, v) = random_step_parts(rng, levels);
    let k = target / step_integral(&b, &v);
    Calibrator::step(b, v.iter().map(|x| x * k).collect()).unwrap()
}

/// `{1, 1.1, .., 100}` without accumulated rounding.
pub fn tenth_grid() -> Vec<f64> {
    (0..=990).map(|k| 1.0 + k as f64 / 10.0).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
