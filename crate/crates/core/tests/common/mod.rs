//! Test-only oracles. Deliberately simple and independent of the library's
//! Gauss–Legendre machinery.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Composite Simpson rule with `n` (rounded up to even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Tensor-product Simpson over `[x0, x1] × [y0, y1]`.
pub fn simpson_2d<F: Fn(f64, f64) -> f64>(f: F, (x0, x1): (f64, f64), (y0, y1): (f64, f64), n: usize) -> f64 {
    simpson(|x| simpson(|y| f(x, y), y0, y1, n), x0, x1, n)
}

/// Fresnel integrals by Simpson on the defining integrals. The step is
/// kept below 5e-5 so the error stays far under 1e-8 up to x = 10.
pub fn fresnel_oracle(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let n = ((x / 5e-5).ceil() as usize).max(2_000);
    let c = simpson(|t| (FRAC_PI_2 * t * t).cos(), 0.0, x, n);
    let s = simpson(|t| (FRAC_PI_2 * t * t).sin(), 0.0, x, n);
    (c, s)
}

/// `Σ log₂(1 + g_k p_k / σ²)`.
pub fn rate(g: &[f64], p: &[f64], noise: f64) -> f64 {
    g.iter().zip(p).map(|(g, p)| (1.0 + g * p / noise).log2()).sum()
}

/// Best three-user allocation on a simplex grid with `steps` divisions.
pub fn simplex_search3(g: &[f64; 3], total: f64, noise: f64, steps: usize) -> ([f64; 3], f64) {
    let mut best = ([0.0; 3], f64::NEG_INFINITY);
    for i in 0..=steps {
        for j in 0..=steps - i {
            let p = [
                total * i as f64 / steps as f64,
                total * j as f64 / steps as f64,
                total * (steps - i - j) as f64 / steps as f64,
            ];
            let r = rate(g, &p, noise);
            if r > best.1 {
                best = (p, r);
            }
        }
    }
    best
}

/// Rounds to three significant figures.
pub fn sig3(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mag = 10f64.powi(x.abs().log10().floor() as i32 - 2);
    (x / mag).round() * mag
}

pub fn same_sig3(x: f64, expected: f64) -> bool {
    (sig3(x) - expected).abs() <= 1e-9 * expected.abs()
}
