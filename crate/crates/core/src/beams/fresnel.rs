//! Fresnel integrals `C(x) = ∫₀ˣ cos(πt²/2) dt` and `S(x) = ∫₀ˣ sin(πt²/2) dt`.
//!
//! Up to [`ASYMPTOTIC_FROM`] the defining integrals are evaluated with
//! composite Gauss–Legendre panels short enough to resolve the chirp; beyond
//! it the auxiliary functions `f`, `g` are summed from their asymptotic
//! series, whose smallest term there is far below double precision.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::quadrature::gauss_legendre;

/// Switch-over point between quadrature and the asymptotic expansion.
pub const ASYMPTOTIC_FROM: f64 = 4.0;

const PANEL_ORDER: usize = 20;
const PANEL_WIDTH: f64 = 0.25;

fn by_quadrature(x: f64) -> (f64, f64) {
    let rule = gauss_legendre(PANEL_ORDER);
    let panels = (x / PANEL_WIDTH).ceil().max(1.0) as usize;
    let h = x / panels as f64;
    let (mut c, mut s) = (0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        let (mut pc, mut ps) = (0.0, 0.0);
        for &(u, w) in rule.iter() {
            let t = mid + 0.5 * h * u;
            let (sin, cos) = (FRAC_PI_2 * t * t).sin_cos();
            pc += w * cos;
            ps += w * sin;
        }
        c += pc;
        s += ps;
    }
    (0.5 * h * c, 0.5 * h * s)
}

fn by_asymptotics(x: f64) -> (f64, f64) {
    let z = PI * x * x;
    let inv_z2 = 1.0 / (z * z);
    // f ~ (1/πx) Σ (-1)^m (4m-1)!! / z^{2m},  g ~ (1/π²x³) Σ (-1)^m (4m+1)!! / z^{2m}
    let (mut f, mut g) = (1.0, 1.0);
    let (mut tf, mut tg) = (1.0, 1.0);
    for m in 1..40 {
        let k = m as f64;
        let next_f = -tf * (4.0 * k - 3.0) * (4.0 * k - 1.0) * inv_z2;
        let next_g = -tg * (4.0 * k - 1.0) * (4.0 * k + 1.0) * inv_z2;
        if next_f.abs() >= tf.abs() || next_g.abs() >= tg.abs() {
            break;
        }
        tf = next_f;
        tg = next_g;
        f += tf;
        g += tg;
        if tf.abs() < 1e-17 && tg.abs() < 1e-17 {
            break;
        }
    }
    f /= PI * x;
    g /= PI * PI * x * x * x;
    let (sin, cos) = (FRAC_PI_2 * x * x).sin_cos();
    (0.5 + f * sin - g * cos, 0.5 - f * cos - g * sin)
}

/// `(C(x), S(x))`; both are odd in `x`.
pub fn fresnel_cs(x: f64) -> (f64, f64) {
    let ax = x.abs();
    let (c, s) = if ax == 0.0 {
        (0.0, 0.0)
    } else if ax <= ASYMPTOTIC_FROM {
        by_quadrature(ax)
    } else {
        by_asymptotics(ax)
    };
    if x < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

pub fn fresnel_c(x: f64) -> f64 {
    fresnel_cs(x).0
}

pub fn fresnel_s(x: f64) -> f64 {
    fresnel_cs(x).1
}
