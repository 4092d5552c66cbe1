//! Tensor-product Gauss–Legendre quadrature over rectangles.
//!
//! The entry points double the rule order until two successive estimates
//! agree to the configured relative tolerance. [`integrate_graded`] splits a
//! large rectangle into panels that grow geometrically away from a focus
//! point, which keeps sharply peaked integrands (a source hovering close to
//! a huge aperture) cheap to resolve.

use std::collections::HashMap;
use std::ops::{Add, Mul};
use std::sync::{Arc, OnceLock, RwLock};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Controls the adaptive per-rectangle quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Successive estimates must agree to this relative tolerance.
    pub rel_tol: f64,
    /// Absolute floor for the agreement test (integrals that cancel to ~0).
    pub abs_tol: f64,
    /// Starting order per axis.
    pub min_order: usize,
    /// Orders beyond this are a convergence failure.
    pub max_order: usize,
    /// Lower bound on node density for oscillatory integrands.
    pub nodes_per_wavelength: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            min_order: 4,
            max_order: 512,
            nodes_per_wavelength: 8.0,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Starting order for a side of length `extent` when the integrand
    /// oscillates with period `wavelength`.
    pub fn start_order(&self, extent: f64, wavelength: f64) -> usize {
        let resolve = (self.nodes_per_wavelength * extent / wavelength).ceil();
        let resolve = if resolve.is_finite() { resolve as usize } else { 0 };
        self.min_order.max(resolve).max(2)
    }
}

/// Values that can be accumulated by the quadrature.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    /// Square of side `side` centred on `(cx, cy)`.
    pub fn centered_square(cx: f64, cy: f64, side: f64) -> Self {
        let h = 0.5 * side;
        Self::new(cx - h, cx + h, cy - h, cy + h)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

type Rule = Arc<Vec<(f64, f64)>>;

/// Gauss–Legendre nodes and weights on [-1, 1], cached per order.
pub fn gauss_legendre(order: usize) -> Rule {
    static CACHE: OnceLock<RwLock<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.read().expect("rule cache poisoned").get(&order) {
        return rule.clone();
    }
    let rule: Rule = Arc::new(
        GaussLegendre::new(order.max(2))
            .expect("order >= 2")
            .as_node_weight_pairs()
            .to_vec(),
    );
    cache
        .write()
        .expect("rule cache poisoned")
        .entry(order)
        .or_insert(rule)
        .clone()
}

/// Fixed-order tensor-product rule over `rect`.
pub fn fixed_rect<T, F>(f: &F, rect: Rect, order: usize) -> T
where
    T: Integrand,
    F: Fn(f64, f64) -> T,
{
    let rule = gauss_legendre(order);
    let (hx, mx) = (0.5 * rect.width(), 0.5 * (rect.x0 + rect.x1));
    let (hy, my) = (0.5 * rect.height(), 0.5 * (rect.y0 + rect.y1));
    let mut total = T::zero();
    for &(u, wu) in rule.iter() {
        let x = mx + hx * u;
        let mut row = T::zero();
        for &(v, wv) in rule.iter() {
            row = row + f(x, my + hy * v) * wv;
        }
        total = total + row * wu;
    }
    total * (hx * hy)
}

/// Adaptive order doubling over a single rectangle.
pub fn adaptive_rect<T, F>(f: &F, rect: Rect, start_order: usize, cfg: &QuadratureConfig) -> Result<T>
where
    T: Integrand,
    F: Fn(f64, f64) -> T,
{
    let mut order = start_order.max(2);
    let mut prev: T = fixed_rect(f, rect, order);
    loop {
        order *= 2;
        let next: T = fixed_rect(f, rect, order);
        let diff = (next + prev * -1.0).magnitude();
        if diff <= cfg.rel_tol * next.magnitude() + cfg.abs_tol {
            return Ok(next);
        }
        if order >= cfg.max_order {
            return Err(Error::QuadratureNonConvergence {
                estimate: next.magnitude(),
                error_bound: diff,
            });
        }
        prev = next;
    }
}

/// Breakpoints of `[lo, hi]` that grow geometrically (factor 2) away from
/// `focus`, starting at spacing `scale`.
pub fn graded_breakpoints(lo: f64, hi: f64, focus: f64, scale: f64) -> Vec<f64> {
    let mut points = vec![lo, hi];
    let c = focus.clamp(lo, hi);
    if c > lo && c < hi {
        points.push(c);
    }
    let mut step = scale;
    while c - step > lo || c + step < hi {
        if c - step > lo {
            points.push(c - step);
        }
        if c + step < hi {
            points.push(c + step);
        }
        step *= 2.0;
    }
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup();
    points
}

/// Integrates over `rect` using panels graded around `(fx, fy)` with
/// innermost panel size `scale`; each panel is integrated adaptively.
pub fn integrate_graded<F>(
    f: &F,
    rect: Rect,
    (fx, fy): (f64, f64),
    scale: f64,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let xs = graded_breakpoints(rect.x0, rect.x1, fx, scale);
    let ys = graded_breakpoints(rect.y0, rect.y1, fy, scale);
    let mut total = 0.0;
    for xw in xs.windows(2) {
        for yw in ys.windows(2) {
            let panel = Rect::new(xw[0], xw[1], yw[0], yw[1]);
            total += adaptive_rect(f, panel, cfg.min_order, cfg)?;
        }
    }
    Ok(total)
}
