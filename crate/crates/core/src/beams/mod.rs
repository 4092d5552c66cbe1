//! Fresnel-approximation beam gains along the broadside axis, depth of
//! focus and 3 dB beam depth.
//!
//! Under the Fresnel approximation the normalised gain at distance `d` of a
//! matched filter focused at `z` is `A(d_FA / (8 z_eff))`, with
//! `A(x) = (C²(√x) + S²(√x))² / x²` and `z_eff = dz/|d − z|`.

pub mod fresnel;

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::field::{channel_vector, ChannelModel};
use crate::gain::alpha_total;
use crate::geometry::{ArraySpec, SourcePoint};
use crate::quadrature::QuadratureConfig;

pub use fresnel::{fresnel_c, fresnel_cs, fresnel_s};

/// A focal or evaluation distance; infinity is a distinct case, not a
/// large number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Finite(f64),
    Infinity,
}

impl Distance {
    pub fn finite(self) -> Option<f64> {
        match self {
            Distance::Finite(v) => Some(v),
            Distance::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Distance::Infinity)
    }

    /// The value as `f64`, with `f64::INFINITY` for [`Distance::Infinity`].
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    fn validated(self, name: &'static str) -> Result<Self> {
        if let Distance::Finite(v) = self {
            positive(name, v)?;
        }
        Ok(self)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(v) => write!(f, "{v}"),
            Distance::Infinity => f.write_str("inf"),
        }
    }
}

/// Below this argument `A(x)` is replaced by its Taylor expansion, which
/// avoids cancellation in `(C² + S²)² / x²`.
const SHAPE_SERIES_BELOW: f64 = 1e-4;

/// `A(x) = (C²(√x) + S²(√x))² / x²`, with `A(0) = 1`.
pub fn fresnel_shape(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < SHAPE_SERIES_BELOW {
        let p2 = std::f64::consts::PI * std::f64::consts::PI;
        return 1.0 - 2.0 * p2 * x * x / 45.0;
    }
    let (c, s) = fresnel_cs(x.sqrt());
    let m = c * c + s * s;
    m * m / (x * x)
}

/// `A(d_FA / (8z))`: the Fresnel gain at broadside distance `z` with the
/// wavefront curvature over the aperture left uncompensated. Equal to
/// [`gain_off_focus`] at `d = z` for a beam focused at infinity.
pub fn gain_at_focus(z: f64, d_fa: f64) -> Result<f64> {
    positive("z", z)?;
    positive("d_fa", d_fa)?;
    Ok(fresnel_shape(d_fa / (8.0 * z)))
}

/// `d_FA / (8 z_eff)`; zero when `d = z`.
fn deviation(d: f64, z: Distance, d_fa: f64) -> f64 {
    match z {
        Distance::Infinity => d_fa / (8.0 * d),
        Distance::Finite(z) => d_fa * (d - z).abs() / (8.0 * d * z),
    }
}

/// Normalised gain at broadside distance `d` of a beam focused on `z`.
pub fn gain_off_focus(d: f64, z: Distance, d_fa: f64) -> Result<f64> {
    positive("d", d)?;
    positive("d_fa", d_fa)?;
    z.validated("z")?;
    Ok(fresnel_shape(deviation(d, z, d_fa)))
}

/// 3 dB depth-of-focus interval of a beam focused on `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthOfFocus {
    pub z: Distance,
    pub lower: f64,
    pub upper: Distance,
    /// Beam depth `upper − lower`.
    pub depth: Distance,
}

impl DepthOfFocus {
    pub fn contains(&self, d: f64) -> bool {
        d >= self.lower && d <= self.upper.as_f64()
    }
}

/// Closed-form depth of focus. Finite exactly when `z < d_FA/10`.
pub fn depth_of_focus(z: Distance, d_fa: f64) -> Result<DepthOfFocus> {
    positive("d_fa", d_fa)?;
    z.validated("z")?;
    Ok(match z {
        Distance::Infinity => DepthOfFocus {
            z,
            lower: d_fa / 10.0,
            upper: Distance::Infinity,
            depth: Distance::Infinity,
        },
        Distance::Finite(zf) => {
            let lower = d_fa * zf / (d_fa + 10.0 * zf);
            if 10.0 * zf < d_fa {
                DepthOfFocus {
                    z,
                    lower,
                    upper: Distance::Finite(d_fa * zf / (d_fa - 10.0 * zf)),
                    depth: Distance::Finite(20.0 * d_fa * zf * zf / (d_fa * d_fa - 100.0 * zf * zf)),
                }
            } else {
                DepthOfFocus {
                    z,
                    lower,
                    upper: Distance::Infinity,
                    depth: Distance::Infinity,
                }
            }
        }
    })
}

/// Where the Fresnel gain of the beam focused on `z` equals `level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossings {
    pub lower: f64,
    /// `None` when the gain stays above `level` all the way to infinity.
    pub upper: Option<f64>,
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    // f(lo) and f(hi) have opposite signs
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Numeric `level`-crossings of [`gain_off_focus`] on either side of the
/// focal point, found by geometric bracketing and bisection.
pub fn crossings(z: Distance, d_fa: f64, level: f64) -> Result<Crossings> {
    positive("d_fa", d_fa)?;
    z.validated("z")?;
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter {
            name: "level",
            value: level,
            reason: "must lie strictly between 0 and 1",
        });
    }
    let g = |d: f64| fresnel_shape(deviation(d, z, d_fa)) - level;
    let start = z.finite().unwrap_or(d_fa);
    let mut lo = start;
    while g(lo) > 0.0 {
        lo *= 0.5;
    }
    let lower = bisect(g, lo, if lo == start { start } else { 2.0 * lo });
    let upper = match z {
        Distance::Infinity => None,
        Distance::Finite(zf) => {
            if fresnel_shape(d_fa / (8.0 * zf)) >= level {
                None
            } else {
                let mut hi = zf;
                while g(hi) > 0.0 {
                    hi *= 2.0;
                }
                Some(bisect(g, (0.5 * hi).max(zf), hi))
            }
        }
    };
    Ok(Crossings { lower, upper })
}

/// 3 dB crossings, `level = 1/2`.
pub fn three_db_crossings(z: Distance, d_fa: f64) -> Result<Crossings> {
    crossings(z, d_fa, 0.5)
}

/// Fresnel gain of one beam sampled at a set of distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocusProfile {
    pub z: Distance,
    pub d_fa: f64,
    /// `(d, gain)` in the order the distances were given.
    pub samples: Vec<(f64, f64)>,
}

pub fn focus_profile(z: Distance, d_fa: f64, distances: &[f64]) -> Result<FocusProfile> {
    let samples = distances
        .par_iter()
        .map(|&d| gain_off_focus(d, z, d_fa).map(|g| (d, g)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FocusProfile { z, d_fa, samples })
}

/// Unit-norm matched-filter weights for a beam focused on `focus`; uniform
/// weights for a beam focused at infinity.
pub fn focus_weights(
    spec: &ArraySpec,
    focus: Distance,
    model: ChannelModel,
    quad: &QuadratureConfig,
) -> Result<Vec<Complex64>> {
    let n = spec.num_antennas() as usize;
    match focus {
        Distance::Infinity => Ok(vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]),
        Distance::Finite(z) => {
            let h = channel_vector(spec, &SourcePoint::broadside(z)?, model, quad)?;
            let norm = h.norm();
            if norm == 0.0 {
                return Err(Error::DegenerateChannel);
            }
            Ok(h.coefficients.iter().map(|c| c.conj() / norm).collect())
        }
    }
}

/// Normalised gain `|hᵀw|² / (N α_{d,1})` computed from channel vectors,
/// without the Fresnel approximation.
pub fn beam_gain(
    spec: &ArraySpec,
    d: f64,
    weights: &[Complex64],
    model: ChannelModel,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let h = channel_vector(spec, &SourcePoint::broadside(d)?, model, quad)?;
    let inner: Complex64 = h.coefficients.iter().zip(weights).map(|(h, w)| h * w).sum();
    let n = spec.num_antennas();
    Ok(inner.norm_sqr() / (n as f64 * alpha_total(d, 1, spec.antenna_area())))
}
