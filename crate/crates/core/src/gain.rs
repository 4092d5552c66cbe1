//! Closed-form channel gains, far-field approximations and SNR scaling.
//!
//! All gains are dimensionless received-to-transmitted power ratios for an
//! isotropic source polarised along Y. The field intensity and the
//! free-space impedance cancel out of every ratio computed here.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Result};
use crate::geometry::{check_angle, Point, SourcePoint};
use crate::quadrature::{integrate_graded, QuadratureConfig, Rect};
use crate::units::power_to_db;

/// Friis gain `A / (4π d²)` of a perpendicular antenna of area `A`.
pub fn friis_gain(area: f64, d: f64) -> f64 {
    area / (4.0 * PI * d * d)
}

/// Antiderivative term of the planar power integral, evaluated at corner
/// offsets `(x, y)` normalised by the source height.
fn corner_term(x: f64, y: f64) -> f64 {
    let xy = x * y;
    let root = (x * x + y * y + 1.0).sqrt();
    let ratio = xy / root;
    debug_assert!(ratio.is_finite(), "arctan argument must be finite");
    xy / (3.0 * (y * y + 1.0) * root) + (2.0 / 3.0) * ratio.atan()
}

/// Upper bound `ζ` on `|h_n|²` for a square antenna of side `a` centred at
/// `center`: the received power integrated over the patch with the phase
/// variation over the antenna neglected. Tight for sub-wavelength antennas.
pub fn zeta_bound(source: &SourcePoint, center: Point, a: f64) -> f64 {
    let p = source.position();
    let d = p.z;
    let dx = center.x - p.x;
    let dy = center.y - p.y;
    let xs = [(0.5 * a + dx) / d, (0.5 * a - dx) / d];
    let ys = [(0.5 * a + dy) / d, (0.5 * a - dy) / d];
    let mut sum = 0.0;
    for &x in &xs {
        for &y in &ys {
            sum += corner_term(x, y);
        }
    }
    sum / (4.0 * PI)
}

/// Total gain with a broadside source and `n` antennas of area `area`
/// (the whole aperture as one loss-free integration region).
pub fn alpha_total(d: f64, n: u64, area: f64) -> f64 {
    let nb = n as f64 * friis_gain(area, d);
    let x = nb * PI;
    let root = (2.0 * x + 1.0).sqrt();
    nb / (3.0 * (x + 1.0) * root) + 2.0 / (3.0 * PI) * (x / root).atan()
}

/// Total matched-filter gain for a source at distance `d` and angle `phi`.
/// Depends on `(n, area)` only through the total area `n·area`.
pub fn xi_total(d: f64, phi: f64, n: u64, area: f64) -> Result<f64> {
    positive("d", d)?;
    check_angle(phi)?;
    let b = n as f64 * area / (4.0 * d * d * phi.cos().powi(2));
    let t = phi.tan();
    let sb = b.sqrt();
    let mut total = 0.0;
    for sign in [-1.0, 1.0] {
        let num = b + sign * sb * t;
        let root = (2.0 * b + t * t + 1.0 + 2.0 * sign * sb * t).sqrt();
        total += num / (6.0 * PI * (b + 1.0) * root) + (num / root).atan() / (3.0 * PI);
    }
    Ok(total)
}

/// Far-field approximation `N β_{d cos φ} cos³ φ`.
pub fn farfield_gain(d: f64, phi: f64, n: u64, area: f64) -> Result<f64> {
    positive("d", d)?;
    check_angle(phi)?;
    let c = phi.cos();
    Ok(n as f64 * friis_gain(area, d * c) * c.powi(3))
}

/// Loss factors retained by the simplified near-field surrogates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertySet {
    /// Distance variation only (free-space pathloss per point).
    Pathloss,
    /// Pathloss and the effective-area (projection) reduction.
    PathlossEffectiveArea,
}

/// Total gain of a broadside source over the full aperture when only some
/// of the propagation losses are modelled. Computed by quadrature.
pub fn partial_property_gain(
    d: f64,
    n: u64,
    area: f64,
    properties: PropertySet,
    quad: &QuadratureConfig,
) -> Result<f64> {
    positive("d", d)?;
    positive("area", area)?;
    let half = 0.5 * (n as f64 * area).sqrt();
    let quarter = Rect::new(0.0, half, 0.0, half);
    let four_pi = 4.0 * PI;
    let value = match properties {
        PropertySet::Pathloss => {
            let f = |x: f64, y: f64| 1.0 / (four_pi * (x * x + y * y + d * d));
            integrate_graded(&f, quarter, (0.0, 0.0), d, quad)?
        }
        PropertySet::PathlossEffectiveArea => {
            let f = |x: f64, y: f64| {
                let r2 = x * x + y * y + d * d;
                d / (four_pi * r2 * r2.sqrt())
            };
            integrate_graded(&f, quarter, (0.0, 0.0), d, quad)?
        }
    };
    Ok(4.0 * value)
}

/// The exact loss integrand, numerically integrated over the full aperture.
/// Independent route to [`alpha_total`].
pub fn exact_gain_numeric(d: f64, n: u64, area: f64, quad: &QuadratureConfig) -> Result<f64> {
    positive("d", d)?;
    let half = 0.5 * (n as f64 * area).sqrt();
    let f = |x: f64, y: f64| {
        let r2 = x * x + y * y + d * d;
        d * (x * x + d * d) / (4.0 * PI * r2 * r2 * r2.sqrt())
    };
    Ok(4.0 * integrate_graded(&f, Rect::new(0.0, half, 0.0, half), (0.0, 0.0), d, quad)?)
}

/// Matched-filter SNR; identical for uplink combining and downlink precoding.
pub fn snr_mf(total_gain: f64, p_tx: f64, noise: f64) -> f64 {
    total_gain * p_tx / noise
}

/// Which model produced a [`GainReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainModel {
    Exact,
    Properties12,
    Property1,
    Farfield,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainContext {
    pub d: f64,
    pub phi: f64,
    pub n: u64,
    pub area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub value: f64,
    pub model: GainModel,
    pub context: GainContext,
}

impl GainReport {
    /// Evaluates `model` in `context`. The partial-property surrogates are
    /// only defined for broadside sources.
    pub fn evaluate(context: GainContext, model: GainModel, quad: &QuadratureConfig) -> Result<Self> {
        let GainContext { d, phi, n, area } = context;
        let broadside = || {
            if phi == 0.0 {
                Ok(())
            } else {
                Err(crate::Error::InvalidParameter {
                    name: "phi",
                    value: phi,
                    reason: "partial-property models are defined for broadside sources only",
                })
            }
        };
        let value = match model {
            GainModel::Exact => xi_total(d, phi, n, area)?,
            GainModel::Farfield => farfield_gain(d, phi, n, area)?,
            GainModel::Properties12 => {
                broadside()?;
                partial_property_gain(d, n, area, PropertySet::PathlossEffectiveArea, quad)?
            }
            GainModel::Property1 => {
                broadside()?;
                partial_property_gain(d, n, area, PropertySet::Pathloss, quad)?
            }
        };
        Ok(Self {
            value,
            model,
            context,
        })
    }
}

/// SNR versus array size when the transmit power shrinks as `P / N^ρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingLawCurve {
    pub rho: f64,
    /// Reference power `P`, relative to the noise power.
    pub reference_power: f64,
    /// `(N, SNR)` with the SNR as a linear ratio.
    pub points: Vec<(u64, f64)>,
}

impl ScalingLawCurve {
    pub fn snr_db(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.points.iter().map(|&(n, snr)| (n, power_to_db(snr)))
    }
}

/// Broadside scaling-law sweep with explicit reference power.
pub fn scaling_law_sweep(
    d: f64,
    area: f64,
    rho: f64,
    reference_power: f64,
    noise: f64,
    n_list: &[u64],
) -> Result<ScalingLawCurve> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(crate::Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "power scaling exponent must be finite and non-negative",
        });
    }
    positive("d", d)?;
    positive("noise", noise)?;
    let points = n_list
        .iter()
        .map(|&n| {
            let p_tx = reference_power / (n as f64).powf(rho);
            (n, snr_mf(alpha_total(d, n, area), p_tx, noise))
        })
        .collect();
    Ok(ScalingLawCurve {
        rho,
        reference_power,
        points,
    })
}

/// As [`scaling_law_sweep`], with `P` chosen so the single-antenna SNR is 0 dB.
pub fn calibrated_scaling_law(d: f64, area: f64, rho: f64, n_list: &[u64]) -> Result<ScalingLawCurve> {
    let p = 1.0 / alpha_total(d, 1, area);
    scaling_law_sweep(d, area, rho, p, 1.0, n_list)
}
