//! Field-region distances and normalised antenna / array gains.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Result};
use crate::field::{channel_coefficient, power_density};
use crate::gain::alpha_total;
use crate::geometry::{ArraySpec, SourcePoint};
use crate::quadrature::{adaptive_rect, QuadratureConfig, Rect};

/// Fraunhofer distance `2D²/λ` of an aperture with diagonal `diagonal`.
pub fn fraunhofer_distance(diagonal: f64, wavelength: f64) -> f64 {
    2.0 * diagonal * diagonal / wavelength
}

/// Fraunhofer distance of the whole array, `2W²/λ = N·d_F`.
pub fn fraunhofer_array_distance(n: u64, antenna_diagonal: f64, wavelength: f64) -> f64 {
    n as f64 * fraunhofer_distance(antenna_diagonal, wavelength)
}

/// Distance `2W = 2D√N` beyond which the normalised array gain is close to
/// one. Independent of the wavelength.
pub fn saturation_distance(n: u64, antenna_diagonal: f64) -> f64 {
    2.0 * antenna_diagonal * (n as f64).sqrt()
}

/// Characteristic distances of an array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub d_f: f64,
    pub d_fa: f64,
    pub d_b: f64,
    /// Array diagonal.
    pub w: f64,
    /// Antenna diagonal.
    pub d: f64,
}

impl RegionReport {
    pub fn new(spec: &ArraySpec) -> Self {
        let (d, w) = spec.diagonals();
        let n = spec.num_antennas();
        let lambda = spec.wavelength();
        Self {
            d_f: fraunhofer_distance(d, lambda),
            d_fa: fraunhofer_array_distance(n, d, lambda),
            d_b: saturation_distance(n, d),
            w,
            d,
        }
    }
}

/// `|∬E|² / (A ∬|E|²)` over `rect` for an arbitrary sampled field. Equals 1
/// for a constant (perpendicular plane-wave) field.
pub fn normalized_antenna_gain<F>(field: F, rect: Rect, wavelength: f64, quad: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64, f64) -> Complex64,
{
    positive("wavelength", wavelength)?;
    let order = quad.start_order(rect.width().max(rect.height()), wavelength);
    let amplitude: Complex64 = adaptive_rect(&field, rect, order, quad)?;
    let power: f64 = adaptive_rect(&|x, y| field(x, y).norm_sqr(), rect, order, quad)?;
    Ok(amplitude.norm_sqr() / (rect.area() * power))
}

/// How [`normalized_array_gain`] is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayGainMode {
    /// Per-antenna field integrals.
    Exact,
    /// Closed-form upper bound `α_{d,N} / (N α_{d,1})`.
    Bound,
}

/// Normalised array gain for a broadside source at distance `d`: received
/// power of the array over that of `N` reference antennas centred on the
/// origin. The reference antenna has the same side as the array antennas.
pub fn normalized_array_gain(
    spec: &ArraySpec,
    d: f64,
    mode: ArrayGainMode,
    quad: &QuadratureConfig,
) -> Result<f64> {
    positive("d", d)?;
    let n = spec.num_antennas();
    let area = spec.antenna_area();
    let reference = n as f64 * alpha_total(d, 1, area);
    match mode {
        ArrayGainMode::Bound => Ok(alpha_total(d, n, area) / reference),
        ArrayGainMode::Exact => {
            let source = SourcePoint::broadside(d)?;
            let powers = (1..=n as usize)
                .into_par_iter()
                .map(|i| channel_coefficient(spec, &source, i, quad).map(|h| h.norm_sqr()))
                .collect::<Result<Vec<_>>>()?;
            Ok(powers.iter().sum::<f64>() / reference)
        }
    }
}

/// Reference-antenna power `∬_S |ε|²` by quadrature, for cross-checking the
/// closed form used in [`normalized_array_gain`].
pub fn reference_antenna_power(spec: &ArraySpec, d: f64, quad: &QuadratureConfig) -> Result<f64> {
    let src = SourcePoint::broadside(d)?.position();
    let rect = Rect::centered_square(0.0, 0.0, spec.antenna_side());
    adaptive_rect(&|x, y| power_density(&src, x, y), rect, quad.min_order, quad)
}

/// Fraction of the power lost by a spherical wavefront relative to a plane
/// wave over an aperture of diagonal `w` at distance `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLoss {
    /// `log(1 + (W/2d)²) / (W/2d)²`.
    pub ratio: f64,
    /// `1 − ratio`.
    pub loss: f64,
    /// Leading Taylor term of the loss, `W²/(8d²)`.
    pub taylor_loss: f64,
}

pub fn spherical_power_loss(w: f64, d: f64) -> Result<PowerLoss> {
    positive("d", d)?;
    let u = (w / (2.0 * d)).powi(2);
    let ratio = if u == 0.0 { 1.0 } else { u.ln_1p() / u };
    Ok(PowerLoss {
        ratio,
        loss: 1.0 - ratio,
        taylor_loss: w * w / (8.0 * d * d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_distances() {
        assert!((fraunhofer_distance(0.1, 0.1) - 0.2).abs() < 1e-15);
        // W = 1 m and 10 m with D√N = W
        assert!((fraunhofer_array_distance(100, 0.1, 0.1) - 20.0).abs() < 1e-12);
        assert!((fraunhofer_array_distance(10_000, 0.1, 0.1) - 2000.0).abs() < 1e-9);
        assert!((fraunhofer_array_distance(100, 0.1, 0.01) - 200.0).abs() < 1e-9);
        assert!((fraunhofer_array_distance(10_000, 0.1, 0.01) - 20_000.0).abs() < 1e-8);
    }

    #[test]
    fn quarter_wavelength_report() {
        let lambda = 0.1;
        let spec = ArraySpec::new(10_000, (lambda / 4.0f64).powi(2), lambda).unwrap();
        let r = RegionReport::new(&spec);
        assert!((r.d_f - lambda / 4.0).abs() < 1e-15);
        assert!((r.d_fa - 250.0).abs() < 1e-9);
        assert!((r.d_b / r.d_f - 282.84).abs() < 0.01);
        assert!((r.d_fa / r.d_b - 35.355).abs() < 1e-3);
        assert!((r.d_fa - 10_000.0 * r.d_f).abs() < 1e-9);
    }

    #[test]
    fn saturation_distance_scaling() {
        assert!((saturation_distance(400, 0.3) - 2.0 * saturation_distance(100, 0.3)).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_antenna_gain_is_one() {
        let g = normalized_antenna_gain(
            |_, _| Complex64::new(0.3, -0.1),
            Rect::centered_square(0.2, -0.1, 0.05),
            0.1,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_antenna_bound_is_one() {
        let spec = ArraySpec::new(1, 0.01, 0.1).unwrap();
        let g = normalized_array_gain(&spec, 3.0, ArrayGainMode::Bound, &QuadratureConfig::default()).unwrap();
        assert_eq!(g, 1.0);
    }

    #[test]
    fn reference_power_matches_alpha() {
        let spec = ArraySpec::new(4, 0.025f64.powi(2), 0.1).unwrap();
        let q = reference_antenna_power(&spec, 0.5, &QuadratureConfig::default()).unwrap();
        let a = alpha_total(0.5, 1, spec.antenna_area());
        assert!((q / a - 1.0).abs() < 1e-9);
    }

    #[test]
    fn power_loss_examples() {
        let l = spherical_power_loss(1.0, 2.0).unwrap();
        assert!((l.taylor_loss - 1.0 / 32.0).abs() < 1e-15);
        assert!((l.loss - 0.0303).abs() < 1e-3);
        let l = spherical_power_loss(1.0, 1.0).unwrap();
        assert!((l.taylor_loss - 0.125).abs() < 1e-15);
        assert!((l.ratio - 1.25f64.ln() / 0.25).abs() < 1e-15);
        assert!((l.ratio - 0.8926).abs() < 1e-4);
        assert!(spherical_power_loss(1.0, 1e9).unwrap().loss < 1e-15);
    }
}
