//! Complex field of a Y-polarised isotropic source and the per-antenna
//! channel coefficients obtained by integrating it over each antenna.
//!
//! The field is normalised so that `|ε|²` is a power density per unit area
//! relative to the transmitted power; integrating it over a perpendicular
//! patch in the far field recovers the Friis gain.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::gain::zeta_bound;
use crate::geometry::{AntennaRegion, ArraySpec, Point, SourcePoint};
use crate::quadrature::{adaptive_rect, QuadratureConfig, Rect};

/// The field model is only used at least this many wavelengths from the
/// source (outside the reactive near-field).
pub const REACTIVE_GUARD_WAVELENGTHS: f64 = 3.0;

/// Field value at a receive point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub value: Complex64,
    pub at: Point,
}

/// Field at `(x, y, 0)` without validity checks. `wavenumber` is `1/λ`.
#[inline]
pub(crate) fn field_at(src: &Point, x: f64, y: f64, inv_lambda: f64) -> Complex64 {
    let dx = x - src.x;
    let dy = y - src.y;
    let d = src.z;
    let r2 = dx * dx + dy * dy + d * d;
    let r = r2.sqrt();
    let amplitude = (d * (dx * dx + d * d) / (4.0 * PI)).sqrt() / (r2 * r.sqrt());
    let cycles = (r * inv_lambda).rem_euclid(1.0);
    Complex64::from_polar(amplitude, -2.0 * PI * cycles)
}

/// Squared modulus of the field, `d((x−x_t)² + d²) / (4π r⁵)`.
#[inline]
pub(crate) fn power_density(src: &Point, x: f64, y: f64) -> f64 {
    let dx = x - src.x;
    let dy = y - src.y;
    let d = src.z;
    let r2 = dx * dx + dy * dy + d * d;
    d * (dx * dx + d * d) / (4.0 * PI * r2 * r2 * r2.sqrt())
}

fn guard(distance: f64, wavelength: f64) -> Result<()> {
    let limit = REACTIVE_GUARD_WAVELENGTHS * wavelength;
    if distance < limit {
        Err(Error::ReactiveNearField {
            distance,
            limit,
            multiple: REACTIVE_GUARD_WAVELENGTHS,
        })
    } else {
        Ok(())
    }
}

/// Complex field at `at` (which must lie in the array plane).
pub fn electric_field(source: &SourcePoint, at: Point, wavelength: f64) -> Result<Complex64> {
    positive("wavelength", wavelength)?;
    if at.z != 0.0 {
        return Err(Error::InvalidParameter {
            name: "at.z",
            value: at.z,
            reason: "receive points lie in the z = 0 plane",
        });
    }
    let src = source.position();
    guard(src.distance(&at), wavelength)?;
    Ok(field_at(&src, at.x, at.y, 1.0 / wavelength))
}

/// Propagation phase `2π·mod(‖p_t − p_n‖/λ, 1)` in `[0, 2π)`.
pub fn antenna_phase(source: &SourcePoint, center: Point, wavelength: f64) -> f64 {
    let cycles = (source.position().distance(&center) / wavelength).rem_euclid(1.0);
    // rem_euclid may round up to exactly 1.0
    let phase = 2.0 * PI * cycles;
    if phase >= 2.0 * PI {
        0.0
    } else {
        phase
    }
}

/// `∬ ε` over an arbitrary rectangle of the array plane.
pub fn field_integral(
    source: &SourcePoint,
    rect: Rect,
    wavelength: f64,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    let src = source.position();
    let inv = 1.0 / wavelength;
    let f = |x: f64, y: f64| field_at(&src, x, y, inv);
    let order = quad.start_order(rect.width().max(rect.height()), wavelength);
    adaptive_rect(&f, rect, order, quad)
}

/// `∬ |ε|²` over a rectangle, by quadrature.
pub fn power_integral(source: &SourcePoint, rect: Rect, quad: &QuadratureConfig) -> Result<f64> {
    let src = source.position();
    let f = |x: f64, y: f64| power_density(&src, x, y);
    adaptive_rect(&f, rect, quad.min_order, quad)
}

fn region_coefficient(
    source: &SourcePoint,
    region: &AntennaRegion,
    wavelength: f64,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    guard(region.min_distance(&source.position()), wavelength)?;
    Ok(field_integral(source, region.rect(), wavelength, quad)? / region.side)
}

/// Channel coefficient `h_n = (1/a) ∬_{S_n} ε`; `|h_n|²` is the channel gain.
pub fn channel_coefficient(
    spec: &ArraySpec,
    source: &SourcePoint,
    n: usize,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    region_coefficient(source, &spec.antenna_region(n)?, spec.wavelength(), quad)
}

/// How a [`ChannelVector`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    /// Per-antenna field integral (amplitude and phase).
    Integral,
    /// Closed-form amplitude bound with the exact centre-point phase.
    Hybrid,
}

/// Channel coefficients `h_1..h_N` between one source and the array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelVector {
    pub provenance: ChannelModel,
    pub coefficients: Vec<Complex64>,
}

impl ChannelVector {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `‖h‖²`, summed in index order.
    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|h| h.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Writes `n,re,im` rows (1-based `n`) with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,re,im")?;
        for (i, h) in self.coefficients.iter().enumerate() {
            writeln!(w, "{},{:e},{:e}", i + 1, h.re, h.im)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel vector serialises")
    }
}

/// Channel vector from `source` to every antenna of `spec`. Antennas are
/// evaluated in parallel; the output order is the antenna index order.
pub fn channel_vector(
    spec: &ArraySpec,
    source: &SourcePoint,
    mode: ChannelModel,
    quad: &QuadratureConfig,
) -> Result<ChannelVector> {
    let n = spec.num_antennas() as usize;
    let lambda = spec.wavelength();
    let a = spec.antenna_side();
    let coefficients = (1..=n)
        .into_par_iter()
        .map(|i| {
            let region = spec.antenna_region(i)?;
            match mode {
                ChannelModel::Integral => region_coefficient(source, &region, lambda, quad),
                ChannelModel::Hybrid => {
                    let amplitude = zeta_bound(source, region.center, a).sqrt();
                    let phase = antenna_phase(source, region.center, lambda);
                    Ok(Complex64::from_polar(amplitude, -phase))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelVector {
        provenance: mode,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broadside_field_is_friis_density() {
        let d = 7.0;
        let e = electric_field(&SourcePoint::broadside(d).unwrap(), Point::ORIGIN, 0.1).unwrap();
        assert!((e.norm_sqr() - 1.0 / (4.0 * PI * d * d)).abs() < 1e-18);
    }

    #[test]
    fn integer_wavelength_distance_has_zero_phase() {
        let e = electric_field(&SourcePoint::broadside(20.0).unwrap(), Point::ORIGIN, 0.1).unwrap();
        assert!(e.arg().abs() < 1e-9);
    }

    #[test]
    fn off_axis_modulus() {
        let d = 3.0;
        let e = electric_field(&SourcePoint::broadside(d).unwrap(), Point::new(d, 0.0, 0.0), 0.1)
            .unwrap();
        let expect = 1.0 / (8.0 * PI * d * d * 2f64.sqrt());
        assert!((e.norm_sqr() / expect - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reactive_guard() {
        let src = SourcePoint::broadside(0.25).unwrap();
        let err = electric_field(&src, Point::ORIGIN, 0.1).unwrap_err();
        assert!(matches!(err, Error::ReactiveNearField { .. }));
        assert!(err.to_string().contains("reactive near-field"));
        assert!(electric_field(&src, Point::new(0.0, 0.0, 1.0), 0.1).is_err());
    }

    #[test]
    fn phases() {
        let src = SourcePoint::broadside(2.0).unwrap();
        assert!(antenna_phase(&src, Point::ORIGIN, 0.1).abs() < 1e-9);
        let src = SourcePoint::broadside(2.04).unwrap();
        assert!((antenna_phase(&src, Point::ORIGIN, 0.08) - PI).abs() < 1e-9);
        let src = SourcePoint::broadside(20.0).unwrap();
        let got = antenna_phase(&src, Point::new(0.025, 0.0, 0.0), 0.1);
        let expect = 2.0 * PI * (400.000625f64.sqrt() / 0.1).rem_euclid(1.0);
        assert!((got - expect).abs() < 1e-9);
        assert!((0.0..2.0 * PI).contains(&got));
    }

    #[test]
    fn single_antenna_vector_matches_alpha() {
        let spec = ArraySpec::new(1, 0.025f64.powi(2), 0.1).unwrap();
        let src = SourcePoint::broadside(5.0).unwrap();
        let h = channel_vector(&spec, &src, ChannelModel::Hybrid, &QuadratureConfig::default()).unwrap();
        let alpha = crate::gain::alpha_total(5.0, 1, spec.antenna_area());
        assert!((h.norm_sqr() - alpha).abs() < 1e-15 * alpha.max(1e-300) + 1e-20);
    }

    #[test]
    fn csv_and_json_shapes() {
        let h = ChannelVector {
            provenance: ChannelModel::Hybrid,
            coefficients: vec![Complex64::new(0.5, -0.25)],
        };
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,re,im\n1,5e-1,-2.5e-1\n");
        let back: ChannelVector = serde_json::from_str(&h.to_json()).unwrap();
        assert_eq!(back, h);
        assert!(h.to_json().contains("\"provenance\":\"hybrid\""));
    }
}
