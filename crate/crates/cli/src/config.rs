//! Experiment configuration: a TOML file whose every key is optional.
//!
//! [`ExperimentConfig::normalized`] fills the per-experiment defaults and
//! [`ExperimentConfig::validate`] reports every violation at once.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use elaa::beams::Distance;
use elaa::geometry::exact_sqrt;
use elaa::regions::RegionReport;
use elaa::QuadratureConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Total gain versus array diagonal under the four gain models.
    #[default]
    GainSweep,
    /// Received SNR versus N with transmit power scaled as P / N^ρ.
    ScalingLaw,
    /// Normalised array gain versus distance, exact and bound.
    ArrayGain,
    /// Beam gain versus distance for chosen focal points.
    Focus,
    /// Beam patterns of the focal ladder used for depth multiplexing.
    Multiplex,
    /// Sum spectral efficiency of ZF and scheduling versus SNR.
    SumSe,
    /// Characteristic distances of the array.
    Distances,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::GainSweep => "gain-sweep",
            Experiment::ScalingLaw => "scaling-law",
            Experiment::ArrayGain => "array-gain",
            Experiment::Focus => "focus",
            Experiment::Multiplex => "multiplex",
            Experiment::SumSe => "sum-se",
            Experiment::Distances => "distances",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub array: ArrayConfig,
    pub source: SourceConfig,
    pub sweep: SweepConfig,
    pub quadrature: QuadratureConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::default(),
            array: ArrayConfig::default(),
            source: SourceConfig::default(),
            sweep: SweepConfig::default(),
            quadrature: QuadratureConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrayConfig {
    pub num_antennas: u64,
    /// Defaults to `(λ/4)²`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub antenna_area: Option<f64>,
    pub wavelength: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            num_antennas: 10_000,
            antenna_area: None,
            wavelength: 0.1,
        }
    }
}

impl ArrayConfig {
    pub fn area(&self) -> f64 {
        self.antenna_area.unwrap_or((self.wavelength / 4.0).powi(2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceConfig {
    /// Perpendicular distance from the array plane, in metres.
    pub distance: f64,
    /// Angle from the array normal in the xz-plane.
    pub angle_rad: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            distance: 20.0,
            angle_rad: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Antenna counts, each a perfect square.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<u64>>,
    /// Power scaling exponents.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    /// Distances in units of the antenna Fraunhofer distance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_over_df: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub focal: Option<Vec<Focal>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub users: Option<usize>,
    /// Reference SNR of the outermost user, in dB.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// A focal point: `inf`, a distance in metres, `d_B`, or `d_FA/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Focal {
    Infinity,
    Metres(f64),
    Saturation,
    ArrayFraunhofer(f64),
}

impl Focal {
    pub fn resolve(self, regions: &RegionReport) -> Distance {
        match self {
            Focal::Infinity => Distance::Infinity,
            Focal::Metres(m) => Distance::Finite(m),
            Focal::Saturation => Distance::Finite(regions.d_b),
            Focal::ArrayFraunhofer(k) => Distance::Finite(regions.d_fa / k),
        }
    }
}

impl fmt::Display for Focal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Focal::Infinity => f.write_str("inf"),
            Focal::Metres(m) => write!(f, "{m}"),
            Focal::Saturation => f.write_str("d_B"),
            Focal::ArrayFraunhofer(k) if *k == 1.0 => f.write_str("d_FA"),
            Focal::ArrayFraunhofer(k) => write!(f, "d_FA/{k}"),
        }
    }
}

impl FromStr for Focal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        let bad = || format!("`{s}` is not a focal point (expected inf, metres, d_B, d_FA or d_FA/k)");
        let positive = |v: f64| if v > 0.0 && v.is_finite() { Ok(v) } else { Err(bad()) };
        match lower.as_str() {
            "inf" | "infinity" => Ok(Focal::Infinity),
            "d_b" => Ok(Focal::Saturation),
            "d_fa" => Ok(Focal::ArrayFraunhofer(1.0)),
            _ => {
                if let Some(k) = lower.strip_prefix("d_fa/") {
                    k.parse().map_err(|_| bad()).and_then(positive).map(Focal::ArrayFraunhofer)
                } else {
                    t.parse().map_err(|_| bad()).and_then(positive).map(Focal::Metres)
                }
            }
        }
    }
}

impl Serialize for Focal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Focal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn log_grid(from_exp: f64, per_decade: u32, count: u32) -> Vec<f64> {
    (0..count).map(|k| 10f64.powf(from_exp + k as f64 / per_decade as f64)).collect()
}

/// Perfect squares with sides `round(10^(k/8))`, `N` from 1 to 10¹².
fn default_n_list() -> Vec<u64> {
    let mut sides: Vec<u64> = (0..=48).map(|k| 10f64.powf(k as f64 / 8.0).round() as u64).collect();
    sides.dedup();
    sides.into_iter().map(|s| s * s).collect()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Every optional key filled with its default for the configured experiment.
    pub fn normalized(&self) -> Self {
        let mut c = self.clone();
        c.array.antenna_area = Some(c.array.area());
        let s = &mut c.sweep;
        s.n_list.get_or_insert_with(default_n_list);
        s.rho.get_or_insert_with(|| vec![0.0, 0.5, 1.0]);
        s.d_over_df.get_or_insert_with(|| log_grid(1.2, 20, 77));
        s.focal.get_or_insert_with(|| vec![Focal::Infinity, Focal::Saturation]);
        s.users.get_or_insert(5);
        s.snr_db.get_or_insert_with(|| (-5..=25).map(|k| 2.0 * k as f64).collect());
        c
    }

    /// All constraint violations, each prefixed with its key.
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let positive = |key: &str, v: f64, errors: &mut Vec<String>| {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(format!("{key}: {v} must be positive and finite"));
            }
        };
        let a = &self.array;
        match a.num_antennas {
            0 => errors.push("array.num_antennas: must be at least 1".into()),
            n if exact_sqrt(n).is_none() => errors.push(format!(
                "array.num_antennas: {n} is not a perfect square; the array is a square grid of N = side² antennas"
            )),
            _ => {}
        }
        positive("array.wavelength", a.wavelength, &mut errors);
        positive("array.antenna_area", a.area(), &mut errors);
        positive("source.distance", self.source.distance, &mut errors);
        let phi = self.source.angle_rad;
        if !(phi.abs() < std::f64::consts::FRAC_PI_2) {
            errors.push(format!("source.angle_rad: {phi} is outside the domain |φ| < π/2"));
        }
        let s = &self.sweep;
        if let Some(ns) = &s.n_list {
            if ns.is_empty() {
                errors.push("sweep.n_list: must not be empty".into());
            }
            for &n in ns {
                if n == 0 || exact_sqrt(n).is_none() {
                    errors.push(format!("sweep.n_list: {n} is not a positive perfect square"));
                }
            }
        }
        if let Some(rho) = &s.rho {
            if rho.is_empty() {
                errors.push("sweep.rho: must not be empty".into());
            }
            for &r in rho {
                if !(r >= 0.0 && r.is_finite()) {
                    errors.push(format!("sweep.rho: {r} must be finite and non-negative"));
                }
            }
        }
        if let Some(ds) = &s.d_over_df {
            if ds.is_empty() {
                errors.push("sweep.d_over_df: must not be empty".into());
            }
            for &d in ds {
                positive("sweep.d_over_df", d, &mut errors);
            }
        }
        if let Some(f) = &s.focal {
            if f.is_empty() {
                errors.push("sweep.focal: must not be empty".into());
            }
        }
        if s.users == Some(0) {
            errors.push("sweep.users: at least one user is required".into());
        }
        if let Some(snr) = &s.snr_db {
            if snr.is_empty() {
                errors.push("sweep.snr_db: must not be empty".into());
            }
            if snr.iter().any(|v| !v.is_finite()) {
                errors.push("sweep.snr_db: values must be finite".into());
            }
        }
        let q = &self.quadrature;
        if !(q.rel_tol > 0.0 && q.rel_tol < 1.0) {
            errors.push(format!("quadrature.rel_tol: {} must lie in (0, 1)", q.rel_tol));
        }
        if !(q.abs_tol >= 0.0 && q.abs_tol.is_finite()) {
            errors.push(format!("quadrature.abs_tol: {} must be finite and non-negative", q.abs_tol));
        }
        if q.min_order == 0 || q.max_order < q.min_order {
            errors.push(format!(
                "quadrature.max_order: {} must be at least min_order = {} (and min_order ≥ 1)",
                q.max_order, q.min_order
            ));
        }
        positive("quadrature.nodes_per_wavelength", q.nodes_per_wavelength, &mut errors);
        errors
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.experiment, Experiment::GainSweep);
        assert!(c.validate().is_empty());
        assert!(c.normalized().validate().is_empty());
    }

    #[test]
    fn normalized_config_round_trips() {
        let c = ExperimentConfig::default().normalized();
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn all_errors_reported_together() {
        let c = ExperimentConfig::from_toml(
            "[array]\nnum_antennas = 10\n[source]\nangle_rad = 1.658\n[sweep]\nusers = 0\n",
        )
        .unwrap();
        let errors = c.validate();
        assert_eq!(errors.len(), 3, "{errors:?}");
        assert!(errors[0].starts_with("array.num_antennas") && errors[0].contains("perfect square"));
        assert!(errors[1].starts_with("source.angle_rad") && errors[1].contains("π/2"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml("[array]\nnum_antenas = 4\n").unwrap_err();
        assert!(err.to_string().contains("num_antenas"));
    }

    #[test]
    fn focal_points_parse() {
        assert_eq!("inf".parse::<Focal>().unwrap(), Focal::Infinity);
        assert_eq!("d_B".parse::<Focal>().unwrap(), Focal::Saturation);
        assert_eq!("d_FA/20".parse::<Focal>().unwrap(), Focal::ArrayFraunhofer(20.0));
        assert_eq!("7.5".parse::<Focal>().unwrap(), Focal::Metres(7.5));
        assert!("-1".parse::<Focal>().is_err());
        assert!("d_FA/0".parse::<Focal>().is_err());
        for f in ["inf", "d_B", "d_FA", "d_FA/20", "7.5"] {
            assert_eq!(f.parse::<Focal>().unwrap().to_string(), f);
        }
    }

    #[test]
    fn default_grids() {
        let c = ExperimentConfig::default().normalized();
        let ns = c.sweep.n_list.unwrap();
        assert_eq!(ns[0], 1);
        assert_eq!(*ns.last().unwrap(), 1_000_000_000_000);
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
        assert!((c.array.antenna_area.unwrap() - 0.000625).abs() < 1e-18);
    }
}
