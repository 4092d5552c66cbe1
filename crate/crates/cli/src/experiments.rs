//! One function per experiment. Each returns its data table (or JSON
//! report), the sanity checks it evaluated and the residuals it measured.

use std::collections::BTreeMap;

use elaa::beams::{crossings, depth_of_focus, gain_off_focus, Distance};
use elaa::gain::{
    calibrated_scaling_law, exact_gain_numeric, farfield_gain, partial_property_gain, PropertySet,
};
use elaa::multiplexing::{dof_limit, FocalLadder, MultiplexScenario, Scheme};
use elaa::regions::{normalized_array_gain, ArrayGainMode, RegionReport};
use elaa::units::power_to_db;
use elaa::{alpha_total, xi_total, ArraySpec, ChannelModel, QuadratureConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Focal};
use crate::output::{Cell, Check, Table};

pub enum Data {
    Csv(Table),
    Json(serde_json::Value),
}

pub struct Outcome {
    pub data: Data,
    pub checks: Vec<Check>,
    pub residuals: BTreeMap<String, f64>,
}

impl Outcome {
    fn new(data: Data) -> Self {
        Self {
            data,
            checks: Vec::new(),
            residuals: BTreeMap::new(),
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    fn residual(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.to_string(), value);
    }
}

type Result<T> = elaa::Result<T>;

/// Relative tolerance of closed-form versus quadrature comparisons.
const ORACLE_TOLERANCE: f64 = 1e-6;

/// Closed-form depth-of-focus endpoints versus numeric 0.5-crossings.
const CROSSING_TOLERANCE: f64 = 0.03;

pub(crate) fn spec(c: &ExperimentConfig) -> Result<ArraySpec> {
    ArraySpec::new(c.array.num_antennas, c.array.area(), c.array.wavelength)
}

fn diagonal(n: u64, area: f64) -> f64 {
    (2.0 * n as f64 * area).sqrt()
}

pub fn gain_sweep(c: &ExperimentConfig, quad: &QuadratureConfig) -> Result<Outcome> {
    let area = c.array.area();
    let d = c.source.distance;
    let phi = c.source.angle_rad;
    let broadside = phi == 0.0;
    let ns = c.sweep.n_list.as_deref().unwrap_or_default();
    let rows = ns
        .par_iter()
        .map(|&n| {
            let exact = xi_total(d, phi, n, area)?;
            let (p12, p1) = if broadside {
                (
                    Some(partial_property_gain(d, n, area, PropertySet::PathlossEffectiveArea, quad)?),
                    Some(partial_property_gain(d, n, area, PropertySet::Pathloss, quad)?),
                )
            } else {
                (None, None)
            };
            Ok((n, exact, p12, p1, farfield_gain(d, phi, n, area)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(["N", "diagonal_m", "gain_exact", "gain_p12", "gain_p1", "gain_farfield"]);
    let opt = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Float);
    for &(n, exact, p12, p1, ff) in &rows {
        table.push(vec![
            Cell::Int(n),
            Cell::Float(diagonal(n, area)),
            Cell::Float(exact),
            opt(p12),
            opt(p1),
            Cell::Float(ff),
        ]);
    }
    let mut out = Outcome::new(Data::Csv(table));

    let below = rows.iter().all(|r| r.1 > 0.0 && r.1 < 1.0 / 3.0);
    out.check("exact_gain_below_one_third", below, "0 < gain_exact < 1/3 on every row");
    if broadside {
        let ordered = rows.iter().all(|&(_, e, p12, p1, _)| {
            let (p12, p1) = (p12.unwrap(), p1.unwrap());
            e <= p12 * (1.0 + 1e-9) && p12 <= p1 * (1.0 + 1e-9)
        });
        out.check("model_ordering", ordered, "gain_exact ≤ gain_p12 ≤ gain_p1 on every row");

        let mut worst: f64 = 0.0;
        for &n in sample_ends(ns) {
            let numeric = exact_gain_numeric(d, n, area, quad)?;
            worst = worst.max((numeric / alpha_total(d, n, area) - 1.0).abs());
        }
        out.residual("exact_closed_form_vs_quadrature_rel", worst);
        out.check(
            "exact_closed_form_vs_quadrature",
            worst <= ORACLE_TOLERANCE,
            format!("max relative deviation {worst:.3e} ≤ {ORACLE_TOLERANCE:e}"),
        );
    }
    if let Some(&(n, exact, .., ff)) = rows.first() {
        let dev = (ff / exact - 1.0).abs();
        out.residual("farfield_vs_exact_smallest_array_rel", dev);
        if diagonal(n, area) * 10.0 <= d * phi.cos() {
            out.check(
                "farfield_agrees_for_small_array",
                dev < 0.01,
                format!("relative deviation {dev:.3e} < 1e-2 at N = {n}"),
            );
        }
    }
    Ok(out)
}

/// The first, middle and last entries of a list.
fn sample_ends<T>(v: &[T]) -> impl Iterator<Item = &T> {
    let idx = match v.len() {
        0 => vec![],
        1 => vec![0],
        2 => vec![0, 1],
        n => vec![0, n / 2, n - 1],
    };
    idx.into_iter().map(move |i| &v[i])
}

pub fn scaling_law(c: &ExperimentConfig) -> Result<Outcome> {
    let area = c.array.area();
    let d = c.source.distance;
    let ns = c.sweep.n_list.as_deref().unwrap_or_default();
    let rhos = c.sweep.rho.as_deref().unwrap_or_default();
    let mut table = Table::new(["N", "snr_db", "rho"]);
    let mut calibration: f64 = 0.0;
    let ceiling = power_to_db((1.0 / 3.0) / alpha_total(d, 1, area));
    let mut below_ceiling = true;
    for &rho in rhos {
        let curve = calibrated_scaling_law(d, area, rho, ns)?;
        for (n, db) in curve.snr_db() {
            if n == 1 {
                calibration = calibration.max(db.abs());
            }
            if rho == 0.0 && db >= ceiling {
                below_ceiling = false;
            }
            table.push(vec![Cell::Int(n), Cell::Float(db), Cell::Float(rho)]);
        }
    }
    let mut out = Outcome::new(Data::Csv(table));
    out.residual("single_antenna_snr_db", calibration);
    out.check(
        "single_antenna_calibrated",
        calibration < 1e-9,
        format!("|SNR(N = 1)| = {calibration:.3e} dB"),
    );
    out.residual("saturation_ceiling_db", ceiling);
    out.check(
        "constant_power_below_ceiling",
        below_ceiling,
        format!("ρ = 0 SNR stays below {ceiling:.4} dB"),
    );
    Ok(out)
}

pub fn array_gain(c: &ExperimentConfig, quad: &QuadratureConfig) -> Result<Outcome> {
    let spec = spec(c)?;
    let regions = RegionReport::new(&spec);
    let grid = c.sweep.d_over_df.as_deref().unwrap_or_default();
    let mut table = Table::new(["d_over_dF", "G_exact", "G_bound"]);
    let mut ordered = true;
    let mut worst_gap: f64 = 0.0;
    for &m in grid {
        let d = m * regions.d_f;
        let exact = normalized_array_gain(&spec, d, ArrayGainMode::Exact, quad)?;
        let bound = normalized_array_gain(&spec, d, ArrayGainMode::Bound, quad)?;
        ordered &= exact <= bound * (1.0 + 1e-9) && bound <= 1.0 + 1e-12;
        worst_gap = worst_gap.max(bound - exact);
        table.push(vec![Cell::Float(m), Cell::Float(exact), Cell::Float(bound)]);
    }
    let mut out = Outcome::new(Data::Csv(table));
    out.check("exact_below_bound_below_one", ordered, "G_exact ≤ G_bound ≤ 1 on every row");
    out.residual("max_bound_minus_exact", worst_gap);
    Ok(out)
}

fn beam_rows(
    table: &mut Table,
    grid: &[f64],
    d_f: f64,
    d_fa: f64,
    z: Distance,
    label: &str,
) -> Result<bool> {
    let mut bounded = true;
    for &m in grid {
        let g = gain_off_focus(m * d_f, z, d_fa)?;
        bounded &= (0.0..=1.0 + 1e-12).contains(&g);
        table.push(vec![Cell::Float(m), Cell::Float(g), Cell::Text(label.to_string())]);
    }
    Ok(bounded)
}

/// Largest relative gap between closed-form depth-of-focus endpoints and
/// numeric 0.5-crossings. Endpoints the closed form puts at infinity are
/// skipped.
fn crossing_deviation(z: Distance, d_fa: f64) -> Result<f64> {
    let closed = depth_of_focus(z, d_fa)?;
    let numeric = crossings(z, d_fa, 0.5)?;
    let mut worst = (numeric.lower / closed.lower - 1.0).abs();
    if let (Distance::Finite(u), Some(v)) = (closed.upper, numeric.upper) {
        worst = worst.max((v / u - 1.0).abs());
    }
    Ok(worst)
}

pub fn focus(c: &ExperimentConfig, focal: &[Focal]) -> Result<Outcome> {
    let spec = spec(c)?;
    let r = RegionReport::new(&spec);
    let grid = c.sweep.d_over_df.as_deref().unwrap_or_default();
    let mut table = Table::new(["d_over_dF", "gain", "focal_label"]);
    let mut bounded = true;
    let mut worst: f64 = 0.0;
    for f in focal {
        let z = f.resolve(&r);
        bounded &= beam_rows(&mut table, grid, r.d_f, r.d_fa, z, &f.to_string())?;
        worst = worst.max(crossing_deviation(z, r.d_fa)?);
    }
    let mut out = Outcome::new(Data::Csv(table));
    out.check("gain_in_unit_interval", bounded, "0 ≤ gain ≤ 1 on every row");
    out.residual("depth_of_focus_vs_numeric_crossing_rel", worst);
    out.check(
        "depth_of_focus_matches_crossings",
        worst <= CROSSING_TOLERANCE,
        format!("max relative deviation {worst:.3e} ≤ {CROSSING_TOLERANCE}"),
    );
    Ok(out)
}

fn ladder_label(ladder: &FocalLadder, k: usize) -> String {
    match ladder.beam_focus(k) {
        Distance::Infinity => Focal::Infinity.to_string(),
        Distance::Finite(z) => Focal::ArrayFraunhofer(ladder.d_fa / z).to_string(),
    }
}

pub fn multiplex(c: &ExperimentConfig) -> Result<Outcome> {
    let spec = spec(c)?;
    let r = RegionReport::new(&spec);
    let users = c.sweep.users.unwrap_or(5);
    let ladder = FocalLadder::new(r.d_fa, users)?;
    let grid = c.sweep.d_over_df.as_deref().unwrap_or_default();
    let mut table = Table::new(["d_over_dF", "gain", "focal_label"]);
    let mut bounded = true;
    for k in 0..ladder.len() {
        bounded &= beam_rows(&mut table, grid, r.d_f, r.d_fa, ladder.beam_focus(k), &ladder_label(&ladder, k))?;
    }
    let mut out = Outcome::new(Data::Csv(table));
    out.check("gain_in_unit_interval", bounded, "0 ≤ gain ≤ 1 on every row");
    let mut worst: f64 = 0.0;
    for (k, &(upper_next, lower)) in ladder.junctions().iter().enumerate() {
        for (beam, d) in [(k, lower), (k + 1, upper_next)] {
            let g = gain_off_focus(d, ladder.beam_focus(beam), r.d_fa)?;
            worst = worst.max((g - 0.5).abs());
        }
        let gap = (upper_next / lower - 1.0).abs();
        out.residual(&format!("junction_{}_{}_gap_rel", k + 1, k + 2), gap);
    }
    out.residual("junction_gain_max_deviation_from_half", worst);
    out.check(
        "junction_gains_near_half",
        worst <= 0.02,
        format!("adjoining beams give 0.5 ± {worst:.4} at every junction"),
    );
    Ok(out)
}

pub fn sum_se(c: &ExperimentConfig, quad: &QuadratureConfig) -> Result<Outcome> {
    let spec = spec(c)?;
    let users = c.sweep.users.unwrap_or(5);
    let snrs = c.sweep.snr_db.as_deref().unwrap_or_default();
    let scenario = MultiplexScenario::new(spec, users, ChannelModel::Hybrid, quad)?;
    let mut header = vec!["snr_db".to_string(), "se_zf".into(), "se_sched".into()];
    header.extend((1..=users).map(|k| format!("se_user_{k}")));
    let mut table = Table::new(header);
    let mut power_ok = true;
    let mut sums = Vec::with_capacity(snrs.len());
    let mut last_zf = None;
    for &snr in snrs {
        let zf = scenario.sum_se(Scheme::Zf, snr)?;
        let sched = scenario.sum_se(Scheme::Scheduling, snr)?;
        let p = scenario.reference_power(zf.snr_ref);
        power_ok &= (zf.powers.iter().sum::<f64>() / p - 1.0).abs() < 1e-9;
        let mut row = vec![Cell::Float(snr), Cell::Float(zf.sum), Cell::Float(sched.sum)];
        row.extend(zf.per_user.iter().map(|&v| Cell::Float(v)));
        table.push(row);
        sums.push((snr, zf.sum));
        last_zf = Some(zf);
    }
    let mut out = Outcome::new(Data::Csv(table));
    let leakage = scenario.zf_leakage();
    out.residual("zf_max_leakage", leakage);
    out.check("zf_nulls_interference", leakage <= 1e-10, format!("max leakage {leakage:.3e} ≤ 1e-10"));
    out.check("waterfilling_spends_budget", power_ok, "ZF powers sum to the reference power");
    if let Some(zf) = last_zf {
        let best = argmax(&zf.per_user);
        out.check(
            "closest_user_highest_se",
            best == users - 1,
            format!("user {} has the highest ZF SE at the top SNR", best + 1),
        );
    }
    let high: Vec<_> = sums.iter().filter(|(s, _)| *s >= 30.0).collect();
    if let [first, .., last] = high.as_slice() {
        let streams = (last.1 - first.1) / ((last.0 - first.0) / 10.0 * 10f64.log2());
        out.residual("zf_high_snr_streams", streams);
        out.check(
            "zf_slope_matches_user_count",
            (streams / users as f64 - 1.0).abs() <= 0.05,
            format!("{streams:.4} bit/s/Hz per SNR-doubling exponent over ≥ 30 dB, {users} users"),
        );
    }
    Ok(out)
}

fn argmax(v: &[f64]) -> usize {
    v.iter().enumerate().fold(0, |best, (i, x)| if *x > v[best] { i } else { best })
}

#[derive(Serialize)]
struct DistanceReport {
    #[serde(rename = "d_F")]
    d_f: f64,
    #[serde(rename = "d_B")]
    d_b: f64,
    #[serde(rename = "d_FA")]
    d_fa: f64,
    #[serde(rename = "W")]
    w: f64,
    #[serde(rename = "D")]
    d: f64,
    dof_limit: f64,
}

pub fn distances(c: &ExperimentConfig) -> Result<Outcome> {
    let spec = spec(c)?;
    let r = RegionReport::new(&spec);
    let report = DistanceReport {
        d_f: r.d_f,
        d_b: r.d_b,
        d_fa: r.d_fa,
        w: r.w,
        d: r.d,
        dof_limit: dof_limit(spec.array_area(), spec.wavelength())?,
    };
    let mut out = Outcome::new(Data::Json(serde_json::to_value(report).expect("plain numbers")));
    let identity = (r.d_fa / r.d_b) / (r.d * (spec.num_antennas() as f64).sqrt() / spec.wavelength());
    out.residual("d_FA_over_d_B_identity_rel", (identity - 1.0).abs());
    out.check(
        "distance_identity",
        (identity - 1.0).abs() < 1e-12,
        "d_FA / d_B = D√N / λ",
    );
    Ok(out)
}
