mod common;

use std::f64::consts::PI;

use elaa::gain::{
    exact_gain_numeric, farfield_gain, partial_property_gain, scaling_law_sweep, GainContext, GainModel, GainReport,
    PropertySet,
};
use elaa::geometry::{ArraySpec, SourcePoint};
use elaa::{alpha_total, friis_gain, xi_total, zeta_bound, Point, QuadratureConfig};
use proptest::prelude::*;

use common::simpson_2d;

const LAMBDA: f64 = 0.1;

fn area() -> f64 {
    (LAMBDA / 4.0).powi(2)
}

fn exact_density(d: f64) -> impl Fn(f64, f64) -> f64 {
    move |x, y| {
        let r2 = x * x + y * y + d * d;
        d * (x * x + d * d) / (4.0 * PI * r2.powf(2.5))
    }
}

/// Total gain of the 2.5 m × 2.5 m aperture at 20 m, by brute-force 2-D
/// integration of the received power density.
const ALPHA_1E4_AT_20M: f64 = 1.236_958_632_201_903_7e-3;

#[test]
fn alpha_matches_brute_force_integration() {
    let d = 20.0;
    let half = 1.25;
    let brute = simpson_2d(exact_density(d), (-half, half), (-half, half), 400);
    assert!((brute / ALPHA_1E4_AT_20M - 1.0).abs() < 1e-12, "{brute}");
    let closed = alpha_total(d, 10_000, 0.025 * 0.025);
    assert!((closed / ALPHA_1E4_AT_20M - 1.0).abs() < 1e-13);
}

#[test]
fn graded_quadrature_reproduces_alpha_at_short_range() {
    let q = QuadratureConfig::default();
    for (d, n) in [(0.05, 10_000u64), (2.0, 1_000_000), (20.0, 400)] {
        let numeric = exact_gain_numeric(d, n, area(), &q).unwrap();
        assert!((numeric / alpha_total(d, n, area()) - 1.0).abs() < 1e-8, "d={d} n={n}");
    }
}

#[test]
fn effective_area_surrogate_has_closed_form() {
    // ∬ d/(4π r³) over an L×L square = (1/π) atan(L² / (4d √(d² + L²/2)))
    let q = QuadratureConfig::default();
    for (d, n) in [(20.0, 10_000u64), (20.0, 100_000_000), (1.0, 1_000_000)] {
        let l = (n as f64 * area()).sqrt();
        let oracle = (l * l / (4.0 * d * (d * d + l * l / 2.0).sqrt())).atan() / PI;
        let got = partial_property_gain(d, n, area(), PropertySet::PathlossEffectiveArea, &q).unwrap();
        assert!((got / oracle - 1.0).abs() < 1e-8);
    }
}

#[test]
fn small_aperture_models_agree_with_friis() {
    let q = QuadratureConfig::default();
    let n = 64;
    let d = 10.0 * (2.0 * n as f64 * area()).sqrt();
    let nb = n as f64 * friis_gain(area(), d);
    for model in [GainModel::Exact, GainModel::Properties12, GainModel::Property1, GainModel::Farfield] {
        let ctx = GainContext { d, phi: 0.0, n, area: area() };
        let g = GainReport::evaluate(ctx, model, &q).unwrap().value;
        assert!((g / nb - 1.0).abs() < 0.01, "{model:?}");
    }
}

#[test]
fn farfield_within_one_percent_beyond_ten_diagonals() {
    for n in [1u64, 100, 2_500] {
        for phi in [0.0, 0.4, -1.0, 1.3] {
            let diag = (2.0 * n as f64 * area()).sqrt();
            let d = 10.0 * diag / f64::cos(phi);
            let ff = farfield_gain(d, phi, n, area()).unwrap();
            let xi = xi_total(d, phi, n, area()).unwrap();
            assert!((ff / xi - 1.0).abs() < 0.01, "n={n} phi={phi}");
        }
    }
}

#[test]
fn summed_per_antenna_bounds_equal_whole_aperture() {
    let spec = ArraySpec::new(400, area(), LAMBDA).unwrap();
    let a = spec.antenna_side();
    for src in [SourcePoint::broadside(0.7).unwrap(), SourcePoint::cartesian(0.4, -1.1, 0.3).unwrap()] {
        let sum: f64 = spec.regions().map(|r| zeta_bound(&src, r.center, a)).sum();
        let whole = zeta_bound(&src, Point::ORIGIN, spec.array_side());
        assert!((sum / whole - 1.0).abs() < 1e-12);
    }
}

#[test]
fn scaling_law_saturates_and_decays() {
    let n_list: Vec<u64> = (0..=12).map(|e| 10u64.pow(e)).collect();
    let p = 1.0 / alpha_total(20.0, 1, area());
    let flat = scaling_law_sweep(20.0, area(), 0.0, p, 1.0, &n_list).unwrap();
    let last = flat.points.last().unwrap().1;
    assert!(last < p / 3.0 && last > 0.99 * p / 3.0);
    let decay = scaling_law_sweep(20.0, area(), 0.5, p, 1.0, &n_list).unwrap();
    let tail: Vec<f64> = decay.points[8..].iter().map(|x| x.1).collect();
    assert!(tail.windows(2).all(|w| w[1] < w[0]));
    // √N growth in the far field: +1.5 dB per doubling
    let half = scaling_law_sweep(20.0, area(), 0.5, p, 1.0, &[16, 32]).unwrap();
    let step = 10.0 * (half.points[1].1 / half.points[0].1).log10();
    assert!((step - 1.505).abs() < 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_bounded_and_monotone(d in 0.01f64..1e3, n in 1u64..1_000_000_000, a in 1e-6f64..1.0) {
        let v = alpha_total(d, n, a);
        prop_assert!(v > 0.0 && v < 1.0 / 3.0);
        prop_assert!(alpha_total(d, n + 1, a) > v);
        prop_assert!(alpha_total(d * 1.01, n, a) < v);
    }

    #[test]
    fn xi_depends_on_total_area_only(d in 0.1f64..100.0, phi in -1.5f64..1.5, n in 1u64..100_000, a in 1e-5f64..0.1, k in 1u64..50) {
        let x1 = xi_total(d, phi, n, a).unwrap();
        let x2 = xi_total(d, phi, n * k * k, a / (k * k) as f64).unwrap();
        prop_assert!((x1 / x2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn xi_at_broadside_is_alpha(d in 0.01f64..1e3, n in 1u64..1_000_000_000, a in 1e-6f64..1.0) {
        let xi = xi_total(d, 0.0, n, a).unwrap();
        let al = alpha_total(d, n, a);
        prop_assert!((xi - al).abs() <= 8.0 * f64::EPSILON * al);
    }

    #[test]
    fn model_ordering(d in 0.5f64..50.0, side in 1u64..3_000) {
        let q = QuadratureConfig::default();
        let n = side * side;
        let exact = alpha_total(d, n, area());
        let p12 = partial_property_gain(d, n, area(), PropertySet::PathlossEffectiveArea, &q).unwrap();
        let p1 = partial_property_gain(d, n, area(), PropertySet::Pathloss, &q).unwrap();
        prop_assert!(exact <= p12 * (1.0 + 1e-9));
        prop_assert!(p12 <= p1 * (1.0 + 1e-9));
    }
}
