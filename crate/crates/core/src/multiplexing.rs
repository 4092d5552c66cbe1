//! Depth-domain multiplexing: users on a common broadside line, separated
//! only by distance, served with matched-filter or zero-forcing precoding.
//!
//! Noise power is normalised to one throughout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beams::{depth_of_focus, DepthOfFocus, Distance};
use crate::error::{positive, Error, Result};
use crate::field::{channel_vector, ChannelModel, ChannelVector};
use crate::geometry::{ArraySpec, SourcePoint};
use crate::quadrature::QuadratureConfig;
use crate::regions::RegionReport;
use crate::units::db_to_power;

/// Relative pivot size below which the channel matrix counts as singular.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// User distances `d_1 = d_FA`, `d_k = d_FA / (20(k − 1))` for `k ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocalLadder {
    pub d_fa: f64,
    pub distances: Vec<f64>,
}

impl FocalLadder {
    pub fn new(d_fa: f64, users: usize) -> Result<Self> {
        positive("d_fa", d_fa)?;
        if users == 0 {
            return Err(Error::InvalidParameter {
                name: "users",
                value: 0.0,
                reason: "at least one user is required",
            });
        }
        let distances = (1..=users)
            .map(|k| if k == 1 { d_fa } else { d_fa / (20.0 * (k - 1) as f64) })
            .collect();
        Ok(Self { d_fa, distances })
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    /// Focal point of beam `k` (0-based). The outermost user lies at the
    /// Fraunhofer array distance, where focusing and far-field beams differ
    /// negligibly, so its beam is the unfocused one.
    pub fn beam_focus(&self, k: usize) -> Distance {
        if k == 0 {
            Distance::Infinity
        } else {
            Distance::Finite(self.distances[k])
        }
    }

    /// Depth-of-focus interval of every beam, in user order.
    pub fn intervals(&self) -> Vec<DepthOfFocus> {
        (0..self.len())
            .map(|k| depth_of_focus(self.beam_focus(k), self.d_fa).expect("ladder is valid"))
            .collect()
    }

    /// Distances where consecutive beams hand over: the upper limit of beam
    /// `k + 1` paired with the lower limit of beam `k`.
    pub fn junctions(&self) -> Vec<(f64, f64)> {
        let iv = self.intervals();
        iv.windows(2).map(|w| (w[1].upper.as_f64(), w[0].lower)).collect()
    }
}

fn to_vector(h: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(h)
}

fn norm(h: &[Complex64]) -> f64 {
    h.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `hᵀw`, the complex gain of precoder `w` towards channel `h`.
pub fn effective_channel(h: &[Complex64], w: &[Complex64]) -> Complex64 {
    h.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Matched-filter precoder `h* / ‖h‖`.
pub fn mf_precoder(h: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = norm(h);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::DegenerateChannel);
    }
    Ok(h.iter().map(|c| c.conj() / n).collect())
}

/// Uplink SNR with matched-filter combining `v = h`:
/// `|vᴴh|² p / (σ² ‖v‖²)`.
pub fn uplink_mf_snr(h: &[Complex64], power: f64, noise: f64) -> f64 {
    let v = to_vector(h);
    let hv = to_vector(h);
    let signal = v.dotc(&hv).norm_sqr();
    signal * power / (noise * v.norm_squared())
}

/// Downlink SNR `|hᵀw|² p / σ²` of a single-user precoder.
pub fn downlink_snr(h: &[Complex64], w: &[Complex64], power: f64, noise: f64) -> f64 {
    effective_channel(h, w).norm_sqr() * power / noise
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecoderScheme {
    Mf,
    Zf,
}

/// Unit-norm precoders with the per-user effective gains `|h_kᵀ w_k|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecoderSet {
    pub scheme: PrecoderScheme,
    pub weights: Vec<Vec<Complex64>>,
    pub gains: Vec<f64>,
}

impl PrecoderSet {
    /// Largest `|h_jᵀ w_k| / ‖h_j‖` over `j ≠ k`.
    pub fn max_leakage(&self, channels: &[&[Complex64]]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, h) in channels.iter().enumerate() {
            let nh = norm(h);
            for (k, w) in self.weights.iter().enumerate() {
                if j != k {
                    worst = worst.max(effective_channel(h, w).norm() / nh);
                }
            }
        }
        worst
    }
}

pub fn mf_precoders(channels: &[&[Complex64]]) -> Result<PrecoderSet> {
    let weights = channels.iter().map(|h| mf_precoder(h)).collect::<Result<Vec<_>>>()?;
    let gains = channels.iter().map(|h| norm(h).powi(2)).collect();
    Ok(PrecoderSet {
        scheme: PrecoderScheme::Mf,
        weights,
        gains,
    })
}

fn most_correlated_pair(channels: &[&[Complex64]]) -> (usize, usize) {
    let mut best = (0, 1, -1.0);
    for j in 0..channels.len() {
        for k in j + 1..channels.len() {
            let c = to_vector(channels[j]).dotc(&to_vector(channels[k])).norm()
                / (norm(channels[j]) * norm(channels[k]));
            if c > best.2 {
                best = (j, k, c);
            }
        }
    }
    (best.0 + 1, best.1 + 1)
}

/// Zero-forcing precoders: the columns of the right pseudo-inverse of the
/// `K × N` matrix with rows `h_kᵀ`, each scaled to unit norm.
///
/// With `Hᴴ = QR`, the pseudo-inverse is `Q R⁻ᴴ`, so `h_kᵀ w_k = 1` before
/// normalisation and the effective gain is `1 / ‖w_k‖²`.
pub fn zf_precoders(channels: &[&[Complex64]]) -> Result<PrecoderSet> {
    let k = channels.len();
    let n = channels.first().map_or(0, |h| h.len());
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "users",
            value: 0.0,
            reason: "at least one user is required",
        });
    }
    if k > n {
        return Err(Error::TooManyUsers { users: k, antennas: n });
    }
    if channels.iter().any(|h| h.len() != n) {
        return Err(Error::InvalidParameter {
            name: "channel length",
            value: n as f64,
            reason: "all users must see the same number of antennas",
        });
    }
    let norms: Vec<f64> = channels.iter().map(|h| norm(h)).collect();
    if norms.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::DegenerateChannel);
    }
    // columns of Hᴴ are h_k*
    let hh = DMatrix::from_fn(n, k, |i, j| channels[j][i].conj());
    let qr = hh.qr();
    let r = qr.r();
    for i in 0..k {
        if r[(i, i)].norm() < RANK_TOLERANCE * norms[i] {
            let (a, b) = most_correlated_pair(channels);
            return Err(Error::SingularChannel(a, b));
        }
    }
    let q = qr.q();
    // X = R⁻ᴴ solves Rᴴ X = I (lower triangular)
    let rh = r.adjoint();
    let x = rh
        .solve_lower_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| {
            let (a, b) = most_correlated_pair(channels);
            Error::SingularChannel(a, b)
        })?;
    let w = q * x;
    let mut weights = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);
    for col in w.column_iter() {
        let nw = col.norm();
        weights.push(col.iter().map(|c| c / nw).collect());
        gains.push(1.0 / (nw * nw));
    }
    Ok(PrecoderSet {
        scheme: PrecoderScheme::Zf,
        weights,
        gains,
    })
}

/// Sum-rate optimal powers for parallel channels with gains `g_k`:
/// `p_k = max(0, μ − σ²/g_k)` with `Σ p_k = P_total`.
pub fn waterfilling(gains: &[f64], total_power: f64, noise: f64) -> Result<Vec<f64>> {
    positive("total_power", total_power)?;
    positive("noise", noise)?;
    if let Some(&g) = gains.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
        return Err(Error::InvalidParameter {
            name: "gain",
            value: g,
            reason: "effective gains must be finite and non-negative",
        });
    }
    let mut floors: Vec<(usize, f64)> = gains
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > 0.0)
        .map(|(i, &g)| (i, noise / g))
        .collect();
    if floors.is_empty() {
        return Err(Error::NoSignal);
    }
    floors.sort_by(|a, b| a.1.total_cmp(&b.1));
    // largest active set whose water level clears every active floor
    let mut level = 0.0;
    let mut active = 0;
    let mut sum = 0.0;
    for (m, &(_, floor)) in floors.iter().enumerate() {
        let candidate = (total_power + sum + floor) / (m + 1) as f64;
        if candidate <= floor {
            break;
        }
        sum += floor;
        level = candidate;
        active = m + 1;
    }
    let mut powers = vec![0.0; gains.len()];
    for &(i, floor) in &floors[..active] {
        powers[i] = level - floor;
    }
    Ok(powers)
}

/// `Σ log₂(1 + g_k p_k / σ²)`.
pub fn parallel_rate(gains: &[f64], powers: &[f64], noise: f64) -> f64 {
    gains.iter().zip(powers).map(|(g, p)| (g * p / noise).log2_1p()).sum()
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Zero-forcing with waterfilling, all users served simultaneously.
    Zf,
    /// One user per time slot with full power and matched filtering.
    Scheduling,
}

/// Spectral efficiencies in bit/s/Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeResult {
    pub scheme: Scheme,
    pub per_user: Vec<f64>,
    pub sum: f64,
    /// Average transmit power per user, relative to the noise power.
    pub powers: Vec<f64>,
    /// Reference SNR as a linear ratio.
    pub snr_ref: f64,
}

/// Users on the broadside line at the ladder distances, with their channels.
#[derive(Debug, Clone)]
pub struct MultiplexScenario {
    pub spec: ArraySpec,
    pub ladder: FocalLadder,
    pub channels: Vec<ChannelVector>,
    zf: PrecoderSet,
}

impl MultiplexScenario {
    /// Builds the scenario for `users` ladder users at the array's own
    /// Fraunhofer array distance.
    pub fn new(spec: ArraySpec, users: usize, model: ChannelModel, quad: &QuadratureConfig) -> Result<Self> {
        let ladder = FocalLadder::new(RegionReport::new(&spec).d_fa, users)?;
        Self::with_ladder(spec, ladder, model, quad)
    }

    pub fn with_ladder(
        spec: ArraySpec,
        ladder: FocalLadder,
        model: ChannelModel,
        quad: &QuadratureConfig,
    ) -> Result<Self> {
        let channels = ladder
            .distances
            .iter()
            .map(|&d| channel_vector(&spec, &SourcePoint::broadside(d)?, model, quad))
            .collect::<Result<Vec<_>>>()?;
        let zf = zf_precoders(&slices(&channels))?;
        Ok(Self {
            spec,
            ladder,
            channels,
            zf,
        })
    }

    pub fn zf(&self) -> &PrecoderSet {
        &self.zf
    }

    /// Residual inter-user leakage of the ZF precoders.
    pub fn zf_leakage(&self) -> f64 {
        self.zf.max_leakage(&slices(&self.channels))
    }

    /// Total power that gives the outermost user `snr_ref` when it receives
    /// all of it with matched filtering.
    pub fn reference_power(&self, snr_ref: f64) -> f64 {
        snr_ref / self.channels[0].norm_sqr()
    }

    pub fn sum_se(&self, scheme: Scheme, snr_ref_db: f64) -> Result<SeResult> {
        let snr_ref = db_to_power(snr_ref_db);
        let p = self.reference_power(snr_ref);
        let k = self.channels.len();
        let (per_user, powers) = match scheme {
            Scheme::Zf => {
                let powers = waterfilling(&self.zf.gains, p, 1.0)?;
                let se: Vec<f64> = self.zf.gains.iter().zip(&powers).map(|(g, q)| (g * q).log2_1p()).collect();
                (se, powers)
            }
            Scheme::Scheduling => {
                let share = 1.0 / k as f64;
                let se: Vec<f64> = self.channels.iter().map(|h| share * (h.norm_sqr() * p).log2_1p()).collect();
                (se, vec![p * share; k])
            }
        };
        Ok(SeResult {
            scheme,
            sum: per_user.iter().sum(),
            per_user,
            powers,
            snr_ref,
        })
    }
}

pub(crate) fn slices(channels: &[ChannelVector]) -> Vec<&[Complex64]> {
    channels.iter().map(|h| h.coefficients.as_slice()).collect()
}

/// One-shot sum SE with hybrid channels.
pub fn sum_se(spec: &ArraySpec, ladder: &FocalLadder, scheme: Scheme, snr_ref_db: f64) -> Result<SeResult> {
    MultiplexScenario::with_ladder(*spec, ladder.clone(), ChannelModel::Hybrid, &QuadratureConfig::default())?
        .sum_se(scheme, snr_ref_db)
}

/// Upper bound `π · area / λ²` on the spatial degrees of freedom.
pub fn dof_limit(array_area: f64, wavelength: f64) -> Result<f64> {
    positive("array_area", array_area)?;
    positive("wavelength", wavelength)?;
    Ok(std::f64::consts::PI * array_area / (wavelength * wavelength))
}
