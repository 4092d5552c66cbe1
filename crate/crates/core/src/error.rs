use thiserror::Error;

/// Errors produced by the channel models and the multi-user machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The antenna count must be a perfect square so the grid is `√N × √N`.
    #[error("N = {0} is not a perfect square (the array is a √N × √N grid)")]
    NotPerfectSquare(u64),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("antenna index {index} out of range 1..={count}")]
    IndexOutOfRange { index: usize, count: usize },

    /// The polar angle must satisfy |φ| < π/2.
    #[error("angle φ = {0} rad is outside the open interval (-π/2, π/2)")]
    AngleDomain(f64),

    /// The Green-function field model only holds away from the source.
    #[error(
        "distance {distance} m is inside the reactive near-field guard of {limit} m \
         (field model needs ‖p_r − p_t‖ ≥ {multiple}λ)"
    )]
    ReactiveNearField {
        distance: f64,
        limit: f64,
        multiple: f64,
    },

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },

    #[error("channel vector has zero norm")]
    DegenerateChannel,

    #[error("channel matrix is rank deficient: users {0} and {1} are (nearly) collinear")]
    SingularChannel(usize, usize),

    #[error("precoding needs K ≤ N, got K = {users} users for N = {antennas} antennas")]
    TooManyUsers { users: usize, antennas: usize },

    #[error("all effective gains are zero; nothing to allocate power to")]
    NoSignal,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
