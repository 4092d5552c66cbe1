//! Radiative near-field line-of-sight channels between a point source and a
//! planar extremely large aperture array (ELAA).
//!
//! The crate covers exact field-integral channel coefficients, closed-form
//! gain bounds and their far-field limits, field-region distances, finite
//! depth beam focusing, and depth-domain multi-user multiplexing.
//!
//! Lengths are in metres, angles in radians, and every gain is a
//! dimensionless power ratio.

pub mod beams;
pub mod error;
pub mod field;
pub mod gain;
pub mod geometry;
pub mod multiplexing;
pub mod quadrature;
pub mod regions;
pub mod units;

pub use error::{Error, Result};
pub use field::{channel_vector, ChannelModel, ChannelVector};
pub use gain::{alpha_total, friis_gain, xi_total, zeta_bound, GainModel, GainReport};
pub use geometry::{ArraySpec, Point, SourcePoint};
pub use quadrature::QuadratureConfig;
