//! Planar array layout and source placement.
//!
//! The array lies in the XY-plane, centred on the origin, with `N` square
//! antennas of side `a = √A` tiling a `√N × √N` grid edge to edge. Antennas
//! are numbered from 1, left to right, row by row from the top.

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::quadrature::Rect;

/// A point in space, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const ORIGIN: Point = Point::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Integer square root, `None` unless `n` is a perfect square.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Planar ELAA geometry plus the carrier wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArraySpec", into = "RawArraySpec")]
pub struct ArraySpec {
    num_antennas: u64,
    per_side: u64,
    antenna_area: f64,
    wavelength: f64,
}

#[derive(Serialize, Deserialize)]
struct RawArraySpec {
    num_antennas: u64,
    antenna_area: f64,
    wavelength: f64,
}

impl TryFrom<RawArraySpec> for ArraySpec {
    type Error = Error;

    fn try_from(raw: RawArraySpec) -> Result<Self> {
        ArraySpec::new(raw.num_antennas, raw.antenna_area, raw.wavelength)
    }
}

impl From<ArraySpec> for RawArraySpec {
    fn from(spec: ArraySpec) -> Self {
        RawArraySpec {
            num_antennas: spec.num_antennas,
            antenna_area: spec.antenna_area,
            wavelength: spec.wavelength,
        }
    }
}

impl ArraySpec {
    pub fn new(num_antennas: u64, antenna_area: f64, wavelength: f64) -> Result<Self> {
        let per_side = exact_sqrt(num_antennas)
            .filter(|&s| s > 0)
            .ok_or(Error::NotPerfectSquare(num_antennas))?;
        Ok(Self {
            num_antennas,
            per_side,
            antenna_area: positive("antenna_area", antenna_area)?,
            wavelength: positive("wavelength", wavelength)?,
        })
    }

    /// Largest perfect-square array of `antenna_area` antennas whose total
    /// area does not exceed `array_area`. The achieved area is
    /// [`ArraySpec::array_area`].
    pub fn from_target_area(array_area: f64, antenna_area: f64, wavelength: f64) -> Result<Self> {
        positive("array_area", array_area)?;
        positive("antenna_area", antenna_area)?;
        let per_side = (array_area / antenna_area).sqrt().floor() as u64;
        if per_side == 0 {
            return Err(Error::InvalidParameter {
                name: "array_area",
                value: array_area,
                reason: "smaller than a single antenna",
            });
        }
        Self::new(per_side * per_side, antenna_area, wavelength)
    }

    pub fn num_antennas(&self) -> u64 {
        self.num_antennas
    }

    /// Antennas per row (and per column).
    pub fn per_side(&self) -> u64 {
        self.per_side
    }

    pub fn antenna_area(&self) -> f64 {
        self.antenna_area
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Antenna side length `a = √A`.
    pub fn antenna_side(&self) -> f64 {
        self.antenna_area.sqrt()
    }

    /// Side length of the whole array, `√(NA)`.
    pub fn array_side(&self) -> f64 {
        self.per_side as f64 * self.antenna_side()
    }

    pub fn array_area(&self) -> f64 {
        self.num_antennas as f64 * self.antenna_area
    }

    /// Antenna diagonal `D = √(2A)` and array diagonal `W = √(2NA)`.
    pub fn diagonals(&self) -> (f64, f64) {
        array_diagonals(self.num_antennas, self.antenna_area)
    }

    pub fn antenna_center(&self, n: usize) -> Result<Point> {
        if n == 0 || n as u64 > self.num_antennas {
            return Err(Error::IndexOutOfRange {
                index: n,
                count: self.num_antennas as usize,
            });
        }
        let side = self.per_side as f64;
        let a = self.antenna_side();
        let offset = 0.5 * (side - 1.0) * a;
        let col = ((n - 1) as u64 % self.per_side) as f64;
        let row = ((n - 1) as u64 / self.per_side) as f64;
        Ok(Point::new(-offset + a * col, offset - a * row, 0.0))
    }

    pub fn antenna_region(&self, n: usize) -> Result<AntennaRegion> {
        Ok(AntennaRegion {
            index: n,
            center: self.antenna_center(n)?,
            side: self.antenna_side(),
        })
    }

    /// All antenna regions in index order.
    pub fn regions(&self) -> impl Iterator<Item = AntennaRegion> + '_ {
        (1..=self.num_antennas as usize).map(|n| self.antenna_region(n).expect("index in range"))
    }

    /// The whole aperture as one rectangle.
    pub fn aperture(&self) -> Rect {
        Rect::centered_square(0.0, 0.0, self.array_side())
    }
}

/// `(D, W)` for `n` antennas of area `antenna_area`.
pub fn array_diagonals(n: u64, antenna_area: f64) -> (f64, f64) {
    let d = (2.0 * antenna_area).sqrt();
    (d, d * (n as f64).sqrt())
}

/// The square patch covered by antenna `index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaRegion {
    pub index: usize,
    pub center: Point,
    pub side: f64,
}

impl AntennaRegion {
    pub fn rect(&self) -> Rect {
        Rect::centered_square(self.center.x, self.center.y, self.side)
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    /// Shortest distance from `p` to any point of the patch.
    pub fn min_distance(&self, p: &Point) -> f64 {
        let h = 0.5 * self.side;
        let dx = ((p.x - self.center.x).abs() - h).max(0.0);
        let dy = ((p.y - self.center.y).abs() - h).max(0.0);
        (dx * dx + dy * dy + p.z * p.z).sqrt()
    }
}

/// Transmitter (or user) location in front of the array, `z = d > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourcePoint {
    position: Point,
}

impl SourcePoint {
    pub fn cartesian(x: f64, y: f64, d: f64) -> Result<Self> {
        positive("d", d)?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "position",
                value: if x.is_finite() { y } else { x },
                reason: "must be finite",
            });
        }
        Ok(Self {
            position: Point::new(x, y, d),
        })
    }

    /// Point at distance `d` from the array centre and angle `phi` from
    /// broadside in the XZ-plane: `(d sin φ, 0, d cos φ)`.
    pub fn from_polar(d: f64, phi: f64) -> Result<Self> {
        positive("d", d)?;
        check_angle(phi)?;
        Self::cartesian(d * phi.sin(), 0.0, d * phi.cos())
    }

    /// Broadside point `(0, 0, d)`.
    pub fn broadside(d: f64) -> Result<Self> {
        Self::cartesian(0.0, 0.0, d)
    }

    pub fn position(&self) -> Point {
        self.position
    }

    /// Distance to the array plane.
    pub fn height(&self) -> f64 {
        self.position.z
    }
}

pub(crate) fn check_angle(phi: f64) -> Result<f64> {
    if phi.is_finite() && phi.abs() < std::f64::consts::FRAC_PI_2 {
        Ok(phi)
    } else {
        Err(Error::AngleDomain(phi))
    }
}
