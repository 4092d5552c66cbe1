//! Decibel conversions.
//!
//! Every quantity converted here is a power ratio, so the factor is always 10.

/// Power ratio to decibels.
#[inline]
pub fn power_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Decibels to power ratio.
#[inline]
pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for db in [-70.0, -3.0, 0.0, 20.0, 50.0] {
            assert!((power_to_db(db_to_power(db)) - db).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_is_three_db() {
        assert!((power_to_db(2.0) - 3.0103).abs() < 1e-4);
    }
}
