//! Unit conversions shared by the physics modules.
//!
//! Every dB/linear conversion in the crate goes through these helpers.

/// Speed of light used for the carrier wavelength, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Power in watts expressed in dBm.
#[inline]
pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}

#[inline]
pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

#[inline]
pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}
