//! Unit conversions.
//!
//! Every configuration surface speaks ordinary frequencies in kHz (the
//! `Ω/2π = 28 kHz` style), times in ms and lengths in μm. Internally all
//! frequencies are angular (rad/s) and all times are seconds. These
//! functions are the only place the factor 2π·10³ appears.

use std::f64::consts::TAU;

const HZ_PER_KHZ: f64 = 1e3;
const S_PER_MS: f64 = 1e-3;

/// Ordinary frequency in kHz to angular frequency in rad/s.
#[inline]
pub fn khz_to_rad_s(nu_khz: f64) -> f64 {
    nu_khz * (TAU * HZ_PER_KHZ)
}

/// Angular frequency in rad/s to ordinary frequency in kHz.
#[inline]
pub fn rad_s_to_khz(omega: f64) -> f64 {
    omega / (TAU * HZ_PER_KHZ)
}

/// MHz to rad/s.
#[inline]
pub fn mhz_to_rad_s(nu_mhz: f64) -> f64 {
    khz_to_rad_s(nu_mhz * 1e3)
}

#[inline]
pub fn rad_s_to_mhz(omega: f64) -> f64 {
    rad_s_to_khz(omega) * 1e-3
}

#[inline]
pub fn ms_to_s(t_ms: f64) -> f64 {
    t_ms * S_PER_MS
}

#[inline]
pub fn s_to_ms(t_s: f64) -> f64 {
    t_s / S_PER_MS
}

/// Rates given per ms (1/ms) to 1/s.
#[inline]
pub fn per_ms_to_per_s(rate: f64) -> f64 {
    rate / S_PER_MS
}

#[inline]
pub fn per_s_to_per_ms(rate: f64) -> f64 {
    rate * S_PER_MS
}
