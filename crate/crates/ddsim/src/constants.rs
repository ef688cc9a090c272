//! Physical constants and unit conventions.
//!
//! All Hamiltonians and propagators work internally in angular frequency
//! (rad/s). Every public interface — configuration files, CSV outputs,
//! bath files — uses plain frequency (Hz or MHz) and SI time. The
//! conversion happens exactly once, at the boundary where Hamiltonians are
//! assembled, through [`hz_to_rad`].

use std::f64::consts::TAU;

/// Electron gyromagnetic ratio over 2π, Hz/T (CODATA, g ≈ 2.0028 NV value).
pub const GAMMA_E_HZ_PER_T: f64 = 28.024_95e9;

/// ¹³C gyromagnetic ratio over 2π, Hz/T (CODATA).
pub const GAMMA_C13_HZ_PER_T: f64 = 10.7084e6;

/// μ0 / 4π in SI (T·m/A), exact in the pre-2019 convention used throughout.
pub const MU0_OVER_4PI: f64 = 1e-7;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_8e-34;

/// Conventional diamond cubic cell edge, nm.
pub const DIAMOND_CELL_NM: f64 = 0.357;

/// Plain frequency (Hz) to angular frequency (rad/s).
#[inline]
pub fn hz_to_rad(f_hz: f64) -> f64 {
    TAU * f_hz
}

/// Angular frequency (rad/s) back to plain frequency (Hz).
#[inline]
pub fn rad_to_hz(w_rad_s: f64) -> f64 {
    w_rad_s / TAU
}

/// Nuclear Larmor frequency (Hz) of ¹³C in a static field `b_field_t` (T).
#[inline]
pub fn larmor_hz(b_field_t: f64) -> f64 {
    GAMMA_C13_HZ_PER_T * b_field_t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn larmor_period_matches_field() {
        // 6.8 mT puts the ¹³C Larmor period near 13.7 μs; 1.28 mT near 73 μs.
        let tau_l_high = 1.0 / larmor_hz(6.8e-3);
        assert!((tau_l_high - 13.73e-6).abs() < 0.05e-6, "{tau_l_high}");
        let tau_l_low = 1.0 / larmor_hz(1.28e-3);
        assert!((tau_l_low - 72.96e-6).abs() < 0.3e-6, "{tau_l_low}");
    }

    #[test]
    fn round_trip_units() {
        assert!((rad_to_hz(hz_to_rad(12.5e6)) - 12.5e6).abs() < 1e-3);
    }
}
