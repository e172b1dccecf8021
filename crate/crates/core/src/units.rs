//! Dimensionless unit system.
//!
//! Frequencies are measured in units of the transverse resonance frequency
//! `omega_T` of the sphere material and lengths in units of
//! `lambda_T = 2 pi c / omega_T`. With these units the vacuum wave number is
//! `k = 2 pi omega`. Rates are reported in units of the free-space decay rate
//! `Gamma_0` evaluated at the frequency in question.

use std::f64::consts::PI;

/// Vacuum wave number (in `1/lambda_T`) for a frequency in units of `omega_T`.
#[inline]
pub fn wavenumber(omega: f64) -> f64 {
    2.0 * PI * omega
}

/// Conversion factor from `d* . G . d` (units `1/lambda_T`) to a coupling in
/// units of `Gamma_0(omega)`: `K / Gamma_0 = i * factor * d* . G . d`.
#[inline]
pub fn coupling_prefactor(omega: f64) -> f64 {
    3.0 * PI / wavenumber(omega)
}
