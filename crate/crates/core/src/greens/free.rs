use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::DyadicGreenValue;
use crate::error::{Error, Result};
use crate::units::wavenumber;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const SERIES_BELOW: f64 = 0.5;

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    Ok(())
}

/// Radial functions of the dyad, `G = e^{ix}/(4 pi R) [f1 I + f2 RR]` with
/// the exponential folded in: returns `(e^{ix} f1, e^{ix} f2)`.
fn radial_factors(x: f64) -> (Complex64, Complex64) {
    if x < SERIES_BELOW {
        // e^{ix}(x^2 + ix - 1) = -sum (m-1)^2 (ix)^m / m!
        // e^{ix}(3 - 3ix - x^2) = sum (m-1)(m-3) (ix)^m / m!
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0); // (ix)^m / m!
        for m in 0..30 {
            let mf = m as f64;
            a -= (mf - 1.0) * (mf - 1.0) * p;
            b += (mf - 1.0) * (mf - 3.0) * p;
            p *= I * x / (mf + 1.0);
        }
        let x2 = x * x;
        (a / x2, b / x2)
    } else {
        let e = Complex64::from_polar(1.0, x);
        let x2 = x * x;
        (
            e * (1.0 + (I * x - 1.0) / x2),
            e * (3.0 - 3.0 * I * x - x2) / x2,
        )
    }
}

/// Vacuum dyadic Green tensor `G_V(r, r', omega)`.
///
/// Positions in `lambda_T`, frequency in `omega_T`. The coincident point is
/// singular; use [`imag_green_coincidence_free`] there.
pub fn free_space_green(
    r: &Vector3<f64>,
    rp: &Vector3<f64>,
    omega: f64,
) -> Result<DyadicGreenValue> {
    check_omega(omega)?;
    let sep = r - rp;
    let dist = sep.norm();
    if dist == 0.0 || dist < 1e-14 * r.norm().max(rp.norm()) {
        return Err(Error::Domain(
            "free_space_green is singular at r = r'; use imag_green_coincidence_free".into(),
        ));
    }
    let k = wavenumber(omega);
    let (f1, f2) = radial_factors(k * dist);
    let unit = sep / dist;
    let rr: Matrix3<f64> = unit * unit.transpose();
    let pre = 1.0 / (4.0 * PI * dist);
    let m = Matrix3::from_fn(|i, j| {
        let id = if i == j { f1 } else { Complex64::new(0.0, 0.0) };
        (id + f2 * rr[(i, j)]) * pre
    });
    Ok(DyadicGreenValue(m))
}

/// `Im G_V(r, r, omega) = k/(6 pi) I`, returned as a dyad with real entries.
pub fn imag_green_coincidence_free(omega: f64) -> Result<DyadicGreenValue> {
    check_omega(omega)?;
    let v = wavenumber(omega) / (6.0 * PI);
    Ok(DyadicGreenValue::scaled_identity(Complex64::new(v, 0.0)))
}
