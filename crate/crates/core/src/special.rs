//! Spherical Bessel functions of complex argument and Legendre polynomials.

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check_arg(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Range(format!("non-finite argument {z}")));
    }
    if z.im.abs() > 700.0 {
        return Err(Error::Range(format!(
            "|Im z| = {} overflows the exponential factor",
            z.im.abs()
        )));
    }
    Ok(())
}

/// `h_0 .. h_nmax` (first kind, outgoing) by upward recurrence.
pub fn spherical_h1_seq(nmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
    check_arg(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("h_n is singular at z = 0".into()));
    }
    let e = (I * z).exp();
    let mut h = Vec::with_capacity(nmax + 1);
    h.push(-I * e / z);
    if nmax >= 1 {
        h.push(-e * (z + I) / (z * z));
    }
    for n in 1..nmax {
        let next = (2 * n + 1) as f64 / z * h[n] - h[n - 1];
        if !next.re.is_finite() || !next.im.is_finite() {
            return Err(Error::Range(format!("h_{} overflows at z = {z}", n + 1)));
        }
        h.push(next);
    }
    Ok(h)
}

pub fn spherical_h1(n: usize, z: Complex64) -> Result<Complex64> {
    Ok(spherical_h1_seq(n, z)?[n])
}

/// Ratios `j_n / j_{n-1}` for `n = 1 ..= nmax + 1`, by backward recurrence
/// started well above both `nmax` and `|z|`. Entry `k` holds the ratio for
/// `n = k + 1`.
fn j_ratios(nmax: usize, z: Complex64) -> Vec<Complex64> {
    let top = nmax.max(z.norm().ceil() as usize);
    let start = top + 60 + (8.0 * (top as f64).sqrt()) as usize;
    let mut r = Complex64::new(0.0, 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); nmax + 1];
    for n in (1..=start).rev() {
        // r_n = j_n/j_{n-1} = 1 / ((2n+1)/z - r_{n+1})
        r = 1.0 / ((2 * n + 1) as f64 / z - r);
        if n <= nmax + 1 {
            out[n - 1] = r;
        }
    }
    out
}

/// `j_0 .. j_nmax`.
///
/// Ratios come from backward recurrence (stable for `n > |z|`); each value is
/// then normalized through the Wronskian `j_n h_{n+1} - j_{n+1} h_n = -i/z^2`
/// using the outgoing Hankel functions, so no division by `j_0` is needed.
pub fn spherical_j_seq(nmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
    check_arg(z)?;
    if z.norm() == 0.0 {
        let mut out = vec![Complex64::new(0.0, 0.0); nmax + 1];
        out[0] = Complex64::new(1.0, 0.0);
        return Ok(out);
    }
    if z.norm() < 1e-3 {
        return Ok((0..=nmax).map(|n| j_series(n, z)).collect());
    }
    let ratios = j_ratios(nmax, z);
    let h = spherical_h1_seq(nmax + 1, z)?;
    let z2 = z * z;
    Ok((0..=nmax)
        .map(|n| I / (z2 * (ratios[n] * h[n] - h[n + 1])))
        .collect())
}

pub fn spherical_j(n: usize, z: Complex64) -> Result<Complex64> {
    Ok(spherical_j_seq(n, z)?[n])
}

/// Alias of [`spherical_h1`].
pub fn spherical_bessel_h(n: usize, z: Complex64) -> Result<Complex64> {
    spherical_h1(n, z)
}

/// Alias of [`spherical_j`].
pub fn spherical_bessel_j(n: usize, z: Complex64) -> Result<Complex64> {
    spherical_j(n, z)
}

/// Power series, used near the origin.
fn j_series(n: usize, z: Complex64) -> Complex64 {
    let mut dfact = 1.0;
    for k in 1..=n {
        dfact *= (2 * k + 1) as f64;
    }
    let mut term = z.powu(n as u32) / dfact;
    let mut sum = term;
    let q = -0.5 * z * z;
    for k in 1..40 {
        term *= q / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Derivative from the sequence: `f_n' = f_{n-1} - (n+1)/z f_n`
/// (`f_0' = -f_1`).
pub fn derivative(seq: &[Complex64], next: Complex64, n: usize, z: Complex64) -> Complex64 {
    if n == 0 {
        -(if seq.len() > 1 { seq[1] } else { next })
    } else {
        seq[n - 1] - (n + 1) as f64 / z * seq[n]
    }
}

/// Logarithmic derivatives `psi_n'(z)/psi_n(z)` of the Riccati–Bessel
/// function `psi_n = z j_n(z)` for `n = 0 ..= nmax`, by downward recurrence.
pub fn riccati_log_derivative(nmax: usize, z: Complex64) -> Vec<Complex64> {
    let start = nmax.max(z.norm().ceil() as usize) + 60;
    let mut d = Complex64::new(0.0, 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); nmax + 1];
    for n in (1..=start).rev() {
        let nz = n as f64 / z;
        if n <= nmax {
            out[n] = d;
        }
        d = nz - 1.0 / (d + nz);
    }
    out[0] = d;
    out
}

/// Real-argument version of [`riccati_log_derivative`].
pub fn riccati_log_derivative_real(nmax: usize, x: f64) -> Vec<f64> {
    let start = nmax.max(x.ceil() as usize) + 60;
    let mut d = 0.0;
    let mut out = vec![0.0; nmax + 1];
    for n in (1..=start).rev() {
        let nx = n as f64 / x;
        if n <= nmax {
            out[n] = d;
        }
        d = nx - 1.0 / (d + nx);
    }
    out[0] = d;
    out
}

/// Legendre polynomials with first and second derivatives, `n = 0 ..= nmax`.
pub struct LegendreTable {
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    pub ddp: Vec<f64>,
}

impl LegendreTable {
    pub fn new(nmax: usize, u: f64) -> Self {
        let len = nmax + 2;
        let mut p = vec![0.0; len];
        let mut dp = vec![0.0; len];
        let mut ddp = vec![0.0; len];
        p[0] = 1.0;
        p[1] = u;
        dp[1] = 1.0;
        for l in 1..=nmax {
            let lf = l as f64;
            p[l + 1] = ((2.0 * lf + 1.0) * u * p[l] - lf * p[l - 1]) / (lf + 1.0);
            // P'_{l+1} = P'_{l-1} + (2l+1) P_l, same for the second derivative
            dp[l + 1] = dp[l - 1] + (2.0 * lf + 1.0) * p[l];
            ddp[l + 1] = ddp[l - 1] + (2.0 * lf + 1.0) * dp[l];
        }
        p.truncate(nmax + 1);
        dp.truncate(nmax + 1);
        ddp.truncate(nmax + 1);
        Self { p, dp, ddp }
    }
}
