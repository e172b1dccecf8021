//! Product-integration rules on non-uniform grids.
//!
//! Every rule here integrates the piecewise-linear interpolant of the sampled
//! function exactly against a singular (`1/(w - c)`) or oscillatory
//! (`exp(-i w tau)`) weight.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Grid must hold at least two finite, strictly increasing nodes.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Grid("need at least two nodes".into()));
    }
    if grid.iter().any(|w| !w.is_finite()) {
        return Err(Error::Grid("non-finite node".into()));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Grid(format!(
            "nodes must be strictly increasing (node {} = {}, node {} = {})",
            i,
            grid[i],
            i + 1,
            grid[i + 1]
        )));
    }
    Ok(())
}

/// Uniform grid of `steps` intervals on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let h = (hi - lo) / steps as f64;
    (0..=steps)
        .map(|i| if i == steps { hi } else { lo + i as f64 * h })
        .collect()
}

/// `P int_{grid} f(w) / (w - c) dw` for piecewise-linear `f`.
///
/// `c` may lie anywhere, including on a node or outside the grid. Inside the
/// grid the result is the Cauchy principal value.
pub fn pv_linear(grid: &[f64], f: &[f64], c: f64) -> Result<f64> {
    if grid.len() != f.len() {
        return Err(Error::Grid("grid and samples differ in length".into()));
    }
    check_grid(grid)?;
    let n = grid.len();
    // sum_seg slope * h telescopes to f_last - f_first
    let mut acc = f[n - 1] - f[0];
    // Each segment contributes f_lin(c) [ln|b - c| - ln|a - c|]; collect the
    // log terms per node. At a node equal to c the two coefficients cancel.
    let lin = |i: usize| {
        let (a, b) = (grid[i], grid[i + 1]);
        let slope = (f[i + 1] - f[i]) / (b - a);
        f[i] + slope * (c - a)
    };
    let mut prev = None;
    for i in 0..n {
        let left = prev.unwrap_or(0.0);
        let right = if i + 1 < n { lin(i) } else { 0.0 };
        prev = Some(right);
        let d = (grid[i] - c).abs();
        if d == 0.0 {
            continue;
        }
        acc += (left - right) * d.ln();
    }
    Ok(acc)
}

/// Complex-valued variant of [`pv_linear`].
pub fn pv_linear_complex(grid: &[f64], f: &[Complex64], c: f64) -> Result<Complex64> {
    let re: Vec<f64> = f.iter().map(|z| z.re).collect();
    let im: Vec<f64> = f.iter().map(|z| z.im).collect();
    Ok(Complex64::new(pv_linear(grid, &re, c)?, pv_linear(grid, &im, c)?))
}

/// `(e^z - 1) / z` and `int_0^1 t e^{z t} dt`, stable near `z = 0`.
fn filon_weights(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.1 {
        let mut e1 = Complex64::new(0.0, 0.0);
        let mut e2 = Complex64::new(0.0, 0.0);
        let mut zk = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 0..9 {
            e1 += zk / (fact * (k + 1) as f64);
            e2 += zk / (fact * (k + 2) as f64);
            zk *= z;
            fact *= (k + 1) as f64;
        }
        (e1, e2)
    } else {
        let ez = z.exp();
        ((ez - 1.0) / z, (ez * (z - 1.0) + 1.0) / (z * z))
    }
}

/// `int_{grid} f(nu) exp(-i nu tau) dnu` for piecewise-linear `f` (Filon rule).
pub fn filon_linear(grid: &[f64], f: &[Complex64], tau: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, w) in grid.windows(2).enumerate() {
        let (a, h) = (w[0], w[1] - w[0]);
        let slope = (f[i + 1] - f[i]) / h;
        let z = Complex64::new(0.0, -tau * h);
        let (e1, e2) = filon_weights(z);
        let phase = Complex64::from_polar(1.0, -tau * a);
        acc += phase * (f[i] * h * e1 + slope * h * h * e2);
    }
    acc
}

/// Trapezoid rule on a non-uniform grid.
pub fn trapezoid(grid: &[f64], f: &[f64]) -> f64 {
    grid.windows(2)
        .zip(f.windows(2))
        .map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1]))
        .sum()
}
