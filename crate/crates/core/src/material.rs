//! Single-resonance Drude–Lorentz dielectric.
//!
//! `eps(omega) = 1 + omega_P^2 / (omega_T^2 - omega^2 - i gamma omega)`
//!
//! The background permittivity is taken to be 1. All three parameters share
//! one frequency unit; the rest of the crate uses `omega_T = 1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialModel {
    omega_t: f64,
    omega_p: f64,
    gamma: f64,
}

impl MaterialModel {
    pub fn new(omega_t: f64, omega_p: f64, gamma: f64) -> Result<Self> {
        if !(omega_t > 0.0 && omega_t.is_finite()) {
            return Err(Error::param("omega_T", format!("must be positive, got {omega_t}")));
        }
        if !(omega_p >= 0.0 && omega_p.is_finite()) {
            return Err(Error::param("omega_P", format!("must be non-negative, got {omega_p}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param(
                "gamma",
                format!("must be positive (a lossless pole is not causal), got {gamma}"),
            ));
        }
        Ok(Self { omega_t, omega_p, gamma })
    }

    /// Model in units of `omega_T`.
    pub fn reduced(omega_p: f64, gamma: f64) -> Result<Self> {
        Self::new(1.0, omega_p, gamma)
    }

    /// The sphere material used for all microsphere figures:
    /// `omega_P = 0.5 omega_T`, `gamma = 1e-6 omega_T`.
    pub fn default_sphere() -> Self {
        Self { omega_t: 1.0, omega_p: 0.5, gamma: 1e-6 }
    }

    pub fn omega_t(&self) -> f64 {
        self.omega_t
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `omega_P = 0`: the "material" is vacuum.
    pub fn is_vacuum(&self) -> bool {
        self.omega_p == 0.0
    }

    /// Closed form, valid for any real (also negative) frequency.
    pub fn eval(&self, omega: f64) -> Complex64 {
        if self.is_vacuum() {
            return Complex64::new(1.0, 0.0);
        }
        let den = Complex64::new(
            self.omega_t * self.omega_t - omega * omega,
            -self.gamma * omega,
        );
        1.0 + self.omega_p * self.omega_p / den
    }

    /// Relative permittivity at a positive frequency.
    pub fn permittivity(&self, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!(
                "permittivity requires omega > 0, got {omega}"
            )));
        }
        Ok(self.eval(omega))
    }

    /// Frequency interval in which `Re eps < -1`, the band hosting the
    /// surface-guided resonances of a sphere. `None` when the band is empty.
    pub fn surface_mode_band(&self) -> Option<(f64, f64)> {
        if self.is_vacuum() {
            return None;
        }
        // Re eps = -1 with s = omega^2, t = s - omega_T^2:
        //   2 t^2 + (2 gamma^2 - omega_P^2) t + 2 gamma^2 omega_T^2 = 0
        let wt2 = self.omega_t * self.omega_t;
        let wp2 = self.omega_p * self.omega_p;
        let g2 = self.gamma * self.gamma;
        let b = 2.0 * g2 - wp2;
        let disc = b * b - 16.0 * g2 * wt2;
        if disc <= 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        // numerically stable pair of roots
        let q = -0.5 * (b - sq); // b < 0 in any non-empty case
        let t_hi = q / 2.0;
        let t_lo = 2.0 * g2 * wt2 / q;
        if t_lo <= -wt2 {
            return None;
        }
        let lo = (wt2 + t_lo).sqrt();
        let hi = (wt2 + t_hi).sqrt();
        (hi > lo).then_some((lo, hi))
    }

    /// Checks causality of the model numerically: `Re eps - 1` is rebuilt from
    /// `Im eps` by a principal-value Hilbert transform on `grid` and compared
    /// with the closed form.
    ///
    /// Returns `max |rebuilt - direct| / max |direct|` over the evaluation
    /// points, which are the segment midpoints inside `[0.1, 10] omega_T`.
    pub fn kramers_kronig_residual(&self, grid: &[f64]) -> Result<f64> {
        quadrature::check_grid(grid)?;
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        if lo > 0.01 * self.omega_t || hi < 100.0 * self.omega_t {
            return Err(Error::Grid(format!(
                "grid [{lo}, {hi}] must span at least [0.01, 100] omega_T"
            )));
        }
        if self.is_vacuum() {
            return Ok(0.0);
        }
        let seg = grid
            .windows(2)
            .position(|w| w[0] <= self.omega_t && self.omega_t <= w[1])
            .ok_or_else(|| Error::Grid("grid misses the resonance".into()))?;
        let spacing = grid[seg + 1] - grid[seg];
        if spacing > self.gamma / 4.0 {
            return Err(Error::Grid(format!(
                "spacing {spacing:.3e} at omega_T exceeds gamma/4 = {:.3e}; the Lorentzian peak is not resolved",
                self.gamma / 4.0
            )));
        }

        let im: Vec<f64> = grid.iter().map(|&w| self.eval(w).im).collect();
        let mut max_dev: f64 = 0.0;
        let mut max_ref: f64 = 0.0;
        for w in grid.windows(2) {
            let x = 0.5 * (w[0] + w[1]);
            if !(0.1 * self.omega_t..=10.0 * self.omega_t).contains(&x) {
                continue;
            }
            // Re eps(x) - 1 = (1/pi) P int Im eps(w) [1/(w - x) + 1/(w + x)] dw
            let rebuilt = (quadrature::pv_linear(grid, &im, x)?
                + quadrature::pv_linear(grid, &im, -x)?)
                / std::f64::consts::PI;
            let direct = self.eval(x).re - 1.0;
            max_dev = max_dev.max((rebuilt - direct).abs());
            max_ref = max_ref.max(direct.abs());
        }
        Ok(max_dev / max_ref)
    }

    /// Frequency grid adapted to this model for
    /// [`kramers_kronig_residual`](Self::kramers_kronig_residual): spacing
    /// `gamma/8` around `omega_T`, growing geometrically away from it.
    pub fn resonance_adapted_grid(&self, lo: f64, hi: f64) -> Vec<f64> {
        let fine = self.gamma / 40.0;
        let core = 40.0 * self.gamma;
        let wt = self.omega_t;
        let mut right = vec![wt];
        let mut step = fine;
        let mut w = wt;
        while w < hi {
            if w - wt > core {
                step *= 1.02;
            }
            w = (w + step).min(hi);
            right.push(w);
        }
        let mut left = Vec::new();
        let mut step = fine;
        let mut w = wt;
        while w > lo {
            if wt - w > core {
                step *= 1.02;
            }
            w = (w - step).max(lo);
            left.push(w);
        }
        left.reverse();
        left.extend(right);
        left
    }
}

impl Default for MaterialModel {
    fn default() -> Self {
        Self::default_sphere()
    }
}
