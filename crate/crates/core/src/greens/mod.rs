//! Classical dyadic Green tensors: vacuum and a dielectric sphere.
//!
//! Normalization: `curl curl G - k^2 G = delta(r - r') I`, so that
//! `Im G_V(r, r) = k/(6 pi) I`.

mod dyad;
mod free;
mod sphere;

pub use dyad::DyadicGreenValue;
pub use free::{free_space_green, imag_green_coincidence_free};
pub use sphere::{
    mie_reflection_coefficients, sphere_scattering_green, sphere_scattering_green_detailed,
    ScatteringResult, SeriesControl, SphereGeometry, SphereSeries,
};

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::Result;

/// True when two positions are the same point for Green-tensor purposes.
pub fn is_coincident(r: &Vector3<f64>, rp: &Vector3<f64>) -> bool {
    let d = (r - rp).norm();
    d == 0.0 || d < 1e-14 * r.norm().max(rp.norm())
}

/// Source of Green-tensor values for the coupling formulas.
pub trait GreenProvider: Sync {
    /// Reflection part `G_R(r, r', omega)`.
    fn scattering(&self, r: &Vector3<f64>, rp: &Vector3<f64>, omega: f64) -> Result<DyadicGreenValue>;

    /// `G_V + G_R` at distinct points.
    fn total(&self, r: &Vector3<f64>, rp: &Vector3<f64>, omega: f64) -> Result<DyadicGreenValue> {
        Ok(free_space_green(r, rp, omega)? + self.scattering(r, rp, omega)?)
    }

    /// Coincidence-safe value: `i Im G_V + G_R`. The vacuum real part is
    /// considered absorbed in the bare transition frequency.
    fn coincident(&self, r: &Vector3<f64>, omega: f64) -> Result<DyadicGreenValue> {
        let im_v = imag_green_coincidence_free(omega)?;
        Ok(im_v * Complex64::new(0.0, 1.0) + self.scattering(r, r, omega)?)
    }

    /// [`total`](Self::total) off coincidence, [`coincident`](Self::coincident) on it.
    fn coupling_green(&self, r: &Vector3<f64>, rp: &Vector3<f64>, omega: f64) -> Result<DyadicGreenValue> {
        if is_coincident(r, rp) {
            self.coincident(r, omega)
        } else {
            self.total(r, rp, omega)
        }
    }

    /// All pairs of `positions`, row-major `N x N`, using reciprocity for
    /// the lower triangle.
    fn coupling_block(&self, positions: &[Vector3<f64>], omega: f64) -> Result<Vec<DyadicGreenValue>> {
        let n = positions.len();
        let mut out = vec![DyadicGreenValue::zeros(); n * n];
        for i in 0..n {
            for j in i..n {
                let g = self.coupling_green(&positions[i], &positions[j], omega)?;
                out[i * n + j] = g;
                out[j * n + i] = g.transpose();
            }
        }
        Ok(out)
    }
}

/// Homogeneous vacuum: no reflection part.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeSpace;

impl GreenProvider for FreeSpace {
    fn scattering(&self, _r: &Vector3<f64>, _rp: &Vector3<f64>, omega: f64) -> Result<DyadicGreenValue> {
        imag_green_coincidence_free(omega)?;
        Ok(DyadicGreenValue::zeros())
    }
}

/// Vacuum plus a dielectric sphere centred at the origin.
#[derive(Debug, Clone, Copy)]
pub struct Sphere {
    pub geometry: SphereGeometry,
    pub control: SeriesControl,
}

impl Sphere {
    pub fn new(geometry: SphereGeometry) -> Self {
        Self { geometry, control: SeriesControl::default() }
    }

    pub fn with_control(geometry: SphereGeometry, control: SeriesControl) -> Self {
        Self { geometry, control }
    }
}

impl GreenProvider for Sphere {
    fn scattering(&self, r: &Vector3<f64>, rp: &Vector3<f64>, omega: f64) -> Result<DyadicGreenValue> {
        sphere_scattering_green(r, rp, omega, &self.geometry, self.control)
    }

    fn coupling_block(&self, positions: &[Vector3<f64>], omega: f64) -> Result<Vec<DyadicGreenValue>> {
        let mut series = SphereSeries::new(omega, &self.geometry, self.control)?;
        let im_v = imag_green_coincidence_free(omega)? * Complex64::new(0.0, 1.0);
        let n = positions.len();
        let mut out = vec![DyadicGreenValue::zeros(); n * n];
        for i in 0..n {
            for j in i..n {
                let (a, b) = (&positions[i], &positions[j]);
                let gr = series.evaluate(a, b)?.value;
                let g = if is_coincident(a, b) { im_v + gr } else { free_space_green(a, b, omega)? + gr };
                out[i * n + j] = g;
                out[j * n + i] = g.transpose();
            }
        }
        Ok(out)
    }
}
