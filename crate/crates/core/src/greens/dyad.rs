use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

/// A 3x3 complex dyadic Green tensor value, in units of `1/lambda_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicGreenValue(pub Matrix3<Complex64>);

impl DyadicGreenValue {
    pub fn zeros() -> Self {
        Self(Matrix3::zeros())
    }

    /// `s * I`.
    pub fn scaled_identity(s: Complex64) -> Self {
        Self(Matrix3::from_diagonal_element(s))
    }

    pub fn from_real(m: &Matrix3<f64>) -> Self {
        Self(m.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Entry-wise real part.
    pub fn re(&self) -> Matrix3<f64> {
        self.0.map(|z| z.re)
    }

    /// Entry-wise imaginary part.
    pub fn im(&self) -> Matrix3<f64> {
        self.0.map(|z| z.im)
    }

    /// `a* . G . b` with `a` complex-conjugated.
    pub fn sandwich(&self, a: &Vector3<Complex64>, b: &Vector3<Complex64>) -> Complex64 {
        a.conjugate().dot(&(self.0 * b))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max |G - other| / max(|G|, |other|)`, 0 when both vanish.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let scale = self.max_abs().max(other.max_abs());
        if scale == 0.0 {
            return 0.0;
        }
        (*self - *other).max_abs() / scale
    }
}

impl Add for DyadicGreenValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for DyadicGreenValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Mul<Complex64> for DyadicGreenValue {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        Self(self.0 * rhs)
    }
}

impl Mul for DyadicGreenValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}
