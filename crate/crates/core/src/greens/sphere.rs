//! Scattering part of the Green tensor for a homogeneous sphere in vacuum,
//! both points outside the sphere.
//!
//! The series is evaluated in scaled form. With `x = k a` and `z = k |r|`,
//! every term is written through `beta_n = B_n h_n(x)^2`, the ratios
//! `rho_n(z) = h_n(z)/h_n(x)` and the logarithmic derivatives
//! `Xi_n(z) = [z h_n(z)]' / [z h_n(z)]`, none of which overflow for large `n`.

use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::DyadicGreenValue;
use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::special;
use crate::units::wavenumber;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const BLOCK: usize = 10;
const DEFAULT_CAP: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereGeometry {
    diameter: f64,
    material: MaterialModel,
}

impl SphereGeometry {
    pub fn new(diameter: f64, material: MaterialModel) -> Result<Self> {
        if !(diameter > 0.0 && diameter.is_finite()) {
            return Err(Error::param("diameter", format!("must be positive, got {diameter}")));
        }
        Ok(Self { diameter, material })
    }

    /// `d = 20 lambda_T` with the default material.
    pub fn default_microsphere() -> Self {
        Self { diameter: 20.0, material: MaterialModel::default_sphere() }
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.diameter
    }

    pub fn material(&self) -> &MaterialModel {
        &self.material
    }

    /// Position at distance `delta_r` above the surface in direction
    /// `(theta, phi)` (radians).
    pub fn surface_point(&self, delta_r: f64, theta: f64, phi: f64) -> Vector3<f64> {
        let r = self.radius() + delta_r;
        Vector3::new(
            r * theta.sin() * phi.cos(),
            r * theta.sin() * phi.sin(),
            r * theta.cos(),
        )
    }

    fn check_exterior(&self, r: &Vector3<f64>) -> Result<()> {
        if !(r.norm() > self.radius()) {
            return Err(Error::Domain(format!(
                "point at |r| = {} is not outside the sphere of radius {}",
                r.norm(),
                self.radius()
            )));
        }
        Ok(())
    }

    /// Minimum number of multipoles: the usual size-parameter rule, raised
    /// past the surface-guided modes when `Re eps < -1`.
    pub fn min_terms(&self, omega: f64) -> usize {
        let x = wavenumber(omega) * self.radius();
        let mut n = (x + 4.0 * x.cbrt() + 10.0).ceil();
        let eps = self.material.eval(omega).re;
        if eps < -1.0 {
            let n_sp = (x * (eps / (eps + 1.0)).sqrt()).min(50.0 * x + 100.0);
            n = n.max((1.2 * n_sp + 20.0).ceil());
        }
        n as usize
    }
}

/// Truncation control for the multipole series.
///
/// The series is summed over at least [`SphereGeometry::min_terms`] orders
/// and then until the estimated tail falls below `tolerance` relative to the
/// largest entry of the partial sum. `n_max` caps the number of orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub n_max: Option<usize>,
    pub tolerance: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { n_max: None, tolerance: 1e-9 }
    }
}

impl SeriesControl {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { n_max: None, tolerance }
    }

    fn cap(&self) -> usize {
        self.n_max.unwrap_or(DEFAULT_CAP)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::param("tolerance", "must be positive"));
        }
        if self.n_max == Some(0) {
            return Err(Error::param("n_max", "must be at least 1"));
        }
        Ok(())
    }
}

/// A converged scattering dyad with its truncation diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct ScatteringResult {
    pub value: DyadicGreenValue,
    pub terms: usize,
    pub tail: f64,
}

/// Scaled exterior reflection coefficients for `n = 0 ..= nmax`
/// (entry 0 unused).
struct MieTable {
    x: f64,
    beta_m: Vec<Complex64>,
    beta_n: Vec<Complex64>,
    /// `h_n(x)/h_{n-1}(x)`.
    qx: Vec<Complex64>,
}

impl MieTable {
    fn build(omega: f64, geometry: &SphereGeometry, nmax: usize) -> Result<Self> {
        let x = wavenumber(omega) * geometry.radius();
        let mut qx = Vec::with_capacity(nmax + 1);
        qx.push(-I);
        for n in 1..=nmax {
            let prev = qx[n - 1];
            qx.push((2 * n - 1) as f64 / x - 1.0 / prev);
        }
        if geometry.material().is_vacuum() {
            return Ok(Self { x, beta_m: vec![ZERO; nmax + 1], beta_n: vec![ZERO; nmax + 1], qx });
        }
        let eps = geometry.material().permittivity(omega)?;
        let m = eps.sqrt();
        let dx = special::riccati_log_derivative_real(nmax, x);
        let dmx = special::riccati_log_derivative(nmax, m * x);
        let mut beta_m = vec![ZERO; nmax + 1];
        let mut beta_n = vec![ZERO; nmax + 1];
        for n in 1..=nmax {
            let xi = 1.0 / qx[n] - n as f64 / x;
            // j_n(x) h_n(x) from the Riccati-Bessel Wronskian
            let jh = I / (x * x * (xi - dx[n]));
            beta_n[n] = -jh * (m * dx[n] - dmx[n]) / (m * xi - dmx[n]);
            beta_m[n] = -jh * (dx[n] - m * dmx[n]) / (xi - m * dmx[n]);
        }
        Ok(Self { x, beta_m, beta_n, qx })
    }

    fn len(&self) -> usize {
        self.qx.len() - 1
    }
}

/// Exterior reflection coefficients `(B_M, B_N)` of order `n`.
///
/// Unscaled, so large `n / (k a)` overflows through `h_n(ka)^2`; that case is
/// reported as a range error.
pub fn mie_reflection_coefficients(
    n: usize,
    omega: f64,
    geometry: &SphereGeometry,
) -> Result<(Complex64, Complex64)> {
    if n == 0 {
        return Err(Error::param("n", "multipole order must be at least 1"));
    }
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    let table = MieTable::build(omega, geometry, n)?;
    let h = special::spherical_h1(n, Complex64::new(table.x, 0.0))?;
    let h2 = h * h;
    if !(h2.re.is_finite() && h2.im.is_finite()) || h2.norm() == 0.0 {
        return Err(Error::Range(format!("h_{n}(ka)^2 is not representable at ka = {}", table.x)));
    }
    Ok((table.beta_m[n] / h2, table.beta_n[n] / h2))
}

/// Fixed angular structure of a pair of points.
struct PairFrame {
    u: f64,
    za: f64,
    zb: f64,
    /// a a^T, u I - e' e^T, their images under the cross-product maps,
    /// e e'^T, e (e' x a)^T, (e x a) e'^T with `a = e x e'`.
    aa: Matrix3<f64>,
    b0: Matrix3<f64>,
    raa: Matrix3<f64>,
    rb0: Matrix3<f64>,
    e1: Matrix3<f64>,
    e2: Matrix3<f64>,
    e3: Matrix3<f64>,
}

fn cross_matrix(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

impl PairFrame {
    fn new(r: &Vector3<f64>, rp: &Vector3<f64>, k: f64) -> Self {
        let e = r.normalize();
        let ep = rp.normalize();
        let u = e.dot(&ep).clamp(-1.0, 1.0);
        let a = e.cross(&ep);
        let aa = a * a.transpose();
        let b0 = Matrix3::identity() * u - ep * e.transpose();
        let re = cross_matrix(&e);
        let rep = cross_matrix(&ep).transpose();
        Self {
            u,
            za: k * r.norm(),
            zb: k * rp.norm(),
            raa: re * aa * rep,
            rb0: re * b0 * rep,
            aa,
            b0,
            e1: e * ep.transpose(),
            e2: e * ep.cross(&a).transpose(),
            e3: e.cross(&a) * ep.transpose(),
        }
    }
}

/// Angular weights of order `n`: `P_n, P_n', P_n''` at `u`.
#[derive(Clone, Copy)]
struct Legendre {
    p: [f64; 2],
    dp: [f64; 2],
    ddp: [f64; 2],
    n: usize,
}

impl Legendre {
    fn start(u: f64) -> Self {
        // holds orders (n-1, n) = (0, 1)
        Self { p: [1.0, u], dp: [0.0, 1.0], ddp: [0.0, 0.0], n: 1 }
    }

    fn advance(&mut self, u: f64) {
        let nf = self.n as f64;
        let w = 2.0 * nf + 1.0;
        let p = (w * u * self.p[1] - nf * self.p[0]) / (nf + 1.0);
        let dp = self.dp[0] + w * self.p[1];
        let ddp = self.ddp[0] + w * self.dp[1];
        self.p = [self.p[1], p];
        self.dp = [self.dp[1], dp];
        self.ddp = [self.ddp[1], ddp];
        self.n += 1;
    }
}

/// One multipole order of the expansion
/// `sum_n [s_M M M^T + s_N N N^T]` (without the overall `i k`).
///
/// `s_m`, `s_n` carry the radial products of the two points and
/// `xi_a`, `xi_b` the logarithmic derivatives of `z f_n(z)` of the radial
/// function at each point.
#[allow(clippy::too_many_arguments)]
fn order_term(
    f: &PairFrame,
    leg: &Legendre,
    s_m: Complex64,
    s_n: Complex64,
    xi_a: Complex64,
    xi_b: Complex64,
) -> Matrix3<Complex64> {
    let n = leg.n as f64;
    let nn = n * (n + 1.0);
    let c = (2.0 * n + 1.0) / (4.0 * PI);
    let (p, dp, ddp) = (leg.p[1], leg.dp[1], leg.ddp[1]);
    let cm = c / nn;
    let w_aa = -ddp * cm;
    let w_b0 = dp * cm;
    let w_e1 = nn * c * p / (f.za * f.zb);
    let cdp = c * dp;
    let xx = s_m;
    let zz = s_n * xi_a * xi_b;
    let c_e1 = s_n * w_e1;
    let c_e2 = s_n * xi_b * (cdp / f.za);
    let c_e3 = -s_n * xi_a * (cdp / f.zb);
    Matrix3::from_fn(|i, j| {
        xx * (w_aa * f.aa[(i, j)] + w_b0 * f.b0[(i, j)])
            + zz * (w_aa * f.raa[(i, j)] + w_b0 * f.rb0[(i, j)])
            + c_e1 * f.e1[(i, j)]
            + c_e2 * f.e2[(i, j)]
            + c_e3 * f.e3[(i, j)]
    })
}

/// Block-wise geometric tail estimate from the last `2 * BLOCK` term sizes.
fn tail_estimate(sizes: &VecDeque<f64>) -> f64 {
    if sizes.len() < 2 * BLOCK {
        return f64::INFINITY;
    }
    let older = sizes.iter().take(BLOCK).fold(0.0f64, |m, &v| m.max(v));
    let newer = sizes.iter().skip(BLOCK).fold(0.0f64, |m, &v| m.max(v));
    if newer == 0.0 {
        return 0.0;
    }
    let ratio = newer / older;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    BLOCK as f64 * newer * ratio / (1.0 - ratio)
}

/// Reusable evaluator for one frequency; the coefficient table grows on
/// demand.
pub struct SphereSeries {
    omega: f64,
    k: f64,
    geometry: SphereGeometry,
    control: SeriesControl,
    n_min: usize,
    table: MieTable,
}

impl SphereSeries {
    pub fn new(omega: f64, geometry: &SphereGeometry, control: SeriesControl) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        control.validate()?;
        let n_min = geometry.min_terms(omega).min(control.cap());
        let initial = (2 * n_min).max(64).min(control.cap());
        Ok(Self {
            omega,
            k: wavenumber(omega),
            geometry: *geometry,
            control,
            n_min,
            table: MieTable::build(omega, geometry, initial)?,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    fn grow(&mut self) -> Result<()> {
        let next = (2 * self.table.len()).min(self.control.cap());
        self.table = MieTable::build(self.omega, &self.geometry, next)?;
        Ok(())
    }

    /// `G_R(r, r')`.
    pub fn evaluate(&mut self, r: &Vector3<f64>, rp: &Vector3<f64>) -> Result<ScatteringResult> {
        self.geometry.check_exterior(r)?;
        self.geometry.check_exterior(rp)?;
        if self.geometry.material().is_vacuum() {
            return Ok(ScatteringResult { value: DyadicGreenValue::zeros(), terms: 0, tail: 0.0 });
        }
        let frame = PairFrame::new(r, rp, self.k);
        let x = self.table.x;
        let mut leg = Legendre::start(frame.u);
        let mut qa = -I;
        let mut qb = -I;
        let mut rho_a = Complex64::from_polar(x / frame.za, frame.za - x);
        let mut rho_b = Complex64::from_polar(x / frame.zb, frame.zb - x);
        let mut sum = Matrix3::<Complex64>::zeros();
        let mut sizes: VecDeque<f64> = VecDeque::with_capacity(2 * BLOCK + 1);
        let cap = self.control.cap();
        let mut n = 1;
        loop {
            if n > self.table.len() {
                if self.table.len() >= cap {
                    let tail = tail_estimate(&sizes) * self.k;
                    return Err(Error::NotConverged { terms: n - 1, tail });
                }
                self.grow()?;
            }
            let nf = n as f64;
            qa = (2.0 * nf - 1.0) / frame.za - 1.0 / qa;
            qb = (2.0 * nf - 1.0) / frame.zb - 1.0 / qb;
            rho_a *= qa / self.table.qx[n];
            rho_b *= qb / self.table.qx[n];
            let xi_a = 1.0 / qa - nf / frame.za;
            let xi_b = 1.0 / qb - nf / frame.zb;
            let rr = rho_a * rho_b;
            let term = order_term(
                &frame,
                &leg,
                self.table.beta_m[n] * rr,
                self.table.beta_n[n] * rr,
                xi_a,
                xi_b,
            );
            sum += term;
            if sizes.len() == 2 * BLOCK {
                sizes.pop_front();
            }
            sizes.push_back(term.iter().fold(0.0f64, |m, z| m.max(z.norm())));
            if n >= self.n_min {
                let scale = sum.iter().fold(0.0f64, |m, z| m.max(z.norm()));
                let tail = tail_estimate(&sizes);
                if tail <= self.control.tolerance * scale {
                    let value = DyadicGreenValue(sum * (I * self.k));
                    return Ok(ScatteringResult { value, terms: n, tail: tail * self.k });
                }
            }
            leg.advance(frame.u);
            n += 1;
        }
    }
}

/// Scattering part `G_R(r, r', omega)` of the sphere Green tensor.
pub fn sphere_scattering_green(
    r: &Vector3<f64>,
    rp: &Vector3<f64>,
    omega: f64,
    geometry: &SphereGeometry,
    control: SeriesControl,
) -> Result<DyadicGreenValue> {
    Ok(sphere_scattering_green_detailed(r, rp, omega, geometry, control)?.value)
}

/// As [`sphere_scattering_green`], also returning the number of orders
/// summed and the final tail estimate.
pub fn sphere_scattering_green_detailed(
    r: &Vector3<f64>,
    rp: &Vector3<f64>,
    omega: f64,
    geometry: &SphereGeometry,
    control: SeriesControl,
) -> Result<ScatteringResult> {
    SphereSeries::new(omega, geometry, control)?.evaluate(r, rp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::free_space_green;

    /// Unscaled expansion of the vacuum dyad,
    /// `G_V = i k sum [M^(h)(r) M^(j)(r') + N^(h) N^(j)]` for `|r| > |r'|`,
    /// built from the same angular kernel but independent radial functions.
    fn vacuum_by_expansion(r: &Vector3<f64>, rp: &Vector3<f64>, omega: f64, nmax: usize) -> Matrix3<Complex64> {
        let k = wavenumber(omega);
        let f = PairFrame::new(r, rp, k);
        let za = Complex64::new(f.za, 0.0);
        let zb = Complex64::new(f.zb, 0.0);
        let h = special::spherical_h1_seq(nmax + 1, za).unwrap();
        let j = special::spherical_j_seq(nmax + 1, zb).unwrap();
        let mut leg = Legendre::start(f.u);
        let mut sum = Matrix3::zeros();
        for n in 1..=nmax {
            let hp = special::derivative(&h, h[n + 1], n, za);
            let jp = special::derivative(&j, j[n + 1], n, zb);
            let xi_a = 1.0 / za + hp / h[n];
            let xi_b = 1.0 / zb + jp / j[n];
            let s = h[n] * j[n];
            sum += order_term(&f, &leg, s, s, xi_a, xi_b);
            leg.advance(f.u);
        }
        sum * (I * k)
    }

    #[test]
    fn angular_kernel_reproduces_vacuum_dyad() {
        let omega = 0.3;
        let pairs = [
            (Vector3::new(0.6, 1.1, 2.3), Vector3::new(0.2, -0.3, 0.1)),
            (Vector3::new(-1.5, 0.2, 0.4), Vector3::new(0.1, 0.35, -0.2)),
        ];
        for (r, rp) in pairs {
            let series = vacuum_by_expansion(&r, &rp, omega, 40);
            let exact = free_space_green(&r, &rp, omega).unwrap();
            let rel = DyadicGreenValue(series).rel_diff(&exact);
            assert!(rel < 1e-10, "rel {rel}");
        }
    }

    #[test]
    fn rayleigh_limit_of_coefficients() {
        let omega = 1.0;
        let x = 1e-3;
        let geom = SphereGeometry::new(2.0 * x / wavenumber(omega), MaterialModel::reduced(0.8, 0.1).unwrap()).unwrap();
        let eps = geom.material().eval(omega);
        let (bm, bn) = mie_reflection_coefficients(1, omega, &geom).unwrap();
        let want = I * (2.0 / 3.0) * x.powi(3) * (eps - 1.0) / (eps + 2.0);
        assert!((bn - want).norm() < 1e-5 * want.norm(), "{bn} vs {want}");
        assert!(bm.norm() < 1e-4 * want.norm());
    }

    #[test]
    fn small_sphere_acts_as_point_dipole() {
        let omega = 1.0;
        let k = wavenumber(omega);
        let a = 1e-3 / k;
        let geom = SphereGeometry::new(2.0 * a, MaterialModel::reduced(0.8, 0.1).unwrap()).unwrap();
        let eps = geom.material().eval(omega);
        let alpha = 4.0 * PI * a.powi(3) * (eps - 1.0) / (eps + 2.0);
        let r = Vector3::new(30.0 * a, 5.0 * a, -8.0 * a);
        let rp = Vector3::new(-6.0 * a, 28.0 * a, 12.0 * a);
        let got = sphere_scattering_green(&r, &rp, omega, &geom, SeriesControl::default()).unwrap();
        let o = Vector3::zeros();
        let ga = free_space_green(&r, &o, omega).unwrap();
        let gb = free_space_green(&o, &rp, omega).unwrap();
        let want = (ga * gb) * (alpha * k * k);
        assert!(got.rel_diff(&want) < 5e-3, "rel {}", got.rel_diff(&want));
    }

    #[test]
    fn vacuum_sphere_scatters_nothing() {
        let geom = SphereGeometry::new(20.0, MaterialModel::reduced(0.0, 1e-6).unwrap()).unwrap();
        let r = geom.surface_point(0.02, 0.0, 0.0);
        let g = sphere_scattering_green(&r, &r, 1.05, &geom, SeriesControl::default()).unwrap();
        assert_eq!(g, DyadicGreenValue::zeros());
        let (bm, bn) = mie_reflection_coefficients(5, 1.05, &geom).unwrap();
        assert_eq!((bm, bn), (ZERO, ZERO));
    }

    #[test]
    fn interior_points_rejected() {
        let geom = SphereGeometry::default_microsphere();
        let inside = Vector3::new(0.0, 0.0, 9.0);
        let out = Vector3::new(0.0, 0.0, 11.0);
        assert!(matches!(
            sphere_scattering_green(&inside, &out, 1.0, &geom, SeriesControl::default()),
            Err(Error::Domain(_))
        ));
        assert!(mie_reflection_coefficients(0, 1.0, &geom).is_err());
    }

    #[test]
    fn cap_reports_non_convergence() {
        let geom = SphereGeometry::default_microsphere();
        let r = geom.surface_point(0.02, 0.0, 0.0);
        let control = SeriesControl { n_max: Some(150), tolerance: 1e-12 };
        match sphere_scattering_green(&r, &r, 1.0504867, &geom, control) {
            Err(Error::NotConverged { terms, tail }) => {
                assert_eq!(terms, 150);
                assert!(tail > 0.0);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn overflow_of_unscaled_coefficients_is_reported() {
        let geom = SphereGeometry::new(0.02, MaterialModel::default_sphere()).unwrap();
        assert!(matches!(
            mie_reflection_coefficients(400, 1.0, &geom),
            Err(Error::Range(_))
        ));
    }
}
