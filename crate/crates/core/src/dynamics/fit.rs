use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use crate::coupling::CouplingSpectrum;
use crate::error::{Error, Result};

/// An isolated Lorentzian line of the rate spectrum,
/// `Gamma_{ab}(omega) = w_{ab} hw^2 / ((omega - omega_m)^2 + hw^2) + b_{ab}`.
///
/// `omega_m` and `half_width` in units of `omega_T`; weights and
/// backgrounds in units of `Gamma_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzianResonance {
    pub omega_m: f64,
    pub half_width: f64,
    pub weights: DMatrix<Complex64>,
    pub background: DMatrix<Complex64>,
    /// `max |data - model| / max |data|` of the primary fit.
    pub residual: f64,
}

impl LorentzianResonance {
    pub fn new(
        omega_m: f64,
        half_width: f64,
        weights: DMatrix<Complex64>,
        background: DMatrix<Complex64>,
    ) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::param("half_width", "must be positive"));
        }
        if weights.shape() != background.shape() || !weights.is_square() {
            return Err(Error::param("weights", "weights and background must be square and of equal size"));
        }
        Ok(Self { omega_m, half_width, weights, background, residual: 0.0 })
    }

    /// Line shape normalized to 1 at the center.
    pub fn shape(&self, omega: f64) -> f64 {
        let x = (omega - self.omega_m) / self.half_width;
        1.0 / (1.0 + x * x)
    }

    /// Model value for pair `(a, b)`.
    pub fn eval(&self, a: usize, b: usize, omega: f64) -> Complex64 {
        self.weights[(a, b)] * self.shape(omega) + self.background[(a, b)]
    }
}

fn model(p: &Vector4<f64>, x: f64) -> (f64, Vector4<f64>) {
    // p = [center, ln hw, amplitude, background] in scaled coordinates
    let hw = p[1].exp();
    let u = (x - p[0]) / hw;
    let s = 1.0 / (1.0 + u * u);
    let ds_du = -2.0 * u * s * s;
    let grad = Vector4::new(p[2] * ds_du * (-1.0 / hw), p[2] * ds_du * (-u), s, 1.0);
    (p[2] * s + p[3], grad)
}

/// Levenberg-Marquardt least squares on scaled abscissae.
fn levenberg_marquardt(xs: &[f64], ys: &[f64], mut p: Vector4<f64>) -> Vector4<f64> {
    let cost = |p: &Vector4<f64>| xs.iter().zip(ys).map(|(&x, &y)| (model(p, x).0 - y).powi(2)).sum::<f64>();
    let mut c = cost(&p);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let mut jtj = Matrix4::zeros();
        let mut jtr = Vector4::zeros();
        for (&x, &y) in xs.iter().zip(ys) {
            let (m, g) = model(&p, x);
            jtj += g * g.transpose();
            jtr += g * (y - m);
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj;
            for i in 0..4 {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = a.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let ct = cost(&trial);
            if ct.is_finite() && ct <= c {
                let rel = (c - ct) / c.max(1e-300);
                p = trial;
                c = ct;
                lambda = (lambda * 0.3).max(1e-15);
                improved = true;
                if rel < 1e-15 || step.norm() < 1e-15 * (1.0 + p.norm()) {
                    return p;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    p
}

/// Least-squares Lorentzian fit of `Gamma_{pair}(omega)` inside `window`.
///
/// The center and half width come from a nonlinear fit of the chosen pair;
/// weights and backgrounds of all other pairs are then fitted linearly with
/// the same line shape. A primary-fit residual above 10% means the window
/// does not isolate a single line and is reported as an error.
pub fn fit_lorentzian(
    spectrum: &CouplingSpectrum,
    pair: (usize, usize),
    window: (f64, f64),
) -> Result<LorentzianResonance> {
    let (lo, hi) = window;
    let idx: Vec<usize> = (0..spectrum.omega.len())
        .filter(|&i| spectrum.omega[i] >= lo && spectrum.omega[i] <= hi)
        .collect();
    if idx.len() < 8 {
        return Err(Error::Fit(format!("only {} samples inside the window", idx.len())));
    }
    let n = spectrum.entries[0].len();
    if pair.0 >= n || pair.1 >= n {
        return Err(Error::param("pair", format!("index out of range for {n} atoms")));
    }
    let center = 0.5 * (lo + hi);
    let scale = 0.5 * (hi - lo);
    let xs: Vec<f64> = idx.iter().map(|&i| (spectrum.omega[i] - center) / scale).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| spectrum.entries[i].gamma[pair].re).collect();

    let (imax, &ymax) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let ymin = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let half = 0.5 * (ymax + ymin);
    let above = ys.iter().filter(|&&y| y >= half).count().max(1);
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    let hw0 = (0.5 * above as f64 * dx).max(dx * 0.5);
    let p0 = Vector4::new(xs[imax], hw0.ln(), ymax - ymin, ymin);
    let p = levenberg_marquardt(&xs, &ys, p0);

    let omega_m = center + p[0] * scale;
    let half_width = p[1].exp() * scale;
    let peak = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| (model(&p, x).0 - y).abs())
        .fold(0.0f64, f64::max)
        / peak;
    if !(residual <= 0.1) || !(half_width > 0.0) {
        return Err(Error::Fit(format!(
            "relative residual {residual:.3} exceeds 0.1; the window does not isolate one resonance"
        )));
    }

    // linear fit of weight and background for every pair
    let shapes: Vec<f64> = idx
        .iter()
        .map(|&i| {
            let u = (spectrum.omega[i] - omega_m) / half_width;
            1.0 / (1.0 + u * u)
        })
        .collect();
    let mut ata = Matrix2::zeros();
    for &s in &shapes {
        ata += Matrix2::new(s * s, s, s, 1.0);
    }
    let inv = ata
        .try_inverse()
        .ok_or_else(|| Error::Fit("degenerate line shape on the window".into()))?;
    let mut weights = DMatrix::zeros(n, n);
    let mut background = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut re = Vector2::zeros();
            let mut im = Vector2::zeros();
            for (k, &i) in idx.iter().enumerate() {
                let g = spectrum.entries[i].gamma[(a, b)];
                re += Vector2::new(shapes[k], 1.0) * g.re;
                im += Vector2::new(shapes[k], 1.0) * g.im;
            }
            let (sr, si) = (inv * re, inv * im);
            weights[(a, b)] = Complex64::new(sr[0], si[0]);
            background[(a, b)] = Complex64::new(sr[1], si[1]);
        }
    }
    Ok(LorentzianResonance { omega_m, half_width, weights, background, residual })
}
