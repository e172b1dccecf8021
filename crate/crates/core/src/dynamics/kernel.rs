//! Memory kernels of the amplitude equations.
//!
//! With rotating-frame amplitudes `D_A = exp(-i Delta_A t) C_A`, where
//! `Delta_A = (omega~_A - omega_bar) / Gamma_0` and `omega_bar` is the mean
//! shifted frequency, the equations of motion take the form
//!
//! `dD/dt = M D + int_0^t k(t - s) D(s) ds`,
//!
//! `k_{ab}(tau) = -(1/2 pi) int Gamma_{ab}(nu) exp(-i nu tau) d nu`,
//!
//! with `nu = (omega - omega_bar)/Gamma_0` and time in units of `1/Gamma_0`.
//! The kernel is a difference kernel for any set of atomic frequencies.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::fit::LorentzianResonance;
use crate::coupling::{sweep_spectrum, Atom, CouplingMatrix};
use crate::error::{Error, Result};
use crate::greens::GreenProvider;
use crate::quadrature;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
/// Fraction of the window (per side) over which the sampled remainder is
/// rolled off to zero.
const TAPER: f64 = 0.1;

/// Lorentzian line in rotating-frame units: center `nu_m` and half width in
/// `Gamma_0`, peak weights and flat background per pair in `Gamma_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzianModel {
    pub nu_m: f64,
    pub half_width: f64,
    pub weights: DMatrix<Complex64>,
    pub background: DMatrix<Complex64>,
}

impl LorentzianModel {
    /// Converts a fitted resonance (in `omega_T`) to the frame of
    /// `omega_bar` with rate unit `gamma0 = Gamma_0/omega_T`.
    pub fn from_resonance(res: &LorentzianResonance, omega_bar: f64, gamma0: f64) -> Self {
        Self {
            nu_m: (res.omega_m - omega_bar) / gamma0,
            half_width: res.half_width / gamma0,
            weights: res.weights.clone(),
            background: res.background.clone(),
        }
    }

    fn kernel(&self, a: usize, b: usize, tau: f64) -> Complex64 {
        let w = self.weights[(a, b)];
        -0.5 * w * self.half_width * Complex64::from_polar((-self.half_width * tau).exp(), -self.nu_m * tau)
    }

    /// `(1/2 pi) P int L_{ab}(nu) / (nu - c) d nu` over the real line.
    fn dispersion(&self, a: usize, b: usize, c: f64) -> Complex64 {
        let x = c - self.nu_m;
        let hw = self.half_width;
        -0.5 * self.weights[(a, b)] * hw * x / (x * x + hw * hw)
    }

    fn value(&self, a: usize, b: usize, nu: f64) -> Complex64 {
        let u = (nu - self.nu_m) / self.half_width;
        self.weights[(a, b)] / (1.0 + u * u)
    }
}

/// Sampled rate spectrum on a window, one series per pair.
#[derive(Debug, Clone, PartialEq)]
struct Sampled {
    nu: Vec<f64>,
    values: Vec<Vec<Complex64>>,
}

impl Sampled {
    fn kernel(&self, pair: usize, tau: f64) -> Complex64 {
        -quadrature::filon_linear(&self.nu, &self.values[pair], tau) / (2.0 * PI)
    }
}

/// The memory kernel together with the instantaneous (Markovian) part `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryKernel {
    n: usize,
    omega_bar: f64,
    gamma0: f64,
    detunings: Vec<f64>,
    coherent: DMatrix<Complex64>,
    lorentz: Option<LorentzianModel>,
    sampled: Option<Sampled>,
    rate_hint: f64,
}

/// Settings for [`build_kernel`].
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    /// `Gamma_0 / omega_T`.
    pub gamma0: f64,
    /// Frequency window `[lo, hi]` in `omega_T`.
    pub window: (f64, f64),
    /// Number of grid intervals across the window.
    pub steps: usize,
    /// Resonance treated analytically over the whole real axis; the sampled
    /// spectrum keeps only the remainder.
    pub resonance: Option<LorentzianResonance>,
    /// Treatment of the spectrum left after removing the resonance.
    pub remainder: Remainder,
}

/// How the non-resonant part of the spectrum enters the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Remainder {
    /// Sampled on the window, tapered, and transformed numerically.
    #[default]
    Sampled,
    /// Evaluated at the atomic frequencies and applied instantaneously.
    /// Appropriate when the remainder is flat on the scale of the atomic
    /// rates; it avoids resolving the window width in time.
    Markov,
}

fn check_gamma0(gamma0: f64) -> Result<()> {
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(Error::param("gamma0", format!("must be positive, got {gamma0}")));
    }
    Ok(())
}

/// Mean shifted frequency and detunings in units of `Gamma_0`.
pub fn rotating_frame(atoms: &[Atom], gamma0: f64) -> (f64, Vec<f64>) {
    let bar = atoms.iter().map(Atom::omega).sum::<f64>() / atoms.len() as f64;
    (bar, atoms.iter().map(|a| (a.omega() - bar) / gamma0).collect())
}

fn taper(nu: f64, lo: f64, hi: f64) -> f64 {
    let edge = TAPER * (hi - lo);
    let d = (nu - lo).min(hi - nu);
    if d >= edge {
        1.0
    } else if d <= 0.0 {
        0.0
    } else {
        0.5 * (1.0 - (PI * d / edge).cos())
    }
}

/// Half width at half maximum of the tallest peak of `|f|` on `grid`,
/// by linear interpolation; `None` if it cannot be bracketed.
fn peak_half_width(grid: &[f64], f: &[f64]) -> Option<f64> {
    let (imax, &fmax) = f.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    let half = 0.5 * fmax;
    let mut left = None;
    for i in (0..imax).rev() {
        if f[i] < half {
            let t = (half - f[i]) / (f[i + 1] - f[i]);
            left = Some(grid[i] + t * (grid[i + 1] - grid[i]));
            break;
        }
    }
    let mut right = None;
    for i in imax + 1..f.len() {
        if f[i] < half {
            let t = (f[i - 1] - half) / (f[i - 1] - f[i]);
            right = Some(grid[i - 1] + t * (grid[i] - grid[i - 1]));
            break;
        }
    }
    Some(0.5 * (right? - left?))
}

/// Builds the memory kernel from the Green tensor on a frequency window.
///
/// Samples `Gamma_{ab}(omega)` on a uniform grid, subtracts the resonance
/// if one is supplied, and rolls the remainder off smoothly at the window
/// edges. `M` carries the detunings, the full dipole-dipole shifts (off the
/// diagonal) and a counterterm removing the dispersive shift that the
/// kernel itself produces in the Markov limit, so that each shift is
/// counted once.
pub fn build_kernel(atoms: &[Atom], green: &dyn GreenProvider, config: &KernelConfig) -> Result<MemoryKernel> {
    check_gamma0(config.gamma0)?;
    if atoms.is_empty() {
        return Err(Error::param("atoms", "at least one atom required"));
    }
    let (lo, hi) = config.window;
    if !(hi > lo) || config.steps < 16 {
        return Err(Error::Grid("window must be non-empty with at least 16 intervals".into()));
    }
    for a in atoms {
        let w = a.omega();
        if !(w > lo + TAPER * (hi - lo) && w < hi - TAPER * (hi - lo)) {
            return Err(Error::Grid(format!(
                "atomic frequency {w} is not inside the untapered part of the window [{lo}, {hi}]"
            )));
        }
    }
    let n = atoms.len();
    let gamma0 = config.gamma0;
    let (omega_bar, detunings) = rotating_frame(atoms, gamma0);
    let lorentz = config.resonance.as_ref().map(|r| LorentzianModel::from_resonance(r, omega_bar, gamma0));
    let couplings = CouplingMatrix::at_atom_frequencies(atoms, green)?;
    let sampled = match config.remainder {
        Remainder::Sampled => Some(sample_remainder(atoms, green, config, omega_bar, lorentz.as_ref())?),
        Remainder::Markov => None,
    };

    let mut coherent = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let c = detunings[b];
            let mut counter = Complex64::new(0.0, 0.0);
            let mut markov = Complex64::new(0.0, 0.0);
            match &sampled {
                Some(s) => counter += quadrature::pv_linear_complex(&s.nu, &s.values[a * n + b], c)? / (2.0 * PI),
                None => {
                    // everything not in the line acts instantaneously at the atom frequency
                    let rescale = (atoms[b].omega() / omega_bar).powi(3);
                    let mut rest = couplings.gamma[(a, b)] * rescale;
                    if let Some(l) = &lorentz {
                        rest -= l.value(a, b, c);
                    }
                    markov -= 0.5 * rest;
                }
            }
            if let Some(l) = &lorentz {
                counter += l.dispersion(a, b, c);
                if sampled.is_some() {
                    markov -= 0.5 * l.background[(a, b)];
                }
            }
            let explicit = if a == b {
                -I * detunings[a]
            } else {
                I * couplings.delta[(a, b)]
            };
            coherent[(a, b)] = explicit - I * counter + markov;
        }
    }

    let mut kernel = MemoryKernel {
        n,
        omega_bar,
        gamma0,
        detunings,
        coherent,
        lorentz,
        sampled,
        rate_hint: 0.0,
    };
    kernel.rate_hint = kernel.estimate_rate();
    Ok(kernel)
}

fn sample_remainder(
    atoms: &[Atom],
    green: &dyn GreenProvider,
    config: &KernelConfig,
    omega_bar: f64,
    lorentz: Option<&LorentzianModel>,
) -> Result<Sampled> {
    let n = atoms.len();
    let (lo, hi) = config.window;
    let grid = quadrature::linspace(lo, hi, config.steps);
    let step = (hi - lo) / config.steps as f64;
    let spectrum = sweep_spectrum(atoms, green, &grid)?;
    let hw = match &config.resonance {
        Some(r) => Some(r.half_width),
        None => {
            let diag: Vec<f64> = spectrum.entries.iter().map(|m| m.gamma[(0, 0)].re).collect();
            peak_half_width(&grid, &diag)
        }
    };
    if let Some(hw) = hw {
        if step > hw / 8.0 * (1.0 + 1e-9) {
            return Err(Error::Unresolved { half_width: hw, points: hw / step, required: 8 });
        }
    }

    let nu: Vec<f64> = grid.iter().map(|w| (w - omega_bar) / config.gamma0).collect();
    let (nlo, nhi) = (nu[0], nu[nu.len() - 1]);
    let mut values = vec![Vec::with_capacity(grid.len()); n * n];
    for (k, m) in spectrum.entries.iter().enumerate() {
        let rescale = (grid[k] / omega_bar).powi(3);
        let t = taper(nu[k], nlo, nhi);
        for a in 0..n {
            for b in 0..n {
                let mut g = m.gamma[(a, b)] * rescale;
                if let Some(l) = lorentz {
                    g -= l.value(a, b, nu[k]) + l.background[(a, b)];
                }
                values[a * n + b].push(g * t);
            }
        }
    }
    Ok(Sampled { nu, values })
}

impl MemoryKernel {
    /// Purely analytic kernel: Lorentzian line over the whole real axis plus
    /// a flat (Markovian) background. `delta` supplies the explicit
    /// dipole-dipole couplings (off-diagonal entries, in `Gamma_0`).
    pub fn analytic(
        detunings: Vec<f64>,
        delta: &DMatrix<Complex64>,
        model: LorentzianModel,
        gamma0: f64,
        omega_bar: f64,
    ) -> Result<Self> {
        check_gamma0(gamma0)?;
        let n = detunings.len();
        if n == 0 {
            return Err(Error::param("atoms", "at least one atom required"));
        }
        if delta.shape() != (n, n) || model.weights.shape() != (n, n) || model.background.shape() != (n, n) {
            return Err(Error::param("delta", "coupling matrices must be N x N"));
        }
        if !(model.half_width > 0.0) {
            return Err(Error::param("half_width", "must be positive"));
        }
        let coherent = DMatrix::from_fn(n, n, |a, b| {
            let explicit = if a == b { -I * detunings[a] } else { I * delta[(a, b)] };
            explicit - 0.5 * model.background[(a, b)]
        });
        let mut kernel = Self {
            n,
            omega_bar,
            gamma0,
            detunings,
            coherent,
            lorentz: Some(model),
            sampled: None,
            rate_hint: 0.0,
        };
        kernel.rate_hint = kernel.estimate_rate();
        Ok(kernel)
    }

    /// A spectrally flat kernel: exact Markov limit with decay matrix
    /// `gamma` (in `Gamma_0`) and explicit shifts `delta`.
    pub fn markovian(detunings: Vec<f64>, gamma: &DMatrix<Complex64>, delta: &DMatrix<Complex64>) -> Result<Self> {
        let n = detunings.len();
        let model = LorentzianModel {
            nu_m: 0.0,
            half_width: 1.0,
            weights: DMatrix::zeros(n, n),
            background: gamma.clone(),
        };
        let mut k = Self::analytic(detunings, delta, model, 1.0, 1.0)?;
        k.lorentz = None;
        k.rate_hint = k.estimate_rate();
        Ok(k)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    /// Instantaneous part `M`.
    pub fn coherent(&self) -> &DMatrix<Complex64> {
        &self.coherent
    }

    /// Fastest rate (in `Gamma_0`) the time step has to resolve.
    pub fn rate_hint(&self) -> f64 {
        self.rate_hint
    }

    fn estimate_rate(&self) -> f64 {
        let mut rate = self.coherent.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if let Some(l) = &self.lorentz {
            let wmax = l.weights.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let offset = self.detunings.iter().fold(0.0f64, |m, d| m.max((l.nu_m - d).abs()));
            rate = rate
                .max(offset + l.half_width)
                .max((2.0 * wmax * l.half_width).sqrt());
        }
        if let Some(s) = &self.sampled {
            for v in &s.values {
                let (num, den) = s.nu.iter().zip(v).fold((0.0, 0.0), |(a, b), (nu, g)| {
                    (a + g.norm() * nu.abs(), b + g.norm())
                });
                if den > 0.0 {
                    rate = rate.max(num / den);
                }
                let k0 = s.kernel(0, 0.0).norm();
                rate = rate.max((4.0 * k0).sqrt());
            }
        }
        rate
    }

    /// `k(tau)` as an `N x N` matrix.
    pub fn kernel_at(&self, tau: f64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |a, b| {
            let mut v = Complex64::new(0.0, 0.0);
            if let Some(l) = &self.lorentz {
                v += l.kernel(a, b, tau);
            }
            if let Some(s) = &self.sampled {
                v += s.kernel(a * self.n + b, tau);
            }
            v
        })
    }

    /// Analytic part written as `C exp(lambda tau)`.
    pub(crate) fn exponential(&self) -> Option<(Complex64, DMatrix<Complex64>)> {
        self.lorentz.as_ref().map(|l| {
            let lambda = Complex64::new(-l.half_width, -l.nu_m);
            (lambda, l.weights.map(|w| -0.5 * w * l.half_width))
        })
    }

    /// Table of the sampled part only (empty when there is none).
    pub(crate) fn sampled_table(&self, dt: f64, t_max: f64) -> Vec<DMatrix<Complex64>> {
        match &self.sampled {
            None => Vec::new(),
            Some(s) => {
                let n = self.n;
                truncated_table(dt, t_max, |tau| DMatrix::from_fn(n, n, |a, b| s.kernel(a * n + b, tau)))
            }
        }
    }

    /// `k(j dt)` for `j = 0, 1, ...` up to `t_max`, cut off once the kernel
    /// has decayed below `1e-10` of its largest value over 64 consecutive
    /// samples.
    pub fn table(&self, dt: f64, t_max: f64) -> Vec<DMatrix<Complex64>> {
        truncated_table(dt, t_max, |tau| self.kernel_at(tau))
    }

    /// Kernels of the symmetric and antisymmetric combinations of two
    /// atoms, `k_+- = k_AA +- k_AB` and `M_+- = M_AA +- M_AB`.
    pub fn plus_minus(&self, tol: f64) -> Result<(MemoryKernel, MemoryKernel)> {
        if self.n != 2 {
            return Err(Error::Symmetry(format!("needs exactly two atoms, got {}", self.n)));
        }
        let m = &self.coherent;
        check_pair(m[(0, 0)], m[(1, 1)], tol, "K_{A*A} = K_{B*B}")?;
        check_pair(m[(0, 1)], m[(1, 0)], tol, "K_{A*B} = K_{B*A}")?;
        for tau in [0.0, 0.37, 1.9] {
            let k = self.kernel_at(tau);
            check_pair(k[(0, 0)], k[(1, 1)], tol, "K_{A*A} = K_{B*B}")?;
            check_pair(k[(0, 1)], k[(1, 0)], tol, "K_{A*B} = K_{B*A}")?;
        }
        let make = |sign: f64| {
            let one = |x: &DMatrix<Complex64>| DMatrix::from_element(1, 1, x[(0, 0)] + sign * x[(0, 1)]);
            MemoryKernel {
                n: 1,
                omega_bar: self.omega_bar,
                gamma0: self.gamma0,
                detunings: vec![self.detunings[0]],
                coherent: one(&self.coherent),
                lorentz: self.lorentz.as_ref().map(|l| LorentzianModel {
                    nu_m: l.nu_m,
                    half_width: l.half_width,
                    weights: one(&l.weights),
                    background: one(&l.background),
                }),
                sampled: self.sampled.as_ref().map(|s| Sampled {
                    nu: s.nu.clone(),
                    values: vec![s.values[0].iter().zip(&s.values[1]).map(|(x, y)| x + sign * y).collect()],
                }),
                rate_hint: self.rate_hint,
            }
        };
        Ok((make(1.0), make(-1.0)))
    }
}

fn truncated_table(dt: f64, t_max: f64, eval: impl Fn(f64) -> DMatrix<Complex64>) -> Vec<DMatrix<Complex64>> {
    const QUIET: usize = 64;
    let mut out = Vec::new();
    let mut peak = 0.0f64;
    let mut quiet = 0;
    let mut j = 0usize;
    loop {
        let tau = j as f64 * dt;
        if tau > t_max + 0.5 * dt {
            break;
        }
        let k = eval(tau);
        let size = k.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        peak = peak.max(size);
        if size <= 1e-10 * peak {
            quiet += 1;
        } else {
            quiet = 0;
        }
        out.push(k);
        if quiet >= QUIET {
            out.truncate(out.len() - QUIET + 1);
            break;
        }
        j += 1;
    }
    out
}

fn check_pair(x: Complex64, y: Complex64, tol: f64, name: &str) -> Result<()> {
    let scale = x.norm().max(y.norm()).max(1e-300);
    if (x - y).norm() > tol * scale {
        return Err(Error::Symmetry(format!("{name} violated: {x} vs {y}")));
    }
    Ok(())
}
