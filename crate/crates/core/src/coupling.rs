//! Decay rates, dipole-dipole shifts and frequency shifts derived from the
//! Green tensor.
//!
//! Dipoles are measured in units of a reference moment `d_0`; all rates and
//! shifts are in units of `Gamma_0(omega)`, the free-space decay rate of a
//! `d_0` dipole at the frequency where the coupling is evaluated:
//!
//! `K_{A*A'} / Gamma_0 = i (3 pi / k) d_A* . G(r_A, r_A', omega) . d_A'
//!                    = -Gamma_{A*A'}/2 + i delta_{A*A'}`.

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::greens::{is_coincident, DyadicGreenValue, GreenProvider};
use crate::quadrature;
use crate::units::coupling_prefactor;

/// A two-level atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub position: Vector3<f64>,
    pub dipole: Vector3<Complex64>,
    pub omega_bare: f64,
    pub omega_shifted: Option<f64>,
}

impl Atom {
    pub fn new(position: Vector3<f64>, dipole: Vector3<Complex64>, omega_bare: f64) -> Result<Self> {
        if !(dipole.norm() > 0.0) {
            return Err(Error::param("dipole", "must be non-zero"));
        }
        Self::build(position, dipole, omega_bare)
    }

    /// Real dipole.
    pub fn with_real_dipole(position: Vector3<f64>, dipole: Vector3<f64>, omega_bare: f64) -> Result<Self> {
        Self::new(position, dipole.map(|v| Complex64::new(v, 0.0)), omega_bare)
    }

    /// An atom without a transition dipole; it couples to nothing.
    pub fn spectator(position: Vector3<f64>, omega_bare: f64) -> Result<Self> {
        Self::build(position, Vector3::zeros(), omega_bare)
    }

    fn build(position: Vector3<f64>, dipole: Vector3<Complex64>, omega_bare: f64) -> Result<Self> {
        if !(omega_bare > 0.0 && omega_bare.is_finite()) {
            return Err(Error::param("omega_bare", format!("must be positive, got {omega_bare}")));
        }
        if position.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("position", "must be finite"));
        }
        Ok(Self { position, dipole, omega_bare, omega_shifted: None })
    }

    /// Sets the shifted transition frequency.
    pub fn shifted(mut self, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::param("omega_shifted", format!("must be positive, got {omega}")));
        }
        self.omega_shifted = Some(omega);
        Ok(self)
    }

    /// `omega~_A` if set, else the bare frequency.
    pub fn omega(&self) -> f64 {
        self.omega_shifted.unwrap_or(self.omega_bare)
    }
}

fn sandwich(g: &DyadicGreenValue, a: &Atom, b: &Atom, omega: f64) -> Complex64 {
    g.sandwich(&a.dipole, &b.dipole) * coupling_prefactor(omega)
}

/// `(Gamma, delta)` from `(3 pi/k) d* G d` evaluated with entry-wise real
/// and imaginary parts of `G` (both complex for complex dipoles).
fn split(g: &DyadicGreenValue, a: &Atom, b: &Atom, omega: f64) -> (Complex64, Complex64) {
    let pre = coupling_prefactor(omega);
    let re = DyadicGreenValue::from_real(&g.re());
    let im = DyadicGreenValue::from_real(&g.im());
    let gamma = im.sandwich(&a.dipole, &b.dipole) * (2.0 * pre);
    let delta = re.sandwich(&a.dipole, &b.dipole) * pre;
    (gamma, delta)
}

/// `K_{A*A'}` in units of `Gamma_0(omega)`.
pub fn coupling_k(a: &Atom, b: &Atom, omega: f64, green: &dyn GreenProvider) -> Result<Complex64> {
    let g = green.coupling_green(&a.position, &b.position, omega)?;
    Ok(Complex64::new(0.0, 1.0) * sandwich(&g, a, b, omega))
}

/// `Gamma_{A*A'}` in units of `Gamma_0(omega)`.
pub fn decay_rate(a: &Atom, b: &Atom, omega: f64, green: &dyn GreenProvider) -> Result<Complex64> {
    let g = green.coupling_green(&a.position, &b.position, omega)?;
    Ok(split(&g, a, b, omega).0)
}

/// `delta_{A*A'} = (3 pi / k) d_A* . Re G . d_A'` for two distinct atoms.
pub fn dipole_dipole_shift(a: &Atom, b: &Atom, omega: f64, green: &dyn GreenProvider) -> Result<Complex64> {
    if is_coincident(&a.position, &b.position) {
        return Err(Error::Domain(
            "dipole_dipole_shift needs two atoms at distinct positions".into(),
        ));
    }
    let g = green.total(&a.position, &b.position, omega)?;
    Ok(split(&g, a, b, omega).1)
}

/// Which part of the Green tensor enters a spectral integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenPart {
    Scattering,
    Total,
}

/// Branch of the principal-value shift integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Denominator `omega - omega~`, pole inside the grid.
    Minus,
    /// Denominator `omega + omega~`, no pole for positive frequencies.
    Plus,
}

/// `Gamma_{A*A'}(omega) (omega / omega~)^3` on `grid`, i.e. the decay-rate
/// spectrum in units of `Gamma_0(omega~)`.
fn rate_spectrum(
    a: &Atom,
    b: &Atom,
    green: &dyn GreenProvider,
    grid: &[f64],
    part: GreenPart,
    omega_ref: f64,
) -> Result<Vec<Complex64>> {
    grid.par_iter()
        .map(|&w| {
            let g = match part {
                GreenPart::Scattering => green.scattering(&a.position, &b.position, w)?,
                GreenPart::Total => green.coupling_green(&a.position, &b.position, w)?,
            };
            Ok(split(&g, a, b, w).0 * (w / omega_ref).powi(3))
        })
        .collect()
}

/// `delta^-+_{A*A'} = (1/2 pi) P int Gamma_{A*A'}(omega) / (omega -+ omega~_{A'}) d omega`,
/// in units of `Gamma_0(omega~_{A'})`.
///
/// The grid must start near zero and reach at least `20 omega_T`. The
/// numerator is interpolated linearly and the principal value of each
/// segment is taken analytically.
pub fn pv_shift_pair(
    a: &Atom,
    b: &Atom,
    branch: Branch,
    green: &dyn GreenProvider,
    grid: &[f64],
    part: GreenPart,
) -> Result<Complex64> {
    quadrature::check_grid(grid)?;
    let target = b.omega();
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    if !(lo > 0.0) || lo > 0.05 {
        return Err(Error::Grid(format!("grid must start in (0, 0.05] omega_T, starts at {lo}")));
    }
    if hi < 20.0 {
        return Err(Error::Grid(format!("grid must reach 20 omega_T, ends at {hi}")));
    }
    if branch == Branch::Minus {
        let first = grid[1] - grid[0];
        let last = grid[grid.len() - 1] - grid[grid.len() - 2];
        if target - lo < 0.5 * first || hi - target < 0.5 * last {
            return Err(Error::Grid(format!(
                "pole at {target} lies within half a step of the grid edge"
            )));
        }
    }
    let spectrum = rate_spectrum(a, b, green, grid, part, target)?;
    let pole = match branch {
        Branch::Minus => target,
        Branch::Plus => -target,
    };
    Ok(quadrature::pv_linear_complex(grid, &spectrum, pole)? / (2.0 * std::f64::consts::PI))
}

/// Shifted transition frequency `omega~_A = omega_A - delta_{A*A}`.
///
/// Only the reflection part enters; the vacuum shift is taken to be part of
/// the bare frequency. Without the counter-rotating correction the shift is
/// `(3 pi/k) d* Re G_R d`; with it, `2 delta^+` is subtracted (requires
/// `grid`). `gamma0` is `Gamma_0 / omega_T`. The shift is evaluated once, at
/// the bare frequency.
pub fn shifted_frequency(
    atom: &Atom,
    green: &dyn GreenProvider,
    grid: &[f64],
    include_counter_rotating: bool,
    gamma0: f64,
) -> Result<f64> {
    if !(gamma0 > 0.0) {
        return Err(Error::param("gamma0", "must be positive"));
    }
    let w = atom.omega_bare;
    let gr = green.scattering(&atom.position, &atom.position, w)?;
    let mut delta = split(&gr, atom, atom, w).1.re;
    if include_counter_rotating {
        let bare = Atom { omega_shifted: None, ..*atom };
        delta -= 2.0 * pv_shift_pair(&bare, &bare, Branch::Plus, green, grid, GreenPart::Scattering)?.re;
    }
    let shifted = w - gamma0 * delta;
    if !(shifted > 0.0) {
        return Err(Error::Domain(format!("shifted frequency {shifted} is not positive")));
    }
    Ok(shifted)
}

/// `Gamma` and `delta` for every ordered pair of atoms.
///
/// Column `A'` is evaluated at frequency `omega(A')`, as in `K_{A*A'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    pub omegas: Vec<f64>,
    pub gamma: DMatrix<Complex64>,
    pub delta: DMatrix<Complex64>,
}

impl CouplingMatrix {
    /// All atoms evaluated at the common frequency `omega`.
    pub fn at_frequency(atoms: &[Atom], omega: f64, green: &dyn GreenProvider) -> Result<Self> {
        let positions: Vec<_> = atoms.iter().map(|a| a.position).collect();
        let block = green.coupling_block(&positions, omega)?;
        let n = atoms.len();
        let mut gamma = DMatrix::zeros(n, n);
        let mut delta = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (g, d) = split(&block[i * n + j], &atoms[i], &atoms[j], omega);
                gamma[(i, j)] = g;
                delta[(i, j)] = d;
            }
        }
        Ok(Self { omegas: vec![omega; n], gamma, delta })
    }

    /// Each column at the shifted frequency of its atom.
    pub fn at_atom_frequencies(atoms: &[Atom], green: &dyn GreenProvider) -> Result<Self> {
        let n = atoms.len();
        let mut out = Self {
            omegas: atoms.iter().map(Atom::omega).collect(),
            gamma: DMatrix::zeros(n, n),
            delta: DMatrix::zeros(n, n),
        };
        let mut done = vec![false; n];
        for j in 0..n {
            if done[j] {
                continue;
            }
            let w = atoms[j].omega();
            let m = Self::at_frequency(atoms, w, green)?;
            for (col, atom) in atoms.iter().enumerate() {
                if atom.omega() == w {
                    done[col] = true;
                    out.gamma.set_column(col, &m.gamma.column(col));
                    out.delta.set_column(col, &m.delta.column(col));
                }
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `K_{A*A'} = -Gamma/2 + i delta`.
    pub fn k(&self, a: usize, b: usize) -> Complex64 {
        -0.5 * self.gamma[(a, b)] + Complex64::new(0.0, 1.0) * self.delta[(a, b)]
    }

    pub fn k_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.len(), self.len(), |a, b| self.k(a, b))
    }
}

/// Coupling matrices on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpectrum {
    pub omega: Vec<f64>,
    pub entries: Vec<CouplingMatrix>,
}

impl CouplingSpectrum {
    /// Real `Gamma_{ab}` along the grid.
    pub fn gamma(&self, a: usize, b: usize) -> Vec<f64> {
        self.entries.iter().map(|m| m.gamma[(a, b)].re).collect()
    }

    /// Real `delta_{ab}` along the grid.
    pub fn delta(&self, a: usize, b: usize) -> Vec<f64> {
        self.entries.iter().map(|m| m.delta[(a, b)].re).collect()
    }

    /// Error unless every grid step inside `[center - 40 hw, center + 40 hw]`
    /// is at most `half_width / 8`.
    pub fn check_resolution(&self, center: f64, half_width: f64) -> Result<()> {
        check_resolution(&self.omega, center, half_width)
    }
}

/// Requires `>= 8` points per half width around `center`.
pub fn check_resolution(grid: &[f64], center: f64, half_width: f64) -> Result<()> {
    let span = 40.0 * half_width;
    let worst = grid
        .windows(2)
        .filter(|w| w[1] >= center - span && w[0] <= center + span)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let points = if worst > 0.0 { half_width / worst } else { 0.0 };
    if worst == 0.0 || points < 8.0 {
        return Err(Error::Unresolved { half_width, points, required: 8 });
    }
    Ok(())
}

/// Coupling matrices of `atoms` (all at the sweep frequency) over `grid`.
///
/// The grid must be strictly monotone; the spectrum is returned in
/// increasing frequency order. Frequencies are evaluated in parallel.
pub fn sweep_spectrum(atoms: &[Atom], green: &dyn GreenProvider, grid: &[f64]) -> Result<CouplingSpectrum> {
    if atoms.is_empty() {
        return Err(Error::param("atoms", "at least one atom required"));
    }
    let mut omega = grid.to_vec();
    if omega.len() >= 2 && omega[1] < omega[0] {
        omega.reverse();
    }
    quadrature::check_grid(&omega)?;
    let entries = omega
        .par_iter()
        .map(|&w| CouplingMatrix::at_frequency(atoms, w, green))
        .collect::<Result<Vec<_>>>()?;
    Ok(CouplingSpectrum { omega, entries })
}

/// Rebuilds `delta_{ab}` at `eval` from the `Gamma_{ab}` samples on `grid` by
/// the principal-value Hilbert transform restricted to the grid,
/// `delta(w) = (1/2 pi) P int Gamma(v) / (v - w) dv`.
pub fn hilbert_delta(grid: &[f64], gamma: &[f64], eval: &[f64]) -> Result<Vec<f64>> {
    eval.iter()
        .map(|&w| Ok(quadrature::pv_linear(grid, gamma, w)? / (2.0 * std::f64::consts::PI)))
        .collect()
}
