//! Benchmark fixtures.

use dipolium::dynamics::{rotating_frame, LorentzianModel};
use dipolium::{Atom, MaterialModel, MemoryKernel, Sphere, SphereGeometry};
use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

pub const LINE: f64 = 1.0504867;

pub fn sphere() -> Sphere {
    let material = MaterialModel::reduced(0.5, 1e-6).unwrap();
    Sphere::new(SphereGeometry::new(20.0, material).unwrap())
}

/// Two radial dipoles on opposite sides of the sphere, 0.02 above the surface.
pub fn opposite_pair() -> Vec<Atom> {
    let geom = SphereGeometry::new(20.0, MaterialModel::reduced(0.5, 1e-6).unwrap()).unwrap();
    [0.0, std::f64::consts::PI]
        .iter()
        .map(|&theta| {
            let pos = geom.surface_point(0.02, theta, 0.0);
            Atom::with_real_dipole(pos, Vector3::z(), LINE).unwrap()
        })
        .collect()
}

/// Resonant two-atom kernel with a strongly coupled symmetric superposition.
pub fn lorentzian_kernel(gamma0: f64) -> MemoryKernel {
    let atoms = opposite_pair();
    let (omega_bar, detunings) = rotating_frame(&atoms, gamma0);
    let c = |x: f64| Complex64::new(x, 0.0);
    let sym = DMatrix::from_element(2, 2, c(0.5));
    let anti = DMatrix::from_row_slice(2, 2, &[c(0.5), c(-0.5), c(-0.5), c(0.5)]);
    let model = LorentzianModel { nu_m: 0.0, half_width: 0.5, weights: sym * c(16743.5), background: anti * c(0.5) };
    MemoryKernel::analytic(detunings, &DMatrix::zeros(2, 2), model, gamma0, omega_bar).unwrap()
}
