//! Medium-assisted Green tensors, resonant dipole-dipole couplings and
//! single-excitation dynamics of two-level atoms near a dielectric
//! microsphere.
//!
//! Units throughout: frequencies in `omega_T`, lengths in
//! `lambda_T = 2 pi c / omega_T`, rates in `Gamma_0`, times in `1/Gamma_0`.

pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod greens;
pub mod material;
pub mod quadrature;
pub mod special;
pub mod units;

pub use error::{Error, Result};
pub use greens::{DyadicGreenValue, FreeSpace, GreenProvider, SeriesControl, Sphere, SphereGeometry};
pub use coupling::{Atom, CouplingMatrix, CouplingSpectrum};
pub use dynamics::{AmplitudeTrajectory, LorentzianResonance, MemoryKernel, SuperpositionView};
pub use material::MaterialModel;
