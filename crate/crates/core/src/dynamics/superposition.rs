use num_complex::Complex64;

use super::closed_form::rabi_frequency;
use super::kernel::MemoryKernel;
use super::volterra::AmplitudeTrajectory;
use crate::error::{Error, Result};

/// Symmetric and antisymmetric amplitudes of a two-atom trajectory,
/// `C_+- = (C_A +- C_B) exp(-+ i delta_AB t) / sqrt 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionView {
    pub times: Vec<f64>,
    pub c_plus: Vec<Complex64>,
    pub c_minus: Vec<Complex64>,
}

/// `Gamma_+- = Gamma_AA +- Gamma_AB` and `Omega_+- = sqrt(2 Gamma_+- Delta_omega_m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionRates {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
}

impl SuperpositionRates {
    pub fn new(gamma_aa: f64, gamma_ab: f64, delta_omega_m: f64) -> Result<Self> {
        let (gamma_plus, gamma_minus) = (gamma_aa + gamma_ab, gamma_aa - gamma_ab);
        // allow rounding noise from nearly perfect cancellation
        let slack = 1e-9 * gamma_aa.abs();
        if gamma_plus < -slack || gamma_minus < -slack {
            return Err(Error::param("gamma_ab", "Gamma_+- must be non-negative"));
        }
        let (gamma_plus, gamma_minus) = (gamma_plus.max(0.0), gamma_minus.max(0.0));
        Ok(Self {
            gamma_plus,
            gamma_minus,
            omega_plus: rabi_frequency(gamma_plus, delta_omega_m),
            omega_minus: rabi_frequency(gamma_minus, delta_omega_m),
        })
    }
}

/// Relative tolerance on the kernel symmetry relations.
pub const SYMMETRY_TOLERANCE: f64 = 1e-6;

/// Transforms a two-atom trajectory to the superposition basis after
/// checking `K_{A*A} = K_{B*B}` and `K_{A*B} = K_{B*A}` on the kernel.
pub fn to_superposition(
    traj: &AmplitudeTrajectory,
    kernel: &MemoryKernel,
    delta_ab: f64,
) -> Result<SuperpositionView> {
    if traj.atoms() != 2 {
        return Err(Error::Symmetry(format!("needs exactly two atoms, got {}", traj.atoms())));
    }
    kernel.plus_minus(SYMMETRY_TOLERANCE)?;
    Ok(transform(traj, delta_ab))
}

/// The basis change alone, without symmetry checks.
pub fn transform(traj: &AmplitudeTrajectory, delta_ab: f64) -> SuperpositionView {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut c_plus = Vec::with_capacity(traj.times.len());
    let mut c_minus = Vec::with_capacity(traj.times.len());
    for (t, c) in traj.times.iter().zip(&traj.amplitudes) {
        let phase = Complex64::from_polar(1.0, -delta_ab * t);
        c_plus.push(s * (c[0] + c[1]) * phase);
        c_minus.push(s * (c[0] - c[1]) * phase.conj());
    }
    SuperpositionView { times: traj.times.clone(), c_plus, c_minus }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_state_and_norm() {
        let traj = AmplitudeTrajectory {
            times: vec![0.0, 0.5],
            amplitudes: vec![
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)],
            ],
        };
        let v = transform(&traj, 7.0);
        assert!((v.c_plus[0] - Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((v.c_minus[0] - Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
        for k in 0..2 {
            let lhs = v.c_plus[k].norm_sqr() + v.c_minus[k].norm_sqr();
            let rhs: f64 = traj.amplitudes[k].iter().map(|z| z.norm_sqr()).sum();
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn rabi_frequency_of_symmetric_state() {
        let r = SuperpositionRates::new(8372.0, 8371.5, 0.5).unwrap();
        assert!((r.gamma_plus - 16743.5).abs() < 1e-9);
        assert!((r.omega_plus - (16743.5f64).sqrt()).abs() < 1e-9);
    }
}
