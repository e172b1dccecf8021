use crate::error::{Error, Result};

/// Which superposition is strongly coupled to the resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrongBranch {
    /// `C_+` (symmetric state) is strongly coupled.
    Plus,
    /// `C_-` (antisymmetric state) is strongly coupled.
    Minus,
}

/// Coupling regime of a line of half width `Delta_omega_m` driven at rate `Gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Weak,
    Strong,
    /// Neither limit applies; only the full Volterra solution is reliable.
    Crossover,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Weak => "weak",
            Regime::Strong => "strong",
            Regime::Crossover => "crossover (use the full Volterra solver)",
        })
    }
}

/// Strong if `Gamma >= 10 Delta_omega_m`, weak if `Gamma <= 0.1 Delta_omega_m`.
pub fn classify_regime(gamma_strong: f64, delta_omega_m: f64) -> Regime {
    if gamma_strong >= 10.0 * delta_omega_m {
        Regime::Strong
    } else if gamma_strong <= 0.1 * delta_omega_m {
        Regime::Weak
    } else {
        Regime::Crossover
    }
}

/// Vacuum Rabi frequency `sqrt(2 Gamma Delta_omega_m)`.
pub fn rabi_frequency(gamma_strong: f64, delta_omega_m: f64) -> f64 {
    (2.0 * gamma_strong * delta_omega_m).sqrt()
}

/// Markovian two-atom solution for `C_A(0) = 1`:
/// `P_{A,B} = [cosh(Gamma_AB t) +- cos(2 delta_AB t)] exp(-Gamma_BB t) / 2`.
pub fn weak_coupling_closed_form(
    times: &[f64],
    gamma_aa: f64,
    gamma_ab: f64,
    delta_ab: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(gamma_aa >= 0.0) {
        return Err(Error::param("gamma_aa", "must be non-negative"));
    }
    if gamma_ab.abs() > gamma_aa {
        return Err(Error::param(
            "gamma_ab",
            format!("|{gamma_ab}| exceeds gamma_bb = {gamma_aa}; occupation would exceed 1"),
        ));
    }
    let mut pa = Vec::with_capacity(times.len());
    let mut pb = Vec::with_capacity(times.len());
    for &t in times {
        // cosh(x) e^{-y} without overflow for large t
        let ch = 0.5 * ((-(gamma_aa - gamma_ab) * t).exp() + (-(gamma_aa + gamma_ab) * t).exp());
        let osc = (2.0 * delta_ab * t).cos() * (-gamma_aa * t).exp();
        pa.push(0.5 * (ch + osc));
        pb.push(0.5 * (ch - osc));
    }
    Ok((pa, pb))
}

/// Single-resonance solution for `C_A(0) = 1` at exact resonance with the
/// strongly coupled superposition:
/// `P_{A,B} = [e^{-G t} + e^{-D t} cos^2(W t/2) +- 2 e^{-(D + G) t/2} cos(W t/2) cos(2 delta_AB t)] / 4`
/// with `G` the weak-branch rate, `D = Delta_omega_m` and `W = sqrt(2 Gamma_strong D)`.
pub fn strong_coupling_closed_form(
    times: &[f64],
    gamma_plus: f64,
    gamma_minus: f64,
    delta_omega_m: f64,
    delta_ab: f64,
    branch: StrongBranch,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(gamma_plus >= 0.0) || !(gamma_minus >= 0.0) {
        return Err(Error::param("gamma", "superposition rates must be non-negative"));
    }
    if !(delta_omega_m > 0.0) {
        return Err(Error::param("delta_omega_m", "must be positive"));
    }
    let (strong, weak) = match branch {
        StrongBranch::Plus => (gamma_plus, gamma_minus),
        StrongBranch::Minus => (gamma_minus, gamma_plus),
    };
    let omega = rabi_frequency(strong, delta_omega_m);
    let mut pa = Vec::with_capacity(times.len());
    let mut pb = Vec::with_capacity(times.len());
    for &t in times {
        let cw = (0.5 * omega * t).cos();
        let a = (-weak * t).exp() + (-delta_omega_m * t).exp() * cw * cw;
        let b = 2.0 * (-0.5 * (delta_omega_m + weak) * t).exp() * cw * (2.0 * delta_ab * t).cos();
        pa.push(0.25 * (a + b));
        pb.push(0.25 * (a - b));
    }
    Ok((pa, pb))
}
