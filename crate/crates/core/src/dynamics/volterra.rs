use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::kernel::MemoryKernel;
use crate::error::{Error, Result};

/// Probability bound enforced at every step.
pub const PROBABILITY_TOLERANCE: f64 = 1e-3;

/// Amplitudes `C_A(t)` on a uniform time grid (time in `1/Gamma_0`).
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    /// `amplitudes[step][atom]`.
    pub amplitudes: Vec<Vec<Complex64>>,
}

impl AmplitudeTrajectory {
    pub fn atoms(&self) -> usize {
        self.amplitudes.first().map_or(0, Vec::len)
    }

    /// `P_A(t) = |C_A(t)|^2` for one atom.
    pub fn probability(&self, atom: usize) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c[atom].norm_sqr()).collect()
    }

    /// `sum_A P_A(t)`.
    pub fn total_probability(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    /// Amplitude series of one atom.
    pub fn amplitude(&self, atom: usize) -> Vec<Complex64> {
        self.amplitudes.iter().map(|c| c[atom]).collect()
    }
}

/// Integrates `dD/dt = M D + int_0^t k(t - s) D(s) ds` by trapezoidal
/// product integration.
///
/// The instantaneous part is propagated exactly with `exp(M h)`; the memory
/// term enters through the trapezoid rule on the variation-of-constants
/// integral, `D_n = E D_{n-1} + h/2 (E I_{n-1} + I_n)`. The step is implicit
/// in the newest point; since the equations are linear the implicit system
/// is solved exactly with one LU factorization. The
/// grid spacing is `t_max / ceil(t_max / dt)`. Returned amplitudes are
/// `C_A = exp(i Delta_A t) D_A`.
pub fn solve_volterra(
    kernel: &MemoryKernel,
    initial: &[Complex64],
    t_max: f64,
    dt: f64,
) -> Result<AmplitudeTrajectory> {
    let n = kernel.len();
    if initial.len() != n {
        return Err(Error::param("initial", format!("expected {n} amplitudes, got {}", initial.len())));
    }
    let norm: f64 = initial.iter().map(|z| z.norm_sqr()).sum();
    if !(norm <= 1.0 + 1e-12) {
        return Err(Error::param("initial", format!("total occupation {norm} exceeds 1")));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::param("t_max", "must be positive"));
    }
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let rate = kernel.rate_hint();
    if dt * rate > 0.1 * (1.0 + 1e-9) {
        return Err(Error::param(
            "dt",
            format!("{dt:.3e} does not resolve the fastest rate {rate:.3e}; need dt <= {:.3e}", 0.1 / rate),
        ));
    }
    // guard against t_max / dt landing just above an integer by rounding
    let steps = (t_max / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = t_max / steps as f64;

    let m = kernel.coherent().clone();
    let expo = kernel.exponential();
    let table = kernel.sampled_table(h, t_max);

    // k(0) enters the implicit step with weight h/2
    let mut k0 = DMatrix::zeros(n, n);
    if let Some((_, c)) = &expo {
        k0 += c;
    }
    if let Some(t0) = table.first() {
        k0 += t0;
    }
    let lhs = DMatrix::identity(n, n) - &k0 * Complex64::from(0.25 * h * h);
    let lu = lhs.lu();
    // exact propagator of the instantaneous part over one step
    let prop = (&m * Complex64::from(h)).exp();

    let mut d: Vec<DVector<Complex64>> = Vec::with_capacity(steps + 1);
    d.push(DVector::from_column_slice(initial));
    // running exponential sum S_n = sum_{j<n} w_j e^{lambda (n-j) h} D_j
    let mut s = DVector::zeros(n);
    let decay = expo.as_ref().map(|(l, _)| (l * h).exp());
    // memory integral at the previous point
    let mut mem_prev: DVector<Complex64> = DVector::zeros(n);

    let mut times = vec![0.0];
    let mut out = vec![initial.to_vec()];
    for step in 1..=steps {
        // memory integral without the newest point
        let mut hist = DVector::zeros(n);
        if let (Some((_, c)), Some(e)) = (&expo, decay) {
            let w = if step == 1 { 0.5 } else { 1.0 };
            s = (&s + &d[step - 1] * Complex64::from(w)) * e;
            hist += c * &s;
        }
        if !table.is_empty() {
            let len = table.len();
            let first = step.saturating_sub(len - 1);
            for j in first..step {
                let lag = step - j;
                let w = if j == 0 || (lag == len - 1 && first > 0) { 0.5 } else { 1.0 };
                hist += &table[lag] * &d[j] * Complex64::from(w);
            }
        }
        hist *= Complex64::from(h);
        let rhs = &prop * (&d[step - 1] + &mem_prev * Complex64::from(0.5 * h)) + &hist * Complex64::from(0.5 * h);
        let next = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Instability { t: step as f64 * h, total: f64::NAN })?;
        mem_prev = &hist + &k0 * &next * Complex64::from(0.5 * h);

        let t = step as f64 * h;
        let c: Vec<Complex64> = next
            .iter()
            .zip(kernel.detunings())
            .map(|(z, delta)| z * Complex64::from_polar(1.0, delta * t))
            .collect();
        let total: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if !(total <= norm.max(1.0) + PROBABILITY_TOLERANCE) {
            return Err(Error::Instability { t, total });
        }
        d.push(next);
        times.push(t);
        out.push(c);
    }
    Ok(AmplitudeTrajectory { times, amplitudes: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::kernel::LorentzianModel;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn markov_decay_is_exponential() {
        let g = DMatrix::from_element(1, 1, c(1.0));
        let k = MemoryKernel::markovian(vec![0.0], &g, &DMatrix::zeros(1, 1)).unwrap();
        let tr = solve_volterra(&k, &[c(1.0)], 5.0, 0.01).unwrap();
        for (t, p) in tr.times.iter().zip(tr.probability(0)) {
            assert!((p - (-t).exp()).abs() < 1e-4, "{t}: {p}");
        }
    }

    #[test]
    fn zero_coupling_is_frozen() {
        let z = DMatrix::zeros(2, 2);
        let k = MemoryKernel::markovian(vec![0.0, 0.0], &z, &z).unwrap();
        let init = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let tr = solve_volterra(&k, &init, 3.0, 0.01).unwrap();
        for a in &tr.amplitudes {
            assert_eq!(a.as_slice(), &init);
        }
    }

    #[test]
    fn exponential_kernel_matches_direct_table() {
        // a single-atom Lorentzian: recursive sum must equal the explicit sum
        let model = LorentzianModel {
            nu_m: 1.5,
            half_width: 0.7,
            weights: DMatrix::from_element(1, 1, c(4.0)),
            background: DMatrix::zeros(1, 1),
        };
        let k = MemoryKernel::analytic(vec![0.0], &DMatrix::zeros(1, 1), model, 1.0, 1.0).unwrap();
        let (h, t_max) = (0.005, 2.0);
        let tr = solve_volterra(&k, &[c(1.0)], t_max, h).unwrap();
        let table = k.table(h, t_max);
        let mut d = vec![c(1.0)];
        let k0 = table[0][(0, 0)];
        for step in 1..tr.times.len() {
            let mut hist = 0.5 * table[step][(0, 0)] * d[0];
            for j in 1..step {
                hist += table[step - j][(0, 0)] * d[j];
            }
            hist *= h;
            let f_prev = if step == 1 {
                c(0.0)
            } else {
                let mut prev = 0.5 * table[step - 1][(0, 0)] * d[0] + 0.5 * k0 * d[step - 1];
                for j in 1..step - 1 {
                    prev += table[step - 1 - j][(0, 0)] * d[j];
                }
                prev * h
            };
            let next = (d[step - 1] + 0.5 * h * (f_prev + hist)) / (1.0 - 0.25 * h * h * k0);
            d.push(next);
        }
        for (a, b) in tr.amplitude(0).iter().zip(&d) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn coarse_step_is_rejected() {
        let g = DMatrix::from_element(1, 1, c(100.0));
        let k = MemoryKernel::markovian(vec![0.0], &g, &DMatrix::zeros(1, 1)).unwrap();
        assert!(matches!(
            solve_volterra(&k, &[c(1.0)], 1.0, 0.01),
            Err(Error::InvalidParameter { name: "dt", .. })
        ));
    }

    #[test]
    fn unnormalized_initial_state_is_rejected() {
        let g = DMatrix::from_element(1, 1, c(1.0));
        let k = MemoryKernel::markovian(vec![0.0], &g, &DMatrix::zeros(1, 1)).unwrap();
        assert!(solve_volterra(&k, &[c(1.5)], 1.0, 0.01).is_err());
    }
}
