//! Amplitude evolution: full memory-kernel solve or closed forms.

use dipolium::dynamics::{
    build_kernel, classify_regime, fit_lorentzian, rotating_frame, solve_volterra, strong_coupling_closed_form,
    weak_coupling_closed_form, KernelConfig, LorentzianModel, Remainder, StrongBranch,
};
use dipolium::coupling::sweep_spectrum;
use dipolium::{quadrature, AmplitudeTrajectory, MemoryKernel};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::{KernelSpec, Mode, RemainderMode, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::run::{coupling_at_atoms, green, place_atoms, RunArtifact};

/// A solved trajectory with the kernel that produced it.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub kernel: MemoryKernel,
    pub trajectory: AmplitudeTrajectory,
    /// Exchange coupling used for the superposition basis.
    pub delta_ab: f64,
    pub diagnostics: Vec<(String, String)>,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn gamma0(config: &ScenarioConfig) -> CliResult<f64> {
    config.run.gamma0.ok_or_else(|| CliError::at_key("run.gamma0", None, "missing required key"))
}

fn atom_omega(config: &ScenarioConfig) -> f64 {
    config.atoms.iter().find_map(|a| a.omega).unwrap_or(1.0)
}

/// Builds the memory kernel described by the run block.
pub fn kernel(config: &ScenarioConfig) -> CliResult<(MemoryKernel, f64, Vec<(String, String)>)> {
    let gamma0 = gamma0(config)?;
    let mut diag = Vec::new();
    let spec = config.run.kernel.as_ref().ok_or_else(|| CliError::at_key("run.kernel", None, "missing required key"))?;
    match spec {
        KernelSpec::Green { line_center, line_half_width, fit_half_widths, fit_steps, kernel_steps, remainder } => {
            let atoms = place_atoms(config, None, atom_omega(config))?;
            let green = green(config)?;
            let lo = line_center - fit_half_widths * line_half_width;
            let hi = line_center + fit_half_widths * line_half_width;
            let grid = quadrature::linspace(lo, hi, *fit_steps);
            let spectrum = sweep_spectrum(&atoms, &green, &grid)?;
            let res = fit_lorentzian(&spectrum, (0, 0), (lo, hi))?;
            diag.push(("line_center".into(), res.omega_m.to_string()));
            diag.push(("line_half_width".into(), res.half_width.to_string()));
            diag.push(("fit_residual".into(), format!("{:.3e}", res.residual)));
            let strong = (0..atoms.len()).map(|b| res.weights[(0, b)].re).sum::<f64>();
            diag.push(("regime".into(), classify_regime(strong, res.half_width / gamma0).to_string()));
            let cfg = KernelConfig {
                gamma0,
                window: (lo, hi),
                steps: *kernel_steps,
                resonance: Some(res),
                remainder: match remainder {
                    RemainderMode::Markov => Remainder::Markov,
                    RemainderMode::Sampled => Remainder::Sampled,
                },
            };
            let k = build_kernel(&atoms, &green, &cfg)?;
            let delta_ab = if atoms.len() == 2 { k.coherent()[(0, 1)].im } else { 0.0 };
            Ok((k, delta_ab, diag))
        }
        KernelSpec::Lorentzian { gamma_plus, gamma_minus, delta_omega_m, delta_ab, strong_plus } => {
            let atoms = place_atoms(config, None, atom_omega(config))?;
            let (omega_bar, detunings) = rotating_frame(&atoms, gamma0);
            let sym = DMatrix::from_element(2, 2, c(0.5));
            let anti = DMatrix::from_row_slice(2, 2, &[c(0.5), c(-0.5), c(-0.5), c(0.5)]);
            // the strongly coupled superposition sits at exact resonance
            let (weights, background, nu_m) = if *strong_plus {
                (sym * c(*gamma_plus), anti * c(*gamma_minus), -delta_ab)
            } else {
                (anti * c(*gamma_minus), sym * c(*gamma_plus), *delta_ab)
            };
            let strong = if *strong_plus { *gamma_plus } else { *gamma_minus };
            diag.push(("regime".into(), classify_regime(strong, *delta_omega_m).to_string()));
            let model = LorentzianModel { nu_m, half_width: *delta_omega_m, weights, background };
            let d = DMatrix::from_row_slice(2, 2, &[c(0.0), c(*delta_ab), c(*delta_ab), c(0.0)]);
            Ok((MemoryKernel::analytic(detunings, &d, model, gamma0, omega_bar)?, *delta_ab, diag))
        }
    }
}

/// Solves the amplitude equations with the configured kernel.
pub fn evolve(config: &ScenarioConfig) -> CliResult<Evolution> {
    config.validate()?;
    let (kernel, delta_ab, mut diagnostics) = kernel(config)?;
    let t_max = config.run.t_max.expect("validated");
    let initial = config.initial_amplitudes();
    let dt = config.run.dt.unwrap_or(0.1 / kernel.rate_hint());
    let trajectory = if t_max == 0.0 {
        AmplitudeTrajectory { times: vec![0.0], amplitudes: vec![initial] }
    } else {
        solve_volterra(&kernel, &initial, t_max, dt)?
    };
    diagnostics.push(("rate_hint".into(), format!("{:.6e}", kernel.rate_hint())));
    diagnostics.push(("dt".into(), format!("{dt:.6e}")));
    diagnostics.push(("steps".into(), (trajectory.times.len() - 1).to_string()));
    let peak = trajectory.total_probability().into_iter().fold(0.0, f64::max);
    diagnostics.push(("max_total_probability".into(), format!("{peak:.9}")));
    Ok(Evolution { kernel, trajectory, delta_ab, diagnostics })
}

fn letter(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        i.to_string()
    }
}

/// Evolution of the occupation probabilities and amplitudes.
pub fn run_evolution(config: &ScenarioConfig) -> CliResult<RunArtifact> {
    match config.run.mode {
        Mode::Evolve => {}
        Mode::ClosedForm => return run_closed_form(config),
        Mode::Sweep => return Err(CliError::at_key("run.mode", None, "run_evolution needs mode = evolve or closed-form")),
    }
    let ev = evolve(config)?;
    let n = ev.trajectory.atoms();
    let mut columns = vec!["t".to_string()];
    columns.extend((0..n).map(|i| format!("P_{}", letter(i))));
    for i in 0..n {
        columns.push(format!("Re_C_{}", letter(i)));
        columns.push(format!("Im_C_{}", letter(i)));
    }
    if n == 2 {
        columns.push("P_plus".into());
        columns.push("P_minus".into());
    }
    let view = (n == 2).then(|| dipolium::dynamics::transform(&ev.trajectory, ev.delta_ab));
    let rows = ev
        .trajectory
        .times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let amps = &ev.trajectory.amplitudes[k];
            let mut row = vec![t];
            row.extend(amps.iter().map(|z| z.norm_sqr()));
            for z in amps {
                row.push(z.re);
                row.push(z.im);
            }
            if let Some(v) = &view {
                row.push(v.c_plus[k].norm_sqr());
                row.push(v.c_minus[k].norm_sqr());
            }
            row
        })
        .collect();
    let mut art = RunArtifact::new(config, columns, rows);
    art.diagnostics = ev.diagnostics;
    Ok(art)
}

fn run_closed_form(config: &ScenarioConfig) -> CliResult<RunArtifact> {
    config.validate()?;
    if config.atoms.len() != 2 {
        return Err(CliError::config("closed-form mode needs exactly two atoms"));
    }
    let t_max = config.run.t_max.expect("validated");
    let times = if t_max == 0.0 {
        vec![0.0]
    } else {
        let steps = match config.run.dt {
            Some(dt) => (t_max / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize,
            None => 2000,
        };
        quadrature::linspace(0.0, t_max, steps)
    };
    let mut diag = Vec::new();
    let (pa, pb) = match config.run.kernel.as_ref().expect("validated") {
        KernelSpec::Green { .. } => {
            let m = coupling_at_atoms(config)?;
            let (gbb, gab, dab) = (m.gamma[(1, 1)].re, m.gamma[(0, 1)].re, m.delta[(0, 1)].re);
            diag.push(("Gamma_BB".to_string(), gbb.to_string()));
            diag.push(("Gamma_AB".to_string(), gab.to_string()));
            diag.push(("delta_AB".to_string(), dab.to_string()));
            weak_coupling_closed_form(&times, gbb, gab, dab)?
        }
        KernelSpec::Lorentzian { gamma_plus, gamma_minus, delta_omega_m, delta_ab, strong_plus } => {
            let branch = if *strong_plus { StrongBranch::Plus } else { StrongBranch::Minus };
            strong_coupling_closed_form(&times, *gamma_plus, *gamma_minus, *delta_omega_m, *delta_ab, branch)?
        }
    };
    let rows = times.iter().zip(pa.iter().zip(&pb)).map(|(&t, (&a, &b))| vec![t, a, b]).collect();
    let mut art = RunArtifact::new(config, vec!["t".into(), "P_A".into(), "P_B".into()], rows);
    art.diagnostics = diag;
    Ok(art)
}
