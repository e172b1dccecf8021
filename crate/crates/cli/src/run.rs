//! Scenario orchestration: geometry, atoms and coupling sweeps.

use dipolium::coupling::{sweep_spectrum, CouplingMatrix};
use dipolium::{quadrature, Atom, MaterialModel, SeriesControl, Sphere, SphereGeometry};
use nalgebra::Vector3;

use crate::config::{Mode, Orientation, Placement, ScenarioConfig, SweepVariable};
use crate::error::{CliError, CliResult};

/// Column payload of a run plus everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifact {
    pub config: ScenarioConfig,
    pub columns: Vec<String>,
    /// Values already rounded to the nine significant digits that are emitted.
    pub rows: Vec<Vec<f64>>,
    pub diagnostics: Vec<(String, String)>,
}

impl RunArtifact {
    pub(crate) fn new(config: &ScenarioConfig, columns: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        let mut art = Self { config: config.clone(), columns, rows, diagnostics: Vec::new() };
        art.select_columns();
        art.thin();
        for row in &mut art.rows {
            for v in row.iter_mut() {
                *v = quantize(*v);
            }
        }
        art
    }

    pub(crate) fn diag(&mut self, key: &str, value: impl ToString) {
        self.diagnostics.push((key.to_string(), value.to_string()));
    }

    /// Values of a column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    fn thin(&mut self) {
        let n = self.rows.len();
        let max = self.config.output.max_rows;
        if n <= max {
            return;
        }
        let stride = (n - 1).div_ceil(max - 1);
        let last = self.rows[n - 1].clone();
        let mut kept: Vec<Vec<f64>> = self.rows.iter().step_by(stride).cloned().collect();
        if (n - 1) % stride != 0 {
            kept.push(last);
        }
        self.rows = kept;
    }

    fn select_columns(&mut self) {
        let Some(wanted) = &self.config.output.columns else { return };
        let idx: Vec<usize> = wanted.iter().filter_map(|w| self.columns.iter().position(|c| c == w)).collect();
        self.columns = idx.iter().map(|&i| self.columns[i].clone()).collect();
        for row in &mut self.rows {
            *row = idx.iter().map(|&i| row[i]).collect();
        }
    }
}

/// Rounds to the emitted precision, so that text output parses back to the
/// stored value exactly.
pub fn quantize(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.8e}").parse().unwrap_or(x)
    } else {
        x
    }
}

pub fn geometry(config: &ScenarioConfig) -> CliResult<SphereGeometry> {
    let material = MaterialModel::reduced(config.omega_p, config.gamma)?;
    Ok(SphereGeometry::new(config.diameter, material)?)
}

pub fn green(config: &ScenarioConfig) -> CliResult<Sphere> {
    let control = SeriesControl::with_tolerance(config.run.series_tolerance);
    Ok(Sphere::with_control(geometry(config)?, control))
}

/// Polar and azimuthal angle of every atom.
fn angles(config: &ScenarioConfig, geom: &SphereGeometry) -> CliResult<Vec<(f64, f64)>> {
    let first = &config.atoms[0];
    let theta0 = match first.placement {
        Placement::Theta(t) => t,
        Placement::Chord(_) => return Err(CliError::at_key("atoms[0].chord", None, "the first atom needs an explicit theta")),
    };
    config
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| match a.placement {
            Placement::Theta(t) => Ok((t, a.phi)),
            Placement::Chord(chord) => {
                if a.delta_r != first.delta_r || a.phi != first.phi {
                    return Err(CliError::at_key(
                        &format!("atoms[{i}].chord"),
                        None,
                        "chord placement needs the same delta_r and phi as atom 0",
                    ));
                }
                let r = geom.radius() + a.delta_r;
                if chord > 2.0 * r {
                    return Err(CliError::at_key(&format!("atoms[{i}].chord"), None, format!("exceeds the diameter {}", 2.0 * r)));
                }
                Ok((theta0 + 2.0 * (0.5 * chord / r).asin(), a.phi))
            }
        })
        .collect()
}

/// Atoms with their configured offsets overridden by `delta_r` if given.
/// Frequencies default to `omega_default` where an atom has none.
pub fn place_atoms(config: &ScenarioConfig, delta_r: Option<f64>, omega_default: f64) -> CliResult<Vec<Atom>> {
    let geom = geometry(config)?;
    let mut config = config.clone();
    if let Some(dr) = delta_r {
        for a in &mut config.atoms {
            a.delta_r = dr;
        }
    }
    let angles = angles(&config, &geom)?;
    config
        .atoms
        .iter()
        .zip(angles)
        .map(|(a, (theta, phi))| {
            let pos = geom.surface_point(a.delta_r, theta, phi);
            let d = match a.dipole {
                Orientation::Radial => pos.normalize(),
                Orientation::Tangential => Vector3::new(theta.cos() * phi.cos(), theta.cos() * phi.sin(), -theta.sin()),
                Orientation::Vector(v) => Vector3::from(v),
            };
            Ok(Atom::with_real_dipole(pos, d, a.omega.unwrap_or(omega_default))?)
        })
        .collect()
}

/// `Gamma` and `delta` of every pair, each column at its atom's frequency.
pub fn coupling_at_atoms(config: &ScenarioConfig) -> CliResult<CouplingMatrix> {
    let omega = config.atoms.iter().find_map(|a| a.omega).ok_or_else(|| CliError::at_key("atoms[0].omega", None, "missing required key"))?;
    let atoms = place_atoms(config, None, omega)?;
    Ok(CouplingMatrix::at_atom_frequencies(&atoms, &green(config)?)?)
}

fn sweep_columns(first: &str, n: usize) -> Vec<String> {
    let names: &[&str] = if n >= 2 { &["Gamma_AA", "Gamma_AB", "delta_AA", "delta_AB"] } else { &["Gamma_AA", "delta_AA"] };
    std::iter::once(first).chain(names.iter().copied()).map(String::from).collect()
}

fn sweep_row(x: f64, m: &CouplingMatrix) -> Vec<f64> {
    if m.len() >= 2 {
        vec![x, m.gamma[(0, 0)].re, m.gamma[(0, 1)].re, m.delta[(0, 0)].re, m.delta[(0, 1)].re]
    } else {
        vec![x, m.gamma[(0, 0)].re, m.delta[(0, 0)].re]
    }
}

/// Couplings over a frequency or surface-distance grid.
pub fn run_sweep(config: &ScenarioConfig) -> CliResult<RunArtifact> {
    if config.run.mode != Mode::Sweep {
        return Err(CliError::at_key("run.mode", None, "run_sweep needs mode = sweep"));
    }
    config.validate()?;
    let (lo, hi, steps) = config.run.range.expect("validated");
    let grid = if hi > lo { quadrature::linspace(lo, hi, steps) } else { vec![lo] };
    let green = green(config)?;
    let n = config.atoms.len();
    let art = match config.run.sweep {
        SweepVariable::Omega => {
            let atoms = place_atoms(config, None, 0.5 * (lo + hi))?;
            let spectrum = sweep_spectrum(&atoms, &green, &grid)?;
            let rows = spectrum.omega.iter().zip(&spectrum.entries).map(|(&w, m)| sweep_row(w, m)).collect();
            RunArtifact::new(config, sweep_columns("omega", n), rows)
        }
        SweepVariable::DeltaR => {
            let omega = config.run.omega.expect("validated");
            let rows = grid
                .iter()
                .map(|&dr| {
                    let atoms = place_atoms(config, Some(dr), omega)?;
                    Ok(sweep_row(dr, &CouplingMatrix::at_frequency(&atoms, omega, &green)?))
                })
                .collect::<CliResult<Vec<_>>>()?;
            RunArtifact::new(config, sweep_columns("delta_r", n), rows)
        }
    };
    let mut art = art;
    art.diag("grid_points", grid.len());
    art.diag("series_tolerance", config.run.series_tolerance);
    Ok(art)
}
