//! Scenario files: line-oriented `section.key = value` pairs.
//!
//! Sections are `material`, `sphere`, `atoms[i]`, `run` and `output`;
//! `#` starts a comment. Unknown, duplicate and missing keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sweep,
    Evolve,
    ClosedForm,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sweep" => Ok(Mode::Sweep),
            "evolve" => Ok(Mode::Evolve),
            "closed-form" => Ok(Mode::ClosedForm),
            _ => Err(format!("expected sweep|evolve|closed-form, got `{s}`")),
        }
    }
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sweep => "sweep",
            Mode::Evolve => "evolve",
            Mode::ClosedForm => "closed-form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Columns,
    Gnuplot,
}

impl FromStr for Style {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "columns" => Ok(Style::Columns),
            "gnuplot" => Ok(Style::Gnuplot),
            _ => Err(format!("expected columns|gnuplot, got `{s}`")),
        }
    }
}

impl Style {
    pub fn as_str(self) -> &'static str {
        match self {
            Style::Columns => "columns",
            Style::Gnuplot => "gnuplot",
        }
    }
}

/// Dipole orientation of one atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Orientation {
    /// Along the outward normal at the atom.
    Radial,
    /// Along the polar unit vector at the atom.
    Tangential,
    /// Fixed Cartesian vector (units of `d_0`).
    Vector([f64; 3]),
}

/// Polar placement: an explicit angle, or the chord distance `R` from atom 0
/// measured along the sphere-concentric circle through both atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    Theta(f64),
    Chord(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpec {
    pub delta_r: f64,
    pub placement: Placement,
    pub phi: f64,
    pub dipole: Orientation,
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Omega,
    DeltaR,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemainderMode {
    Sampled,
    Markov,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// Built from the Green tensor around a fitted line.
    Green {
        line_center: f64,
        line_half_width: f64,
        fit_half_widths: f64,
        fit_steps: usize,
        kernel_steps: usize,
        remainder: RemainderMode,
    },
    /// Two atoms coupled to a single Lorentzian line with given parameters.
    Lorentzian {
        gamma_plus: f64,
        gamma_minus: f64,
        delta_omega_m: f64,
        delta_ab: f64,
        strong_plus: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub name: String,
    pub mode: Mode,
    pub sweep: SweepVariable,
    pub range: Option<(f64, f64, usize)>,
    /// Fixed frequency of a `delta_r` sweep.
    pub omega: Option<f64>,
    pub gamma0: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub initial: Option<Vec<Complex64>>,
    /// Required for evolve and closed-form runs.
    pub kernel: Option<KernelSpec>,
    pub series_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub path: Option<String>,
    pub style: Style,
    pub columns: Option<Vec<String>>,
    /// Rows beyond this are thinned to an even stride (first and last kept).
    pub max_rows: usize,
}

pub const DEFAULT_MAX_ROWS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub omega_p: f64,
    pub gamma: f64,
    pub diameter: f64,
    pub atoms: Vec<AtomSpec>,
    pub run: RunSpec,
    pub output: OutputSpec,
}

struct Entry {
    value: String,
    line: usize,
}

struct Table {
    entries: BTreeMap<String, Entry>,
}

impl Table {
    fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::Config {
                    line: Some(line),
                    key: None,
                    message: format!("expected `section.key = value`, got `{content}`"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !key.contains('.') {
                return Err(CliError::at_key(&key, Some(line), "key must be of the form section.key"));
            }
            if let Some(prev) = entries.get(&key) {
                let prev: &Entry = prev;
                return Err(CliError::at_key(&key, Some(line), format!("duplicate key (first set at line {})", prev.line)));
            }
            entries.insert(key, Entry { value, line });
        }
        Ok(Self { entries })
    }

    fn take_str(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key).map(|e| (e.value, e.line))
    }

    fn take<T: FromStr>(&mut self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take_str(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::at_key(key, Some(line), format!("cannot parse `{v}`: {e}"))),
        }
    }

    fn require<T: FromStr>(&mut self, key: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.take(key)?.ok_or_else(|| CliError::at_key(key, None, "missing required key"))
    }

    fn finish(self) -> CliResult<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, e)) => Err(CliError::at_key(&key, Some(e.line), "unknown key")),
        }
    }
}

fn parse_vector(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated components, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (k, p) in parts.iter().enumerate() {
        v[k] = p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"))?;
    }
    Ok(v)
}

impl FromStr for Orientation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "radial" => Ok(Orientation::Radial),
            "tangential" => Ok(Orientation::Tangential),
            _ => parse_vector(s).map(Orientation::Vector),
        }
    }
}

fn parse_initial(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            Complex64::from_str(p).map_err(|_| format!("`{p}` is not a complex number"))
        })
        .collect()
}

struct Initial(Vec<Complex64>);

impl FromStr for Initial {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_initial(s).map(Initial)
    }
}

struct Columns(Vec<String>);

impl FromStr for Columns {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let cols: Vec<String> = s.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect();
        if cols.is_empty() {
            return Err("empty column list".into());
        }
        Ok(Columns(cols))
    }
}

fn positive(key: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::at_key(key, None, format!("must be positive, got {v}")))
    }
}

fn atom_indices(table: &Table) -> CliResult<usize> {
    let mut max = None;
    for key in table.entries.keys() {
        if let Some(rest) = key.strip_prefix("atoms[") {
            let Some((idx, _)) = rest.split_once("].") else {
                return Err(CliError::at_key(key, None, "expected atoms[i].key"));
            };
            let i: usize = idx.parse().map_err(|_| CliError::at_key(key, None, "atom index must be a non-negative integer"))?;
            max = Some(max.map_or(i, |m: usize| m.max(i)));
        }
    }
    Ok(max.map_or(0, |m| m + 1))
}

fn parse_atom(table: &mut Table, i: usize) -> CliResult<AtomSpec> {
    let key = |k: &str| format!("atoms[{i}].{k}");
    let delta_r: f64 = table.require(&key("delta_r"))?;
    positive(&key("delta_r"), delta_r)?;
    let theta: Option<f64> = table.take(&key("theta"))?;
    let chord: Option<f64> = table.take(&key("chord"))?;
    let placement = match (theta, chord) {
        (Some(_), Some(_)) => return Err(CliError::at_key(&key("chord"), None, "give either theta or chord, not both")),
        (None, Some(r)) => Placement::Chord(positive(&key("chord"), r)?),
        (Some(t), None) => Placement::Theta(t),
        (None, None) => Placement::Theta(0.0),
    };
    let phi = table.take(&key("phi"))?.unwrap_or(0.0);
    let dipole = table.require(&key("dipole"))?;
    if let Orientation::Vector(v) = dipole {
        if v.iter().all(|&x| x == 0.0) {
            return Err(CliError::at_key(&key("dipole"), None, "dipole must be non-zero"));
        }
    }
    let omega: Option<f64> = table.take(&key("omega"))?;
    if let Some(w) = omega {
        positive(&key("omega"), w)?;
    }
    Ok(AtomSpec { delta_r, placement, phi, dipole, omega })
}

fn parse_kernel(table: &mut Table, mode: Mode) -> CliResult<Option<KernelSpec>> {
    let kind: Option<String> = table.take("run.kernel")?;
    let kind = match (kind, mode) {
        (Some(k), _) => k,
        (None, Mode::Sweep) => return Ok(None),
        (None, _) => "green".to_string(),
    };
    let spec = match kind.as_str() {
        "green" => {
            let remainder = match table.take::<String>("run.remainder")?.as_deref() {
                None | Some("markov") => RemainderMode::Markov,
                Some("sampled") => RemainderMode::Sampled,
                Some(other) => {
                    return Err(CliError::at_key("run.remainder", None, format!("expected markov|sampled, got `{other}`")))
                }
            };
            Ok(KernelSpec::Green {
                line_center: positive("run.line_center", table.require("run.line_center")?)?,
                line_half_width: positive("run.line_half_width", table.require("run.line_half_width")?)?,
                fit_half_widths: positive("run.fit_half_widths", table.take("run.fit_half_widths")?.unwrap_or(40.0))?,
                fit_steps: table.take("run.fit_steps")?.unwrap_or(640),
                kernel_steps: table.take("run.kernel_steps")?.unwrap_or(800),
                remainder,
            })
        }
        "lorentzian" => {
            let branch: String = table.take("run.branch")?.unwrap_or_else(|| "plus".to_string());
            let strong_plus = match branch.as_str() {
                "plus" => true,
                "minus" => false,
                other => return Err(CliError::at_key("run.branch", None, format!("expected plus|minus, got `{other}`"))),
            };
            Ok(KernelSpec::Lorentzian {
                gamma_plus: table.require("run.gamma_plus")?,
                gamma_minus: table.require("run.gamma_minus")?,
                delta_omega_m: positive("run.delta_omega_m", table.require("run.delta_omega_m")?)?,
                delta_ab: table.require("run.delta_ab")?,
                strong_plus,
            })
        }
        other => Err(CliError::at_key("run.kernel", None, format!("expected green|lorentzian, got `{other}`"))),
    };
    spec.map(Some)
}

/// Parses and validates a scenario file.
pub fn parse_config(text: &str) -> CliResult<ScenarioConfig> {
    let mut table = Table::parse(text)?;

    let omega_p: f64 = table.require("material.omega_p")?;
    if !(omega_p >= 0.0) {
        return Err(CliError::at_key("material.omega_p", None, "must be non-negative"));
    }
    let gamma = positive("material.gamma", table.require("material.gamma")?)?;
    let diameter = positive("sphere.diameter", table.require("sphere.diameter")?)?;

    let n = atom_indices(&table)?;
    if n == 0 {
        return Err(CliError::config("at least one atom required"));
    }
    let atoms = (0..n).map(|i| parse_atom(&mut table, i)).collect::<CliResult<Vec<_>>>()?;

    let name = table.take("run.name")?.unwrap_or_else(|| "custom".to_string());
    let mode: Mode = table.require("run.mode")?;
    let sweep = match table.take::<String>("run.sweep")?.as_deref() {
        None | Some("omega") => SweepVariable::Omega,
        Some("delta_r") => SweepVariable::DeltaR,
        Some(other) => return Err(CliError::at_key("run.sweep", None, format!("expected omega|delta_r, got `{other}`"))),
    };
    let prefix = match sweep {
        SweepVariable::Omega => "omega",
        SweepVariable::DeltaR => "delta_r",
    };
    let lo: Option<f64> = table.take(&format!("run.{prefix}_min"))?;
    let hi: Option<f64> = table.take(&format!("run.{prefix}_max"))?;
    let steps: Option<usize> = table.take(&format!("run.{prefix}_steps"))?;
    let omega: Option<f64> = if sweep == SweepVariable::DeltaR { table.take("run.omega")? } else { None };
    let gamma0: Option<f64> = table.take("run.gamma0")?;
    let t_max: Option<f64> = table.take("run.t_max")?;
    let dt: Option<f64> = table.take("run.dt")?;
    let initial: Option<Initial> = table.take("run.initial")?;
    let kernel = parse_kernel(&mut table, mode)?;
    let series_tolerance = positive("run.series_tolerance", table.take("run.series_tolerance")?.unwrap_or(1e-9))?;

    let range = match (lo, hi, steps) {
        (Some(l), Some(h), Some(s)) => Some((l, h, s)),
        (None, None, None) => None,
        _ => {
            return Err(CliError::at_key(
                &format!("run.{prefix}_min"),
                None,
                format!("run.{prefix}_min, run.{prefix}_max and run.{prefix}_steps must be given together"),
            ))
        }
    };

    let output = OutputSpec {
        path: table.take("output.path")?,
        style: table.take("output.style")?.unwrap_or(Style::Columns),
        columns: table.take::<Columns>("output.columns")?.map(|c| c.0),
        max_rows: table.take("output.max_rows")?.unwrap_or(DEFAULT_MAX_ROWS),
    };
    if output.max_rows < 2 {
        return Err(CliError::at_key("output.max_rows", None, "must be at least 2"));
    }
    table.finish()?;

    let config = ScenarioConfig {
        omega_p,
        gamma,
        diameter,
        atoms,
        run: RunSpec {
            name,
            mode,
            sweep,
            range,
            omega,
            gamma0,
            t_max,
            dt,
            initial: initial.map(|i| i.0),
            kernel,
            series_tolerance,
        },
        output,
    };
    config.validate()?;
    Ok(config)
}

impl ScenarioConfig {
    /// Checks the keys each mode needs; also run after command-line overrides.
    pub fn validate(&self) -> CliResult<()> {
        let run = &self.run;
        match run.mode {
            Mode::Sweep => {
                let prefix = match run.sweep {
                    SweepVariable::Omega => "omega",
                    SweepVariable::DeltaR => "delta_r",
                };
                let Some((lo, hi, steps)) = run.range else {
                    return Err(CliError::at_key(&format!("run.{prefix}_min"), None, "missing required key for sweep mode"));
                };
                if !(lo > 0.0 && hi >= lo) {
                    return Err(CliError::at_key(&format!("run.{prefix}_min"), None, "need 0 < min <= max"));
                }
                if steps == 0 && hi > lo {
                    return Err(CliError::at_key(&format!("run.{prefix}_steps"), None, "must be at least 1"));
                }
                if run.sweep == SweepVariable::DeltaR && run.omega.is_none() {
                    return Err(CliError::at_key("run.omega", None, "missing required key for a delta_r sweep"));
                }
            }
            Mode::Evolve | Mode::ClosedForm => {
                let t_max = run.t_max.ok_or_else(|| CliError::at_key("run.t_max", None, "missing required key"))?;
                if !(t_max >= 0.0 && t_max.is_finite()) {
                    return Err(CliError::at_key("run.t_max", None, "must be non-negative"));
                }
                if let Some(dt) = run.dt {
                    positive("run.dt", dt)?;
                }
                let kernel = run.kernel.as_ref().ok_or_else(|| CliError::at_key("run.kernel", None, "missing required key"))?;
                match kernel {
                    KernelSpec::Green { .. } => {
                        let g0 = run.gamma0.ok_or_else(|| CliError::at_key("run.gamma0", None, "missing required key"))?;
                        positive("run.gamma0", g0)?;
                        for (i, a) in self.atoms.iter().enumerate() {
                            if a.omega.is_none() {
                                return Err(CliError::at_key(&format!("atoms[{i}].omega"), None, "missing required key"));
                            }
                        }
                    }
                    KernelSpec::Lorentzian { .. } => {
                        if self.atoms.len() != 2 {
                            return Err(CliError::config("a lorentzian kernel needs exactly two atoms"));
                        }
                        if run.mode == Mode::Evolve {
                            let g0 = run.gamma0.ok_or_else(|| CliError::at_key("run.gamma0", None, "missing required key"))?;
                            positive("run.gamma0", g0)?;
                        }
                    }
                }
                if let Some(init) = &run.initial {
                    if init.len() != self.atoms.len() {
                        return Err(CliError::at_key(
                            "run.initial",
                            None,
                            format!("expected {} amplitudes, got {}", self.atoms.len(), init.len()),
                        ));
                    }
                    let norm: f64 = init.iter().map(|z| z.norm_sqr()).sum();
                    if norm > 1.0 + 1e-12 {
                        return Err(CliError::at_key("run.initial", None, format!("total occupation {norm} exceeds 1")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Initial amplitudes: the configured ones or `C_A(0) = 1`, others 0.
    pub fn initial_amplitudes(&self) -> Vec<Complex64> {
        self.run.initial.clone().unwrap_or_else(|| {
            let mut v = vec![Complex64::new(0.0, 0.0); self.atoms.len()];
            v[0] = Complex64::new(1.0, 0.0);
            v
        })
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("material.omega_p", self.omega_p.to_string());
        put("material.gamma", self.gamma.to_string());
        put("sphere.diameter", self.diameter.to_string());
        for (i, a) in self.atoms.iter().enumerate() {
            put(&format!("atoms[{i}].delta_r"), a.delta_r.to_string());
            match a.placement {
                Placement::Theta(t) => put(&format!("atoms[{i}].theta"), t.to_string()),
                Placement::Chord(r) => put(&format!("atoms[{i}].chord"), r.to_string()),
            }
            put(&format!("atoms[{i}].phi"), a.phi.to_string());
            let d = match a.dipole {
                Orientation::Radial => "radial".to_string(),
                Orientation::Tangential => "tangential".to_string(),
                Orientation::Vector(v) => format!("{}, {}, {}", v[0], v[1], v[2]),
            };
            put(&format!("atoms[{i}].dipole"), d);
            if let Some(w) = a.omega {
                put(&format!("atoms[{i}].omega"), w.to_string());
            }
        }
        let r = &self.run;
        put("run.name", r.name.clone());
        put("run.mode", r.mode.as_str().to_string());
        let prefix = match r.sweep {
            SweepVariable::Omega => "omega",
            SweepVariable::DeltaR => "delta_r",
        };
        put("run.sweep", prefix.to_string());
        if let Some((lo, hi, n)) = r.range {
            put(&format!("run.{prefix}_min"), lo.to_string());
            put(&format!("run.{prefix}_max"), hi.to_string());
            put(&format!("run.{prefix}_steps"), n.to_string());
        }
        if let Some(w) = r.omega {
            put("run.omega", w.to_string());
        }
        for (k, v) in [("run.gamma0", r.gamma0), ("run.t_max", r.t_max), ("run.dt", r.dt)] {
            if let Some(v) = v {
                put(k, v.to_string());
            }
        }
        if let Some(init) = &r.initial {
            put("run.initial", init.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect::<Vec<_>>().join(", "));
        }
        match &r.kernel {
            None => {}
            Some(KernelSpec::Green { line_center, line_half_width, fit_half_widths, fit_steps, kernel_steps, remainder }) => {
                put("run.kernel", "green".into());
                put("run.line_center", line_center.to_string());
                put("run.line_half_width", line_half_width.to_string());
                put("run.fit_half_widths", fit_half_widths.to_string());
                put("run.fit_steps", fit_steps.to_string());
                put("run.kernel_steps", kernel_steps.to_string());
                let rem = match remainder {
                    RemainderMode::Markov => "markov",
                    RemainderMode::Sampled => "sampled",
                };
                put("run.remainder", rem.into());
            }
            Some(KernelSpec::Lorentzian { gamma_plus, gamma_minus, delta_omega_m, delta_ab, strong_plus }) => {
                put("run.kernel", "lorentzian".into());
                put("run.gamma_plus", gamma_plus.to_string());
                put("run.gamma_minus", gamma_minus.to_string());
                put("run.delta_omega_m", delta_omega_m.to_string());
                put("run.delta_ab", delta_ab.to_string());
                put("run.branch", if *strong_plus { "plus" } else { "minus" }.into());
            }
        }
        put("run.series_tolerance", r.series_tolerance.to_string());
        if let Some(p) = &self.output.path {
            put("output.path", p.clone());
        }
        put("output.style", self.output.style.as_str().to_string());
        if let Some(c) = &self.output.columns {
            put("output.columns", c.join(", "));
        }
        put("output.max_rows", self.output.max_rows.to_string());
        s
    }
}
