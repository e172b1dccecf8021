use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dipolium_cli::config::{Mode, Style};
use dipolium_cli::{emit_plot_data, load_preset, parse_config, preset_names, CliError, CliResult};

/// Couplings and amplitude dynamics of two-level atoms near a dielectric microsphere.
#[derive(Debug, Parser)]
#[command(name = "dipolium", version)]
struct Args {
    /// Scenario file (`section.key = value` lines).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled scenario.
    #[arg(long)]
    preset: Option<String>,
    /// List bundled scenarios and exit.
    #[arg(long)]
    list_presets: bool,
    #[arg(long, value_parser = ["sweep", "evolve", "closed-form"])]
    mode: Option<String>,
    /// Output file; standard output if omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    omega_min: Option<f64>,
    #[arg(long)]
    omega_max: Option<f64>,
    #[arg(long)]
    omega_steps: Option<usize>,
    /// End time in units of 1/Gamma_0.
    #[arg(long)]
    tmax: Option<f64>,
    /// Time step in units of 1/Gamma_0.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_parser = ["columns", "gnuplot"])]
    style: Option<String>,
}

fn execute(args: Args) -> CliResult<()> {
    if args.list_presets {
        for name in preset_names() {
            println!("{name}");
        }
        return Ok(());
    }
    let mut config = match (&args.config, &args.preset) {
        (Some(path), None) => parse_config(&std::fs::read_to_string(path)?)?,
        (None, Some(name)) => load_preset(name)?,
        _ => return Err(CliError::config("give --config PATH or --preset NAME")),
    };
    if let Some(mode) = &args.mode {
        config.run.mode = mode.parse::<Mode>().map_err(CliError::config)?;
    }
    if args.omega_min.is_some() || args.omega_max.is_some() || args.omega_steps.is_some() {
        let (lo, hi, n) = config.run.range.unwrap_or((1.0, 1.0, 1));
        config.run.range = Some((args.omega_min.unwrap_or(lo), args.omega_max.unwrap_or(hi), args.omega_steps.unwrap_or(n)));
    }
    if let Some(t) = args.tmax {
        config.run.t_max = Some(t);
    }
    if let Some(dt) = args.dt {
        config.run.dt = Some(dt);
    }
    if let Some(style) = &args.style {
        config.output.style = style.parse::<Style>().map_err(CliError::config)?;
    }
    if let Some(path) = &args.output {
        config.output.path = Some(path.display().to_string());
    }
    config.validate()?;
    let artifact = dipolium_cli::run(&config)?;
    let text = emit_plot_data(&artifact, config.output.style);
    match &config.output.path {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dipolium: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
