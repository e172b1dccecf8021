//! Scenario runner for `dipolium`: config files, bundled presets, coupling
//! sweeps, amplitude evolution and plot-data output.

pub mod config;
pub mod error;
pub mod evolve;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{parse_config, Mode, ScenarioConfig, Style};
pub use error::{CliError, CliResult};
pub use evolve::{evolve, run_evolution, Evolution};
pub use output::{config_from_header, emit_plot_data, parse_plot_data, PlotData};
pub use presets::{load_preset, preset_names};
pub use run::{run_sweep, RunArtifact};

/// Runs a validated scenario in its configured mode.
pub fn run(config: &ScenarioConfig) -> CliResult<RunArtifact> {
    match config.run.mode {
        Mode::Sweep => run_sweep(config),
        Mode::Evolve | Mode::ClosedForm => run_evolution(config),
    }
}
