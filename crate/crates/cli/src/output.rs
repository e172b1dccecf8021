//! Plot-data text: `#` header lines followed by a whitespace-delimited block.

use crate::config::{parse_config, ScenarioConfig, Style};
use crate::error::{CliError, CliResult};
use crate::run::RunArtifact;

const CONFIG_PREFIX: &str = "# config: ";
const COLUMNS_PREFIX: &str = "# columns: ";

/// Renders an artifact. The header echoes the full configuration, so the
/// file can be re-run from its own header.
pub fn emit_plot_data(artifact: &RunArtifact, style: Style) -> String {
    let mut out = String::new();
    let cfg = &artifact.config;
    out.push_str(&format!("# dipolium {} preset={}\n", env!("CARGO_PKG_VERSION"), cfg.run.name));
    out.push_str(&format!("# mode={} style={}\n", cfg.run.mode.as_str(), style.as_str()));
    for line in cfg.to_text().lines() {
        out.push_str(CONFIG_PREFIX);
        out.push_str(line);
        out.push('\n');
    }
    for (k, v) in &artifact.diagnostics {
        out.push_str(&format!("# diag: {k} = {v}\n"));
    }
    out.push_str(&format!("# rows: {}\n", artifact.rows.len()));
    out.push_str(COLUMNS_PREFIX);
    out.push_str(&artifact.columns.join(" "));
    out.push('\n');
    if style == Style::Gnuplot && artifact.columns.len() > 1 {
        let plots: Vec<String> = artifact.columns[1..]
            .iter()
            .enumerate()
            .map(|(i, name)| format!("'' using 1:{} with lines title '{}'", i + 2, name))
            .collect();
        out.push_str(&format!("# gnuplot: plot {}\n", plots.join(", ")));
    }
    for row in &artifact.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.8e}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Column names and numeric rows of emitted plot data.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_plot_data(text: &str) -> CliResult<PlotData> {
    let mut columns = None;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix(COLUMNS_PREFIX) {
            columns = Some(rest.split_whitespace().map(String::from).collect::<Vec<_>>());
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Config { line: Some(i + 1), key: None, message: format!("bad number: {e}") })?;
        rows.push(row);
    }
    let columns = columns.ok_or_else(|| CliError::config("no column header"))?;
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != columns.len()) {
        return Err(CliError::config(format!("row {i} has {} values, header declares {}", r.len(), columns.len())));
    }
    Ok(PlotData { columns, rows })
}

/// Recovers the configuration echoed in an emitted header.
pub fn config_from_header(text: &str) -> CliResult<ScenarioConfig> {
    let body: String = text
        .lines()
        .filter_map(|l| l.strip_prefix(CONFIG_PREFIX))
        .map(|l| format!("{l}\n"))
        .collect();
    parse_config(&body)
}
