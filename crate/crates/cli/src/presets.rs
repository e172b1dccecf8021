//! Scenario files bundled with the binary.

use crate::config::{parse_config, ScenarioConfig};
use crate::error::{CliError, CliResult};

const PRESETS: &[(&str, &str)] = &[
    ("fig1a", include_str!("../presets/fig1a.cfg")),
    ("fig1b", include_str!("../presets/fig1b.cfg")),
    ("fig2", include_str!("../presets/fig2.cfg")),
    ("fig3-curves1", include_str!("../presets/fig3-curves1.cfg")),
    ("fig3-curves2", include_str!("../presets/fig3-curves2.cfg")),
    ("fig4-i", include_str!("../presets/fig4-i.cfg")),
    ("fig4-ii", include_str!("../presets/fig4-ii.cfg")),
    ("fig4-iii", include_str!("../presets/fig4-iii.cfg")),
    ("free-space", include_str!("../presets/free-space.cfg")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn load_preset(name: &str) -> CliResult<ScenarioConfig> {
    let text = preset_text(name).ok_or_else(|| {
        let known: Vec<_> = preset_names().collect();
        CliError::config(format!("unknown preset `{name}` (known: {})", known.join(", ")))
    })?;
    parse_config(text)
}
