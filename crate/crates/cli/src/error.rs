use thiserror::Error;

/// Failures of a scenario run, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", location(*.line, .key))]
    Config {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },

    #[error("numerical error: {0}")]
    Numerical(#[from] dipolium::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn location(line: Option<usize>, key: &Option<String>) -> String {
    match (line, key) {
        (Some(l), Some(k)) => format!(" at line {l} (`{k}`)"),
        (Some(l), None) => format!(" at line {l}"),
        (None, Some(k)) => format!(" (`{k}`)"),
        (None, None) => String::new(),
    }
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config { line: None, key: None, message: message.into() }
    }

    pub fn at_key(key: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        CliError::Config { line, key: Some(key.to_string()), message: message.into() }
    }

    /// 2 for configuration problems, 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(e) if e.is_numerical() => 3,
            // invalid physical parameters surface from the core as input errors
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
