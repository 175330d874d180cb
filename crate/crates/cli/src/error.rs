use std::fmt;
use std::path::PathBuf;

use ghcyl::Error as CoreError;
use serde::Serialize;
use serde_json::{json, Value};

/// Exit status for a mathematical refusal.
pub const EXIT_REFUSAL: i32 = 1;
/// Exit status for usage, configuration and I/O errors (clap uses it too).
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Every violation found while validating a config.
    Config(Vec<String>),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// The mathematics forbids the request; carries a machine-readable body.
    Refusal(Refusal),
}

#[derive(Debug, Clone, Serialize)]
pub struct Refusal {
    pub kind: String,
    pub message: String,
    pub detail: Value,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Refusal(_) => EXIT_REFUSAL,
            _ => EXIT_USAGE,
        }
    }

    pub fn refusal(kind: &str, message: impl Into<String>, detail: Value) -> Self {
        Self::Refusal(Refusal { kind: kind.into(), message: message.into(), detail })
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Config(v) => {
                write!(f, "invalid configuration ({} problem{}):", v.len(), if v.len() == 1 { "" } else { "s" })?;
                for m in v {
                    write!(f, "\n  - {m}")?;
                }
                Ok(())
            }
            Self::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Self::Refusal(r) => write!(f, "refused ({}): {}", r.kind, r.message),
        }
    }
}

impl std::error::Error for CliError {}

/// Malformed input is a usage error; everything else the core rejects is a
/// statement about the operator and therefore a refusal.
impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let message = e.to_string();
        let (kind, detail) = match &e {
            CoreError::Malformed(_) => return Self::Usage(message),
            CoreError::VanishingSymbol(w) => ("vanishing_symbol", json!({ "witness": w })),
            CoreError::SymbolNotPointwise => ("symbol_not_pointwise", Value::Null),
            CoreError::DegenerateOperator => ("degenerate_operator", Value::Null),
            CoreError::Precondition(_) => ("precondition", Value::Null),
            CoreError::UnsolvableFiber { defect } => ("unsolvable_fiber", json!({ "defect": defect })),
            CoreError::UnsolvableFibers { bins } => ("unsolvable_fibers", json!({ "xi_bins": bins })),
            CoreError::ExponentOverflow { exponent } => ("exponent_overflow", json!({ "exponent": exponent })),
            CoreError::Periodicity { defect } => ("periodicity", json!({ "defect": defect })),
            CoreError::WindowTooSmall { points } => ("fit_window_too_small", json!({ "points": points })),
            CoreError::ZeroWindow => ("fit_window_zero", Value::Null),
            CoreError::Vanishes { t } => ("vanishes", json!({ "t": t })),
        };
        Self::refusal(kind, message, detail)
    }
}

pub type CliResult<T> = Result<T, CliError>;
