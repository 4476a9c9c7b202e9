//! Bridge between the harness and registration methods.
//!
//! A method is described by an [`AdapterSpec`]: command templates for the
//! preparation and registration stages, the location of the warped landmarks
//! it produces, and the temporary files to remove afterwards. Commands are
//! argument vectors and never go through a shell.

mod command;
mod hooks;
pub mod mock;
mod preprocess;
mod process;
mod timing;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::DatasetError;

pub use command::{render_command, render_path, PLACEHOLDERS};
pub use hooks::{cleanup_workspace, extract_warped_landmarks, warped_landmarks_path};
pub use mock::{mock_adapter_spec, run_mock, MockExit, MockKind, MockRequest};
pub use preprocess::preprocess_image;
pub use process::{execute_with_timeout, ExecOptions, ExecutionOutcome, STDERR_FILE, STDOUT_FILE};
pub use timing::{calibrate_machine_factor, normalize_time};

/// Three hours.
pub const DEFAULT_TIMEOUT_S: f64 = 10_800.0;
pub const DEFAULT_GRACE_S: f64 = 5.0;

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("unknown placeholder {{{0}}}")]
    UnknownPlaceholder(String),
    #[error("unterminated placeholder in template {0:?}")]
    UnterminatedPlaceholder(String),
    #[error("template uses {{method_config}} but the adapter defines none")]
    MissingMethodConfig,
    #[error("adapter {path}: {reason}")]
    InvalidSpec { path: PathBuf, reason: String },
    #[error("warped landmarks not found at {0}")]
    MissingOutput(PathBuf),
    #[error("warped landmarks at {path} unreadable: {source}")]
    MalformedOutput {
        path: PathBuf,
        #[source]
        source: DatasetError,
    },
    #[error("machine factor must be positive, got {0}")]
    NonPositiveFactor(f64),
    #[error("{0}: unsupported image format for preprocessing")]
    UnsupportedFormat(PathBuf),
    #[error("invalid mock specification {0:?}")]
    InvalidMock(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl AdapterError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AdapterError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = AdapterError> = std::result::Result<T, E>;

/// Optional image preprocessing applied before a method sees the images.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreprocessMode {
    #[default]
    None,
    Grayscale,
    ChannelNormalize,
}

impl fmt::Display for PreprocessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreprocessMode::None => "none",
            PreprocessMode::Grayscale => "grayscale",
            PreprocessMode::ChannelNormalize => "channel-normalize",
        })
    }
}

impl FromStr for PreprocessMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(PreprocessMode::None),
            "grayscale" => Ok(PreprocessMode::Grayscale),
            "channel-normalize" => Ok(PreprocessMode::ChannelNormalize),
            other => Err(format!("unknown preprocessing mode {other:?}")),
        }
    }
}

/// Command template: one argument per element, placeholders in braces.
pub type CommandTemplate = Vec<String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterSpec {
    pub method_name: String,
    #[serde(default)]
    pub prepare_commands: Vec<CommandTemplate>,
    pub execute_commands: Vec<CommandTemplate>,
    #[serde(alias = "warped_landmarks")]
    pub warped_landmarks_path_template: String,
    #[serde(default)]
    pub cleanup_globs: Vec<String>,
    #[serde(default, alias = "environment")]
    pub environment_overrides: BTreeMap<String, String>,
    #[serde(default)]
    pub preprocessing: PreprocessMode,
    /// Method parameter file, substituted for `{method_config}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method_config: Option<PathBuf>,
}

impl AdapterSpec {
    /// Checks the structural invariants: at least one non-empty execute
    /// command and only documented placeholders.
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| AdapterError::InvalidSpec {
            path: PathBuf::from(&self.method_name),
            reason,
        };
        if self.method_name.trim().is_empty() {
            return Err(invalid("method_name is empty".into()));
        }
        if self.execute_commands.is_empty() {
            return Err(invalid("execute_commands must list at least one command".into()));
        }
        if let Some(i) = self
            .prepare_commands
            .iter()
            .chain(&self.execute_commands)
            .position(|c| c.is_empty())
        {
            return Err(invalid(format!("command #{i} has no program")));
        }
        let templates = self
            .prepare_commands
            .iter()
            .chain(&self.execute_commands)
            .flatten()
            .chain(std::iter::once(&self.warped_landmarks_path_template));
        for t in templates {
            command::check_template(t)?;
            if t.contains("{method_config}") && self.method_config.is_none() {
                return Err(AdapterError::MissingMethodConfig);
            }
        }
        Ok(())
    }
}

/// Reads a TOML adapter spec; a relative `method_config` is resolved against
/// the spec's directory.
pub fn load_adapter_spec(path: impl AsRef<Path>) -> Result<AdapterSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| AdapterError::io(path, e))?;
    let mut spec: AdapterSpec = toml::from_str(&text).map_err(|e| AdapterError::InvalidSpec {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    if let Some(cfg) = spec.method_config.take() {
        spec.method_config = Some(path.parent().unwrap_or(Path::new("")).join(cfg));
    }
    spec.validate().map_err(|e| match e {
        AdapterError::InvalidSpec { reason, .. } => AdapterError::InvalidSpec {
            path: path.to_path_buf(),
            reason,
        },
        other => other,
    })?;
    Ok(spec)
}
