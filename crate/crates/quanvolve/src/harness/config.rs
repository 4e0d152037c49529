//! Experiment configuration: the full description of one training run.
//!
//! Configs can be built in code, loaded from a flat `key = value` file,
//! or assembled from both (file first, then individual overrides via
//! [`ExperimentConfig::set`], which is also what command-line flags call).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::colorspace::ColorSpace;
use crate::templates::{ChannelMode, TemplateKind};

/// Errors from building or validating a configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config file {path} line {line_no}: expected `key = value`, got `{line}`")]
    Syntax {
        path: PathBuf,
        line_no: usize,
        line: String,
    },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{key}` rejects value `{value}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Which image channel feeds the quantum filter.
///
/// A single index selects one channel for the single-channel circuits;
/// `All` feeds all three channels to a channel-overwrite circuit. The
/// circuit mode is derived from this choice, so a config can never pair
/// a channel count with the wrong circuit arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelSelect {
    Index(u8),
    All,
}

impl ChannelSelect {
    /// The template mode this channel selection requires.
    pub fn mode(self) -> ChannelMode {
        match self {
            ChannelSelect::Index(_) => ChannelMode::Single,
            ChannelSelect::All => ChannelMode::ChannelOverwrite,
        }
    }

    /// Row label for tables: the channel's name in `space`, or the
    /// space's own name for the all-channels row.
    pub fn label(self, space: ColorSpace) -> &'static str {
        match self {
            ChannelSelect::Index(i) => space.channel_labels()[usize::from(i)],
            ChannelSelect::All => space.full_label(),
        }
    }
}

impl fmt::Display for ChannelSelect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSelect::Index(i) => write!(f, "{i}"),
            ChannelSelect::All => f.write_str("all"),
        }
    }
}

#[derive(Debug, Error)]
#[error("unknown channel `{0}`; use 0, 1, 2, or all")]
pub struct UnknownChannel(String);

impl FromStr for ChannelSelect {
    type Err = UnknownChannel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "0" => Ok(ChannelSelect::Index(0)),
            "1" => Ok(ChannelSelect::Index(1)),
            "2" => Ok(ChannelSelect::Index(2)),
            other if other.eq_ignore_ascii_case("all") => Ok(ChannelSelect::All),
            other => Err(UnknownChannel(other.to_string())),
        }
    }
}

/// Everything that defines one training run.
///
/// Defaults mirror the published protocol: 20 epochs, batch size 50,
/// learning rate 0.01, hidden width 32, stride 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub color_space: ColorSpace,
    pub channel: ChannelSelect,
    pub template: TemplateKind,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub hidden_width: usize,
    pub stride: usize,
    pub data_dir: PathBuf,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            color_space: ColorSpace::Rgb01,
            channel: ChannelSelect::Index(0),
            template: TemplateKind::U1Crx,
            seed: 1,
            epochs: 20,
            batch_size: 50,
            learning_rate: 0.01,
            hidden_width: 32,
            stride: 1,
            data_dir: PathBuf::from("data"),
            output_dir: PathBuf::from("runs"),
        }
    }
}

impl ExperimentConfig {
    /// Loads a config from a flat `key = value` file.
    ///
    /// Blank lines and lines starting with `#` are skipped. Unlisted keys
    /// keep their defaults. The result is validated.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut config = ExperimentConfig::default();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: path.to_path_buf(),
                line_no: line_no + 1,
                line: line.to_string(),
            })?;
            config.set(key.trim(), value.trim())?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Sets one field from its textual form. Shared by the file parser
    /// and command-line overrides, so both accept identical syntax.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn bad(key: &str, value: &str, reason: impl ToString) -> ConfigError {
            ConfigError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
                reason: reason.to_string(),
            }
        }
        match key {
            "color_space" => {
                self.color_space = value.parse().map_err(|e| bad(key, value, e))?;
            }
            "channel" => self.channel = value.parse().map_err(|e| bad(key, value, e))?,
            "template" => self.template = value.parse().map_err(|e| bad(key, value, e))?,
            "seed" => self.seed = value.parse().map_err(|e| bad(key, value, e))?,
            "epochs" => self.epochs = value.parse().map_err(|e| bad(key, value, e))?,
            "batch_size" => self.batch_size = value.parse().map_err(|e| bad(key, value, e))?,
            "learning_rate" => {
                self.learning_rate = value.parse().map_err(|e| bad(key, value, e))?;
            }
            "hidden_width" => {
                self.hidden_width = value.parse().map_err(|e| bad(key, value, e))?;
            }
            "stride" => self.stride = value.parse().map_err(|e| bad(key, value, e))?,
            "data_dir" => self.data_dir = PathBuf::from(value),
            "output_dir" => self.output_dir = PathBuf::from(value),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Checks semantic constraints that individual setters cannot.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.color_space == ColorSpace::Angles {
            return Err(ConfigError::Invalid(
                "color_space must be a source space, not angles".into(),
            ));
        }
        if self.batch_size == 0 {
            return Err(ConfigError::Invalid("batch_size must be at least 1".into()));
        }
        if self.stride == 0 {
            return Err(ConfigError::Invalid("stride must be at least 1".into()));
        }
        if self.hidden_width == 0 {
            return Err(ConfigError::Invalid(
                "hidden_width must be at least 1".into(),
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(ConfigError::Invalid(
                "learning_rate must be finite and positive".into(),
            ));
        }
        Ok(())
    }

    /// The circuit mode implied by the channel selection.
    pub fn channel_mode(&self) -> ChannelMode {
        self.channel.mode()
    }

    /// Short name identifying this run, used for its output directory:
    /// space, channel label, template, seed.
    pub fn run_name(&self) -> String {
        format!(
            "{}-{}-{}-s{}",
            self.color_space.name(),
            self.channel.label(self.color_space),
            self.template,
            self.seed
        )
    }

    /// Serializes the config as `key = value` lines in a fixed order.
    ///
    /// The output parses back through [`ExperimentConfig::set`] and is
    /// embedded in run summaries as the config echo.
    pub fn echo(&self) -> String {
        format!(
            "color_space = {}\n\
             channel = {}\n\
             template = {}\n\
             seed = {}\n\
             epochs = {}\n\
             batch_size = {}\n\
             learning_rate = {}\n\
             hidden_width = {}\n\
             stride = {}\n\
             data_dir = {}\n\
             output_dir = {}\n",
            self.color_space.name(),
            self.channel,
            self.template,
            self.seed,
            self.epochs,
            self.batch_size,
            self.learning_rate,
            self.hidden_width,
            self.stride,
            self.data_dir.display(),
            self.output_dir.display(),
        )
    }
}
