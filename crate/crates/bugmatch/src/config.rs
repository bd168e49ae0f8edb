//! Run configuration: a TOML file whose every field can be overridden on the
//! command line.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use bugmatch_core::classify::LaOptions;
use bugmatch_core::linerank::LineRankConfig;
use bugmatch_core::{ClassifierConfig, EvalConfig, EvalMode, Member, MltParams, ThresholdSetting};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub input: InputConfig,
    pub mlt: MltParams,
    pub classifier: ClassifierSection,
    pub linerank: LineRankConfig,
    pub eval: EvalSection,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub corpus: Option<PathBuf>,
    pub repo: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub branch: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub out: Option<PathBuf>,
}

/// `"auto"` or a non-negative number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TScoreRepr", into = "TScoreRepr")]
pub struct TScore(pub ThresholdSetting);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TScoreRepr {
    Number(f64),
    Word(String),
}

impl TryFrom<TScoreRepr> for TScore {
    type Error = String;
    fn try_from(r: TScoreRepr) -> Result<Self, String> {
        match r {
            TScoreRepr::Number(x) => TScore::from_str(&x.to_string()),
            TScoreRepr::Word(w) => w.parse(),
        }
    }
}

impl From<TScore> for TScoreRepr {
    fn from(t: TScore) -> Self {
        match t.0 {
            ThresholdSetting::Auto => TScoreRepr::Word("auto".into()),
            ThresholdSetting::Fixed(x) => TScoreRepr::Number(x),
        }
    }
}

impl FromStr for TScore {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(TScore(ThresholdSetting::Auto));
        }
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() && x >= 0.0 => Ok(TScore(ThresholdSetting::Fixed(x))),
            _ => Err(format!("t_score must be \"auto\" or a finite non-negative number, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSection {
    pub members: Vec<Member>,
    pub k: usize,
    pub t_score: TScore,
    pub la_log_transform: bool,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        let base = ClassifierConfig::default();
        ClassifierSection {
            members: base.members,
            k: base.k,
            t_score: TScore(base.t_score),
            la_log_transform: base.la.log_transform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelection {
    Increasing,
    Constant,
    #[default]
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> &'static [EvalMode] {
        match self {
            ModeSelection::Increasing => &[EvalMode::Increasing],
            ModeSelection::Constant => &[EvalMode::Constant],
            ModeSelection::Both => &[EvalMode::Increasing, EvalMode::Constant],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub mode: ModeSelection,
    pub window_days: u32,
    /// Explicit gap; takes precedence over `bug_fix_delay_days`.
    pub gap_days: Option<u32>,
    /// Typical bug-fix delay of the project; the gap defaults to this minus
    /// the window, floored at zero.
    pub bug_fix_delay_days: Option<u32>,
    pub top_k_lines: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        let base = EvalConfig::default();
        EvalSection {
            mode: ModeSelection::Both,
            window_days: base.window_days,
            gap_days: None,
            bug_fix_delay_days: None,
            top_k_lines: base.top_k_lines,
        }
    }
}

impl EvalSection {
    pub fn resolved_gap_days(&self) -> u32 {
        self.gap_days.unwrap_or_else(|| {
            self.bug_fix_delay_days
                .map_or(0, |d| d.saturating_sub(self.window_days))
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config file {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.classifier;
        if c.members.is_empty() {
            return Err(ConfigError::Invalid("classifier.members is empty".into()));
        }
        if c.k == 0 {
            return Err(ConfigError::Invalid("classifier.k must be at least 1".into()));
        }
        if self.mlt.top_k == 0 || self.mlt.max_query_terms == 0 {
            return Err(ConfigError::Invalid("mlt.top_k and mlt.max_query_terms must be positive".into()));
        }
        if self.eval.window_days == 0 {
            return Err(ConfigError::Invalid("eval.window_days must be at least 1".into()));
        }
        if self.eval.top_k_lines == 0 {
            return Err(ConfigError::Invalid("eval.top_k_lines must be at least 1".into()));
        }
        Ok(())
    }

    pub fn classifier_config(&self) -> ClassifierConfig {
        let c = &self.classifier;
        ClassifierConfig {
            members: c.members.clone(),
            k: c.k,
            t_score: c.t_score.0,
            la: LaOptions {
                log_transform: c.la_log_transform,
                ..LaOptions::default()
            },
        }
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            window_days: self.eval.window_days,
            gap_days: self.eval.resolved_gap_days(),
            mlt: self.mlt,
            classifier: self.classifier_config(),
            linerank: self.linerank,
            top_k_lines: self.eval.top_k_lines,
        }
    }
}
