//! Run configuration: one TOML file with `[engine]`, `[solver]` and
//! `[study]` sections. Every field has a default, so no file is needed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::EngineConfig;
use crate::schedule::MoveSchedule;
use crate::solver::SolveLimits;
use crate::study::{StudyConfig, StudyConfigError, StudyLine, StudySettings, DEFAULT_STUDY_DEPTH, DEFAULT_TOLERANCE_CP};
use crate::variant::WaiverMode;

/// Overrides `[engine] path`.
pub const ENGINE_ENV: &str = "FAIRCHESS_ENGINE";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Study(#[from] StudyConfigError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineSection {
    pub path: Option<PathBuf>,
    pub threads: u32,
    pub hash_mb: u32,
    pub timeout_secs: u64,
    pub options: BTreeMap<String, String>,
}

impl Default for EngineSection {
    fn default() -> Self {
        let d = EngineConfig::new("");
        EngineSection { path: None, threads: d.threads, hash_mb: d.hash_mb, timeout_secs: d.timeout_secs, options: d.options }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub node_budget: u64,
    pub memo_capacity: usize,
    pub max_depth: Option<u32>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let l = SolveLimits::default();
        SolverSection { node_budget: l.node_budget, memo_capacity: l.memo_capacity, max_depth: l.max_depth }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudySection {
    pub depth: u32,
    pub tolerance_cp: u32,
    pub workers: usize,
    /// Study lines file; the bundled lines when absent.
    pub lines: Option<PathBuf>,
}

impl Default for StudySection {
    fn default() -> Self {
        StudySection { depth: DEFAULT_STUDY_DEPTH, tolerance_cp: DEFAULT_TOLERANCE_CP, workers: 1, lines: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schedule: String,
    pub waiver_mode: WaiverMode,
    pub output_dir: PathBuf,
    pub engine: EngineSection,
    pub solver: SolverSection,
    pub study: StudySection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schedule: "balanced".into(),
            waiver_mode: WaiverMode::default(),
            output_dir: PathBuf::from("out"),
            engine: EngineSection::default(),
            solver: SolverSection::default(),
            study: StudySection::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let config: RunConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Reads `path`, or the defaults when `None`, then applies the
    /// environment override.
    pub fn load(path: Option<&Path>) -> Result<RunConfig, ConfigError> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read { path: p.into(), source })?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = std::env::var_os(ENGINE_ENV).filter(|v| !v.is_empty()) {
            config.engine.path = Some(PathBuf::from(v));
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        MoveSchedule::resolve(&self.schedule).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.limits().validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.study.depth == 0 {
            return Err(ConfigError::Invalid("study depth must be positive".into()));
        }
        if self.engine.threads == 0 || self.engine.hash_mb == 0 {
            return Err(ConfigError::Invalid("engine threads and hash must be positive".into()));
        }
        Ok(())
    }

    pub fn schedule(&self) -> MoveSchedule {
        MoveSchedule::resolve(&self.schedule).expect("validated")
    }

    pub fn limits(&self) -> SolveLimits {
        SolveLimits {
            node_budget: self.solver.node_budget,
            memo_capacity: self.solver.memo_capacity,
            max_depth: self.solver.max_depth,
        }
    }

    /// `None` when no engine path is configured.
    pub fn engine_config(&self) -> Option<EngineConfig> {
        let path = self.engine.path.clone()?;
        Some(EngineConfig {
            path,
            threads: self.engine.threads,
            hash_mb: self.engine.hash_mb,
            timeout_secs: self.engine.timeout_secs,
            options: self.engine.options.clone(),
        })
    }

    pub fn study_settings(&self) -> StudySettings {
        StudySettings { depth: self.study.depth, tolerance_cp: self.study.tolerance_cp, workers: self.study.workers }
    }

    pub fn study_lines(&self) -> Result<Vec<StudyLine>, ConfigError> {
        match &self.study.lines {
            None => Ok(StudyConfig::bundled().lines),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read { path: p.clone(), source })?;
                Ok(StudyConfig::parse(&text)?.lines)
            }
        }
    }
}
