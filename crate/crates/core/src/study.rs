//! Opening study: replay annotated lines under their schedules and compare
//! engine evaluations of the reached positions with expected values.

use std::sync::Mutex;
use std::thread;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EngineConfig, EngineError, EvalResult, UciEngine};
use crate::notation::parse_line_from_start;
use crate::schedule::{MoveSchedule, Phase};
use crate::variant::VariantState;

pub const DEFAULT_STUDY_DEPTH: u32 = 30;
pub const DEFAULT_TOLERANCE_CP: u32 = 30;

const BUNDLED: &str = include_str!("../data/study.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineRole {
    Variant,
    Baseline,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyLine {
    pub label: String,
    pub line: String,
    pub schedule: String,
    pub expected_cp: i32,
    #[serde(default)]
    pub expected_depth: Option<u32>,
    pub role: LineRole,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StudyConfig {
    #[serde(default, rename = "line")]
    pub lines: Vec<StudyLine>,
}

#[derive(Debug, Error)]
pub enum StudyConfigError {
    #[error("study config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("study config: duplicate label `{0}`")]
    DuplicateLabel(String),
}

impl StudyConfig {
    pub fn parse(text: &str) -> Result<StudyConfig, StudyConfigError> {
        let config: StudyConfig = toml::from_str(text)?;
        let mut seen = std::collections::HashSet::new();
        for l in &config.lines {
            if !seen.insert(l.label.as_str()) {
                return Err(StudyConfigError::DuplicateLabel(l.label.clone()));
            }
        }
        Ok(config)
    }

    /// The opening lines and two standard baselines shipped with the crate.
    pub fn bundled() -> StudyConfig {
        StudyConfig::parse(BUNDLED).expect("bundled study config parses")
    }
}

/// Replays a study line and returns the state reached.
///
/// Fails if the line does not parse, is illegal under its schedule, or
/// captures on the first half of a double move.
pub fn prepare_line(line: &StudyLine) -> Result<VariantState, String> {
    let schedule = MoveSchedule::resolve(&line.schedule).map_err(|e| e.to_string())?;
    let parsed = parse_line_from_start(&line.line, &schedule).map_err(|e| e.to_string())?;
    if let Some(step) = parsed.steps.iter().find(|s| s.phase == Phase::FirstOfDouble && s.san.contains('x')) {
        return Err(format!("ply {}: {} captures on the first half of a double move", step.ply, step.san));
    }
    Ok(parsed.final_state)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StudyRow {
    pub label: String,
    pub role: LineRole,
    pub schedule: String,
    pub line: String,
    pub xfen: Option<String>,
    pub expected_cp: i32,
    pub expected_depth: Option<u32>,
    pub eval: Option<EvalResult>,
    pub deviation_cp: Option<u32>,
    pub within_tolerance: Option<bool>,
    pub error: Option<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StudyReport {
    pub skipped: bool,
    pub engine: Option<String>,
    pub depth: u32,
    pub tolerance_cp: u32,
    pub rows: Vec<StudyRow>,
    pub max_deviation_cp: Option<u32>,
    pub lines_within_tolerance: usize,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StudySettings {
    pub depth: u32,
    pub tolerance_cp: u32,
    /// Engine processes run side by side.
    pub workers: usize,
}

impl Default for StudySettings {
    fn default() -> Self {
        StudySettings { depth: DEFAULT_STUDY_DEPTH, tolerance_cp: DEFAULT_TOLERANCE_CP, workers: 1 }
    }
}

fn blank_row(line: &StudyLine) -> StudyRow {
    StudyRow {
        label: line.label.clone(),
        role: line.role,
        schedule: line.schedule.clone(),
        line: line.line.clone(),
        xfen: None,
        expected_cp: line.expected_cp,
        expected_depth: line.expected_depth,
        eval: None,
        deviation_cp: None,
        within_tolerance: None,
        error: None,
        note: line.note.clone(),
    }
}

/// Runs the study. Without an engine every line is still replayed and the
/// report is marked skipped. Per-line failures are recorded in their row;
/// only a failure to start the engine aborts the run.
pub fn run_study(
    lines: &[StudyLine],
    settings: &StudySettings,
    engine: Option<&EngineConfig>,
) -> Result<StudyReport, EngineError> {
    let mut rows: Vec<StudyRow> = lines.iter().map(blank_row).collect();
    let mut states: Vec<Option<VariantState>> = Vec::with_capacity(lines.len());
    for (row, line) in rows.iter_mut().zip(lines) {
        match prepare_line(line) {
            Ok(state) => {
                row.xfen = Some(state.encode_xfen());
                states.push(Some(state));
            }
            Err(e) => {
                row.error = Some(e);
                states.push(None);
            }
        }
    }

    let mut notes = vec![
        "the engine evaluates the reached position as ordinary chess; the schedule beyond it is not modelled".to_string(),
    ];
    let Some(config) = engine else {
        notes.push("skipped: no engine configured".into());
        return Ok(finish(rows, settings, None, true, notes));
    };

    let jobs: Vec<usize> = (0..lines.len()).filter(|&i| states[i].is_some()).collect();
    let next = Mutex::new(0usize);
    let results: Mutex<Vec<(usize, Result<EvalResult, String>)>> = Mutex::new(Vec::new());
    let workers = settings.workers.clamp(1, jobs.len().max(1));
    let engine_name: Mutex<Option<String>> = Mutex::new(None);

    thread::scope(|scope| -> Result<(), EngineError> {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| -> Result<(), EngineError> {
                    let mut engine: Option<UciEngine> = None;
                    loop {
                        let i = {
                            let mut n = next.lock().unwrap();
                            let Some(&i) = jobs.get(*n) else { return Ok(()) };
                            *n += 1;
                            i
                        };
                        if engine.is_none() {
                            let e = UciEngine::spawn(config)?;
                            engine_name.lock().unwrap().get_or_insert_with(|| e.name().to_string());
                            engine = Some(e);
                        }
                        let state = states[i].as_ref().expect("job has a state");
                        let r = engine.as_mut().unwrap().evaluate(state, settings.depth);
                        if r.is_err() {
                            engine = None;
                        }
                        results.lock().unwrap().push((i, r.map_err(|e| e.to_string())));
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().expect("study worker panicked")?;
        }
        Ok(())
    })?;

    for (i, r) in results.into_inner().unwrap() {
        let row = &mut rows[i];
        match r {
            Ok(eval) => {
                let dev = (eval.centipawns - row.expected_cp).unsigned_abs();
                row.deviation_cp = Some(dev);
                row.within_tolerance = Some(dev <= settings.tolerance_cp);
                row.eval = Some(eval);
            }
            Err(e) => row.error = Some(e),
        }
    }
    let name = engine_name.into_inner().unwrap();
    Ok(finish(rows, settings, name, false, notes))
}

fn finish(
    rows: Vec<StudyRow>,
    settings: &StudySettings,
    engine: Option<String>,
    skipped: bool,
    notes: Vec<String>,
) -> StudyReport {
    StudyReport {
        skipped,
        engine,
        depth: settings.depth,
        tolerance_cp: settings.tolerance_cp,
        max_deviation_cp: rows.iter().filter_map(|r| r.deviation_cp).max(),
        lines_within_tolerance: rows.iter().filter(|r| r.within_tolerance == Some(true)).count(),
        rows,
        notes,
    }
}

impl StudyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "label", "role", "schedule", "xfen", "expected_cp", "centipawns", "depth", "deviation_cp", "within_tolerance",
            "error",
        ])?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.label.clone(),
                format!("{:?}", r.role).to_lowercase(),
                r.schedule.clone(),
                opt(r.xfen.clone()),
                r.expected_cp.to_string(),
                opt(r.eval.as_ref().map(|e| e.centipawns.to_string())),
                opt(r.eval.as_ref().map(|e| e.depth.to_string())),
                opt(r.deviation_cp.map(|d| d.to_string())),
                opt(r.within_tolerance.map(|b| b.to_string())),
                opt(r.error.clone()),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
