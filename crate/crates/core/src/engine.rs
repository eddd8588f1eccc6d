//! UCI client for an external engine process.
//!
//! The engine sees only the position, never the schedule: the FEN handed
//! over is the board reached by variant play, with the next mover as side
//! to move.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::Color;
use crate::variant::VariantState;

/// Centipawn value used for mate scores, reduced by the plies to mate.
pub const MATE_SCORE: i32 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub path: PathBuf,
    pub threads: u32,
    pub hash_mb: u32,
    pub timeout_secs: u64,
    /// Extra `setoption` pairs, sent after Threads and Hash.
    pub options: BTreeMap<String, String>,
}

impl EngineConfig {
    pub fn new(path: impl Into<PathBuf>) -> EngineConfig {
        EngineConfig { path: path.into(), threads: 1, hash_mb: 64, timeout_secs: 900, options: BTreeMap::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalResult {
    /// White-positive.
    pub centipawns: i32,
    /// Signed moves to mate from White's side, when the engine reported one.
    pub mate: Option<i32>,
    pub depth: u32,
    pub best_move: Option<String>,
    pub engine: String,
    pub wall_time_ms: u64,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("cannot start engine {path}: {source}")]
    Spawn { path: PathBuf, source: std::io::Error },
    #[error("engine timed out waiting for `{waiting_for}`\n--- transcript ---\n{transcript}")]
    Timeout { waiting_for: String, transcript: String },
    #[error("engine exited unexpectedly\n--- transcript ---\n{transcript}")]
    Exited { transcript: String },
    #[error("{message}\n--- transcript ---\n{transcript}")]
    Protocol { message: String, transcript: String },
    #[error("engine i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Converts a `score` clause to centipawns for the side to move.
pub fn score_to_cp(kind: &str, value: i32) -> Option<i32> {
    match kind {
        "cp" => Some(value),
        "mate" if value > 0 => Some(MATE_SCORE - (2 * value - 1)),
        "mate" => Some(-(MATE_SCORE - 2 * value.abs())),
        _ => None,
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct InfoScore {
    depth: Option<u32>,
    cp: Option<i32>,
    mate: Option<i32>,
}

fn parse_info(line: &str) -> InfoScore {
    let mut out = InfoScore::default();
    let words: Vec<&str> = line.split_whitespace().collect();
    let mut i = 1;
    while i < words.len() {
        match words[i] {
            "depth" => {
                out.depth = words.get(i + 1).and_then(|w| w.parse().ok());
                i += 2;
            }
            "score" => {
                let kind = words.get(i + 1).copied().unwrap_or("");
                let value = words.get(i + 2).and_then(|w| w.parse::<i32>().ok());
                if let Some(v) = value {
                    out.cp = score_to_cp(kind, v);
                    if kind == "mate" {
                        out.mate = Some(v);
                    }
                }
                i += 3;
            }
            // Everything after `pv` or `string` is free text.
            "pv" | "string" => break,
            _ => i += 1,
        }
    }
    out
}

/// A running engine process. One dialogue at a time.
pub struct UciEngine {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    transcript: Vec<String>,
    name: String,
    timeout: Duration,
}

impl UciEngine {
    pub fn spawn(config: &EngineConfig) -> Result<UciEngine, EngineError> {
        let mut child = Command::new(&config.path)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| EngineError::Spawn { path: config.path.clone(), source })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut engine = UciEngine {
            child,
            stdin,
            lines: rx,
            transcript: Vec::new(),
            name: config.path.display().to_string(),
            timeout: Duration::from_secs(config.timeout_secs.max(1)),
        };
        engine.send("uci")?;
        engine.wait_for("uciok", |e, line| {
            if let Some(name) = line.strip_prefix("id name ") {
                e.name = name.trim().to_string();
            }
        })?;
        engine.send(&format!("setoption name Threads value {}", config.threads))?;
        engine.send(&format!("setoption name Hash value {}", config.hash_mb))?;
        for (k, v) in &config.options {
            engine.send(&format!("setoption name {k} value {v}"))?;
        }
        engine.sync()?;
        Ok(engine)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn transcript(&self) -> String {
        self.transcript.join("\n")
    }

    fn send(&mut self, command: &str) -> Result<(), EngineError> {
        self.transcript.push(format!("> {command}"));
        let result = writeln!(self.stdin, "{command}").and_then(|_| self.stdin.flush());
        result.map_err(|_| EngineError::Exited { transcript: self.transcript() })
    }

    fn recv(&mut self, waiting_for: &str, deadline: Instant) -> Result<String, EngineError> {
        let left = deadline.saturating_duration_since(Instant::now());
        match self.lines.recv_timeout(left) {
            Ok(line) => {
                self.transcript.push(format!("< {line}"));
                Ok(line)
            }
            Err(RecvTimeoutError::Timeout) => {
                Err(EngineError::Timeout { waiting_for: waiting_for.into(), transcript: self.transcript() })
            }
            Err(RecvTimeoutError::Disconnected) => Err(EngineError::Exited { transcript: self.transcript() }),
        }
    }

    fn wait_for(&mut self, token: &str, mut on_line: impl FnMut(&mut Self, &str)) -> Result<(), EngineError> {
        let deadline = Instant::now() + self.timeout;
        loop {
            let line = self.recv(token, deadline)?;
            if line.trim() == token {
                return Ok(());
            }
            on_line(self, &line);
        }
    }

    fn sync(&mut self) -> Result<(), EngineError> {
        self.send("isready")?;
        self.wait_for("readyok", |_, _| {})
    }

    /// Evaluates `fen` at a fixed depth. The score is returned White-positive.
    pub fn evaluate_fen(&mut self, fen: &str, side_to_move: Color, depth: u32) -> Result<EvalResult, EngineError> {
        self.transcript.clear();
        self.send("ucinewgame")?;
        self.sync()?;
        self.send(&format!("position fen {fen}"))?;
        self.send(&format!("go depth {depth}"))?;
        let started = Instant::now();
        let deadline = started + self.timeout;
        let mut last = InfoScore::default();
        let mut reached = 0;
        let best_move = loop {
            let line = self.recv("bestmove", deadline)?;
            if line.starts_with("info ") {
                let info = parse_info(&line);
                if let Some(d) = info.depth {
                    reached = reached.max(d);
                }
                if info.cp.is_some() {
                    last = info;
                }
            } else if let Some(rest) = line.strip_prefix("bestmove") {
                break rest.split_whitespace().next().filter(|m| *m != "(none)").map(str::to_string);
            }
        };
        let wall_time_ms = started.elapsed().as_millis() as u64;
        let Some(cp) = last.cp else {
            return Err(EngineError::Protocol { message: "no score before bestmove".into(), transcript: self.transcript() });
        };
        if last.mate.is_none() && reached < depth {
            return Err(EngineError::Protocol {
                message: format!("engine stopped at depth {reached}, {depth} requested"),
                transcript: self.transcript(),
            });
        }
        let sign = match side_to_move {
            Color::White => 1,
            Color::Black => -1,
        };
        Ok(EvalResult {
            centipawns: sign * cp,
            mate: last.mate.map(|m| sign * m),
            depth: reached,
            best_move,
            engine: self.name.clone(),
            wall_time_ms,
        })
    }

    pub fn evaluate(&mut self, state: &VariantState, depth: u32) -> Result<EvalResult, EngineError> {
        let fen = state.position().to_fen();
        self.evaluate_fen(&fen, state.side_to_move(), depth)
    }

    pub fn quit(mut self) {
        let _ = self.send("quit");
        let _ = self.child.wait();
    }
}

impl Drop for UciEngine {
    fn drop(&mut self) {
        if let Ok(None) = self.child.try_wait() {
            let _ = writeln!(self.stdin, "quit");
            let _ = self.stdin.flush();
            thread::sleep(Duration::from_millis(20));
            if let Ok(None) = self.child.try_wait() {
                let _ = self.child.kill();
            }
            let _ = self.child.wait();
        }
    }
}
