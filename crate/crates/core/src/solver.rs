//! Exact game values for small instances under any schedule.
//!
//! [`solve`] enumerates every state reachable from the root and runs
//! backward induction from the terminal states: wins and losses propagate
//! to predecessors in order of distance, and whatever is never resolved is
//! a draw. Cycles in the state graph are exactly the lines that end by
//! repetition, so no history needs to be stored per state.
//!
//! [`minimax_oracle`] is an independent check: plain depth-limited minimax
//! over [`VariantState`] with its full repetition history, no pruning and no
//! table. It can only settle shallow instances.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moves::Move;
use crate::position::{CastlingRights, Position};
use crate::schedule::MoveSchedule;
use crate::types::{Color, Piece, Square};
use crate::variant::{Outcome, VariantError, VariantState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    WhiteWin,
    BlackWin,
    Draw,
}

impl Verdict {
    pub fn win_for(color: Color) -> Verdict {
        match color {
            Color::White => Verdict::WhiteWin,
            Color::Black => Verdict::BlackWin,
        }
    }

    /// Verdict with colors exchanged.
    pub fn mirrored(self) -> Verdict {
        match self {
            Verdict::WhiteWin => Verdict::BlackWin,
            Verdict::BlackWin => Verdict::WhiteWin,
            Verdict::Draw => Verdict::Draw,
        }
    }

    pub fn matches(self, outcome: Outcome) -> bool {
        matches!(
            (self, outcome),
            (Verdict::WhiteWin, Outcome::WhiteWins) | (Verdict::BlackWin, Outcome::BlackWins) | (Verdict::Draw, Outcome::Draw(_))
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::WhiteWin => "white-win",
            Verdict::BlackWin => "black-win",
            Verdict::Draw => "draw",
        })
    }
}

/// Value under optimal play. `distance` counts plies to the forced end
/// (mate distance for wins) and is 0 for draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameValue {
    pub verdict: Verdict,
    pub distance: u32,
}

impl GameValue {
    pub const DRAW: GameValue = GameValue { verdict: Verdict::Draw, distance: 0 };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exhausted {
    NodeBudget,
    MemoCapacity,
    DepthLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SolveValue {
    Known(GameValue),
    Unknown { reason: Exhausted },
}

impl SolveValue {
    pub fn known(self) -> Option<GameValue> {
        match self {
            SolveValue::Known(v) => Some(v),
            SolveValue::Unknown { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveLimits {
    /// Maximum number of move expansions.
    pub node_budget: u64,
    /// Maximum number of distinct states held.
    pub memo_capacity: usize,
    /// Plies from the root beyond which the answer is Unknown.
    pub max_depth: Option<u32>,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { node_budget: 50_000_000, memo_capacity: 4_000_000, max_depth: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitsError {
    #[error("limit `{0}` must be positive")]
    NotPositive(String),
    #[error("bad limits spec `{0}` (expected nodes=N,memo=N,depth=N)")]
    Syntax(String),
}

impl SolveLimits {
    pub fn validate(&self) -> Result<(), LimitsError> {
        if self.node_budget == 0 {
            return Err(LimitsError::NotPositive("nodes".into()));
        }
        if self.memo_capacity == 0 {
            return Err(LimitsError::NotPositive("memo".into()));
        }
        if self.max_depth == Some(0) {
            return Err(LimitsError::NotPositive("depth".into()));
        }
        Ok(())
    }

    /// Parses `nodes=N,memo=N,depth=N`; omitted fields keep their defaults.
    pub fn parse(spec: &str) -> Result<SolveLimits, LimitsError> {
        let mut limits = SolveLimits::default();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| LimitsError::Syntax(spec.into()))?;
            let n: u64 = v.trim().parse().map_err(|_| LimitsError::Syntax(spec.into()))?;
            match k.trim() {
                "nodes" => limits.node_budget = n,
                "memo" => limits.memo_capacity = n as usize,
                "depth" => limits.max_depth = Some(n as u32),
                _ => return Err(LimitsError::Syntax(spec.into())),
            }
        }
        limits.validate()?;
        Ok(limits)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub value: SolveValue,
    /// Uci moves from the root to the end of the game (empty when Unknown).
    #[serde(serialize_with = "serialize_moves")]
    pub principal_variation: Vec<Move>,
    pub nodes_visited: u64,
    pub table_hits: u64,
}

fn serialize_moves<S: serde::Serializer>(moves: &[Move], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(moves.iter().map(|m| m.uci()))
}

/// Packed state: placement nibbles, canonical schedule ply, castling, ep.
/// The canonical ply fixes both the mover and the rest of the schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct StateKey {
    board: [u64; 4],
    ply: u32,
    castling: u8,
    ep: u8,
}

const NO_EP: u8 = 0xff;

fn pack(state: &VariantState) -> StateKey {
    pack_parts(state.position(), state.schedule(), state.next_ply())
}

fn pack_parts(pos: &Position, schedule: &MoveSchedule, next_ply: u32) -> StateKey {
    let mut board = [0u64; 4];
    for (i, piece) in pos.board.iter().enumerate() {
        if let Some(p) = piece {
            board[i / 16] |= (p.code() as u64) << ((i % 16) * 4);
        }
    }
    StateKey {
        board,
        ply: schedule.canonical_ply(next_ply),
        castling: pos.castling_rights().bits(),
        ep: pos.ep_target().map_or(NO_EP, |s| s.index() as u8),
    }
}

struct Unpacker<'a> {
    root: &'a VariantState,
    schedule: Arc<MoveSchedule>,
}

impl Unpacker<'_> {
    fn unpack(&self, key: &StateKey) -> VariantState {
        let root = self.root.position();
        let mut board = [None; 64];
        for (i, slot) in board.iter_mut().enumerate() {
            *slot = Piece::from_code(((key.board[i / 16] >> ((i % 16) * 4)) & 0xf) as u8);
        }
        let position = Position {
            board,
            dims: root.dims(),
            side_to_move: self.schedule.mover_at_ply(key.ply),
            castling: CastlingRights::from_bits_truncate(key.castling),
            ep_target: (key.ep != NO_EP).then(|| Square::from_index(key.ep)),
            halfmove_clock: 0,
            fullmove_number: 1,
        };
        VariantState::from_parts(position, Arc::clone(&self.schedule), key.ply)
            .with_restriction(self.root.restriction_enabled())
            .with_waiver_mode(self.root.waiver_mode())
    }
}

/// Per-state solution: winner and distance, or unresolved.
type Resolved = Option<(Color, u32)>;

struct Graph {
    keys: IndexSet<StateKey>,
    child_start: Vec<u32>,
    children: Vec<u32>,
    table_hits: u64,
}

impl Graph {
    fn children_of(&self, i: usize) -> &[u32] {
        &self.children[self.child_start[i] as usize..self.child_start[i + 1] as usize]
    }
}

fn outcome_value(outcome: Outcome) -> Option<GameValue> {
    match outcome {
        Outcome::Ongoing => None,
        Outcome::WhiteWins => Some(GameValue { verdict: Verdict::WhiteWin, distance: 0 }),
        Outcome::BlackWins => Some(GameValue { verdict: Verdict::BlackWin, distance: 0 }),
        Outcome::Draw(_) => Some(GameValue::DRAW),
    }
}

/// Exact value of `root` under optimal play by both sides.
///
/// Mate distances prefer shorter wins and longer losses. The fifty-move
/// rule is not modelled past the root; on reduced boards forced mates are
/// far shorter than fifty moves.
pub fn solve(root: &VariantState, limits: &SolveLimits) -> SolveResult {
    let unknown = |reason, nodes, hits| SolveResult {
        value: SolveValue::Unknown { reason },
        principal_variation: Vec::new(),
        nodes_visited: nodes,
        table_hits: hits,
    };

    if let Some(v) = outcome_value(root.outcome()) {
        return SolveResult { value: SolveValue::Known(v), principal_variation: Vec::new(), nodes_visited: 1, table_hits: 0 };
    }

    let unpacker = Unpacker { root, schedule: Arc::clone(root.schedule_arc()) };
    let mut graph = Graph { keys: IndexSet::new(), child_start: vec![0], children: Vec::new(), table_hits: 0 };
    let mut terminal: Vec<Option<Outcome>> = Vec::new();
    let mut depth: Vec<u32> = Vec::new();
    let mut expansions = 0u64;

    graph.keys.insert(pack(root));
    depth.push(0);
    let mut next = 0;
    while next < graph.keys.len() {
        let state = unpacker.unpack(&graph.keys[next]);
        let set = state.move_set();
        let outcome = state.static_outcome_given(&set.moves);
        if outcome.is_terminal() {
            terminal.push(Some(outcome));
        } else {
            terminal.push(None);
            if limits.max_depth.is_some_and(|d| depth[next] >= d) {
                return unknown(Exhausted::DepthLimit, graph.keys.len() as u64, graph.table_hits);
            }
            for &m in &set.moves {
                expansions += 1;
                if expansions > limits.node_budget {
                    return unknown(Exhausted::NodeBudget, graph.keys.len() as u64, graph.table_hits);
                }
                let (child, ply) = state.successor(m, set.waived);
                let (id, fresh) = graph.keys.insert_full(pack_parts(&child, &unpacker.schedule, ply));
                if fresh {
                    depth.push(depth[next] + 1);
                    if graph.keys.len() > limits.memo_capacity {
                        return unknown(Exhausted::MemoCapacity, graph.keys.len() as u64, graph.table_hits);
                    }
                } else {
                    graph.table_hits += 1;
                }
                graph.children.push(id as u32);
            }
        }
        graph.child_start.push(graph.children.len() as u32);
        next += 1;
    }

    let n = graph.keys.len();
    let movers: Vec<Color> = graph.keys.iter().map(|k| unpacker.schedule.mover_at_ply(k.ply)).collect();

    // Reverse edges, with multiplicity.
    let mut parent_start = vec![0u32; n + 1];
    for &c in &graph.children {
        parent_start[c as usize + 1] += 1;
    }
    for i in 0..n {
        parent_start[i + 1] += parent_start[i];
    }
    let mut fill = parent_start.clone();
    let mut parents = vec![0u32; graph.children.len()];
    for p in 0..n {
        for &c in graph.children_of(p) {
            parents[fill[c as usize] as usize] = p as u32;
            fill[c as usize] += 1;
        }
    }

    let mut value: Vec<Resolved> = vec![None; n];
    let mut remaining: Vec<u32> = (0..n).map(|i| graph.children_of(i).len() as u32).collect();
    let mut queue = VecDeque::new();
    for (i, t) in terminal.iter().enumerate() {
        match t {
            Some(Outcome::WhiteWins) => value[i] = Some((Color::White, 0)),
            Some(Outcome::BlackWins) => value[i] = Some((Color::Black, 0)),
            _ => continue,
        }
        queue.push_back(i);
    }
    // Breadth-first, so states resolve in nondecreasing distance: a mover's
    // first winning child is its shortest win, and the last losing child to
    // resolve is its longest defence.
    while let Some(c) = queue.pop_front() {
        let (winner, d) = value[c].expect("queued states are resolved");
        for &p in &parents[parent_start[c] as usize..parent_start[c + 1] as usize] {
            let p = p as usize;
            if value[p].is_some() {
                continue;
            }
            if movers[p] == winner {
                value[p] = Some((winner, d + 1));
                queue.push_back(p);
            } else {
                remaining[p] -= 1;
                if remaining[p] == 0 {
                    value[p] = Some((winner, d + 1));
                    queue.push_back(p);
                }
            }
        }
    }

    let to_value = |r: Resolved| match r {
        Some((c, d)) => GameValue { verdict: Verdict::win_for(c), distance: d },
        None => GameValue::DRAW,
    };
    let root_value = to_value(value[0]);

    // Principal variation: replay with full history until the game ends.
    let mut pv = Vec::new();
    let mut state = root.clone();
    let mut id = 0usize;
    let cap = 4 * n + 16;
    while pv.len() < cap && !state.outcome().is_terminal() {
        let here = unpacker.unpack(&graph.keys[id]);
        let set = here.move_set();
        let kids = graph.children_of(id);
        let mover = movers[id];
        let pick = match value[id] {
            Some((w, _)) if w == mover => (0..kids.len())
                .filter(|&k| matches!(value[kids[k] as usize], Some((cw, _)) if cw == w))
                .min_by_key(|&k| (value[kids[k] as usize].unwrap().1, k)),
            Some(_) => (0..kids.len()).max_by_key(|&k| (value[kids[k] as usize].map_or(0, |v| v.1), std::cmp::Reverse(k))),
            None => (0..kids.len()).find(|&k| value[kids[k] as usize].is_none()),
        };
        let Some(k) = pick else { break };
        let m = set.moves[k];
        pv.push(m);
        state = state.advance(m, set.waived);
        id = kids[k] as usize;
    }

    SolveResult {
        value: SolveValue::Known(root_value),
        principal_variation: pv,
        nodes_visited: n as u64,
        table_hits: graph.table_hits,
    }
}

/// Oracle search value before it is settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Probe {
    Known(GameValue),
    Unknown,
}

struct OracleBudget {
    nodes: u64,
    limit: u64,
}

fn oracle_search(state: &VariantState, horizon: u32, budget: &mut OracleBudget) -> Option<Probe> {
    budget.nodes += 1;
    if budget.nodes > budget.limit {
        return None;
    }
    let set = state.move_set();
    if let Some(v) = outcome_value(state.outcome_given(&set.moves)) {
        return Some(Probe::Known(v));
    }
    if horizon == 0 {
        return Some(Probe::Unknown);
    }
    let mover = state.side_to_move();
    let mut best_win: Option<u32> = None;
    let mut longest_loss: Option<u32> = None;
    let mut draw = false;
    let mut unknown = false;
    for &m in &set.moves {
        match oracle_search(&state.advance(m, set.waived), horizon - 1, budget)? {
            Probe::Unknown => unknown = true,
            Probe::Known(v) if v.verdict == Verdict::Draw => draw = true,
            Probe::Known(v) if v.verdict == Verdict::win_for(mover) => {
                best_win = Some(best_win.map_or(v.distance, |b| b.min(v.distance)));
            }
            Probe::Known(v) => longest_loss = Some(longest_loss.map_or(v.distance, |l| l.max(v.distance))),
        }
    }
    Some(if let Some(d) = best_win {
        Probe::Known(GameValue { verdict: Verdict::win_for(mover), distance: d + 1 })
    } else if unknown {
        Probe::Unknown
    } else if draw {
        Probe::Known(GameValue::DRAW)
    } else {
        let d = longest_loss.expect("non-terminal state has moves");
        Probe::Known(GameValue { verdict: Verdict::win_for(!mover), distance: d + 1 })
    })
}

/// Default horizon for [`minimax_oracle`] when the limits give none.
pub const ORACLE_DEFAULT_DEPTH: u32 = 10;

/// Plain minimax: every move searched, repetition judged from the game
/// history, nothing cached. Deepens one ply at a time until the root is
/// settled. A win found within the horizon is exact, since any faster win
/// would have been found too; draws settle only when every line ends.
pub fn minimax_oracle(root: &VariantState, limits: &SolveLimits) -> SolveValue {
    let max_depth = limits.max_depth.unwrap_or(ORACLE_DEFAULT_DEPTH);
    let mut budget = OracleBudget { nodes: 0, limit: limits.node_budget };
    for horizon in 0..=max_depth {
        match oracle_search(root, horizon, &mut budget) {
            None => return SolveValue::Unknown { reason: Exhausted::NodeBudget },
            Some(Probe::Known(v)) => return SolveValue::Known(v),
            Some(Probe::Unknown) => {}
        }
    }
    SolveValue::Unknown { reason: Exhausted::DepthLimit }
}

const BUNDLED_SUITE: &str = include_str!("../data/suite4x4.txt");

/// The 4x4 pawn-ending suite shipped with the crate.
pub fn bundled_suite() -> Vec<Instance> {
    parse_instances(BUNDLED_SUITE).expect("bundled suite parses")
}

/// A named reduced-game start.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub state: VariantState,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: VariantError },
}

/// Reads an instance file: one xFEN per line, optionally prefixed with
/// `name:`. Blank lines and `#` comments are skipped.
pub fn parse_instances(text: &str) -> Result<Vec<Instance>, InstanceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, xfen) = match line.split_once(':') {
            Some((n, rest)) => (n.trim().to_string(), rest.trim()),
            None => (format!("instance-{}", out.len() + 1), line),
        };
        let state = VariantState::decode_xfen(xfen).map_err(|source| InstanceError::Parse { line: i + 1, source })?;
        out.push(Instance { name, state });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub instance: String,
    pub schedule: String,
    pub value: Option<SolveValue>,
    pub nodes: u64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Favorability {
    pub schedule: String,
    pub white_wins: usize,
    pub black_wins: usize,
    pub draws: usize,
    pub unknown: usize,
    /// (White wins − Black wins) / settled instances.
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleComparison {
    pub instances: Vec<String>,
    pub schedules: Vec<String>,
    /// Row-major: all schedules for the first instance, then the next.
    pub cells: Vec<Cell>,
    pub favorability: Vec<Favorability>,
    /// Schedule ids from most White-favorable to most Black-favorable.
    pub ordering: Vec<String>,
    /// Whether `balanced` scores between `standard` and `black-favorable`
    /// (inclusive); absent unless all three were compared.
    pub balanced_between: Option<bool>,
    pub notes: Vec<String>,
}

/// Solves every instance under every schedule. Each instance keeps its
/// position and ply; only the schedule changes.
pub fn compare_schedules(instances: &[Instance], schedules: &[MoveSchedule], limits: &SolveLimits) -> ScheduleComparison {
    let jobs: Vec<(usize, usize)> =
        (0..instances.len()).flat_map(|i| (0..schedules.len()).map(move |s| (i, s))).collect();
    let cells: Vec<Cell> = jobs
        .par_iter()
        .map(|&(i, s)| {
            let inst = &instances[i];
            let schedule = &schedules[s];
            let mut cell = Cell {
                instance: inst.name.clone(),
                schedule: schedule.id(),
                value: None,
                nodes: 0,
                error: None,
            };
            match VariantState::new(inst.state.position().clone(), schedule.clone(), inst.state.next_ply()) {
                Ok(state) => {
                    let state = state
                        .with_restriction(inst.state.restriction_enabled())
                        .with_waiver_mode(inst.state.waiver_mode());
                    let r = solve(&state, limits);
                    cell.value = Some(r.value);
                    cell.nodes = r.nodes_visited;
                }
                Err(e) => cell.error = Some(e.to_string()),
            }
            cell
        })
        .collect();

    let favorability: Vec<Favorability> = schedules
        .iter()
        .enumerate()
        .map(|(s, schedule)| {
            let mut f = Favorability {
                schedule: schedule.id(),
                white_wins: 0,
                black_wins: 0,
                draws: 0,
                unknown: 0,
                score: 0.0,
            };
            for cell in cells.iter().skip(s).step_by(schedules.len().max(1)) {
                match cell.value.and_then(SolveValue::known).map(|v| v.verdict) {
                    Some(Verdict::WhiteWin) => f.white_wins += 1,
                    Some(Verdict::BlackWin) => f.black_wins += 1,
                    Some(Verdict::Draw) => f.draws += 1,
                    None => f.unknown += 1,
                }
            }
            let settled = f.white_wins + f.black_wins + f.draws;
            if settled > 0 {
                f.score = (f.white_wins as f64 - f.black_wins as f64) / settled as f64;
            }
            f
        })
        .collect();

    let mut order: Vec<&Favorability> = favorability.iter().collect();
    order.sort_by(|a, b| b.score.total_cmp(&a.score));
    let ordering = order.iter().map(|f| f.schedule.clone()).collect();

    let score = |id: &str| favorability.iter().find(|f| f.schedule == id).map(|f| f.score);
    let balanced_between = match (score("standard"), score("balanced"), score("black-favorable")) {
        (Some(w), Some(b), Some(k)) => Some((w >= b && b >= k) || (k >= b && b >= w)),
        _ => None,
    };

    let mut notes = vec!["values are exact for these reduced instances only; they are evidence, not a proof about full chess".to_string()];
    if schedules.iter().any(MoveSchedule::is_approximation) {
        notes.push("prouhet-thue-morse repeats its first 16 plies, an approximation of the aperiodic sequence".into());
    }

    ScheduleComparison {
        instances: instances.iter().map(|i| i.name.clone()).collect(),
        schedules: schedules.iter().map(MoveSchedule::id).collect(),
        cells,
        favorability,
        ordering,
        balanced_between,
        notes,
    }
}

impl ScheduleComparison {
    /// `instance,schedule,verdict,distance,nodes`, one row per cell.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["instance", "schedule", "verdict", "distance", "nodes"])?;
        for cell in &self.cells {
            let (verdict, distance) = match (&cell.error, cell.value) {
                (Some(_), _) | (None, None) => ("error".to_string(), String::new()),
                (None, Some(SolveValue::Known(v))) => (v.verdict.to_string(), v.distance.to_string()),
                (None, Some(SolveValue::Unknown { .. })) => ("unknown".to_string(), String::new()),
            };
            w.write_record([cell.instance.as_str(), &cell.schedule, &verdict, &distance, &cell.nodes.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("comparison serializes")
    }
}
