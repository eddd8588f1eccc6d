//! Chess played under a [`MoveSchedule`].
//!
//! [`VariantState`] is the single source of legality under a schedule. On the
//! first half of a double move the mover may neither capture nor give check;
//! if that leaves no move at all, the [`WaiverMode`] decides what happens.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::movegen::{self, GameStatus};
use crate::moves::Move;
use crate::position::{CastlingRights, Position, PositionError};
use crate::schedule::{MoveSchedule, Phase, ScheduleError};
use crate::types::{Color, Piece, Square};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaiverMode {
    /// The mover may capture or check on the first half after all.
    #[default]
    WaiveRestriction,
    /// As above, but the second half of the double move is dropped.
    CollapseToSingle,
}

impl std::str::FromStr for WaiverMode {
    type Err = String;

    fn from_str(s: &str) -> Result<WaiverMode, String> {
        match s {
            "waive-restriction" | "waive" => Ok(WaiverMode::WaiveRestriction),
            "collapse-to-single" | "collapse" => Ok(WaiverMode::CollapseToSingle),
            _ => Err(format!("unknown waiver mode `{s}` (waive-restriction | collapse-to-single)")),
        }
    }
}

impl fmt::Display for WaiverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaiverMode::WaiveRestriction => "waive-restriction",
            WaiverMode::CollapseToSingle => "collapse-to-single",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DrawReason {
    Stalemate,
    FiftyMove,
    InsufficientMaterial,
    Threefold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Ongoing,
    WhiteWins,
    BlackWins,
    Draw(DrawReason),
}

impl Outcome {
    pub fn win_for(color: Color) -> Outcome {
        match color {
            Color::White => Outcome::WhiteWins,
            Color::Black => Outcome::BlackWins,
        }
    }

    pub fn is_terminal(self) -> bool {
        self != Outcome::Ongoing
    }
}

/// Everything that determines the legal-move set of a state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RepetitionKey {
    pub placement: [Option<Piece>; 64],
    pub mover: Color,
    pub phase: Phase,
    pub castling: CastlingRights,
    pub ep_target: Option<Square>,
}

/// Why a first-half move is forbidden.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RestrictionKind {
    Capture,
    Check,
}

impl fmt::Display for RestrictionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RestrictionKind::Capture => "capture on first half",
            RestrictionKind::Check => "check on first half",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VariantError {
    #[error("game is over ({0:?})")]
    Terminal(Outcome),
    #[error("move {mv} is not legal at ply {ply}")]
    Illegal { mv: String, ply: u32 },
    #[error("move {mv} at ply {ply} breaks the double-move restriction: {kind}")]
    Restricted { mv: String, ply: u32, kind: RestrictionKind },
    #[error("malformed xFEN: {0}")]
    Xfen(String),
    #[error("side to move is {found} but ply {ply} of `{schedule}` belongs to {expected}")]
    SideMismatch { found: Color, expected: Color, ply: u32, schedule: String },
    #[error(transparent)]
    Position(#[from] PositionError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Legal moves of a state, plus whether the restriction had to be waived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveSet {
    pub moves: Vec<Move>,
    pub waived: bool,
}

/// Keys seen since the last capture or pawn move, newest first. Earlier
/// keys cannot recur, since material or pawn structure has changed.
#[derive(Debug)]
struct HistoryNode {
    key: RepetitionKey,
    prev: Option<Arc<HistoryNode>>,
}

#[derive(Clone)]
pub struct VariantState {
    position: Position,
    schedule: Arc<MoveSchedule>,
    next_ply: u32,
    history: Arc<HistoryNode>,
    restriction_enabled: bool,
    waiver_mode: WaiverMode,
}

impl VariantState {
    /// Standard initial position at ply 1.
    pub fn initial(schedule: MoveSchedule) -> VariantState {
        VariantState::new(Position::startpos(), schedule, 1).expect("every schedule starts with White")
    }

    /// `position` must have `schedule`'s mover at `next_ply` to move.
    pub fn new(position: Position, schedule: MoveSchedule, next_ply: u32) -> Result<VariantState, VariantError> {
        if next_ply == 0 {
            return Err(VariantError::Xfen("ply must be at least 1".into()));
        }
        let expected = schedule.mover_at_ply(next_ply);
        if position.side_to_move != expected {
            return Err(VariantError::SideMismatch {
                found: position.side_to_move,
                expected,
                ply: next_ply,
                schedule: schedule.id(),
            });
        }
        let last_mover = if next_ply > 1 { schedule.mover_at_ply(next_ply - 1) } else { !expected };
        position.validate(last_mover)?;
        Ok(Self::from_parts(position, Arc::new(schedule), next_ply))
    }

    pub(crate) fn from_parts(position: Position, schedule: Arc<MoveSchedule>, next_ply: u32) -> VariantState {
        let mut state = VariantState {
            position,
            schedule,
            next_ply,
            history: Arc::new(HistoryNode { key: dummy_key(), prev: None }),
            restriction_enabled: true,
            waiver_mode: WaiverMode::default(),
        };
        state.history = Arc::new(HistoryNode { key: state.repetition_key(), prev: None });
        state
    }

    pub fn with_restriction(mut self, enabled: bool) -> VariantState {
        self.restriction_enabled = enabled;
        self
    }

    pub fn with_waiver_mode(mut self, mode: WaiverMode) -> VariantState {
        self.waiver_mode = mode;
        self
    }

    pub fn position(&self) -> &Position {
        &self.position
    }

    pub fn schedule(&self) -> &MoveSchedule {
        &self.schedule
    }

    pub(crate) fn schedule_arc(&self) -> &Arc<MoveSchedule> {
        &self.schedule
    }

    pub fn next_ply(&self) -> u32 {
        self.next_ply
    }

    pub fn side_to_move(&self) -> Color {
        self.position.side_to_move
    }

    pub fn phase(&self) -> Phase {
        self.schedule.phase_at_ply(self.next_ply)
    }

    pub fn restriction_enabled(&self) -> bool {
        self.restriction_enabled
    }

    pub fn waiver_mode(&self) -> WaiverMode {
        self.waiver_mode
    }

    pub fn repetition_key(&self) -> RepetitionKey {
        RepetitionKey {
            placement: self.position.board,
            mover: self.position.side_to_move,
            phase: self.phase(),
            castling: self.position.castling,
            ep_target: self.position.ep_target,
        }
    }

    /// How many times the current key occurs in the history, itself included.
    pub fn repetition_count(&self) -> usize {
        let key = &self.history.key;
        let mut count = 0;
        let mut node = Some(&self.history);
        while let Some(n) = node {
            if n.key == *key {
                count += 1;
            }
            node = n.prev.as_ref();
        }
        count
    }

    /// Why `m` would be forbidden as a first-half move, if it is.
    pub fn restriction_violation(&self, m: Move) -> Option<RestrictionKind> {
        if m.is_capture() {
            return Some(RestrictionKind::Capture);
        }
        let after = movegen::make_move(&self.position, m);
        if movegen::in_check(&after, !self.position.side_to_move) {
            return Some(RestrictionKind::Check);
        }
        None
    }

    /// Whether the restriction applies at this ply.
    pub fn restricted_ply(&self) -> bool {
        self.restriction_enabled && self.phase() == Phase::FirstOfDouble
    }

    /// Legal moves without a terminal-state check.
    pub fn move_set(&self) -> MoveSet {
        let all = movegen::generate_legal_moves(&self.position);
        if !self.restricted_ply() {
            return MoveSet { moves: all, waived: false };
        }
        let filtered: Vec<Move> = all.iter().copied().filter(|&m| self.restriction_violation(m).is_none()).collect();
        if filtered.is_empty() && !all.is_empty() {
            MoveSet { moves: all, waived: true }
        } else {
            MoveSet { moves: filtered, waived: false }
        }
    }

    /// Legal moves, in rules-core order. Errors on a finished game.
    pub fn legal_moves(&self) -> Result<Vec<Move>, VariantError> {
        let set = self.move_set();
        match self.outcome_given(&set.moves) {
            Outcome::Ongoing => Ok(set.moves),
            done => Err(VariantError::Terminal(done)),
        }
    }

    pub(crate) fn outcome_given(&self, moves: &[Move]) -> Outcome {
        match self.static_outcome_given(moves) {
            Outcome::Ongoing if self.repetition_count() >= 3 => Outcome::Draw(DrawReason::Threefold),
            other => other,
        }
    }

    pub(crate) fn static_outcome_given(&self, moves: &[Move]) -> Outcome {
        let mover = self.position.side_to_move;
        if moves.is_empty() {
            return if movegen::in_check(&self.position, mover) {
                Outcome::win_for(!mover)
            } else {
                Outcome::Draw(DrawReason::Stalemate)
            };
        }
        if movegen::insufficient_material(&self.position) {
            Outcome::Draw(DrawReason::InsufficientMaterial)
        } else if self.position.halfmove_clock >= 100 {
            Outcome::Draw(DrawReason::FiftyMove)
        } else {
            Outcome::Ongoing
        }
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome_given(&self.move_set().moves)
    }

    /// Outcome ignoring repetition, which depends on history.
    pub fn static_outcome(&self) -> Outcome {
        self.static_outcome_given(&self.move_set().moves)
    }

    /// Plays a legal move.
    pub fn play(&self, m: Move) -> Result<VariantState, VariantError> {
        let set = self.move_set();
        let outcome = self.outcome_given(&set.moves);
        if outcome.is_terminal() {
            return Err(VariantError::Terminal(outcome));
        }
        if !set.moves.contains(&m) {
            if self.restricted_ply() && movegen::generate_legal_moves(&self.position).contains(&m) {
                let kind = self.restriction_violation(m).expect("filtered move violates the restriction");
                return Err(VariantError::Restricted { mv: m.uci(), ply: self.next_ply, kind });
            }
            return Err(VariantError::Illegal { mv: m.uci(), ply: self.next_ply });
        }
        Ok(self.advance(m, set.waived))
    }

    /// Board and ply after `m`, without history.
    pub(crate) fn successor(&self, m: Move, waived: bool) -> (Position, u32) {
        let mut position = movegen::make_move(&self.position, m);
        let step = if waived && self.waiver_mode == WaiverMode::CollapseToSingle { 2 } else { 1 };
        let next_ply = self.next_ply + step;
        position.side_to_move = self.schedule.mover_at_ply(next_ply);
        // Move labels advance once per two plies, as in standard chess.
        position.fullmove_number = self.position.fullmove_number + (next_ply.div_ceil(2) - self.next_ply.div_ceil(2));
        (position, next_ply)
    }

    /// Plays `m`, already known to be in [`Self::move_set`].
    pub(crate) fn advance(&self, m: Move, waived: bool) -> VariantState {
        let (position, next_ply) = self.successor(m, waived);
        let mut next = VariantState {
            position,
            schedule: Arc::clone(&self.schedule),
            next_ply,
            history: Arc::clone(&self.history),
            restriction_enabled: self.restriction_enabled,
            waiver_mode: self.waiver_mode,
        };
        let prev = (next.position.halfmove_clock > 0).then(|| Arc::clone(&self.history));
        next.history = Arc::new(HistoryNode { key: next.repetition_key(), prev });
        next
    }

    /// Leaf count of legal play sequences to `depth`. Like ordinary perft,
    /// draws by rule do not stop the count.
    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        let set = self.move_set();
        if depth == 1 {
            return set.moves.len() as u64;
        }
        set.moves.iter().map(|&m| self.advance(m, set.waived).perft(depth - 1)).sum()
    }

    /// Per-root-move variant perft, in move order.
    pub fn perft_divide(&self, depth: u32) -> Vec<(Move, u64)> {
        use rayon::prelude::*;
        let set = self.move_set();
        set.moves.par_iter().map(|&m| (m, self.advance(m, set.waived).perft(depth.saturating_sub(1)))).collect()
    }

    /// `<FEN> sched=<id-or-spec> ply=<n>`. History is not encoded.
    pub fn encode_xfen(&self) -> String {
        format!("{} sched={} ply={}", self.position.to_fen(), self.schedule.id(), self.next_ply)
    }

    pub fn decode_xfen(text: &str) -> Result<VariantState, VariantError> {
        let tokens: Vec<&str> = text.split(' ').collect();
        if tokens.len() != 8 || tokens.iter().any(|t| t.is_empty()) {
            return Err(VariantError::Xfen(format!("expected 6 FEN fields, sched= and ply= in `{text}`")));
        }
        let sched = tokens[6]
            .strip_prefix("sched=")
            .ok_or_else(|| VariantError::Xfen(format!("expected `sched=` token, found `{}`", tokens[6])))?;
        let ply: u32 = tokens[7]
            .strip_prefix("ply=")
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| VariantError::Xfen(format!("expected `ply=<n>` token, found `{}`", tokens[7])))?;
        let schedule = MoveSchedule::resolve(sched)?;
        let position = Position::parse_fen_unvalidated(&tokens[..6].join(" "))?;
        VariantState::new(position, schedule, ply)
    }

    /// Colors swapped, board flipped, schedule mirrored.
    pub fn mirrored(&self) -> VariantState {
        VariantState::from_parts(self.position.mirrored(), Arc::new(self.schedule.mirrored()), self.next_ply)
            .with_restriction(self.restriction_enabled)
            .with_waiver_mode(self.waiver_mode)
    }

    /// Maps a rules-core status onto an outcome, for callers that only have a position.
    pub fn outcome_from_status(status: GameStatus) -> Outcome {
        match status {
            GameStatus::Ongoing => Outcome::Ongoing,
            GameStatus::Checkmate(loser) => Outcome::win_for(!loser),
            GameStatus::Stalemate => Outcome::Draw(DrawReason::Stalemate),
            GameStatus::DrawFiftyMove => Outcome::Draw(DrawReason::FiftyMove),
            GameStatus::DrawInsufficientMaterial => Outcome::Draw(DrawReason::InsufficientMaterial),
        }
    }
}

fn dummy_key() -> RepetitionKey {
    RepetitionKey {
        placement: [None; 64],
        mover: Color::White,
        phase: Phase::Single,
        castling: CastlingRights::empty(),
        ep_target: None,
    }
}

impl fmt::Debug for VariantState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VariantState({})", self.encode_xfen())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::PieceKind;

    fn find(v: &VariantState, uci: &str) -> Move {
        movegen::generate_legal_moves(v.position()).into_iter().find(|m| m.uci() == uci).unwrap()
    }

    fn play_all(mut v: VariantState, ucis: &[&str]) -> VariantState {
        for u in ucis {
            let m = find(&v, u);
            v = v.play(m).unwrap();
        }
        v
    }

    #[test]
    fn balanced_ply_one_is_standard() {
        let v = VariantState::initial(MoveSchedule::balanced());
        assert_eq!(v.legal_moves().unwrap().len(), 20);
        assert_eq!(v.outcome(), Outcome::Ongoing);
    }

    #[test]
    fn black_double_move_after_e4() {
        let v = play_all(VariantState::initial(MoveSchedule::balanced()), &["e2e4"]);
        assert_eq!(v.side_to_move(), Color::Black);
        assert_eq!(v.next_ply(), 2);
        assert_eq!(v.phase(), Phase::FirstOfDouble);
        let v = play_all(v, &["d7d5"]);
        assert_eq!(v.phase(), Phase::SecondOfDouble);
        assert!(v.legal_moves().unwrap().iter().any(|m| m.uci() == "d5e4"));
    }

    #[test]
    fn first_half_cannot_capture() {
        let v = play_all(VariantState::initial(MoveSchedule::balanced()), &["e2e4", "d7d5", "d5e4"]);
        assert_eq!(v.side_to_move(), Color::White);
        assert_eq!(v.phase(), Phase::FirstOfDouble);
        let moves = v.legal_moves().unwrap();
        let e4 = "e4".parse::<Square>().unwrap();
        assert!(moves.iter().all(|m| m.to != e4));
        for u in ["b1c3", "d2d3", "f2f3"] {
            assert!(moves.iter().any(|m| m.uci() == u), "{u} missing");
        }
        // Bb5+ gives check and is filtered too.
        assert!(!moves.iter().any(|m| m.uci() == "f1b5"));
        assert!(matches!(
            v.play(find(&v, "f1b5")),
            Err(VariantError::Restricted { ply: 4, kind: RestrictionKind::Check, .. })
        ));
    }

    #[test]
    fn line_i_position() {
        let v = play_all(
            VariantState::initial(MoveSchedule::balanced()),
            &["e2e4", "d7d5", "d5e4", "b1c3", "c3e4"],
        );
        assert_eq!(v.next_ply(), 6);
        assert_eq!(v.side_to_move(), Color::Black);
        assert_eq!(v.position().piece_at("e4".parse().unwrap()), Some(Piece::new(Color::White, PieceKind::Knight)));
        assert_eq!(v.position().to_fen(), "rnbqkbnr/ppp1pppp/8/8/4N3/8/PPPP1PPP/R1BQKBNR b KQkq - 0 3");
    }

    #[test]
    fn standard_play_matches_apply_move() {
        let mut v = VariantState::initial(MoveSchedule::standard());
        let mut p = Position::startpos();
        for u in ["e2e4", "e7e5", "g1f3", "b8c6", "f1b5", "a7a6"] {
            let m = find(&v, u);
            v = v.play(m).unwrap();
            p = movegen::apply_move(&p, m).unwrap();
            assert_eq!(v.position(), &p);
        }
    }

    #[test]
    fn ep_target_expires_after_one_half_move() {
        // Black double-steps on the first half of its double move.
        let v = play_all(VariantState::initial(MoveSchedule::balanced()), &["e2e4", "d7d5"]);
        assert_eq!(v.position().ep_target(), Some("d6".parse().unwrap()));
        let v = play_all(v, &["g8f6"]);
        assert_eq!(v.position().ep_target(), None);
    }

    #[test]
    fn threefold_repetition() {
        let mut v = VariantState::initial(MoveSchedule::standard());
        let shuffle = ["g1f3", "g8f6", "f3g1", "f6g8"];
        for _ in 0..2 {
            v = play_all(v, &shuffle);
        }
        assert_eq!(v.repetition_count(), 3);
        assert_eq!(v.outcome(), Outcome::Draw(DrawReason::Threefold));
        assert!(matches!(v.legal_moves(), Err(VariantError::Terminal(_))));
    }

    #[test]
    fn checkmate_at_single_ply() {
        let p: Position = "rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3".parse().unwrap();
        let v = VariantState::new(p, MoveSchedule::standard(), 5).unwrap();
        assert_eq!(v.outcome(), Outcome::BlackWins);
    }

    #[test]
    fn xfen_round_trip_and_errors() {
        let v = VariantState::initial(MoveSchedule::balanced());
        let x = v.encode_xfen();
        assert_eq!(x, "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1 sched=balanced ply=1");
        let back = VariantState::decode_xfen(&x).unwrap();
        assert_eq!(back.position(), v.position());
        assert_eq!(back.next_ply(), 1);

        let bad = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR b KQkq - 0 1 sched=balanced ply=4";
        assert!(matches!(VariantState::decode_xfen(bad), Err(VariantError::SideMismatch { ply: 4, .. })));
        assert!(VariantState::decode_xfen("8/8 w - - 0 1 sched=balanced").is_err());
        assert!(VariantState::decode_xfen(&x.replace(' ', "  ")).is_err());
        let custom = VariantState::initial(MoveSchedule::parse("W/BBWW").unwrap());
        assert!(custom.encode_xfen().ends_with("sched=W/BBWW ply=1"));
        assert!(VariantState::decode_xfen(&custom.encode_xfen()).is_ok());
    }

    #[test]
    fn xfen_accepts_ep_on_second_half() {
        // White double-stepped on the first half and is to move again.
        let v = play_all(
            VariantState::initial(MoveSchedule::balanced()),
            &["e2e4", "d7d5", "g8f6", "c2c4"],
        );
        assert_eq!(v.side_to_move(), Color::White);
        assert_eq!(v.position().ep_target(), Some("c3".parse().unwrap()));
        let back = VariantState::decode_xfen(&v.encode_xfen()).unwrap();
        assert_eq!(back.position(), v.position());
    }

    #[test]
    fn waiver_modes() {
        // Black's only move is Kxa7, and Black moves twice.
        let p: Position = "k7/P7/P7/8/8/8/8/7K b - - 0 1".parse().unwrap();
        let sched = MoveSchedule::parse("/BBWW").unwrap();
        let v = VariantState::new(p.clone(), sched.clone(), 1).unwrap();
        assert_eq!(v.phase(), Phase::FirstOfDouble);
        let set = v.move_set();
        assert!(set.waived);
        assert!(set.moves.iter().all(|m| m.is_capture()));
        let after = v.play(set.moves[0]).unwrap();
        assert_eq!(after.next_ply(), 2);

        let c = VariantState::new(p, sched, 1).unwrap().with_waiver_mode(WaiverMode::CollapseToSingle);
        let after = c.play(c.move_set().moves[0]).unwrap();
        assert_eq!(after.next_ply(), 3);
        assert_eq!(after.side_to_move(), Color::White);
    }

    #[test]
    fn restriction_toggle() {
        let v = play_all(VariantState::initial(MoveSchedule::balanced()), &["e2e4", "d7d5", "d5e4"])
            .with_restriction(false);
        assert!(v.legal_moves().unwrap().iter().any(|m| m.uci() == "f1b5"));
    }
}
