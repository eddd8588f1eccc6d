//! SAN and annotated move lines such as `1. e4 d5 2. dxe4 (B) Nc3 (W) 3. Nxe4`.
//!
//! Move-number labels group plies in twos, as in ordinary chess. A `(B)` or
//! `(W)` after a move marks a ply whose mover differs from ordinary chess.
//! Labels never decide who moves; the schedule does.

use serde::Serialize;
use thiserror::Error;

use crate::movegen;
use crate::moves::{Move, MoveFlags};
use crate::schedule::{MoveSchedule, Phase};
use crate::types::{Color, PieceKind, Square};
use crate::variant::{Outcome, RestrictionKind, VariantError, VariantState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    #[error("unreadable SAN token `{0}`")]
    BadToken(String),
    #[error("ply {ply}: `{san}` matches no legal move")]
    Illegal { ply: u32, san: String },
    #[error("ply {ply}: `{san}` is ambiguous ({candidates})")]
    Ambiguous { ply: u32, san: String, candidates: String },
    #[error("ply {ply}: `{san}` is a {kind}")]
    Restricted { ply: u32, san: String, kind: RestrictionKind },
    #[error("ply {ply}: annotated ({annotated}) but the schedule gives the move to {expected}")]
    AnnotationMismatch { ply: u32, annotated: char, expected: Color },
    #[error("annotation `{0}` does not follow a move")]
    DanglingAnnotation(String),
    #[error("ply {ply}: game already over ({outcome:?})")]
    Terminal { ply: u32, outcome: Outcome },
}

/// Something worth reporting about a line that is still accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ParseNote {
    /// The annotation repeats what ordinary chess would give anyway.
    RedundantAnnotation { ply: u32 },
    /// The move-number label does not match the ply's position in the line.
    LabelMismatch { ply: u32, label: u32, expected: u32 },
}

impl std::fmt::Display for ParseNote {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseNote::RedundantAnnotation { ply } => write!(f, "ply {ply}: annotation matches ordinary alternation"),
            ParseNote::LabelMismatch { ply, label, expected } => {
                write!(f, "ply {ply}: labelled move {label}, expected {expected}")
            }
        }
    }
}

/// One resolved ply of a line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineStep {
    pub ply: u32,
    pub mover: Color,
    pub phase: Phase,
    pub san: String,
    pub uci: String,
    /// The restriction had to be waived because no other move existed.
    pub waived: bool,
}

#[derive(Debug, Clone)]
pub struct ParsedLine {
    pub moves: Vec<Move>,
    pub steps: Vec<LineStep>,
    pub notes: Vec<ParseNote>,
    pub final_state: VariantState,
}

/// Mover of `ply` in ordinary chess.
fn standard_mover(ply: u32) -> Color {
    if ply % 2 == 1 {
        Color::White
    } else {
        Color::Black
    }
}

fn kind_letter(kind: PieceKind) -> char {
    kind.letter().to_ascii_uppercase()
}

/// SAN of `m` in `state`, with `+`/`#` suffix. `m` must be in the state's move set.
pub fn san(state: &VariantState, m: Move) -> String {
    let set = state.move_set();
    let mut out = san_without_suffix(state, &set.moves, m);
    let after = state.advance(m, set.waived);
    let mover = state.side_to_move();
    if after.outcome() == Outcome::win_for(mover) {
        out.push('#');
    } else if movegen::in_check(after.position(), !mover) {
        out.push('+');
    }
    out
}

fn san_without_suffix(state: &VariantState, legal: &[Move], m: Move) -> String {
    if m.flags.contains(MoveFlags::CASTLE_KING_SIDE) {
        return "O-O".into();
    }
    if m.flags.contains(MoveFlags::CASTLE_QUEEN_SIDE) {
        return "O-O-O".into();
    }
    let pos = state.position();
    let kind = pos.piece_at(m.from).expect("move from an occupied square").kind;
    let mut out = String::new();
    if kind == PieceKind::Pawn {
        if m.is_capture() {
            out.push(m.from.file_char());
            out.push('x');
        }
        out.push_str(&m.to.to_string());
        if let Some(p) = m.promotion {
            out.push('=');
            out.push(kind_letter(p));
        }
        return out;
    }
    out.push(kind_letter(kind));
    let rivals: Vec<Square> = legal
        .iter()
        .filter(|o| o.to == m.to && o.from != m.from && pos.piece_at(o.from).map(|p| p.kind) == Some(kind))
        .map(|o| o.from)
        .collect();
    if !rivals.is_empty() {
        if rivals.iter().all(|s| s.file() != m.from.file()) {
            out.push(m.from.file_char());
        } else if rivals.iter().all(|s| s.rank() != m.from.rank()) {
            out.push(m.from.rank_char());
        } else {
            out.push_str(&m.from.to_string());
        }
    }
    if m.is_capture() {
        out.push('x');
    }
    out.push_str(&m.to.to_string());
    out
}

#[derive(Debug, Default)]
struct SanPattern {
    castle: Option<MoveFlags>,
    kind: Option<PieceKind>,
    from_file: Option<u8>,
    from_rank: Option<u8>,
    capture: bool,
    to: Option<Square>,
    promotion: Option<PieceKind>,
}

fn parse_pattern(token: &str) -> Result<SanPattern, NotationError> {
    let bad = || NotationError::BadToken(token.to_string());
    let t = token.trim_end_matches("e.p.").trim_end_matches(['+', '#', '!', '?']);
    match t {
        "O-O" | "0-0" => return Ok(SanPattern { castle: Some(MoveFlags::CASTLE_KING_SIDE), ..Default::default() }),
        "O-O-O" | "0-0-0" => {
            return Ok(SanPattern { castle: Some(MoveFlags::CASTLE_QUEEN_SIDE), ..Default::default() })
        }
        _ => {}
    }
    let mut chars: Vec<char> = t.chars().collect();
    let mut pat = SanPattern::default();
    let kind = match chars.first() {
        Some(&c @ ('K' | 'Q' | 'R' | 'B' | 'N')) => {
            chars.remove(0);
            PieceKind::from_letter(c).ok_or_else(bad)?
        }
        Some(_) => PieceKind::Pawn,
        None => return Err(bad()),
    };
    pat.kind = Some(kind);
    if kind == PieceKind::Pawn {
        if let Some(&last) = chars.last() {
            if matches!(last, 'Q' | 'R' | 'B' | 'N') {
                pat.promotion = PieceKind::from_letter(last);
                chars.pop();
                if chars.last() == Some(&'=') {
                    chars.pop();
                }
            }
        }
    }
    if chars.len() < 2 {
        return Err(bad());
    }
    let dest: String = chars[chars.len() - 2..].iter().collect();
    pat.to = Some(dest.parse().map_err(|_| bad())?);
    for &c in &chars[..chars.len() - 2] {
        match c {
            'a'..='h' if pat.from_file.is_none() && !pat.capture => pat.from_file = Some(c as u8 - b'a'),
            '1'..='8' if pat.from_rank.is_none() && !pat.capture => pat.from_rank = Some(c as u8 - b'1'),
            'x' | ':' if !pat.capture => pat.capture = true,
            _ => return Err(bad()),
        }
    }
    Ok(pat)
}

fn matches(pat: &SanPattern, state: &VariantState, m: Move) -> bool {
    if let Some(flag) = pat.castle {
        return m.flags.contains(flag);
    }
    if m.is_castle() {
        return false;
    }
    let Some(piece) = state.position().piece_at(m.from) else { return false };
    if Some(piece.kind) != pat.kind || Some(m.to) != pat.to || m.promotion != pat.promotion {
        return false;
    }
    if pat.capture && !m.is_capture() {
        return false;
    }
    if pat.from_file.is_some_and(|f| f != m.from.file()) || pat.from_rank.is_some_and(|r| r != m.from.rank()) {
        return false;
    }
    // A bare pawn destination means a push along the file.
    if piece.kind == PieceKind::Pawn && pat.from_file.is_none() && m.from.file() != m.to.file() {
        return false;
    }
    true
}

/// Resolves one SAN token against the legal moves of `state`.
pub fn parse_san(state: &VariantState, token: &str) -> Result<Move, NotationError> {
    let ply = state.next_ply();
    let pat = parse_pattern(token)?;
    let set = state.move_set();
    let outcome = state.outcome();
    if outcome.is_terminal() {
        return Err(NotationError::Terminal { ply, outcome });
    }
    let found: Vec<Move> = set.moves.iter().copied().filter(|&m| matches(&pat, state, m)).collect();
    match found.len() {
        1 => Ok(found[0]),
        0 => {
            if state.restricted_ply() {
                let unrestricted = movegen::generate_legal_moves(state.position());
                if let Some(&m) = unrestricted.iter().find(|&&m| matches(&pat, state, m)) {
                    let kind = state.restriction_violation(m).expect("filtered move breaks the restriction");
                    return Err(NotationError::Restricted { ply, san: token.to_string(), kind });
                }
            }
            Err(NotationError::Illegal { ply, san: token.to_string() })
        }
        _ => Err(NotationError::Ambiguous {
            ply,
            san: token.to_string(),
            candidates: found.iter().map(|m| m.uci()).collect::<Vec<_>>().join(", "),
        }),
    }
}

/// Finds the move written in coordinate notation (`e2e4`, `a7a8q`) among
/// the rules-legal moves. Whether the schedule allows it is left to
/// [`VariantState::play`].
pub fn parse_uci(state: &VariantState, text: &str) -> Result<Move, NotationError> {
    let ply = state.next_ply();
    movegen::generate_legal_moves(state.position())
        .into_iter()
        .find(|m| m.uci() == text)
        .ok_or_else(|| NotationError::Illegal { ply, san: text.to_string() })
}

fn split_label(word: &str) -> Option<(u32, bool, &str)> {
    let digits = word.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits == 0 || !word[digits..].starts_with('.') {
        return None;
    }
    let n = word[..digits].parse().ok()?;
    let rest = &word[digits..];
    let dots = rest.chars().take_while(|&c| c == '.').count();
    Some((n, dots >= 3, &rest[dots..]))
}

/// Parses a whitespace-separated line of labels, SAN moves and `(B)`/`(W)`
/// annotations, playing it from `start`.
pub fn parse_line(text: &str, start: &VariantState) -> Result<ParsedLine, NotationError> {
    let mut state = start.clone();
    let mut moves = Vec::new();
    let mut steps: Vec<LineStep> = Vec::new();
    let mut notes = Vec::new();
    let mut pending_label: Option<(u32, bool)> = None;

    for word in text.split_whitespace() {
        if matches!(word, "1-0" | "0-1" | "1/2-1/2" | "*") {
            break;
        }
        if let Some(letter) = word.strip_prefix('(').and_then(|w| w.strip_suffix(')')) {
            let annotated = match letter {
                "W" => Color::White,
                "B" => Color::Black,
                _ => return Err(NotationError::BadToken(word.to_string())),
            };
            let step = steps.last().ok_or_else(|| NotationError::DanglingAnnotation(word.to_string()))?;
            if step.mover != annotated {
                return Err(NotationError::AnnotationMismatch {
                    ply: step.ply,
                    annotated: annotated.letter(),
                    expected: step.mover,
                });
            }
            if standard_mover(step.ply) == annotated {
                notes.push(ParseNote::RedundantAnnotation { ply: step.ply });
            }
            continue;
        }
        let token = match split_label(word) {
            Some((n, black_slot, rest)) => {
                pending_label = Some((n, black_slot));
                if rest.is_empty() {
                    continue;
                }
                rest
            }
            None => word,
        };

        let ply = state.next_ply();
        if let Some((label, _)) = pending_label.take() {
            let expected = ply.div_ceil(2);
            if label != expected {
                notes.push(ParseNote::LabelMismatch { ply, label, expected });
            }
        }
        let m = parse_san(&state, token)?;
        let set = state.move_set();
        steps.push(LineStep {
            ply,
            mover: state.side_to_move(),
            phase: state.phase(),
            san: san(&state, m),
            uci: m.uci(),
            waived: set.waived,
        });
        state = state.advance(m, set.waived);
        moves.push(m);
    }
    Ok(ParsedLine { moves, steps, notes, final_state: state })
}

/// Parses `text` from the standard initial position under `schedule`.
pub fn parse_line_from_start(text: &str, schedule: &MoveSchedule) -> Result<ParsedLine, NotationError> {
    parse_line(text, &VariantState::initial(schedule.clone()))
}

/// Renders `moves` from `start`, annotating plies whose mover differs from
/// ordinary chess.
pub fn format_line(moves: &[Move], start: &VariantState) -> Result<String, NotationError> {
    let mut state = start.clone();
    let mut words: Vec<String> = Vec::new();
    for (i, &m) in moves.iter().enumerate() {
        let ply = state.next_ply();
        let set = state.move_set();
        if let Err(VariantError::Terminal(outcome)) = state.legal_moves() {
            return Err(NotationError::Terminal { ply, outcome });
        }
        if !set.moves.contains(&m) {
            return Err(NotationError::Illegal { ply, san: m.uci() });
        }
        if ply % 2 == 1 {
            words.push(format!("{}.", ply.div_ceil(2)));
        } else if i == 0 {
            words.push(format!("{}...", ply / 2));
        }
        words.push(san(&state, m));
        let mover = state.side_to_move();
        if mover != standard_mover(ply) {
            words.push(format!("({})", mover.letter()));
        }
        state = state.advance(m, set.waived);
    }
    Ok(words.join(" "))
}
