//! Legal move generation, move application, terminal detection and perft.
//!
//! Mailbox generation over `(file, rank)` offsets, bounded by the board's
//! dimensions. Legality is checked by playing each pseudo-legal move and
//! testing the mover's king.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moves::{Move, MoveFlags};
use crate::position::{CastlingRights, Position};
use crate::types::{Color, Piece, PieceKind, Square};

pub const DEFAULT_MAX_PERFT_DEPTH: u32 = 6;

const KNIGHT_STEPS: [(i8, i8); 8] = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)];
const KING_STEPS: [(i8, i8); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
const ROOK_DIRS: [(i8, i8); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
const BISHOP_DIRS: [(i8, i8); 4] = [(1, 1), (-1, 1), (-1, -1), (1, -1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameStatus {
    Ongoing,
    /// Carries the color that was mated.
    Checkmate(Color),
    Stalemate,
    DrawFiftyMove,
    DrawInsufficientMaterial,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move {mv} is not legal in {fen}")]
    Illegal { mv: String, fen: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PerftError {
    #[error("perft depth {depth} exceeds the configured limit {limit}")]
    DepthLimit { depth: u32, limit: u32 },
}

/// True if any piece of color `by` attacks `sq`.
pub fn is_attacked(pos: &Position, sq: Square, by: Color) -> bool {
    let dims = pos.dims;
    let has = |s: Option<Square>, kind: PieceKind| s.is_some_and(|s| pos.board[s.index()] == Some(Piece::new(by, kind)));

    let back = -by.pawn_dir();
    if has(sq.offset(-1, back, dims), PieceKind::Pawn) || has(sq.offset(1, back, dims), PieceKind::Pawn) {
        return true;
    }
    if KNIGHT_STEPS.iter().any(|&(df, dr)| has(sq.offset(df, dr, dims), PieceKind::Knight)) {
        return true;
    }
    if KING_STEPS.iter().any(|&(df, dr)| has(sq.offset(df, dr, dims), PieceKind::King)) {
        return true;
    }
    for (dirs, slider) in [(ROOK_DIRS, PieceKind::Rook), (BISHOP_DIRS, PieceKind::Bishop)] {
        for (df, dr) in dirs {
            let mut cur = sq;
            while let Some(next) = cur.offset(df, dr, dims) {
                if let Some(p) = pos.board[next.index()] {
                    if p.color == by && (p.kind == slider || p.kind == PieceKind::Queen) {
                        return true;
                    }
                    break;
                }
                cur = next;
            }
        }
    }
    false
}

/// True iff `color`'s king is attacked.
pub fn in_check(pos: &Position, color: Color) -> bool {
    match pos.king_square(color) {
        Some(k) => is_attacked(pos, k, !color),
        None => false,
    }
}

fn push_pawn_move(out: &mut Vec<Move>, from: Square, to: Square, flags: MoveFlags, promote: bool) {
    if promote {
        for kind in PieceKind::PROMOTIONS {
            out.push(Move { from, to, promotion: Some(kind), flags });
        }
    } else {
        out.push(Move::with_flags(from, to, flags));
    }
}

/// Moves that obey piece movement but may leave the mover's king attacked.
/// Kings are never captured.
fn pseudo_legal_moves(pos: &Position, out: &mut Vec<Move>) {
    let dims = pos.dims;
    let us = pos.side_to_move;
    let target = |to: Square| -> Option<MoveFlags> {
        match pos.board[to.index()] {
            None => Some(MoveFlags::empty()),
            Some(p) if p.color != us && p.kind != PieceKind::King => Some(MoveFlags::CAPTURE),
            Some(_) => None,
        }
    };

    for from in dims.squares() {
        let Some(piece) = pos.board[from.index()] else { continue };
        if piece.color != us {
            continue;
        }
        match piece.kind {
            PieceKind::Pawn => {
                let dir = us.pawn_dir();
                let promo_rank = dims.promotion_rank(us);
                if let Some(one) = from.offset(0, dir, dims) {
                    if pos.board[one.index()].is_none() {
                        push_pawn_move(out, from, one, MoveFlags::empty(), one.rank() == promo_rank);
                        if dims.allows_double_step() && from.rank() == dims.pawn_start_rank(us) {
                            if let Some(two) = one.offset(0, dir, dims) {
                                if pos.board[two.index()].is_none() {
                                    out.push(Move::with_flags(from, two, MoveFlags::DOUBLE_PAWN_STEP));
                                }
                            }
                        }
                    }
                }
                for df in [-1, 1] {
                    let Some(to) = from.offset(df, dir, dims) else { continue };
                    match pos.board[to.index()] {
                        Some(p) if p.color != us && p.kind != PieceKind::King => {
                            push_pawn_move(out, from, to, MoveFlags::CAPTURE, to.rank() == promo_rank);
                        }
                        None if pos.ep_target == Some(to) => {
                            let victim = Square::new(to.file(), from.rank());
                            if pos.board[victim.index()] == Some(Piece::new(!us, PieceKind::Pawn)) {
                                out.push(Move::with_flags(from, to, MoveFlags::CAPTURE | MoveFlags::EN_PASSANT));
                            }
                        }
                        _ => {}
                    }
                }
            }
            PieceKind::Knight | PieceKind::King => {
                let steps = if piece.kind == PieceKind::Knight { &KNIGHT_STEPS } else { &KING_STEPS };
                for &(df, dr) in steps {
                    if let Some(to) = from.offset(df, dr, dims) {
                        if let Some(flags) = target(to) {
                            out.push(Move::with_flags(from, to, flags));
                        }
                    }
                }
                if piece.kind == PieceKind::King {
                    castling_moves(pos, from, out);
                }
            }
            PieceKind::Bishop | PieceKind::Rook | PieceKind::Queen => {
                let dirs: &[(i8, i8)] = match piece.kind {
                    PieceKind::Bishop => &BISHOP_DIRS,
                    PieceKind::Rook => &ROOK_DIRS,
                    _ => &[(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)],
                };
                for &(df, dr) in dirs {
                    let mut cur = from;
                    while let Some(to) = cur.offset(df, dr, dims) {
                        match pos.board[to.index()] {
                            None => out.push(Move::new(from, to)),
                            Some(p) => {
                                if p.color != us && p.kind != PieceKind::King {
                                    out.push(Move::with_flags(from, to, MoveFlags::CAPTURE));
                                }
                                break;
                            }
                        }
                        cur = to;
                    }
                }
            }
        }
    }
}

fn castling_moves(pos: &Position, king_from: Square, out: &mut Vec<Move>) {
    let dims = pos.dims;
    let us = pos.side_to_move;
    if !dims.allows_castling() {
        return;
    }
    let rank = dims.back_rank(us);
    if king_from != Square::new(4, rank) || pos.castling & CastlingRights::both(us) == CastlingRights::empty() {
        return;
    }
    let empty = |f: u8| pos.board[Square::new(f, rank).index()].is_none();
    let safe = |f: u8| !is_attacked(pos, Square::new(f, rank), !us);
    let rook = Some(Piece::new(us, PieceKind::Rook));

    if pos.castling.contains(CastlingRights::king_side(us))
        && pos.board[Square::new(7, rank).index()] == rook
        && empty(5)
        && empty(6)
        && safe(4)
        && safe(5)
        && safe(6)
    {
        out.push(Move::with_flags(king_from, Square::new(6, rank), MoveFlags::CASTLE_KING_SIDE));
    }
    if pos.castling.contains(CastlingRights::queen_side(us))
        && pos.board[Square::new(0, rank).index()] == rook
        && empty(1)
        && empty(2)
        && empty(3)
        && safe(4)
        && safe(3)
        && safe(2)
    {
        out.push(Move::with_flags(king_from, Square::new(2, rank), MoveFlags::CASTLE_QUEEN_SIDE));
    }
}

/// Plays `m` without checking legality.
pub(crate) fn make_move(pos: &Position, m: Move) -> Position {
    let mut next = pos.clone();
    let piece = next.board[m.from.index()].take().expect("move from an empty square");
    let us = piece.color;

    if m.is_en_passant() {
        next.board[Square::new(m.to.file(), m.from.rank()).index()] = None;
    }
    next.board[m.to.index()] = Some(match m.promotion {
        Some(kind) => Piece::new(us, kind),
        None => piece,
    });
    if m.is_castle() {
        let rank = m.from.rank();
        let (rook_from, rook_to) = if m.flags.contains(MoveFlags::CASTLE_KING_SIDE) { (7, 5) } else { (0, 3) };
        let rook = next.board[Square::new(rook_from, rank).index()].take();
        next.board[Square::new(rook_to, rank).index()] = rook;
    }

    if piece.kind == PieceKind::King {
        next.castling.remove(CastlingRights::both(us));
    }
    if next.dims.allows_castling() {
        for color in Color::ALL {
            let rank = next.dims.back_rank(color);
            for sq in [m.from, m.to] {
                if sq == Square::new(0, rank) {
                    next.castling.remove(CastlingRights::queen_side(color));
                } else if sq == Square::new(7, rank) {
                    next.castling.remove(CastlingRights::king_side(color));
                }
            }
        }
    }

    next.ep_target = if m.flags.contains(MoveFlags::DOUBLE_PAWN_STEP) {
        m.from.offset(0, us.pawn_dir(), next.dims)
    } else {
        None
    };
    if m.is_capture() || piece.kind == PieceKind::Pawn {
        next.halfmove_clock = 0;
    } else {
        next.halfmove_clock += 1;
    }
    if us == Color::Black {
        next.fullmove_number += 1;
    }
    next.side_to_move = !us;
    next
}

/// Legal moves for the side to move, sorted by from-square, to-square, then
/// promotion kind.
pub fn generate_legal_moves(pos: &Position) -> Vec<Move> {
    let mut pseudo = Vec::with_capacity(48);
    pseudo_legal_moves(pos, &mut pseudo);
    let us = pos.side_to_move;
    let mut legal: Vec<Move> = pseudo.into_iter().filter(|&m| !in_check(&make_move(pos, m), us)).collect();
    legal.sort_unstable();
    legal
}

fn has_legal_move(pos: &Position) -> bool {
    let mut pseudo = Vec::with_capacity(48);
    pseudo_legal_moves(pos, &mut pseudo);
    let us = pos.side_to_move;
    pseudo.into_iter().any(|m| !in_check(&make_move(pos, m), us))
}

/// Plays a legal move. Rejects anything not in [`generate_legal_moves`].
pub fn apply_move(pos: &Position, m: Move) -> Result<Position, MoveError> {
    if !generate_legal_moves(pos).contains(&m) {
        return Err(MoveError::Illegal { mv: m.uci(), fen: pos.to_fen() });
    }
    Ok(make_move(pos, m))
}

/// Neither side can ever deliver mate: bare kings, a single minor piece, or
/// only bishops that all stand on one square color.
pub fn insufficient_material(pos: &Position) -> bool {
    let mut minors = 0;
    let mut knights = 0;
    let mut bishop_colors = [false, false];
    for (sq, p) in pos.pieces() {
        match p.kind {
            PieceKind::King => {}
            PieceKind::Pawn | PieceKind::Rook | PieceKind::Queen => return false,
            PieceKind::Knight => {
                minors += 1;
                knights += 1;
            }
            PieceKind::Bishop => {
                minors += 1;
                bishop_colors[sq.is_light() as usize] = true;
            }
        }
    }
    minors <= 1 || (knights == 0 && !(bishop_colors[0] && bishop_colors[1]))
}

pub fn game_status(pos: &Position) -> GameStatus {
    if !has_legal_move(pos) {
        return if in_check(pos, pos.side_to_move) {
            GameStatus::Checkmate(pos.side_to_move)
        } else {
            GameStatus::Stalemate
        };
    }
    if insufficient_material(pos) {
        GameStatus::DrawInsufficientMaterial
    } else if pos.halfmove_clock >= 100 {
        GameStatus::DrawFiftyMove
    } else {
        GameStatus::Ongoing
    }
}

fn perft_inner(pos: &Position, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let moves = generate_legal_moves(pos);
    if depth == 1 {
        return moves.len() as u64;
    }
    moves.iter().map(|&m| perft_inner(&make_move(pos, m), depth - 1)).sum()
}

/// Leaf count of the legal-move tree at `depth`, with the default depth limit.
pub fn perft(pos: &Position, depth: u32) -> Result<u64, PerftError> {
    perft_with_limit(pos, depth, DEFAULT_MAX_PERFT_DEPTH)
}

pub fn perft_with_limit(pos: &Position, depth: u32, limit: u32) -> Result<u64, PerftError> {
    if depth > limit {
        return Err(PerftError::DepthLimit { depth, limit });
    }
    Ok(perft_inner(pos, depth))
}

/// Perft with root moves split across the rayon pool. Same count as [`perft`].
pub fn perft_parallel(pos: &Position, depth: u32, limit: u32) -> Result<u64, PerftError> {
    if depth > limit {
        return Err(PerftError::DepthLimit { depth, limit });
    }
    if depth <= 1 {
        return Ok(perft_inner(pos, depth));
    }
    let moves = generate_legal_moves(pos);
    Ok(moves.par_iter().map(|&m| perft_inner(&make_move(pos, m), depth - 1)).sum())
}

/// Per-root-move breakdown, in move order.
pub fn perft_divide(pos: &Position, depth: u32, limit: u32) -> Result<Vec<(Move, u64)>, PerftError> {
    if depth == 0 || depth > limit {
        return Err(PerftError::DepthLimit { depth, limit });
    }
    Ok(generate_legal_moves(pos)
        .into_par_iter()
        .map(|m| (m, perft_inner(&make_move(pos, m), depth - 1)))
        .collect())
}
