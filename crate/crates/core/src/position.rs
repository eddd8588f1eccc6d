//! Board state and FEN.
//!
//! The same FEN grammar covers reduced boards: the number of `/`-separated
//! rows gives the rank count and each row's width gives the file count.

use std::fmt;
use std::str::FromStr;

use bitflags::bitflags;
use thiserror::Error;

use crate::movegen;
use crate::types::{Color, Dims, Piece, PieceKind, Square};

pub const STARTPOS_FEN: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

bitflags! {
    #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
    pub struct CastlingRights: u8 {
        const WHITE_KING_SIDE = 1;
        const WHITE_QUEEN_SIDE = 1 << 1;
        const BLACK_KING_SIDE = 1 << 2;
        const BLACK_QUEEN_SIDE = 1 << 3;
    }
}

impl CastlingRights {
    pub fn king_side(color: Color) -> CastlingRights {
        match color {
            Color::White => CastlingRights::WHITE_KING_SIDE,
            Color::Black => CastlingRights::BLACK_KING_SIDE,
        }
    }

    pub fn queen_side(color: Color) -> CastlingRights {
        match color {
            Color::White => CastlingRights::WHITE_QUEEN_SIDE,
            Color::Black => CastlingRights::BLACK_QUEEN_SIDE,
        }
    }

    pub fn both(color: Color) -> CastlingRights {
        Self::king_side(color) | Self::queen_side(color)
    }

    fn swapped(self) -> CastlingRights {
        let mut out = CastlingRights::empty();
        for color in Color::ALL {
            if self.contains(Self::king_side(color)) {
                out |= Self::king_side(!color);
            }
            if self.contains(Self::queen_side(color)) {
                out |= Self::queen_side(!color);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositionError {
    #[error("malformed FEN: {0}")]
    Fen(String),
    #[error("{color} has {count} kings, expected exactly one")]
    KingCount { color: Color, count: usize },
    #[error("kings on adjacent squares")]
    KingsAdjacent,
    #[error("pawn on first or last rank at {0}")]
    PawnOnBackRank(Square),
    #[error("castling right `{0}` inconsistent with the board")]
    Castling(char),
    #[error("en-passant square {0} does not follow a double pawn step")]
    EnPassant(Square),
    #[error("{0} is in check but has just moved")]
    MoverInCheck(Color),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Position {
    pub(crate) board: [Option<Piece>; 64],
    pub(crate) dims: Dims,
    pub(crate) side_to_move: Color,
    pub(crate) castling: CastlingRights,
    pub(crate) ep_target: Option<Square>,
    pub(crate) halfmove_clock: u32,
    pub(crate) fullmove_number: u32,
}

impl Position {
    pub fn startpos() -> Position {
        STARTPOS_FEN.parse().expect("start position FEN is valid")
    }

    /// Builds a position from a piece list, with no castling rights and no
    /// en-passant square. Validated like a FEN.
    pub fn from_pieces(
        dims: Dims,
        pieces: &[(Square, Piece)],
        side_to_move: Color,
    ) -> Result<Position, PositionError> {
        let mut board = [None; 64];
        for &(sq, piece) in pieces {
            if !dims.contains(sq) {
                return Err(PositionError::Fen(format!("{sq} outside {dims} board")));
            }
            if board[sq.index()].replace(piece).is_some() {
                return Err(PositionError::Fen(format!("two pieces on {sq}")));
            }
        }
        let pos = Position {
            board,
            dims,
            side_to_move,
            castling: CastlingRights::empty(),
            ep_target: None,
            halfmove_clock: 0,
            fullmove_number: 1,
        };
        pos.validate(!side_to_move)?;
        Ok(pos)
    }

    /// Parses a FEN without the "side that just moved is not in check" and
    /// en-passant checks, which depend on who moved last.
    pub(crate) fn parse_fen_unvalidated(fen: &str) -> Result<Position, PositionError> {
        let bad = |msg: &str| PositionError::Fen(format!("{msg} in `{fen}`"));
        let fields: Vec<&str> = fen.split_whitespace().collect();
        if fields.len() != 6 && fields.len() != 4 {
            return Err(bad("expected 6 fields"));
        }

        let rows: Vec<&str> = fields[0].split('/').collect();
        let ranks = rows.len();
        let mut files = None;
        let mut board = [None; 64];
        for (i, row) in rows.iter().enumerate() {
            if ranks > 8 {
                return Err(bad("more than 8 ranks"));
            }
            let rank = (ranks - 1 - i) as u8;
            let mut file = 0u8;
            for c in row.chars() {
                if let Some(d) = c.to_digit(10) {
                    if d == 0 {
                        return Err(bad("zero skip count"));
                    }
                    file += d as u8;
                } else {
                    let piece = Piece::from_fen_char(c).ok_or_else(|| bad("bad piece letter"))?;
                    if file >= 8 {
                        return Err(bad("row wider than 8 files"));
                    }
                    board[Square::new(file, rank).index()] = Some(piece);
                    file += 1;
                }
                if file > 8 {
                    return Err(bad("row wider than 8 files"));
                }
            }
            match files {
                None => files = Some(file),
                Some(f) if f != file => return Err(bad("rows of unequal width")),
                _ => {}
            }
        }
        let dims = Dims::new(files.unwrap_or(0), ranks as u8).map_err(|e| bad(&e.to_string()))?;

        let side_to_move = match fields[1] {
            "w" => Color::White,
            "b" => Color::Black,
            _ => return Err(bad("side to move must be `w` or `b`")),
        };

        let mut castling = CastlingRights::empty();
        if fields[2] != "-" {
            for c in fields[2].chars() {
                castling |= match c {
                    'K' => CastlingRights::WHITE_KING_SIDE,
                    'Q' => CastlingRights::WHITE_QUEEN_SIDE,
                    'k' => CastlingRights::BLACK_KING_SIDE,
                    'q' => CastlingRights::BLACK_QUEEN_SIDE,
                    _ => return Err(bad("bad castling field")),
                };
            }
        }

        let ep_target = match fields[3] {
            "-" => None,
            s => {
                let sq: Square = s.parse().map_err(|_| bad("bad en-passant square"))?;
                if !dims.contains(sq) {
                    return Err(bad("en-passant square off the board"));
                }
                Some(sq)
            }
        };

        let (halfmove_clock, fullmove_number) = if fields.len() == 6 {
            let h = fields[4].parse().map_err(|_| bad("bad halfmove clock"))?;
            let f: u32 = fields[5].parse().map_err(|_| bad("bad fullmove number"))?;
            if f == 0 {
                return Err(bad("fullmove number must be positive"));
            }
            (h, f)
        } else {
            (0, 1)
        };

        Ok(Position { board, dims, side_to_move, castling, ep_target, halfmove_clock, fullmove_number })
    }

    /// Checks board invariants, given the color that made the last move.
    ///
    /// In ordinary chess `last_mover` is the side not to move; under a
    /// schedule with double moves it can be the side to move.
    pub(crate) fn validate(&self, last_mover: Color) -> Result<(), PositionError> {
        let mut kings = [Vec::new(), Vec::new()];
        for sq in self.dims.squares() {
            if let Some(p) = self.board[sq.index()] {
                if p.kind == PieceKind::King {
                    kings[p.color.index()].push(sq);
                }
                if p.kind == PieceKind::Pawn && (sq.rank() == 0 || sq.rank() == self.dims.ranks - 1) {
                    return Err(PositionError::PawnOnBackRank(sq));
                }
            }
        }
        for color in Color::ALL {
            let count = kings[color.index()].len();
            if count != 1 {
                return Err(PositionError::KingCount { color, count });
            }
        }
        let (wk, bk) = (kings[0][0], kings[1][0]);
        if (wk.file() as i8 - bk.file() as i8).abs() <= 1 && (wk.rank() as i8 - bk.rank() as i8).abs() <= 1 {
            return Err(PositionError::KingsAdjacent);
        }

        for (right, letter) in [
            (CastlingRights::WHITE_KING_SIDE, 'K'),
            (CastlingRights::WHITE_QUEEN_SIDE, 'Q'),
            (CastlingRights::BLACK_KING_SIDE, 'k'),
            (CastlingRights::BLACK_QUEEN_SIDE, 'q'),
        ] {
            if !self.castling.contains(right) {
                continue;
            }
            let color = if letter.is_ascii_uppercase() { Color::White } else { Color::Black };
            let ok = self.dims.allows_castling() && {
                let rank = self.dims.back_rank(color);
                let rook_file = if letter.eq_ignore_ascii_case(&'k') { 7 } else { 0 };
                self.board[Square::new(4, rank).index()] == Some(Piece::new(color, PieceKind::King))
                    && self.board[Square::new(rook_file, rank).index()]
                        == Some(Piece::new(color, PieceKind::Rook))
            };
            if !ok {
                return Err(PositionError::Castling(letter));
            }
        }

        if let Some(ep) = self.ep_target {
            let dir = last_mover.pawn_dir();
            let expected_rank = self.dims.pawn_start_rank(last_mover) as i8 + dir;
            let ok = self.dims.allows_double_step()
                && ep.rank() as i8 == expected_rank
                && self.board[ep.index()].is_none()
                && ep.offset(0, -dir, self.dims).is_some_and(|s| self.board[s.index()].is_none())
                && ep
                    .offset(0, dir, self.dims)
                    .is_some_and(|s| self.board[s.index()] == Some(Piece::new(last_mover, PieceKind::Pawn)));
            if !ok {
                return Err(PositionError::EnPassant(ep));
            }
        }

        if movegen::in_check(self, last_mover) {
            return Err(PositionError::MoverInCheck(last_mover));
        }
        Ok(())
    }

    pub fn to_fen(&self) -> String {
        let mut out = String::new();
        for rank in (0..self.dims.ranks).rev() {
            let mut empty = 0;
            for file in 0..self.dims.files {
                match self.board[Square::new(file, rank).index()] {
                    Some(p) => {
                        if empty > 0 {
                            out.push_str(&empty.to_string());
                            empty = 0;
                        }
                        out.push(p.fen_char());
                    }
                    None => empty += 1,
                }
            }
            if empty > 0 {
                out.push_str(&empty.to_string());
            }
            if rank > 0 {
                out.push('/');
            }
        }
        out.push(' ');
        out.push(match self.side_to_move {
            Color::White => 'w',
            Color::Black => 'b',
        });
        out.push(' ');
        if self.castling.is_empty() {
            out.push('-');
        } else {
            for (right, c) in [
                (CastlingRights::WHITE_KING_SIDE, 'K'),
                (CastlingRights::WHITE_QUEEN_SIDE, 'Q'),
                (CastlingRights::BLACK_KING_SIDE, 'k'),
                (CastlingRights::BLACK_QUEEN_SIDE, 'q'),
            ] {
                if self.castling.contains(right) {
                    out.push(c);
                }
            }
        }
        out.push(' ');
        match self.ep_target {
            Some(sq) => out.push_str(&sq.to_string()),
            None => out.push('-'),
        }
        out.push_str(&format!(" {} {}", self.halfmove_clock, self.fullmove_number));
        out
    }

    #[inline]
    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        self.board[sq.index()]
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn side_to_move(&self) -> Color {
        self.side_to_move
    }

    pub fn castling_rights(&self) -> CastlingRights {
        self.castling
    }

    pub fn ep_target(&self) -> Option<Square> {
        self.ep_target
    }

    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    /// Occupied squares and their pieces, in square order.
    pub fn pieces(&self) -> impl Iterator<Item = (Square, Piece)> + '_ {
        self.dims.squares().filter_map(|sq| self.board[sq.index()].map(|p| (sq, p)))
    }

    pub fn king_square(&self, color: Color) -> Option<Square> {
        let king = Some(Piece::new(color, PieceKind::King));
        self.dims.squares().find(|sq| self.board[sq.index()] == king)
    }

    /// Colors swapped and the board flipped top to bottom.
    pub fn mirrored(&self) -> Position {
        let mut board = [None; 64];
        for (sq, p) in self.pieces() {
            board[sq.flip_rank(self.dims.ranks).index()] = Some(Piece::new(!p.color, p.kind));
        }
        Position {
            board,
            dims: self.dims,
            side_to_move: !self.side_to_move,
            castling: self.castling.swapped(),
            ep_target: self.ep_target.map(|sq| sq.flip_rank(self.dims.ranks)),
            halfmove_clock: self.halfmove_clock,
            fullmove_number: self.fullmove_number,
        }
    }
}

impl FromStr for Position {
    type Err = PositionError;

    fn from_str(fen: &str) -> Result<Position, PositionError> {
        let pos = Position::parse_fen_unvalidated(fen)?;
        pos.validate(!pos.side_to_move)?;
        Ok(pos)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fen())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Position({})", self.to_fen())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn startpos_round_trip() {
        let p = Position::startpos();
        assert_eq!(p.to_fen(), STARTPOS_FEN);
        assert_eq!(p.dims(), Dims::STANDARD);
        assert_eq!(p.side_to_move(), Color::White);
    }

    #[test]
    fn reduced_board_fen() {
        let p: Position = "k3/4/4/1K2 w - - 0 1".parse().unwrap();
        assert_eq!(p.dims(), Dims::new(4, 4).unwrap());
        assert_eq!(p.to_fen(), "k3/4/4/1K2 w - - 0 1");
        assert_eq!(p.king_square(Color::White), Some(Square::new(1, 0)));
    }

    #[test]
    fn rejects_bad_positions() {
        assert!(matches!("k7/8/8/8/8/8/8/8 w - - 0 1".parse::<Position>(), Err(PositionError::KingCount { .. })));
        assert_eq!("kK6/8/8/8/8/8/8/8 w - - 0 1".parse::<Position>(), Err(PositionError::KingsAdjacent));
        assert!(matches!(
            "k7/8/8/8/8/8/8/P6K w - - 0 1".parse::<Position>(),
            Err(PositionError::PawnOnBackRank(_))
        ));
        // White to move while Black's king is attacked.
        assert_eq!(
            "k7/8/8/8/8/8/8/R6K w - - 0 1".parse::<Position>(),
            Err(PositionError::MoverInCheck(Color::Black))
        );
        assert_eq!(
            "4k3/8/8/8/8/8/8/4K3 w K - 0 1".parse::<Position>(),
            Err(PositionError::Castling('K'))
        );
        assert!(matches!("4k3/8/8/8/8/8/8/4K3 w - e3 0 1".parse::<Position>(), Err(PositionError::EnPassant(_))));
        assert!("8/8 w - -".parse::<Position>().is_err());
        assert!("k2/3/K1 w - - 0 1".parse::<Position>().is_err());
    }

    #[test]
    fn ep_after_double_step() {
        let p: Position = "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1".parse().unwrap();
        assert_eq!(p.ep_target(), Some("e3".parse().unwrap()));
    }

    #[test]
    fn mirror_is_involution() {
        let p: Position = "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1".parse().unwrap();
        let m = p.mirrored();
        assert_eq!(m.side_to_move(), Color::Black);
        assert_eq!(m.mirrored(), p);
        assert_eq!(m.castling_rights(), p.castling_rights());
    }
}
