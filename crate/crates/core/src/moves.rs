use std::cmp::Ordering;
use std::fmt;

use bitflags::bitflags;

use crate::types::{PieceKind, Square};

bitflags! {
    #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
    pub struct MoveFlags: u8 {
        const CAPTURE = 1;
        const EN_PASSANT = 1 << 1;
        const CASTLE_KING_SIDE = 1 << 2;
        const CASTLE_QUEEN_SIDE = 1 << 3;
        const DOUBLE_PAWN_STEP = 1 << 4;
    }
}

/// A fully specified move. Equality and order ignore nothing, but for legal
/// moves of one position `(from, to, promotion)` already identifies the move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub from: Square,
    pub to: Square,
    pub promotion: Option<PieceKind>,
    pub flags: MoveFlags,
}

impl Move {
    pub fn new(from: Square, to: Square) -> Move {
        Move { from, to, promotion: None, flags: MoveFlags::empty() }
    }

    pub(crate) fn with_flags(from: Square, to: Square, flags: MoveFlags) -> Move {
        Move { from, to, promotion: None, flags }
    }

    #[inline]
    pub fn is_capture(self) -> bool {
        self.flags.contains(MoveFlags::CAPTURE)
    }

    #[inline]
    pub fn is_en_passant(self) -> bool {
        self.flags.contains(MoveFlags::EN_PASSANT)
    }

    #[inline]
    pub fn is_castle(self) -> bool {
        self.flags.intersects(MoveFlags::CASTLE_KING_SIDE | MoveFlags::CASTLE_QUEEN_SIDE)
    }

    /// Coordinate notation as spoken by UCI, e.g. `e2e4` or `e7e8q`.
    pub fn uci(self) -> String {
        let mut s = format!("{}{}", self.from, self.to);
        if let Some(k) = self.promotion {
            s.push(k.letter());
        }
        s
    }

    fn sort_key(&self) -> (Square, Square, Option<PieceKind>, u8) {
        (self.from, self.to, self.promotion, self.flags.bits())
    }
}

impl Ord for Move {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Move {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.uci())
    }
}
