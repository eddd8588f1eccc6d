//! Colors, pieces, squares and board dimensions.

use std::fmt;
use std::ops::Not;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported number of files or ranks.
pub const MAX_DIM: u8 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::White, Color::Black];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// `W` or `B`, as used in schedule strings and line annotations.
    pub fn letter(self) -> char {
        match self {
            Color::White => 'W',
            Color::Black => 'B',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c {
            'W' => Some(Color::White),
            'B' => Some(Color::Black),
            _ => None,
        }
    }

    /// Direction pawns of this color advance in, as a rank delta.
    #[inline]
    pub fn pawn_dir(self) -> i8 {
        match self {
            Color::White => 1,
            Color::Black => -1,
        }
    }
}

impl Not for Color {
    type Output = Color;

    #[inline]
    fn not(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

/// Piece kinds. The declaration order doubles as the promotion sort order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PieceKind {
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
}

impl PieceKind {
    pub const ALL: [PieceKind; 6] = [
        PieceKind::Pawn,
        PieceKind::Knight,
        PieceKind::Bishop,
        PieceKind::Rook,
        PieceKind::Queen,
        PieceKind::King,
    ];

    pub const PROMOTIONS: [PieceKind; 4] =
        [PieceKind::Knight, PieceKind::Bishop, PieceKind::Rook, PieceKind::Queen];

    /// Lowercase FEN letter.
    pub fn letter(self) -> char {
        match self {
            PieceKind::Pawn => 'p',
            PieceKind::Knight => 'n',
            PieceKind::Bishop => 'b',
            PieceKind::Rook => 'r',
            PieceKind::Queen => 'q',
            PieceKind::King => 'k',
        }
    }

    pub fn from_letter(c: char) -> Option<PieceKind> {
        Some(match c.to_ascii_lowercase() {
            'p' => PieceKind::Pawn,
            'n' => PieceKind::Knight,
            'b' => PieceKind::Bishop,
            'r' => PieceKind::Rook,
            'q' => PieceKind::Queen,
            'k' => PieceKind::King,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Piece {
    pub color: Color,
    pub kind: PieceKind,
}

impl Piece {
    pub const fn new(color: Color, kind: PieceKind) -> Piece {
        Piece { color, kind }
    }

    /// FEN letter: uppercase for White.
    pub fn fen_char(self) -> char {
        let c = self.kind.letter();
        match self.color {
            Color::White => c.to_ascii_uppercase(),
            Color::Black => c,
        }
    }

    pub fn from_fen_char(c: char) -> Option<Piece> {
        let kind = PieceKind::from_letter(c)?;
        let color = if c.is_ascii_uppercase() { Color::White } else { Color::Black };
        Some(Piece { color, kind })
    }

    /// Compact nibble encoding, never zero.
    #[inline]
    pub(crate) fn code(self) -> u8 {
        1 + self.kind as u8 + 6 * self.color as u8
    }

    #[inline]
    pub(crate) fn from_code(code: u8) -> Option<Piece> {
        if code == 0 || code > 12 {
            return None;
        }
        let c = code - 1;
        let color = if c >= 6 { Color::Black } else { Color::White };
        Some(Piece { color, kind: PieceKind::ALL[(c % 6) as usize] })
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fen_char())
    }
}

/// A square on a board of at most 8×8, stored as `rank * 8 + file`.
///
/// Squares order rank-major from a1, which fixes the move-list order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Square(u8);

impl Square {
    /// Panics if either coordinate is 8 or more.
    pub const fn new(file: u8, rank: u8) -> Square {
        assert!(file < MAX_DIM && rank < MAX_DIM);
        Square(rank * 8 + file)
    }

    #[inline]
    pub const fn from_index(index: u8) -> Square {
        assert!(index < 64);
        Square(index)
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn file(self) -> u8 {
        self.0 % 8
    }

    #[inline]
    pub const fn rank(self) -> u8 {
        self.0 / 8
    }

    /// Square shifted by `(df, dr)`, if it stays within `dims`.
    #[inline]
    pub fn offset(self, df: i8, dr: i8, dims: Dims) -> Option<Square> {
        let f = self.file() as i8 + df;
        let r = self.rank() as i8 + dr;
        if f < 0 || r < 0 || f >= dims.files as i8 || r >= dims.ranks as i8 {
            None
        } else {
            Some(Square(r as u8 * 8 + f as u8))
        }
    }

    pub fn file_char(self) -> char {
        (b'a' + self.file()) as char
    }

    pub fn rank_char(self) -> char {
        (b'1' + self.rank()) as char
    }

    /// Same file, rank mirrored within a board of `ranks` ranks.
    pub fn flip_rank(self, ranks: u8) -> Square {
        Square::new(self.file(), ranks - 1 - self.rank())
    }

    /// True for light squares (a1 is dark).
    pub fn is_light(self) -> bool {
        (self.file() + self.rank()) % 2 == 1
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.file_char(), self.rank_char())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid square `{0}`")]
pub struct SquareParseError(pub String);

impl FromStr for Square {
    type Err = SquareParseError;

    fn from_str(s: &str) -> Result<Square, SquareParseError> {
        let b = s.as_bytes();
        if b.len() != 2 || !(b'a'..=b'h').contains(&b[0]) || !(b'1'..=b'8').contains(&b[1]) {
            return Err(SquareParseError(s.to_string()));
        }
        Ok(Square::new(b[0] - b'a', b[1] - b'1'))
    }
}

/// Board dimensions: files × ranks, each between 1 and 8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub files: u8,
    pub ranks: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("board dimensions {files}x{ranks} out of range (1..=8 each)")]
pub struct DimsError {
    pub files: u8,
    pub ranks: u8,
}

impl Dims {
    pub const STANDARD: Dims = Dims { files: 8, ranks: 8 };

    pub fn new(files: u8, ranks: u8) -> Result<Dims, DimsError> {
        if (1..=MAX_DIM).contains(&files) && (1..=MAX_DIM).contains(&ranks) {
            Ok(Dims { files, ranks })
        } else {
            Err(DimsError { files, ranks })
        }
    }

    #[inline]
    pub fn contains(self, sq: Square) -> bool {
        sq.file() < self.files && sq.rank() < self.ranks
    }

    /// All squares on the board in index order.
    pub fn squares(self) -> impl Iterator<Item = Square> {
        (0..self.ranks).flat_map(move |r| (0..self.files).map(move |f| Square::new(f, r)))
    }

    pub fn len(self) -> usize {
        self.files as usize * self.ranks as usize
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    /// Rank on which `color`'s pieces start.
    pub fn back_rank(self, color: Color) -> u8 {
        match color {
            Color::White => 0,
            Color::Black => self.ranks - 1,
        }
    }

    /// Rank on which `color` promotes.
    pub fn promotion_rank(self, color: Color) -> u8 {
        self.back_rank(!color)
    }

    /// Rank from which `color`'s pawns may make a double step.
    pub fn pawn_start_rank(self, color: Color) -> u8 {
        match color {
            Color::White => 1,
            Color::Black => self.ranks - 2,
        }
    }

    /// Double pawn steps need room for an en-passant square between two ranks.
    pub fn allows_double_step(self) -> bool {
        self.ranks >= 5
    }

    /// Castling needs the standard a/e/h file layout.
    pub fn allows_castling(self) -> bool {
        self.files == 8
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.files, self.ranks)
    }
}
