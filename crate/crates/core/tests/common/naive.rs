//! A deliberately plain 8x8 move generator on a 0x88 board, written
//! without reference to the library: pseudo-legal generation, then
//! brute-force attack scans to discard moves leaving the king attacked.

pub const PAWN: i8 = 1;
pub const KNIGHT: i8 = 2;
pub const BISHOP: i8 = 3;
pub const ROOK: i8 = 4;
pub const QUEEN: i8 = 5;
pub const KING: i8 = 6;

const KNIGHT_D: [i32; 8] = [33, 31, 18, 14, -33, -31, -18, -14];
const KING_D: [i32; 8] = [1, -1, 15, 16, 17, -15, -16, -17];
const DIAG_D: [i32; 4] = [15, 17, -15, -17];
const ORTHO_D: [i32; 4] = [1, -1, 16, -16];

const WK: u8 = 1;
const WQ: u8 = 2;
const BK: u8 = 4;
const BQ: u8 = 8;

#[derive(Clone)]
pub struct Board {
    pub sq: [i8; 128],
    /// +1 White, -1 Black.
    pub stm: i8,
    castle: u8,
    ep: Option<i32>,
}

#[derive(Clone, Copy, Debug)]
pub struct NMove {
    pub from: i32,
    pub to: i32,
    pub promo: i8,
    pub capture: bool,
    ep: bool,
    castle_rook: Option<(i32, i32)>,
}

fn on(s: i32) -> bool {
    (0..128).contains(&s) && s & 0x88 == 0
}

fn name(s: i32) -> String {
    format!("{}{}", (b'a' + (s & 7) as u8) as char, (s >> 4) + 1)
}

impl NMove {
    pub fn uci(&self) -> String {
        let mut s = format!("{}{}", name(self.from), name(self.to));
        if self.promo != 0 {
            s.push(['?', 'p', 'n', 'b', 'r', 'q', 'k'][self.promo as usize]);
        }
        s
    }
}

impl Board {
    pub fn from_fen(fen: &str) -> Board {
        let f: Vec<&str> = fen.split_whitespace().collect();
        let mut sq = [0i8; 128];
        for (row, text) in f[0].split('/').enumerate() {
            let rank = 7 - row as i32;
            let mut file = 0;
            for ch in text.chars() {
                if let Some(d) = ch.to_digit(10) {
                    file += d as i32;
                    continue;
                }
                let kind = match ch.to_ascii_lowercase() {
                    'p' => PAWN,
                    'n' => KNIGHT,
                    'b' => BISHOP,
                    'r' => ROOK,
                    'q' => QUEEN,
                    'k' => KING,
                    _ => panic!("bad fen char {ch}"),
                };
                sq[(rank * 16 + file) as usize] = if ch.is_ascii_uppercase() { kind } else { -kind };
                file += 1;
            }
        }
        let mut castle = 0;
        for ch in f[2].chars() {
            castle |= match ch {
                'K' => WK,
                'Q' => WQ,
                'k' => BK,
                'q' => BQ,
                _ => 0,
            };
        }
        let ep = (f[3] != "-").then(|| {
            let b = f[3].as_bytes();
            (b[1] - b'1') as i32 * 16 + (b[0] - b'a') as i32
        });
        Board { sq, stm: if f[1] == "w" { 1 } else { -1 }, castle, ep }
    }

    fn at(&self, s: i32) -> i8 {
        self.sq[s as usize]
    }

    pub fn attacked(&self, s: i32, by: i8) -> bool {
        let pawn_from = if by > 0 { [s - 15, s - 17] } else { [s + 15, s + 17] };
        if pawn_from.iter().any(|&p| on(p) && self.at(p) == by * PAWN) {
            return true;
        }
        if KNIGHT_D.iter().any(|&d| on(s + d) && self.at(s + d) == by * KNIGHT) {
            return true;
        }
        if KING_D.iter().any(|&d| on(s + d) && self.at(s + d) == by * KING) {
            return true;
        }
        for (dirs, a) in [(DIAG_D, BISHOP), (ORTHO_D, ROOK)] {
            for d in dirs {
                let mut t = s + d;
                while on(t) {
                    let p = self.at(t);
                    if p != 0 {
                        if p == by * a || p == by * QUEEN {
                            return true;
                        }
                        break;
                    }
                    t += d;
                }
            }
        }
        false
    }

    fn king(&self, side: i8) -> i32 {
        (0..128).find(|&s| on(s) && self.at(s) == side * KING).expect("king present")
    }

    pub fn in_check(&self, side: i8) -> bool {
        self.attacked(self.king(side), -side)
    }

    fn push(&self, out: &mut Vec<NMove>, from: i32, to: i32) {
        let target = self.at(to);
        if target == -self.stm * KING {
            return;
        }
        out.push(NMove { from, to, promo: 0, capture: target != 0, ep: false, castle_rook: None });
    }

    pub fn pseudo(&self) -> Vec<NMove> {
        let us = self.stm;
        let mut out = Vec::new();
        for s in 0..128 {
            if !on(s) || self.at(s) * us <= 0 {
                continue;
            }
            match self.at(s).abs() {
                PAWN => {
                    let fwd = 16 * us as i32;
                    let start = if us > 0 { 1 } else { 6 };
                    let last = if us > 0 { 7 } else { 0 };
                    let mut targets = Vec::new();
                    if on(s + fwd) && self.at(s + fwd) == 0 {
                        targets.push((s + fwd, false, false));
                        if s >> 4 == start && self.at(s + 2 * fwd) == 0 {
                            targets.push((s + 2 * fwd, false, false));
                        }
                    }
                    for side in [-1, 1] {
                        let t = s + fwd + side;
                        if !on(t) {
                            continue;
                        }
                        let p = self.at(t);
                        if p * us < 0 && p.abs() != KING {
                            targets.push((t, true, false));
                        } else if p == 0 && self.ep == Some(t) && self.at(t - fwd) == -us * PAWN {
                            targets.push((t, true, true));
                        }
                    }
                    for (t, capture, ep) in targets {
                        let promos: &[i8] = if t >> 4 == last { &[KNIGHT, BISHOP, ROOK, QUEEN] } else { &[0] };
                        for &promo in promos {
                            out.push(NMove { from: s, to: t, promo, capture, ep, castle_rook: None });
                        }
                    }
                }
                KNIGHT => {
                    for d in KNIGHT_D {
                        if on(s + d) && self.at(s + d) * us <= 0 {
                            self.push(&mut out, s, s + d);
                        }
                    }
                }
                KING => {
                    for d in KING_D {
                        if on(s + d) && self.at(s + d) * us <= 0 {
                            self.push(&mut out, s, s + d);
                        }
                    }
                }
                k => {
                    let mut dirs = Vec::new();
                    if k == BISHOP || k == QUEEN {
                        dirs.extend(DIAG_D);
                    }
                    if k == ROOK || k == QUEEN {
                        dirs.extend(ORTHO_D);
                    }
                    for d in dirs {
                        let mut t = s + d;
                        while on(t) && self.at(t) * us <= 0 {
                            self.push(&mut out, s, t);
                            if self.at(t) != 0 {
                                break;
                            }
                            t += d;
                        }
                    }
                }
            }
        }
        // Castling: king and rook on their home squares, path empty, king
        // not passing through attack.
        let (rank, ks, qs) = if us > 0 { (0, WK, WQ) } else { (0x70, BK, BQ) };
        let e = rank + 4;
        if self.at(e) == us * KING {
            if self.castle & ks != 0
                && self.at(rank + 7) == us * ROOK
                && self.at(rank + 5) == 0
                && self.at(rank + 6) == 0
                && ![e, e + 1, e + 2].iter().any(|&t| self.attacked(t, -us))
            {
                out.push(NMove { from: e, to: e + 2, promo: 0, capture: false, ep: false, castle_rook: Some((rank + 7, rank + 5)) });
            }
            if self.castle & qs != 0
                && self.at(rank) == us * ROOK
                && (1..4).all(|f| self.at(rank + f) == 0)
                && ![e, e - 1, e - 2].iter().any(|&t| self.attacked(t, -us))
            {
                out.push(NMove { from: e, to: e - 2, promo: 0, capture: false, ep: false, castle_rook: Some((rank, rank + 3)) });
            }
        }
        out
    }

    pub fn make(&self, m: &NMove) -> Board {
        let mut b = self.clone();
        let piece = b.at(m.from);
        b.sq[m.from as usize] = 0;
        b.sq[m.to as usize] = if m.promo != 0 { m.promo * self.stm } else { piece };
        if m.ep {
            b.sq[(m.to - 16 * self.stm as i32) as usize] = 0;
        }
        if let Some((rf, rt)) = m.castle_rook {
            b.sq[rt as usize] = b.sq[rf as usize];
            b.sq[rf as usize] = 0;
        }
        for (s, bit) in [(0x04, WK | WQ), (0x00, WQ), (0x07, WK), (0x74, BK | BQ), (0x70, BQ), (0x77, BK)] {
            if m.from == s || m.to == s {
                b.castle &= !bit;
            }
        }
        b.ep = (piece.abs() == PAWN && (m.to - m.from).abs() == 32).then(|| (m.from + m.to) / 2);
        b.stm = -self.stm;
        b
    }

    pub fn legal(&self) -> Vec<(NMove, Board)> {
        self.pseudo()
            .into_iter()
            .map(|m| (m, self.make(&m)))
            .filter(|(_, b)| !b.in_check(self.stm))
            .collect()
    }
}

pub fn perft(b: &Board, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let moves = b.legal();
    if depth == 1 {
        return moves.len() as u64;
    }
    moves.iter().map(|(_, c)| perft(c, depth - 1)).sum()
}

/// Per-move counts keyed by coordinate notation.
pub fn divide(b: &Board, depth: u32) -> Vec<(String, u64)> {
    let mut v: Vec<(String, u64)> = b.legal().iter().map(|(m, c)| (m.uci(), perft(c, depth - 1))).collect();
    v.sort();
    v
}

/// Perft where the side to move follows `movers` (a `W`/`B` letter per
/// ply, starting at `ply`), and a mover about to move twice may neither
/// capture nor check unless nothing else is legal.
pub fn variant_perft(b: &Board, movers: &[u8], ply: usize, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let color = |p: usize| if movers[p - 1] == b'W' { 1i8 } else { -1 };
    let mut b = b.clone();
    b.stm = color(ply);
    let first_half = color(ply + 1) == b.stm && (ply == 1 || color(ply - 1) != b.stm);
    let all = b.legal();
    let quiet: Vec<_> = all
        .iter()
        .filter(|(m, after)| !m.capture && !after.in_check(-b.stm))
        .cloned()
        .collect();
    let moves = if first_half && !quiet.is_empty() { quiet } else { all };
    if depth == 1 {
        return moves.len() as u64;
    }
    moves.iter().map(|(_, c)| variant_perft(c, movers, ply + 1, depth - 1)).sum()
}
