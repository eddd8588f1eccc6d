#![allow(dead_code)]

pub mod naive;

use fairchess::{Color, Dims, MoveSchedule, Piece, PieceKind, Position, Square, VariantState};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BUILTINS: [&str; 5] = ["standard", "black-favorable", "balanced", "prouhet-thue-morse", "marseillais"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn builtin(id: &str) -> MoveSchedule {
    MoveSchedule::builtin(id).unwrap()
}

/// States visited by a uniformly random game from the initial position,
/// the start included, stopping at the end of the game or after `plies`.
pub fn random_walk(rng: &mut impl Rng, schedule: &MoveSchedule, plies: usize) -> Vec<VariantState> {
    let mut state = VariantState::initial(schedule.clone());
    let mut seen = vec![state.clone()];
    for _ in 0..plies {
        let Ok(moves) = state.legal_moves() else { break };
        let m = *moves.choose(rng).unwrap();
        state = state.play(m).unwrap();
        seen.push(state.clone());
    }
    seen
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Material {
    KvK,
    KQvK,
    KPvK,
}

impl Material {
    pub fn label(self) -> &'static str {
        match self {
            Material::KvK => "K-K",
            Material::KQvK => "KQ-K",
            Material::KPvK => "KP-K",
        }
    }
}

/// A random legal reduced-board state: the stronger side gets the extra
/// piece (White or Black at random), the ply is drawn from `1..=max_ply`
/// and the side to move follows the schedule at that ply.
pub fn random_instance(
    rng: &mut impl Rng,
    dims: Dims,
    material: Material,
    schedule: &MoveSchedule,
    max_ply: u32,
) -> VariantState {
    loop {
        let strong = if rng.gen_bool(0.5) { Color::White } else { Color::Black };
        let ply = rng.gen_range(1..=max_ply);
        let mut squares: Vec<Square> = dims.squares().collect();
        squares.shuffle(rng);
        let mut pieces = vec![
            (squares[0], Piece::new(Color::White, PieceKind::King)),
            (squares[1], Piece::new(Color::Black, PieceKind::King)),
        ];
        match material {
            Material::KvK => {}
            Material::KQvK => pieces.push((squares[2], Piece::new(strong, PieceKind::Queen))),
            Material::KPvK => pieces.push((squares[2], Piece::new(strong, PieceKind::Pawn))),
        }
        let Ok(pos) = Position::from_pieces(dims, &pieces, schedule.mover_at_ply(ply)) else { continue };
        if let Ok(state) = VariantState::new(pos, schedule.clone(), ply) {
            return state;
        }
    }
}

/// Writes a stand-in UCI engine script. It scores every position
/// `score` centipawns for White (reported from the mover's side), except
/// for the behaviours named by `mode`: `ok`, `crash`, `hang`, `noscore`,
/// `mate`, `shallow`.
pub fn fake_engine(dir: &std::path::Path, mode: &str, score: i32) -> std::path::PathBuf {
    use std::os::unix::fs::PermissionsExt;
    let go = match mode {
        "ok" => format!(
            r#"if [ "$side" = w ]; then s={score}; else s={neg}; fi
      echo "info depth 1 score cp 0 pv e2e4"
      echo "info depth $d seldepth $d multipv 1 score cp $s nodes 10 pv e2e4 e7e5"
      echo "bestmove e2e4 ponder e7e5""#,
            neg = -score
        ),
        "crash" => "exit 3".to_string(),
        "hang" => "sleep 30".to_string(),
        "noscore" => r#"echo "info depth $d nodes 5"; echo "bestmove e2e4""#.to_string(),
        "mate" => r#"echo "info depth $d score mate 2 pv e2e4"; echo "bestmove e2e4""#.to_string(),
        "shallow" => r#"echo "info depth 3 score cp 5"; echo "bestmove e2e4""#.to_string(),
        other => panic!("unknown fake engine mode {other}"),
    };
    let script = format!(
        r#"#!/bin/sh
side=w
while IFS= read -r line; do
  case "$line" in
    uci) echo "id name FakeFish 1.0"; echo "option name Hash type spin default 16 min 1 max 1024"; echo "uciok";;
    isready) echo "readyok";;
    "position fen "*) set -- $line; side=$4;;
    "go depth "*) set -- $line; d=$3
      {go};;
    quit) exit 0;;
  esac
done
"#
    );
    let path = dir.join(format!("fake-{mode}.sh"));
    std::fs::write(&path, script).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

pub struct SolverCase {
    pub label: String,
    pub state: VariantState,
}

/// Reduced-board cases for comparing the solver with the minimax oracle:
/// every builtin schedule crossed with K-K, KQ-K and KP-K on 3x3 and 4x4
/// boards, `per_cell` random placements each.
pub fn solver_cases(seed: u64, per_cell: usize) -> Vec<SolverCase> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for id in BUILTINS {
        let schedule = builtin(id);
        for size in [3u8, 4] {
            let dims = Dims::new(size, size).unwrap();
            for material in [Material::KvK, Material::KQvK, Material::KPvK] {
                for i in 0..per_cell {
                    let state = random_instance(&mut rng, dims, material, &schedule, 8);
                    out.push(SolverCase { label: format!("{id} {size}x{size} {} #{i}", material.label()), state });
                }
            }
        }
    }
    out
}
