mod common;

use common::naive::{Board, KING};
use fairchess::movegen::{apply_move, game_status, in_check};
use fairchess::notation::{format_line, parse_line_from_start};
use fairchess::{Color, DrawReason, Outcome, Phase, PieceKind, Position, VariantState};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn pieces_of(pos: &Position, color: Color) -> usize {
    pos.pieces().filter(|(_, p)| p.color == color).count()
}

#[test]
fn random_walk_states_are_well_formed() {
    let mut rng = common::rng(1);
    let mut n = 0;
    while n < 12_000 {
        let schedule = common::builtin(common::BUILTINS[n % 5]);
        for state in common::random_walk(&mut rng, &schedule, 200) {
            let pos = state.position();
            assert_eq!(pos.side_to_move(), schedule.mover_at_ply(state.next_ply()));
            for color in [Color::White, Color::Black] {
                let kings = pos.pieces().filter(|(_, p)| p.color == color && p.kind == PieceKind::King).count();
                assert_eq!(kings, 1);
            }
            if state.next_ply() > 1 {
                let last = schedule.mover_at_ply(state.next_ply() - 1);
                assert!(!in_check(pos, last), "last mover in check: {}", state.encode_xfen());
            }
            for (sq, p) in pos.pieces() {
                if p.kind == PieceKind::Pawn {
                    assert!(sq.rank() != 0 && sq.rank() != 7);
                }
            }
            assert_eq!(pos.fullmove_number(), state.next_ply().div_ceil(2));
            n += 1;
        }
    }
}

#[test]
fn first_half_moves_never_capture_or_check() {
    let mut rng = common::rng(2);
    let mut checked = 0;
    let mut waived = 0;
    let mut games = 0;
    while checked < 10_000 {
        let id = ["balanced", "black-favorable", "prouhet-thue-morse", "marseillais"][games % 4];
        games += 1;
        let schedule = common::builtin(id);
        for state in common::random_walk(&mut rng, &schedule, 160) {
            if state.phase() != Phase::FirstOfDouble || state.outcome().is_terminal() {
                continue;
            }
            let set = state.move_set();
            if set.waived {
                waived += 1;
                continue;
            }
            let pos = state.position();
            let them = !pos.side_to_move();
            for &m in &set.moves {
                let after = apply_move(pos, m).unwrap();
                assert_eq!(pieces_of(&after, them), pieces_of(pos, them), "capture {m} in {}", state.encode_xfen());
                // Check judged by the independent generator.
                let b = Board::from_fen(&after.to_fen());
                let side = if them == Color::White { 1 } else { -1 };
                assert!((0..128).any(|s| s & 0x88 == 0 && b.sq[s as usize] == side * KING));
                assert!(!b.in_check(side), "check {m} in {}", state.encode_xfen());
            }
            checked += 1;
        }
    }
    assert!(waived < checked);
}

#[test]
fn standard_schedule_is_plain_chess() {
    let s = common::builtin("standard");
    for fen in [fairchess::position::STARTPOS_FEN, "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1"] {
        let pos: Position = fen.parse().unwrap();
        let state = VariantState::new(pos.clone(), s.clone(), 1).unwrap();
        let max = if fen == fairchess::position::STARTPOS_FEN { 4 } else { 3 };
        for depth in 1..=max {
            assert_eq!(state.perft(depth), fairchess::perft(&pos, depth).unwrap(), "{fen} depth {depth}");
        }
    }
}

#[test]
fn standard_schedule_games_end_alike() {
    let mut rng = common::rng(3);
    let s = common::builtin("standard");
    for _ in 0..500 {
        let mut state = VariantState::initial(s.clone());
        let mut pos = Position::startpos();
        for _ in 0..400 {
            let core = fairchess::generate_legal_moves(&pos);
            match state.legal_moves() {
                Ok(moves) => {
                    assert_eq!(moves, core);
                    let m = *moves.choose(&mut rng).unwrap();
                    state = state.play(m).unwrap();
                    pos = apply_move(&pos, m).unwrap();
                    assert_eq!(state.position().to_fen(), pos.to_fen());
                }
                Err(_) => break,
            }
        }
        let by_rules = VariantState::outcome_from_status(game_status(&pos));
        match state.outcome() {
            Outcome::Draw(DrawReason::Threefold) => assert!(!by_rules.is_terminal() || matches!(by_rules, Outcome::Draw(_))),
            o => assert_eq!(o, by_rules),
        }
    }
}

#[test]
fn xfen_round_trip() {
    let mut rng = common::rng(4);
    let mut n = 0;
    while n < 1_000 {
        let schedule = common::builtin(common::BUILTINS[n % 5]);
        let walk = common::random_walk(&mut rng, &schedule, 80);
        for state in walk.iter().step_by(7) {
            let text = state.encode_xfen();
            let back = VariantState::decode_xfen(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert_eq!(back.encode_xfen(), text);
            assert_eq!(back.position(), state.position());
            assert_eq!(back.move_set().moves, state.move_set().moves);
            n += 1;
        }
    }
}

#[test]
fn random_balanced_lines_round_trip_through_notation() {
    let mut rng = common::rng(5);
    let s = common::builtin("balanced");
    for _ in 0..100 {
        let walk = common::random_walk(&mut rng, &s, 24);
        let moves: Vec<_> = walk
            .windows(2)
            .map(|w| {
                let (a, b) = (&w[0], &w[1]);
                *a.legal_moves().unwrap().iter().find(|&&m| a.play(m).unwrap().position() == b.position()).unwrap()
            })
            .collect();
        let text = format_line(&moves, &walk[0]).unwrap();
        let parsed = parse_line_from_start(&text, &s).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(parsed.moves, moves, "{text}");
        assert!(parsed.notes.is_empty(), "{text}: {:?}", parsed.notes);
        assert_eq!(format_line(&parsed.moves, &walk[0]).unwrap(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn color_mirror_preserves_move_counts(seed in any::<u64>(), which in 0usize..5, plies in 0usize..60) {
        let mut rng = common::rng(seed);
        let schedule = common::builtin(common::BUILTINS[which]);
        let walk = common::random_walk(&mut rng, &schedule, plies);
        let state = walk.last().unwrap();
        let twin = state.mirrored();
        prop_assert_eq!(twin.move_set().moves.len(), state.move_set().moves.len());
        prop_assert_eq!(twin.perft(2), state.perft(2));
        let back = twin.mirrored();
        prop_assert_eq!(back.position(), state.position());
        prop_assert!(back.schedule() == state.schedule());
    }
}
