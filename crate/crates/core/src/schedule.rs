//! Move-order schedules: which color moves at each ply, and whether that ply
//! is a lone move or one half of a double move.
//!
//! A schedule is a finite prefix followed by a cycle repeated forever. Plies
//! are numbered from 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::Color;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    Single,
    FirstOfDouble,
    SecondOfDouble,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Single => "single",
            Phase::FirstOfDouble => "first-of-double",
            Phase::SecondOfDouble => "second-of-double",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("unknown schedule `{0}`")]
    UnknownName(String),
    #[error("schedule spec `{0}` must have the form <prefix>/<cycle>")]
    MissingSlash(String),
    #[error("invalid character `{0}` in schedule spec (only W and B)")]
    BadChar(char),
    #[error("schedule cycle is empty")]
    EmptyCycle,
    #[error("schedule cycle uses only {0}")]
    SingleColorCycle(Color),
    #[error("{color} would move three times in a row from ply {ply}")]
    TripleMove { color: Color, ply: u32 },
}

/// Stable ids of the built-in schedules.
pub const BUILTIN_IDS: [&str; 5] = ["standard", "black-favorable", "balanced", "prouhet-thue-morse", "marseillais"];

/// First sixteen Thue–Morse symbols; the built-in repeats them forever,
/// which only approximates the aperiodic sequence past ply 16.
const THUE_MORSE_16: &str = "WBBWBWWBBWWBWBBW";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MoveSchedule {
    name: Option<String>,
    prefix: Vec<Color>,
    cycle: Vec<Color>,
}

fn colors(s: &str) -> Result<Vec<Color>, ScheduleError> {
    s.chars().map(|c| Color::from_letter(c).ok_or(ScheduleError::BadChar(c))).collect()
}

impl MoveSchedule {
    pub fn new(prefix: Vec<Color>, cycle: Vec<Color>) -> Result<MoveSchedule, ScheduleError> {
        let first = *cycle.first().ok_or(ScheduleError::EmptyCycle)?;
        if cycle.iter().all(|&c| c == first) {
            return Err(ScheduleError::SingleColorCycle(first));
        }
        let s = MoveSchedule { name: None, prefix, cycle };
        // Runs repeat with the cycle, so two periods past the prefix cover every run.
        let horizon = (s.prefix.len() + 2 * s.cycle.len() + 2) as u32;
        for ply in 1..=horizon {
            let c = s.mover_at_ply(ply);
            if s.mover_at_ply(ply + 1) == c && s.mover_at_ply(ply + 2) == c {
                return Err(ScheduleError::TripleMove { color: c, ply });
            }
        }
        Ok(s)
    }

    /// Parses `<prefix>/<cycle>` over `W` and `B`, e.g. `WBBWW/BW`.
    pub fn parse(spec: &str) -> Result<MoveSchedule, ScheduleError> {
        let (prefix, cycle) = spec.split_once('/').ok_or_else(|| ScheduleError::MissingSlash(spec.to_string()))?;
        MoveSchedule::new(colors(prefix)?, colors(cycle)?)
    }

    pub fn builtin(name: &str) -> Result<MoveSchedule, ScheduleError> {
        let spec = match name {
            "standard" => "/WB".to_string(),
            "black-favorable" => "WBB/WB".to_string(),
            "balanced" => "WBBWW/BW".to_string(),
            "prouhet-thue-morse" => format!("{THUE_MORSE_16}/{THUE_MORSE_16}"),
            "marseillais" => "/WWBB".to_string(),
            _ => return Err(ScheduleError::UnknownName(name.to_string())),
        };
        let mut s = MoveSchedule::parse(&spec).expect("built-in schedules are well formed");
        s.name = Some(name.to_string());
        Ok(s)
    }

    /// A built-in id, or else a `<prefix>/<cycle>` spec.
    pub fn resolve(id_or_spec: &str) -> Result<MoveSchedule, ScheduleError> {
        if id_or_spec.contains('/') {
            MoveSchedule::parse(id_or_spec)
        } else {
            MoveSchedule::builtin(id_or_spec)
        }
    }

    pub fn standard() -> MoveSchedule {
        MoveSchedule::builtin("standard").unwrap()
    }

    pub fn balanced() -> MoveSchedule {
        MoveSchedule::builtin("balanced").unwrap()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Built-in id if this is one, else the spec string.
    pub fn id(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.spec())
    }

    /// The `<prefix>/<cycle>` form, parseable by [`MoveSchedule::parse`].
    pub fn spec(&self) -> String {
        let letters = |v: &[Color]| v.iter().map(|c| c.letter()).collect::<String>();
        format!("{}/{}", letters(&self.prefix), letters(&self.cycle))
    }

    pub fn prefix(&self) -> &[Color] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Color] {
        &self.cycle
    }

    /// Whether the tail is a repetition standing in for an aperiodic sequence.
    pub fn is_approximation(&self) -> bool {
        self.name.as_deref() == Some("prouhet-thue-morse")
    }

    /// Panics on ply 0.
    pub fn mover_at_ply(&self, ply: u32) -> Color {
        assert!(ply >= 1, "plies are numbered from 1");
        let i = (ply - 1) as usize;
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn phase_at_ply(&self, ply: u32) -> Phase {
        let c = self.mover_at_ply(ply);
        if ply > 1 && self.mover_at_ply(ply - 1) == c {
            Phase::SecondOfDouble
        } else if self.mover_at_ply(ply + 1) == c {
            Phase::FirstOfDouble
        } else {
            Phase::Single
        }
    }

    /// Smallest ply with the same future as `ply`: positions in the cycle
    /// fold onto the first period.
    pub fn canonical_ply(&self, ply: u32) -> u32 {
        let p = self.prefix.len() as u32;
        let c = self.cycle.len() as u32;
        // The first cycle ply only stands for later periods if whoever moved
        // before it relates to it as the cycle's last mover does.
        let first = self.cycle[0];
        let same = (self.prefix.last() == Some(&first)) == (self.cycle[self.cycle.len() - 1] == first);
        let base = if same { p } else { p + c };
        if ply <= base {
            ply
        } else {
            base + 1 + (ply - base - 1) % c
        }
    }

    /// Number of double moves that start within plies `1..=plies`.
    pub fn double_moves_within(&self, plies: u32) -> usize {
        (1..plies).filter(|&k| self.phase_at_ply(k) == Phase::FirstOfDouble).count()
    }

    /// Colors for plies `1..=n` as a `W`/`B` string.
    pub fn letters(&self, n: u32) -> String {
        (1..=n).map(|k| self.mover_at_ply(k).letter()).collect()
    }

    /// Same schedule with the colors exchanged.
    pub fn mirrored(&self) -> MoveSchedule {
        MoveSchedule {
            name: None,
            prefix: self.prefix.iter().map(|&c| !c).collect(),
            cycle: self.cycle.iter().map(|&c| !c).collect(),
        }
    }
}

/// Two schedules are equal when their prefix and cycle agree; the name is a label.
impl PartialEq for MoveSchedule {
    fn eq(&self, other: &Self) -> bool {
        self.prefix == other.prefix && self.cycle == other.cycle
    }
}

impl Eq for MoveSchedule {}

impl FromStr for MoveSchedule {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<MoveSchedule, ScheduleError> {
        MoveSchedule::resolve(s)
    }
}

impl fmt::Display for MoveSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn builtin(name: &str) -> MoveSchedule {
        MoveSchedule::builtin(name).unwrap()
    }

    #[test]
    fn builtin_sequences() {
        assert_eq!(builtin("standard").letters(6), "WBWBWB");
        assert_eq!(builtin("balanced").letters(8), "WBBWWBWB");
        assert_eq!(builtin("marseillais").letters(4), "WWBB");
        assert_eq!(builtin("black-favorable").letters(8), "WBBWBWBW");
        assert_eq!(builtin("prouhet-thue-morse").letters(16), "WBBWBWWBBWWBWBBW");
        assert!(matches!(MoveSchedule::builtin("fischer"), Err(ScheduleError::UnknownName(_))));
    }

    #[test]
    fn balanced_swaps_third_and_fourth() {
        let b = builtin("balanced");
        assert_eq!(b.mover_at_ply(3), Color::Black);
        assert_eq!(b.mover_at_ply(4), Color::White);
        let s = builtin("standard");
        for k in 1..50 {
            assert_eq!(s.mover_at_ply(k) == Color::White, k % 2 == 1);
        }
    }

    #[test]
    fn phases() {
        let b = builtin("balanced");
        assert_eq!(b.phase_at_ply(1), Phase::Single);
        assert_eq!(b.phase_at_ply(2), Phase::FirstOfDouble);
        assert_eq!(b.phase_at_ply(3), Phase::SecondOfDouble);
        assert_eq!(b.phase_at_ply(4), Phase::FirstOfDouble);
        assert_eq!(b.phase_at_ply(5), Phase::SecondOfDouble);
        assert_eq!(b.phase_at_ply(6), Phase::Single);
        let s = builtin("standard");
        assert!((1..100).all(|k| s.phase_at_ply(k) == Phase::Single));
    }

    #[test]
    fn parse_examples() {
        assert_eq!(MoveSchedule::parse("WBBWW/BW").unwrap(), builtin("balanced"));
        assert_eq!(MoveSchedule::parse("/WB").unwrap(), builtin("standard"));
        assert_eq!(MoveSchedule::parse("W/BBWW").unwrap().letters(9), "WBBWWBBWW");
        // A WB cycle after WBBWW would hand White three moves in a row.
        assert_eq!(
            MoveSchedule::parse("WBBWW/WB"),
            Err(ScheduleError::TripleMove { color: Color::White, ply: 4 })
        );
    }

    #[test]
    fn parse_errors() {
        assert_eq!(MoveSchedule::parse("WB/"), Err(ScheduleError::EmptyCycle));
        assert_eq!(MoveSchedule::parse("WB/WW"), Err(ScheduleError::SingleColorCycle(Color::White)));
        assert_eq!(MoveSchedule::parse("WX/WB"), Err(ScheduleError::BadChar('X')));
        assert!(matches!(MoveSchedule::parse("WBWB"), Err(ScheduleError::MissingSlash(_))));
        assert!(matches!(MoveSchedule::parse("/WWWB"), Err(ScheduleError::TripleMove { .. })));
    }

    #[test]
    fn double_move_counts() {
        assert_eq!(builtin("balanced").double_moves_within(1000), 2);
        assert_eq!(builtin("standard").double_moves_within(1000), 0);
        let ptm = builtin("prouhet-thue-morse");
        // Doubles inside the displayed 4-ply groups WBBW/BWWB/BWWB/WBBW.
        let within_groups = (0..4u32).filter(|g| ptm.phase_at_ply(4 * g + 2) == Phase::FirstOfDouble).count();
        assert_eq!(within_groups, 4);
        // Counting the one straddling plies 8-9 as well.
        assert_eq!(ptm.double_moves_within(16), 5);
        assert!(ptm.is_approximation());
    }

    #[test]
    fn canonical_ply_folds_cycle() {
        let b = builtin("balanced");
        assert_eq!(b.canonical_ply(5), 5);
        assert_eq!(b.canonical_ply(6), 6);
        assert_eq!(b.canonical_ply(8), 6);
        assert_eq!(b.canonical_ply(9), 7);
        for k in 1..200 {
            assert_eq!(b.mover_at_ply(k), b.mover_at_ply(b.canonical_ply(k)));
            assert_eq!(b.phase_at_ply(k), b.phase_at_ply(b.canonical_ply(k)));
        }
        let odd = MoveSchedule::parse("WB/BW").unwrap();
        assert_eq!(odd.canonical_ply(3), 3);
        assert_eq!(odd.canonical_ply(5), 5);
        assert_eq!(odd.canonical_ply(7), 5);
        let bare = MoveSchedule::parse("/BWB").unwrap();
        assert_eq!(bare.canonical_ply(4), 4);
        assert_eq!(bare.canonical_ply(7), 4);
    }

    proptest! {
        #[test]
        fn canonical_ply_keeps_phase(prefix in "[WB]{0,6}", cycle in "[WB]{1,6}", k in 1u32..300) {
            if let Ok(s) = MoveSchedule::parse(&format!("{prefix}/{cycle}")) {
                let c = s.canonical_ply(k);
                prop_assert!(c <= k);
                prop_assert_eq!(s.canonical_ply(c), c);
                prop_assert_eq!(s.mover_at_ply(k), s.mover_at_ply(c));
                prop_assert_eq!(s.phase_at_ply(k), s.phase_at_ply(c));
            }
        }
    }

    #[test]
    fn builtins_round_trip_through_spec() {
        for id in BUILTIN_IDS {
            let s = builtin(id);
            let again = MoveSchedule::parse(&s.spec()).unwrap();
            assert_eq!(again, s);
            assert_eq!(again.prefix(), s.prefix());
            assert_eq!(again.cycle(), s.cycle());
            assert_eq!(MoveSchedule::resolve(&s.id()).unwrap(), s);
        }
    }

    proptest! {
        #[test]
        fn bracket_identity(k in 1u32..1000) {
            let b = builtin("balanced");
            let s = builtin("standard");
            if k == 3 || k == 4 {
                prop_assert_ne!(b.mover_at_ply(k), s.mover_at_ply(k));
            } else {
                prop_assert_eq!(b.mover_at_ply(k), s.mover_at_ply(k));
            }
        }

        #[test]
        fn phase_consistency(name in prop::sample::select(BUILTIN_IDS.to_vec()), k in 1u32..500) {
            let s = builtin(name);
            match s.phase_at_ply(k) {
                Phase::SecondOfDouble => {
                    prop_assert!(k > 1);
                    prop_assert_eq!(s.phase_at_ply(k - 1), Phase::FirstOfDouble);
                    prop_assert_eq!(s.mover_at_ply(k - 1), s.mover_at_ply(k));
                }
                Phase::FirstOfDouble => {
                    prop_assert_eq!(s.phase_at_ply(k + 1), Phase::SecondOfDouble);
                    prop_assert_eq!(s.mover_at_ply(k + 1), s.mover_at_ply(k));
                }
                Phase::Single => {
                    prop_assert_ne!(s.mover_at_ply(k + 1), s.mover_at_ply(k));
                }
            }
        }

        #[test]
        fn random_specs_have_no_triples(prefix in "[WB]{0,6}", cycle in "[WB]{1,6}") {
            if let Ok(s) = MoveSchedule::parse(&format!("{prefix}/{cycle}")) {
                for k in 1..60 {
                    let c = s.mover_at_ply(k);
                    prop_assert!(!(s.mover_at_ply(k + 1) == c && s.mover_at_ply(k + 2) == c));
                }
            }
        }
    }
}
