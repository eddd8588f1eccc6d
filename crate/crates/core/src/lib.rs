//! Chess under arbitrary move-order schedules.
//!
//! The crate layers a schedule-aware game state over an ordinary chess rules
//! core, and builds three tools on top of it:
//!
//!   * [`notation`] reads and writes SAN lines whose move order departs from
//!     strict alternation, marking the changed plies with `(B)`/`(W)`;
//!   * [`solver`] computes exact game values for reduced-board instances,
//!     checked against a plain minimax oracle;
//!   * [`engine`] and [`study`] drive an external UCI engine over a set of
//!     opening lines and compare its evaluations with expected values.

pub mod config;
pub mod engine;
pub mod movegen;
pub mod moves;
pub mod notation;
pub mod position;
pub mod schedule;
pub mod solver;
pub mod study;
pub mod types;
pub mod variant;

pub use movegen::{apply_move, game_status, generate_legal_moves, in_check, perft, GameStatus};
pub use moves::{Move, MoveFlags};
pub use position::{CastlingRights, Position, PositionError};
pub use schedule::{MoveSchedule, Phase, ScheduleError};
pub use types::{Color, Dims, Piece, PieceKind, Square};
pub use variant::{DrawReason, Outcome, RepetitionKey, VariantError, VariantState, WaiverMode};
