#ifndef FAIRCHESS_H
#define FAIRCHESS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Deepest perft accepted through this interface.
 */
#define FC_MAX_PERFT_DEPTH 6

typedef enum FcColor {
  FC_COLOR_WHITE = 0,
  FC_COLOR_BLACK = 1,
} FcColor;

typedef enum FcOutcome {
  FC_OUTCOME_ONGOING = 0,
  FC_OUTCOME_WHITE_WINS = 1,
  FC_OUTCOME_BLACK_WINS = 2,
  FC_OUTCOME_DRAW = 3,
} FcOutcome;

/**
 * Result code of every fallible call.
 */
typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_NULL_POINTER = 1,
  FC_STATUS_INVALID_UTF8 = 2,
  FC_STATUS_PARSE = 3,
  FC_STATUS_ILLEGAL_MOVE = 4,
  FC_STATUS_RESTRICTED_MOVE = 5,
  FC_STATUS_AMBIGUOUS_MOVE = 6,
  FC_STATUS_GAME_OVER = 7,
  FC_STATUS_DEPTH_LIMIT = 8,
  FC_STATUS_INTERNAL = 9,
} FcStatus;

/**
 * Opaque game state.
 */
typedef struct FcState FcState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * New game from the standard initial position under `schedule` (a builtin
 * id such as `"balanced"` or a spec such as `"WBBWW/BW"`).
 *
 * # Safety
 * `schedule` must be a valid C string and `out` a valid pointer.
 */
enum FcStatus fc_state_new_startpos(const char *schedule, struct FcState **out);

/**
 * New game from an xFEN string.
 *
 * # Safety
 * `xfen` must be a valid C string and `out` a valid pointer.
 */
enum FcStatus fc_state_new_xfen(const char *xfen, struct FcState **out);

/**
 * Copies a state.
 *
 * # Safety
 * `state` must come from this library; `out` must be a valid pointer.
 */
enum FcStatus fc_state_clone(const struct FcState *state, struct FcState **out);

/**
 * Releases a state. Null is ignored.
 *
 * # Safety
 * `state` must come from this library and not be used afterwards.
 */
void fc_state_free(struct FcState *state);

/**
 * Writes the xFEN of `state` to `*out`; release it with `fc_string_free`.
 *
 * # Safety
 * `state` must come from this library; `out` must be a valid pointer.
 */
enum FcStatus fc_state_to_xfen(const struct FcState *state, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void fc_string_free(char *s);

/**
 * Plays a move in SAN. The state is unchanged on failure.
 *
 * # Safety
 * `state` must come from this library; `san` must be a valid C string.
 */
enum FcStatus fc_state_play_san(struct FcState *state, const char *san);

/**
 * Plays a move in coordinate notation such as `e2e4` or `a7a8q`.
 *
 * # Safety
 * `state` must come from this library; `uci` must be a valid C string.
 */
enum FcStatus fc_state_play_uci(struct FcState *state, const char *uci);

/**
 * Number of moves the schedule allows now; 0 once the game is over.
 *
 * # Safety
 * `state` must come from this library; `out` must be a valid pointer.
 */
enum FcStatus fc_state_legal_move_count(const struct FcState *state, size_t *out);

/**
 * # Safety
 * `state` must come from this library; `out` must be a valid pointer.
 */
enum FcStatus fc_state_outcome(const struct FcState *state, enum FcOutcome *out);

/**
 * Ply number of the next move, counting from 1.
 *
 * # Safety
 * `state` must come from this library; `out` must be a valid pointer.
 */
enum FcStatus fc_state_next_ply(const struct FcState *state, uint32_t *out);

/**
 * Variant perft: play sequences of length `depth` under the schedule.
 *
 * # Safety
 * `state` must come from this library; `out` must be a valid pointer.
 */
enum FcStatus fc_state_perft(const struct FcState *state, uint32_t depth, uint64_t *out);

/**
 * Who moves at `ply` (from 1) under `schedule`.
 *
 * # Safety
 * `schedule` must be a valid C string and `out` a valid pointer.
 */
enum FcStatus fc_schedule_mover_at_ply(const char *schedule, uint32_t ply, enum FcColor *out);

/**
 * Message for the last failed call on this thread, or an empty string.
 * Valid until the next call into this library on the same thread.
 */
const char *fc_last_error(void);

/**
 * Library version as a static string.
 */
const char *fc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAIRCHESS_H */
