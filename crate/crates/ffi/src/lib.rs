//! C interface to `fairchess`.
//!
//! States are opaque heap handles created by `fc_state_new_*` and released
//! with `fc_state_free`. Every fallible call returns an [`FcStatus`]; on
//! failure `fc_last_error` describes what went wrong on the calling thread.
//! Strings returned through out-parameters belong to the caller and must be
//! released with `fc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fairchess::notation::{parse_san, parse_uci, NotationError};
use fairchess::{Color, MoveSchedule, Outcome, VariantError, VariantState};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    IllegalMove = 4,
    RestrictedMove = 5,
    AmbiguousMove = 6,
    GameOver = 7,
    DepthLimit = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FcOutcome {
    Ongoing = 0,
    WhiteWins = 1,
    BlackWins = 2,
    Draw = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FcColor {
    White = 0,
    Black = 1,
}

/// Opaque game state.
pub struct FcState {
    inner: VariantState,
}

/// Deepest perft accepted through this interface.
pub const FC_MAX_PERFT_DEPTH: u32 = 6;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn fail(status: FcStatus, msg: impl Into<String>) -> FcStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> FcStatus) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == FcStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(FcStatus::Internal, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FcStatus> {
    if s.is_null() {
        return Err(fail(FcStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(FcStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn variant_status(e: &VariantError) -> FcStatus {
    match e {
        VariantError::Terminal(_) => FcStatus::GameOver,
        VariantError::Illegal { .. } => FcStatus::IllegalMove,
        VariantError::Restricted { .. } => FcStatus::RestrictedMove,
        _ => FcStatus::Parse,
    }
}

fn notation_status(e: &NotationError) -> FcStatus {
    match e {
        NotationError::Illegal { .. } => FcStatus::IllegalMove,
        NotationError::Restricted { .. } => FcStatus::RestrictedMove,
        NotationError::Ambiguous { .. } => FcStatus::AmbiguousMove,
        NotationError::Terminal { .. } => FcStatus::GameOver,
        _ => FcStatus::Parse,
    }
}

fn boxed(state: VariantState, out: *mut *mut FcState) -> FcStatus {
    unsafe { *out = Box::into_raw(Box::new(FcState { inner: state })) };
    FcStatus::Ok
}

/// New game from the standard initial position under `schedule` (a builtin
/// id such as `"balanced"` or a spec such as `"WBBWW/BW"`).
///
/// # Safety
/// `schedule` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_state_new_startpos(schedule: *const c_char, out: *mut *mut FcState) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::NullPointer, "null out pointer");
        }
        let spec = match read_str(schedule) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match MoveSchedule::resolve(spec) {
            Ok(s) => boxed(VariantState::initial(s), out),
            Err(e) => fail(FcStatus::Parse, e.to_string()),
        }
    })
}

/// New game from an xFEN string.
///
/// # Safety
/// `xfen` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_state_new_xfen(xfen: *const c_char, out: *mut *mut FcState) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::NullPointer, "null out pointer");
        }
        let text = match read_str(xfen) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match VariantState::decode_xfen(text) {
            Ok(v) => boxed(v, out),
            Err(e) => fail(FcStatus::Parse, e.to_string()),
        }
    })
}

/// Copies a state.
///
/// # Safety
/// `state` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_state_clone(state: *const FcState, out: *mut *mut FcState) -> FcStatus {
    guard(|| match (state.as_ref(), out.is_null()) {
        (Some(s), false) => boxed(s.inner.clone(), out),
        _ => fail(FcStatus::NullPointer, "null state or out pointer"),
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fc_state_free(state: *mut FcState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Writes the xFEN of `state` to `*out`; release it with `fc_string_free`.
///
/// # Safety
/// `state` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_state_to_xfen(state: *const FcState, out: *mut *mut c_char) -> FcStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return fail(FcStatus::NullPointer, "null state") };
        if out.is_null() {
            return fail(FcStatus::NullPointer, "null out pointer");
        }
        let text = CString::new(s.inner.encode_xfen()).expect("xfen has no nul");
        *out = text.into_raw();
        FcStatus::Ok
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn play_with(
    state: *mut FcState,
    text: *const c_char,
    parse: fn(&VariantState, &str) -> Result<fairchess::Move, NotationError>,
) -> FcStatus {
    guard(|| {
        let Some(s) = state.as_mut() else { return fail(FcStatus::NullPointer, "null state") };
        let text = match read_str(text) {
            Ok(t) => t,
            Err(st) => return st,
        };
        let m = match parse(&s.inner, text) {
            Ok(m) => m,
            Err(e) => return fail(notation_status(&e), e.to_string()),
        };
        match s.inner.play(m) {
            Ok(next) => {
                s.inner = next;
                FcStatus::Ok
            }
            Err(e) => fail(variant_status(&e), e.to_string()),
        }
    })
}

/// Plays a move in SAN. The state is unchanged on failure.
///
/// # Safety
/// `state` must come from this library; `san` must be a valid C string.
#[no_mangle]
pub unsafe extern "C" fn fc_state_play_san(state: *mut FcState, san: *const c_char) -> FcStatus {
    play_with(state, san, parse_san)
}

/// Plays a move in coordinate notation such as `e2e4` or `a7a8q`.
///
/// # Safety
/// `state` must come from this library; `uci` must be a valid C string.
#[no_mangle]
pub unsafe extern "C" fn fc_state_play_uci(state: *mut FcState, uci: *const c_char) -> FcStatus {
    play_with(state, uci, parse_uci)
}

/// Number of moves the schedule allows now; 0 once the game is over.
///
/// # Safety
/// `state` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_state_legal_move_count(state: *const FcState, out: *mut usize) -> FcStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return fail(FcStatus::NullPointer, "null state") };
        let Some(out) = out.as_mut() else { return fail(FcStatus::NullPointer, "null out pointer") };
        *out = s.inner.legal_moves().map_or(0, |m| m.len());
        FcStatus::Ok
    })
}

/// # Safety
/// `state` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_state_outcome(state: *const FcState, out: *mut FcOutcome) -> FcStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return fail(FcStatus::NullPointer, "null state") };
        let Some(out) = out.as_mut() else { return fail(FcStatus::NullPointer, "null out pointer") };
        *out = match s.inner.outcome() {
            Outcome::Ongoing => FcOutcome::Ongoing,
            Outcome::WhiteWins => FcOutcome::WhiteWins,
            Outcome::BlackWins => FcOutcome::BlackWins,
            Outcome::Draw(_) => FcOutcome::Draw,
        };
        FcStatus::Ok
    })
}

/// Ply number of the next move, counting from 1.
///
/// # Safety
/// `state` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_state_next_ply(state: *const FcState, out: *mut u32) -> FcStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return fail(FcStatus::NullPointer, "null state") };
        let Some(out) = out.as_mut() else { return fail(FcStatus::NullPointer, "null out pointer") };
        *out = s.inner.next_ply();
        FcStatus::Ok
    })
}

/// Variant perft: play sequences of length `depth` under the schedule.
///
/// # Safety
/// `state` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_state_perft(state: *const FcState, depth: u32, out: *mut u64) -> FcStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return fail(FcStatus::NullPointer, "null state") };
        let Some(out) = out.as_mut() else { return fail(FcStatus::NullPointer, "null out pointer") };
        if depth > FC_MAX_PERFT_DEPTH {
            return fail(FcStatus::DepthLimit, format!("depth {depth} exceeds {FC_MAX_PERFT_DEPTH}"));
        }
        *out = s.inner.perft(depth);
        FcStatus::Ok
    })
}

/// Who moves at `ply` (from 1) under `schedule`.
///
/// # Safety
/// `schedule` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_schedule_mover_at_ply(schedule: *const c_char, ply: u32, out: *mut FcColor) -> FcStatus {
    guard(|| {
        let Some(out) = out.as_mut() else { return fail(FcStatus::NullPointer, "null out pointer") };
        let spec = match read_str(schedule) {
            Ok(s) => s,
            Err(st) => return st,
        };
        if ply == 0 {
            return fail(FcStatus::Parse, "plies count from 1");
        }
        match MoveSchedule::resolve(spec) {
            Ok(s) => {
                *out = match s.mover_at_ply(ply) {
                    Color::White => FcColor::White,
                    Color::Black => FcColor::Black,
                };
                FcStatus::Ok
            }
            Err(e) => fail(FcStatus::Parse, e.to_string()),
        }
    })
}

/// Message for the last failed call on this thread, or an empty string.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn fc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fc_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
