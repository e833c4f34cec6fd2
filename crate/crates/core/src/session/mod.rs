//! Event-sourced live sessions.
//!
//! Commands from the GM become events; the state is a fold over the event
//! log. Replaying a log re-derives every die from the recorded seed and
//! re-resolves every check, so a tampered log is caught.

mod engine;
mod event;
mod log;
mod state;

pub use engine::{
    create_session, create_session_at, now_millis, Command, Session, SessionConfig, SessionError,
    DEFAULT_FAILURE_CAP, MAX_CHARACTERS,
};
pub use event::{EventRecord, SessionEvent, LOG_SCHEMA_VERSION};
pub use log::{append_log, parse_log, read_log, to_jsonl, LogError};
pub use state::{replay, Phase, ReplayError, SessionState, SessionStatus};
