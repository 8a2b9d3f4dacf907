//! Annotation sessions over a corpus and its tasks.

pub mod bio;
mod search;
mod session;
pub mod snap;

use thiserror::Error;

use crate::conll::ConllError;
use crate::diag::Diagnostic;
use crate::task::TaskType;

pub use bio::{bio_decode, bio_encode, Span};
pub use search::{
    annotation_mode, keyboard_map, label_search, AnnotationMode, KEYBOARD_LABEL_LIMIT,
};
pub use session::{Export, ExportOptions, Progress, Session, Status, DEFAULT_EXPORT_BASE};
pub use snap::{display_text, snap_selection};

/// Metadata keys of the form `status:<task title>` persist statuses.
pub const STATUS_KEY_PREFIX: &str = "status:";

pub fn status_key(title: &str) -> String {
    format!("{STATUS_KEY_PREFIX}{title}")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("spans overlap: [{}, {}) {} and [{}, {}) {}", .0.start, .0.end, .0.label, .1.start, .1.end, .1.label)]
    OverlappingSpans(Span, Span),
    #[error("invalid span: {0}")]
    InvalidSpan(String),
    #[error("selection [{start}, {end}) outside display text of length {len}")]
    OffsetOutOfRange {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("utterance has no tokens")]
    NoTokens,
    #[error("no task with id {0}")]
    UnknownTask(u64),
    #[error("task {title:?} is {actual}, not {expected}")]
    WrongTaskType {
        title: String,
        expected: &'static str,
        actual: TaskType,
    },
    #[error("label {label:?} is not configured for task {title:?}")]
    UnknownLabel { title: String, label: String },
    #[error("task {0:?} has no default label")]
    NoDefaultLabel(String),
    #[error("utterance {0} out of range")]
    UtteranceOutOfRange(usize),
    #[error("token {token} out of range in utterance {utterance}")]
    TokenOutOfRange { utterance: usize, token: usize },
    #[error("target text must be a single line")]
    MultilineText,
    #[error("corpus and tasks do not match: {}", first_message(.0))]
    Incompatible(Vec<Diagnostic>),
    #[error(transparent)]
    Conll(#[from] ConllError),
}

fn first_message(diags: &[Diagnostic]) -> String {
    match diags {
        [] => String::new(),
        [only] => only.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more)", rest.len()),
    }
}
