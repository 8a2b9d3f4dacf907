//! Bridges between the TSV corpus model and other formats.

mod jsonl;
mod machamp;
mod raw;
mod standoff;

use thiserror::Error;

use crate::conll::ConllError;
use crate::engine::EngineError;
use crate::task::TaskError;

pub use jsonl::{import_jsonl, import_jsonl_with, parse_jsonl, FieldMapping};
pub use machamp::{export_machamp, MachampExport};
pub use raw::import_raw_text;
pub use standoff::{
    bio_to_standoff, standoff_batch_to_bio, standoff_to_bio, SnapAdjustment, StandoffConversion,
    StandoffDocument, StandoffSpan,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("line {line}: {source}")]
    RawText { line: usize, source: ConllError },
    #[error("line {line}: invalid JSON: {message}")]
    Json { line: usize, message: String },
    #[error("record {record}: {message}")]
    Record { record: usize, message: String },
    #[error("record {record}: {tokens} tokens but {tags} tags")]
    LengthMismatch {
        record: usize,
        tokens: usize,
        tags: usize,
    },
    #[error("span {index}: [{start}, {end}) is not a valid range in text of {len} chars")]
    SpanOutOfRange {
        index: usize,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("span {index} has an empty or reserved label")]
    SpanLabel { index: usize },
    #[error("span {index} does not touch any token")]
    NoTokens { index: usize },
    #[error("spans {first} and {second} overlap after snapping to tokens")]
    OverlapAfterSnap { first: usize, second: usize },
    #[error("MaChAmp export needs at least one task")]
    NoTasks,
    #[error("task {title:?} is missing a column index")]
    MissingIndex { title: String },
    #[error("word-level tasks read different input columns ({first} and {second})")]
    ConflictingInput { first: usize, second: usize },
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
