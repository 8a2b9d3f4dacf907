//! Token-level annotation over tab-separated (CoNLL-like) corpora.
//!
//! - [`conll`]: parse, edit and serialize comment-bearing TSV corpora.
//! - [`task`]: task configurations and their JSON config files.
//! - [`engine`]: annotation sessions, the BIO codec, selection snapping,
//!   statuses and export.
//! - [`convert`]: raw text, JSON-lines and standoff import; MaChAmp export.
//! - [`protocol`]: the JSON request/reply boundary used by front ends.

pub mod conll;
pub mod convert;
mod diag;
pub mod engine;
pub mod par;
pub mod protocol;
pub mod task;

pub use conll::{
    parse_corpus, serialize_corpus, CommentLine, ConllError, Corpus, Token, Utterance,
};
pub use diag::{Diagnostic, Severity};
pub use engine::{EngineError, Session, Span, Status};
pub use par::Execution;
pub use task::{parse_config, serialize_config, TaskConfig, TaskError, TaskSet, TaskType};
