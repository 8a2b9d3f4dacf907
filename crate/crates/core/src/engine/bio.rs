//! BIO span codec.
//!
//! Decoding is tolerant: an `I-X` that does not continue an `X` span opens
//! a new one, and cells that are neither `O` nor `B-`/`I-` prefixed (or are
//! empty) count as outside.

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::task::OUTSIDE;

/// A half-open token interval `[start, end)` carrying an entity type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

impl Span {
    pub fn new(start: usize, end: usize, label: impl Into<String>) -> Span {
        Span {
            start,
            end,
            label: label.into(),
        }
    }

    pub fn overlaps(&self, start: usize, end: usize) -> bool {
        self.start < end && start < self.end
    }
}

/// A single cell read as a BIO tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
    Malformed,
}

impl<'a> Tag<'a> {
    pub fn entity(self) -> Option<&'a str> {
        match self {
            Tag::Begin(e) | Tag::Inside(e) => Some(e),
            _ => None,
        }
    }
}

pub fn parse_tag(cell: &str) -> Tag<'_> {
    if cell.is_empty() || cell == OUTSIDE {
        return Tag::Outside;
    }
    match (cell.strip_prefix("B-"), cell.strip_prefix("I-")) {
        (Some(e), _) if !e.is_empty() => Tag::Begin(e),
        (_, Some(e)) if !e.is_empty() => Tag::Inside(e),
        _ => Tag::Malformed,
    }
}

/// Tags for `n` tokens: `B-X` at each span start, `I-X` inside, `O` elsewhere.
pub fn bio_encode(spans: &[Span], n: usize) -> Result<Vec<String>, EngineError> {
    let mut sorted: Vec<&Span> = spans.iter().collect();
    sorted.sort();
    for span in &sorted {
        if span.start >= span.end || span.end > n {
            return Err(EngineError::InvalidSpan(format!(
                "span [{}, {}) outside 0..{n} or empty",
                span.start, span.end
            )));
        }
        if span.label.is_empty() || span.label == OUTSIDE {
            return Err(EngineError::InvalidSpan(format!(
                "span label {:?} is not an entity type",
                span.label
            )));
        }
    }
    for pair in sorted.windows(2) {
        if pair[1].start < pair[0].end {
            return Err(EngineError::OverlappingSpans(
                pair[0].clone(),
                pair[1].clone(),
            ));
        }
    }
    let mut tags = vec![OUTSIDE.to_string(); n];
    for span in sorted {
        tags[span.start] = format!("B-{}", span.label);
        for tag in &mut tags[span.start + 1..span.end] {
            *tag = format!("I-{}", span.label);
        }
    }
    Ok(tags)
}

/// Spans in start order; exact inverse of [`bio_encode`] on well-formed input.
pub fn bio_decode<S: AsRef<str>>(tags: &[S]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut open: Option<Span> = None;
    for (i, cell) in tags.iter().enumerate() {
        match parse_tag(cell.as_ref()) {
            Tag::Inside(e) if open.as_ref().is_some_and(|s| s.label == e) => {
                if let Some(s) = open.as_mut() {
                    s.end = i + 1;
                }
            }
            Tag::Begin(e) | Tag::Inside(e) => {
                spans.extend(open.take());
                open = Some(Span::new(i, i + 1, e));
            }
            Tag::Outside | Tag::Malformed => spans.extend(open.take()),
        }
    }
    spans.extend(open);
    spans
}
