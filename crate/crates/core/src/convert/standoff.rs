//! Character-offset ("standoff") spans to and from token-level BIO tags.
//!
//! Offsets are half-open and count chars. Converting to tokens snaps every
//! span outward to whole tokens with the same rule as interactive selection,
//! and reports each span that moved.

use serde::{Deserialize, Serialize};

use super::ConvertError;
use crate::conll::{Token, Utterance};
use crate::engine::bio::{bio_decode, bio_encode, Span};
use crate::engine::snap::{display_text, range_extent, snap_to_extents, token_extents};
use crate::engine::EngineError;
use crate::par::Execution;
use crate::task::{TaskConfig, TaskType, OUTSIDE};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StandoffSpan {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandoffDocument {
    pub text: String,
    pub spans: Vec<StandoffSpan>,
}

/// A span whose offsets did not fall on token boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnapAdjustment {
    /// Position of the span in the input document.
    pub span: usize,
    pub label: String,
    pub original: (usize, usize),
    pub snapped: (usize, usize),
    /// Token range the span now covers.
    pub tokens: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StandoffConversion {
    pub tokens: Vec<String>,
    pub tags: Vec<String>,
    pub adjustments: Vec<SnapAdjustment>,
}

impl StandoffConversion {
    /// Two-column rows: form, BIO tag.
    pub fn to_utterance(&self) -> Result<Utterance, ConvertError> {
        let tokens = self
            .tokens
            .iter()
            .zip(&self.tags)
            .map(|(form, tag)| Token::new([form.as_str(), tag.as_str()]))
            .collect::<Result<Vec<_>, _>>()
            .map_err(EngineError::from)?;
        Ok(Utterance::new(tokens))
    }
}

/// Whitespace tokens with their char extents.
fn tokenize(text: &str) -> (Vec<String>, Vec<(usize, usize)>) {
    let mut tokens = Vec::new();
    let mut extents = Vec::new();
    let mut current: Option<(usize, String)> = None;
    let mut at = 0;
    for ch in text.chars() {
        if ch.is_whitespace() {
            if let Some((start, form)) = current.take() {
                extents.push((start, at));
                tokens.push(form);
            }
        } else {
            current
                .get_or_insert_with(|| (at, String::new()))
                .1
                .push(ch);
        }
        at += 1;
    }
    if let Some((start, form)) = current {
        extents.push((start, at));
        tokens.push(form);
    }
    (tokens, extents)
}

pub fn standoff_to_bio(doc: &StandoffDocument) -> Result<StandoffConversion, ConvertError> {
    let len = doc.text.chars().count();
    let (tokens, extents) = tokenize(&doc.text);

    let mut snapped: Vec<(usize, Span)> = Vec::with_capacity(doc.spans.len());
    let mut adjustments = Vec::new();
    for (index, s) in doc.spans.iter().enumerate() {
        if s.start >= s.end || s.end > len {
            return Err(ConvertError::SpanOutOfRange {
                index,
                start: s.start,
                end: s.end,
                len,
            });
        }
        if s.label.is_empty() || s.label == OUTSIDE {
            return Err(ConvertError::SpanLabel { index });
        }
        let range =
            snap_to_extents(&extents, s.start, s.end).ok_or(ConvertError::NoTokens { index })?;
        let extent = range_extent(&extents, range);
        if extent != (s.start, s.end) {
            adjustments.push(SnapAdjustment {
                span: index,
                label: s.label.clone(),
                original: (s.start, s.end),
                snapped: extent,
                tokens: range,
            });
        }
        snapped.push((index, Span::new(range.0, range.1, s.label.as_str())));
    }

    snapped.sort_by_key(|(_, s)| (s.start, s.end));
    for pair in snapped.windows(2) {
        if pair[1].1.start < pair[0].1.end {
            let (a, b) = (pair[0].0, pair[1].0);
            return Err(ConvertError::OverlapAfterSnap {
                first: a.min(b),
                second: a.max(b),
            });
        }
    }
    let spans: Vec<Span> = snapped.into_iter().map(|(_, s)| s).collect();
    let tags = bio_encode(&spans, tokens.len())?;
    Ok(StandoffConversion {
        tokens,
        tags,
        adjustments,
    })
}

/// Converts documents independently, in parallel when enabled. The first
/// failing document (by position) determines the error.
pub fn standoff_batch_to_bio(
    docs: &[StandoffDocument],
    exec: Execution,
) -> Result<Vec<StandoffConversion>, ConvertError> {
    exec.try_map_indexed(docs, |_, d| standoff_to_bio(d))
}

/// Space-joined input column plus the decoded spans as char offsets.
pub fn bio_to_standoff(
    utt: &Utterance,
    task: &TaskConfig,
) -> Result<StandoffDocument, ConvertError> {
    if task.task_type != TaskType::SeqBio {
        return Err(EngineError::WrongTaskType {
            title: task.title.clone(),
            expected: TaskType::SeqBio.name(),
            actual: task.task_type,
        }
        .into());
    }
    let column = task
        .output_index
        .ok_or_else(|| ConvertError::MissingIndex {
            title: task.title.clone(),
        })?;
    let extents = token_extents(&utt.column(task.input_index));
    let spans = bio_decode(&utt.column(column))
        .into_iter()
        .map(|s| {
            let (start, end) = range_extent(&extents, (s.start, s.end));
            StandoffSpan {
                start,
                end,
                label: s.label,
            }
        })
        .collect();
    Ok(StandoffDocument {
        text: display_text(utt, task),
        spans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conll::parse_corpus;

    fn doc(text: &str, spans: &[(usize, usize, &str)]) -> StandoffDocument {
        StandoffDocument {
            text: text.to_string(),
            spans: spans
                .iter()
                .map(|&(start, end, label)| StandoffSpan {
                    start,
                    end,
                    label: label.to_string(),
                })
                .collect(),
        }
    }

    const TEXT: &str = "What ? Eevee is evolving !";

    #[test]
    fn aligned_span() {
        let c = standoff_to_bio(&doc(TEXT, &[(7, 12, "MISC")])).unwrap();
        assert_eq!(c.tokens, ["What", "?", "Eevee", "is", "evolving", "!"]);
        assert_eq!(c.tags, ["O", "O", "B-MISC", "O", "O", "O"]);
        assert!(c.adjustments.is_empty());
    }

    #[test]
    fn no_spans() {
        let c = standoff_to_bio(&doc(TEXT, &[])).unwrap();
        assert_eq!(c.tags, ["O"; 6]);
    }

    #[test]
    fn misaligned_span_is_reported() {
        let c = standoff_to_bio(&doc(TEXT, &[(7, 10, "MISC")])).unwrap();
        assert_eq!(c.tags, ["O", "O", "B-MISC", "O", "O", "O"]);
        assert_eq!(
            c.adjustments,
            [SnapAdjustment {
                span: 0,
                label: "MISC".into(),
                original: (7, 10),
                snapped: (7, 12),
                tokens: (2, 3),
            }]
        );
    }

    #[test]
    fn overlap_after_snapping() {
        // both touch "Eevee"
        let e = standoff_to_bio(&doc(TEXT, &[(10, 14, "B"), (7, 9, "A")])).unwrap_err();
        assert_eq!(
            e,
            ConvertError::OverlapAfterSnap {
                first: 0,
                second: 1
            }
        );
    }

    #[test]
    fn bad_spans() {
        assert!(matches!(
            standoff_to_bio(&doc(TEXT, &[(3, 99, "X")])),
            Err(ConvertError::SpanOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            standoff_to_bio(&doc(TEXT, &[(3, 3, "X")])),
            Err(ConvertError::SpanOutOfRange { .. })
        ));
        assert!(matches!(
            standoff_to_bio(&doc(TEXT, &[(0, 2, "O")])),
            Err(ConvertError::SpanLabel { index: 0 })
        ));
        assert!(matches!(
            standoff_to_bio(&doc("   ", &[(0, 2, "X")])),
            Err(ConvertError::NoTokens { index: 0 })
        ));
    }

    #[test]
    fn irregular_whitespace() {
        let c = standoff_to_bio(&doc("  New\tYork \n city", &[(2, 10, "LOC")])).unwrap();
        assert_eq!(c.tokens, ["New", "York", "city"]);
        assert_eq!(c.tags, ["B-LOC", "I-LOC", "O"]);
        assert!(c.adjustments.is_empty());
    }

    #[test]
    fn from_utterance() {
        let corpus = parse_corpus(
            "1\tWhat\tO\n2\t?\tO\n3\tEevee\tB-MISC\n4\tis\tO\n5\tevolving\tO\n6\t!\tO\n",
        )
        .unwrap();
        let task = TaskConfig::new("NER", TaskType::SeqBio, 0).with_columns(2, Some(3));
        let d = bio_to_standoff(&corpus.utterances[0], &task).unwrap();
        assert_eq!(d.text, TEXT);
        assert_eq!(d.spans, doc(TEXT, &[(7, 12, "MISC")]).spans);
        let back = standoff_to_bio(&d).unwrap();
        assert_eq!(back.tags, corpus.utterances[0].column(3));

        let all_o = parse_corpus("a\tO\nb\tO\n").unwrap();
        let task = TaskConfig::new("NER", TaskType::SeqBio, 0).with_columns(1, Some(2));
        assert!(bio_to_standoff(&all_o.utterances[0], &task)
            .unwrap()
            .spans
            .is_empty());

        let class = TaskConfig::new("intent", TaskType::Class, 1);
        assert!(bio_to_standoff(&all_o.utterances[0], &class).is_err());
    }

    #[test]
    fn json_shape() {
        let d: StandoffDocument =
            serde_json::from_str(r#"{"text":"a b","spans":[{"start":0,"end":1,"label":"X"}]}"#)
                .unwrap();
        assert_eq!(d, doc("a b", &[(0, 1, "X")]));
    }
}
