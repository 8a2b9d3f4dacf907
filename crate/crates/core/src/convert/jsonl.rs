use serde_json::Value;

use super::ConvertError;
use crate::conll::{Corpus, Token, Utterance};
use crate::engine::bio::{parse_tag, Tag};
use crate::par::Execution;
use crate::task::{infer_labels_with, TaskConfig, TaskSet, TaskType};

/// Which record keys hold the text and the labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMapping {
    /// A token list or a whitespace-tokenized string.
    pub text_field: String,
    /// A scalar (utterance label) or a list aligned with the tokens.
    pub label_field: Option<String>,
    pub task_title: String,
}

impl FieldMapping {
    pub fn new(text_field: impl Into<String>, task_title: impl Into<String>) -> FieldMapping {
        FieldMapping {
            text_field: text_field.into(),
            label_field: None,
            task_title: task_title.into(),
        }
    }

    pub fn with_labels(mut self, label_field: impl Into<String>) -> FieldMapping {
        self.label_field = Some(label_field.into());
        self
    }
}

/// One JSON value per non-blank line.
pub fn parse_jsonl(text: &str) -> Result<Vec<Value>, ConvertError> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| ConvertError::Json {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

enum Labels {
    None,
    Class(String),
    Tags(Vec<String>),
}

fn record_err(record: usize, message: impl Into<String>) -> ConvertError {
    ConvertError::Record {
        record,
        message: message.into(),
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Builds a corpus (record and token order preserved) and the task that
/// its labels describe: a `class` task for scalar labels, a `seq` or
/// `seq_bio` task (tags in column 2) for per-token lists.
pub fn import_jsonl(
    records: &[Value],
    mapping: &FieldMapping,
) -> Result<(Corpus, TaskConfig), ConvertError> {
    import_jsonl_with(records, mapping, Execution::default())
}

pub fn import_jsonl_with(
    records: &[Value],
    mapping: &FieldMapping,
    exec: Execution,
) -> Result<(Corpus, TaskConfig), ConvertError> {
    if mapping.text_field.is_empty() {
        return Err(record_err(0, "text field name is empty"));
    }
    let converted = exec.try_map_indexed(records, |i, r| convert_record(i, r, mapping))?;

    let mut kind: Option<(usize, bool)> = None;
    for (i, (_, labels)) in converted.iter().enumerate() {
        let is_tags = match labels {
            Labels::None => continue,
            Labels::Class(_) => false,
            Labels::Tags(_) => true,
        };
        match kind {
            None => kind = Some((i, is_tags)),
            Some((first, k)) if k != is_tags => {
                return Err(record_err(
                    i,
                    format!("label shape differs from record {first}"),
                ))
            }
            _ => {}
        }
    }
    let tagged = kind.is_some_and(|(_, t)| t);
    let bio = tagged
        && converted.iter().all(|(_, l)| match l {
            Labels::Tags(tags) => tags
                .iter()
                .all(|t| !t.is_empty() && !matches!(parse_tag(t), Tag::Malformed)),
            _ => true,
        })
        && converted.iter().any(|(_, l)| match l {
            Labels::Tags(tags) => tags.iter().any(|t| parse_tag(t).entity().is_some()),
            _ => false,
        });

    let mut utterances = Vec::with_capacity(converted.len());
    for (i, (forms, labels)) in converted.into_iter().enumerate() {
        let tokens = match &labels {
            Labels::Tags(tags) => forms
                .into_iter()
                .zip(tags)
                .map(|(f, t)| Token::new([f, t.clone()]))
                .collect::<Result<Vec<_>, _>>(),
            _ => forms.into_iter().map(|f| Token::new([f])).collect(),
        }
        .map_err(|e| record_err(i, e.to_string()))?;
        let mut utt = Utterance::new(tokens);
        if let Labels::Class(label) = labels {
            utt.set_metadata(&mapping.task_title, &label)
                .map_err(|e| record_err(i, e.to_string()))?;
        }
        utterances.push(utt);
    }
    let corpus = Corpus::new(utterances);

    let task = if tagged {
        let task_type = if bio { TaskType::SeqBio } else { TaskType::Seq };
        TaskConfig::new(mapping.task_title.as_str(), task_type, 0).with_columns(1, Some(2))
    } else {
        TaskConfig::new(mapping.task_title.as_str(), TaskType::Class, 0)
    };
    let labels = infer_labels_with(&corpus, &task, exec)?;
    let task = TaskSet::new(vec![task.with_labels(labels)])?
        .into_inner()
        .remove(0);
    Ok((corpus, task))
}

fn convert_record(
    index: usize,
    record: &Value,
    mapping: &FieldMapping,
) -> Result<(Vec<String>, Labels), ConvertError> {
    let obj = record
        .as_object()
        .ok_or_else(|| record_err(index, "record is not a JSON object"))?;
    let text = obj
        .get(&mapping.text_field)
        .ok_or_else(|| record_err(index, format!("missing field {:?}", mapping.text_field)))?;
    let forms: Vec<String> = match text {
        Value::String(s) => s.split_whitespace().map(str::to_string).collect(),
        Value::Array(items) => items
            .iter()
            .map(|v| {
                scalar(v).ok_or_else(|| record_err(index, "token list holds a non-scalar value"))
            })
            .collect::<Result<_, _>>()?,
        _ => {
            return Err(record_err(
                index,
                format!("field {:?} must be a string or a list", mapping.text_field),
            ))
        }
    };
    if forms.is_empty() {
        return Err(record_err(index, "record has no tokens"));
    }

    let Some(field) = &mapping.label_field else {
        return Ok((forms, Labels::None));
    };
    let labels = match obj.get(field) {
        None => return Err(record_err(index, format!("missing field {field:?}"))),
        Some(Value::Null) => Labels::None,
        Some(Value::Array(items)) => {
            let tags = items
                .iter()
                .map(|v| {
                    scalar(v).ok_or_else(|| record_err(index, "tag list holds a non-scalar value"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if tags.len() != forms.len() {
                return Err(ConvertError::LengthMismatch {
                    record: index,
                    tokens: forms.len(),
                    tags: tags.len(),
                });
            }
            Labels::Tags(tags)
        }
        Some(v) => Labels::Class(
            scalar(v)
                .ok_or_else(|| record_err(index, format!("field {field:?} is not a label")))?,
        ),
    };
    Ok((forms, labels))
}
