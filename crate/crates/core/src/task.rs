//! Annotation task configurations and their JSON config-file format.
//!
//! A config file is a JSON array of task objects:
//!
//! ```json
//! [{"title":"NER",
//!   "type": {"name":"seq_bio", "isWordLevel":true},
//!   "output_index":"4",
//!   "input_index":"1",
//!   "labels":["LOC","MISC","ORG","PER"],
//!   "id":0}]
//! ```
//!
//! Column indices are 1-based and may be written as strings or integers.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::conll::{CommentLine, Corpus, Utterance};
use crate::diag::Diagnostic;
use crate::engine::bio;
use crate::engine::{status_key, Status, STATUS_KEY_PREFIX};
use crate::par::Execution;

/// The BIO "outside" tag, also the default label of span tasks.
pub const OUTSIDE: &str = "O";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("config is not valid JSON: {0}")]
    Json(String),
    #[error("config must be a JSON array of tasks")]
    NotAnArray,
    #[error("task {position}: {message}")]
    Task { position: usize, message: String },
    #[error("task {title:?}: output column {column} is absent from the corpus")]
    ColumnAbsent { title: String, column: usize },
    #[error("task {title:?}: {message}")]
    NotApplicable { title: String, message: String },
}

fn task_err(position: usize, message: impl Into<String>) -> TaskError {
    TaskError::Task {
        position,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskType {
    /// One label per token.
    Seq,
    /// Token spans, stored as BIO tags.
    SeqBio,
    /// One label per utterance, stored as metadata.
    Class,
    /// Free target text per utterance, stored as metadata.
    Seq2Seq,
}

impl TaskType {
    pub fn name(self) -> &'static str {
        match self {
            TaskType::Seq => "seq",
            TaskType::SeqBio => "seq_bio",
            TaskType::Class => "class",
            TaskType::Seq2Seq => "seq2seq",
        }
    }

    /// Accepts the on-disk names plus `span` as an alias of `seq_bio`.
    pub fn from_name(name: &str) -> Option<TaskType> {
        match name {
            "seq" => Some(TaskType::Seq),
            "seq_bio" | "span" => Some(TaskType::SeqBio),
            "class" => Some(TaskType::Class),
            "seq2seq" => Some(TaskType::Seq2Seq),
            _ => None,
        }
    }

    pub fn is_word_level(self) -> bool {
        matches!(self, TaskType::Seq | TaskType::SeqBio)
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskConfig {
    pub title: String,
    pub task_type: TaskType,
    /// 1-based column shown to the annotator.
    pub input_index: usize,
    /// 1-based column receiving token-level annotations; word-level only.
    pub output_index: Option<usize>,
    pub labels: Vec<String>,
    /// Fills empty annotation cells. Span tasks always default to `O`.
    pub default_label: Option<String>,
    pub id: u64,
}

impl TaskConfig {
    /// A task reading column 1, with no output column and no labels.
    pub fn new(title: impl Into<String>, task_type: TaskType, id: u64) -> TaskConfig {
        TaskConfig {
            title: title.into(),
            task_type,
            input_index: 1,
            output_index: None,
            labels: Vec::new(),
            default_label: None,
            id,
        }
    }

    pub fn with_columns(mut self, input_index: usize, output_index: Option<usize>) -> Self {
        self.input_index = input_index;
        self.output_index = output_index;
        self
    }

    pub fn with_labels<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.labels = labels.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_default_label(mut self, label: impl Into<String>) -> Self {
        self.default_label = Some(label.into());
        self
    }

    /// Whether `label` may be written by an annotation of this task.
    pub fn accepts_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label) || self.default_label.as_deref() == Some(label)
    }

    fn normalize(&mut self) {
        if self.default_label.as_deref() == Some("") {
            self.default_label = None;
        }
        if self.task_type == TaskType::SeqBio && self.default_label.is_none() {
            self.default_label = Some(OUTSIDE.to_string());
        }
    }

    fn check(&self) -> Result<(), String> {
        if self.title.is_empty() {
            return Err("title is empty".into());
        }
        if self.title.starts_with(STATUS_KEY_PREFIX) {
            return Err(format!(
                "title {:?} uses the reserved status prefix",
                self.title
            ));
        }
        CommentLine::metadata(&self.title, "")
            .map_err(|_| format!("title {:?} cannot be used as a metadata key", self.title))?;
        if self.input_index == 0 {
            return Err("input_index must be at least 1".into());
        }
        match (self.task_type.is_word_level(), self.output_index) {
            (true, None) => return Err(format!("{} task requires output_index", self.task_type)),
            (true, Some(0)) => return Err("output_index must be at least 1".into()),
            (true, Some(o)) if o == self.input_index => {
                return Err("output_index equals input_index".into())
            }
            (false, Some(_)) => {
                return Err(format!(
                    "{} task must not have output_index",
                    self.task_type
                ))
            }
            _ => {}
        }
        if self.task_type == TaskType::Seq2Seq && !self.labels.is_empty() {
            return Err("seq2seq task must not have labels".into());
        }
        let mut seen = HashSet::new();
        for label in &self.labels {
            if label.is_empty() || label.contains(['\t', '\n', '\r']) {
                return Err(format!("invalid label {label:?}"));
            }
            if !seen.insert(label.as_str()) {
                return Err(format!("duplicate label {label:?}"));
            }
            if self.task_type == TaskType::SeqBio && label == OUTSIDE {
                return Err("\"O\" is reserved in span tasks".into());
            }
        }
        if let Some(d) = &self.default_label {
            if d.contains(['\t', '\n', '\r']) {
                return Err(format!("invalid default label {d:?}"));
            }
        }
        Ok(())
    }
}

/// An ordered, validated list of tasks with unique titles and ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaskSet {
    tasks: Vec<TaskConfig>,
}

impl TaskSet {
    pub fn new(tasks: Vec<TaskConfig>) -> Result<TaskSet, TaskError> {
        let mut titles = HashSet::new();
        let mut ids = HashSet::new();
        let mut out = Vec::with_capacity(tasks.len());
        for (position, mut task) in tasks.into_iter().enumerate() {
            task.normalize();
            task.check().map_err(|m| task_err(position, m))?;
            if !titles.insert(task.title.clone()) {
                return Err(task_err(
                    position,
                    format!("duplicate title {:?}", task.title),
                ));
            }
            if !ids.insert(task.id) {
                return Err(task_err(position, format!("duplicate id {}", task.id)));
            }
            out.push(task);
        }
        Ok(TaskSet { tasks: out })
    }

    pub fn tasks(&self) -> &[TaskConfig] {
        &self.tasks
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TaskConfig> {
        self.tasks.iter()
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<&TaskConfig> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn by_title(&self, title: &str) -> Option<&TaskConfig> {
        self.tasks.iter().find(|t| t.title == title)
    }

    pub fn into_inner(self) -> Vec<TaskConfig> {
        self.tasks
    }
}

impl<'a> IntoIterator for &'a TaskSet {
    type Item = &'a TaskConfig;
    type IntoIter = std::slice::Iter<'a, TaskConfig>;

    fn into_iter(self) -> Self::IntoIter {
        self.tasks.iter()
    }
}

/// Parses a config file, logging nothing; see [`parse_config_with_warnings`].
pub fn parse_config(text: &str) -> Result<TaskSet, TaskError> {
    parse_config_with_warnings(text).map(|(tasks, _)| tasks)
}

/// Parses a config file and returns the non-fatal findings (unknown
/// fields, a contradictory `isWordLevel`) alongside the tasks.
pub fn parse_config_with_warnings(text: &str) -> Result<(TaskSet, Vec<String>), TaskError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| TaskError::Json(e.to_string()))?;
    let Value::Array(items) = doc else {
        return Err(TaskError::NotAnArray);
    };
    let mut warnings = Vec::new();
    let tasks = items
        .iter()
        .enumerate()
        .map(|(position, item)| parse_task(position, item, &mut warnings))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((TaskSet::new(tasks)?, warnings))
}

const KNOWN_FIELDS: [&str; 7] = [
    "title",
    "type",
    "output_index",
    "input_index",
    "labels",
    "id",
    "default_label",
];

fn parse_task(
    position: usize,
    item: &Value,
    warnings: &mut Vec<String>,
) -> Result<TaskConfig, TaskError> {
    let obj = item
        .as_object()
        .ok_or_else(|| task_err(position, "expected an object"))?;
    for key in obj.keys() {
        if !KNOWN_FIELDS.contains(&key.as_str()) {
            warnings.push(format!("task {position}: unknown field {key:?} ignored"));
        }
    }

    let title = obj
        .get("title")
        .ok_or_else(|| task_err(position, "missing field \"title\""))?
        .as_str()
        .ok_or_else(|| task_err(position, "\"title\" must be a string"))?
        .to_string();

    let (type_name, word_level) = match obj.get("type") {
        None => return Err(task_err(position, "missing field \"type\"")),
        Some(Value::String(name)) => (name.as_str(), None),
        Some(Value::Object(t)) => {
            let name = t
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| task_err(position, "\"type.name\" must be a string"))?;
            (name, t.get("isWordLevel").and_then(Value::as_bool))
        }
        Some(_) => return Err(task_err(position, "\"type\" must be an object or a string")),
    };
    let task_type = TaskType::from_name(type_name)
        .ok_or_else(|| task_err(position, format!("unknown task type {type_name:?}")))?;
    if word_level.is_some_and(|w| w != task_type.is_word_level()) {
        warnings.push(format!(
            "task {position}: isWordLevel disagrees with type {type_name:?}; ignored"
        ));
    }

    let output_index = index_field(position, obj, "output_index")?;
    let input_index = match index_field(position, obj, "input_index")? {
        Some(i) => i,
        None if task_type.is_word_level() => {
            return Err(task_err(position, "missing field \"input_index\""))
        }
        None => 1,
    };
    if task_type.is_word_level() && output_index.is_none() {
        return Err(task_err(position, "missing field \"output_index\""));
    }

    let labels = match obj.get("labels") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(ls)) => ls
            .iter()
            .map(|l| {
                l.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| task_err(position, "labels must be strings"))
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(task_err(position, "\"labels\" must be an array")),
    };

    let id = match obj.get("id") {
        None => position as u64,
        Some(v) => parse_integer(v)
            .ok_or_else(|| task_err(position, "\"id\" must be a non-negative integer"))?,
    };

    let default_label = match obj.get("default_label") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(task_err(position, "\"default_label\" must be a string")),
    };

    Ok(TaskConfig {
        title,
        task_type,
        input_index: input_index as usize,
        output_index: output_index.map(|o| o as usize),
        labels,
        default_label,
        id,
    })
}

fn parse_integer(v: &Value) -> Option<u64> {
    match v {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

/// `null`, a missing key and `""` all mean "absent".
fn index_field(
    position: usize,
    obj: &Map<String, Value>,
    key: &str,
) -> Result<Option<u64>, TaskError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) if s.trim().is_empty() => Ok(None),
        Some(v) => parse_integer(v)
            .map(Some)
            .ok_or_else(|| task_err(position, format!("{key:?} must be an integer"))),
    }
}

#[derive(Serialize)]
struct TypeJson {
    name: &'static str,
    #[serde(rename = "isWordLevel")]
    is_word_level: bool,
}

#[derive(Serialize)]
struct TaskJson<'a> {
    title: &'a str,
    #[serde(rename = "type")]
    task_type: TypeJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_index: Option<String>,
    input_index: String,
    labels: &'a [String],
    id: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    default_label: Option<&'a str>,
}

/// Emits the config-file shape, indices as strings.
pub fn serialize_config(tasks: &TaskSet) -> String {
    let items: Vec<TaskJson<'_>> = tasks
        .iter()
        .map(|t| TaskJson {
            title: &t.title,
            task_type: TypeJson {
                name: t.task_type.name(),
                is_word_level: t.task_type.is_word_level(),
            },
            output_index: t.output_index.map(|o| o.to_string()),
            input_index: t.input_index.to_string(),
            labels: &t.labels,
            id: t.id,
            default_label: t.default_label.as_deref(),
        })
        .collect();
    serde_json::to_string_pretty(&items).expect("task configs serialize")
}

/// Labels found in the corpus for `task`, sorted and deduplicated.
pub fn infer_labels(corpus: &Corpus, task: &TaskConfig) -> Result<Vec<String>, TaskError> {
    infer_labels_with(corpus, task, Execution::default())
}

pub fn infer_labels_with(
    corpus: &Corpus,
    task: &TaskConfig,
    exec: Execution,
) -> Result<Vec<String>, TaskError> {
    let per_utterance: Vec<BTreeSet<String>> = match task.task_type {
        TaskType::Seq | TaskType::SeqBio => {
            let column = task.output_index.ok_or_else(|| TaskError::NotApplicable {
                title: task.title.clone(),
                message: "word-level task has no output column".into(),
            })?;
            if corpus.token_count() > 0 && corpus.max_width() < column {
                return Err(TaskError::ColumnAbsent {
                    title: task.title.clone(),
                    column,
                });
            }
            let bio = task.task_type == TaskType::SeqBio;
            exec.map(&corpus.utterances, |u| column_labels(u, column, bio))
        }
        TaskType::Class => exec.map(&corpus.utterances, |u| {
            u.metadata(&task.title)
                .filter(|v| !v.is_empty())
                .map(str::to_string)
                .into_iter()
                .collect()
        }),
        TaskType::Seq2Seq => {
            return Err(TaskError::NotApplicable {
                title: task.title.clone(),
                message: "seq2seq tasks have no label inventory".into(),
            })
        }
    };
    let merged: BTreeSet<String> = per_utterance.into_iter().flatten().collect();
    Ok(merged.into_iter().collect())
}

fn column_labels(utt: &Utterance, column: usize, bio: bool) -> BTreeSet<String> {
    utt.tokens
        .iter()
        .filter_map(|t| t.get(column))
        .filter(|cell| !cell.is_empty())
        .filter_map(|cell| {
            if bio {
                bio::parse_tag(cell).entity().map(str::to_string)
            } else {
                Some(cell.to_string())
            }
        })
        .collect()
}

/// Cross-checks tasks against a corpus. `Error` findings make
/// [`crate::engine::Session::open`] refuse the pair.
pub fn validate_tasks(corpus: &Corpus, tasks: &TaskSet) -> Vec<Diagnostic> {
    validate_tasks_with(corpus, tasks, Execution::default())
}

pub fn validate_tasks_with(corpus: &Corpus, tasks: &TaskSet, exec: Execution) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let has_tokens = corpus.token_count() > 0;
    let width = corpus.max_width();

    let word_level: Vec<&TaskConfig> = tasks
        .iter()
        .filter(|t| t.task_type.is_word_level())
        .collect();
    for (i, a) in word_level.iter().enumerate() {
        let column = a.output_index.unwrap_or(0);
        if let Some(b) = word_level[..i]
            .iter()
            .find(|b| b.output_index == a.output_index)
        {
            out.push(
                Diagnostic::error(format!(
                    "output column {column} is also the output of task {:?}",
                    b.title
                ))
                .for_task(&a.title),
            );
        }
        if let Some(b) = tasks.iter().find(|b| b.input_index == column) {
            out.push(
                Diagnostic::error(format!(
                    "output column {column} is the input column of task {:?}",
                    b.title
                ))
                .for_task(&a.title),
            );
        }
    }

    for task in tasks {
        if has_tokens && task.input_index > width {
            out.push(
                Diagnostic::error(format!("input column {} absent", task.input_index))
                    .for_task(&task.title),
            );
        }
    }

    // Absent output columns are fine when they extend the corpus without
    // gaps, since opening a session creates them.
    let mut missing: Vec<&TaskConfig> = word_level
        .iter()
        .copied()
        .filter(|t| has_tokens && t.output_index.is_some_and(|o| o > width))
        .collect();
    missing.sort_by_key(|t| t.output_index);
    missing.dedup_by_key(|t| t.output_index);
    for (k, task) in missing.iter().enumerate() {
        let column = task.output_index.unwrap_or(0);
        if column == width + k + 1 {
            out.push(
                Diagnostic::warning(format!("output column {column} absent; it will be created"))
                    .for_task(&task.title),
            );
        } else {
            out.push(
                Diagnostic::error(format!(
                    "output column {column} absent and not adjacent to the corpus's {width} column(s)"
                ))
                .for_task(&task.title),
            );
        }
    }

    for task in tasks {
        let key = status_key(&task.title);
        let bad = exec.map_indexed(&corpus.utterances, |i, u| {
            let mut found = Vec::new();
            if let Some(v) = u.metadata(&key) {
                if Status::parse(v).is_none() {
                    found.push(
                        Diagnostic::error(format!("invalid status value {v:?}"))
                            .at_utterance(i)
                            .for_task(&task.title),
                    );
                }
            }
            if task.task_type == TaskType::SeqBio {
                if let Some(col) = task.output_index {
                    let malformed = u
                        .tokens
                        .iter()
                        .filter_map(|t| t.get(col))
                        .filter(|cell| matches!(bio::parse_tag(cell), bio::Tag::Malformed))
                        .count();
                    if malformed > 0 {
                        found.push(
                            Diagnostic::warning(format!(
                                "{malformed} malformed BIO tag(s) in column {col}"
                            ))
                            .at_utterance(i)
                            .for_task(&task.title),
                        );
                    }
                }
            }
            found
        });
        out.extend(bad.into_iter().flatten());

        if task.task_type == TaskType::Seq2Seq {
            continue;
        }
        if let Ok(found) = infer_labels_with(corpus, task, exec) {
            let unknown: Vec<String> = found
                .into_iter()
                .filter(|l| !task.accepts_label(l))
                .collect();
            if !unknown.is_empty() {
                out.push(
                    Diagnostic::warning(format!(
                        "labels in data but not configured: {}",
                        unknown.join(", ")
                    ))
                    .for_task(&task.title),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conll::parse_corpus;

    const CONFIG: &str = r#"[{"title":"NER",
  "type":
   {"name":"seq_bio",
    "isWordLevel":true},
  "output_index":"4",
  "input_index":"1",
  "labels":["LOC","MISC","ORG","PER"],
  "id":0}]"#;

    const SAMPLE: &str = "# sent_id = gameboy-1\n# intent = inform\n1\tWhat\tPRON\tO\n2\t?\tPUNCT\tO\n3\tEevee\tPROPN\tB-MISC\n4\tis\tAUX\tO\n5\tevolving\tVERB\tO\n6\t!\tPUNCT\tO\n\n# sent_id = gary-1\n# intent = goodbye\n1\tSmell\tVERB\tO\n2\tya\tPRON\tO\n3\tlater\tADV\tO\n4\t!\tPUNCT\tO\n";

    #[test]
    fn parses_reference_config() {
        let ts = parse_config(CONFIG).unwrap();
        assert_eq!(ts.len(), 1);
        let t = &ts.tasks()[0];
        assert_eq!(t.title, "NER");
        assert_eq!(t.task_type, TaskType::SeqBio);
        assert!(t.task_type.is_word_level());
        assert_eq!(t.output_index, Some(4));
        assert_eq!(t.input_index, 1);
        assert_eq!(t.labels, ["LOC", "MISC", "ORG", "PER"]);
        assert_eq!(t.id, 0);
        assert_eq!(t.default_label.as_deref(), Some("O"));
        assert_eq!(parse_config(&serialize_config(&ts)).unwrap(), ts);
    }

    #[test]
    fn empty_config() {
        assert!(parse_config("[]").unwrap().is_empty());
        assert_eq!(serialize_config(&TaskSet::default()), "[]");
    }

    #[test]
    fn duplicate_titles_and_ids() {
        let dup = r#"[{"title":"NER","type":"seq","input_index":1,"output_index":2,"id":0},
                      {"title":"NER","type":"seq","input_index":1,"output_index":3,"id":1}]"#;
        assert_eq!(
            parse_config(dup),
            Err(task_err(1, "duplicate title \"NER\""))
        );
        let dup = r#"[{"title":"A","type":"class","id":3},{"title":"B","type":"class","id":"3"}]"#;
        assert_eq!(parse_config(dup), Err(task_err(1, "duplicate id 3")));
    }

    #[test]
    fn field_errors_carry_position() {
        let e = parse_config(r#"[{"title":"a","type":"class"},{"type":"class"}]"#).unwrap_err();
        assert_eq!(e, task_err(1, "missing field \"title\""));
        let e = parse_config(r#"[{"title":"a","type":{"name":"tree"}}]"#).unwrap_err();
        assert_eq!(e, task_err(0, "unknown task type \"tree\""));
        let e = parse_config(r#"[{"title":"a","type":"seq","input_index":1}]"#).unwrap_err();
        assert_eq!(e, task_err(0, "missing field \"output_index\""));
        assert_eq!(parse_config("{}"), Err(TaskError::NotAnArray));
        assert!(matches!(parse_config("[{"), Err(TaskError::Json(_))));
    }

    #[test]
    fn unknown_fields_warn_and_alias_accepted() {
        let (ts, warnings) = parse_config_with_warnings(
            r#"[{"title":"E","type":{"name":"span","isWordLevel":false},"input_index":2,"output_index":5,"labels":["PER"],"colour":"red"}]"#,
        )
        .unwrap();
        assert_eq!(ts.tasks()[0].task_type, TaskType::SeqBio);
        assert_eq!(ts.tasks()[0].id, 0);
        assert_eq!(warnings.len(), 2);
        assert!(serialize_config(&ts).contains("\"seq_bio\""));
    }

    #[test]
    fn invariant_violations() {
        let bad = [
            r#"[{"title":"c","type":"class","output_index":3}]"#,
            r#"[{"title":"s","type":"seq2seq","labels":["x"]}]"#,
            r#"[{"title":"s","type":"seq","input_index":2,"output_index":2}]"#,
            r#"[{"title":"s","type":"seq","input_index":1,"output_index":2,"labels":["a","a"]}]"#,
            r#"[{"title":"b","type":"seq_bio","input_index":1,"output_index":2,"labels":["O"]}]"#,
            r#"[{"title":"status:x","type":"class"}]"#,
            r#"[{"title":"a = b","type":"class"}]"#,
            r#"[{"title":"","type":"class"}]"#,
        ];
        for text in bad {
            assert!(parse_config(text).is_err(), "{text}");
        }
    }

    #[test]
    fn infer_from_sample() {
        let c = parse_corpus(SAMPLE).unwrap();
        let ner = TaskConfig::new("NER", TaskType::SeqBio, 0).with_columns(2, Some(4));
        assert_eq!(infer_labels(&c, &ner).unwrap(), ["MISC"]);
        let pos = TaskConfig::new("POS", TaskType::Seq, 1).with_columns(2, Some(3));
        assert_eq!(
            infer_labels(&c, &pos).unwrap(),
            ["ADV", "AUX", "PRON", "PROPN", "PUNCT", "VERB"]
        );
        let intent = TaskConfig::new("intent", TaskType::Class, 2);
        assert_eq!(infer_labels(&c, &intent).unwrap(), ["goodbye", "inform"]);
        let far = TaskConfig::new("far", TaskType::Seq, 3).with_columns(1, Some(9));
        assert!(matches!(
            infer_labels(&c, &far),
            Err(TaskError::ColumnAbsent { column: 9, .. })
        ));
        let a = infer_labels(&c, &pos).unwrap();
        assert_eq!(a, infer_labels(&c, &pos).unwrap());
    }

    #[test]
    fn validation_against_sample() {
        let c = parse_corpus(SAMPLE).unwrap();
        let ts = parse_config(CONFIG).unwrap();
        assert_eq!(validate_tasks(&c, &ts), Vec::new());
    }

    #[test]
    fn validation_findings() {
        let c = parse_corpus("a\tb\tO\tMISC\nc\td\tO\tB-PER\n").unwrap();
        let ts = TaskSet::new(vec![TaskConfig::new("NER", TaskType::SeqBio, 0)
            .with_columns(1, Some(4))
            .with_labels(["PER"])])
        .unwrap();
        let d = validate_tasks(&c, &ts);
        assert_eq!(d.len(), 1, "{d:?}");
        assert!(d[0].message.contains("malformed"));

        let ts = TaskSet::new(vec![
            TaskConfig::new("X", TaskType::Seq, 0).with_columns(1, Some(9))
        ])
        .unwrap();
        let d = validate_tasks(&c, &ts);
        assert!(d
            .iter()
            .any(|d| d.is_error() && d.message.contains("output column 9")));

        let ts = TaskSet::new(vec![
            TaskConfig::new("X", TaskType::Seq, 0).with_columns(1, Some(5))
        ])
        .unwrap();
        let d = validate_tasks(&c, &ts);
        assert!(d.iter().all(|d| !d.is_error()), "{d:?}");

        let ts = TaskSet::new(vec![TaskConfig::new("POS", TaskType::Seq, 0)
            .with_columns(1, Some(3))
            .with_labels(["N"])])
        .unwrap();
        let d = validate_tasks(&c, &ts);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("not configured: O"));
    }
}
