//! JSON request/reply boundary between an annotation front end and the
//! engine.
//!
//! A request is `{"op": "<name>", "args": {...}}`. Every request gets
//! exactly one reply, either `{"ok": true, "result": ...}` or
//! `{"ok": false, "error": {"code": "...", "message": "..."}}`.
//!
//! Setup operations (`parse_corpus`, `validate`, `infer_labels`, column
//! edits, ...) are stateless and take file contents as arguments. `open`
//! starts a session that the remaining operations act on. Replaying the
//! same request log against a fresh [`SessionHost`] yields the same
//! replies, including the exported text.

use chrono::NaiveDateTime;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::conll::{parse_corpus, serialize_corpus, validate_corpus_with, ConllError, Corpus};
use crate::convert::{import_raw_text, ConvertError};
use crate::engine::{
    annotation_mode, display_text, keyboard_map, label_search, EngineError, ExportOptions, Session,
    Status, DEFAULT_EXPORT_BASE,
};
use crate::par::Execution;
use crate::task::{
    infer_labels, parse_config, serialize_config, validate_tasks, TaskConfig, TaskError, TaskSet,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub op: String,
    #[serde(default)]
    pub args: Value,
}

impl Request {
    pub fn new(op: impl Into<String>, args: Value) -> Request {
        Request {
            op: op.into(),
            args,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reply {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
}

impl Reply {
    fn success(result: Value) -> Reply {
        Reply {
            ok: true,
            result: Some(result),
            error: None,
        }
    }

    fn failure(err: ProtocolError) -> Reply {
        Reply {
            ok: false,
            result: None,
            error: Some(ErrorBody {
                code: err.code.to_string(),
                message: err.message,
            }),
        }
    }
}

#[derive(Debug)]
struct ProtocolError {
    code: &'static str,
    message: String,
}

impl ProtocolError {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        ProtocolError {
            code,
            message: message.into(),
        }
    }
}

impl From<EngineError> for ProtocolError {
    fn from(e: EngineError) -> Self {
        let code = match &e {
            EngineError::OverlappingSpans(..) | EngineError::InvalidSpan(_) => "invalid_span",
            EngineError::OffsetOutOfRange { .. }
            | EngineError::UtteranceOutOfRange(_)
            | EngineError::TokenOutOfRange { .. } => "out_of_range",
            EngineError::NoTokens => "no_tokens",
            EngineError::UnknownTask(_) => "unknown_task",
            EngineError::WrongTaskType { .. } => "wrong_task_type",
            EngineError::UnknownLabel { .. } => "unknown_label",
            EngineError::NoDefaultLabel(_) => "no_default_label",
            EngineError::MultilineText => "invalid_text",
            EngineError::Incompatible(_) => "incompatible",
            EngineError::Conll(_) => "invalid_value",
        };
        ProtocolError::new(code, e.to_string())
    }
}

impl From<ConllError> for ProtocolError {
    fn from(e: ConllError) -> Self {
        ProtocolError::new("corpus_error", e.to_string())
    }
}

impl From<TaskError> for ProtocolError {
    fn from(e: TaskError) -> Self {
        ProtocolError::new("config_error", e.to_string())
    }
}

impl From<ConvertError> for ProtocolError {
    fn from(e: ConvertError) -> Self {
        ProtocolError::new("convert_error", e.to_string())
    }
}

type OpResult = Result<Value, ProtocolError>;

fn args<T: DeserializeOwned>(value: &Value) -> Result<T, ProtocolError> {
    let value = if value.is_null() {
        json!({})
    } else {
        value.clone()
    };
    serde_json::from_value(value).map_err(|e| ProtocolError::new("bad_request", e.to_string()))
}

fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("protocol values serialize")
}

#[derive(Deserialize)]
struct TextArg {
    text: String,
}

#[derive(Deserialize)]
struct OpenArgs {
    corpus: String,
    #[serde(default)]
    config: Option<String>,
}

#[derive(Deserialize)]
struct CorpusConfigArgs {
    corpus: String,
    config: String,
}

#[derive(Deserialize)]
struct InferArgs {
    corpus: String,
    config: String,
    task: u64,
}

#[derive(Deserialize)]
struct AddColumnArgs {
    corpus: String,
    #[serde(default)]
    fill: String,
}

#[derive(Deserialize)]
struct RemoveColumnArgs {
    corpus: String,
    column: usize,
}

#[derive(Deserialize)]
struct IndexArg {
    index: usize,
}

#[derive(Deserialize)]
struct OptIndexArg {
    #[serde(default)]
    index: Option<usize>,
}

#[derive(Deserialize)]
struct DeltaArg {
    delta: isize,
}

#[derive(Deserialize)]
struct TaskArg {
    task: u64,
}

#[derive(Deserialize)]
struct UtteranceTask {
    utterance: usize,
    task: u64,
}

#[derive(Deserialize)]
struct SnapArgs {
    utterance: usize,
    task: u64,
    start: usize,
    end: usize,
}

#[derive(Deserialize)]
struct TokenArgs {
    utterance: usize,
    token: usize,
    task: u64,
    label: String,
}

#[derive(Deserialize)]
struct SpanArgs {
    utterance: usize,
    start: usize,
    end: usize,
    task: u64,
    label: String,
}

#[derive(Deserialize)]
struct LabelArgs {
    utterance: usize,
    task: u64,
    label: String,
}

#[derive(Deserialize)]
struct TargetArgs {
    utterance: usize,
    task: u64,
    text: String,
}

#[derive(Deserialize)]
struct StatusArgs {
    utterance: usize,
    task: u64,
    status: Status,
}

#[derive(Deserialize)]
struct SearchArgs {
    task: u64,
    #[serde(default)]
    query: String,
}

#[derive(Deserialize)]
struct ExportArgs {
    #[serde(default)]
    clean: bool,
    /// `YYYY-MM-DDTHH:MM:SS`; the caller supplies its own clock.
    #[serde(default)]
    timestamp: Option<String>,
    #[serde(default)]
    base_name: Option<String>,
}

/// Holds at most one open [`Session`] and answers requests against it.
#[derive(Debug, Default)]
pub struct SessionHost {
    session: Option<Session>,
}

impl SessionHost {
    pub fn new() -> SessionHost {
        SessionHost::default()
    }

    /// A host with a session already open, e.g. one loaded from disk.
    pub fn with_session(session: Session) -> SessionHost {
        SessionHost {
            session: Some(session),
        }
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    /// Handles one request serialized as JSON and returns the reply as JSON.
    pub fn handle_json(&mut self, request: &str) -> String {
        let reply = match serde_json::from_str::<Request>(request) {
            Ok(req) => self.handle(&req),
            Err(e) => Reply::failure(ProtocolError::new("bad_request", e.to_string())),
        };
        serde_json::to_string(&reply).expect("replies serialize")
    }

    pub fn handle(&mut self, request: &Request) -> Reply {
        match self.dispatch(&request.op, &request.args) {
            Ok(v) => Reply::success(v),
            Err(e) => Reply::failure(e),
        }
    }

    /// Applies every request in order and collects the replies.
    pub fn replay<'a, I>(&mut self, requests: I) -> Vec<Reply>
    where
        I: IntoIterator<Item = &'a Request>,
    {
        requests.into_iter().map(|r| self.handle(r)).collect()
    }

    fn open_session(&self) -> Result<&Session, ProtocolError> {
        self.session
            .as_ref()
            .ok_or_else(|| ProtocolError::new("no_session", "no session is open"))
    }

    fn session_mut(&mut self) -> Result<&mut Session, ProtocolError> {
        self.session
            .as_mut()
            .ok_or_else(|| ProtocolError::new("no_session", "no session is open"))
    }

    fn dispatch(&mut self, op: &str, a: &Value) -> OpResult {
        match op {
            // setup, stateless
            "parse_corpus" => {
                let TextArg { text } = args(a)?;
                let corpus = parse_corpus(&text)?;
                Ok(corpus_summary(&corpus))
            }
            "import_raw_text" => {
                let TextArg { text } = args(a)?;
                let corpus = import_raw_text(&text)?;
                Ok(json!({ "corpus": serialize_corpus(&corpus) }))
            }
            "parse_config" => {
                let TextArg { text } = args(a)?;
                let tasks = parse_config(&text)?;
                Ok(tasks_value(&tasks))
            }
            "validate" => {
                let CorpusConfigArgs { corpus, config } = args(a)?;
                let corpus = parse_corpus(&corpus)?;
                let tasks = parse_config(&config)?;
                let columns: Vec<usize> = tasks.iter().filter_map(|t| t.output_index).collect();
                let mut diags = validate_corpus_with(&corpus, &columns, Execution::default());
                diags.extend(validate_tasks(&corpus, &tasks));
                Ok(to_value(diags))
            }
            "infer_labels" => {
                let InferArgs {
                    corpus,
                    config,
                    task,
                } = args(a)?;
                let corpus = parse_corpus(&corpus)?;
                let tasks = parse_config(&config)?;
                let task = tasks.get(task).ok_or(EngineError::UnknownTask(task))?;
                Ok(to_value(infer_labels(&corpus, task)?))
            }
            "add_column" => {
                let AddColumnArgs { corpus, fill } = args(a)?;
                let mut corpus = parse_corpus(&corpus)?;
                let column = corpus.add_column(&fill)?;
                Ok(json!({ "corpus": serialize_corpus(&corpus), "column": column }))
            }
            "remove_column" => {
                let RemoveColumnArgs { corpus, column } = args(a)?;
                let mut corpus = parse_corpus(&corpus)?;
                corpus.remove_column(column)?;
                Ok(json!({ "corpus": serialize_corpus(&corpus) }))
            }

            // session lifecycle and navigation
            "open" => {
                let OpenArgs { corpus, config } = args(a)?;
                let corpus = parse_corpus(&corpus)?;
                let tasks = match config {
                    Some(c) => parse_config(&c)?,
                    None => TaskSet::default(),
                };
                self.session = Some(Session::open(corpus, tasks)?);
                Ok(self.state()?)
            }
            "close" => {
                self.session = None;
                Ok(Value::Null)
            }
            "state" => self.state(),
            "utterance" => {
                let OptIndexArg { index } = args(a)?;
                let s = self.open_session()?;
                let index = index
                    .or(s.cursor())
                    .ok_or(EngineError::UtteranceOutOfRange(0))?;
                utterance_view(s, index)
            }
            "set_cursor" => {
                let IndexArg { index } = args(a)?;
                self.session_mut()?.set_cursor(index)?;
                self.state()
            }
            "move_cursor" => {
                let DeltaArg { delta } = args(a)?;
                self.session_mut()?.move_cursor(delta);
                self.state()
            }
            "set_active_task" => {
                let TaskArg { task } = args(a)?;
                self.session_mut()?.set_active_task(task)?;
                self.state()
            }

            // annotation
            "snap_selection" => {
                let SnapArgs {
                    utterance,
                    task,
                    start,
                    end,
                } = args(a)?;
                let (s, e) = self
                    .open_session()?
                    .snap_selection(utterance, task, start, end)?;
                Ok(json!({ "start": s, "end": e }))
            }
            "annotate_token" => {
                let TokenArgs {
                    utterance,
                    token,
                    task,
                    label,
                } = args(a)?;
                self.session_mut()?
                    .annotate_token(utterance, token, task, &label)?;
                utterance_view(self.open_session()?, utterance)
            }
            "annotate_span" => {
                let SpanArgs {
                    utterance,
                    start,
                    end,
                    task,
                    label,
                } = args(a)?;
                self.session_mut()?
                    .annotate_span(utterance, (start, end), task, &label)?;
                utterance_view(self.open_session()?, utterance)
            }
            "annotate_class" => {
                let LabelArgs {
                    utterance,
                    task,
                    label,
                } = args(a)?;
                self.session_mut()?
                    .annotate_class(utterance, task, &label)?;
                utterance_view(self.open_session()?, utterance)
            }
            "annotate_seq2seq" => {
                let TargetArgs {
                    utterance,
                    task,
                    text,
                } = args(a)?;
                self.session_mut()?
                    .annotate_seq2seq(utterance, task, &text)?;
                utterance_view(self.open_session()?, utterance)
            }
            "spans" => {
                let UtteranceTask { utterance, task } = args(a)?;
                Ok(to_value(self.open_session()?.spans(utterance, task)?))
            }
            "apply_default_label" => {
                let TaskArg { task } = args(a)?;
                let filled = self.session_mut()?.apply_default_label(task)?;
                Ok(json!({ "filled": filled }))
            }
            "set_status" => {
                let StatusArgs {
                    utterance,
                    task,
                    status,
                } = args(a)?;
                let s = self.session_mut()?;
                s.set_status(utterance, task, status)?;
                Ok(to_value(s.progress(task)?))
            }
            "progress" => {
                let TaskArg { task } = args(a)?;
                Ok(to_value(self.open_session()?.progress(task)?))
            }
            "label_search" => {
                let SearchArgs { task, query } = args(a)?;
                let task = self.open_session()?.task(task)?;
                Ok(to_value(label_search(task, &query)))
            }
            "annotation_mode" => {
                let TaskArg { task } = args(a)?;
                let task = self.open_session()?.task(task)?;
                Ok(mode_value(task))
            }
            "export" => {
                let ExportArgs {
                    clean,
                    timestamp,
                    base_name,
                } = args(a)?;
                let timestamp = timestamp
                    .map(|t| {
                        NaiveDateTime::parse_from_str(&t, "%Y-%m-%dT%H:%M:%S").map_err(|e| {
                            ProtocolError::new("bad_request", format!("timestamp {t:?}: {e}"))
                        })
                    })
                    .transpose()?;
                let options = ExportOptions {
                    base_name: base_name.unwrap_or_else(|| DEFAULT_EXPORT_BASE.to_string()),
                    clean,
                    timestamp,
                };
                Ok(to_value(self.open_session()?.export(&options)?))
            }
            "export_config" => {
                Ok(json!({ "config": serialize_config(self.open_session()?.tasks()) }))
            }
            other => Err(ProtocolError::new(
                "unknown_op",
                format!("unknown operation {other:?}"),
            )),
        }
    }

    fn state(&self) -> OpResult {
        let s = self.open_session()?;
        Ok(json!({
            "cursor": s.cursor(),
            "active_task": s.active_task(),
            "utterances": s.corpus().len(),
            "tasks": tasks_value(s.tasks()),
        }))
    }
}

fn corpus_summary(corpus: &Corpus) -> Value {
    let preview: Vec<Value> = corpus
        .utterances
        .iter()
        .map(|u| {
            json!({
                "comments": u.comments.iter().map(|c| c.raw()).collect::<Vec<_>>(),
                "rows": u.tokens.iter().map(|t| t.columns()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "utterances": corpus.len(),
        "tokens": corpus.token_count(),
        "columns": corpus.max_width(),
        "preview": preview,
    })
}

fn tasks_value(tasks: &TaskSet) -> Value {
    serde_json::from_str(&serialize_config(tasks)).expect("config output is JSON")
}

fn mode_value(task: &TaskConfig) -> Value {
    let keys: serde_json::Map<String, Value> = keyboard_map(task)
        .into_iter()
        .map(|(k, l)| (k.to_string(), json!(l)))
        .collect();
    json!({ "mode": annotation_mode(task), "keys": keys })
}

fn utterance_view(s: &Session, index: usize) -> OpResult {
    let utt = s.utterance(index)?;
    let mut tasks = serde_json::Map::new();
    for task in s.tasks() {
        tasks.insert(
            task.id.to_string(),
            json!({
                "status": s.status(index, task.id),
                "display_text": display_text(utt, task),
            }),
        );
    }
    Ok(json!({
        "index": index,
        "comments": utt.comments.iter().map(|c| c.raw()).collect::<Vec<_>>(),
        "rows": utt.tokens.iter().map(|t| t.columns()).collect::<Vec<_>>(),
        "tasks": tasks,
    }))
}
