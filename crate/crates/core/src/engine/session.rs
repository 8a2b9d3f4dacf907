use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::bio::{bio_decode, bio_encode, Span};
use super::{snap, status_key, EngineError, STATUS_KEY_PREFIX};
use crate::conll::{serialize_corpus, Corpus, Utterance};
use crate::task::{validate_tasks, TaskConfig, TaskSet, TaskType, OUTSIDE};

pub const DEFAULT_EXPORT_BASE: &str = "annotations";

/// Annotator verdict for one task on one utterance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Completed,
    Wrong,
    Unsure,
    #[default]
    Cleared,
}

impl Status {
    /// Parses a persisted value. `cleared` is never persisted, so it is
    /// not accepted here.
    pub fn parse(value: &str) -> Option<Status> {
        match value {
            "completed" => Some(Status::Completed),
            "wrong" => Some(Status::Wrong),
            "unsure" => Some(Status::Unsure),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Completed => "completed",
            Status::Wrong => "wrong",
            Status::Unsure => "unsure",
            Status::Cleared => "cleared",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-status utterance counts for one task.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub completed: usize,
    pub wrong: usize,
    pub unsure: usize,
    pub cleared: usize,
}

impl Progress {
    pub fn total(&self) -> usize {
        self.completed + self.wrong + self.unsure + self.cleared
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportOptions {
    pub base_name: String,
    /// Drops every `status:` metadata line.
    pub clean: bool,
    /// Appended to the file name as `_YYYY-MM-DDTHH-MM-SS` when set.
    pub timestamp: Option<NaiveDateTime>,
}

impl Default for ExportOptions {
    fn default() -> Self {
        ExportOptions {
            base_name: DEFAULT_EXPORT_BASE.to_string(),
            clean: false,
            timestamp: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Export {
    pub file_name: String,
    pub text: String,
}

/// Mutable annotation state over a corpus and its tasks.
///
/// Statuses live beside the corpus while the session is open and are
/// written back as `# status:<title> = <status>` lines on export.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    corpus: Corpus,
    tasks: TaskSet,
    cursor: Option<usize>,
    active_task: Option<u64>,
    statuses: BTreeMap<(usize, u64), Status>,
}

impl Session {
    /// Opens a session, creating absent output columns (filled with each
    /// task's default label) and lifting persisted statuses out of the
    /// utterance metadata.
    pub fn open(mut corpus: Corpus, tasks: TaskSet) -> Result<Session, EngineError> {
        let fatal: Vec<_> = validate_tasks(&corpus, &tasks)
            .into_iter()
            .filter(|d| d.is_error())
            .collect();
        if !fatal.is_empty() {
            return Err(EngineError::Incompatible(fatal));
        }

        if corpus.token_count() > 0 {
            let mut word_level: Vec<&TaskConfig> = tasks
                .iter()
                .filter(|t| t.task_type.is_word_level())
                .collect();
            word_level.sort_by_key(|t| t.output_index);
            for task in word_level {
                let column = task.output_index.unwrap_or(0);
                if column > corpus.max_width() {
                    let fill = task.default_label.as_deref().unwrap_or("");
                    let created = corpus.add_column(fill)?;
                    debug_assert_eq!(created, column);
                }
            }
        }

        let mut statuses = BTreeMap::new();
        for (i, utt) in corpus.utterances.iter_mut().enumerate() {
            for task in &tasks {
                if let Some(value) = utt.remove_metadata(&status_key(&task.title)) {
                    // validate_tasks already rejected unknown values
                    if let Some(status) = Status::parse(&value) {
                        statuses.insert((i, task.id), status);
                    }
                }
            }
        }

        let cursor = (!corpus.is_empty()).then_some(0);
        let active_task = tasks.tasks().first().map(|t| t.id);
        Ok(Session {
            corpus,
            tasks,
            cursor,
            active_task,
            statuses,
        })
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn tasks(&self) -> &TaskSet {
        &self.tasks
    }

    pub fn cursor(&self) -> Option<usize> {
        self.cursor
    }

    pub fn active_task(&self) -> Option<u64> {
        self.active_task
    }

    pub fn task(&self, id: u64) -> Result<&TaskConfig, EngineError> {
        self.tasks.get(id).ok_or(EngineError::UnknownTask(id))
    }

    pub fn set_cursor(&mut self, index: usize) -> Result<(), EngineError> {
        self.utterance(index)?;
        self.cursor = Some(index);
        Ok(())
    }

    /// Moves the cursor by `delta`, clamping at both ends.
    pub fn move_cursor(&mut self, delta: isize) -> Option<usize> {
        let last = self.corpus.len().checked_sub(1)?;
        let current = self.cursor.unwrap_or(0);
        let next = current.saturating_add_signed(delta).min(last);
        self.cursor = Some(next);
        self.cursor
    }

    pub fn set_active_task(&mut self, id: u64) -> Result<(), EngineError> {
        self.task(id)?;
        self.active_task = Some(id);
        Ok(())
    }

    pub fn utterance(&self, index: usize) -> Result<&Utterance, EngineError> {
        self.corpus
            .utterances
            .get(index)
            .ok_or(EngineError::UtteranceOutOfRange(index))
    }

    fn typed_task(&self, id: u64, expected: TaskType) -> Result<TaskConfig, EngineError> {
        let task = self.task(id)?;
        if task.task_type != expected {
            return Err(EngineError::WrongTaskType {
                title: task.title.clone(),
                expected: expected.name(),
                actual: task.task_type,
            });
        }
        Ok(task.clone())
    }

    fn utterance_mut(&mut self, index: usize) -> Result<&mut Utterance, EngineError> {
        self.corpus
            .utterances
            .get_mut(index)
            .ok_or(EngineError::UtteranceOutOfRange(index))
    }

    /// Sets one token's label for a `seq` task.
    pub fn annotate_token(
        &mut self,
        utt_index: usize,
        token_index: usize,
        task_id: u64,
        label: &str,
    ) -> Result<(), EngineError> {
        let task = self.typed_task(task_id, TaskType::Seq)?;
        if !task.accepts_label(label) {
            return Err(unknown_label(&task, label));
        }
        let column = task.output_index.unwrap_or(0);
        let utt = self.utterance_mut(utt_index)?;
        let token = utt
            .tokens
            .get_mut(token_index)
            .ok_or(EngineError::TokenOutOfRange {
                utterance: utt_index,
                token: token_index,
            })?;
        token.set(column, label)?;
        Ok(())
    }

    /// Current spans of a `seq_bio` task in one utterance.
    pub fn spans(&self, utt_index: usize, task_id: u64) -> Result<Vec<Span>, EngineError> {
        let task = self.typed_task(task_id, TaskType::SeqBio)?;
        let utt = self.utterance(utt_index)?;
        Ok(bio_decode(&utt.column(task.output_index.unwrap_or(0))))
    }

    /// Writes a span over `[start, end)`, first removing every span that
    /// overlaps it. The label `O` only removes. The output column is
    /// rewritten in canonical BIO.
    pub fn annotate_span(
        &mut self,
        utt_index: usize,
        range: (usize, usize),
        task_id: u64,
        label: &str,
    ) -> Result<(), EngineError> {
        let task = self.typed_task(task_id, TaskType::SeqBio)?;
        if label != OUTSIDE && !task.labels.iter().any(|l| l == label) {
            return Err(unknown_label(&task, label));
        }
        let column = task.output_index.unwrap_or(0);
        let (start, end) = range;
        let utt = self.utterance_mut(utt_index)?;
        let n = utt.tokens.len();
        if start >= end || end > n {
            return Err(EngineError::InvalidSpan(format!(
                "range [{start}, {end}) outside 0..{n} or empty"
            )));
        }
        let mut spans = bio_decode(&utt.column(column));
        spans.retain(|s| !s.overlaps(start, end));
        if label != OUTSIDE {
            spans.push(Span::new(start, end, label));
        }
        let tags = bio_encode(&spans, n)?;
        let mut next = utt.tokens.clone();
        for (token, tag) in next.iter_mut().zip(tags) {
            token.set(column, tag)?;
        }
        utt.tokens = next;
        Ok(())
    }

    /// Stores a `class` label as `# <title> = <label>`.
    pub fn annotate_class(
        &mut self,
        utt_index: usize,
        task_id: u64,
        label: &str,
    ) -> Result<(), EngineError> {
        let task = self.typed_task(task_id, TaskType::Class)?;
        if !task.labels.iter().any(|l| l == label) {
            return Err(unknown_label(&task, label));
        }
        self.utterance_mut(utt_index)?
            .set_metadata(&task.title, label)?;
        Ok(())
    }

    /// Stores a `seq2seq` target as `# <title> = <text>`; empty text removes it.
    pub fn annotate_seq2seq(
        &mut self,
        utt_index: usize,
        task_id: u64,
        target: &str,
    ) -> Result<(), EngineError> {
        let task = self.typed_task(task_id, TaskType::Seq2Seq)?;
        if target.contains(['\n', '\r']) {
            return Err(EngineError::MultilineText);
        }
        let utt = self.utterance_mut(utt_index)?;
        if target.is_empty() {
            utt.remove_metadata(&task.title);
        } else {
            utt.set_metadata(&task.title, target)?;
        }
        Ok(())
    }

    /// Fills every empty output cell of a word-level task with its default
    /// label and returns how many cells changed.
    pub fn apply_default_label(&mut self, task_id: u64) -> Result<usize, EngineError> {
        let task = self.task(task_id)?.clone();
        if !task.task_type.is_word_level() {
            return Err(EngineError::WrongTaskType {
                title: task.title,
                expected: "word-level",
                actual: task.task_type,
            });
        }
        let default = task
            .default_label
            .clone()
            .ok_or_else(|| EngineError::NoDefaultLabel(task.title.clone()))?;
        let column = task.output_index.unwrap_or(0);
        let mut next = self.corpus.clone();
        let mut filled = 0;
        for token in next.utterances.iter_mut().flat_map(|u| u.tokens.iter_mut()) {
            if token.get(column).is_none_or(str::is_empty) {
                token.set(column, default.as_str())?;
                filled += 1;
            }
        }
        self.corpus = next;
        Ok(filled)
    }

    pub fn status(&self, utt_index: usize, task_id: u64) -> Status {
        self.statuses
            .get(&(utt_index, task_id))
            .copied()
            .unwrap_or_default()
    }

    pub fn set_status(
        &mut self,
        utt_index: usize,
        task_id: u64,
        status: Status,
    ) -> Result<(), EngineError> {
        self.utterance(utt_index)?;
        self.task(task_id)?;
        if status == Status::Cleared {
            self.statuses.remove(&(utt_index, task_id));
        } else {
            self.statuses.insert((utt_index, task_id), status);
        }
        Ok(())
    }

    pub fn progress(&self, task_id: u64) -> Result<Progress, EngineError> {
        self.task(task_id)?;
        let mut p = Progress::default();
        for (_, status) in self.statuses.iter().filter(|((_, t), _)| *t == task_id) {
            match status {
                Status::Completed => p.completed += 1,
                Status::Wrong => p.wrong += 1,
                Status::Unsure => p.unsure += 1,
                Status::Cleared => {}
            }
        }
        p.cleared = self.corpus.len() - p.completed - p.wrong - p.unsure;
        Ok(p)
    }

    /// Snaps a character selection over the task's display text.
    pub fn snap_selection(
        &self,
        utt_index: usize,
        task_id: u64,
        char_start: usize,
        char_end: usize,
    ) -> Result<(usize, usize), EngineError> {
        let task = self.task(task_id)?;
        snap::snap_selection(self.utterance(utt_index)?, task, char_start, char_end)
    }

    /// The corpus with statuses written back (or every status line
    /// stripped when `clean`), plus a `.conll` file name.
    pub fn export(&self, options: &ExportOptions) -> Result<Export, EngineError> {
        let mut corpus = self.corpus.clone();
        if options.clean {
            for utt in &mut corpus.utterances {
                utt.comments
                    .retain(|c| !c.key().is_some_and(|k| k.starts_with(STATUS_KEY_PREFIX)));
            }
        } else {
            for (i, utt) in corpus.utterances.iter_mut().enumerate() {
                for task in &self.tasks {
                    let status = self.status(i, task.id);
                    if status != Status::Cleared {
                        utt.set_metadata(&status_key(&task.title), status.as_str())?;
                    }
                }
            }
        }
        let suffix = options
            .timestamp
            .map(|t| format!("_{}", t.format("%Y-%m-%dT%H-%M-%S")))
            .unwrap_or_default();
        Ok(Export {
            file_name: format!("{}{suffix}.conll", options.base_name),
            text: serialize_corpus(&corpus),
        })
    }
}

fn unknown_label(task: &TaskConfig, label: &str) -> EngineError {
    EngineError::UnknownLabel {
        title: task.title.clone(),
        label: label.to_string(),
    }
}
