use std::fmt;

use serde::Serialize;

/// How serious a [`Diagnostic`] is. Only errors block opening a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// A finding from corpus or task validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// 0-based utterance index, when the finding is local to one utterance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utterance: Option<usize>,
    /// Title of the task the finding concerns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn warning(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            utterance: None,
            task: None,
            message: message.into(),
        }
    }

    pub fn error(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            ..Diagnostic::warning(message)
        }
    }

    pub fn at_utterance(mut self, index: usize) -> Self {
        self.utterance = Some(index);
        self
    }

    pub fn for_task(mut self, title: impl Into<String>) -> Self {
        self.task = Some(title.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Warning => f.write_str("warning")?,
            Severity::Error => f.write_str("error")?,
        }
        if let Some(task) = &self.task {
            write!(f, " [{task}]")?;
        }
        if let Some(u) = self.utterance {
            write!(f, " utterance {u}")?;
        }
        write!(f, ": {}", self.message)
    }
}
