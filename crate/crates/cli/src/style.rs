use std::io::IsTerminal;

use annot_core::{Diagnostic, Severity};

/// ANSI coloring for terminal output. Off when stdout is not a terminal or
/// `ANNOT_NO_COLOR` is set to anything.
#[derive(Debug, Clone, Copy)]
pub struct Style {
    color: bool,
}

impl Style {
    pub fn detect() -> Style {
        let color = std::env::var_os("ANNOT_NO_COLOR").is_none() && std::io::stdout().is_terminal();
        Style { color }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn error(&self, text: &str) -> String {
        self.paint("1;31", text)
    }

    pub fn warning(&self, text: &str) -> String {
        self.paint("1;33", text)
    }

    pub fn note(&self, text: &str) -> String {
        self.paint("36", text)
    }

    pub fn diagnostic(&self, d: &Diagnostic) -> String {
        let line = d.to_string();
        match d.severity {
            Severity::Error => self.error(&line),
            Severity::Warning => self.warning(&line),
        }
    }
}
