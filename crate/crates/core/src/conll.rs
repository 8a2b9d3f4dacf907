//! Comment-bearing tab-separated corpora.
//!
//! One token per line, columns separated by a single TAB, `#`-prefixed
//! comment lines above the tokens of an utterance, and blank lines between
//! utterances:
//!
//! ```text
//! # sent_id = gary-1
//! # intent = goodbye
//! 1	Smell	VERB	O
//! 2	ya	PRON	O
//! ```
//!
//! Parsing is tolerant (CRLF, repeated blank lines, ragged rows, `#x`
//! comments without the space) and serialization is canonical, so
//! `parse_corpus(&serialize_corpus(&c)) == c` holds for every corpus.

// the example above needs real tabs
#![allow(clippy::tabs_in_doc_comments)]

use std::collections::HashSet;

use thiserror::Error;

use crate::diag::Diagnostic;
use crate::par::Execution;

const METADATA_SEP: &str = " = ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConllError {
    #[error("line {line}: comment line after token lines in the same utterance")]
    CommentAfterTokens { line: usize },
    #[error("invalid token: {0}")]
    InvalidToken(String),
    #[error("invalid comment: {0}")]
    InvalidComment(String),
    #[error("invalid metadata: {0}")]
    InvalidMetadata(String),
    #[error("no such column: {0}")]
    NoSuchColumn(usize),
    #[error("removing column {0} would leave a token without columns")]
    EmptyToken(usize),
}

fn check_cell(value: &str) -> Result<(), ConllError> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(ConllError::InvalidToken(format!(
            "cell {value:?} contains a tab or line break"
        )));
    }
    Ok(())
}

/// One token row. Column 1 is conventionally the id or the word form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    columns: Vec<String>,
}

impl Token {
    /// Builds a token, rejecting rows the file format cannot represent: no
    /// columns, tabs or line breaks inside a cell, a first cell starting
    /// with `#` (it would read back as a comment), or a row that serializes
    /// to a blank line.
    pub fn new<I, S>(columns: I) -> Result<Token, ConllError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let token = Token {
            columns: columns.into_iter().map(Into::into).collect(),
        };
        token.check()?;
        Ok(token)
    }

    fn check(&self) -> Result<(), ConllError> {
        let first = self
            .columns
            .first()
            .ok_or_else(|| ConllError::InvalidToken("token has no columns".into()))?;
        for cell in &self.columns {
            check_cell(cell)?;
        }
        if first.starts_with('#') {
            return Err(ConllError::InvalidToken(format!(
                "first cell {first:?} starts with '#'"
            )));
        }
        if self.columns.iter().all(|c| c.trim().is_empty()) {
            return Err(ConllError::InvalidToken("token row would be blank".into()));
        }
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// The cell at a 1-based column index.
    pub fn get(&self, column: usize) -> Option<&str> {
        column
            .checked_sub(1)
            .and_then(|i| self.columns.get(i))
            .map(String::as_str)
    }

    /// Writes the cell at a 1-based column index, padding with empty cells
    /// when the row is narrower. The token is left unchanged on error.
    pub fn set(&mut self, column: usize, value: impl Into<String>) -> Result<(), ConllError> {
        if column == 0 {
            return Err(ConllError::NoSuchColumn(0));
        }
        let mut next = self.clone();
        if next.columns.len() < column {
            next.columns.resize(column, String::new());
        }
        next.columns[column - 1] = value.into();
        next.check()?;
        *self = next;
        Ok(())
    }

    fn pad_to(&mut self, width: usize, fill: &str) {
        while self.columns.len() < width {
            self.columns.push(fill.to_string());
        }
    }

    fn line(&self) -> String {
        self.columns.join("\t")
    }
}

/// A comment line without its `# ` prefix. Comments of the form
/// `key = value` (split on the first ` = `) also expose a metadata view.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommentLine {
    raw: String,
    split: Option<usize>,
}

impl CommentLine {
    pub fn new(raw: impl Into<String>) -> Result<CommentLine, ConllError> {
        let raw = raw.into();
        if raw.contains(['\n', '\r']) {
            return Err(ConllError::InvalidComment(format!(
                "{raw:?} contains a line break"
            )));
        }
        let split = raw.find(METADATA_SEP).filter(|&at| at > 0);
        Ok(CommentLine { raw, split })
    }

    /// A `key = value` comment. Fails unless reading the line back yields
    /// exactly this key and value.
    pub fn metadata(key: &str, value: &str) -> Result<CommentLine, ConllError> {
        if key.is_empty() {
            return Err(ConllError::InvalidMetadata("empty key".into()));
        }
        if key.contains(METADATA_SEP) || key.contains(['\n', '\r']) {
            return Err(ConllError::InvalidMetadata(format!(
                "key {key:?} contains ' = ' or a line break"
            )));
        }
        if value.contains(['\n', '\r']) {
            return Err(ConllError::InvalidMetadata(format!(
                "value {value:?} contains a line break"
            )));
        }
        let line = CommentLine::new(format!("{key}{METADATA_SEP}{value}"))?;
        if line.key() != Some(key) {
            // e.g. a key ending in " =" shifts the first separator
            return Err(ConllError::InvalidMetadata(format!(
                "key {key:?} does not read back unambiguously"
            )));
        }
        Ok(line)
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn key(&self) -> Option<&str> {
        self.split.map(|at| &self.raw[..at])
    }

    pub fn value(&self) -> Option<&str> {
        self.split.map(|at| &self.raw[at + METADATA_SEP.len()..])
    }
}

/// Comment lines plus token rows, delimited by blank lines in a file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Utterance {
    pub comments: Vec<CommentLine>,
    pub tokens: Vec<Token>,
}

impl Utterance {
    pub fn new(tokens: Vec<Token>) -> Utterance {
        Utterance {
            comments: Vec::new(),
            tokens,
        }
    }

    /// Value of the first comment whose metadata key is `key`.
    pub fn metadata(&self, key: &str) -> Option<&str> {
        self.comments
            .iter()
            .find(|c| c.key() == Some(key))
            .and_then(CommentLine::value)
    }

    /// Iterates `(key, value)` over metadata comments in file order.
    pub fn metadata_entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.comments
            .iter()
            .filter_map(|c| Some((c.key()?, c.value()?)))
    }

    /// Overwrites the first comment carrying `key` (dropping any later
    /// duplicates) or appends a new one.
    pub fn set_metadata(&mut self, key: &str, value: &str) -> Result<(), ConllError> {
        let line = CommentLine::metadata(key, value)?;
        match self.comments.iter().position(|c| c.key() == Some(key)) {
            Some(first) => {
                self.comments[first] = line;
                let mut seen = false;
                self.comments.retain(|c| {
                    if c.key() != Some(key) {
                        return true;
                    }
                    let keep = !seen;
                    seen = true;
                    keep
                });
            }
            None => self.comments.push(line),
        }
        Ok(())
    }

    /// Removes every comment carrying `key`, returning the first value.
    pub fn remove_metadata(&mut self, key: &str) -> Option<String> {
        let removed = self.metadata(key).map(str::to_string);
        self.comments.retain(|c| c.key() != Some(key));
        removed
    }

    pub fn max_width(&self) -> usize {
        self.tokens.iter().map(Token::width).max().unwrap_or(0)
    }

    /// Cells of a 1-based column, with `""` for tokens lacking it.
    pub fn column(&self, column: usize) -> Vec<&str> {
        self.tokens
            .iter()
            .map(|t| t.get(column).unwrap_or(""))
            .collect()
    }

    fn write_into(&self, out: &mut String) {
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(&c.raw);
            out.push('\n');
        }
        for t in &self.tokens {
            out.push_str(&t.line());
            out.push('\n');
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub utterances: Vec<Utterance>,
}

impl Corpus {
    pub fn new(utterances: Vec<Utterance>) -> Corpus {
        Corpus { utterances }
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.utterances.iter().map(|u| u.tokens.len()).sum()
    }

    pub fn max_width(&self) -> usize {
        self.utterances
            .iter()
            .map(Utterance::max_width)
            .max()
            .unwrap_or(0)
    }

    fn tokens_mut(&mut self) -> impl Iterator<Item = &mut Token> {
        self.utterances.iter_mut().flat_map(|u| u.tokens.iter_mut())
    }

    /// Appends a column filled with `fill` to every token and returns its
    /// 1-based index. Narrower tokens are first padded with `fill` so that
    /// the new column sits at the same index everywhere.
    pub fn add_column(&mut self, fill: &str) -> Result<usize, ConllError> {
        check_cell(fill)?;
        let index = self.max_width() + 1;
        for token in self.tokens_mut() {
            token.pad_to(index, fill);
        }
        Ok(index)
    }

    /// Deletes a 1-based column from every token that has it. Nothing is
    /// modified on error; a corpus without tokens accepts any index.
    pub fn remove_column(&mut self, column: usize) -> Result<(), ConllError> {
        if column == 0 || (column > self.max_width() && self.token_count() > 0) {
            return Err(ConllError::NoSuchColumn(column));
        }
        let mut next = self.clone();
        for token in next.tokens_mut() {
            if token.columns.len() >= column {
                if token.columns.len() == 1 {
                    return Err(ConllError::EmptyToken(column));
                }
                token.columns.remove(column - 1);
                token.check()?;
            }
        }
        *self = next;
        Ok(())
    }
}

/// Parses a whole file. Blocks between blank lines are parsed
/// independently, in parallel when the feature is enabled.
pub fn parse_corpus(text: &str) -> Result<Corpus, ConllError> {
    parse_corpus_with(text, Execution::default())
}

pub fn parse_corpus_with(text: &str, exec: Execution) -> Result<Corpus, ConllError> {
    let blocks = split_blocks(text);
    let utterances = exec.try_map_indexed(&blocks, |_, block| parse_block(block))?;
    Ok(Corpus { utterances })
}

struct Block<'a> {
    first_line: usize,
    lines: Vec<&'a str>,
}

fn split_blocks(text: &str) -> Vec<Block<'_>> {
    let mut blocks = Vec::new();
    let mut current: Option<Block<'_>> = None;
    for (i, line) in text.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            blocks.extend(current.take());
            continue;
        }
        current
            .get_or_insert_with(|| Block {
                first_line: i + 1,
                lines: Vec::new(),
            })
            .lines
            .push(line);
    }
    blocks.extend(current);
    blocks
}

fn parse_block(block: &Block<'_>) -> Result<Utterance, ConllError> {
    let mut utt = Utterance::default();
    for (offset, line) in block.lines.iter().enumerate() {
        if let Some(rest) = line.strip_prefix('#') {
            if !utt.tokens.is_empty() {
                return Err(ConllError::CommentAfterTokens {
                    line: block.first_line + offset,
                });
            }
            let raw = rest.strip_prefix(' ').unwrap_or(rest);
            utt.comments.push(CommentLine::new(raw)?);
        } else {
            // split never yields zero pieces, and a '#' first cell or a
            // blank row cannot reach here
            utt.tokens.push(Token {
                columns: line.split('\t').map(str::to_string).collect(),
            });
        }
    }
    Ok(utt)
}

/// Canonical text: `# raw` comments, TAB-joined rows, one blank line
/// between utterances, a single trailing newline (empty corpus → `""`).
pub fn serialize_corpus(corpus: &Corpus) -> String {
    serialize_corpus_with(corpus, Execution::default())
}

pub fn serialize_corpus_with(corpus: &Corpus, exec: Execution) -> String {
    let parts = exec.map(&corpus.utterances, |u| {
        let mut s = String::new();
        u.write_into(&mut s);
        s
    });
    let mut out = String::with_capacity(parts.iter().map(|p| p.len() + 1).sum());
    for part in parts.iter().filter(|p| !p.is_empty()) {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(part);
    }
    out
}

/// Structural warnings: ragged rows, duplicate metadata keys, token-less
/// utterances. Never mutates.
pub fn validate_corpus(corpus: &Corpus) -> Vec<Diagnostic> {
    validate_corpus_with(corpus, &[], Execution::default())
}

/// [`validate_corpus`] that additionally reports empty cells in the given
/// 1-based output columns.
pub fn validate_corpus_with(
    corpus: &Corpus,
    output_columns: &[usize],
    exec: Execution,
) -> Vec<Diagnostic> {
    exec.map_indexed(&corpus.utterances, |i, u| {
        validate_utterance(i, u, output_columns)
    })
    .into_iter()
    .flatten()
    .collect()
}

fn validate_utterance(index: usize, utt: &Utterance, output_columns: &[usize]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if utt.tokens.is_empty() {
        out.push(Diagnostic::warning("utterance has no token rows").at_utterance(index));
    }
    let min = utt.tokens.iter().map(Token::width).min().unwrap_or(0);
    let max = utt.max_width();
    if min != max {
        out.push(
            Diagnostic::warning(format!(
                "ragged column counts: rows have {min} to {max} columns"
            ))
            .at_utterance(index),
        );
    }
    let mut seen = HashSet::new();
    let mut reported = HashSet::new();
    for (key, _) in utt.metadata_entries() {
        if !seen.insert(key) && reported.insert(key) {
            out.push(
                Diagnostic::warning(format!("duplicate metadata key {key:?}")).at_utterance(index),
            );
        }
    }
    for &col in output_columns {
        let empty = utt
            .tokens
            .iter()
            .filter(|t| t.get(col).is_none_or(str::is_empty))
            .count();
        if empty > 0 {
            out.push(
                Diagnostic::warning(format!("{empty} empty cell(s) in column {col}"))
                    .at_utterance(index),
            );
        }
    }
    out
}
