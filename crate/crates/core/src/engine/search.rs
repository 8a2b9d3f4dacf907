use serde::Serialize;

use crate::task::TaskConfig;

/// Label tasks with at most this many labels are annotated by digit keys.
pub const KEYBOARD_LABEL_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationMode {
    Keyboard,
    Search,
}

pub fn annotation_mode(task: &TaskConfig) -> AnnotationMode {
    if task.labels.len() <= KEYBOARD_LABEL_LIMIT {
        AnnotationMode::Keyboard
    } else {
        AnnotationMode::Search
    }
}

/// Digit keys `1`..`9` then `0` for the first ten labels in config order.
/// Empty for tasks in search mode.
pub fn keyboard_map(task: &TaskConfig) -> Vec<(char, &str)> {
    if annotation_mode(task) == AnnotationMode::Search {
        return Vec::new();
    }
    "1234567890"
        .chars()
        .zip(task.labels.iter().map(String::as_str))
        .collect()
}

/// Case-insensitive label lookup. Prefix matches come before substring
/// matches, each group in config order. An empty query lists every label.
pub fn label_search<'a>(task: &'a TaskConfig, query: &str) -> Vec<&'a str> {
    let query = query.to_lowercase();
    let mut prefix = Vec::new();
    let mut infix = Vec::new();
    for label in &task.labels {
        let lower = label.to_lowercase();
        if lower.starts_with(&query) {
            prefix.push(label.as_str());
        } else if lower.contains(&query) {
            infix.push(label.as_str());
        }
    }
    prefix.extend(infix);
    prefix
}
