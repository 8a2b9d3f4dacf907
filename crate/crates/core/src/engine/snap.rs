//! Snapping character selections to whole tokens.
//!
//! Offsets count Unicode scalar values (Rust `char`s), not bytes.

use super::EngineError;
use crate::conll::Utterance;
use crate::task::TaskConfig;

/// Input-column cells joined by single spaces.
pub fn display_text(utt: &Utterance, task: &TaskConfig) -> String {
    utt.column(task.input_index).join(" ")
}

/// Half-open char extents of `forms` within their space-joined text.
pub fn token_extents<S: AsRef<str>>(forms: &[S]) -> Vec<(usize, usize)> {
    let mut at = 0;
    forms
        .iter()
        .map(|f| {
            let start = at;
            let end = start + f.as_ref().chars().count();
            at = end + 1;
            (start, end)
        })
        .collect()
}

/// The minimal token range `[first, last)` covering `[start, end)`.
///
/// A token is covered when the selection shares a character with it; an
/// empty token counts when its position lies inside the selection. A
/// zero-width selection picks the token it sits in. Selections touching no
/// token (only separators, or a caret between tokens) move to the next
/// token, or the last one at the end of the text. Returns `None` only when
/// there are no tokens.
pub fn snap_to_extents(
    extents: &[(usize, usize)],
    start: usize,
    end: usize,
) -> Option<(usize, usize)> {
    if extents.is_empty() {
        return None;
    }
    let covered = |&(s, e): &(usize, usize)| {
        if start == end {
            s <= start && start < e
        } else if s == e {
            start <= s && s < end
        } else {
            s < end && start < e
        }
    };
    let first = extents.iter().position(covered);
    let last = extents.iter().rposition(covered);
    if let (Some(first), Some(last)) = (first, last) {
        return Some((first, last + 1));
    }
    let next = extents
        .iter()
        .position(|&(s, _)| s >= start)
        .unwrap_or(extents.len() - 1);
    Some((next, next + 1))
}

/// Snaps a selection over the display text of `utt` to a token range.
pub fn snap_selection(
    utt: &Utterance,
    task: &TaskConfig,
    char_start: usize,
    char_end: usize,
) -> Result<(usize, usize), EngineError> {
    let forms = utt.column(task.input_index);
    let extents = token_extents(&forms);
    let len = extents.last().map_or(0, |&(_, e)| e);
    if char_start > char_end || char_end > len {
        return Err(EngineError::OffsetOutOfRange {
            start: char_start,
            end: char_end,
            len,
        });
    }
    snap_to_extents(&extents, char_start, char_end).ok_or(EngineError::NoTokens)
}

/// Char extent of a token range, the inverse view of [`snap_to_extents`].
pub fn range_extent(extents: &[(usize, usize)], range: (usize, usize)) -> (usize, usize) {
    (extents[range.0].0, extents[range.1 - 1].1)
}
