use super::ConvertError;
use crate::conll::{Corpus, Token, Utterance};

/// Whitespace-tokenized raw text: blank lines separate utterances, every
/// token becomes a one-column row.
pub fn import_raw_text(text: &str) -> Result<Corpus, ConvertError> {
    let mut utterances = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                utterances.push(Utterance::new(std::mem::take(&mut current)));
            }
            continue;
        }
        for word in line.split_whitespace() {
            let token = Token::new([word]).map_err(|source| ConvertError::RawText {
                line: i + 1,
                source,
            })?;
            current.push(token);
        }
    }
    if !current.is_empty() {
        utterances.push(Utterance::new(current));
    }
    Ok(Corpus::new(utterances))
}
