use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::ConvertError;
use crate::task::{TaskSet, TaskType};

/// A MaChAmp dataset configuration and the command that trains on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MachampExport {
    pub dataset: String,
    pub config_file_name: String,
    pub config: String,
    pub command: String,
}

fn machamp_task_type(t: TaskType) -> &'static str {
    match t {
        TaskType::Seq => "seq",
        TaskType::SeqBio => "seq_bio",
        TaskType::Class => "classification",
        TaskType::Seq2Seq => "seq2seq",
    }
}

fn dataset_name(data_path: &str) -> String {
    let stem = Path::new(data_path)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    let name: String = stem
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if name.is_empty() {
        "dataset".to_string()
    } else {
        name
    }
}

/// MaChAmp counts columns from 0, so every 1-based index shifts down by one.
pub fn export_machamp(tasks: &TaskSet, data_path: &str) -> Result<MachampExport, ConvertError> {
    let first = tasks.tasks().first().ok_or(ConvertError::NoTasks)?;

    let mut word_input: Option<usize> = None;
    for t in tasks.iter().filter(|t| t.task_type.is_word_level()) {
        match word_input {
            None => word_input = Some(t.input_index),
            Some(i) if i != t.input_index => {
                return Err(ConvertError::ConflictingInput {
                    first: i,
                    second: t.input_index,
                })
            }
            _ => {}
        }
    }
    let word_idx = word_input.unwrap_or(first.input_index);
    if word_idx == 0 {
        return Err(ConvertError::MissingIndex {
            title: first.title.clone(),
        });
    }

    let mut task_map = Map::new();
    for t in tasks {
        let mut entry = Map::new();
        entry.insert("task_type".into(), json!(machamp_task_type(t.task_type)));
        if t.task_type.is_word_level() {
            let column =
                t.output_index
                    .filter(|&o| o > 0)
                    .ok_or_else(|| ConvertError::MissingIndex {
                        title: t.title.clone(),
                    })?;
            entry.insert("column_idx".into(), json!(column - 1));
        } else {
            if t.input_index == 0 {
                return Err(ConvertError::MissingIndex {
                    title: t.title.clone(),
                });
            }
            entry.insert("sent_idxs".into(), json!([t.input_index - 1]));
        }
        task_map.insert(t.title.clone(), Value::Object(entry));
    }

    let dataset = dataset_name(data_path);
    let config = json!({
        dataset.clone(): {
            "train_data_path": data_path,
            "word_idx": word_idx - 1,
            "tasks": task_map,
        }
    });
    let config_file_name = format!("{dataset}_machamp.json");
    let command = format!("python3 train.py --dataset_configs {config_file_name} --name {dataset}");
    Ok(MachampExport {
        config: serde_json::to_string_pretty(&config).expect("json values serialize") + "\n",
        dataset,
        config_file_name,
        command,
    })
}
