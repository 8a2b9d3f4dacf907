use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use annot_core::conll::validate_corpus_with;
use annot_core::convert::{
    export_machamp as machamp, import_jsonl, import_raw_text, parse_jsonl, standoff_to_bio,
    FieldMapping, StandoffDocument,
};
use annot_core::engine::{bio_decode, STATUS_KEY_PREFIX};
use annot_core::task::{infer_labels as infer, parse_config_with_warnings, validate_tasks};
use annot_core::{
    parse_corpus, serialize_config, serialize_corpus, Corpus, Diagnostic, Execution, Status,
    TaskConfig, TaskSet, TaskType,
};
use anyhow::{bail, Context, Result};
use chrono::NaiveDateTime;
use serde_json::Value;

use crate::args::{ConvertArgs, Format, InferArgs, MachampArgs, TaskArgs};
use crate::style::Style;
use crate::Unreadable;

/// Fixes the clock used for `--datetime` file names (`YYYY-MM-DDTHH:MM:SS`).
const CLOCK_ENV: &str = "ANNOT_FIXED_TIME";

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| {
        Unreadable {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let text = read(path)?;
    parse_corpus(&text).with_context(|| path.display().to_string())
}

pub fn load_tasks(path: Option<&Path>) -> Result<TaskSet> {
    let Some(path) = path else {
        return Ok(TaskSet::default());
    };
    let text = read(path)?;
    let (tasks, warnings) =
        parse_config_with_warnings(&text).with_context(|| path.display().to_string())?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(tasks)
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn diagnose(corpus: &Corpus, tasks: &TaskSet) -> Vec<Diagnostic> {
    let outputs: Vec<usize> = tasks.iter().filter_map(|t| t.output_index).collect();
    let mut diags = validate_corpus_with(corpus, &outputs, Execution::default());
    diags.extend(validate_tasks(corpus, tasks));
    diags
}

pub fn validate(args: &TaskArgs, style: &Style, out: &mut dyn Write) -> Result<u8> {
    let corpus = load_corpus(&args.input)?;
    let tasks = load_tasks(args.tasks.as_deref())?;
    let diags = diagnose(&corpus, &tasks);
    for d in &diags {
        writeln!(out, "{}", style.diagnostic(d))?;
    }
    let errors = diags.iter().filter(|d| d.is_error()).count();
    writeln!(
        out,
        "{}, {}",
        plural(errors, "error"),
        plural(diags.len() - errors, "warning")
    )?;
    Ok(u8::from(errors > 0))
}

/// Label counts for one task: spans per entity type, tags per value, or
/// metadata values. `None` for free-text tasks.
fn histogram(corpus: &Corpus, task: &TaskConfig) -> Option<Vec<(String, usize)>> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for utt in &corpus.utterances {
        match task.task_type {
            TaskType::SeqBio => {
                let column = utt.column(task.output_index.unwrap_or(0));
                for span in bio_decode(&column) {
                    *counts.entry(span.label).or_default() += 1;
                }
            }
            TaskType::Seq => {
                for cell in utt.column(task.output_index.unwrap_or(0)) {
                    if !cell.is_empty() {
                        *counts.entry(cell.to_string()).or_default() += 1;
                    }
                }
            }
            TaskType::Class => {
                if let Some(v) = utt.metadata(&task.title) {
                    *counts.entry(v.to_string()).or_default() += 1;
                }
            }
            TaskType::Seq2Seq => return None,
        }
    }
    let mut sorted: Vec<(String, usize)> = counts.into_iter().collect();
    sorted.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Some(sorted)
}

pub fn stats(args: &TaskArgs, out: &mut dyn Write) -> Result<u8> {
    let corpus = load_corpus(&args.input)?;
    let tasks = load_tasks(args.tasks.as_deref())?;
    writeln!(
        out,
        "{}, {}",
        plural(corpus.len(), "utterance"),
        plural(corpus.token_count(), "token")
    )?;
    writeln!(out, "columns: {}", corpus.max_width())?;

    for task in &tasks {
        match task.output_index {
            Some(col) => writeln!(out, "{} ({}, column {col})", task.title, task.task_type)?,
            None => writeln!(out, "{} ({})", task.title, task.task_type)?,
        }
        match histogram(&corpus, task) {
            Some(counts) => {
                let width = counts
                    .iter()
                    .map(|(l, _)| l.chars().count())
                    .max()
                    .unwrap_or(0);
                for (label, n) in counts {
                    writeln!(out, "  {label:<width$}  {n}")?;
                }
            }
            None => {
                let filled = corpus
                    .utterances
                    .iter()
                    .filter(|u| u.metadata(&task.title).is_some_and(|v| !v.is_empty()))
                    .count();
                writeln!(out, "  annotated  {filled}/{}", corpus.len())?;
            }
        }

        let key = format!("{STATUS_KEY_PREFIX}{}", task.title);
        let mut progress = [0usize; 3];
        for utt in &corpus.utterances {
            match utt.metadata(&key).and_then(Status::parse) {
                Some(Status::Completed) => progress[0] += 1,
                Some(Status::Wrong) => progress[1] += 1,
                Some(Status::Unsure) => progress[2] += 1,
                _ => {}
            }
        }
        let cleared = corpus.len() - progress.iter().sum::<usize>();
        writeln!(
            out,
            "  progress: {} completed, {} wrong, {} unsure, {cleared} cleared",
            progress[0], progress[1], progress[2]
        )?;
    }
    Ok(0)
}

pub fn infer_labels(args: &InferArgs, out: &mut dyn Write) -> Result<u8> {
    let corpus = load_corpus(&args.input)?;
    let tasks = load_tasks(Some(&args.tasks))?;
    let mut merged = Vec::with_capacity(tasks.len());
    for task in &tasks {
        if task.task_type == TaskType::Seq2Seq {
            writeln!(out, "{}: (free text, no labels)", task.title)?;
            merged.push(task.clone());
            continue;
        }
        let labels = infer(&corpus, task)?;
        writeln!(out, "{}: {}", task.title, serde_json::to_string(&labels)?)?;
        let mut all = task.labels.clone();
        all.extend(labels.into_iter().filter(|l| !task.labels.contains(l)));
        merged.push(task.clone().with_labels(all));
    }
    if let Some(path) = &args.out {
        let tasks = TaskSet::new(merged)?;
        write_file(path, &serialize_config(&tasks))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(0)
}

pub fn export_machamp(args: &MachampArgs, style: &Style, out: &mut dyn Write) -> Result<u8> {
    let corpus = load_corpus(&args.input)?;
    let tasks = load_tasks(Some(&args.tasks))?;
    let fatal: Vec<Diagnostic> = validate_tasks(&corpus, &tasks)
        .into_iter()
        .filter(Diagnostic::is_error)
        .collect();
    if !fatal.is_empty() {
        for d in &fatal {
            eprintln!("{}", style.diagnostic(d));
        }
        bail!("the task config does not fit {}", args.input.display());
    }
    let export = machamp(&tasks, &args.input.to_string_lossy())?;
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let config = dir.join(&export.config_file_name);
            let command = dir.join(format!("{}_command.txt", export.dataset));
            write_file(&config, &export.config)?;
            write_file(&command, &format!("{}\n", export.command))?;
            writeln!(out, "wrote {}", config.display())?;
            writeln!(out, "wrote {}", command.display())?;
        }
        None => {
            write!(out, "{}", export.config)?;
            writeln!(out, "{}", export.command)?;
        }
    }
    Ok(0)
}

fn standoff_documents(text: &str) -> Result<Vec<StandoffDocument>> {
    if let Ok(value) = serde_json::from_str::<Value>(text) {
        return Ok(match value {
            Value::Array(_) => serde_json::from_value(value)?,
            other => vec![serde_json::from_value(other)?],
        });
    }
    parse_jsonl(text)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| serde_json::from_value(v).with_context(|| format!("document {i}")))
        .collect()
}

fn single_task(task: TaskConfig) -> Result<TaskSet> {
    Ok(TaskSet::new(vec![task])?)
}

pub fn convert(args: &ConvertArgs, style: &Style, out: &mut dyn Write) -> Result<u8> {
    let text = read(&args.input)?;
    let origin = args.input.display().to_string();
    let (mut corpus, tasks) = match args.from {
        Format::Raw => (import_raw_text(&text).context(origin)?, None),
        Format::Conll => (parse_corpus(&text).context(origin)?, None),
        Format::Jsonl => {
            let records = parse_jsonl(&text).context(origin.clone())?;
            let mut mapping = FieldMapping::new(args.text_field.as_str(), args.task_title.as_str());
            if let Some(field) = &args.label_field {
                mapping = mapping.with_labels(field.as_str());
            }
            let (corpus, task) = import_jsonl(&records, &mapping).context(origin)?;
            (corpus, args.label_field.is_some().then_some(task))
        }
        Format::Standoff => {
            let docs = standoff_documents(&text).context(origin.clone())?;
            let mut utterances = Vec::with_capacity(docs.len());
            for (d, doc) in docs.iter().enumerate() {
                let conv =
                    standoff_to_bio(doc).with_context(|| format!("{origin}: document {d}"))?;
                for a in &conv.adjustments {
                    eprintln!(
                        "{} document {d} span {} ({}): chars {}..{} snapped to {}..{} (tokens {}..{})",
                        style.note("snap:"),
                        a.span,
                        a.label,
                        a.original.0,
                        a.original.1,
                        a.snapped.0,
                        a.snapped.1,
                        a.tokens.0,
                        a.tokens.1
                    );
                }
                utterances.push(conv.to_utterance()?);
            }
            let corpus = Corpus::new(utterances);
            let task = TaskConfig::new(args.task_title.as_str(), TaskType::SeqBio, 0)
                .with_columns(1, Some(2));
            let labels = infer(&corpus, &task)?;
            (corpus, Some(task.with_labels(labels)))
        }
    };

    if args.clean {
        for utt in &mut corpus.utterances {
            utt.comments
                .retain(|c| !c.key().is_some_and(|k| k.starts_with(STATUS_KEY_PREFIX)));
        }
    }
    let rendered = serialize_corpus(&corpus);
    match &args.out {
        Some(path) => {
            let path = if args.datetime {
                stamped(path, now()?)
            } else {
                path.clone()
            };
            write_file(&path, &rendered)?;
            eprintln!(
                "wrote {} ({})",
                path.display(),
                plural(corpus.len(), "utterance")
            );
        }
        None => out.write_all(rendered.as_bytes())?,
    }

    if let Some(path) = &args.config_out {
        let Some(task) = tasks else {
            bail!("--config-out needs labels: use --from jsonl with --label-field, or --from standoff");
        };
        write_file(path, &serialize_config(&single_task(task)?))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(0)
}

fn now() -> Result<NaiveDateTime> {
    match std::env::var(CLOCK_ENV) {
        Ok(v) => NaiveDateTime::parse_from_str(&v, "%Y-%m-%dT%H:%M:%S")
            .with_context(|| format!("{CLOCK_ENV}={v:?}")),
        Err(_) => Ok(chrono::Local::now().naive_local()),
    }
}

/// `out/data.conll` → `out/data_2024-01-02T03-04-05.conll`.
fn stamped(path: &Path, at: NaiveDateTime) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "conll".to_string());
    let name = format!("{stem}_{}.{ext}", at.format("%Y-%m-%dT%H-%M-%S"));
    path.with_file_name(name)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
