use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "annot",
    version,
    about = "Validate, convert and inspect token-annotated TSV corpora"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a corpus (and optionally a task config) for structural problems.
    Validate(TaskArgs),
    /// Convert raw text, JSON lines or standoff JSON into a TSV corpus.
    Convert(ConvertArgs),
    /// Print utterance/token counts, label histograms and progress.
    Stats(TaskArgs),
    /// Print the labels found in each task's column or metadata key.
    InferLabels(InferArgs),
    /// Write a MaChAmp dataset config and training command.
    ExportMachamp(MachampArgs),
    /// Serve the annotation UI and a session endpoint on loopback.
    ServeUi(ServeArgs),
}

#[derive(Debug, Args)]
pub struct TaskArgs {
    /// Corpus file.
    pub input: PathBuf,
    /// Task config (JSON array of tasks).
    #[arg(long)]
    pub tasks: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One utterance per paragraph, whitespace-separated tokens.
    Raw,
    /// One JSON record per line.
    Jsonl,
    /// `{text, spans}` documents: one object, an array, or one per line.
    Standoff,
    /// An existing corpus, re-serialized canonically.
    Conll,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub from: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the task config describing the converted labels.
    #[arg(long)]
    pub config_out: Option<PathBuf>,
    /// Append `_YYYY-MM-DDTHH-MM-SS` to the output file name.
    #[arg(long, requires = "out")]
    pub datetime: bool,
    /// Drop `status:` metadata from the output.
    #[arg(long)]
    pub clean: bool,
    /// JSON-lines field holding the text (a string or a token list).
    #[arg(long, default_value = "text")]
    pub text_field: String,
    /// JSON-lines field holding a label or a per-token tag list.
    #[arg(long)]
    pub label_field: Option<String>,
    /// Title of the task created from the labels.
    #[arg(long, default_value = "label")]
    pub task_title: String,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub tasks: PathBuf,
    /// Write the config back with inferred labels merged in.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MachampArgs {
    /// Training data; its path is written into the config.
    pub input: PathBuf,
    #[arg(long)]
    pub tasks: PathBuf,
    /// Directory for the config and command files; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub tasks: Option<PathBuf>,
    /// 0 picks a free port.
    #[arg(long, default_value_t = 8000)]
    pub port: u16,
    /// Static UI bundle; a placeholder page is served when absent.
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
}
