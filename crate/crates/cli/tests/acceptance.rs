//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run alone with `cargo test -p annot-cli --test acceptance`.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use annot_core::convert::{
    bio_to_standoff, export_machamp, standoff_to_bio, StandoffDocument, StandoffSpan,
};
use annot_core::engine::{
    annotation_mode, bio_decode, bio_encode, keyboard_map, snap_selection, AnnotationMode,
    ExportOptions, Progress,
};
use annot_core::{
    parse_config, parse_corpus, serialize_config, serialize_corpus, Corpus, Session, Span, Status,
    TaskConfig, TaskSet, TaskType, Token, Utterance,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

fn golden_corpus() -> Check {
    let text = read("sample.conll");
    let start = Instant::now();
    let corpus = parse_corpus(&text).map_err(|e| e.to_string())?;
    ensure!(corpus.len() == 2, "{} utterances", corpus.len());
    let expected = [("gameboy-1", "inform", 6), ("gary-1", "goodbye", 4)];
    for (utt, (id, intent, n)) in corpus.utterances.iter().zip(expected) {
        ensure!(
            utt.metadata("sent_id") == Some(id),
            "sent_id {:?}",
            utt.metadata("sent_id")
        );
        ensure!(
            utt.metadata("intent") == Some(intent),
            "intent {:?}",
            utt.metadata("intent")
        );
        ensure!(
            utt.tokens.len() == n,
            "{} tokens, expected {n}",
            utt.tokens.len()
        );
    }
    let pos = corpus.utterances[0].column(3);
    ensure!(
        pos == ["PRON", "PUNCT", "PROPN", "AUX", "VERB", "PUNCT"],
        "POS column {pos:?}"
    );
    let ner = corpus.utterances[0].column(4);
    ensure!(
        ner == ["O", "O", "B-MISC", "O", "O", "O"],
        "NER column {ner:?}"
    );
    ensure!(
        corpus.utterances[1].column(4) == ["O"; 4],
        "NER column of utterance 2"
    );
    ensure!(
        serialize_corpus(&corpus) == text,
        "serialization is not byte-identical"
    );
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "2 utterances, 6+4 tokens, byte-exact in {elapsed:?}"
    ))
}

fn golden_config() -> Check {
    let text = read("ner_config.json");
    let tasks = parse_config(&text).map_err(|e| e.to_string())?;
    ensure!(tasks.len() == 1, "{} tasks", tasks.len());
    let ner = &tasks.tasks()[0];
    ensure!(ner.title == "NER", "title {:?}", ner.title);
    ensure!(ner.task_type == TaskType::SeqBio, "type {}", ner.task_type);
    ensure!(
        ner.labels == ["LOC", "MISC", "ORG", "PER"],
        "labels {:?}",
        ner.labels
    );
    ensure!(ner.id == 0, "id {}", ner.id);
    ensure!(
        ner.input_index == 1 && ner.output_index == Some(4),
        "columns {} -> {:?}",
        ner.input_index,
        ner.output_index
    );
    let again = parse_config(&serialize_config(&tasks)).map_err(|e| e.to_string())?;
    ensure!(again == tasks, "serialize -> parse changed the task set");
    Ok("NER seq_bio [LOC, MISC, ORG, PER] id 0; serialize -> parse is identity".into())
}

/// Every set of non-overlapping spans over `n` tokens, built left to right.
fn all_span_sets(n: usize, types: &[&str]) -> Vec<Vec<Span>> {
    fn go(at: usize, n: usize, types: &[&str], cur: &mut Vec<Span>, out: &mut Vec<Vec<Span>>) {
        if at == n {
            out.push(cur.clone());
            return;
        }
        go(at + 1, n, types, cur, out);
        for end in at + 1..=n {
            for t in types {
                cur.push(Span::new(at, end, *t));
                go(end, n, types, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(0, n, types, &mut Vec::new(), &mut out);
    out
}

/// Every tag string of length `n` over the alphabet.
fn all_tag_strings(n: usize, alphabet: &[&str]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<String>| {
                alphabet.iter().map(move |t| {
                    let mut next = prefix.clone();
                    next.push(t.to_string());
                    next
                })
            })
            .collect();
    }
    out
}

/// An `I-T` tag must continue a `B-T` or `I-T` tag.
fn well_formed(tags: &[String]) -> bool {
    tags.iter()
        .enumerate()
        .all(|(i, tag)| match tag.strip_prefix("I-") {
            None => true,
            Some(ty) => i > 0 && tags[i - 1].len() > 2 && &tags[i - 1][2..] == ty,
        })
}

fn bio_oracle() -> Check {
    let start = Instant::now();
    let alphabet = ["O", "B-X", "I-X", "B-Y", "I-Y"];
    let mut sets = 0;
    let mut strings = 0;
    for n in 0..=5 {
        let span_sets = all_span_sets(n, &["X", "Y"]);
        for spans in &span_sets {
            let tags = bio_encode(spans, n).map_err(|e| format!("encode {spans:?}: {e}"))?;
            ensure!(
                &bio_decode(&tags) == spans,
                "decode(encode({spans:?})) = {:?}",
                bio_decode(&tags)
            );
        }
        let tag_strings: Vec<_> = all_tag_strings(n, &alphabet);
        let mut well = 0;
        for tags in &tag_strings {
            let decoded = bio_decode(tags);
            let encoded =
                bio_encode(&decoded, n).map_err(|e| format!("encode {decoded:?}: {e}"))?;
            if well_formed(tags) {
                well += 1;
                ensure!(&encoded == tags, "encode(decode({tags:?})) = {encoded:?}");
            } else {
                ensure!(
                    well_formed(&encoded),
                    "repair of {tags:?} is not well formed: {encoded:?}"
                );
            }
        }
        // encode is a bijection between span sets and well-formed strings
        ensure!(
            well == span_sets.len(),
            "n={n}: {well} well-formed strings vs {} span sets",
            span_sets.len()
        );
        sets += span_sets.len();
        strings += tag_strings.len();
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "{sets} span sets, {strings} tag strings (n <= 5) in {elapsed:?}"
    ))
}

const FORMS: &[&str] = &[
    "What", "?", "Eevee", "is", "evolving", "!", "Größe", "日本", "a", "Pikachu",
];

fn snap_property() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let task = TaskConfig::new("NER", TaskType::SeqBio, 0).with_columns(1, Some(2));
    for case in 0..1000 {
        let n = rng.gen_range(1..10);
        let forms: Vec<&str> = (0..n).map(|_| *FORMS.choose(&mut rng).unwrap()).collect();
        let utt = Utterance::new(
            forms
                .iter()
                .map(|f| Token::new([*f, "O"]).unwrap())
                .collect(),
        );

        // char -> owning token, None for separators
        let mut owner: Vec<Option<usize>> = Vec::new();
        let mut bounds = Vec::new();
        for (i, f) in forms.iter().enumerate() {
            if i > 0 {
                owner.push(None);
            }
            let s = owner.len();
            owner.extend(std::iter::repeat_n(Some(i), f.chars().count()));
            bounds.push((s, owner.len()));
        }
        let len = owner.len();
        let a = rng.gen_range(0..=len);
        let b = if rng.gen_bool(0.1) {
            a
        } else {
            rng.gen_range(0..=len)
        };
        let (start, end) = (a.min(b), a.max(b));

        let (lo, hi) =
            snap_selection(&utt, &task, start, end).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(
            lo < hi && hi <= n,
            "case {case}: empty or out-of-range {lo}..{hi}"
        );
        let touched: BTreeSet<usize> = if start == end {
            owner.get(start).copied().flatten().into_iter().collect()
        } else {
            owner[start..end].iter().flatten().copied().collect()
        };
        match (touched.first(), touched.last()) {
            (Some(&first), Some(&last)) => {
                // covers and is minimal
                ensure!(
                    (lo, hi) == (first, last + 1),
                    "case {case} {forms:?} {start}..{end}: got {lo}..{hi}"
                );
            }
            _ => ensure!(
                hi - lo == 1,
                "case {case}: whitespace selection snapped to {lo}..{hi}"
            ),
        }
        let (s, e) = (bounds[lo].0, bounds[hi - 1].1);
        let again = snap_selection(&utt, &task, s, e).map_err(|e| e.to_string())?;
        ensure!(
            again == (lo, hi),
            "case {case}: not idempotent ({lo}..{hi} -> {again:?})"
        );
    }
    Ok("1000 random selections: covering, minimal, idempotent".into())
}

const TASKS: &str = r#"[
  {"title":"NER","type":{"name":"seq_bio","isWordLevel":true},"output_index":"3","input_index":"2","labels":["LOC","MISC","ORG","PER"],"id":0},
  {"title":"POS","type":{"name":"seq","isWordLevel":true},"output_index":"4","input_index":"2","labels":["ADV","NOUN","PUNCT","VERB"],"id":1},
  {"title":"intent","type":{"name":"class","isWordLevel":false},"input_index":"2","labels":["goodbye","inform"],"id":2},
  {"title":"translation","type":{"name":"seq2seq","isWordLevel":false},"input_index":"2","labels":[],"id":3}
]"#;

fn snapshot(s: &Session) -> (Corpus, Vec<Status>, Vec<Progress>) {
    let statuses = (0..s.corpus().len())
        .flat_map(|u| s.tasks().iter().map(move |t| s.status(u, t.id)))
        .collect();
    let progress = s
        .tasks()
        .iter()
        .map(|t| s.progress(t.id).unwrap())
        .collect();
    (s.corpus().clone(), statuses, progress)
}

fn persistence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tasks = parse_config(TASKS).map_err(|e| e.to_string())?;
    let mut text = String::new();
    for u in 0..12 {
        if u > 0 {
            text.push('\n');
        }
        text.push_str(&format!("# sent_id = u{u}\n"));
        for t in 0..rng.gen_range(1..8) {
            text.push_str(&format!("{}\t{}\n", t + 1, FORMS.choose(&mut rng).unwrap()));
        }
    }
    let mut session =
        Session::open(parse_corpus(&text).unwrap(), tasks.clone()).map_err(|e| e.to_string())?;
    let total = session.corpus().len();
    let statuses = [
        Status::Completed,
        Status::Wrong,
        Status::Unsure,
        Status::Cleared,
    ];
    let targets = ["", "Was? Eevee entwickelt sich!", "x = y", "Bis später"];
    let ops = 600;
    let mut reopens = 0;
    for op in 1..=ops {
        let u = rng.gen_range(0..total);
        let n = session.corpus().utterances[u].tokens.len();
        let task = tasks.tasks().choose(&mut rng).unwrap();
        let result = if rng.gen_bool(0.35) {
            session.set_status(u, task.id, *statuses.choose(&mut rng).unwrap())
        } else {
            match task.task_type {
                TaskType::SeqBio => {
                    let s = rng.gen_range(0..n);
                    let e = rng.gen_range(s + 1..=n);
                    let label = if rng.gen_bool(0.15) {
                        "O"
                    } else {
                        task.labels.choose(&mut rng).unwrap()
                    };
                    session.annotate_span(u, (s, e), task.id, label)
                }
                TaskType::Seq => {
                    let label = task.labels.choose(&mut rng).unwrap().clone();
                    session.annotate_token(u, rng.gen_range(0..n), task.id, &label)
                }
                TaskType::Class => {
                    let label = task.labels.choose(&mut rng).unwrap().clone();
                    session.annotate_class(u, task.id, &label)
                }
                TaskType::Seq2Seq => {
                    session.annotate_seq2seq(u, task.id, targets.choose(&mut rng).unwrap())
                }
            }
        };
        result.map_err(|e| format!("op {op}: {e}"))?;
        for t in &tasks {
            let p = session.progress(t.id).unwrap();
            ensure!(
                p.total() == total,
                "op {op}: progress for {} sums to {}",
                t.title,
                p.total()
            );
        }
        if op % 100 == 0 {
            let export = session
                .export(&ExportOptions::default())
                .map_err(|e| e.to_string())?;
            let reopened = Session::open(
                parse_corpus(&export.text).map_err(|e| e.to_string())?,
                tasks.clone(),
            )
            .map_err(|e| e.to_string())?;
            ensure!(
                snapshot(&reopened) == snapshot(&session),
                "op {op}: reopened session differs"
            );
            let again = reopened
                .export(&ExportOptions::default())
                .map_err(|e| e.to_string())?;
            ensure!(again == export, "op {op}: second export differs");
            session = reopened;
            reopens += 1;
        }
    }
    Ok(format!(
        "{ops} operations, {reopens} export/open cycles, progress sums held"
    ))
}

fn mode_rule() -> Check {
    for count in 1..=15 {
        let labels: Vec<String> = (0..count).map(|i| format!("L{i}")).collect();
        let task = TaskConfig::new("t", TaskType::Seq, 0)
            .with_columns(1, Some(2))
            .with_labels(labels);
        let expected = if count <= 10 {
            AnnotationMode::Keyboard
        } else {
            AnnotationMode::Search
        };
        ensure!(
            annotation_mode(&task) == expected,
            "{count} labels -> {:?}",
            annotation_mode(&task)
        );
        let keys = keyboard_map(&task);
        if count == 10 {
            ensure!(
                keys.last() == Some(&('0', "L9")),
                "key 0 maps to {:?}",
                keys.last()
            );
        }
        if count == 11 {
            ensure!(keys.is_empty(), "search mode still has key bindings");
        }
    }
    Ok("keyboard for 1..=10 labels, search from 11".into())
}

fn standoff() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let task = TaskConfig::new("NER", TaskType::SeqBio, 0).with_columns(1, Some(2));
    let types = ["PER", "LOC", "ORG"];
    let mut utterances = 0;
    for corpus_no in 0..500 {
        for _ in 0..rng.gen_range(1..5) {
            let n = rng.gen_range(1..12);
            let forms: Vec<&str> = (0..n).map(|_| *FORMS.choose(&mut rng).unwrap()).collect();
            let mut spans: Vec<Span> = Vec::new();
            let mut at = 0;
            while at < n {
                if rng.gen_bool(0.4) {
                    let end = rng.gen_range(at + 1..=n.min(at + 3));
                    spans.push(Span::new(at, end, *types.choose(&mut rng).unwrap()));
                    at = end;
                } else {
                    at += 1;
                }
            }
            let tags = bio_encode(&spans, n).map_err(|e| e.to_string())?;
            let utt = Utterance::new(
                forms
                    .iter()
                    .zip(&tags)
                    .map(|(f, t)| Token::new([*f, t.as_str()]).unwrap())
                    .collect(),
            );
            let doc = bio_to_standoff(&utt, &task).map_err(|e| e.to_string())?;
            let back = standoff_to_bio(&doc).map_err(|e| e.to_string())?;
            ensure!(
                back.tags == tags,
                "corpus {corpus_no}: {tags:?} came back as {:?}",
                back.tags
            );
            ensure!(
                back.adjustments.is_empty(),
                "corpus {corpus_no}: aligned spans were adjusted"
            );

            // push each span boundary inside its token where possible
            let mut moved = doc.clone();
            let mut expect_reports = 0;
            for s in &mut moved.spans {
                let first_len = doc
                    .text
                    .chars()
                    .skip(s.start)
                    .take_while(|c| *c != ' ')
                    .count();
                if first_len > 1 {
                    s.start += 1;
                    expect_reports += 1;
                }
            }
            let snapped = standoff_to_bio(&moved).map_err(|e| e.to_string())?;
            ensure!(
                snapped.tags == tags,
                "corpus {corpus_no}: snapping changed the tags"
            );
            ensure!(
                snapped.adjustments.len() == expect_reports,
                "corpus {corpus_no}: {} reports for {expect_reports} moved spans",
                snapped.adjustments.len()
            );
            utterances += 1;
        }
    }
    let misaligned = StandoffDocument {
        text: "What ? Eevee is evolving !".into(),
        spans: vec![StandoffSpan {
            start: 7,
            end: 10,
            label: "MISC".into(),
        }],
    };
    let conv = standoff_to_bio(&misaligned).map_err(|e| e.to_string())?;
    ensure!(
        conv.adjustments.len() == 1 && conv.adjustments[0].snapped == (7, 12),
        "no report for 7..10"
    );
    Ok(format!(
        "500 corpora ({utterances} utterances) exact; every moved span reported"
    ))
}

fn machamp_determinism() -> Check {
    let tasks: TaskSet = parse_config(&read("ner_config.json")).map_err(|e| e.to_string())?;
    let first = export_machamp(&tasks, "train.conll").map_err(|e| e.to_string())?;
    for _ in 0..20 {
        let again = export_machamp(
            &parse_config(&read("ner_config.json")).unwrap(),
            "train.conll",
        )
        .unwrap();
        ensure!(again == first, "outputs differ between runs");
    }
    let v: serde_json::Value = serde_json::from_str(&first.config).map_err(|e| e.to_string())?;
    ensure!(
        v["train"]["tasks"]["NER"]["task_type"] == "seq_bio",
        "no NER entry: {}",
        first.config
    );
    ensure!(
        v["train"]["tasks"]["NER"]["column_idx"] == 3,
        "column_idx {}",
        v["train"]["tasks"]["NER"]["column_idx"]
    );
    ensure!(
        v["train"]["word_idx"] == 0,
        "word_idx {}",
        v["train"]["word_idx"]
    );

    let run = || {
        Command::new(env!("CARGO_BIN_EXE_annot"))
            .arg("export-machamp")
            .arg(data("sample.conll"))
            .arg("--tasks")
            .arg(data("ner_config.json"))
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    ensure!(
        a.status.success() && a.stdout == b.stdout,
        "CLI output differs or failed"
    );
    Ok("21 library runs and 2 CLI runs byte-identical; NER column_idx 3, word_idx 0".into())
}

fn cli() -> Check {
    let bin = env!("CARGO_BIN_EXE_annot");
    let corpus = data("sample.conll");
    let validate = Command::new(bin)
        .arg("validate")
        .arg(&corpus)
        .arg("--tasks")
        .arg(data("ner_config.json"))
        .env("ANNOT_NO_COLOR", "1")
        .output()
        .map_err(|e| e.to_string())?;
    let out = String::from_utf8_lossy(&validate.stdout);
    ensure!(
        validate.status.code() == Some(0),
        "validate exited {:?}: {out}",
        validate.status.code()
    );
    ensure!(out.contains("0 errors"), "validate printed {out:?}");

    let stats = Command::new(bin)
        .arg("stats")
        .arg(&corpus)
        .output()
        .map_err(|e| e.to_string())?;
    let out = String::from_utf8_lossy(&stats.stdout);
    ensure!(
        stats.status.success(),
        "stats exited {:?}",
        stats.status.code()
    );
    ensure!(
        out.contains("2 utterances, 10 tokens"),
        "stats printed {out:?}"
    );

    let missing = Command::new(bin)
        .args(["convert", "--from", "raw", "missing.txt"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        missing.status.code() == Some(2),
        "missing file exited {:?}",
        missing.status.code()
    );
    Ok(
        "validate exit 0 / \"0 errors\"; stats \"2 utterances, 10 tokens\"; missing file exit 2"
            .into(),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("golden corpus", golden_corpus),
        ("golden config", golden_config),
        ("bio codec oracle", bio_oracle),
        ("snap property", snap_property),
        ("persistence round-trip", persistence),
        ("mode rule", mode_rule),
        ("standoff round-trip", standoff),
        ("converter determinism", machamp_determinism),
        ("cli", cli),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        match outcome {
            Ok(detail) => println!("PASS  {name:<24} {detail} [{ms:.0} ms]"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<24} {why} [{ms:.0} ms]");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
