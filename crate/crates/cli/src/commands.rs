use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use safe_core::chem::parse_smiles;
use safe_core::genlab::{
    complete_prefix, evaluate_set, make_prompt, sample_denovo, train_ngram, Completion, GenerationMetrics,
    NGramModel, PromptInput, Task,
};
use safe_core::tokenizer::{encode_tokens, pretokenize, train_bpe_with, BpeConfig, Vocabulary};

use crate::config::{JobConfig, DEFAULT_CHUNK_SIZE};
use crate::convert::for_each_chunk;

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for_each_chunk(path, DEFAULT_CHUNK_SIZE, |_, chunk| {
        lines.extend(chunk.iter().map(|l| l.trim().to_string()).filter(|l| !l.is_empty()));
        Ok(())
    })?;
    Ok(lines)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("decoding {}", path.display()))
}

/// Merges file stored next to a vocabulary file.
pub fn merges_path(vocab_path: &Path) -> PathBuf {
    let mut name = vocab_path.as_os_str().to_owned();
    name.push(".merges");
    PathBuf::from(name)
}

/// Reads a vocabulary file and its sibling merges file.
pub fn load_vocab(vocab_path: &Path) -> Result<Vocabulary> {
    let read = |p: &Path| fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    let vocab = Vocabulary::from_files(&read(vocab_path)?, &read(&merges_path(vocab_path))?)
        .with_context(|| format!("decoding {}", vocab_path.display()))?;
    Ok(vocab)
}

/// Trains BPE merges on the input lines and writes the vocabulary (one
/// surface per line, line k = id k) plus `<output>.merges`. Lines that do
/// not pre-tokenize are skipped; returns how many were used.
pub fn tokenize_train(config: &JobConfig, vocab_size: usize, min_frequency: usize) -> Result<usize> {
    let lines = read_lines(&config.input_path)?;
    let streams: Vec<Vec<&str>> = lines.iter().filter_map(|l| pretokenize(l).ok()).collect();
    let vocab = train_bpe_with(
        &streams,
        BpeConfig {
            target_vocab: vocab_size,
            min_frequency,
        },
    )?;
    let write = |p: &Path, text: String| fs::write(p, text).with_context(|| format!("writing {}", p.display()));
    write(&config.output_path, vocab.to_vocab_file())?;
    write(&merges_path(&config.output_path), vocab.to_merges_file())?;
    Ok(streams.len())
}

/// Writes the token ids of each input line, space-separated.
pub fn tokenize_apply(config: &JobConfig, vocab_path: &Path, framed: bool) -> Result<usize> {
    let vocab = load_vocab(vocab_path)?;
    let lines = read_lines(&config.input_path)?;
    let mut out = create(&config.output_path)?;
    for line in &lines {
        let ids: Vec<String> = encode_tokens(line, &vocab, framed).tokens.iter().map(u32::to_string).collect();
        writeln!(out, "{}", ids.join(" "))?;
    }
    out.flush()?;
    Ok(lines.len())
}

/// Trains the n-gram sampler on a SAFE corpus and writes it as JSON.
pub fn sampler_train(config: &JobConfig, vocab_path: &Path, order: usize) -> Result<usize> {
    let vocab = load_vocab(vocab_path)?;
    let corpus: Vec<Vec<u32>> = read_lines(&config.input_path)?
        .iter()
        .map(|l| encode_tokens(l, &vocab, false).tokens)
        .collect();
    let model = train_ngram(&corpus, &vocab, order)?;
    write_json(&config.output_path, &model)?;
    Ok(corpus.len())
}

pub fn load_model(path: &Path) -> Result<NGramModel> {
    read_json(path)
}

const COMPLETION_HEADER: &str = "text\taccepted\treason";

fn write_completion(out: &mut impl Write, prefix: &str, c: &Completion) -> Result<()> {
    let reason = c.verdict.reason().map(|r| r.to_string()).unwrap_or_default();
    let reason = if c.truncated && reason.is_empty() {
        "truncated".to_string()
    } else {
        reason
    };
    writeln!(out, "{prefix}{}\t{}\t{}", c.text, c.verdict.is_accepted(), reason.replace('\t', " "))?;
    Ok(())
}

/// Unconstrained sampling from the model at `input_path`.
pub fn sample(config: &JobConfig, n: usize, temperature: f64, max_len: usize) -> Result<Vec<Completion>> {
    let model = load_model(&config.input_path)?;
    let samples = sample_denovo(&model, n, config.seed, max_len, temperature)?;
    let mut out = create(&config.output_path)?;
    writeln!(out, "{COMPLETION_HEADER}")?;
    for c in &samples {
        write_completion(&mut out, "", c)?;
    }
    out.flush()?;
    Ok(samples)
}

/// One row of a design spec file.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignSpec {
    pub task: Option<Task>,
    pub input: PromptInput,
}

/// Parses a design spec TSV. The header names the columns: `input`
/// (required; fragments separated by `.`), and optionally `task`, `k`
/// (superstructure sites), `seed` and `reference` (scaffold to move away
/// from when morphing).
pub fn parse_design_spec(text: &str) -> Result<Vec<DesignSpec>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let Some(header) = lines.next() else { return Ok(Vec::new()) };
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
    let col = |name: &str| columns.iter().position(|&c| c == name);
    let Some(input_col) = col("input") else { bail!("design spec header lacks an `input` column") };
    let (task_col, k_col, seed_col, ref_col) = (col("task"), col("k"), col("seed"), col("reference"));
    let mut specs = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let field = |c: Option<usize>| c.and_then(|c| fields.get(c)).copied().filter(|f| !f.is_empty());
        let row = i + 2;
        let Some(molecules) = field(Some(input_col)) else { bail!("spec line {row}: missing input") };
        let mut input = PromptInput::new(&molecules.split('.').collect::<Vec<_>>());
        if let Some(k) = field(k_col) {
            input.sites = k.parse().with_context(|| format!("spec line {row}: bad k"))?;
        }
        if let Some(seed) = field(seed_col) {
            input.seed = seed.parse().with_context(|| format!("spec line {row}: bad seed"))?;
        }
        input.reference = field(ref_col).map(str::to_string);
        let task = field(task_col).map(str::parse).transpose()?;
        specs.push(DesignSpec { task, input });
    }
    Ok(specs)
}

#[derive(Clone, Debug)]
pub struct DesignBatch {
    pub prompt_prefix: String,
    pub completions: Vec<Completion>,
    pub metrics: GenerationMetrics,
}

/// Runs `task` on every spec row that names no task or names this one,
/// writing completions to the output TSV and per-batch metrics to
/// `<output>.metrics.tsv`.
pub fn design(
    config: &JobConfig,
    model_path: &Path,
    task: Task,
    n: usize,
    temperature: f64,
    max_len: usize,
) -> Result<Vec<DesignBatch>> {
    let model = load_model(model_path)?;
    let spec_text = fs::read_to_string(&config.input_path)
        .with_context(|| format!("reading {}", config.input_path.display()))?;
    let mut out = create(&config.output_path)?;
    writeln!(out, "batch\t{COMPLETION_HEADER}")?;
    let mut metrics_path = config.output_path.clone().into_os_string();
    metrics_path.push(".metrics.tsv");
    let mut metrics_out = create(Path::new(&metrics_path))?;
    writeln!(metrics_out, "batch\ttask\tprefix\tn\tn_accepted\tvalidity\tuniqueness\tdiversity")?;

    let mut batches = Vec::new();
    for spec in parse_design_spec(&spec_text)? {
        if spec.task.is_some_and(|t| t != task) {
            continue;
        }
        let prompt = make_prompt(task, &spec.input)?;
        let seed = config.seed.wrapping_add(batches.len() as u64);
        let completions = complete_prefix(&model, &prompt, n, seed, max_len, temperature)?;
        let batch = batches.len();
        for c in &completions {
            write_completion(&mut out, &format!("{batch}\t"), c)?;
        }
        let texts: Vec<&str> = completions.iter().map(|c| c.text.as_str()).collect();
        let metrics = evaluate_set(&texts, None);
        let accepted = completions.iter().filter(|c| c.verdict.is_accepted()).count();
        writeln!(
            metrics_out,
            "{batch}\t{task}\t{}\t{}\t{accepted}\t{:.6}\t{:.6}\t{:.6}",
            prompt.prefix,
            completions.len(),
            metrics.validity,
            metrics.uniqueness,
            metrics.diversity
        )?;
        batches.push(DesignBatch {
            prompt_prefix: prompt.prefix,
            completions,
            metrics,
        });
    }
    out.flush()?;
    metrics_out.flush()?;
    Ok(batches)
}

/// Metrics over the first TSV field of every input line (a header line
/// starting with `text` is skipped).
pub fn metrics(config: &JobConfig, reference: Option<&str>) -> Result<GenerationMetrics> {
    let texts: Vec<String> = read_lines(&config.input_path)?
        .into_iter()
        .filter(|l| !l.starts_with("text\t") && l != "text")
        .map(|l| l.split('\t').next().unwrap_or("").to_string())
        .collect();
    let reference = reference
        .map(|r| parse_smiles(r).with_context(|| format!("parsing reference {r:?}")))
        .transpose()?;
    let m = evaluate_set(&texts, reference.as_ref());
    let mut out = create(&config.output_path)?;
    writeln!(out, "n\tvalidity\tuniqueness\tdiversity\tdistance_to_reference")?;
    let distance = m.distance_to_reference.map(|d| format!("{d:.6}")).unwrap_or_default();
    writeln!(
        out,
        "{}\t{:.6}\t{:.6}\t{:.6}\t{distance}",
        texts.len(),
        m.validity,
        m.uniqueness,
        m.diversity
    )?;
    out.flush()?;
    Ok(m)
}
