use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use rayon::prelude::*;
use safe_core::chem::{canonical_smiles, parse_smiles};
use safe_core::codec::{canonical_safe, decode_safe, encode_safe, CodecError};
use safe_core::fragment::{default_rules, load_rules, BondCutRule};

use crate::config::{Command, JobConfig, DEFAULT_CHUNK_SIZE};

pub const REPORT_HEADER: &str = "input_smiles\tsafe\tn_fragments\tsource\tstatus";

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConversionStats {
    pub n_in: usize,
    pub n_ok: usize,
    /// Converted molecules whose cuts came from the community fallback.
    pub n_fallback: usize,
    pub n_excluded: usize,
    pub wall_time: Duration,
}

impl ConversionStats {
    pub fn excluded_fraction(&self) -> f64 {
        if self.n_in == 0 {
            0.0
        } else {
            self.n_excluded as f64 / self.n_in as f64
        }
    }
}

/// Result of converting one input line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineOutcome {
    pub input: String,
    pub safe: Option<String>,
    pub n_fragments: usize,
    /// `rules`, `louvain` or `none`; `-` for excluded lines.
    pub source: &'static str,
    /// `ok`, or the exclusion code.
    pub status: &'static str,
}

/// Converts one SMILES (first whitespace-separated field of the line).
pub fn convert_line(line: &str, rules: &[BondCutRule]) -> LineOutcome {
    let smiles = line.split_whitespace().next().unwrap_or("");
    let excluded = |status| LineOutcome {
        input: smiles.to_string(),
        safe: None,
        n_fragments: 0,
        source: "-",
        status,
    };
    let mol = match parse_smiles(smiles) {
        Ok(mol) => mol,
        Err(_) if smiles.is_empty() => return excluded("empty_line"),
        Err(_) => return excluded("parse_error"),
    };
    match encode_safe(&mol, rules, true) {
        Ok((safe, report)) => LineOutcome {
            input: smiles.to_string(),
            safe: Some(safe.text),
            n_fragments: report.n_fragments,
            source: report.cut_rule_source.as_str(),
            status: "ok",
        },
        Err(CodecError::TooManyLabels { .. }) => excluded("too_many_labels"),
        Err(_) => excluded("encode_error"),
    }
}

pub fn report_path(config: &JobConfig) -> PathBuf {
    match &config.command {
        Command::Convert { report: Some(path), .. } => path.clone(),
        _ => {
            let mut name = config.output_path.clone().into_os_string();
            name.push(".report.tsv");
            PathBuf::from(name)
        }
    }
}

pub(crate) fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building worker pool")
}

/// Reads `path` in chunks of `chunk_size` lines, calling `handle` on each.
pub(crate) fn for_each_chunk(
    path: &Path,
    chunk_size: usize,
    mut handle: impl FnMut(usize, &[String]) -> Result<()>,
) -> Result<()> {
    let reader = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    let mut chunk = Vec::with_capacity(chunk_size);
    let mut first_line = 0;
    for line in reader.lines() {
        chunk.push(line.with_context(|| format!("reading {}", path.display()))?);
        if chunk.len() == chunk_size {
            handle(first_line, &chunk)?;
            first_line += chunk.len();
            chunk.clear();
        }
    }
    if !chunk.is_empty() {
        handle(first_line, &chunk)?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

/// SMILES file to SAFE file (one per converted line, input order kept)
/// plus a per-line TSV report. Lines that fail to parse or encode are
/// excluded from the SAFE output.
pub fn run_convert(config: &JobConfig) -> Result<ConversionStats> {
    config.validate()?;
    let chunk_size = match config.command {
        Command::Convert { chunk_size, .. } => chunk_size,
        _ => DEFAULT_CHUNK_SIZE,
    };
    let rules = match &config.rule_file {
        Some(path) => load_rules(path)?,
        None => default_rules(),
    };
    let start = Instant::now();
    let pool = thread_pool(config.threads)?;
    let mut out = create(&config.output_path)?;
    let mut report = create(&report_path(config))?;
    writeln!(report, "{REPORT_HEADER}")?;

    let mut stats = ConversionStats::default();
    for_each_chunk(&config.input_path, chunk_size, |_, lines| {
        let outcomes: Vec<LineOutcome> = pool.install(|| lines.par_iter().map(|l| convert_line(l, &rules)).collect());
        for o in outcomes {
            stats.n_in += 1;
            match &o.safe {
                Some(safe) => {
                    stats.n_ok += 1;
                    if o.source == "louvain" {
                        stats.n_fallback += 1;
                    }
                    writeln!(out, "{safe}")?;
                }
                None => stats.n_excluded += 1,
            }
            writeln!(
                report,
                "{}\t{}\t{}\t{}\t{}",
                o.input,
                o.safe.as_deref().unwrap_or(""),
                o.n_fragments,
                o.source,
                o.status
            )?;
        }
        Ok(())
    })?;
    out.flush()?;
    report.flush()?;
    stats.wall_time = start.elapsed();
    Ok(stats)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundtripFailure {
    /// 1-based.
    pub line: usize,
    pub text: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundtripReport {
    pub n_checked: usize,
    pub failures: Vec<RoundtripFailure>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks one SAFE line: it decodes, parses as plain SMILES, and its
/// canonical re-encoding decodes to the same molecule.
pub fn check_line(text: &str) -> Result<(), String> {
    let mol = decode_safe(text).map_err(|e| match e {
        CodecError::OpenAttachment { label } => format!("open_attachment:{label}"),
        other => format!("decode_error:{other}"),
    })?;
    parse_smiles(text).map_err(|e| format!("not_smiles:{e}"))?;
    let again = canonical_safe(text).map_err(|e| format!("reencode_error:{e}"))?;
    let back = decode_safe(again.as_str()).map_err(|e| format!("reencode_error:{e}"))?;
    if canonical_smiles(&back) != canonical_smiles(&mol) {
        return Err("molecule_changed".to_string());
    }
    Ok(())
}

/// Runs [`check_line`] over every non-blank line of the input and writes
/// the failures (`line text reason`) as TSV to the output path.
pub fn run_roundtrip_check(config: &JobConfig) -> Result<RoundtripReport> {
    config.validate()?;
    let pool = thread_pool(config.threads)?;
    let mut report = RoundtripReport::default();
    for_each_chunk(&config.input_path, DEFAULT_CHUNK_SIZE, |first, lines| {
        let results: Vec<Option<RoundtripFailure>> = pool.install(|| {
            lines
                .par_iter()
                .enumerate()
                .map(|(i, line)| {
                    let text = line.trim();
                    if text.is_empty() {
                        return None;
                    }
                    check_line(text).err().map(|reason| RoundtripFailure {
                        line: first + i + 1,
                        text: text.to_string(),
                        reason,
                    })
                })
                .collect()
        });
        report.n_checked += lines.iter().filter(|l| !l.trim().is_empty()).count();
        report.failures.extend(results.into_iter().flatten());
        Ok(())
    })?;
    let mut out = create(&config.output_path)?;
    writeln!(out, "line\ttext\treason")?;
    for f in &report.failures {
        writeln!(out, "{}\t{}\t{}", f.line, f.text, f.reason)?;
    }
    out.flush()?;
    Ok(report)
}
