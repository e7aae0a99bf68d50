use std::path::PathBuf;

use anyhow::{bail, Result};
use safe_core::genlab::Task;

/// Lines handed to the worker pool at a time.
pub const DEFAULT_CHUNK_SIZE: usize = 10_000;

/// Environment variable that overrides `--threads`.
pub const THREADS_ENV: &str = "SAFE_THREADS";

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Convert {
        /// Per-line TSV report; defaults to `<output>.report.tsv`.
        report: Option<PathBuf>,
        chunk_size: usize,
        /// Largest tolerated excluded fraction before the run counts as failed.
        max_excluded_fraction: f64,
    },
    Check,
    TokenizeTrain {
        vocab_size: usize,
        min_frequency: usize,
    },
    TokenizeApply {
        vocab: PathBuf,
        framed: bool,
    },
    SamplerTrain {
        vocab: PathBuf,
        order: usize,
    },
    Sample {
        n: usize,
        temperature: f64,
        max_len: usize,
    },
    Design {
        task: Task,
        n: usize,
        temperature: f64,
        max_len: usize,
    },
    Metrics {
        reference: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Convert { .. } => "convert",
            Command::Check => "check",
            Command::TokenizeTrain { .. } => "tokenize-train",
            Command::TokenizeApply { .. } => "tokenize-apply",
            Command::SamplerTrain { .. } => "sampler-train",
            Command::Sample { .. } => "sample",
            Command::Design { .. } => "design",
            Command::Metrics { .. } => "metrics",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    /// Line-oriented input; the model file for `sample`, the prompt spec
    /// for `design`.
    pub input_path: PathBuf,
    pub output_path: PathBuf,
    pub threads: usize,
    pub seed: u64,
    pub rule_file: Option<PathBuf>,
    /// Trained sampler, used by `design`.
    pub model_path: Option<PathBuf>,
}

impl JobConfig {
    pub fn new(command: Command, input_path: impl Into<PathBuf>, output_path: impl Into<PathBuf>) -> JobConfig {
        JobConfig {
            command,
            input_path: input_path.into(),
            output_path: output_path.into(),
            threads: 1,
            seed: 0,
            rule_file: None,
            model_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            bail!("threads must be at least 1");
        }
        if self.input_path == self.output_path {
            bail!("input and output must be different files: {}", self.input_path.display());
        }
        if let Command::Convert {
            chunk_size,
            max_excluded_fraction,
            ..
        } = &self.command
        {
            if *chunk_size == 0 {
                bail!("chunk size must be at least 1");
            }
            if !(0.0..=1.0).contains(max_excluded_fraction) {
                bail!("excluded-fraction threshold must lie in [0, 1]");
            }
        }
        Ok(())
    }
}

/// Thread count after applying the `SAFE_THREADS` override.
pub fn resolve_threads(requested: usize) -> Result<usize> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got {value:?}"))?,
        Err(_) => requested,
    };
    if threads == 0 {
        bail!("threads must be at least 1");
    }
    Ok(threads)
}
