use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use safe_cli::{resolve_threads, run, Command, JobConfig, DEFAULT_CHUNK_SIZE};
use safe_core::genlab::Task;

#[derive(Parser)]
#[command(name = "safe", version, about = "SAFE molecular line notation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Common {
    /// Input file.
    input: PathBuf,
    /// Output file.
    #[arg(short, long)]
    output: PathBuf,
    /// Worker threads (SAFE_THREADS overrides).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Sub {
    /// Convert a SMILES file to SAFE, one molecule per line.
    Convert {
        #[command(flatten)]
        common: Common,
        /// Bond-cut rule file (TSV: name, left, right, qualifiers).
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Per-line report path [default: <output>.report.tsv].
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
        chunk_size: usize,
        /// Fail when the excluded fraction exceeds this value.
        #[arg(long, default_value_t = 1.0)]
        max_excluded: f64,
    },
    /// Check that every SAFE line decodes and re-encodes to the same molecule.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Train a BPE vocabulary on a SAFE corpus.
    TokenizeTrain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vocab_size: usize,
        #[arg(long, default_value_t = 2)]
        min_frequency: usize,
    },
    /// Encode lines to token ids.
    TokenizeApply {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vocab: PathBuf,
        /// Wrap each line in BOS/EOS.
        #[arg(long)]
        framed: bool,
    },
    /// Train the n-gram sampler.
    SamplerTrain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Sample molecules from a trained model (the input file).
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, default_value_t = 128)]
        max_len: usize,
    },
    /// Run a design task over the prompts of a spec file.
    Design {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        task: Task,
        #[arg(long)]
        model: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, default_value_t = 128)]
        max_len: usize,
    },
    /// Validity, uniqueness and diversity of a set of SAFE or SMILES lines.
    Metrics {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        reference: Option<String>,
    },
}

fn job(command: Command, common: Common) -> Result<JobConfig> {
    let mut config = JobConfig::new(command, common.input, common.output);
    config.threads = resolve_threads(common.threads)?;
    config.seed = common.seed;
    Ok(config)
}

fn build(cli: Cli) -> Result<JobConfig> {
    Ok(match cli.command {
        Sub::Convert {
            common,
            rules,
            report,
            chunk_size,
            max_excluded,
        } => {
            let mut config = job(
                Command::Convert {
                    report,
                    chunk_size,
                    max_excluded_fraction: max_excluded,
                },
                common,
            )?;
            config.rule_file = rules;
            config
        }
        Sub::Check { common } => job(Command::Check, common)?,
        Sub::TokenizeTrain {
            common,
            vocab_size,
            min_frequency,
        } => job(
            Command::TokenizeTrain {
                vocab_size,
                min_frequency,
            },
            common,
        )?,
        Sub::TokenizeApply { common, vocab, framed } => job(Command::TokenizeApply { vocab, framed }, common)?,
        Sub::SamplerTrain { common, vocab, order } => job(Command::SamplerTrain { vocab, order }, common)?,
        Sub::Sample {
            common,
            n,
            temperature,
            max_len,
        } => job(
            Command::Sample {
                n,
                temperature,
                max_len,
            },
            common,
        )?,
        Sub::Design {
            spec,
            task,
            model,
            output,
            seed,
            n,
            temperature,
            max_len,
        } => {
            let mut config = JobConfig::new(
                Command::Design {
                    task,
                    n,
                    temperature,
                    max_len,
                },
                spec,
                output,
            );
            config.seed = seed;
            config.model_path = Some(model);
            config
        }
        Sub::Metrics { common, reference } => job(Command::Metrics { reference }, common)?,
    })
}

fn main() -> ExitCode {
    let result = build(Cli::parse()).and_then(|config| run(&config));
    match result {
        Ok(summary) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
