//! Batch front end for the SAFE toolkit: corpus conversion and checking
//! with an order-preserving parallel map, plus file bindings for
//! tokenizer training, sampling, design tasks and metrics.

mod commands;
mod config;
mod convert;

pub use commands::{
    design, load_model, load_vocab, merges_path, metrics, parse_design_spec, sample, sampler_train, tokenize_apply, tokenize_train,
    DesignBatch, DesignSpec,
};
pub use config::{resolve_threads, Command, JobConfig, DEFAULT_CHUNK_SIZE, THREADS_ENV};
pub use convert::{
    check_line, convert_line, report_path, run_convert, run_roundtrip_check, ConversionStats, LineOutcome,
    RoundtripFailure, RoundtripReport, REPORT_HEADER,
};

use anyhow::{bail, Context, Result};

/// Runs a job and returns a one-line summary; errors when the job ran but
/// failed its pass criterion (excluded fraction above threshold,
/// round-trip failures).
pub fn run(config: &JobConfig) -> Result<String> {
    config.validate()?;
    match &config.command {
        Command::Convert {
            max_excluded_fraction, ..
        } => {
            let s = run_convert(config)?;
            let summary = format!(
                "n_in={} n_ok={} n_fallback={} n_excluded={} wall_time={:.3}s",
                s.n_in,
                s.n_ok,
                s.n_fallback,
                s.n_excluded,
                s.wall_time.as_secs_f64()
            );
            if s.excluded_fraction() > *max_excluded_fraction {
                bail!("{summary}: excluded fraction {:.4} above threshold", s.excluded_fraction());
            }
            Ok(summary)
        }
        Command::Check => {
            let r = run_roundtrip_check(config)?;
            let summary = format!("checked={} failures={}", r.n_checked, r.failures.len());
            if !r.passed() {
                bail!("{summary}; see {}", config.output_path.display());
            }
            Ok(summary)
        }
        Command::TokenizeTrain {
            vocab_size,
            min_frequency,
        } => {
            let used = tokenize_train(config, *vocab_size, *min_frequency)?;
            Ok(format!("trained on {used} lines"))
        }
        Command::TokenizeApply { vocab, framed } => {
            let n = tokenize_apply(config, vocab, *framed)?;
            Ok(format!("encoded {n} lines"))
        }
        Command::SamplerTrain { vocab, order } => {
            let n = sampler_train(config, vocab, *order)?;
            Ok(format!("trained order-{order} model on {n} lines"))
        }
        Command::Sample {
            n,
            temperature,
            max_len,
        } => {
            let samples = sample(config, *n, *temperature, *max_len)?;
            let accepted = samples.iter().filter(|c| c.verdict.is_accepted()).count();
            Ok(format!("sampled {} ({accepted} valid)", samples.len()))
        }
        Command::Design {
            task,
            n,
            temperature,
            max_len,
        } => {
            let model = config.model_path.as_deref().context("design needs --model")?;
            let batches = design(config, model, *task, *n, *temperature, *max_len)?;
            let total: usize = batches.iter().map(|b| b.completions.len()).sum();
            let accepted: usize = batches
                .iter()
                .flat_map(|b| &b.completions)
                .filter(|c| c.verdict.is_accepted())
                .count();
            Ok(format!("{} prompts, {total} completions, {accepted} accepted", batches.len()))
        }
        Command::Metrics { reference } => {
            let m = metrics(config, reference.as_deref())?;
            Ok(format!(
                "validity={:.4} uniqueness={:.4} diversity={:.4}",
                m.validity, m.uniqueness, m.diversity
            ))
        }
    }
}
