//! Fragment-constrained design tasks, a seedable n-gram sampler and
//! generation metrics.

mod error;
mod metrics;
mod ngram;
mod prompt;

pub use error::GenlabError;
pub use metrics::{evaluate_set, property_reward, reward_for_value, GenerationMetrics, Property, RewardSpec};
pub use ngram::{complete_prefix, sample_denovo, train_ngram, Completion, NGramModel, SMOOTHING};
pub use prompt::{make_prompt, verify_completion, PromptInput, RejectReason, Task, TaskPrompt, Verdict};
