//! Sequential model-based optimization on top of the shared-feature
//! Bayesian linear surrogate.
//!
//! The crate covers the loop around the model: describing a search space
//! and encoding it into the unit cube ([`SearchSpace`]), storing evaluation
//! histories with one or more response signals per point ([`TaskHistory`]),
//! fitting the multi-task surrogate ([`AblrSurrogate`]), scoring candidates
//! by expected improvement ([`expected_improvement`]), picking the next
//! configuration ([`propose_next`]), and running the full
//! propose-evaluate-record loop ([`run_bo`]).

pub mod acquisition;
pub mod error;
pub mod halton;
pub mod history;
pub mod propose;
pub mod run;
pub mod space;
pub mod surrogate;

pub use acquisition::{ei_of_prediction, expected_improvement, normal_cdf, normal_pdf};
pub use error::BoError;
pub use halton::ScrambledHalton;
pub use history::{
    attach_signals, augment_with_context, read_jsonl, write_jsonl, HistoryRecord, TaskHistory,
};
pub use propose::{propose_next, Candidates, Suggestion};
pub use run::{run_bo, BoTrace, FailureRecord, IterationRecord, RunSettings};
pub use space::{continuous, integer, ordinal, Dimension, DimensionKind, SearchSpace};
pub use surrogate::{AblrSurrogate, FeatureKind, FittedSurrogate, Surrogate, SurrogateSettings};
