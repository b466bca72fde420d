//! Benchmark harness for the transfer-learning optimizer: a synthetic
//! quadratic task family with leave-one-task-out rotation, replay tables of
//! recorded evaluations, an exact Gaussian-process baseline, multi-signal
//! comparisons, and wall-time scaling ladders — all emitting a shared
//! deterministic result schema.

pub mod error;
pub mod gp;
pub mod loto;
pub mod multisignal;
pub mod quadratic;
pub mod results;
pub mod runner;
pub mod stats;
pub mod tabular;
pub mod timing;

pub use error::BenchError;
pub use gp::{fit_gp_hyper, gp_nll_grad, GpHyper, GpModel, GpSurrogate, GP_LOG_BOUND};
pub use loto::{loto_run, LotoConfig, LotoOutcome, Method, MethodSummary};
pub use multisignal::{
    iterations_to_threshold, ms_iterations, ms_run_one, ms_signals, ms_space, ms_target,
    ms_threshold, signal_fit_ladder, MultiSignalConfig, SignalLadder,
};
pub use quadratic::{quad_eval, quad_space, sample_family, warm_history, QuadraticTask};
pub use results::{
    read_results_csv, sha256_file, sha256_hex, sort_rows, write_results_csv, Manifest, ResultRow,
    RESULTS_SCHEMA_VERSION,
};
pub use runner::{
    run_experiment, Experiment, MultiSignalExperiment, RunReport, TableSource, TabularExperiment,
    TabularMethod,
};
pub use tabular::{
    canonical_key, synthetic_table, tabular_bo, union_space, validate_table, TableSummary,
    TabularBlackBox, TabularRunSettings,
};
pub use timing::{ablr_fit_ladder, gp_fit_ladder, loglog_slope, TimingConfig, TimingLadder};
