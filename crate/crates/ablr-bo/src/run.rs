//! The sequential optimization loop: refit, propose, evaluate, record.

use std::time::Instant;

use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::BoError;
use crate::history::TaskHistory;
use crate::propose::{propose_next, Candidates};
use crate::space::SearchSpace;
use crate::surrogate::Surrogate;

/// Knobs for a single optimization run.
#[derive(Debug, Clone)]
pub struct RunSettings {
    /// Total number of target-task evaluations.
    pub budget: usize,
    /// Random initial points used when no warm-start data exists.
    pub init_random: usize,
    /// Low-discrepancy candidates scanned per proposal.
    pub candidate_count: usize,
    /// Fresh proposals allowed after a failed evaluation before aborting.
    pub retries: usize,
    /// Which signal column drives the incumbent.
    pub target_signal: usize,
    /// Base seed for all per-iteration randomness.
    pub seed: u64,
    /// Record per-iteration wall time (otherwise reported as 0).
    pub record_timings: bool,
}

impl RunSettings {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            init_random: 3,
            candidate_count: 5000,
            retries: 3,
            target_signal: 0,
            seed,
            record_timings: false,
        }
    }
}

/// One successful evaluation.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    pub x_enc: Array1<f64>,
    pub x_natural: Vec<f64>,
    pub signals: Vec<f64>,
    /// Best observed target-signal value up to and including this iteration.
    pub incumbent: f64,
    pub wall_ms: f64,
}

/// One failed evaluation attempt.
#[derive(Debug, Clone)]
pub struct FailureRecord {
    pub iteration: usize,
    pub attempt: usize,
    pub x_natural: Vec<f64>,
    pub message: String,
}

/// Full run output. `aborted` is set when an iteration exhausted its retry
/// allowance; `records` then holds the partial trace.
#[derive(Debug, Clone)]
pub struct BoTrace {
    pub records: Vec<IterationRecord>,
    pub failures: Vec<FailureRecord>,
    pub aborted: bool,
    pub target: TaskHistory,
}

/// Independent deterministic RNG stream per (purpose, iteration) pair.
fn stream(seed: u64, tag: u64, i: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(
        seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
            ^ i.wrapping_mul(0xD1B5_4A32_D192_ED03),
    )
}

const TAG_INIT: u64 = 1;
const TAG_PROPOSE: u64 = 2;
const TAG_RETRY: u64 = 3;

fn incumbent_of(target: &TaskHistory, signal: usize) -> Option<f64> {
    if target.is_empty() {
        None
    } else {
        Some(
            target
                .signal(signal)
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min),
        )
    }
}

/// Run the optimize-evaluate loop against `black_box`.
///
/// `warm` holds sibling-task histories (possibly empty); the target task
/// starts empty and is grown in place. With no warm data the first
/// `init_random` points are drawn uniformly; with warm data every proposal
/// is model-based from the start. Evaluation failures are recorded and
/// retried with a fresh uniformly drawn point (model state is unchanged by
/// a failure); exhausting the retry allowance aborts with a partial trace.
pub fn run_bo<S, F>(
    black_box: &mut F,
    space: &SearchSpace,
    warm: &[TaskHistory],
    surrogate: &mut S,
    signal_count: usize,
    settings: &RunSettings,
) -> Result<BoTrace, BoError>
where
    S: Surrogate + ?Sized,
    F: FnMut(&[f64]) -> Result<Vec<f64>, String> + ?Sized,
{
    if settings.target_signal >= signal_count {
        return Err(BoError::InvalidConfig(format!(
            "target signal {} out of range for {} signals",
            settings.target_signal, signal_count
        )));
    }
    for t in warm {
        if t.num_signals() != signal_count {
            return Err(BoError::InvalidHistory(format!(
                "warm task '{}' has {} signals, run expects {}",
                t.task_id,
                t.num_signals(),
                signal_count
            )));
        }
    }

    let mut tasks: Vec<TaskHistory> = warm.to_vec();
    tasks.push(TaskHistory::empty("target", space.len(), signal_count));
    let target_idx = tasks.len() - 1;
    let have_warm = warm.iter().any(|t| !t.is_empty());

    let mut trace = BoTrace {
        records: Vec::with_capacity(settings.budget),
        failures: Vec::new(),
        aborted: false,
        target: TaskHistory::empty("target", space.len(), signal_count),
    };

    for iteration in 0..settings.budget {
        let timer = Instant::now();
        let model_based = have_warm || tasks[target_idx].len() >= settings.init_random;
        let x_enc = if model_based {
            surrogate.refit(&tasks, target_idx)?;
            let incumbent = incumbent_of(&tasks[target_idx], settings.target_signal);
            let mut rng = stream(settings.seed, TAG_PROPOSE, iteration as u64);
            let sg: &S = surrogate;
            propose_next(
                |xs| sg.predict(xs),
                space,
                incumbent,
                Candidates::Sampled {
                    count: settings.candidate_count,
                },
                sg.ei_uses_noise(),
                &mut rng,
            )?
            .x_enc
        } else {
            let mut rng = stream(settings.seed, TAG_INIT, iteration as u64);
            space.random_point(&mut rng)
        };

        let mut attempt = 0usize;
        let mut x = x_enc;
        let outcome = loop {
            let natural = space.decode(&x.view());
            let verdict = match black_box(&natural) {
                Ok(sig) if sig.len() != signal_count => Err(format!(
                    "evaluation returned {} signals, expected {}",
                    sig.len(),
                    signal_count
                )),
                Ok(sig) if sig.iter().any(|v| !v.is_finite()) => {
                    Err("evaluation returned a non-finite signal".to_string())
                }
                Ok(sig) => Ok(sig),
                Err(e) => Err(e),
            };
            match verdict {
                Ok(sig) => break Some((x, natural, sig)),
                Err(message) => {
                    trace.failures.push(FailureRecord {
                        iteration,
                        attempt,
                        x_natural: natural,
                        message,
                    });
                    if attempt >= settings.retries {
                        break None;
                    }
                    attempt += 1;
                    // Deterministic fresh point; refitting on unchanged data
                    // would reproduce the failing proposal.
                    let mut rng = stream(
                        settings.seed,
                        TAG_RETRY,
                        ((iteration as u64) << 8) | attempt as u64,
                    );
                    x = space.random_point(&mut rng);
                }
            }
        };

        match outcome {
            None => {
                trace.aborted = true;
                trace.target = tasks.swap_remove(target_idx);
                return Ok(trace);
            }
            Some((x, natural, signals)) => {
                tasks[target_idx].push(&x.view(), &signals);
                let incumbent = incumbent_of(&tasks[target_idx], settings.target_signal)
                    .expect("target has observations after push");
                let wall_ms = if settings.record_timings {
                    timer.elapsed().as_secs_f64() * 1e3
                } else {
                    0.0
                };
                trace.records.push(IterationRecord {
                    iteration,
                    x_enc: x,
                    x_natural: natural,
                    signals,
                    incumbent,
                    wall_ms,
                });
            }
        }
    }

    trace.target = tasks.swap_remove(target_idx);
    Ok(trace)
}
