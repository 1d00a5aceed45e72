//! Stochastic oracle: full agent-level simulation and the reduced walk,
//! coupled on shared randomness.
//!
//! Every agent consumes exactly two uniform draws in a fixed order, first
//! `u_fake` (is this agent fake?), then `u_signal` (its private signal), and
//! the draws are consumed even when unused. Because of that, the agent-level
//! trial (which runs the Bayes decision rule) and the walk-level trial (which
//! constructs observations directly from the pre-cascade reduction) see
//! identical observation sequences when given the same stream, and must
//! produce identical records. Comparing the two certifies that the walk
//! statistic really is sufficient for rational play.
//!
//! Trials use counter-keyed substreams: trial i of a run with seed s reads
//! stream i of a ChaCha8 generator seeded with s. Aggregation adds integer
//! counts only, so estimates are bit-identical regardless of how trials are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::{
    decide, derive_params, walk_update, Action, CascadeStatus, ModelParams, Signal, TrueValue,
    WalkState,
};

/// Default trial length; undecided mass at this horizon is far below Monte
/// Carlo noise at any feasible trial count.
pub const DEFAULT_HORIZON: u64 = 10_000;

/// Outcome of one simulated trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub outcome: CascadeStatus,
    /// Step at which the walk left [-1, 1]; `None` iff still undecided at the
    /// horizon.
    pub absorption_step: Option<u64>,
    pub final_h: f64,
}

/// Aggregated estimate over independent trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationResult {
    pub trials: u64,
    pub y_count: u64,
    pub n_count: u64,
    pub undecided_count: u64,
    /// `y_count / trials`; undecided trials stay in the denominator, so the
    /// undecided fraction bounds the extra bias.
    pub p_ycas_hat: f64,
    /// 95% normal-approximation half-width `1.96 * sqrt(p(1-p)/trials)`.
    pub ci_halfwidth: f64,
    pub seed: u64,
    pub horizon: u64,
}

/// The generator for trial `trial_index` of a run keyed by `seed`.
///
/// Counter-based: the mapping from (seed, index) to a stream involves no
/// sequential state, so any subset of trials can run in any order on any
/// thread and still read exactly the same numbers.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// The private signal encoded from one uniform draw: matches the true value
/// with probability p.
fn signal_from_uniform(v: TrueValue, p: f64, u: f64) -> Signal {
    match v {
        TrueValue::Good => {
            if u < p {
                Signal::High
            } else {
                Signal::Low
            }
        }
        TrueValue::Bad => {
            if u < p {
                Signal::Low
            } else {
                Signal::High
            }
        }
    }
}

fn record_from(state: &WalkState) -> TrialRecord {
    TrialRecord {
        outcome: state.status,
        absorption_step: (state.status != CascadeStatus::Undecided).then_some(state.steps),
        final_h: state.h,
    }
}

/// One trial of the full model: each agent applies the Bayes decision rule to
/// the public statistic and its signal, fakes override the report with Y, and
/// the public statistic advances on the reported action. Stops at absorption
/// or after `horizon` agents.
pub fn simulate_trial_agent_level<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
    horizon: u64,
) -> TrialRecord {
    assert!(horizon >= 1);
    let d = derive_params(params);
    let mut state = WalkState::new();
    for _ in 0..horizon {
        let u_fake: f64 = rng.random();
        let u_signal: f64 = rng.random();
        let signal = signal_from_uniform(params.true_value(), params.p(), u_signal);
        let decision = decide(state.h, signal);
        let observed = if u_fake < params.eps() {
            Action::Y
        } else {
            decision.action
        };
        state = walk_update(&state, observed, &d);
        if state.status != CascadeStatus::Undecided {
            break;
        }
    }
    record_from(&state)
}

/// One trial of the reduced walk: consumes the same two draws per step in the
/// same order as the agent-level trial and builds the observation directly
/// (Y iff the agent is fake or its signal favors buying), without consulting
/// the decision rule. Identical streams give identical records.
pub fn simulate_trial_walk_level<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
    horizon: u64,
) -> TrialRecord {
    assert!(horizon >= 1);
    let d = derive_params(params);
    let mut state = WalkState::new();
    for _ in 0..horizon {
        let u_fake: f64 = rng.random();
        let u_signal: f64 = rng.random();
        let signal = signal_from_uniform(params.true_value(), params.p(), u_signal);
        let observed = if u_fake < params.eps() || signal == Signal::High {
            Action::Y
        } else {
            Action::N
        };
        state = walk_update(&state, observed, &d);
        if state.status != CascadeStatus::Undecided {
            break;
        }
    }
    record_from(&state)
}

/// Y-cascade frequency over `trials` independent walk-level trials.
///
/// Bit-identical for fixed `(seed, trials, horizon)` no matter how many
/// threads execute it.
pub fn estimate_p_ycas(
    params: &ModelParams,
    trials: u64,
    seed: u64,
    horizon: u64,
) -> SimulationResult {
    assert!(trials >= 1);
    assert!(horizon >= 1);
    let (y, n, undecided) = (0..trials)
        .into_par_iter()
        .fold(
            || (0u64, 0u64, 0u64),
            |(y, n, u), i| {
                let mut rng = trial_rng(seed, i);
                match simulate_trial_walk_level(params, &mut rng, horizon).outcome {
                    CascadeStatus::YCascade => (y + 1, n, u),
                    CascadeStatus::NCascade => (y, n + 1, u),
                    CascadeStatus::Undecided => (y, n, u + 1),
                }
            },
        )
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let p_hat = y as f64 / trials as f64;
    SimulationResult {
        trials,
        y_count: y,
        n_count: n,
        undecided_count: undecided,
        p_ycas_hat: p_hat,
        ci_halfwidth: 1.96 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        seed,
        horizon,
    }
}
