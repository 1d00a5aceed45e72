//! Probability of a buy cascade in sequential learning with fake agents.
//!
//! A countable line of agents decides whether to buy an item of unknown
//! binary quality. Each agent sees a private noisy signal and the reported
//! actions of everyone before it; a fraction `eps` of agents are fake and
//! report "buy" no matter what. Rational agents discount buy reports
//! accordingly, and once the public evidence is lopsided enough they ignore
//! their own signals entirely: an information cascade, which then locks in
//! forever.
//!
//! The crate computes the probability that a buy cascade occurs:
//!
//! * [`model`]: parameters, Bayes decision rule, and the sufficient-statistic
//!   random walk with absorbing barriers.
//! * [`thresholds`]: the fake-fraction thresholds where the number of
//!   consecutive buy reports needed to start a cascade steps up, and the
//!   stage enumeration built on them.
//! * [`analytic`]: the truncated stage recursion with a deterministic error
//!   bound, exact closed forms at `eps = 0` and at the thresholds, and the
//!   limits `eps -> 0` and `eps -> 1`.
//! * [`monte_carlo`]: a coupled agent-level/walk-level simulator serving as
//!   an independent stochastic oracle.

pub mod analytic;
pub mod error;
pub mod model;
pub mod monte_carlo;
pub mod thresholds;

pub use analytic::{CascadeEstimate, EpsLowerEstimate, Method, ThresholdSide};
pub use error::Error;
pub use model::{
    Action, CascadeStatus, Decision, DerivedParams, ModelParams, Observation, Signal, TrueValue,
    WalkState,
};
pub use monte_carlo::{SimulationResult, TrialRecord};
pub use thresholds::{StageSequence, ThresholdTable};
