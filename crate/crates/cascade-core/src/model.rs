//! Core state for sequential binary-action learning with fake agents.
//!
//! Agents act one at a time. Agent i draws a private binary signal of quality
//! `p` (the signal agrees with the true value `V` with probability `p`,
//! `0.5 < p < 1`) and observes the reported actions of all predecessors. With
//! probability `eps` an agent is fake and reports Y (buy) unconditionally;
//! otherwise it reports its Bayes-optimal action. Observers cannot tell the
//! two kinds apart, so a Y report carries less information than an N.
//!
//! The public history collapses to a single statistic `h = eta * n_Y - n_N`,
//! where `eta` in (0, 1] is the information weight of a Y relative to an N.
//! The history-only likelihood ratio is `l = ((1-p)/p)^h` and rational play
//! reduces to threshold rules on `h`: strictly above +1 every ordinary agent
//! buys regardless of its signal (a Y cascade), strictly below -1 none does
//! (an N cascade), and on [-1, 1] agents follow their signals. Cascades are
//! absorbing: once `h` leaves [-1, 1] the public state never changes again.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// The unknown quality of the item being bought, uniform prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrueValue {
    Good,
    Bad,
}

impl TrueValue {
    /// Single-letter code used in tabular output.
    pub fn code(self) -> &'static str {
        match self {
            TrueValue::Good => "G",
            TrueValue::Bad => "B",
        }
    }
}

impl fmt::Display for TrueValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TrueValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "g" | "good" => Ok(TrueValue::Good),
            "b" | "bad" => Ok(TrueValue::Bad),
            other => Err(format!("expected G or B, got {other:?}")),
        }
    }
}

/// A private signal: `High` favors `Good`, `Low` favors `Bad`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    High,
    Low,
}

/// A binary action. Reported actions (observations) share this type: a report
/// is the agent's action, except that fake agents always report `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    /// Buy.
    Y,
    /// Do not buy.
    N,
}

/// A predecessor's reported action as seen by later agents.
pub type Observation = Action;

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Y => "Y",
            Action::N => "N",
        })
    }
}

/// Absorption state of the public history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CascadeStatus {
    /// The walk is still inside [-1, 1]; agents follow their signals.
    Undecided,
    /// h moved strictly above +1; everyone buys from here on.
    YCascade,
    /// h moved strictly below -1; nobody buys from here on.
    NCascade,
}

/// Validated model parameters (signal quality, fake fraction, true value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    p: f64,
    eps: f64,
    true_value: TrueValue,
}

impl ModelParams {
    /// Requires `0.5 < p < 1` and `0 <= eps < 1`.
    pub fn new(p: f64, eps: f64, true_value: TrueValue) -> Result<Self, Error> {
        if !(p > 0.5 && p < 1.0) {
            return Err(Error::SignalQualityOutOfRange(p));
        }
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::FakeFractionOutOfRange(eps));
        }
        Ok(ModelParams { p, eps, true_value })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn true_value(&self) -> TrueValue {
        self.true_value
    }
}

/// Quantities derived from `ModelParams` that the analytic formulas consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// P(observe Y | V = G) before any cascade: `p + (1-p) * eps`.
    pub a: f64,
    /// P(agent is ordinary and acts N | V = B): `p * (1 - eps)`.
    /// Pre-cascade, P(observe Y | V = B) is `1 - b`.
    pub b: f64,
    /// Signal likelihood ratio `p / (1-p)`, strictly above 1.
    pub alpha: f64,
    /// Information weight of one Y observation: `ln(a / (1-b)) / ln(alpha)`.
    /// Lies in (0, 1] and equals exactly 1 at eps = 0.
    pub eta: f64,
    /// Pre-cascade probability of observing Y under the configured true value:
    /// `a` if V = G, `1 - b` if V = B.
    pub p_f: f64,
    /// `floor(1 / eta)`: with eps in the r-th threshold interval, r + 1
    /// consecutive Y observations from h = 0 start a Y cascade.
    pub r: u64,
}

/// Information weight of a Y observation. Assumes the `ModelParams` domain;
/// exact 1.0 at eps = 0 because numerator and denominator are the same bits.
pub(crate) fn eta_raw(p: f64, eps: f64) -> f64 {
    let a = p + (1.0 - p) * eps;
    let b = p * (1.0 - eps);
    (a / (1.0 - b)).ln() / (p / (1.0 - p)).ln()
}

/// Computes the derived quantities `a`, `b`, `alpha`, `eta`, `p_f` and `r`.
pub fn derive_params(params: &ModelParams) -> DerivedParams {
    let p = params.p();
    let eps = params.eps();
    let a = p + (1.0 - p) * eps;
    let b = p * (1.0 - eps);
    let alpha = p / (1.0 - p);
    let eta = eta_raw(p, eps);
    let p_f = match params.true_value() {
        TrueValue::Good => a,
        TrueValue::Bad => 1.0 - b,
    };
    // Saturating cast: eta > 0 always, but eps within an ulp of 1 can push
    // 1/eta beyond any practical cascade length.
    let r = (1.0 / eta).floor() as u64;
    DerivedParams {
        a,
        b,
        alpha,
        eta,
        p_f,
        r,
    }
}

/// History-only likelihood ratio and posterior at statistic `h`.
///
/// Returns `(l, gamma)` with `l = ((1-p)/p)^h = P(history | B) / P(history | G)`
/// and `gamma = 1 / (1 + l) = P(V = G | history)`.
///
/// # Panics
/// In debug builds if `p` is outside (0.5, 1).
pub fn likelihood_from_h(h: f64, p: f64) -> (f64, f64) {
    debug_assert!(p > 0.5 && p < 1.0);
    let l = ((1.0 - p) / p).powf(h);
    (l, 1.0 / (1.0 + l))
}

/// An ordinary agent's optimal play at history statistic `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub action: Action,
    /// True when the history alone fixes the action (a cascade is running).
    pub in_cascade: bool,
}

/// Bayes-optimal action at statistic `h` given the private signal.
///
/// Equivalent to comparing the likelihood ratio `l = ((1-p)/p)^h` against
/// `(1-p)/p` and `p/(1-p)`: `l` below the former forces Y, above the latter
/// forces N. In `h` terms those cuts are `h > 1` and `h < -1`; both
/// inequalities are strict, so at `h = +1` or `h = -1` the signal still
/// decides.
pub fn decide(h: f64, signal: Signal) -> Decision {
    if h > 1.0 {
        Decision {
            action: Action::Y,
            in_cascade: true,
        }
    } else if h < -1.0 {
        Decision {
            action: Action::N,
            in_cascade: true,
        }
    } else {
        let action = match signal {
            Signal::High => Action::Y,
            Signal::Low => Action::N,
        };
        Decision {
            action,
            in_cascade: false,
        }
    }
}

/// Public history reduced to the walk statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkState {
    /// Current value of `eta * n_Y - n_N`; frozen at absorption.
    pub h: f64,
    pub status: CascadeStatus,
    /// Observations consumed so far.
    pub steps: u64,
}

impl WalkState {
    /// Empty history: `h = 0`, undecided.
    pub fn new() -> Self {
        WalkState {
            h: 0.0,
            status: CascadeStatus::Undecided,
            steps: 0,
        }
    }
}

impl Default for WalkState {
    fn default() -> Self {
        Self::new()
    }
}

/// Advances the walk by one observation: +eta on Y, -1 on N, with absorbing
/// exits strictly outside [-1, 1]. Once absorbed, `h` and the status are
/// frozen and only the step count advances.
pub fn walk_update(state: &WalkState, obs: Observation, d: &DerivedParams) -> WalkState {
    let steps = state.steps + 1;
    if state.status != CascadeStatus::Undecided {
        return WalkState { steps, ..*state };
    }
    let h = match obs {
        Action::Y => state.h + d.eta,
        Action::N => state.h - 1.0,
    };
    let status = if h > 1.0 {
        CascadeStatus::YCascade
    } else if h < -1.0 {
        CascadeStatus::NCascade
    } else {
        CascadeStatus::Undecided
    };
    WalkState { h, status, steps }
}
