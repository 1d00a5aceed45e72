//! Closed forms and the truncated stage recursion for the Y-cascade
//! probability.
//!
//! With `eps` strictly inside an interval `I_r`, every history that ends in a
//! Y cascade decomposes into stages: stage n is `r_n` consecutive Y's (which
//! absorb) or `r_n` Y's plus one N (which persist). Writing `S_n` for the
//! probability of eventually absorbing given the process reached stage n,
//!
//! ```text
//! S_n = p_f^{r_n} * (1 + r_n * (1 - p_f) * S_{n+1}),
//! ```
//!
//! and the Y-cascade probability is `S_1`. Truncating at depth M by setting
//! `S_{M+1} = 1` gives an upper bound whose error is at most `k^M` with
//! `k = (r+1)(1-p_f)p_f^r`; `k` never exceeds 1/2, so a depth of 10 already
//! guarantees three correct digits.
//!
//! At the thresholds themselves the recursion is invalid, but both one-sided
//! limits have closed forms, and the relative drop between them is
//! `delta_r = (1-p_f)(1-p_f^{r+1})`. Additional closed forms cover `eps = 0`
//! exactly, the limit `eps -> 0`, and the limit `eps -> 1`.

use std::fmt;

use crate::error::Error;
use crate::model::{derive_params, DerivedParams, ModelParams, TrueValue};
use crate::thresholds::{epsilon_threshold, stage_sequence_with_tol, GUARD_TOL};

/// Default truncation depth: worst-case error 2^-40.
pub const STAGES_DEFAULT: usize = 40;

/// Coarse truncation depth whose error bound stays below 1e-3 at every
/// parameter point, because k <= 1/2.
pub const STAGES_COARSE: usize = 10;

/// How a [`CascadeEstimate`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Truncated stage recursion; deterministic error bound `k^M`.
    Recursion,
    /// Right-sided closed form at a threshold `eps_r` (exact).
    ClosedFormThresholdPlus,
    /// Left-sided closed form at a threshold `eps_r` (exact).
    ClosedFormThresholdMinus,
    /// Exact two-barrier absorption formula at `eps = 0`.
    BaselineEpsZero,
    /// Limit of the cascade probability as `eps -> 0` from above.
    LimitEpsToZero,
    /// Limit of the cascade probability as `eps -> 1`.
    LimitEpsToOne,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Recursion => "Recursion",
            Method::ClosedFormThresholdPlus => "ClosedFormThresholdPlus",
            Method::ClosedFormThresholdMinus => "ClosedFormThresholdMinus",
            Method::BaselineEpsZero => "BaselineEpsZero",
            Method::LimitEpsToZero => "LimitEpsToZero",
            Method::LimitEpsToOne => "LimitEpsToOne",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A probability with a deterministic error bound.
///
/// For `Recursion` the exact probability lies in
/// `[value - error_bound, value]`; every other method is exact and carries
/// `error_bound = 0` and `stages = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub method: Method,
    /// Truncation depth M used; 0 for closed forms and limits.
    pub stages: usize,
}

/// Which one-sided limit to evaluate at a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdSide {
    /// Limit from below (`eps -> eps_r^-`).
    Minus,
    /// Limit from above (`eps -> eps_r^+`).
    Plus,
}

/// `x^n` for unsigned n, total over the full u64 range.
fn powu(x: f64, n: u64) -> f64 {
    if n <= i32::MAX as u64 {
        x.powi(n as i32)
    } else {
        x.powf(n as f64)
    }
}

/// Per-stage persistence bound `k = (r+1)(1-p_f)p_f^r`.
///
/// The probability that the process survives one full stage without absorbing
/// is at most `k`, so truncating the recursion at depth M costs at most
/// `k^M`. Over the whole domain `0 < k <= 1/2`.
pub fn truncation_rate(d: &DerivedParams) -> f64 {
    (d.r + 1) as f64 * (1.0 - d.p_f) * powu(d.p_f, d.r)
}

/// Y-cascade probability by the depth-M truncated recursion.
///
/// Returns an upper bound on the exact probability together with the
/// truncation bound `k^M`. Errors if `eps = 0` (exact closed form available
/// via [`p_ycas_no_fakes`]) or if the point falls in the threshold guard
/// band (one-sided forms available via [`p_ycas_at_threshold`]).
pub fn p_ycas_truncated(params: &ModelParams, m: usize) -> Result<CascadeEstimate, Error> {
    p_ycas_truncated_with_tol(params, m, GUARD_TOL)
}

/// As [`p_ycas_truncated`] with an explicit guard-band width.
pub fn p_ycas_truncated_with_tol(
    params: &ModelParams,
    m: usize,
    guard_tol: f64,
) -> Result<CascadeEstimate, Error> {
    assert!(m >= 1, "truncation depth must be positive");
    if params.eps() == 0.0 {
        return Err(Error::EpsZeroHasClosedForm);
    }
    let d = derive_params(params);
    let seq = stage_sequence_with_tol(&d, m, guard_tol)?;
    let q = 1.0 - d.p_f;
    let mut s = 1.0;
    for &r_n in seq.r_values.iter().rev() {
        s = powu(d.p_f, r_n) * (1.0 + r_n as f64 * q * s);
    }
    Ok(CascadeEstimate {
        value: s,
        error_bound: truncation_rate(&d).powi(m as i32),
        method: Method::Recursion,
        stages: m,
    })
}

fn p_f_at(p: f64, eps: f64, v: TrueValue) -> f64 {
    match v {
        TrueValue::Good => p + (1.0 - p) * eps,
        TrueValue::Bad => 1.0 - p * (1.0 - eps),
    }
}

/// One-sided Y-cascade probability exactly at the threshold `eps_r`.
///
/// Both limits share the denominator `1 - r(1-p_f)p_f^r` with `p_f`
/// evaluated at `eps_r`:
///
/// ```text
/// Minus = p_f^r / D,    Plus = p_f^{r+1} (1 + (1-p_f) p_f^r) / D.
/// ```
///
/// `Minus` requires `r >= 2`: the first threshold is `eps = 0` itself, which
/// has no left side.
///
/// # Panics
/// If `p` is outside (0.5, 1) or `r = 0`.
pub fn p_ycas_at_threshold(
    p: f64,
    r: u64,
    v: TrueValue,
    side: ThresholdSide,
) -> Result<CascadeEstimate, Error> {
    assert!(p > 0.5 && p < 1.0, "signal quality out of range: {p}");
    assert!(r >= 1, "threshold index starts at 1");
    if side == ThresholdSide::Minus && r < 2 {
        return Err(Error::NoMinusFormAtFirstThreshold);
    }
    let eps_r = epsilon_threshold(p, r);
    let p_f = p_f_at(p, eps_r, v);
    let pf_r = powu(p_f, r);
    let denom = 1.0 - r as f64 * (1.0 - p_f) * pf_r;
    let (value, method) = match side {
        ThresholdSide::Minus => (pf_r / denom, Method::ClosedFormThresholdMinus),
        ThresholdSide::Plus => (
            p_f * pf_r * (1.0 + (1.0 - p_f) * pf_r) / denom,
            Method::ClosedFormThresholdPlus,
        ),
    };
    Ok(CascadeEstimate {
        value,
        error_bound: 0.0,
        method,
        stages: 0,
    })
}

/// Fractional drop of the Y-cascade probability as `eps` crosses `eps_r`
/// from below: `(Minus - Plus)/Minus = (1-p_f)(1-p_f^{r+1})`, with `p_f`
/// evaluated at `eps_r`. Lies in (0, 1) and vanishes as `r -> infinity`.
///
/// # Panics
/// If `p` is outside (0.5, 1) or `r < 2` (the first threshold has no drop).
pub fn delta_r(p: f64, r: u64, v: TrueValue) -> f64 {
    assert!(p > 0.5 && p < 1.0, "signal quality out of range: {p}");
    assert!(r >= 2, "the drop is defined at eps_r for r >= 2");
    let p_f = p_f_at(p, epsilon_threshold(p, r), v);
    (1.0 - p_f) * (1.0 - p_f * powu(p_f, r))
}

/// Exact Y-cascade probability at `eps = 0`.
///
/// Without fakes, `eta = 1` and the walk needs two net Y's before two net
/// N's; absorption odds are `p_f^2 : (1-p_f)^2`.
///
/// # Panics
/// If `p` is outside (0.5, 1).
pub fn p_ycas_no_fakes(p: f64, v: TrueValue) -> CascadeEstimate {
    assert!(p > 0.5 && p < 1.0, "signal quality out of range: {p}");
    let p_f = p_f_at(p, 0.0, v);
    let q = 1.0 - p_f;
    CascadeEstimate {
        value: p_f * p_f / (p_f * p_f + q * q),
        error_bound: 0.0,
        method: Method::BaselineEpsZero,
        stages: 0,
    }
}

/// Limit of the Y-cascade probability as `eps -> 0` from above.
///
/// Strictly below [`p_ycas_no_fakes`] for every p: an infinitesimal fake
/// fraction already discounts Y observations enough to lower the cascade
/// probability discontinuously.
///
/// # Panics
/// If `p` is outside (0.5, 1).
pub fn p_ycas_limit_eps0(p: f64, v: TrueValue) -> CascadeEstimate {
    assert!(p > 0.5 && p < 1.0, "signal quality out of range: {p}");
    let pq = p * (1.0 - p);
    let factor = (1.0 + pq) / (1.0 - pq);
    let lead = match v {
        TrueValue::Good => p * p,
        TrueValue::Bad => (1.0 - p) * (1.0 - p),
    };
    CascadeEstimate {
        value: lead * factor,
        error_bound: 0.0,
        method: Method::LimitEpsToZero,
        stages: 0,
    }
}

/// Limit of the Y-cascade probability as `eps -> 1`: `1/(e^t - t)` with
/// `t = ln(alpha)/(alpha-1)` for V = G and `t = alpha ln(alpha)/(alpha-1)`
/// for V = B.
///
/// # Panics
/// If `p` is outside (0.5, 1).
pub fn p_ycas_limit_eps1(p: f64, v: TrueValue) -> CascadeEstimate {
    assert!(p > 0.5 && p < 1.0, "signal quality out of range: {p}");
    let alpha = p / (1.0 - p);
    let base = alpha.ln() / (alpha - 1.0);
    let t = match v {
        TrueValue::Good => base,
        TrueValue::Bad => alpha * base,
    };
    CascadeEstimate {
        value: 1.0 / (t.exp() - t),
        error_bound: 0.0,
        method: Method::LimitEpsToOne,
        stages: 0,
    }
}

/// Result of the scan for the smallest fake fraction whose cascade
/// probability climbs back to the no-fakes baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsLowerEstimate {
    /// Crossing estimate when found, otherwise the scan's upper end.
    pub eps_lower: f64,
    pub crossing_found: bool,
}

/// Scans `eps = grid_step, 2*grid_step, ...` for the first point where the
/// depth-40 recursion reaches `p_ycas_no_fakes(p, v)`, then bisects the
/// bracketing step down to `refine_tol`.
///
/// The curve is piecewise in `eps` with a drop at every threshold, so the
/// returned value is a bracket estimate at grid resolution, not a root of a
/// continuous function. Guard-band points are skipped during both the scan
/// and the refinement. Below the returned value (outside skipped bands) the
/// probability stays under the baseline at the scan's resolution.
///
/// # Panics
/// If `p` is outside (0.5, 1) or either tolerance is not positive.
pub fn find_eps_lower(p: f64, v: TrueValue, grid_step: f64, refine_tol: f64) -> EpsLowerEstimate {
    assert!(p > 0.5 && p < 1.0, "signal quality out of range: {p}");
    assert!(grid_step > 0.0 && refine_tol > 0.0);
    let baseline = p_ycas_no_fakes(p, v).value;
    // None: not evaluable (guard band). Some(true): still below the baseline.
    let below = |eps: f64| -> Option<bool> {
        let params = ModelParams::new(p, eps, v).ok()?;
        let est = p_ycas_truncated(&params, STAGES_DEFAULT).ok()?;
        Some(est.value < baseline)
    };

    let mut lo = 0.0; // the limit eps -> 0+ sits strictly below the baseline
    let mut hi = None;
    let mut last = 0.0;
    for i in 1.. {
        let eps = i as f64 * grid_step;
        if eps >= 1.0 {
            break;
        }
        last = eps;
        match below(eps) {
            Some(true) => lo = eps,
            Some(false) => {
                hi = Some(eps);
                break;
            }
            None => {}
        }
    }
    let Some(mut hi) = hi else {
        return EpsLowerEstimate {
            eps_lower: last,
            crossing_found: false,
        };
    };
    while hi - lo > refine_tol {
        let mid = 0.5 * (lo + hi);
        // A guard-banded midpoint is displaced; if the displaced cut is banded
        // too the bracket is already tighter than the band spacing.
        let cut = match below(mid) {
            Some(_) => mid,
            None => lo + 0.45 * (hi - lo),
        };
        match below(cut) {
            Some(true) => lo = cut,
            Some(false) => hi = cut,
            None => break,
        }
    }
    EpsLowerEstimate {
        eps_lower: hi,
        crossing_found: true,
    }
}

/// Probability of a cascade on the wrong action: the Y-cascade probability
/// when V = B, and its complement when V = G (absorption is almost sure, so
/// the N-cascade probability is `1 - P_Ycas`).
///
/// For V = G the returned value is a lower bound on the exact wrong-cascade
/// probability, with the same `error_bound` magnitude.
pub fn p_wrong_cascade(params: &ModelParams, m: usize) -> Result<CascadeEstimate, Error> {
    let est = p_ycas_truncated(params, m)?;
    Ok(match params.true_value() {
        TrueValue::Bad => est,
        TrueValue::Good => CascadeEstimate {
            value: 1.0 - est.value,
            ..est
        },
    })
}
