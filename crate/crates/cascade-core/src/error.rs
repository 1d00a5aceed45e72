use thiserror::Error;

/// Failure modes for parameter validation and analytic evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Signal quality must satisfy 0.5 < p < 1.
    #[error("signal quality p = {0} must lie strictly between 0.5 and 1")]
    SignalQualityOutOfRange(f64),

    /// Fake-agent fraction must satisfy 0 <= eps < 1.
    #[error("fake fraction eps = {0} must lie in [0, 1)")]
    FakeFractionOutOfRange(f64),

    /// 1/eta is within the guard band of an integer, so the stage enumeration
    /// behind the truncated recursion is invalid at this (p, eps).
    #[error(
        "1/eta = {one_over_eta} is within {tol} of the integer {nearest_r}: the \
         parameter point sits in the guard band of a cascade-length threshold; \
         use the one-sided closed forms instead"
    )]
    NearThreshold {
        one_over_eta: f64,
        nearest_r: u64,
        tol: f64,
    },

    /// The truncated recursion is undefined at eps = 0 (the walk sits exactly
    /// on the first threshold); callers should use the no-fakes closed form.
    #[error("eps = 0 has an exact closed form; the truncated recursion does not apply")]
    EpsZeroHasClosedForm,

    /// The left-sided closed form at the first threshold does not exist
    /// because eps_1 = 0 is the domain edge.
    #[error("the left-sided closed form requires r >= 2 (eps_1 = 0 has no left side)")]
    NoMinusFormAtFirstThreshold,
}
