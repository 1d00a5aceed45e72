//! Cascade-length thresholds in the fake-agent fraction.
//!
//! As `eps` runs over [0, 1), `eta` decreases continuously from 1 towards 0,
//! so `r = floor(1/eta)` steps up through 1, 2, 3, ... at a strictly
//! increasing sequence of thresholds
//!
//! ```text
//! eps_r = (alpha - alpha^(1/r)) / (alpha^(1/r + 1) - 1),    alpha = p/(1-p),
//! ```
//!
//! with `eps_1 = 0`. For `eps` in the interval `I_r = [eps_r, eps_{r+1})`,
//! starting a Y cascade from `h = 0` takes `r + 1` consecutive Y observations.
//!
//! Exactly at a threshold `1/eta` is an integer and the stage enumeration
//! behind the analytic recursion breaks down (a run of Y observations can
//! land exactly on the wall `h = 1`, which does not absorb). All recursion
//! entry points therefore refuse a small guard band around every `eps_r` and
//! callers fall back to the one-sided closed forms.

use crate::error::Error;
use crate::model::{eta_raw, DerivedParams};

/// Default half-width of the guard band, measured on `1/eta`.
pub const GUARD_TOL: f64 = 1e-9;

/// The fake fraction at which the required run of consecutive Y observations
/// steps from `r` to `r + 1`; the unique solution of `eta(p, eps) = 1/r`.
///
/// # Panics
/// If `p` is outside (0.5, 1) or `r = 0`.
pub fn epsilon_threshold(p: f64, r: u64) -> f64 {
    assert!(p > 0.5 && p < 1.0, "signal quality out of range: {p}");
    assert!(r >= 1, "threshold index starts at 1");
    if r == 1 {
        return 0.0;
    }
    let alpha = p / (1.0 - p);
    let root = alpha.powf(1.0 / r as f64);
    (alpha - root) / (root * alpha - 1.0)
}

/// The thresholds `eps_1 .. eps_{r_max}` for one signal quality.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTable {
    pub p: f64,
    /// `(r, eps_r)` pairs, strictly increasing in both components.
    pub entries: Vec<(u64, f64)>,
}

/// Tabulates `epsilon_threshold(p, r)` for `r = 1..=r_max`, stopping early
/// in the (unreachable for practical `r_max`) event a value lands within
/// 1e-12 of the open domain edge eps = 1.
pub fn threshold_table(p: f64, r_max: u64) -> ThresholdTable {
    let mut entries = Vec::with_capacity(r_max as usize);
    for r in 1..=r_max {
        let eps_r = epsilon_threshold(p, r);
        if eps_r > 1.0 - 1e-12 {
            break;
        }
        entries.push((r, eps_r));
    }
    ThresholdTable { p, entries }
}

/// Index `r` of the interval `I_r = [eps_r, eps_{r+1})` containing `eps`,
/// computed as `floor(1/eta)`.
///
/// # Panics
/// If `(p, eps)` is outside the model domain.
pub fn interval_index(p: f64, eps: f64) -> u64 {
    assert!(p > 0.5 && p < 1.0, "signal quality out of range: {p}");
    assert!(
        (0.0..1.0).contains(&eps),
        "fake fraction out of range: {eps}"
    );
    (1.0 / eta_raw(p, eps)).floor() as u64
}

/// True when `1/eta` lies within `tol` of an integer, i.e. `eps` is close
/// enough to some threshold that the stage enumeration cannot be trusted.
/// `eps = 0` is always near (it sits exactly on `eps_1`).
pub fn is_near_threshold(p: f64, eps: f64, tol: f64) -> bool {
    assert!(p > 0.5 && p < 1.0, "signal quality out of range: {p}");
    assert!(
        (0.0..1.0).contains(&eps),
        "fake fraction out of range: {eps}"
    );
    let x = 1.0 / eta_raw(p, eps);
    (x - x.round()).abs() < tol
}

/// The per-stage cascade lengths `r_1 .. r_M` and the walk position after
/// each persisting stage.
///
/// Stage n of the enumeration of Y-cascade histories consists of `r_n`
/// consecutive Y observations (which absorb) or `r_n` Y's plus one N (which
/// leaves the walk at `positions[n-1]`, somewhere in [0, eta]).
#[derive(Debug, Clone, PartialEq)]
pub struct StageSequence {
    /// `r_values[0] = r + 1`; every later entry is `r` or `r + 1`.
    pub r_values: Vec<u64>,
    /// Net displacement after each persisting stage: `(sum r_i) * eta - n`,
    /// evaluated from the integer cumulative sum so no rounding accumulates.
    pub positions: Vec<f64>,
}

impl StageSequence {
    /// Number of stages (the truncation depth M).
    pub fn len(&self) -> usize {
        self.r_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_values.is_empty()
    }
}

/// Builds the first `m` stage lengths for a point with derived parameters
/// `d`, using the default guard band.
pub fn stage_sequence(d: &DerivedParams, m: usize) -> Result<StageSequence, Error> {
    stage_sequence_with_tol(d, m, GUARD_TOL)
}

/// As [`stage_sequence`] with an explicit guard-band width.
///
/// Stage n takes `r_n = r` when the wall is already reachable with `r` Y's
/// from the current position (`pos + r*eta > 1`) and `r_n = r + 1` otherwise;
/// `r + 1` Y's always reach the wall because `eta > 1/(r+1)`.
pub fn stage_sequence_with_tol(
    d: &DerivedParams,
    m: usize,
    tol: f64,
) -> Result<StageSequence, Error> {
    assert!(m >= 1, "stage count must be positive");
    let x = 1.0 / d.eta;
    if (x - x.round()).abs() < tol {
        return Err(Error::NearThreshold {
            one_over_eta: x,
            nearest_r: x.round() as u64,
            tol,
        });
    }
    let r = d.r;
    let mut r_values = Vec::with_capacity(m);
    let mut positions = Vec::with_capacity(m);
    // cum = r_1 + ... + r_n; u128 so extreme r (eps within ulps of 1) cannot
    // wrap even at very deep truncation.
    let mut cum: u128 = 0;
    for n in 1..=m as u64 {
        let reach = (cum + r as u128) as f64 * d.eta - (n - 1) as f64;
        let r_n = if reach > 1.0 { r } else { r + 1 };
        cum += r_n as u128;
        r_values.push(r_n);
        positions.push(cum as f64 * d.eta - n as f64);
    }
    Ok(StageSequence {
        r_values,
        positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_params, ModelParams, TrueValue};

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    fn derived(p: f64, eps: f64) -> DerivedParams {
        derive_params(&ModelParams::new(p, eps, TrueValue::Bad).unwrap())
    }

    #[test]
    fn first_threshold_is_zero() {
        for p in [0.51, 0.7, 0.99] {
            assert_eq!(epsilon_threshold(p, 1), 0.0);
        }
    }

    #[test]
    fn threshold_golden_values() {
        // alpha = 7/3: eps_2 = (alpha - sqrt(alpha)) / (alpha^1.5 - 1).
        assert!(close(epsilon_threshold(0.7, 2), 0.3142500879690937, 1e-14));
        assert!(close(epsilon_threshold(0.7, 3), 0.4806999351554778, 1e-14));
        // alpha = 9: eps_2 = (9 - 3) / (27 - 1) = 3/13.
        assert!(close(epsilon_threshold(0.9, 2), 3.0 / 13.0, 1e-15));
    }

    #[test]
    fn threshold_solves_eta_equals_one_over_r() {
        for p in [0.55, 0.7, 0.85, 0.95] {
            for r in 2..=12u64 {
                let eps_r = epsilon_threshold(p, r);
                let eta = eta_raw(p, eps_r);
                assert!(close(eta, 1.0 / r as f64, 1e-12), "p={p} r={r}: eta={eta}");
            }
        }
    }

    #[test]
    fn table_is_strictly_increasing_and_inside_domain() {
        let t = threshold_table(0.8, 30);
        assert_eq!(t.entries.len(), 30);
        for w in t.entries.windows(2) {
            assert!(w[0].1 < w[1].1);
        }
        for &(_, e) in &t.entries {
            assert!((0.0..1.0).contains(&e));
        }
    }

    #[test]
    fn interval_index_brackets() {
        assert_eq!(interval_index(0.7, 0.2), 1);
        assert_eq!(interval_index(0.7, 0.32), 2); // eps_2 ~ 0.3143
        assert_eq!(interval_index(0.7, 0.5), 3); // eps_3 ~ 0.4807, eps_4 ~ 0.5825
        assert_eq!(interval_index(0.9, 0.1), 1); // below 3/13
    }

    #[test]
    fn guard_band_detection() {
        // eps = 0 sits exactly on eps_1.
        assert!(is_near_threshold(0.7, 0.0, GUARD_TOL));
        // A closed-form threshold evaluates to 1/eta within float error of 2.
        let e2 = epsilon_threshold(0.7, 2);
        assert!(is_near_threshold(0.7, e2, GUARD_TOL));
        // Well clear of every threshold.
        assert!(!is_near_threshold(0.7, 0.2, GUARD_TOL));
        assert!(!is_near_threshold(0.7, e2 + 1e-5, GUARD_TOL));
        assert!(!is_near_threshold(0.7, e2 - 1e-5, GUARD_TOL));
    }

    #[test]
    fn stage_sequence_matches_hand_enumeration() {
        // p = 0.7, eps = 0.2: eta ~ 0.645, r = 1. Hand-running the update rule
        // gives r_1..r_10 = 2,2,1,2,1,2,1,2,1,2 with first position 2*eta - 1.
        let d = derived(0.7, 0.2);
        let seq = stage_sequence(&d, 10).unwrap();
        assert_eq!(seq.r_values, vec![2, 2, 1, 2, 1, 2, 1, 2, 1, 2]);
        assert_eq!(seq.len(), 10);
        let expect = [
            0.290_086_360_228_283_5,
            0.580_172_720_456_567,
            0.22521590057070878,
            0.515_302_260_798_992_3,
            0.16034544091313405,
            0.45043180114141756,
            0.09547498125555931,
            0.385_561_341_483_842_8,
            0.03060452159798459,
            0.320_690_881_826_268_1,
        ];
        for (got, want) in seq.positions.iter().zip(expect) {
            assert!(close(*got, want, 1e-12), "{got} vs {want}");
        }
    }

    #[test]
    fn stage_sequence_refuses_guard_band() {
        let d = derived(0.7, epsilon_threshold(0.7, 2));
        assert!(matches!(
            stage_sequence(&d, 10),
            Err(Error::NearThreshold { nearest_r: 2, .. })
        ));
        let d0 = derived(0.7, 0.0);
        assert!(stage_sequence(&d0, 10).is_err());
    }

    #[test]
    fn positions_stay_in_unit_stage_band() {
        for (p, eps) in [(0.7, 0.2), (0.6, 0.45), (0.85, 0.37), (0.99, 0.6)] {
            let d = derived(p, eps);
            let seq = stage_sequence(&d, 2000).unwrap();
            assert_eq!(seq.r_values[0], d.r + 1);
            for (&r_n, &pos) in seq.r_values.iter().zip(&seq.positions) {
                assert!(r_n == d.r || r_n == d.r + 1);
                assert!(
                    pos >= -1e-12 && pos <= d.eta + 1e-12,
                    "p={p} eps={eps}: position {pos} outside [0, {}]",
                    d.eta
                );
            }
        }
    }
}
