//! Row construction for every subcommand.
//!
//! Each `cmd_*` function validates its inputs, computes through
//! `cascade-core`, and returns finished rows. Rendering is left to
//! [`crate::output`]; every function here is deterministic in its arguments.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use cascade_core::analytic::{
    find_eps_lower, p_ycas_at_threshold, p_ycas_limit_eps0, p_ycas_limit_eps1, p_ycas_no_fakes,
    p_ycas_truncated_with_tol, Method, ThresholdSide,
};
use cascade_core::model::{derive_params, ModelParams, TrueValue};
use cascade_core::monte_carlo::estimate_p_ycas;
use cascade_core::thresholds::{epsilon_threshold, is_near_threshold};
use serde::Serialize;

use crate::output::{fmt_real, TableRow};

/// Anything that should terminate the process with exit code 2.
#[derive(Debug)]
pub enum CliError {
    Core(cascade_core::Error),
    Usage(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<cascade_core::Error> for CliError {
    fn from(e: cascade_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Inclusive arithmetic grid `start:stop:step`, e.g. `0.55:0.95:0.01`.
/// A single point is written with any positive step: `0.7:0.7:1`.
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:step, got {s:?}"));
        }
        let nums: Result<Vec<f64>, _> = parts.iter().map(|t| t.trim().parse::<f64>()).collect();
        let nums = nums.map_err(|e| format!("bad grid component in {s:?}: {e}"))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !start.is_finite() || !stop.is_finite() || !step.is_finite() {
            return Err(format!("grid bounds must be finite, got {s:?}"));
        }
        if step <= 0.0 {
            return Err(format!("grid step must be positive, got {step}"));
        }
        if start > stop {
            return Err(format!("grid start {start} exceeds stop {stop}"));
        }
        if (stop - start) / step > 1e7 {
            return Err(format!("grid {s:?} has more than 10^7 points"));
        }
        Ok(GridSpec { start, stop, step })
    }
}

impl GridSpec {
    /// Grid points `start + i*step` up to and including `stop`, with a
    /// relative slack of `step * 1e-9` so the endpoint survives rounding.
    pub fn points(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        for i in 0u64.. {
            let x = self.start + i as f64 * self.step;
            if x > self.stop + self.step * 1e-9 {
                break;
            }
            pts.push(x);
        }
        pts
    }
}

fn rounded_threshold_index(p: f64, eps: f64) -> u64 {
    let params = ModelParams::new(p, eps, TrueValue::Good).expect("validated by caller");
    (1.0 / derive_params(&params).eta).round() as u64
}

// ---------------------------------------------------------------------------
// derive

#[derive(Serialize)]
pub struct DeriveRow {
    pub p: f64,
    pub eps: f64,
    #[serde(rename = "V")]
    pub v: &'static str,
    pub a: f64,
    pub b: f64,
    pub eta: f64,
    pub alpha: f64,
    pub p_f: f64,
    pub r: u64,
}

impl TableRow for DeriveRow {
    const HEADER: &'static str = "p,eps,V,a,b,eta,alpha,p_f,r";

    fn csv_fields(&self) -> Vec<String> {
        vec![
            fmt_real(self.p),
            fmt_real(self.eps),
            self.v.to_string(),
            fmt_real(self.a),
            fmt_real(self.b),
            fmt_real(self.eta),
            fmt_real(self.alpha),
            fmt_real(self.p_f),
            self.r.to_string(),
        ]
    }
}

pub fn cmd_derive(p: f64, eps: f64, v: TrueValue) -> Result<Vec<DeriveRow>, CliError> {
    let params = ModelParams::new(p, eps, v)?;
    let d = derive_params(&params);
    Ok(vec![DeriveRow {
        p,
        eps,
        v: v.code(),
        a: d.a,
        b: d.b,
        eta: d.eta,
        alpha: d.alpha,
        p_f: d.p_f,
        r: d.r,
    }])
}

// ---------------------------------------------------------------------------
// thresholds

#[derive(Serialize)]
pub struct ThresholdRow {
    pub p: f64,
    pub r: u64,
    pub eps_r: f64,
}

impl TableRow for ThresholdRow {
    const HEADER: &'static str = "p,r,eps_r";

    fn csv_fields(&self) -> Vec<String> {
        vec![fmt_real(self.p), self.r.to_string(), fmt_real(self.eps_r)]
    }
}

pub fn cmd_thresholds(p_grid: &GridSpec, r_max: u64) -> Result<Vec<ThresholdRow>, CliError> {
    if r_max < 1 {
        return Err(CliError::Usage("r-max must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for p in p_grid.points() {
        ModelParams::new(p, 0.0, TrueValue::Good)?;
        for r in 1..=r_max {
            rows.push(ThresholdRow {
                p,
                r,
                eps_r: epsilon_threshold(p, r),
            });
        }
    }
    // generation order is already (p ascending, r ascending)
    Ok(rows)
}

// ---------------------------------------------------------------------------
// pycas and curve (same row shape)

#[derive(Serialize)]
pub struct PycasRow {
    pub p: f64,
    pub eps: f64,
    #[serde(rename = "V")]
    pub v: &'static str,
    #[serde(rename = "M")]
    pub m: usize,
    pub p_ycas: f64,
    pub err_bound: f64,
    pub method: &'static str,
}

impl TableRow for PycasRow {
    const HEADER: &'static str = "p,eps,V,M,p_ycas,err_bound,method";

    fn csv_fields(&self) -> Vec<String> {
        vec![
            fmt_real(self.p),
            fmt_real(self.eps),
            self.v.to_string(),
            self.m.to_string(),
            fmt_real(self.p_ycas),
            fmt_real(self.err_bound),
            self.method.to_string(),
        ]
    }
}

fn recursion_row(
    p: f64,
    eps: f64,
    v: TrueValue,
    stages: usize,
    guard_tol: f64,
) -> Result<PycasRow, CliError> {
    let params = ModelParams::new(p, eps, v)?;
    let est = p_ycas_truncated_with_tol(&params, stages, guard_tol)?;
    Ok(PycasRow {
        p,
        eps,
        v: v.code(),
        m: est.stages,
        p_ycas: est.value,
        err_bound: est.error_bound,
        method: est.method.name(),
    })
}

/// The one-sided closed-form rows at threshold `r`. For `r >= 2` these are
/// the left and right values; at the first threshold (`eps_1 = 0`) the left
/// value is the no-fakes probability, so that row is emitted instead of an
/// undefined left form.
fn threshold_pair(p: f64, r: u64, v: TrueValue) -> Result<Vec<PycasRow>, CliError> {
    let eps_r = epsilon_threshold(p, r);
    let mut rows = Vec::with_capacity(2);
    if r >= 2 {
        let minus = p_ycas_at_threshold(p, r, v, ThresholdSide::Minus)?;
        rows.push(PycasRow {
            p,
            eps: eps_r,
            v: v.code(),
            m: 0,
            p_ycas: minus.value,
            err_bound: 0.0,
            method: minus.method.name(),
        });
    } else {
        let base = p_ycas_no_fakes(p, v);
        rows.push(PycasRow {
            p,
            eps: eps_r,
            v: v.code(),
            m: 0,
            p_ycas: base.value,
            err_bound: 0.0,
            method: base.method.name(),
        });
    }
    let plus = p_ycas_at_threshold(p, r, v, ThresholdSide::Plus)?;
    rows.push(PycasRow {
        p,
        eps: eps_r,
        v: v.code(),
        m: 0,
        p_ycas: plus.value,
        err_bound: 0.0,
        method: plus.method.name(),
    });
    Ok(rows)
}

pub fn cmd_pycas(
    p: f64,
    eps: f64,
    v: TrueValue,
    stages: usize,
    guard_tol: f64,
) -> Result<Vec<PycasRow>, CliError> {
    let params = ModelParams::new(p, eps, v)?;
    if eps == 0.0 {
        let base = p_ycas_no_fakes(p, v);
        return Ok(vec![PycasRow {
            p,
            eps,
            v: v.code(),
            m: 0,
            p_ycas: base.value,
            err_bound: 0.0,
            method: base.method.name(),
        }]);
    }
    if is_near_threshold(p, eps, guard_tol) {
        // the probability jumps here; report both one-sided values instead
        let r = rounded_threshold_index(params.p(), eps);
        return threshold_pair(p, r, v);
    }
    Ok(vec![recursion_row(p, eps, v, stages, guard_tol)?])
}

fn side_rank(method: &str) -> u8 {
    u8::from(method == Method::ClosedFormThresholdPlus.name())
}

pub fn cmd_curve(
    p: f64,
    v: TrueValue,
    eps_grid: &GridSpec,
    stages: usize,
    guard_tol: f64,
) -> Result<Vec<PycasRow>, CliError> {
    ModelParams::new(p, 0.0, v)?;
    if eps_grid.stop >= 1.0 {
        return Err(CliError::Usage(format!(
            "eps grid must stay below 1, got stop {}",
            eps_grid.stop
        )));
    }
    if eps_grid.start < 0.0 {
        return Err(CliError::Usage(format!(
            "eps grid must be nonnegative, got start {}",
            eps_grid.start
        )));
    }

    let mut rows = Vec::new();
    let mut pairs_done: BTreeSet<u64> = BTreeSet::new();
    for eps in eps_grid.points() {
        if eps == 0.0 || is_near_threshold(p, eps, guard_tol) {
            // grid point sits on a jump: replace it with the one-sided pair
            let r = if eps == 0.0 {
                1
            } else {
                rounded_threshold_index(p, eps)
            };
            if pairs_done.insert(r) {
                rows.extend(threshold_pair(p, r, v)?);
            }
        } else {
            rows.push(recursion_row(p, eps, v, stages, guard_tol)?);
        }
    }
    // every threshold inside the range gets its pair, hit by the grid or not
    for r in 1..=100_000u64 {
        let eps_r = epsilon_threshold(p, r);
        if eps_r > eps_grid.stop {
            break;
        }
        if eps_r >= eps_grid.start && pairs_done.insert(r) {
            rows.extend(threshold_pair(p, r, v)?);
        }
    }
    rows.sort_by(|x, y| {
        x.eps
            .total_cmp(&y.eps)
            .then(side_rank(x.method).cmp(&side_rank(y.method)))
    });
    Ok(rows)
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Serialize)]
pub struct SimulateRow {
    pub p: f64,
    pub eps: f64,
    #[serde(rename = "V")]
    pub v: &'static str,
    pub trials: u64,
    pub horizon: u64,
    pub seed: u64,
    pub y: u64,
    pub n: u64,
    pub undecided: u64,
    pub p_hat: f64,
    pub ci95: f64,
}

impl TableRow for SimulateRow {
    const HEADER: &'static str = "p,eps,V,trials,horizon,seed,y,n,undecided,p_hat,ci95";

    fn csv_fields(&self) -> Vec<String> {
        vec![
            fmt_real(self.p),
            fmt_real(self.eps),
            self.v.to_string(),
            self.trials.to_string(),
            self.horizon.to_string(),
            self.seed.to_string(),
            self.y.to_string(),
            self.n.to_string(),
            self.undecided.to_string(),
            fmt_real(self.p_hat),
            fmt_real(self.ci95),
        ]
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_simulate(
    p: f64,
    eps: f64,
    v: TrueValue,
    trials: u64,
    horizon: u64,
    seed: u64,
    threads: usize,
) -> Result<Vec<SimulateRow>, CliError> {
    let params = ModelParams::new(p, eps, v)?;
    if trials < 1 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    if horizon < 1 {
        return Err(CliError::Usage("horizon must be at least 1".into()));
    }
    // threads = 0 keeps the global pool; per-trial generators make the result
    // identical either way
    let result = if threads == 0 {
        estimate_p_ycas(&params, trials, seed, horizon)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?;
        pool.install(|| estimate_p_ycas(&params, trials, seed, horizon))
    };
    Ok(vec![SimulateRow {
        p,
        eps,
        v: v.code(),
        trials: result.trials,
        horizon: result.horizon,
        seed: result.seed,
        y: result.y_count,
        n: result.n_count,
        undecided: result.undecided_count,
        p_hat: result.p_ycas_hat,
        ci95: result.ci_halfwidth,
    }])
}

// ---------------------------------------------------------------------------
// limits

#[derive(Serialize)]
pub struct LimitsRow {
    pub p: f64,
    #[serde(rename = "V")]
    pub v: &'static str,
    pub p_ycas_eps0_formal: f64,
    pub p_ycas_lim_eps0: f64,
    pub p_ycas_lim_eps1: f64,
    pub p_ycas_at_eps: f64,
}

impl TableRow for LimitsRow {
    const HEADER: &'static str =
        "p,V,p_ycas_eps0_formal,p_ycas_lim_eps0,p_ycas_lim_eps1,p_ycas_at_eps";

    fn csv_fields(&self) -> Vec<String> {
        vec![
            fmt_real(self.p),
            self.v.to_string(),
            fmt_real(self.p_ycas_eps0_formal),
            fmt_real(self.p_ycas_lim_eps0),
            fmt_real(self.p_ycas_lim_eps1),
            fmt_real(self.p_ycas_at_eps),
        ]
    }
}

pub fn cmd_limits(
    p_grid: &GridSpec,
    eps: f64,
    stages: usize,
    guard_tol: f64,
) -> Result<Vec<LimitsRow>, CliError> {
    let mut rows = Vec::new();
    for p in p_grid.points() {
        for v in [TrueValue::Good, TrueValue::Bad] {
            ModelParams::new(p, eps, v)?;
            let at_eps = if eps == 0.0 {
                p_ycas_no_fakes(p, v).value
            } else if is_near_threshold(p, eps, guard_tol) {
                // comparison column only; take the right-sided value at the jump
                let r = rounded_threshold_index(p, eps);
                p_ycas_at_threshold(p, r, v, ThresholdSide::Plus)?.value
            } else {
                let params = ModelParams::new(p, eps, v)?;
                p_ycas_truncated_with_tol(&params, stages, guard_tol)?.value
            };
            rows.push(LimitsRow {
                p,
                v: v.code(),
                p_ycas_eps0_formal: p_ycas_no_fakes(p, v).value,
                p_ycas_lim_eps0: p_ycas_limit_eps0(p, v).value,
                p_ycas_lim_eps1: p_ycas_limit_eps1(p, v).value,
                p_ycas_at_eps: at_eps,
            });
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// find-eps-lower

#[derive(Serialize)]
pub struct EpsLowerRow {
    pub p: f64,
    #[serde(rename = "V")]
    pub v: &'static str,
    pub eps_lower: f64,
    pub status: &'static str,
}

impl TableRow for EpsLowerRow {
    const HEADER: &'static str = "p,V,eps_lower,status";

    fn csv_fields(&self) -> Vec<String> {
        vec![
            fmt_real(self.p),
            self.v.to_string(),
            fmt_real(self.eps_lower),
            self.status.to_string(),
        ]
    }
}

pub fn cmd_find_eps_lower(
    p: f64,
    v: TrueValue,
    grid_step: f64,
    refine_tol: f64,
) -> Result<Vec<EpsLowerRow>, CliError> {
    ModelParams::new(p, 0.0, v)?;
    if grid_step <= 0.0 || grid_step >= 1.0 {
        return Err(CliError::Usage(format!(
            "grid-step must be in (0, 1), got {grid_step}"
        )));
    }
    if refine_tol <= 0.0 {
        return Err(CliError::Usage(format!(
            "refine-tol must be positive, got {refine_tol}"
        )));
    }
    let est = find_eps_lower(p, v, grid_step, refine_tol);
    Ok(vec![EpsLowerRow {
        p,
        v: v.code(),
        eps_lower: est.eps_lower,
        status: if est.crossing_found {
            "ok"
        } else {
            "no-crossing"
        },
    }])
}
