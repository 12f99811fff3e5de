//! Stepsize schedules and the gradient-descent driver.
//!
//! A [`Schedule`] names a rule for producing `alpha_k` from the current
//! [`StepState`] (and, for two-point rules, the previous one): single
//! rules like `sd`, `mg`, or `bb1`; alternations like `dy` and `sdc`;
//! the adaptive `abbmin2`; and the periodic short-step method
//! ([`Schedule::Periodic`], spelled `alg1:...` in text form) that
//! interleaves Barzilai–Borwein steps, `Psi`-family steps, and a reused
//! zigzag-breaking short step.
//!
//! [`run`] drives `x_{k+1} = x_k - alpha_k g_k` until the gradient norm
//! falls below `epsilon * |g_0|`, the iteration cap is hit, or the
//! numerics break, and returns an [`IterateTrace`] with one row per
//! iterate. Optional extras record the per-eigencomponent history
//! ([`MuTrace`], diagonal problems only) and the two candidate roots of
//! the short-step quadratic at every iteration.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::quadratic::QuadraticProblem;
use crate::rng::ChaCha8Rng;
use crate::stepsize::{
    step_aopt, step_bb1, step_bb2, step_family, step_hat, step_mg, step_sd, step_tilde_family,
    step_tilde_mg, StepState,
};
use crate::{Error, Result};
use rand::Rng;

/// Which Barzilai–Borwein rule the periodic method uses in its BB
/// phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbVariant {
    /// `alpha = s's / s'y` (equals the previous steepest-descent step
    /// on a quadratic).
    Bb1,
    /// `alpha = s'y / y'y` (equals the previous minimal-gradient step
    /// on a quadratic).
    Bb2,
}

/// A stepsize schedule.
///
/// Text form (parsed by [`Schedule::parse`], produced by `Display`):
///
/// ```text
/// sd | mg | family:<u> | bb1 | bb2 | yuan | dy | aopt | hat
///   | abbmin2:<tau> | sdc:<h>:<s> | alg1:<bb1|bb2>:<sd|mg>:<Kb>:<Km>:<Ks>
/// ```
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// Steepest descent: `g'g / g'Ag`.
    Sd,
    /// Minimal gradient: `g'Ag / g'A^2g`.
    Mg,
    /// The monomial family member `g'A^u g / g'A^{u+1} g`.
    FamilyU(u32),
    /// Barzilai–Borwein, first form.
    Bb1,
    /// Barzilai–Borwein, second form.
    Bb2,
    /// Yuan's short step (small root of the 2x2 compression with
    /// `Psi = 1`).
    Yuan,
    /// Dai–Yuan alternation: steepest descent when `mod(k,4) < 2`,
    /// Yuan's step otherwise.
    Dy,
    /// The idealized `|g| / |Ag|` rule (diagnostic; not a member of
    /// the family).
    Aopt,
    /// Harmonic combination of the two most recent steepest-descent
    /// values: `1/alpha = 1/a_{k-1} + 1/a_k`.
    Hat,
    /// Adaptive BB alternation: take the smallest recent BB2 step when
    /// `bb2 < tau * bb1`, else BB1.
    Abbmin2 {
        /// Switching threshold in `(0,1)`.
        tau: f64,
        /// Window length `m`: the minimum runs over the BB2 values of
        /// the last `m+1` iterations.
        memory: usize,
    },
    /// Steepest descent with cyclic Yuan steps: `h` SD steps, one
    /// fresh Yuan step, then `s - 1` reuses of it.
    Sdc {
        /// SD steps per period.
        h: u32,
        /// Yuan steps per period (one fresh, `s - 1` reused).
        s: u32,
    },
    /// The periodic short-step method: per period of length
    /// `kb + km + ks`, take `kb` BB steps, `km` family steps, one
    /// fresh short step, then `ks - 1` reuses of it.
    Periodic {
        /// BB rule used in the first phase.
        bb: BbVariant,
        /// Family exponent `u` (0 for `sd`-flavor, 1 for `mg`-flavor);
        /// also selects `Psi = A^u` for the short step.
        psi_u: u32,
        /// Number of BB steps per period.
        kb: u32,
        /// Number of family steps per period.
        km: u32,
        /// Number of short steps per period (one fresh + reuses).
        ks: u32,
    },
}

impl Schedule {
    /// Parses the text form; see the type-level docs for the grammar.
    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    /// Validates parameter ranges (also called by [`Schedule::parse`]).
    pub fn validate(&self) -> Result<()> {
        match self {
            Schedule::FamilyU(u) => {
                if *u > 32 {
                    return Err(Error::BadSchedule { reason: "family order must be at most 32" });
                }
            }
            Schedule::Abbmin2 { tau, memory } => {
                if !(tau.is_finite() && *tau > 0.0 && *tau < 1.0) {
                    return Err(Error::BadSchedule { reason: "abbmin2 threshold must lie in (0,1)" });
                }
                if *memory == 0 {
                    return Err(Error::BadSchedule { reason: "abbmin2 memory must be positive" });
                }
            }
            Schedule::Sdc { h, s } => {
                if *h == 0 || *s == 0 {
                    return Err(Error::BadSchedule { reason: "sdc phase lengths must be positive" });
                }
            }
            Schedule::Periodic { psi_u, kb, ks, .. } => {
                if *psi_u > 1 {
                    return Err(Error::BadSchedule { reason: "alg1 family flavor must be sd or mg" });
                }
                if *kb == 0 || *ks == 0 {
                    return Err(Error::BadSchedule {
                        reason: "alg1 needs at least one BB and one short step per period",
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// True for rules built from the previous step's data: they cannot
    /// produce `alpha_0`, so the run bootstraps with
    /// [`InitialAlpha`] and the schedule's phase counter starts at
    /// iteration 1.
    pub fn needs_history(&self) -> bool {
        matches!(
            self,
            Schedule::Bb1
                | Schedule::Bb2
                | Schedule::Yuan
                | Schedule::Hat
                | Schedule::Abbmin2 { .. }
                | Schedule::Periodic { .. }
        )
    }

    /// Highest moment index `g'A^j g` the rule reads.
    fn needed_order(&self) -> usize {
        match self {
            Schedule::Mg | Schedule::Aopt => 2,
            Schedule::FamilyU(u) => *u as usize + 1,
            Schedule::Periodic { psi_u, .. } => *psi_u as usize + 1,
            _ => 1,
        }
    }

    /// The family exponent, when the schedule is a plain family
    /// member (`sd` is `0`, `mg` is `1`). Short-step tracking and the
    /// weight-dynamics diagnostics only make sense for these.
    pub fn family_u(&self) -> Option<u32> {
        match self {
            Schedule::Sd => Some(0),
            Schedule::Mg => Some(1),
            Schedule::FamilyU(u) => Some(*u),
            _ => None,
        }
    }
}

impl core::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        fn int(tok: &str) -> Result<u32> {
            tok.parse().map_err(|_| Error::BadSchedule { reason: "expected an integer parameter" })
        }
        fn real(tok: &str) -> Result<f64> {
            tok.parse().map_err(|_| Error::BadSchedule { reason: "expected a real parameter" })
        }
        let parts: Vec<&str> = s.split(':').collect();
        let sched = match parts.as_slice() {
            ["sd"] => Schedule::Sd,
            ["mg"] => Schedule::Mg,
            ["family", u] => Schedule::FamilyU(int(u)?),
            ["bb1"] => Schedule::Bb1,
            ["bb2"] => Schedule::Bb2,
            ["yuan"] => Schedule::Yuan,
            ["dy"] => Schedule::Dy,
            ["aopt"] => Schedule::Aopt,
            ["hat"] => Schedule::Hat,
            ["abbmin2", tau] => Schedule::Abbmin2 { tau: real(tau)?, memory: 9 },
            ["sdc", h, s] => Schedule::Sdc { h: int(h)?, s: int(s)? },
            ["alg1", bb, psi, kb, km, ks] => Schedule::Periodic {
                bb: match *bb {
                    "bb1" => BbVariant::Bb1,
                    "bb2" => BbVariant::Bb2,
                    _ => return Err(Error::BadSchedule { reason: "alg1 BB flavor must be bb1 or bb2" }),
                },
                psi_u: match *psi {
                    "sd" => 0,
                    "mg" => 1,
                    _ => return Err(Error::BadSchedule { reason: "alg1 family flavor must be sd or mg" }),
                },
                kb: int(kb)?,
                km: int(km)?,
                ks: int(ks)?,
            },
            _ => return Err(Error::BadSchedule { reason: "unrecognized schedule" }),
        };
        sched.validate()?;
        Ok(sched)
    }
}

impl core::fmt::Display for Schedule {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Schedule::Sd => write!(f, "sd"),
            Schedule::Mg => write!(f, "mg"),
            Schedule::FamilyU(u) => write!(f, "family:{u}"),
            Schedule::Bb1 => write!(f, "bb1"),
            Schedule::Bb2 => write!(f, "bb2"),
            Schedule::Yuan => write!(f, "yuan"),
            Schedule::Dy => write!(f, "dy"),
            Schedule::Aopt => write!(f, "aopt"),
            Schedule::Hat => write!(f, "hat"),
            Schedule::Abbmin2 { tau, .. } => write!(f, "abbmin2:{tau}"),
            Schedule::Sdc { h, s } => write!(f, "sdc:{h}:{s}"),
            Schedule::Periodic { bb, psi_u, kb, km, ks } => {
                let bbs = match bb {
                    BbVariant::Bb1 => "bb1",
                    BbVariant::Bb2 => "bb2",
                };
                let fam = if *psi_u == 0 { "sd" } else { "mg" };
                write!(f, "alg1:{bbs}:{fam}:{kb}:{km}:{ks}")
            }
        }
    }
}

/// How a history-based schedule obtains `alpha_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialAlpha {
    /// Take an exact steepest-descent step first.
    ExactSd,
    /// Use a fixed positive value.
    Fixed(f64),
}

/// Solver options.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative gradient tolerance: stop once `|g_k| <= epsilon |g_0|`.
    pub epsilon: f64,
    /// Iteration cap.
    pub max_iter: usize,
    /// Bootstrap step for history-based schedules.
    pub initial: InitialAlpha,
    /// Record the per-eigencomponent gradient history (diagonal
    /// problems only).
    pub track_mu: bool,
    /// Record both roots of the short-step quadratic at every
    /// iteration (plain family schedules only).
    pub track_tilde: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-6,
            max_iter: 20_000,
            initial: InitialAlpha::ExactSd,
            track_mu: false,
            track_tilde: false,
        }
    }
}

/// Why the run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// `|g_k| <= epsilon |g_0|`.
    Converged,
    /// The iteration cap was reached first.
    IterCap,
    /// A stepsize or iterate stopped being finite and positive.
    NumericalFailure,
}

/// One recorded iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct IterRow {
    /// Iteration index.
    pub k: usize,
    /// Optimality gap `f(x_k) - f*`, computed as `g'A^{-1}g / 2`.
    pub f_gap: f64,
    /// Gradient norm `|g_k|`.
    pub gnorm: f64,
    /// The stepsize applied at this iterate; `None` on the terminal
    /// row.
    pub alpha: Option<f64>,
    /// Which branch of the schedule produced the step (`"final"` on
    /// the terminal row).
    pub rule: &'static str,
}

/// Both roots of the short-step quadratic at iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TildeRow {
    /// Iteration index.
    pub k: usize,
    /// Small root (the zigzag-breaking step; tends to
    /// `1/lambda_max`).
    pub short: f64,
    /// Large root (tends to `1/lambda_min`). Diagnostic only.
    pub long: f64,
}

/// Per-eigencomponent gradient history of a run on a diagonal problem.
///
/// Row `k` describes iterate `k`. Besides the raw components, the
/// trace carries the exact recurrence `mu_{k+1} = (1 - alpha_k
/// lambda_i) mu_k` in log-magnitude/sign form, which survives long
/// runs whose raw components underflow.
#[derive(Debug, Clone)]
pub struct MuTrace {
    /// The spectrum (diagonal of `A`).
    pub lambda: Vec<f64>,
    /// Raw gradient components per iterate.
    pub raw: Vec<Vec<f64>>,
    /// `ln |mu_k^{(i)}|` accumulated via the recurrence
    /// (`-inf` once a component dies).
    pub log_abs: Vec<Vec<f64>>,
    /// Sign of `mu_k^{(i)}` via the recurrence (`0` once a component
    /// dies).
    pub sign: Vec<Vec<i8>>,
}

impl MuTrace {
    fn new(lambda: Vec<f64>) -> Self {
        MuTrace { lambda, raw: Vec::new(), log_abs: Vec::new(), sign: Vec::new() }
    }

    fn push_initial(&mut self, g: &[f64]) {
        let logs: Vec<f64> = g.iter().map(|&v| v.abs().ln()).collect();
        let signs: Vec<i8> = g
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    0
                } else if v < 0.0 {
                    -1
                } else {
                    1
                }
            })
            .collect();
        self.raw.push(g.to_vec());
        self.log_abs.push(logs);
        self.sign.push(signs);
    }

    fn push_step(&mut self, alpha: f64, g_new: &[f64]) {
        let last_log = self.log_abs.last().expect("push_initial first");
        let last_sign = self.sign.last().expect("push_initial first");
        let mut logs = Vec::with_capacity(self.lambda.len());
        let mut signs = Vec::with_capacity(self.lambda.len());
        for i in 0..self.lambda.len() {
            let factor = 1.0 - alpha * self.lambda[i];
            logs.push(last_log[i] + factor.abs().ln());
            signs.push(if factor == 0.0 {
                0
            } else if factor < 0.0 {
                -last_sign[i]
            } else {
                last_sign[i]
            });
        }
        self.raw.push(g_new.to_vec());
        self.log_abs.push(logs);
        self.sign.push(signs);
    }

    fn pop(&mut self) {
        self.raw.pop();
        self.log_abs.pop();
        self.sign.pop();
    }

    /// Number of recorded iterates.
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    /// True when nothing was recorded.
    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Problem dimension.
    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// Normalized squared components `q_k` of iterate `k`, computed
    /// from the log-magnitude recurrence so that long runs do not
    /// underflow. Dead components get weight zero exactly.
    pub fn q_weights(&self, k: usize) -> Result<Vec<f64>> {
        let logs = &self.log_abs[k];
        let mx = logs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        if !mx.is_finite() {
            return Err(Error::InvalidWeights);
        }
        let mut w: Vec<f64> = logs
            .iter()
            .map(|&l| if l == f64::NEG_INFINITY { 0.0 } else { (2.0 * (l - mx)).exp() })
            .collect();
        let sum: f64 = w.iter().sum();
        for x in w.iter_mut() {
            *x /= sum;
        }
        Ok(w)
    }
}

/// Full record of a run.
#[derive(Debug, Clone)]
pub struct IterateTrace {
    /// One row per iterate; every row but possibly the last carries
    /// the stepsize applied there. Converged and capped runs end with
    /// a terminal row (`alpha: None`, rule `"final"`).
    pub rows: Vec<IterRow>,
    /// Why the run stopped.
    pub status: Status,
    /// Index of the last recorded iterate (= completed valid steps).
    pub iterations: usize,
    /// Per-eigencomponent history, when requested.
    pub mu: Option<MuTrace>,
    /// Short-step roots per iteration, when requested.
    pub tilde: Option<Vec<TildeRow>>,
    /// The final iterate.
    pub final_x: Vec<f64>,
}

impl IterateTrace {
    /// The applied stepsizes, in order.
    pub fn alphas(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.alpha).collect()
    }

    /// The last recorded row, if any.
    pub fn final_row(&self) -> Option<&IterRow> {
        self.rows.last()
    }
}

/// Per-run state of the composite schedules.
struct Scheduler<'a> {
    schedule: &'a Schedule,
    frozen: f64,
    bb2_window: VecDeque<f64>,
}

impl<'a> Scheduler<'a> {
    fn new(schedule: &'a Schedule) -> Self {
        Scheduler { schedule, frozen: 0.0, bb2_window: VecDeque::new() }
    }

    /// The stepsize for phase index `phase` given the current state.
    fn next(&mut self, phase: usize, st: &StepState) -> Result<(f64, &'static str)> {
        match self.schedule {
            Schedule::Sd => Ok((step_sd(st)?, "sd")),
            Schedule::Mg => Ok((step_mg(st)?, "mg")),
            Schedule::FamilyU(u) => Ok((step_family(st, *u as usize)?, "family")),
            Schedule::Bb1 => Ok((step_bb1(st)?, "bb1")),
            Schedule::Bb2 => Ok((step_bb2(st)?, "bb2")),
            Schedule::Yuan => Ok((step_tilde_family(st, 0)?.0, "yuan")),
            Schedule::Aopt => Ok((step_aopt(st)?, "aopt")),
            Schedule::Hat => {
                let prev = st.prev.as_ref().ok_or(Error::MissingHistory)?;
                if prev.moments.len() < 2 {
                    return Err(Error::MomentsUnavailable { needed: 1, have: prev.moments.len() });
                }
                let a_prev = prev.moments[0] / prev.moments[1];
                let a_cur = step_sd(st)?;
                Ok((step_hat(a_prev, a_cur)?, "hat"))
            }
            Schedule::Dy => {
                if phase % 4 < 2 {
                    Ok((step_sd(st)?, "sd"))
                } else {
                    Ok((step_tilde_family(st, 0)?.0, "yuan"))
                }
            }
            Schedule::Sdc { h, s } => {
                let m = phase % (*h as usize + *s as usize);
                if m < *h as usize {
                    Ok((step_sd(st)?, "sd"))
                } else if m == *h as usize {
                    self.frozen = step_tilde_family(st, 0)?.0;
                    Ok((self.frozen, "yuan"))
                } else {
                    Ok((self.frozen, "yuan-reused"))
                }
            }
            Schedule::Abbmin2 { tau, memory } => {
                let bb1 = step_bb1(st)?;
                let bb2 = step_bb2(st)?;
                self.bb2_window.push_back(bb2);
                while self.bb2_window.len() > memory + 1 {
                    self.bb2_window.pop_front();
                }
                if bb2 < tau * bb1 {
                    let m = self.bb2_window.iter().fold(f64::INFINITY, |a, &b| a.min(b));
                    Ok((m, "bb2min"))
                } else {
                    Ok((bb1, "bb1"))
                }
            }
            Schedule::Periodic { bb, psi_u, kb, km, ks } => {
                let (kb, km, ks) = (*kb as usize, *km as usize, *ks as usize);
                let period = kb + km + ks;
                let m = phase % period;
                if m < kb {
                    let a = match bb {
                        BbVariant::Bb1 => step_bb1(st)?,
                        BbVariant::Bb2 => step_bb2(st)?,
                    };
                    Ok((a, "bb"))
                } else if m < kb + km {
                    Ok((step_family(st, *psi_u as usize)?, "family"))
                } else if m == kb + km {
                    self.frozen = step_tilde_family(st, *psi_u as usize)?.0;
                    Ok((self.frozen, "tilde"))
                } else {
                    Ok((self.frozen, "tilde-reused"))
                }
            }
        }
    }
}

/// Runs the gradient method from `x0` under the given schedule.
///
/// Stops with [`Status::Converged`] once `|g_k| <= epsilon |g_0|`
/// (immediately, with zero steps, when `g_0 = 0`), with
/// [`Status::IterCap`] when `max_iter` steps did not get there, and
/// with [`Status::NumericalFailure`] when a stepsize or iterate stops
/// being finite (the trace then ends at the last valid iterate).
pub fn run(
    problem: &QuadraticProblem,
    x0: &[f64],
    schedule: &Schedule,
    cfg: &SolverConfig,
) -> Result<IterateTrace> {
    schedule.validate()?;
    if x0.len() != problem.n() {
        return Err(Error::DimensionMismatch { expected: problem.n(), got: x0.len() });
    }
    for &v in x0 {
        if !v.is_finite() {
            return Err(Error::InvalidParameter { name: "x0", value: v });
        }
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::InvalidParameter { name: "epsilon", value: cfg.epsilon });
    }
    if let InitialAlpha::Fixed(a) = cfg.initial {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter { name: "initial_alpha", value: a });
        }
    }
    if cfg.track_mu && !problem.is_diagonal() {
        return Err(Error::UnsupportedTrace {
            reason: "component tracking requires a diagonal problem",
        });
    }
    let tilde_u = if cfg.track_tilde {
        match schedule.family_u() {
            Some(u) => Some(u as usize),
            None => {
                return Err(Error::UnsupportedTrace {
                    reason: "short-step tracking requires a plain family schedule",
                })
            }
        }
    } else {
        None
    };

    let order = schedule.needed_order().max(tilde_u.map_or(0, |u| u + 1));
    let g0 = problem.gradient(x0);
    let mut st = StepState::from_gradient(problem, g0, order);
    let gnorm0 = st.gg().sqrt();
    let threshold = cfg.epsilon * gnorm0;

    let mut mu = if cfg.track_mu {
        let mut t = MuTrace::new(problem.spectrum().to_vec());
        t.push_initial(&st.g);
        Some(t)
    } else {
        None
    };
    let mut tilde: Option<Vec<TildeRow>> = if cfg.track_tilde { Some(Vec::new()) } else { None };

    let mut x = x0.to_vec();
    let mut rows: Vec<IterRow> = Vec::new();
    let mut scheduler = Scheduler::new(schedule);
    let status;

    let mut k = 0usize;
    loop {
        let gnorm = st.gg().sqrt();
        if !gnorm.is_finite() {
            // The last advance destroyed the iterate; drop its
            // component row so the mu trace matches `rows`.
            if let Some(m) = mu.as_mut() {
                m.pop();
            }
            status = Status::NumericalFailure;
            break;
        }
        let f_gap = problem.gap_from_gradient(&st.g);
        if gnorm <= threshold {
            rows.push(IterRow { k, f_gap, gnorm, alpha: None, rule: "final" });
            status = Status::Converged;
            break;
        }
        if k >= cfg.max_iter {
            rows.push(IterRow { k, f_gap, gnorm, alpha: None, rule: "final" });
            status = Status::IterCap;
            break;
        }

        if let (Some(rows_t), Some(u)) = (tilde.as_mut(), tilde_u) {
            if st.prev.is_some() {
                if let Ok((short, long)) = step_tilde_family(&st, u) {
                    rows_t.push(TildeRow { k, short, long });
                }
            }
        }

        let picked = if k == 0 && schedule.needs_history() {
            match cfg.initial {
                InitialAlpha::ExactSd => step_sd(&st).map(|a| (a, "init")),
                InitialAlpha::Fixed(a) => Ok((a, "init")),
            }
        } else {
            let phase = if schedule.needs_history() { k - 1 } else { k };
            scheduler.next(phase, &st)
        };
        let (alpha, rule) = match picked {
            Ok(v) => v,
            Err(Error::NotSpd) => {
                rows.push(IterRow { k, f_gap, gnorm, alpha: None, rule: "final" });
                status = Status::NumericalFailure;
                break;
            }
            Err(e) => return Err(e),
        };
        if !(alpha.is_finite() && alpha > 0.0) {
            rows.push(IterRow { k, f_gap, gnorm, alpha: None, rule: "final" });
            status = Status::NumericalFailure;
            break;
        }

        rows.push(IterRow { k, f_gap, gnorm, alpha: Some(alpha), rule });
        for (xi, gi) in x.iter_mut().zip(&st.g) {
            *xi -= alpha * gi;
        }
        st = st.advance(problem, alpha);
        if let Some(m) = mu.as_mut() {
            m.push_step(alpha, &st.g);
        }
        k += 1;
    }

    let iterations = rows.last().map_or(0, |r| r.k);
    Ok(IterateTrace { rows, status, iterations, mu, tilde, final_x: x })
}

/// Outcome of the two-dimensional three-step experiment.
#[derive(Debug, Clone)]
pub struct Ft2dOutcome {
    /// The larger eigenvalue of `A = diag(1, lambda)`.
    pub lambda: f64,
    /// `(|g_3|, f(x_3) - f*)` for each start.
    pub per_start: Vec<(f64, f64)>,
    /// Mean of `|g_3|` over the starts.
    pub mean_gnorm: f64,
    /// Mean of `f(x_3) - f*` over the starts.
    pub mean_gap: f64,
}

/// Runs the three-step sequence (minimal gradient, zigzag-breaking
/// short step, minimal gradient) on `A = diag(1, lambda)`, `b = 0`,
/// from `n_starts` random starts with components uniform on
/// `[-10, 10]`. In exact arithmetic the short step annihilates the
/// remaining gradient direction, so three steps land on the minimizer;
/// the returned means measure how close floating point gets.
pub fn finite_termination_2d(
    lambda: f64,
    n_starts: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Ft2dOutcome> {
    if !(lambda.is_finite() && lambda > 1.0) {
        return Err(Error::InvalidParameter { name: "lambda", value: lambda });
    }
    if n_starts == 0 {
        return Err(Error::InvalidParameter { name: "n_starts", value: 0.0 });
    }
    let problem = QuadraticProblem::diagonal(vec![1.0, lambda], vec![0.0, 0.0])?;
    let mut per_start = Vec::with_capacity(n_starts);
    let (mut sum_g, mut sum_f) = (0.0, 0.0);
    for _ in 0..n_starts {
        let x0 = [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)];
        let g0 = problem.gradient(&x0);
        let mut st = StepState::from_gradient(&problem, g0, 2);
        for step in 0..3 {
            if st.gg() == 0.0 {
                break;
            }
            let alpha = if step == 1 { step_tilde_mg(&st)? } else { step_mg(&st)? };
            st = st.advance(&problem, alpha);
        }
        let gn = st.gg().sqrt();
        let fg = problem.gap_from_gradient(&st.g);
        per_start.push((gn, fg));
        sum_g += gn;
        sum_f += fg;
    }
    Ok(Ft2dOutcome {
        lambda,
        per_start,
        mean_gnorm: sum_g / n_starts as f64,
        mean_gap: sum_f / n_starts as f64,
    })
}
