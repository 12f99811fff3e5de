//! Benchmark grid: generate random rotated instances over the
//! structured eigenvalue families, run every method on every instance,
//! and aggregate iteration counts into a compact table.
//!
//! The grid is deterministic given the base seed. Each instance —
//! identified by `(set, kappa, epsilon, replicate)` — draws from its
//! own RNG substream, so the instance list does not depend on which
//! subset of the grid is requested or on thread scheduling, and every
//! method sees the identical problem and starting point.

use rand::Rng;
use rayon::prelude::*;

use specgrad_core::quadratic::set_spectrum;
use specgrad_core::rng;
use specgrad_core::solver::{run, BbVariant, Schedule, SolverConfig, Status};
use specgrad_core::QuadraticProblem;

use std::collections::BTreeMap;

use crate::{CliError, Result};

/// How the periodic method's `K_b` is chosen per eigenvalue family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KbPolicy {
    /// 100 for families 1 and 5, 30 for the others.
    Auto,
    /// The same value everywhere.
    Fixed(u32),
}

impl KbPolicy {
    /// `K_b` for the given family.
    pub fn for_set(self, set: u8) -> u32 {
        match self {
            KbPolicy::Auto => {
                if set == 1 || set == 5 {
                    100
                } else {
                    30
                }
            }
            KbPolicy::Fixed(v) => v,
        }
    }
}

/// One column of the comparison: either a complete schedule, or the
/// periodic method expanded over the grid's `(K_m, K_s)` pairs with
/// `K_b` supplied by the per-set policy.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    /// A fixed schedule, used verbatim.
    Fixed(Schedule),
    /// `alg1:<bb>:<family>` expanded over the `(K_m, K_s)` pairs.
    PeriodicGrid {
        /// Which Barzilai-Borwein rule fills the first phase.
        bb: BbVariant,
        /// Family exponent of the middle phase (0 = sd, 1 = mg).
        psi_u: u32,
    },
}

/// The full grid description. `methods` applies to every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Eigenvalue families to draw from, each in `1..=7`.
    pub sets: Vec<u8>,
    /// Condition numbers.
    pub kappas: Vec<f64>,
    /// Convergence tolerances.
    pub epsilons: Vec<f64>,
    /// Problem dimension.
    pub n: usize,
    /// Instances per `(set, kappa, epsilon)` cell.
    pub replicates: u32,
    /// Base seed; every instance derives a substream from it.
    pub base_seed: u64,
    /// The methods to compare.
    pub methods: Vec<MethodSpec>,
    /// `(K_m, K_s)` pairs for [`MethodSpec::PeriodicGrid`] columns.
    pub km_ks: Vec<(u32, u32)>,
    /// Per-set `K_b` policy for those columns.
    pub kb: KbPolicy,
    /// Iteration cap for every run.
    pub max_iter: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            sets: (1..=7).collect(),
            kappas: vec![1e4, 1e5, 1e6],
            epsilons: vec![1e-6, 1e-9, 1e-12],
            n: 100,
            replicates: 10,
            base_seed: 0,
            methods: default_methods(),
            km_ks: default_km_ks(),
            kb: KbPolicy::Auto,
            max_iter: 20_000,
        }
    }
}

/// The paper-style comparison line-up: the four periodic variants plus
/// the BB, DY, ABBmin2 and SDC baselines.
pub fn default_methods() -> Vec<MethodSpec> {
    vec![
        MethodSpec::PeriodicGrid { bb: BbVariant::Bb1, psi_u: 0 },
        MethodSpec::PeriodicGrid { bb: BbVariant::Bb1, psi_u: 1 },
        MethodSpec::PeriodicGrid { bb: BbVariant::Bb2, psi_u: 0 },
        MethodSpec::PeriodicGrid { bb: BbVariant::Bb2, psi_u: 1 },
        MethodSpec::Fixed(Schedule::Bb1),
        MethodSpec::Fixed(Schedule::Dy),
        MethodSpec::Fixed(Schedule::Abbmin2 { tau: 0.9, memory: 9 }),
        MethodSpec::Fixed(Schedule::Sdc { h: 8, s: 6 }),
    ]
}

/// All nine `(K_m, K_s)` pairs over `{9, 13, 15}`.
pub fn default_km_ks() -> Vec<(u32, u32)> {
    let vals = [9u32, 13, 15];
    let mut out = Vec::with_capacity(9);
    for &km in &vals {
        for &ks in &vals {
            out.push((km, ks));
        }
    }
    out
}

/// One run's record in the report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// Eigenvalue family id.
    pub set: u8,
    /// Condition number of the instance.
    pub kappa: f64,
    /// Convergence tolerance of the run.
    pub epsilon: f64,
    /// Column label of the method (stable across sets).
    pub method: String,
    /// The concrete schedule that ran, as a parseable string.
    pub params: String,
    /// Replicate index within the cell.
    pub replicate: u32,
    /// Completed iterations when the run stopped.
    pub iterations: usize,
    /// Why the run stopped.
    pub status: Status,
    /// Fingerprint of the instance's problem data; equal across all
    /// method rows of one instance.
    pub phash: u64,
}

fn bb_str(bb: BbVariant) -> &'static str {
    match bb {
        BbVariant::Bb1 => "bb1",
        BbVariant::Bb2 => "bb2",
    }
}

fn family_str(psi_u: u32) -> String {
    match psi_u {
        0 => "sd".into(),
        1 => "mg".into(),
        u => format!("family:{u}"),
    }
}

impl MethodSpec {
    /// The `(column label, schedule)` pairs this method contributes
    /// for one eigenvalue family. Periodic-grid labels replace the
    /// per-set `K_b` with `*` so the column identity is shared across
    /// families.
    pub fn expand(&self, set: u8, km_ks: &[(u32, u32)], kb: KbPolicy) -> Vec<(String, Schedule)> {
        match self {
            MethodSpec::Fixed(s) => vec![(s.to_string(), s.clone())],
            MethodSpec::PeriodicGrid { bb, psi_u } => km_ks
                .iter()
                .map(|&(km, ks)| {
                    let label =
                        format!("alg1:{}:{}:*:{}:{}", bb_str(*bb), family_str(*psi_u), km, ks);
                    let schedule = Schedule::Periodic {
                        bb: *bb,
                        psi_u: *psi_u,
                        kb: kb.for_set(set),
                        km,
                        ks,
                    };
                    (label, schedule)
                })
                .collect(),
        }
    }
}

impl GridSpec {
    /// Checks list contents and probes each family once so impossible
    /// dimensions fail before any work is scheduled.
    pub fn validate(&self) -> Result<()> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.sets.is_empty() {
            return usage("at least one eigenvalue family is required".into());
        }
        for &s in &self.sets {
            if !(1..=7).contains(&s) {
                return usage(format!("unknown eigenvalue family {s} (valid: 1..7)"));
            }
        }
        if self.kappas.is_empty() || self.epsilons.is_empty() {
            return usage("kappa and epsilon lists must be nonempty".into());
        }
        for &k in &self.kappas {
            if !(k.is_finite() && k > 1.0) {
                return usage(format!("condition number {k} must exceed 1"));
            }
        }
        for &e in &self.epsilons {
            if !(e > 0.0 && e < 1.0) {
                return usage(format!("tolerance {e} must lie in (0, 1)"));
            }
        }
        if self.replicates == 0 {
            return usage("at least one replicate is required".into());
        }
        if self.max_iter == 0 {
            return usage("iteration cap must be positive".into());
        }
        if self.methods.is_empty() {
            return usage("at least one method is required".into());
        }
        let grid_used = self
            .methods
            .iter()
            .any(|m| matches!(m, MethodSpec::PeriodicGrid { .. }));
        if grid_used && self.km_ks.is_empty() {
            return usage("periodic-grid methods need at least one (K_m, K_s) pair".into());
        }
        for &(km, ks) in &self.km_ks {
            if ks == 0 {
                return usage(format!("(K_m, K_s) = ({km}, {ks}): K_s must be positive"));
            }
        }
        // Probe each family at this dimension; rejects n too small for
        // the family's index blocks.
        for &set in &self.sets {
            let mut probe = rng::substream(self.base_seed, &[u64::MAX, set as u64]);
            set_spectrum(set, self.n, self.kappas[0], &mut probe)?;
        }
        // Expanded schedules must validate.
        for m in &self.methods {
            for (_, s) in m.expand(self.sets[0], &self.km_ks, self.kb) {
                s.validate()?;
            }
        }
        Ok(())
    }

    /// Column labels in report order.
    pub fn method_labels(&self) -> Vec<String> {
        let set = *self.sets.first().unwrap_or(&1);
        self.methods
            .iter()
            .flat_map(|m| m.expand(set, &self.km_ks, self.kb))
            .map(|(label, _)| label)
            .collect()
    }
}

/// Runs the whole grid. Solver outcomes (including iteration caps and
/// numerical failures) are recorded in the rows, never raised; only
/// configuration errors abort.
pub fn run_grid(spec: &GridSpec) -> Result<Vec<ReportRow>> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for &set in &spec.sets {
        for &kappa in &spec.kappas {
            for &epsilon in &spec.epsilons {
                for replicate in 0..spec.replicates {
                    jobs.push((set, kappa, epsilon, replicate));
                }
            }
        }
    }
    let nested: Vec<Vec<ReportRow>> = jobs
        .par_iter()
        .map(|&(set, kappa, epsilon, replicate)| {
            run_instance(spec, set, kappa, epsilon, replicate)
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Generates one instance and runs every method on it.
///
/// Draw order within the instance substream: interior eigenvalues,
/// then the right-hand side (components uniform on `[-10, 10]`), then
/// the three rotation vectors. The start is the all-ones vector.
fn run_instance(
    spec: &GridSpec,
    set: u8,
    kappa: f64,
    epsilon: f64,
    replicate: u32,
) -> Result<Vec<ReportRow>> {
    let mut rng = rng::substream(
        spec.base_seed,
        &[set as u64, kappa.to_bits(), epsilon.to_bits(), replicate as u64],
    );
    let lambda = set_spectrum(set, spec.n, kappa, &mut rng)?;
    let b: Vec<f64> = (0..spec.n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    let problem = QuadraticProblem::rotated(lambda, b, &mut rng)?;
    let x0 = vec![1.0; spec.n];
    let phash = problem.fingerprint();
    let cfg = SolverConfig {
        epsilon,
        max_iter: spec.max_iter,
        ..SolverConfig::default()
    };
    let mut rows = Vec::new();
    for m in &spec.methods {
        for (label, schedule) in m.expand(set, &spec.km_ks, spec.kb) {
            let trace = run(&problem, &x0, &schedule, &cfg)?;
            rows.push(ReportRow {
                set,
                kappa,
                epsilon,
                method: label,
                params: schedule.to_string(),
                replicate,
                iterations: trace.iterations,
                status: trace.status,
                phash,
            });
        }
    }
    Ok(rows)
}

/// One aggregated cell: the mean iteration count of a method on a
/// `(set, epsilon)` slice of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    /// Mean over replicates per condition number, then over condition
    /// numbers.
    pub mean: f64,
    /// Whether any contributing run stopped short of convergence.
    pub any_unconverged: bool,
    /// Number of runs behind the mean.
    pub runs: usize,
}

/// The aggregated table: per-`(set, eps, method)` means and
/// per-`(eps, method)` totals (sum of the set means).
#[derive(Debug, Clone)]
pub struct Summary {
    /// Column labels in first-seen order.
    pub methods: Vec<String>,
    /// Family ids, ascending.
    pub sets: Vec<u8>,
    /// Tolerances, ascending.
    pub epsilons: Vec<f64>,
    /// Cells keyed by `(set, eps bits, method)`.
    pub cells: BTreeMap<(u8, u64, String), Cell>,
    /// Totals keyed by `(eps bits, method)`: the sum of that method's
    /// set means at that tolerance, with a flag when any contributing
    /// cell had unconverged runs.
    pub totals: BTreeMap<(u64, String), (f64, bool)>,
}

/// Aggregates a report: mean over replicates within each `(set,
/// kappa, eps, method)` cell, then mean over kappas, then totals as
/// the per-epsilon sum of set means.
pub fn aggregate(rows: &[ReportRow]) -> Summary {
    let mut methods: Vec<String> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
    }
    let mut sets: Vec<u8> = rows.iter().map(|r| r.set).collect();
    sets.sort_unstable();
    sets.dedup();
    let mut epsilons: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    epsilons.sort_by(|a, b| a.partial_cmp(b).expect("finite tolerances"));
    epsilons.dedup();

    // Stage one: mean over replicates per (set, kappa, eps, method).
    #[derive(Default)]
    struct Acc {
        sum: f64,
        count: usize,
        unconverged: bool,
    }
    let mut per_kappa: BTreeMap<(u8, u64, u64, String), Acc> = BTreeMap::new();
    for r in rows {
        let a = per_kappa
            .entry((r.set, r.epsilon.to_bits(), r.kappa.to_bits(), r.method.clone()))
            .or_default();
        a.sum += r.iterations as f64;
        a.count += 1;
        a.unconverged |= r.status != Status::Converged;
    }

    // Stage two: mean over kappas per (set, eps, method).
    #[derive(Default)]
    struct CellAcc {
        sum_of_means: f64,
        kappas: usize,
        runs: usize,
        unconverged: bool,
    }
    let mut cells: BTreeMap<(u8, u64, String), CellAcc> = BTreeMap::new();
    for ((set, eps_bits, _kappa_bits, method), a) in &per_kappa {
        let e = cells.entry((*set, *eps_bits, method.clone())).or_default();
        e.sum_of_means += a.sum / a.count as f64;
        e.kappas += 1;
        e.runs += a.count;
        e.unconverged |= a.unconverged;
    }
    let cells: BTreeMap<(u8, u64, String), Cell> = cells
        .into_iter()
        .map(|(key, acc)| {
            (
                key,
                Cell {
                    mean: acc.sum_of_means / acc.kappas as f64,
                    any_unconverged: acc.unconverged,
                    runs: acc.runs,
                },
            )
        })
        .collect();

    // Totals: sum of set means per (eps, method).
    let mut totals: BTreeMap<(u64, String), (f64, bool)> = BTreeMap::new();
    for ((_, eps_bits, method), cell) in &cells {
        let t = totals
            .entry((*eps_bits, method.clone()))
            .or_insert((0.0, false));
        t.0 += cell.mean;
        t.1 |= cell.any_unconverged;
    }

    Summary { methods, sets, epsilons, cells, totals }
}
