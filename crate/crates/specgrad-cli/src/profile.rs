//! Dolan-More performance profiles on the iteration metric.
//!
//! For each instance the cost of every method is divided by the best
//! finite cost on that instance; a method's curve maps a ratio `rho`
//! to the fraction of instances it solved within `rho` times the best.
//! Runs that did not converge cost `+inf`, so their ratios never fall
//! under any finite `rho` and the curve's plateau height is the
//! method's solve rate.

use std::collections::BTreeMap;

use specgrad_core::solver::Status;

use crate::bench::ReportRow;
use crate::{CliError, Result};

/// Cost matrix for a profile: `costs[i][m]` is method `m`'s cost on
/// instance `i`, `+inf` for a failed run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileInput {
    /// Column labels.
    pub methods: Vec<String>,
    /// One row per instance.
    pub costs: Vec<Vec<f64>>,
}

/// Profile curves evaluated at every breakpoint ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurves {
    /// Column labels, matching the input order.
    pub methods: Vec<String>,
    /// Breakpoints: every distinct finite cost ratio, plus 1.
    pub rho: Vec<f64>,
    /// `fractions[m][j]`: fraction of kept instances where method `m`'s
    /// ratio is at most `rho[j]`. Nondecreasing in `j`.
    pub fractions: Vec<Vec<f64>>,
    /// Instances that contributed (at least one method finished).
    pub kept: usize,
    /// Instances dropped because every method failed on them.
    pub dropped: usize,
}

/// Computes the profile curves.
pub fn performance_profile(input: &ProfileInput) -> Result<ProfileCurves> {
    let m = input.methods.len();
    if m == 0 {
        return Err(CliError::Usage("a profile needs at least one method".into()));
    }
    for row in &input.costs {
        if row.len() != m {
            return Err(CliError::Usage(format!(
                "cost row has {} entries for {} methods",
                row.len(),
                m
            )));
        }
        for &c in row {
            if c.is_nan() || c <= 0.0 {
                return Err(CliError::Usage(format!("cost {c} is not positive")));
            }
        }
    }

    // Per-instance ratios against the best finite cost; instances
    // where nothing finished are dropped.
    let mut ratios: Vec<Vec<f64>> = Vec::new();
    let mut dropped = 0usize;
    for row in &input.costs {
        let best = row.iter().copied().filter(|c| c.is_finite()).fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            dropped += 1;
            continue;
        }
        ratios.push(row.iter().map(|&c| c / best).collect());
    }
    let kept = ratios.len();
    if kept == 0 {
        return Err(CliError::Usage(
            "every instance was dropped: no method finished anywhere".into(),
        ));
    }

    // Breakpoints: all distinct finite ratios, always including 1.
    let mut rho: Vec<f64> = ratios
        .iter()
        .flatten()
        .copied()
        .filter(|r| r.is_finite())
        .chain(std::iter::once(1.0))
        .collect();
    rho.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    rho.dedup();

    let fractions: Vec<Vec<f64>> = (0..m)
        .map(|mi| {
            rho.iter()
                .map(|&r| {
                    let hit = ratios.iter().filter(|inst| inst[mi] <= r).count();
                    hit as f64 / kept as f64
                })
                .collect()
        })
        .collect();

    Ok(ProfileCurves { methods: input.methods.clone(), rho, fractions, kept, dropped })
}

/// Builds the cost matrix from report rows: one instance per `(set,
/// kappa, epsilon, replicate)`, cost = iterations for converged runs,
/// `+inf` otherwise. Every instance must carry a row for every method.
pub fn profile_input_from_report(rows: &[ReportRow]) -> Result<ProfileInput> {
    let mut methods: Vec<String> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
    }
    if methods.is_empty() {
        return Err(CliError::Usage("the report contains no rows".into()));
    }
    let index: BTreeMap<&str, usize> =
        methods.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect();

    let mut order: Vec<(u8, u64, u64, u32)> = Vec::new();
    let mut costs: BTreeMap<(u8, u64, u64, u32), Vec<f64>> = BTreeMap::new();
    for r in rows {
        let key = (r.set, r.kappa.to_bits(), r.epsilon.to_bits(), r.replicate);
        let entry = costs.entry(key).or_insert_with(|| {
            order.push(key);
            vec![f64::NAN; methods.len()]
        });
        let mi = index[r.method.as_str()];
        if !entry[mi].is_nan() {
            return Err(CliError::Usage(format!(
                "duplicate report row: method {} appears twice on one instance",
                r.method
            )));
        }
        entry[mi] = if r.status == Status::Converged {
            r.iterations as f64
        } else {
            f64::INFINITY
        };
    }
    let mut matrix = Vec::with_capacity(order.len());
    for key in order {
        let row = costs.remove(&key).expect("keyed above");
        if row.iter().any(|c| c.is_nan()) {
            return Err(CliError::Usage(format!(
                "incomplete report: instance (set {}, replicate {}) lacks some method rows",
                key.0, key.3
            )));
        }
        matrix.push(row);
    }
    Ok(ProfileInput { methods, costs: matrix })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(methods: &[&str], costs: &[&[f64]]) -> ProfileInput {
        ProfileInput {
            methods: methods.iter().map(|m| m.to_string()).collect(),
            costs: costs.iter().map(|r| r.to_vec()).collect(),
        }
    }

    #[test]
    fn curves_match_a_hand_computed_profile() {
        // Instance bests are 10, 20, 30; q fails on the last one.
        let p = performance_profile(&input(
            &["p", "q"],
            &[&[10.0, 20.0], &[20.0, 20.0], &[30.0, f64::INFINITY]],
        ))
        .unwrap();
        assert_eq!(p.rho, vec![1.0, 2.0]);
        assert_eq!(p.fractions[0], vec![1.0, 1.0]);
        assert_eq!(p.fractions[1], vec![1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!((p.kept, p.dropped), (3, 0));
    }

    #[test]
    fn instances_nobody_solves_are_dropped() {
        let p = performance_profile(&input(
            &["p", "q"],
            &[&[10.0, 20.0], &[f64::INFINITY, f64::INFINITY]],
        ))
        .unwrap();
        assert_eq!((p.kept, p.dropped), (1, 1));
        assert_eq!(p.rho, vec![1.0, 2.0]);
        assert_eq!(p.fractions[0], vec![1.0, 1.0]);
        assert_eq!(p.fractions[1], vec![0.0, 1.0]);

        let all_failed = performance_profile(&input(&["p"], &[&[f64::INFINITY]]));
        assert!(matches!(all_failed, Err(CliError::Usage(_))));
    }

    #[test]
    fn single_method_profiles_are_allowed() {
        let p = performance_profile(&input(&["only"], &[&[5.0], &[7.0]])).unwrap();
        assert_eq!(p.rho, vec![1.0]);
        assert_eq!(p.fractions, vec![vec![1.0]]);
    }

    #[test]
    fn nonpositive_costs_are_rejected() {
        for bad in [0.0, -3.0, f64::NAN] {
            let r = performance_profile(&input(&["p"], &[&[bad]]));
            assert!(matches!(r, Err(CliError::Usage(_))), "cost {bad} accepted");
        }
    }

    #[test]
    fn report_conversion_requires_complete_instances() {
        let row = |method: &str, replicate, iterations, status| ReportRow {
            set: 1,
            kappa: 10.0,
            epsilon: 1e-6,
            method: method.into(),
            params: method.into(),
            replicate,
            iterations,
            status,
            phash: 0,
        };
        let ok = profile_input_from_report(&[
            row("p", 0, 10, Status::Converged),
            row("q", 0, 500, Status::IterCap),
            row("p", 1, 20, Status::Converged),
            row("q", 1, 15, Status::Converged),
        ])
        .unwrap();
        assert_eq!(ok.methods, vec!["p".to_string(), "q".to_string()]);
        // Failed runs cost +inf no matter how many iterations they spent.
        assert_eq!(ok.costs, vec![vec![10.0, f64::INFINITY], vec![20.0, 15.0]]);

        let dup = profile_input_from_report(&[
            row("p", 0, 10, Status::Converged),
            row("p", 0, 12, Status::Converged),
        ]);
        assert!(matches!(dup, Err(CliError::Usage(_))));

        let incomplete = profile_input_from_report(&[
            row("p", 0, 10, Status::Converged),
            row("q", 0, 11, Status::Converged),
            row("p", 1, 20, Status::Converged),
        ]);
        assert!(matches!(incomplete, Err(CliError::Usage(_))));
    }
}
