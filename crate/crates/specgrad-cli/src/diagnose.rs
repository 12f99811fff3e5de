//! Post-run analysis connecting a solver trace to the two-cycle
//! theory: per-iterate weight dynamics, the recovered cycle constant,
//! predicted versus observed contraction rates and stepsize limits,
//! and the spectral bound on the constant.
//!
//! Only plain family schedules (`sd`, `mg`, `family:u`) on diagonal
//! problems are analyzable: the theory fixes one weight function and
//! needs per-eigencomponent history.

use specgrad_core::dynamics::{gamma, theta};
use specgrad_core::rates::{
    c_bound, estimate_c, predict_alpha_limits, predict_rates, product_upper_bound,
    InteriorExclusion,
};
use specgrad_core::solver::{run, IterateTrace, Schedule, SolverConfig};
use specgrad_core::{Psi, QuadraticProblem};

use crate::csvio::{fmt_f64, status_str};
use crate::{CliError, Result};

/// Everything the `diagnose` subcommand writes.
#[derive(Debug, Clone)]
pub struct DiagnoseOutput {
    /// The underlying run.
    pub trace: IterateTrace,
    /// Per-iterate `(k, gamma, theta, weights)`.
    pub dynamics: Vec<(usize, f64, f64, Vec<f64>)>,
    /// Ordered `key,value` summary rows.
    pub summary: Vec<(String, String)>,
}

/// Tail means of the odd/even and even/odd ratios of a positive
/// series: `r1` averages `v[2j+1] / v[2j]`, `r2` averages
/// `v[2j+2] / v[2j+1]`, each over its last `tail_pairs` valid samples.
fn tail_ratio_means(vals: &[f64], tail_pairs: usize) -> (Option<f64>, Option<f64>) {
    let mean_of = |offset: usize| -> Option<f64> {
        let mut samples = Vec::new();
        let mut e = if vals.len() > offset { (vals.len() - 1 - offset) / 2 * 2 } else { return None };
        loop {
            let (num, den) = (vals[e + offset], vals[e + offset - 1]);
            if num > 0.0 && num.is_finite() && den > 0.0 && den.is_finite() {
                samples.push(num / den);
                if samples.len() == tail_pairs {
                    break;
                }
            }
            if e < 2 {
                break;
            }
            e -= 2;
        }
        if samples.is_empty() {
            None
        } else {
            Some(samples.iter().sum::<f64>() / samples.len() as f64)
        }
    };
    (mean_of(1), mean_of(2))
}

/// Tail means of the stepsizes on even and odd iterations, plus the
/// mean reciprocal sum over consecutive `(even, odd)` pairs.
fn tail_alpha_means(alphas: &[f64], tail_pairs: usize) -> Option<(f64, f64, f64)> {
    if alphas.len() < 2 {
        return None;
    }
    let mut even = Vec::new();
    let mut odd = Vec::new();
    let mut recip = Vec::new();
    let mut e = (alphas.len() - 2) / 2 * 2;
    loop {
        even.push(alphas[e]);
        odd.push(alphas[e + 1]);
        recip.push(1.0 / alphas[e] + 1.0 / alphas[e + 1]);
        if recip.len() == tail_pairs || e < 2 {
            break;
        }
        e -= 2;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Some((mean(&even), mean(&odd), mean(&recip)))
}

/// The weight function of a plain family schedule, or a usage error.
pub fn family_psi(schedule: &Schedule) -> Result<(u32, Psi)> {
    match schedule.family_u() {
        Some(0) => Ok((0, Psi::One)),
        Some(u) => Ok((u, Psi::Monomial(u))),
        None => Err(CliError::Usage(format!(
            "schedule '{schedule}' is not a plain family rule; the weight dynamics \
             need sd, mg, or family:u"
        ))),
    }
}

/// Runs the problem and assembles the dynamics table and summary.
pub fn diagnose(
    problem: &QuadraticProblem,
    x0: &[f64],
    schedule: &Schedule,
    cfg: &SolverConfig,
    tail_pairs: usize,
    rule: InteriorExclusion,
) -> Result<DiagnoseOutput> {
    let (u, psi) = family_psi(schedule)?;
    if !problem.is_diagonal() {
        return Err(CliError::Usage(
            "the weight dynamics need per-component history; use a diagonal problem \
             (drop --rotate)"
                .into(),
        ));
    }
    if tail_pairs == 0 {
        return Err(CliError::Usage("the analysis tail must be at least one pair".into()));
    }
    let cfg = SolverConfig { track_mu: true, ..cfg.clone() };
    let trace = run(problem, x0, schedule, &cfg)?;
    let mu = trace.mu.as_ref().expect("mu tracking was requested");

    let lambda = problem.spectrum();
    let n = problem.n();
    let (l1, ln) = (lambda[0], lambda[n - 1]);
    let (psi1, psin) = (psi.eval(0, l1), psi.eval(n - 1, ln));

    let mut dynamics = Vec::with_capacity(mu.len());
    for k in 0..mu.len() {
        let q = mu.q_weights(k)?;
        let g = gamma(&q, &psi, lambda)?;
        let t = theta(&q, &psi, lambda)?;
        dynamics.push((k, g, t, q));
    }

    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| pairs.push((k.to_string(), v));
    let psi_name = match u {
        0 => "1".to_string(),
        1 => "lambda".to_string(),
        u => format!("lambda^{u}"),
    };
    put("n", n.to_string());
    put("lambda_1", fmt_f64(l1));
    put("lambda_n", fmt_f64(ln));
    put("kappa", fmt_f64(problem.kappa()));
    put("schedule", schedule.to_string());
    put("psi", psi_name);
    put("epsilon", fmt_f64(cfg.epsilon));
    put("status", status_str(trace.status).to_string());
    put("iterations", trace.iterations.to_string());
    put("tail_pairs", tail_pairs.to_string());

    // The cycle constant and everything predicted from it.
    let kappa = problem.kappa();
    let mut c2_hat = None;
    match estimate_c(mu, psi1, psin, tail_pairs) {
        Err(e) => put("c_error", e.to_string()),
        Ok(est) => {
            put("c_even", fmt_f64(est.c));
            put("c_odd", fmt_f64(est.c_odd));
            put("c_discrepancy", fmt_f64(est.discrepancy));
            put("c_sign_flips", est.sign_flips.to_string());
            match predict_rates(est.c, kappa, psi1, psin) {
                Err(e) => put("rates_error", e.to_string()),
                Ok(r) => {
                    put("pred_r_f1", fmt_f64(r.r_f1));
                    put("pred_r_f2", fmt_f64(r.r_f2));
                    put("pred_r_g1", fmt_f64(r.r_g1));
                    put("pred_r_g2", fmt_f64(r.r_g2));
                    put("pred_product", fmt_f64(r.product));
                    put("product_bound", fmt_f64(product_upper_bound(kappa)));
                }
            }
            match predict_alpha_limits(est.c, psi1, psin, l1, ln) {
                Err(e) => put("alpha_limits_error", e.to_string()),
                Ok(a) => {
                    put("pred_alpha_even", fmt_f64(a.even));
                    put("pred_alpha_odd", fmt_f64(a.odd));
                }
            }
            c2_hat = Some(est.c * est.c);
            put("c2_hat", fmt_f64(est.c * est.c));
        }
    }

    // Observed tail behavior.
    let f_gaps: Vec<f64> = trace.rows.iter().map(|r| r.f_gap).collect();
    let g_sq: Vec<f64> = trace.rows.iter().map(|r| r.gnorm * r.gnorm).collect();
    let (obs_f1, obs_f2) = tail_ratio_means(&f_gaps, tail_pairs);
    let (obs_g1, obs_g2) = tail_ratio_means(&g_sq, tail_pairs);
    let name = [
        ("obs_r_f1", obs_f1),
        ("obs_r_f2", obs_f2),
        ("obs_r_g1", obs_g1),
        ("obs_r_g2", obs_g2),
    ];
    for (key, val) in name {
        if let Some(v) = val {
            put(key, fmt_f64(v));
        }
    }
    let alphas = trace.alphas();
    if let Some((ae, ao, rsum)) = tail_alpha_means(&alphas, tail_pairs) {
        put("obs_alpha_even", fmt_f64(ae));
        put("obs_alpha_odd", fmt_f64(ao));
        put("obs_recip_pair_sum", fmt_f64(rsum));
        put("lambda_sum", fmt_f64(l1 + ln));
    }

    // The spectral bound, over the interior components that survived.
    let interior = specgrad_core::rates::surviving_interior(mu, &alphas, rule);
    put(
        "interior_rule",
        match rule {
            InteriorExclusion::Reciprocal => "reciprocal".to_string(),
            InteriorExclusion::Literal => "literal".to_string(),
        },
    );
    if interior.is_empty() {
        put("interior_surviving", "none".to_string());
    } else {
        put(
            "interior_surviving",
            interior.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(";"),
        );
        match c_bound(lambda, &psi, &interior) {
            Err(e) => put("c_bound_error", e.to_string()),
            Ok(b) => {
                put("sigma", fmt_f64(b.sigma));
                put("phi", fmt_f64(b.phi));
                put("c2_lower", fmt_f64(b.lower));
                put("c2_upper", fmt_f64(b.upper));
                if let Some(c2) = c2_hat {
                    let inside = c2 >= b.lower && c2 <= b.upper;
                    put("c2_within_bound", if inside { "yes" } else { "no" }.to_string());
                }
            }
        }
    }

    // Final support: the two heaviest weights at the last iterate.
    if let Some((_, _, _, q)) = dynamics.last() {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| q[b].partial_cmp(&q[a]).expect("weights are finite"));
        let mut top: Vec<usize> = idx.into_iter().take(2).collect();
        top.sort_unstable();
        pairs.push((
            "support".to_string(),
            top.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(";"),
        ));
    }

    Ok(DiagnoseOutput { trace, dynamics, summary: pairs })
}
