//! Asymptotic rate constants, stepsize limits, and bounds on the
//! cycle constant.
//!
//! Once the weight dynamics of [`crate::dynamics`] has settled into its
//! two-point cycle on the extreme eigenvalues, every quantity of the
//! run converges: the stepsizes alternate between two limits, and the
//! objective gap and squared gradient norm contract by fixed factors
//! on even and odd steps. All of them are rational functions of four
//! numbers: the condition number `kappa = lambda_n / lambda_1`, the
//! endpoint weights `psi_1 = Psi(lambda_1)` and `psi_n =
//! Psi(lambda_n)`, and the cycle constant
//!
//! ```text
//! c = lim mu_{2k}^{(n)} / mu_{2k}^{(1)},
//! ```
//!
//! the signed limiting ratio of the extreme gradient components over
//! even iterates. This module computes the closed forms
//! ([`predict_rates`], [`predict_alpha_limits`]), estimates `c` from a
//! recorded component history ([`estimate_c`]), and evaluates the
//! spectral interval that must contain `c^2` ([`c_bound`]).

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::solver::MuTrace;
use crate::{Error, Psi, Result};

/// The four asymptotic contraction factors of a two-cycle, plus their
/// common product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePrediction {
    /// Even-to-odd contraction of the objective gap:
    /// `lim (f_{2k+1} - f*) / (f_{2k} - f*)`.
    pub r_f1: f64,
    /// Odd-to-even contraction of the objective gap.
    pub r_f2: f64,
    /// Even-to-odd contraction of the squared gradient norm.
    pub r_g1: f64,
    /// Odd-to-even contraction of the squared gradient norm.
    pub r_g2: f64,
    /// The per-cycle contraction `r_f1 * r_f2 = r_g1 * r_g2`.
    pub product: f64,
}

fn check_cycle_inputs(c: f64, kappa: f64, psi1: f64, psin: f64) -> Result<f64> {
    if !(c.is_finite() && c != 0.0) {
        return Err(Error::InvalidParameter { name: "c", value: c });
    }
    if !(kappa.is_finite() && kappa > 1.0) {
        return Err(Error::InvalidParameter { name: "kappa", value: kappa });
    }
    if !(psi1.is_finite() && psi1 > 0.0) {
        return Err(Error::InvalidParameter { name: "psi1", value: psi1 });
    }
    if !(psin.is_finite() && psin > 0.0) {
        return Err(Error::InvalidParameter { name: "psin", value: psin });
    }
    Ok(c * c)
}

/// Closed-form contraction factors of the two-cycle with constant `c`
/// on a spectrum of condition number `kappa`, under a rule with
/// endpoint weights `psi1`, `psin`. Only `c^2` enters; the sign of `c`
/// is irrelevant here.
pub fn predict_rates(c: f64, kappa: f64, psi1: f64, psin: f64) -> Result<RatePrediction> {
    let c2 = check_cycle_inputs(c, kappa, psi1, psin)?;
    let k = kappa;
    let km1 = k - 1.0;
    let d1 = psi1 + c2 * k * psin; // denominator core of the even step
    let d2 = c2 * psin + k * psi1; // denominator core of the odd step
    let r_f1 = c2 * km1 * km1 * (psi1 * psi1 + c2 * k * psin * psin) / (d1 * d1 * (c2 + k));
    let r_f2 = c2 * km1 * km1 * (c2 + k) * psi1 * psi1 * psin * psin
        / (d2 * d2 * (psi1 * psi1 + c2 * k * psin * psin));
    let r_g1 = c2 * km1 * km1 * (psi1 * psi1 + c2 * psin * psin) / ((1.0 + c2) * d1 * d1);
    let r_g2 = c2 * (1.0 + c2) * km1 * km1 * psi1 * psi1 * psin * psin
        / (d2 * d2 * (psi1 * psi1 + c2 * psin * psin));
    let product = c2 * c2 * km1 * km1 * km1 * km1 * psi1 * psi1 * psin * psin / (d1 * d1 * d2 * d2);
    Ok(RatePrediction { r_f1, r_f2, r_g1, r_g2, product })
}

/// The sharp upper bound `((kappa - 1)/(kappa + 1))^4` on the
/// per-cycle contraction [`RatePrediction::product`], attained exactly
/// when `c^2 = psi1 / psin`.
pub fn product_upper_bound(kappa: f64) -> f64 {
    let r = (kappa - 1.0) / (kappa + 1.0);
    r * r * r * r
}

/// The alternating stepsize limits of a two-cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaLimits {
    /// `lim alpha_{2k}`.
    pub even: f64,
    /// `lim alpha_{2k+1}`.
    pub odd: f64,
}

/// Limits of the even and odd stepsizes in the two-cycle:
///
/// ```text
/// lim alpha_{2k}   = (psi1 + c^2 psin) / (lambda_1 psi1 + c^2 lambda_n psin),
/// lim alpha_{2k+1} = (psi1 + c^2 psin) / (lambda_n psi1 + c^2 lambda_1 psin),
/// ```
///
/// whose reciprocals always sum to exactly `lambda_1 + lambda_n`.
pub fn predict_alpha_limits(
    c: f64,
    psi1: f64,
    psin: f64,
    lambda1: f64,
    lambdan: f64,
) -> Result<AlphaLimits> {
    if !(lambda1.is_finite() && lambda1 > 0.0 && lambdan.is_finite() && lambdan > lambda1) {
        return Err(Error::InvalidParameter { name: "lambda", value: lambdan });
    }
    let c2 = check_cycle_inputs(c, lambdan / lambda1, psi1, psin)?;
    let num = psi1 + c2 * psin;
    Ok(AlphaLimits {
        even: num / (lambda1 * psi1 + c2 * lambdan * psin),
        odd: num / (lambdan * psi1 + c2 * lambda1 * psin),
    })
}

/// The cycle constant recovered from a recorded component history.
#[derive(Debug, Clone, Copy)]
pub struct CEstimate {
    /// Tail mean of the even-iterate ratios `mu^{(n)} / mu^{(1)}`.
    pub c: f64,
    /// Independent estimate from the odd iterates,
    /// `-(psi1/psin) * mu^{(1)} / mu^{(n)}`; agrees with `c` in the
    /// limit.
    pub c_odd: f64,
    /// Relative disagreement between the two estimates.
    pub discrepancy: f64,
    /// Sign changes among consecutive even-tail ratios (zero once the
    /// cycle has settled).
    pub sign_flips: usize,
}

/// Estimates the cycle constant from the last `tail_pairs` even and
/// odd iterates of a component trace, using its log-magnitude/sign
/// form so that long runs whose raw components underflow still
/// estimate cleanly.
pub fn estimate_c(mu: &MuTrace, psi1: f64, psin: f64, tail_pairs: usize) -> Result<CEstimate> {
    let n = mu.n();
    if n < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: n });
    }
    if !(psi1.is_finite() && psi1 > 0.0 && psin.is_finite() && psin > 0.0) {
        return Err(Error::InvalidParameter { name: "psi", value: psin });
    }
    if tail_pairs == 0 {
        return Err(Error::TailTooShort { requested: 0, available: mu.len() });
    }
    let rows = mu.len();
    let evens: Vec<usize> = (0..rows).filter(|k| k % 2 == 0).collect();
    let odds: Vec<usize> = (0..rows).filter(|k| k % 2 == 1).collect();
    if evens.len() < tail_pairs || odds.len() < tail_pairs {
        return Err(Error::TailTooShort {
            requested: tail_pairs,
            available: evens.len().min(odds.len()),
        });
    }

    let ratio = |k: usize, num: usize, den: usize| -> Result<f64> {
        let sn = mu.sign[k][num];
        let sd = mu.sign[k][den];
        if sn == 0 {
            return Err(Error::ComponentVanished { index: num });
        }
        if sd == 0 {
            return Err(Error::ComponentVanished { index: den });
        }
        Ok((sn * sd) as f64 * (mu.log_abs[k][num] - mu.log_abs[k][den]).exp())
    };

    let mut c_sum = 0.0;
    let mut sign_flips = 0usize;
    let mut last_sign = 0i8;
    for &k in &evens[evens.len() - tail_pairs..] {
        let r = ratio(k, n - 1, 0)?;
        let s = if r < 0.0 { -1 } else { 1 };
        if last_sign != 0 && s != last_sign {
            sign_flips += 1;
        }
        last_sign = s;
        c_sum += r;
    }
    let c = c_sum / tail_pairs as f64;

    let mut odd_sum = 0.0;
    for &k in &odds[odds.len() - tail_pairs..] {
        odd_sum += ratio(k, 0, n - 1)?;
    }
    let c_odd = -(psi1 / psin) * odd_sum / tail_pairs as f64;

    let scale = c.abs().max(c_odd.abs()).max(f64::MIN_POSITIVE);
    Ok(CEstimate { c, c_odd, discrepancy: (c - c_odd).abs() / scale, sign_flips })
}

/// The spectral interval certified to contain `c^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CBound {
    /// Lower endpoint `(psi1/psin) / phi`.
    pub lower: f64,
    /// Upper endpoint `(psi1/psin) * phi`.
    pub upper: f64,
    /// Normalized distance of the closest surviving interior
    /// eigenvalue to the spectrum midpoint.
    pub sigma: f64,
    /// The deviation factor `phi`.
    pub phi: f64,
}

/// Bounds `c^2` from the spectrum alone: with
///
/// ```text
/// sigma = min_{i in I} |2 lambda_i - (lambda_1 + lambda_n)| / (lambda_n - lambda_1),
/// eta   = 4 (1 + sigma^2) / (1 - sigma^2),
/// phi   = (2 + eta + sqrt(eta^2 + 4 eta)) / 2,
/// ```
///
/// the constant satisfies `(psi1/psin)/phi <= c^2 <= (psi1/psin) phi`.
/// `interior` lists the (0-based) indices of interior eigenvalues with
/// surviving components — see [`surviving_interior`]; when every
/// interior component dies the two-cycle is exact and no bound is
/// needed, so an empty list is an error here.
pub fn c_bound(lambda: &[f64], psi: &Psi, interior: &[usize]) -> Result<CBound> {
    let n = lambda.len();
    if n < 3 {
        return Err(Error::NoInteriorEigenvalues);
    }
    psi.check_against(lambda)?;
    let (l1, ln) = (lambda[0], lambda[n - 1]);
    if !(ln > l1) {
        return Err(Error::InvalidParameter { name: "lambda", value: ln });
    }
    if interior.is_empty() {
        return Err(Error::NoInteriorEigenvalues);
    }
    let mut sigma = f64::INFINITY;
    for &i in interior {
        if !(0 < i && i < n - 1) || !(lambda[i] > l1 && lambda[i] < ln) {
            return Err(Error::InvalidParameter { name: "interior_index", value: i as f64 });
        }
        let s = (2.0 * lambda[i] - (l1 + ln)).abs() / (ln - l1);
        sigma = sigma.min(s);
    }
    let eta = 4.0 * (1.0 + sigma * sigma) / (1.0 - sigma * sigma);
    let phi = (2.0 + eta + (eta * eta + 4.0 * eta).sqrt()) / 2.0;
    let ratio = psi.eval(0, l1) / psi.eval(n - 1, ln);
    Ok(CBound { lower: ratio / phi, upper: ratio * phi, sigma, phi })
}

/// How to decide that an interior component was annihilated during a
/// run (and therefore does not constrain the asymptotic cycle).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteriorExclusion {
    /// A component is dead when its recurrence sign reached exact
    /// zero (some step had `1 - alpha lambda_i == 0`), or it started
    /// at zero.
    Reciprocal,
    /// A component is dead when scanning the applied stepsizes finds
    /// one with `1 - alpha lambda_i == 0` in floating point, or it
    /// started at zero. Coincides with `Reciprocal` on a trace
    /// produced by the solver; kept as an independent cross-check.
    Literal,
}

/// The (0-based) indices of strictly interior eigenvalues whose
/// components survived the recorded run, per the given exclusion rule.
pub fn surviving_interior(
    mu: &MuTrace,
    alphas: &[f64],
    rule: InteriorExclusion,
) -> Vec<usize> {
    let n = mu.n();
    let mut out = Vec::new();
    if n < 3 || mu.is_empty() {
        return out;
    }
    let (l1, ln) = (mu.lambda[0], mu.lambda[n - 1]);
    for i in 1..n - 1 {
        if !(mu.lambda[i] > l1 && mu.lambda[i] < ln) {
            continue;
        }
        if mu.sign[0][i] == 0 {
            continue;
        }
        let dead = match rule {
            InteriorExclusion::Reciprocal => mu.sign[mu.len() - 1][i] == 0,
            InteriorExclusion::Literal => {
                alphas.iter().any(|&a| 1.0 - a * mu.lambda[i] == 0.0)
            }
        };
        if !dead {
            out.push(i);
        }
    }
    out
}
