//! Simplex dynamics of the gradient components.
//!
//! Write the gradient in the eigenbasis of `A`, `mu_k^{(i)}`, and track
//! the normalized squares `q_k^{(i)} = (mu_k^{(i)})^2 / |mu_k|^2`: a
//! point on the probability simplex over the eigenvalues. Under any
//! rule of the `Psi`-family the stepsize depends on the iterate only
//! through `q_k`, via the weighted mean
//!
//! ```text
//! gamma(p) = sum_i Psi(lambda_i) lambda_i p_i / sum_i Psi(lambda_i) p_i = 1/alpha,
//! ```
//!
//! and one gradient step pushes the weights through the map
//!
//! ```text
//! (Tp)_i = (lambda_i - gamma(p))^2 p_i / sum_j (lambda_j - gamma(p))^2 p_j.
//! ```
//!
//! The variance-like functional
//! `Theta(p) = sum_i Psi_i (lambda_i - gamma(p))^2 p_i / sum_i Psi_i p_i`
//! never decreases along the orbit, which forces the weights toward
//! states `T` can no longer spread: in the limit the orbit alternates
//! between two points supported on the extreme eigenvalue pair, with
//! closed-form weights. [`iterate_to_cycle`] runs the orbit to that
//! limit and [`two_cycle_fixed_point`] writes the stationary pair down
//! analytically.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Psi, Result};

/// A validated point on the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    /// Validates: nonempty, finite, nonnegative, sum within `1e-12`
    /// of one.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidWeights);
        }
        let mut sum = 0.0;
        for &x in &w {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidWeights);
            }
            sum += x;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights);
        }
        Ok(SimplexWeights(w))
    }

    /// Normalized squares of a gradient's eigencomponents.
    pub fn from_mu(mu: &[f64]) -> Result<Self> {
        let mut sq: Vec<f64> = mu.iter().map(|&m| m * m).collect();
        let sum: f64 = sq.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::InvalidWeights);
        }
        for x in sq.iter_mut() {
            *x /= sum;
        }
        SimplexWeights::new(sq)
    }

    /// The weights.
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Consumes into the raw vector.
    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl core::ops::Deref for SimplexWeights {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn check_inputs(p: &[f64], lambda: &[f64], psi: &Psi) -> Result<()> {
    if p.len() != lambda.len() {
        return Err(Error::DimensionMismatch { expected: lambda.len(), got: p.len() });
    }
    if p.is_empty() {
        return Err(Error::InvalidWeights);
    }
    for &x in p {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidWeights);
        }
    }
    psi.check_against(lambda)
}

/// The `Psi`-weighted mean eigenvalue at weights `p` — the reciprocal
/// of the family stepsize taken from a gradient with those normalized
/// squared components. Scale-invariant in `p`, so unnormalized weights
/// are accepted.
pub fn gamma(p: &[f64], psi: &Psi, lambda: &[f64]) -> Result<f64> {
    check_inputs(p, lambda, psi)?;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..p.len() {
        let w = psi.eval(i, lambda[i]) * p[i];
        num += w * lambda[i];
        den += w;
    }
    if !(den > 0.0) {
        return Err(Error::InvalidWeights);
    }
    Ok(num / den)
}

/// The `Psi`-weighted variance of the eigenvalues around `gamma(p)`.
/// Nondecreasing along orbits of [`apply_t`]; stationary exactly on
/// two-point cycles.
pub fn theta(p: &[f64], psi: &Psi, lambda: &[f64]) -> Result<f64> {
    let gm = gamma(p, psi, lambda)?;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..p.len() {
        let w = psi.eval(i, lambda[i]) * p[i];
        num += w * (lambda[i] - gm) * (lambda[i] - gm);
        den += w;
    }
    Ok(num / den)
}

/// One step of the weight dynamics: damp each component by its squared
/// residual `(lambda_i - gamma(p))^2` and renormalize. Undefined when
/// the weights sit on a single eigenvalue (every residual vanishes).
pub fn apply_t(p: &[f64], psi: &Psi, lambda: &[f64]) -> Result<SimplexWeights> {
    let gm = gamma(p, psi, lambda)?;
    let mut t: Vec<f64> = (0..p.len())
        .map(|i| (lambda[i] - gm) * (lambda[i] - gm) * p[i])
        .collect();
    let den: f64 = t.iter().sum();
    if !(den > 0.0) {
        return Err(Error::SingleSupport);
    }
    for x in t.iter_mut() {
        *x /= den;
    }
    SimplexWeights::new(t)
}

/// A two-point limit cycle of the weight dynamics.
#[derive(Debug, Clone)]
pub struct TwoCycle {
    /// Index of the smaller supported eigenvalue (0-based).
    pub i1: usize,
    /// Index of the larger supported eigenvalue (0-based).
    pub i2: usize,
    /// Even-subsequence limit weights.
    pub p_even: SimplexWeights,
    /// Odd-subsequence limit weights (`T` of the even limit).
    pub p_odd: SimplexWeights,
    /// `gamma` at the even limit.
    pub gamma_even: f64,
    /// `gamma` at the odd limit.
    pub gamma_odd: f64,
    /// Cycle constant: `c^2` is the even-limit weight ratio
    /// `p_even[i2] / p_even[i1]` (reported with positive sign; the
    /// weight dynamics cannot see the sign of the underlying
    /// components).
    pub c: f64,
}

/// The stationary point of `T` supported on eigenvalues `i1 < i2`:
///
/// ```text
/// p*[i1] = Psi(lambda_{i2}) / (Psi(lambda_{i1}) + Psi(lambda_{i2})),
/// p*[i2] = Psi(lambda_{i1}) / (Psi(lambda_{i1}) + Psi(lambda_{i2})),
/// ```
///
/// for which `Tp* = p*` and
/// `gamma(p*) + gamma(Tp*) = lambda_{i1} + lambda_{i2}`.
pub fn two_cycle_fixed_point(
    i1: usize,
    i2: usize,
    psi: &Psi,
    lambda: &[f64],
) -> Result<TwoCycle> {
    let n = lambda.len();
    if !(i1 < i2 && i2 < n) {
        return Err(Error::InvalidParameter { name: "support", value: i2 as f64 });
    }
    if lambda[i2] <= lambda[i1] {
        return Err(Error::InvalidParameter { name: "lambda_pair", value: lambda[i2] });
    }
    psi.check_against(lambda)?;
    let psi1 = psi.eval(i1, lambda[i1]);
    let psi2 = psi.eval(i2, lambda[i2]);

    let mut p = vec![0.0; n];
    p[i1] = psi2 / (psi1 + psi2);
    p[i2] = psi1 / (psi1 + psi2);

    // The two-point image formulas; for the stationary weights they
    // reproduce p itself.
    let d = psi1 * psi1 * p[i1] + psi2 * psi2 * p[i2];
    let mut q = vec![0.0; n];
    q[i1] = psi2 * psi2 * p[i2] / d;
    q[i2] = psi1 * psi1 * p[i1] / d;

    let gamma_even = gamma(&p, psi, lambda)?;
    let gamma_odd = gamma(&q, psi, lambda)?;
    let c = (p[i2] / p[i1]).sqrt();
    Ok(TwoCycle {
        i1,
        i2,
        p_even: SimplexWeights::new(p)?,
        p_odd: SimplexWeights::new(q)?,
        gamma_even,
        gamma_odd,
        c,
    })
}

/// Outcome of running the weight orbit to its two-point cycle.
#[derive(Debug, Clone)]
pub struct CycleResult {
    /// The limiting cycle.
    pub cycle: TwoCycle,
    /// Index of the first even iterate at which the even subsequence
    /// had already stabilized.
    pub k_converged: usize,
}

/// Runs `p <- Tp` from `q0` until the even subsequence settles:
/// `|q_{2k+2} - q_{2k}|_inf < tol` for five consecutive even steps.
///
/// `q0` must put positive weight on both extreme eigenvalues (those
/// components can only die by exact cancellation, and the limit lives
/// on them). `max_steps` bounds the number of `T` applications.
pub fn iterate_to_cycle(
    q0: &[f64],
    psi: &Psi,
    lambda: &[f64],
    max_steps: usize,
    tol: f64,
) -> Result<CycleResult> {
    check_inputs(q0, lambda, psi)?;
    let n = lambda.len();
    if n < 2 {
        return Err(Error::SingleSupport);
    }
    if !(q0[0] > 0.0 && q0[n - 1] > 0.0) {
        return Err(Error::ZeroExtremeWeight);
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter { name: "tol", value: tol });
    }
    let sum: f64 = q0.iter().sum();
    let mut even: Vec<f64> = q0.iter().map(|&x| x / sum).collect();

    let mut streak = 0usize;
    let mut k = 0usize;
    let mut residual = f64::INFINITY;
    while k + 2 <= max_steps {
        let odd = apply_t(&even, psi, lambda)?;
        let next = apply_t(&odd, psi, lambda)?;
        k += 2;
        residual = even
            .iter()
            .zip(next.as_slice())
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max);
        even = next.into_vec();
        if residual < tol {
            streak += 1;
            if streak == 5 {
                let p_odd = apply_t(&even, psi, lambda)?;
                return finish_cycle(even, p_odd, psi, lambda, k - 10);
            }
        } else {
            streak = 0;
        }
    }
    Err(Error::CycleNotConverged { residual })
}

fn finish_cycle(
    even: Vec<f64>,
    odd: SimplexWeights,
    psi: &Psi,
    lambda: &[f64],
    k_converged: usize,
) -> Result<CycleResult> {
    let n = even.len();
    // The two heaviest weights must sit on the extreme eigenvalues.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| even[b].partial_cmp(&even[a]).unwrap());
    let (mut top0, mut top1) = (idx[0], idx[1]);
    if top0 > top1 {
        core::mem::swap(&mut top0, &mut top1);
    }
    if n > 2 && (top0, top1) != (0, n - 1) {
        return Err(Error::UnexpectedSupport { support: (top0, top1) });
    }
    let gamma_even = gamma(&even, psi, lambda)?;
    let gamma_odd = gamma(odd.as_slice(), psi, lambda)?;
    let c = (even[n - 1] / even[0]).sqrt();
    Ok(CycleResult {
        cycle: TwoCycle {
            i1: 0,
            i2: n - 1,
            p_even: SimplexWeights::new(even)?,
            p_odd: odd,
            gamma_even,
            gamma_odd,
            c,
        },
        k_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_hand_values() {
        let lambda = [1.0, 3.0];
        assert_eq!(gamma(&[0.5, 0.5], &Psi::One, &lambda).unwrap(), 2.0);
        assert_eq!(gamma(&[1.0, 0.0], &Psi::One, &lambda).unwrap(), 1.0);
        // Psi = lambda tilts the mean toward the top of the spectrum.
        assert_eq!(gamma(&[0.5, 0.5], &Psi::Monomial(1), &lambda).unwrap(), 2.5);
        // Scale invariance: unnormalized weights give the same mean.
        assert_eq!(gamma(&[5.0, 5.0], &Psi::One, &lambda).unwrap(), 2.0);
    }

    #[test]
    fn theta_hand_values() {
        let lambda = [1.0, 3.0];
        assert_eq!(theta(&[0.5, 0.5], &Psi::One, &lambda).unwrap(), 1.0);
        assert_eq!(theta(&[1.0, 0.0], &Psi::One, &lambda).unwrap(), 0.0);
    }

    #[test]
    fn apply_t_hand_values() {
        let lambda = [1.0, 3.0];
        let t = apply_t(&[0.9, 0.1], &Psi::One, &lambda).unwrap();
        assert!((t[0] - 0.1).abs() < 1e-14);
        assert!((t[1] - 0.9).abs() < 1e-14);
        assert_eq!(apply_t(&[1.0, 0.0], &Psi::One, &lambda), Err(Error::SingleSupport));
    }

    #[test]
    fn theta_never_decreases_along_orbits() {
        let lambda = [1.0, 2.0, 4.0, 7.5, 9.0];
        for psi in [Psi::One, Psi::Monomial(1), Psi::Monomial(2)] {
            let mut p = alloc::vec![0.3, 0.25, 0.2, 0.15, 0.1];
            let mut th = theta(&p, &psi, &lambda).unwrap();
            for _ in 0..200 {
                p = apply_t(&p, &psi, &lambda).unwrap().into_vec();
                let th_next = theta(&p, &psi, &lambda).unwrap();
                assert!(
                    th_next >= th * (1.0 - 1e-12) - 1e-15,
                    "theta decreased: {th} -> {th_next}"
                );
                th = th_next;
            }
        }
    }

    #[test]
    fn fixed_point_hand_values() {
        // Psi = 1: equal weights regardless of the pair.
        let lambda = [1.0, 2.0, 3.0];
        let fp = two_cycle_fixed_point(0, 2, &Psi::One, &lambda).unwrap();
        assert_eq!(fp.p_even[0], 0.5);
        assert_eq!(fp.p_even[2], 0.5);
        assert_eq!(fp.p_even[1], 0.0);
        assert_eq!(fp.c, 1.0);

        // Psi = lambda on {1, 3}: weights (3/4, 1/4).
        let fp = two_cycle_fixed_point(0, 2, &Psi::Monomial(1), &lambda).unwrap();
        assert!((fp.p_even[0] - 0.75).abs() < 1e-15);
        assert!((fp.p_even[2] - 0.25).abs() < 1e-15);
        // Stationarity: the odd weights coincide with the even ones.
        for i in 0..3 {
            assert!((fp.p_even[i] - fp.p_odd[i]).abs() < 1e-15);
        }
        // gamma(p*) + gamma(Tp*) = lambda_{i1} + lambda_{i2}.
        assert!((fp.gamma_even + fp.gamma_odd - 4.0).abs() < 1e-14);
        // And T really fixes it.
        let image = apply_t(fp.p_even.as_slice(), &Psi::Monomial(1), &lambda).unwrap();
        for i in 0..3 {
            assert!((image[i] - fp.p_even[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn two_point_states_have_period_two() {
        let lambda = [1.0, 4.0, 9.0];
        for psi in [Psi::One, Psi::Monomial(1), Psi::Monomial(2)] {
            for w in [0.15, 0.5, 0.93] {
                let p = alloc::vec![w, 0.0, 1.0 - w];
                let t1 = apply_t(&p, &psi, &lambda).unwrap();
                let t2 = apply_t(t1.as_slice(), &psi, &lambda).unwrap();
                for i in 0..3 {
                    assert!(
                        (t2[i] - p[i]).abs() < 1e-12,
                        "T^2 not the identity on two-point states: {:?} -> {:?}",
                        p,
                        t2.as_slice()
                    );
                }
                // The cycle mean identity for any two-point state.
                let g1 = gamma(&p, &psi, &lambda).unwrap();
                let g2 = gamma(t1.as_slice(), &psi, &lambda).unwrap();
                assert!((g1 + g2 - 10.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orbit_converges_to_extreme_support() {
        let lambda = [1.0, 2.0, 3.0];
        let r = iterate_to_cycle(&[1.0 / 3.0; 3], &Psi::One, &lambda, 100_000, 1e-12).unwrap();
        assert_eq!((r.cycle.i1, r.cycle.i2), (0, 2));
        assert!(r.cycle.p_even[1] < 1e-10, "middle weight survived: {}", r.cycle.p_even[1]);
        // Even and odd limits agree on c^2 through the two-point image
        // relation with Psi = 1 (squared-weight swap).
        let c2_even = r.cycle.p_even[2] / r.cycle.p_even[0];
        let c2_odd = r.cycle.p_odd[0] / r.cycle.p_odd[2];
        assert!((c2_even - c2_odd).abs() <= 1e-8 * c2_even.max(c2_odd));
    }

    #[test]
    fn orbit_from_fixed_point_converges_immediately() {
        let lambda = [1.0, 5.0, 9.0];
        let fp = two_cycle_fixed_point(0, 2, &Psi::Monomial(1), &lambda).unwrap();
        let r =
            iterate_to_cycle(fp.p_even.as_slice(), &Psi::Monomial(1), &lambda, 1000, 1e-12)
                .unwrap();
        assert_eq!(r.k_converged, 0);
        assert!((r.cycle.c - fp.c).abs() < 1e-12);
    }

    #[test]
    fn orbit_requires_extreme_weight() {
        let lambda = [1.0, 2.0, 3.0];
        assert_eq!(
            iterate_to_cycle(&[0.0, 0.5, 0.5], &Psi::One, &lambda, 1000, 1e-12).unwrap_err(),
            Error::ZeroExtremeWeight
        );
    }

    #[test]
    fn simplex_weights_validation() {
        assert!(SimplexWeights::new(alloc::vec![0.5, 0.5]).is_ok());
        assert!(SimplexWeights::new(alloc::vec![0.5, 0.6]).is_err());
        assert!(SimplexWeights::new(alloc::vec![-0.1, 1.1]).is_err());
        assert!(SimplexWeights::new(alloc::vec![]).is_err());
        let w = SimplexWeights::from_mu(&[3.0, 4.0]).unwrap();
        assert!((w[0] - 9.0 / 25.0).abs() < 1e-15);
        assert!((w[1] - 16.0 / 25.0).abs() < 1e-15);
        assert!(SimplexWeights::from_mu(&[0.0, 0.0]).is_err());
    }
}
