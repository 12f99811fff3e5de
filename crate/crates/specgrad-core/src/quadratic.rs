//! Strictly convex quadratic test problems.
//!
//! A problem is `f(x) = x'Ax/2 - b'x` with `A` symmetric positive
//! definite, held in spectral form: an ascending eigenvalue vector
//! `lambda`, optionally conjugated by an orthogonal matrix
//!
//! ```text
//! Q = (I - 2 w3 w3')(I - 2 w2 w2')(I - 2 w1 w1'),     A = Q V Q',
//! ```
//!
//! the product of three Householder reflections about unit vectors
//! `w1, w2, w3`. `A` is never materialized: one application costs six
//! inner products and six axpys on top of the diagonal scaling, and
//! arbitrary integer matrix powers (including the inverse) come for
//! free by scaling with `lambda^p` between the reflection sweeps.
//!
//! The module also provides the spectrum generators used throughout:
//! seven structured eigenvalue families driven by a condition number
//! `kappa` (blocks of interior eigenvalues packed near one end or the
//! other), the fixed `lambda_i = i*sqrt(i)` spectrum, a uniform random
//! spectrum on `[1, n]`, and two-dimensional `{1, lambda}` problems.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::ChaCha8Rng;
use crate::{Error, Result};

/// Inner product of two equal-length slices.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

/// Applies the reflection `v -> v - 2 (w'v) w` in place.
fn reflect(w: &[f64], v: &mut [f64]) {
    let d = 2.0 * dot(w, v);
    for i in 0..v.len() {
        v[i] -= d * w[i];
    }
}

/// A quadratic `f(x) = x'Ax/2 - b'x` in spectral form.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    /// Ascending positive eigenvalues of `A`.
    lambda: Vec<f64>,
    /// Householder vectors `[w1, w2, w3]`; `None` means `A = V` is
    /// diagonal.
    rot: Option<[Vec<f64>; 3]>,
    /// Right-hand side.
    b: Vec<f64>,
    /// Minimizer `A^{-1} b`.
    x_star: Vec<f64>,
    /// Optimal value `f(x_star) = -b'x_star/2`.
    f_star: f64,
}

fn check_spectrum(lambda: &[f64]) -> Result<()> {
    if lambda.is_empty() {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    for (i, &l) in lambda.iter().enumerate() {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::NonPositiveEigenvalue { index: i, value: l });
        }
        if i > 0 && l < lambda[i - 1] {
            return Err(Error::UnsortedSpectrum { index: i });
        }
    }
    Ok(())
}

fn check_vector(name: &'static str, n: usize, v: &[f64]) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    for &x in v {
        if !x.is_finite() {
            return Err(Error::InvalidParameter { name, value: x });
        }
    }
    Ok(())
}

impl QuadraticProblem {
    /// A diagonal problem `A = diag(lambda)`.
    pub fn diagonal(lambda: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        check_spectrum(&lambda)?;
        check_vector("b", lambda.len(), &b)?;
        let x_star: Vec<f64> = b.iter().zip(&lambda).map(|(&bi, &li)| bi / li).collect();
        let f_star = -0.5 * dot(&b, &x_star);
        Ok(Self { lambda, rot: None, b, x_star, f_star })
    }

    /// A rotated problem `A = Q V Q'` with explicitly given Householder
    /// vectors. Each `w` must be a unit vector; small normalization
    /// drift is corrected, anything further off is rejected.
    pub fn rotated_with(lambda: Vec<f64>, mut w: [Vec<f64>; 3], b: Vec<f64>) -> Result<Self> {
        check_spectrum(&lambda)?;
        let n = lambda.len();
        check_vector("b", n, &b)?;
        for wi in w.iter_mut() {
            check_vector("w", n, wi)?;
            let norm = dot(wi, wi).sqrt();
            if !((norm - 1.0).abs() < 1e-8) {
                return Err(Error::InvalidParameter { name: "w_norm", value: norm });
            }
            for x in wi.iter_mut() {
                *x /= norm;
            }
        }
        let mut p = Self { lambda, rot: Some(w), b, x_star: Vec::new(), f_star: 0.0 };
        p.x_star = p.apply_power(&p.b, -1);
        p.f_star = -0.5 * dot(&p.b, &p.x_star);
        Ok(p)
    }

    /// A rotated problem with `w1, w2, w3` drawn (in that order) as
    /// normalized standard Gaussian vectors from `rng`.
    pub fn rotated(lambda: Vec<f64>, b: Vec<f64>, rng: &mut ChaCha8Rng) -> Result<Self> {
        let n = lambda.len();
        let w = [unit_vector(n, rng), unit_vector(n, rng), unit_vector(n, rng)];
        Self::rotated_with(lambda, w, b)
    }

    /// Problem dimension.
    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// The ascending spectrum of `A`.
    pub fn spectrum(&self) -> &[f64] {
        &self.lambda
    }

    /// Smallest eigenvalue.
    pub fn lambda_min(&self) -> f64 {
        self.lambda[0]
    }

    /// Largest eigenvalue.
    pub fn lambda_max(&self) -> f64 {
        *self.lambda.last().unwrap()
    }

    /// Condition number `lambda_max / lambda_min`.
    pub fn kappa(&self) -> f64 {
        self.lambda_max() / self.lambda_min()
    }

    /// Right-hand side `b`.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// The minimizer `A^{-1} b`.
    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    /// The optimal value `f(x_star)`.
    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    /// Whether `A` is stored diagonally (no rotation).
    pub fn is_diagonal(&self) -> bool {
        self.rot.is_none()
    }

    /// `A^p v` for integer `p` (negative powers use the inverse
    /// spectrum; `p = 0` is the identity).
    pub fn apply_power(&self, v: &[f64], p: i32) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n());
        let mut t = v.to_vec();
        if let Some(w) = &self.rot {
            // Q'v: rightmost reflection of Q acts first in Q, so first here.
            reflect(&w[2], &mut t);
            reflect(&w[1], &mut t);
            reflect(&w[0], &mut t);
        }
        for (ti, &li) in t.iter_mut().zip(&self.lambda) {
            *ti *= li.powi(p);
        }
        if let Some(w) = &self.rot {
            reflect(&w[0], &mut t);
            reflect(&w[1], &mut t);
            reflect(&w[2], &mut t);
        }
        t
    }

    /// `A v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.apply_power(v, 1)
    }

    /// `A^{-1} v`.
    pub fn apply_inv(&self, v: &[f64]) -> Vec<f64> {
        self.apply_power(v, -1)
    }

    /// Maps eigenbasis coordinates to problem coordinates (`Q v`).
    /// The identity on diagonal problems.
    pub fn from_eigenbasis(&self, v: &[f64]) -> Vec<f64> {
        let mut t = v.to_vec();
        if let Some(w) = &self.rot {
            reflect(&w[0], &mut t);
            reflect(&w[1], &mut t);
            reflect(&w[2], &mut t);
        }
        t
    }

    /// Maps problem coordinates to eigenbasis coordinates (`Q' v`).
    /// The identity on diagonal problems.
    pub fn to_eigenbasis(&self, v: &[f64]) -> Vec<f64> {
        let mut t = v.to_vec();
        if let Some(w) = &self.rot {
            reflect(&w[2], &mut t);
            reflect(&w[1], &mut t);
            reflect(&w[0], &mut t);
        }
        t
    }

    /// Objective value and gradient at `x`, sharing a single
    /// application of `A`.
    pub fn evaluate(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let ax = self.apply(x);
        let f = 0.5 * dot(x, &ax) - dot(&self.b, x);
        let g: Vec<f64> = ax.iter().zip(&self.b).map(|(&a, &bi)| a - bi).collect();
        (f, g)
    }

    /// Gradient `A x - b`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.evaluate(x).1
    }

    /// Optimality gap `f(x) - f_star` computed from the gradient as
    /// `g'A^{-1}g / 2`.
    ///
    /// The identity is exact for quadratics, and this form stays
    /// accurate arbitrarily close to the optimum, where the naive
    /// difference `f(x) - f_star` loses every significant digit to
    /// cancellation.
    pub fn gap_from_gradient(&self, g: &[f64]) -> f64 {
        0.5 * dot(g, &self.apply_inv(g))
    }

    /// A short content hash of the problem data (spectrum, rotation,
    /// right-hand side). Two runs seeing the same fingerprint saw
    /// bitwise-identical problems, which is what benchmark fairness
    /// checks want to know.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64; // FNV-1a offset basis
        let mut eat = |x: u64| {
            for byte in x.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for &l in &self.lambda {
            eat(l.to_bits());
        }
        match &self.rot {
            None => eat(0),
            Some(w) => {
                eat(3);
                for wi in w {
                    for &x in wi {
                        eat(x.to_bits());
                    }
                }
            }
        }
        for &x in &self.b {
            eat(x.to_bits());
        }
        h
    }
}

/// A normalized standard Gaussian vector.
fn unit_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm.is_finite() && norm > 0.0 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// How a spectrum is produced. This is the serializable description
/// that benchmark metadata records next to a seed.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSpec {
    /// One of the seven structured families: endpoints `1` and
    /// `kappa`, interior drawn per the family's index blocks.
    Set {
        /// Family id, 1..=7.
        id: u8,
        /// Dimension.
        n: usize,
        /// Condition number (the largest eigenvalue).
        kappa: f64,
    },
    /// `lambda_i = i * sqrt(i)`, a gently stretched deterministic
    /// spectrum.
    Isqrt {
        /// Dimension.
        n: usize,
    },
    /// `lambda_1 = 1`, `lambda_n = n`, interior uniform on `(1, n)`.
    Uniform1N {
        /// Dimension.
        n: usize,
    },
    /// The two-dimensional spectrum `{1, lambda}`.
    TwoDim {
        /// The larger eigenvalue.
        lambda: f64,
    },
    /// An explicit ascending eigenvalue list.
    Explicit(Vec<f64>),
}

impl SpectrumSpec {
    /// Dimension of the spectra this spec generates.
    pub fn n(&self) -> usize {
        match self {
            SpectrumSpec::Set { n, .. } => *n,
            SpectrumSpec::Isqrt { n } => *n,
            SpectrumSpec::Uniform1N { n } => *n,
            SpectrumSpec::TwoDim { .. } => 2,
            SpectrumSpec::Explicit(v) => v.len(),
        }
    }

    /// Generates the eigenvalues. Only the random families consume
    /// `rng`.
    pub fn generate(&self, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        match self {
            SpectrumSpec::Set { id, n, kappa } => set_spectrum(*id, *n, *kappa, rng),
            SpectrumSpec::Isqrt { n } => isqrt_spectrum(*n),
            SpectrumSpec::Uniform1N { n } => uniform_spectrum(*n, rng),
            SpectrumSpec::TwoDim { lambda } => {
                if !(lambda.is_finite() && *lambda >= 1.0) {
                    return Err(Error::InvalidParameter { name: "lambda", value: *lambda });
                }
                Ok(vec![1.0, *lambda])
            }
            SpectrumSpec::Explicit(v) => {
                check_spectrum(v)?;
                Ok(v.clone())
            }
        }
    }
}

/// `lambda_i = i * sqrt(i)` for `i = 1..=n`.
pub fn isqrt_spectrum(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    Ok((1..=n).map(|i| (i as f64) * (i as f64).sqrt()).collect())
}

/// `lambda_1 = 1`, `lambda_n = n`, interior uniform on the open
/// interval `(1, n)`, sorted ascending and strictly distinct.
pub fn uniform_spectrum(n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", value: n as f64 });
    }
    sample_blocks(1.0, n as f64, &[(n - 2, 1.0, n as f64)], rng)
}

/// One of the seven structured eigenvalue families.
///
/// All families share `lambda_1 = 1` and `lambda_n = kappa`; the
/// interior indices `2..=n-1` (1-based) split into blocks drawn
/// uniformly from the open intervals below, then the whole interior is
/// sorted ascending. Ties and endpoint hits are re-drawn, so the
/// result is strictly increasing.
///
/// ```text
/// id  blocks (1-based index ranges and sampling intervals)
/// 1   2..n-1          in (1, kappa)
/// 2   2..n/5          in (1, 100);   n/5+1..n-1   in (kappa/2, kappa)
/// 3   2..n/2          in (1, 100);   n/2+1..n-1   in (kappa/2, kappa)
/// 4   2..4n/5         in (1, 100);   4n/5+1..n-1  in (kappa/2, kappa)
/// 5   2..n/5          in (1, 100);   n/5+1..4n/5  in (100, kappa/2);
///                                    4n/5+1..n-1  in (kappa/2, kappa)
/// 6   2..10           in (1, 100);   11..n-1      in (kappa/2, kappa)
/// 7   2..n-10         in (1, 100);   n-9..n-1     in (kappa/2, kappa)
/// ```
///
/// Index arithmetic uses floor division. Every block must be nonempty,
/// otherwise the dimension is rejected (family 6, for instance, needs
/// `n >= 12`).
pub fn set_spectrum(id: u8, n: usize, kappa: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if !(kappa.is_finite() && kappa > 1.0) {
        return Err(Error::InvalidParameter { name: "kappa", value: kappa });
    }
    if n < 3 {
        return Err(Error::SpectrumTooSmall { id, n });
    }
    // Block layout as (count, lo, hi); counts derive from the 1-based
    // index ranges above.
    let lo_band = (1.0, 100.0);
    let hi_band = (kappa / 2.0, kappa);
    let mid_band = (100.0, kappa / 2.0);
    let blocks: Vec<(usize, f64, f64)> = match id {
        1 => vec![(n - 2, 1.0, kappa)],
        2..=4 => {
            let split = match id {
                2 => n / 5,
                3 => n / 2,
                _ => 4 * n / 5,
            };
            if split < 2 || split > n - 2 {
                return Err(Error::SpectrumTooSmall { id, n });
            }
            vec![(split - 1, lo_band.0, lo_band.1), (n - 1 - split, hi_band.0, hi_band.1)]
        }
        5 => {
            let s1 = n / 5;
            let s2 = 4 * n / 5;
            if s1 < 2 || s2 <= s1 || s2 > n - 2 {
                return Err(Error::SpectrumTooSmall { id, n });
            }
            vec![
                (s1 - 1, lo_band.0, lo_band.1),
                (s2 - s1, mid_band.0, mid_band.1),
                (n - 1 - s2, hi_band.0, hi_band.1),
            ]
        }
        6 => {
            if n < 12 {
                return Err(Error::SpectrumTooSmall { id, n });
            }
            vec![(9, lo_band.0, lo_band.1), (n - 11, hi_band.0, hi_band.1)]
        }
        7 => {
            if n < 12 {
                return Err(Error::SpectrumTooSmall { id, n });
            }
            vec![(n - 11, lo_band.0, lo_band.1), (9, hi_band.0, hi_band.1)]
        }
        other => return Err(Error::UnknownSpectrumSet { id: other }),
    };
    for &(_, lo, hi) in &blocks {
        if !(lo < hi) {
            // kappa so small the bands collapse (e.g. kappa <= 200
            // makes (100, kappa/2) empty).
            return Err(Error::InvalidParameter { name: "kappa", value: kappa });
        }
    }
    sample_blocks(1.0, kappa, &blocks, rng)
}

/// Draws the interior blocks, sorts, and prepends/appends the exact
/// endpoints. Re-draws everything on the (measure-zero) event of a tie
/// or an endpoint hit.
fn sample_blocks(
    lo: f64,
    hi: f64,
    blocks: &[(usize, f64, f64)],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let n_interior: usize = blocks.iter().map(|b| b.0).sum();
    'attempt: for _ in 0..1000 {
        let mut interior = Vec::with_capacity(n_interior);
        for &(count, blo, bhi) in blocks {
            for _ in 0..count {
                // gen_range samples [blo, bhi); re-draw a hit on blo so
                // the interval is effectively open on both sides.
                let x = loop {
                    let x: f64 = rng.gen_range(blo..bhi);
                    if x > blo {
                        break x;
                    }
                };
                interior.push(x);
            }
        }
        interior.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        for i in 0..interior.len() {
            let below = if i == 0 { lo } else { interior[i - 1] };
            if interior[i] <= below || interior[i] >= hi {
                continue 'attempt; // tie or endpoint hit: re-draw all
            }
        }
        let mut v = Vec::with_capacity(n_interior + 2);
        v.push(lo);
        v.extend_from_slice(&interior);
        v.push(hi);
        return Ok(v);
    }
    Err(Error::SamplingFailed)
}
