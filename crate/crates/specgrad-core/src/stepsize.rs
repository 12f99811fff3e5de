//! Stepsize rules.
//!
//! All rules act on a [`StepState`]: the current gradient `g`, the
//! product `Ag`, the moment sequence `m_j = g'A^j g`, and (for
//! two-point rules) a snapshot of the previous iteration. The rules:
//!
//! ```text
//! family(u):  alpha = g'A^u g / g'A^{u+1} g        (u = 0 steepest descent,
//!                                                    u = 1 minimal gradient)
//! bb1:        alpha = s's / s'y                     s = x_k - x_{k-1}
//! bb2:        alpha = s'y / y'y                     y = g_k - g_{k-1}
//! aopt:       alpha = |g| / |Ag|
//! ```
//!
//! and the short stepsize: project `A` onto the plane spanned by a pair
//! of weighted consecutive gradients. The resulting 2x2 compression `H`
//! has its spectrum inside `[lambda_1, lambda_n]`, and
//!
//! ```text
//! alpha~ = 2 / ( H11 + H22 + sqrt((H11 - H22)^2 + 4 H12^2) )
//! ```
//!
//! inverts its *large* eigenvalue. Along a run of family(u) steps the
//! entries collapse to closed form: `H11` and `H22` are the reciprocals
//! of the previous and current family stepsizes and the off-diagonal
//! coupling is `4 m_k[u] / (alpha_{k-1}^2 m_{k-1}[u])`, which is what
//! [`step_tilde_family`] evaluates. In exact arithmetic `alpha~` tends
//! to `1/lambda_n` in the two-cycle regime (and equals it outright when
//! `n = 2`), which is precisely the stepsize that annihilates the
//! zigzag directions; the companion root `alpha-` (from the small
//! eigenvalue of `H`) tends to `1/lambda_1` and is kept for
//! diagnostics only.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use crate::quadratic::{dot, QuadraticProblem};
use crate::{Error, Psi, Result};

/// Snapshot of the previous iteration carried by a [`StepState`].
#[derive(Debug, Clone)]
pub struct PrevStep {
    /// The stepsize actually taken to get here.
    pub alpha: f64,
    /// Previous gradient moments `g'A^j g`.
    pub moments: Vec<f64>,
    /// Previous gradient.
    pub g: Vec<f64>,
    /// Iterate difference `x_k - x_{k-1} = -alpha g_{k-1}`.
    pub s: Vec<f64>,
    /// Gradient difference `g_k - g_{k-1}`.
    pub y: Vec<f64>,
}

/// Everything a stepsize rule may ask about the current iterate.
#[derive(Debug, Clone)]
pub struct StepState {
    /// Iteration index of this state.
    pub k: usize,
    /// Current gradient.
    pub g: Vec<f64>,
    /// `A g`.
    pub ag: Vec<f64>,
    /// Moments `m_j = g'A^j g` for `j = 0..=order` (order is at
    /// least 2).
    pub moments: Vec<f64>,
    /// Previous-iteration snapshot, absent at the starting point.
    pub prev: Option<PrevStep>,
}

fn compute_moments(problem: &QuadraticProblem, g: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = vec![0.0; order + 1];
    m[0] = dot(g, g);
    let ag = problem.apply(g);
    if order >= 1 {
        m[1] = dot(g, &ag);
    }
    if order >= 2 {
        m[2] = dot(&ag, &ag);
    }
    // Higher moments pair consecutive powers: with p_t = A^t g,
    // m_{2t-1} = p_{t-1}'p_t and m_{2t} = p_t'p_t.
    if order >= 3 {
        let mut p = ag.clone();
        let mut t = 1;
        // The condition spells out the moment index on purpose.
        #[allow(clippy::int_plus_one)]
        while 2 * t + 1 <= order {
            let next = problem.apply(&p);
            m[2 * t + 1] = dot(&p, &next);
            if 2 * t + 2 <= order {
                m[2 * t + 2] = dot(&next, &next);
            }
            p = next;
            t += 1;
        }
    }
    (m, ag)
}

impl StepState {
    /// Builds the state for gradient `g`, with moments up to order
    /// `max(order, 2)`.
    pub fn from_gradient(problem: &QuadraticProblem, g: Vec<f64>, order: usize) -> Self {
        let order = order.max(2);
        let (moments, ag) = compute_moments(problem, &g, order);
        StepState { k: 0, g, ag, moments, prev: None }
    }

    /// The state one gradient step `x - alpha g` ahead of this one,
    /// with this state archived as its history.
    pub fn advance(&self, problem: &QuadraticProblem, alpha: f64) -> Self {
        let g_new: Vec<f64> = self.g.iter().zip(&self.ag).map(|(&g, &ag)| g - alpha * ag).collect();
        let mut next = StepState::from_gradient(problem, g_new, self.order());
        next.k = self.k + 1;
        next.prev = Some(PrevStep {
            alpha,
            moments: self.moments.clone(),
            g: self.g.clone(),
            s: self.g.iter().map(|&g| -alpha * g).collect(),
            y: self.ag.iter().map(|&ag| -alpha * ag).collect(),
        });
        next
    }

    /// Highest moment order available.
    pub fn order(&self) -> usize {
        self.moments.len() - 1
    }

    /// `g'g`.
    pub fn gg(&self) -> f64 {
        self.moments[0]
    }

    /// `g'Ag`.
    pub fn gag(&self) -> f64 {
        self.moments[1]
    }

    /// `g'A^2 g`.
    pub fn ga2g(&self) -> f64 {
        self.moments[2]
    }

    fn require_prev(&self) -> Result<&PrevStep> {
        self.prev.as_ref().ok_or(Error::MissingHistory)
    }

    fn require_moment(&self, j: usize) -> Result<f64> {
        if self.gg() == 0.0 {
            return Err(Error::ZeroGradient);
        }
        self.moments.get(j).copied().ok_or(Error::MomentsUnavailable {
            needed: j,
            have: self.order(),
        })
    }
}

/// `alpha = g'A^u g / g'A^{u+1} g`, the base family.
pub fn step_family(st: &StepState, u: usize) -> Result<f64> {
    let num = st.require_moment(u)?;
    let den = st.require_moment(u + 1)?;
    Ok(num / den)
}

/// Steepest descent, `family(0)`.
pub fn step_sd(st: &StepState) -> Result<f64> {
    step_family(st, 0)
}

/// The minimal-gradient rule, `family(1)`.
pub fn step_mg(st: &StepState) -> Result<f64> {
    step_family(st, 1)
}

/// `alpha = |g| / |Ag|`, a diagnostic rule between `family(0)` and
/// `family(1)`; no two-cycle asymptotics are claimed for it.
pub fn step_aopt(st: &StepState) -> Result<f64> {
    let m0 = st.require_moment(0)?;
    let m2 = st.require_moment(2)?;
    Ok((m0 / m2).sqrt())
}

/// First Barzilai–Borwein rule `s's / s'y`. On a quadratic this equals
/// the previous steepest-descent stepsize.
pub fn step_bb1(st: &StepState) -> Result<f64> {
    let prev = st.require_prev()?;
    Ok(dot(&prev.s, &prev.s) / dot(&prev.s, &prev.y))
}

/// Second Barzilai–Borwein rule `s'y / y'y`. On a quadratic this equals
/// the previous minimal-gradient stepsize.
pub fn step_bb2(st: &StepState) -> Result<f64> {
    let prev = st.require_prev()?;
    Ok(dot(&prev.s, &prev.y) / dot(&prev.y, &prev.y))
}

/// Small root of the 2x2 compression characteristic equation given the
/// two reciprocal diagonal entries and the squared coupling term.
fn short_root(inv_a: f64, inv_b: f64, coupling_sq: f64) -> f64 {
    // The discriminant is a sum of squares, so it cannot go negative
    // even in floating point.
    let disc = (inv_a - inv_b) * (inv_a - inv_b) + coupling_sq;
    2.0 / (inv_a + inv_b + disc.sqrt())
}

fn long_root(inv_a: f64, inv_b: f64, coupling_sq: f64) -> f64 {
    let disc = (inv_a - inv_b) * (inv_a - inv_b) + coupling_sq;
    let den = inv_a + inv_b - disc.sqrt();
    if den > 0.0 {
        2.0 / den
    } else {
        // Numerically singular compression: the long root degenerates.
        f64::INFINITY
    }
}

/// Short stepsize along a run of `family(u)` steps: both roots
/// `(alpha~, alpha-)` of the 2x2 compression built from the previous
/// and current gradients.
///
/// `alpha~` (the small root) inverts the large eigenvalue of the
/// compression and is the solver-facing value; `alpha-` is returned
/// for diagnostics and degenerates to `inf` when the compression is
/// numerically singular. The previous stepsize entering the coupling is
/// the previous *family* value recomputed from the stored moments, so
/// the formula is exactly the closed form valid when the preceding
/// step was taken by the same rule.
pub fn step_tilde_family(st: &StepState, u: usize) -> Result<(f64, f64)> {
    let prev = st.require_prev()?;
    let m_cur = st.require_moment(u)?;
    st.require_moment(u + 1)?;
    if prev.moments[0] == 0.0 {
        return Err(Error::ZeroGradient);
    }
    if prev.moments.len() < u + 2 {
        return Err(Error::MomentsUnavailable { needed: u + 1, have: prev.moments.len() - 1 });
    }
    let a_prev = prev.moments[u] / prev.moments[u + 1];
    let a_cur = st.moments[u] / st.moments[u + 1];
    let coupling = 4.0 * m_cur / (a_prev * a_prev * prev.moments[u]);
    Ok((short_root(1.0 / a_prev, 1.0 / a_cur, coupling), long_root(1.0 / a_prev, 1.0 / a_cur, coupling)))
}

/// The short stepsize in steepest-descent form (`Psi = I`): Yuan's
/// stepsize
///
/// ```text
/// alpha = 2 / ( 1/a_{k-1} + 1/a_k
///               + sqrt( (1/a_{k-1} - 1/a_k)^2 + 4 |g_k|^2 / (a_{k-1} |g_{k-1}|)^2 ) )
/// ```
///
/// with `a_j` the steepest-descent stepsizes of the two iterates.
pub fn step_yuan(st: &StepState) -> Result<f64> {
    Ok(step_tilde_family(st, 0)?.0)
}

/// The short stepsize in minimal-gradient form (`Psi(A) = A`, split
/// exponent `r = 1/2`), the cheap closed form used inside the periodic
/// schedule.
pub fn step_tilde_mg(st: &StepState) -> Result<f64> {
    Ok(step_tilde_family(st, 1)?.0)
}

/// Both roots of an explicitly given symmetric positive definite 2x2
/// compression `H = [[h11, h12], [h12, h22]]`: `(2/(tr + sqrt(d)),
/// 2/(tr - sqrt(d)))` with `d = (h11-h22)^2 + 4 h12^2`. The pair
/// inverts the large and small eigenvalues of `H` respectively.
pub fn step_tilde_general(h11: f64, h12: f64, h22: f64) -> Result<(f64, f64)> {
    if !(h11.is_finite() && h12.is_finite() && h22.is_finite()) || h11 <= 0.0 || h22 <= 0.0 {
        return Err(Error::NotSpd);
    }
    if h11 * h22 - h12 * h12 <= 0.0 {
        return Err(Error::NotSpd);
    }
    let small = short_root(h11, h22, 4.0 * h12 * h12);
    let large = long_root(h11, h22, 4.0 * h12 * h12);
    Ok((small, large))
}

/// Builds the 2x2 compression of `A` for weight `Psi` and split
/// exponent `r` from the previous and current gradients:
///
/// ```text
/// H11 = gp' Psi^{2r}(A) A gp / |Psi^r(A) gp|^2
/// H22 = g'  Psi^{2(1-r)}(A) A g / |Psi^{1-r}(A) g|^2
/// H12 = - g' Psi(A) g / ( alpha_{k-1} |Psi^r(A) gp| |Psi^{1-r}(A) g| )
/// ```
///
/// where `gp` is the previous gradient and `alpha_{k-1}` the stepsize
/// actually taken. On diagonal problems any `Psi` and any `r` in
/// `[0, 1]` work. On rotated problems `A` is only available through
/// products, so `Psi` must be a monomial `A^u` with `2ru` and
/// `2(1-r)u` integers — then every quantity above is a gradient moment.
pub fn build_h(
    problem: &QuadraticProblem,
    st: &StepState,
    psi: &Psi,
    r: f64,
) -> Result<(f64, f64, f64)> {
    if !(r.is_finite() && (0.0..=1.0).contains(&r)) {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    let prev = st.require_prev()?;
    if st.gg() == 0.0 || dot(&prev.g, &prev.g) == 0.0 {
        return Err(Error::ZeroGradient);
    }
    psi.check_against(problem.spectrum())?;
    if problem.is_diagonal() {
        let lambda = problem.spectrum();
        let (mut den11, mut num11, mut den22, mut num22, mut num12) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..lambda.len() {
            let psi_i = psi.eval(i, lambda[i]);
            let w_prev = psi_i.powf(2.0 * r);
            let w_cur = psi_i.powf(2.0 * (1.0 - r));
            let gp2 = prev.g[i] * prev.g[i];
            let gc2 = st.g[i] * st.g[i];
            den11 += w_prev * gp2;
            num11 += w_prev * lambda[i] * gp2;
            den22 += w_cur * gc2;
            num22 += w_cur * lambda[i] * gc2;
            num12 += psi_i * gc2;
        }
        if den11 == 0.0 || den22 == 0.0 {
            return Err(Error::ZeroGradient);
        }
        let h11 = num11 / den11;
        let h22 = num22 / den22;
        let h12 = -num12 / (prev.alpha * den11.sqrt() * den22.sqrt());
        Ok((h11, h22, h12))
    } else {
        let u = match psi {
            Psi::One => 0,
            Psi::Monomial(u) => *u as usize,
            Psi::Table(_) => return Err(Error::PsiNotRepresentable),
        };
        let a = 2.0 * r * u as f64;
        let c = 2.0 * (1.0 - r) * u as f64;
        if a.fract() != 0.0 || c.fract() != 0.0 {
            return Err(Error::PsiNotRepresentable);
        }
        let (a, c) = (a as usize, c as usize);
        let (mp, _) = compute_moments(problem, &prev.g, a + 1);
        let (mc, _) = compute_moments(problem, &st.g, c.max(u) + 1);
        let h11 = mp[a + 1] / mp[a];
        let h22 = mc[c + 1] / mc[c];
        let h12 = -mc[u] / (prev.alpha * (mp[a] * mc[c]).sqrt());
        Ok((h11, h22, h12))
    }
}

/// Harmonic combination `1 / (1/alpha_even + 1/alpha_odd)` of a
/// two-cycle stepsize pair. With the limiting pair of any family rule
/// this tends to `1/(lambda_1 + lambda_n)`.
pub fn step_hat(alpha_even: f64, alpha_odd: f64) -> Result<f64> {
    for (name, v) in [("alpha_even", alpha_even), ("alpha_odd", alpha_odd)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter { name, value: v });
        }
    }
    Ok(alpha_even * alpha_odd / (alpha_even + alpha_odd))
}
