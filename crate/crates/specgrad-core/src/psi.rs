//! The spectral weight function `Psi`.
//!
//! Every stepsize in the family has the form
//! `alpha = g'Psi(A)g / g'Psi(A)Ag` for some function `Psi` that is
//! positive on the spectrum of `A`. The same `Psi` reappears in the
//! simplex dynamics (through the weighted mean `gamma`) and in the
//! asymptotic rate constants, so it gets a small type of its own.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::{Error, Result};

/// A positive weight function evaluated on the spectrum of `A`.
#[derive(Debug, Clone, PartialEq)]
pub enum Psi {
    /// `Psi(lambda) = 1`: steepest descent.
    One,
    /// `Psi(lambda) = lambda^u`. `u = 1` is the minimal-gradient rule.
    Monomial(u32),
    /// Arbitrary positive values tabulated per eigenvalue, aligned with
    /// the (ascending) spectrum it will be used with. Only meaningful
    /// for explicitly diagonal problems and for the simplex dynamics.
    Table(Vec<f64>),
}

impl Psi {
    /// `Psi(lambda_i)` for the `i`-th eigenvalue (0-based).
    pub fn eval(&self, i: usize, lambda: f64) -> f64 {
        match self {
            Psi::One => 1.0,
            Psi::Monomial(u) => lambda.powi(*u as i32),
            Psi::Table(v) => v[i],
        }
    }

    /// `Psi(lambda_i)^e` for a real exponent `e`.
    pub fn eval_pow(&self, i: usize, lambda: f64, e: f64) -> f64 {
        self.eval(i, lambda).powf(e)
    }

    /// Values at the extreme eigenvalues of an ascending spectrum.
    pub fn endpoints(&self, lambda: &[f64]) -> (f64, f64) {
        let n = lambda.len();
        (self.eval(0, lambda[0]), self.eval(n - 1, lambda[n - 1]))
    }

    /// Validates a tabulated `Psi` against a spectrum: equal length and
    /// strictly positive finite entries.
    pub fn check_against(&self, lambda: &[f64]) -> Result<()> {
        if let Psi::Table(v) = self {
            if v.len() != lambda.len() {
                return Err(Error::DimensionMismatch { expected: lambda.len(), got: v.len() });
            }
            for &w in v.iter() {
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::InvalidParameter { name: "psi_table", value: w });
                }
            }
        }
        Ok(())
    }
}
