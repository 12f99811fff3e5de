//! Gradient methods for strictly convex quadratics with spectral stepsize
//! rules.
//!
//! The objective is `f(x) = x'Ax/2 - b'x` with `A` symmetric positive
//! definite, minimized by the plain gradient iteration
//!
//! ```text
//! x_{k+1} = x_k - alpha_k g_k,      g_k = A x_k - b.
//! ```
//!
//! Everything in this crate revolves around one family of stepsizes
//!
//! ```text
//! alpha_k = g_k' Psi(A) g_k / g_k' Psi(A) A g_k
//! ```
//!
//! parameterized by a positive function `Psi` on the spectrum of `A`.
//! `Psi = 1` is steepest descent, `Psi(A) = A` is the minimal-gradient
//! rule, and monomials `Psi(A) = A^u` interpolate beyond. The crate
//! provides:
//!
//! * [`quadratic`] — test problems: diagonal or Householder-rotated
//!   spectra, structured eigenvalue families for benchmarking, and
//!   stable evaluation of gradients and optimality gaps;
//! * [`stepsize`] — the stepsize engine: the `Psi`-family rules,
//!   Barzilai–Borwein and related two-point rules, and the short
//!   "zigzag-breaking" stepsize obtained from the small eigenvalue of a
//!   2x2 compression of `A` built from two consecutive gradients;
//! * [`solver`] — schedules (single rules, alternations, and the
//!   periodic short-step method) and the driver loop with per-iteration
//!   traces;
//! * [`dynamics`] — the normalized squared gradient components
//!   `q_k` seen as points on the probability simplex, the map `T`
//!   driving them, and its two-point limit cycles;
//! * [`rates`] — closed-form asymptotic stepsize limits and rate
//!   constants of the two-cycle regime, estimators that recover the
//!   cycle constant `c` from solver traces, and spectral bounds on it.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the
//! default `std` feature for embedded use. All numerics are plain `f64`
//! on `Vec<f64>` storage: the methods here only ever touch matrices
//! through matrix–vector products, so nothing denser is warranted.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(missing_docs)]
// `!(x > y)`-style guards are deliberate throughout: the negated form
// sends NaN into the rejecting branch, which `x <= y` would not.
// Indexed loops are kept wherever the code mirrors a componentwise
// formula.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod psi;
pub mod quadratic;
pub mod rates;
pub mod rng;
pub mod solver;
pub mod stepsize;

pub use error::Error;
pub use psi::Psi;
pub use quadratic::{QuadraticProblem, SpectrumSpec};
pub use solver::{IterateTrace, Schedule, SolverConfig, Status};
pub use stepsize::StepState;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
