//! Scaled ε-subgradient projection methods for nonsmooth constrained
//! convex optimization, with an application to edge-preserving deblurring
//! of Poisson-noise images via total-variation regularization.
//!
//! The crate is organized around the pieces of the scaled iteration
//! x⁺ = P_{X,D⁻¹}(x − α·D·u), u ∈ ∂_ε f(x):
//!
//! * [`metric`] — diagonal variable metrics, energy norms and scaled
//!   projections onto the nonnegative orthant;
//! * [`stepsize`] — polynomial stepsize schedules, summability validation
//!   and the classical comparison rules (constant, Polyak, Ermoliev,
//!   dynamic);
//! * [`solver`] — the generic scaled ε-subgradient projection loop and the
//!   adaptive level-stepsize state machine;
//! * [`spdhg`] — the scaled primal–dual hybrid gradient method for
//!   min f₀(x) + f₁(Ax), specialized to the Kullback–Leibler/TV objective
//!   with a recursive split-gradient scaling construction;
//! * [`imaging`] — KL divergence, discrete gradients and TV, FFT-based
//!   periodic blur operators, Poisson data simulation, phantoms and image
//!   I/O;
//! * [`harness`] — experiment runner: reference solutions, error metrics,
//!   CSV traces and SVG convergence plots.

pub mod error;
pub mod harness;
pub mod imaging;
pub mod metric;
pub mod solver;
pub mod spdhg;
pub mod stepsize;

pub use error::{Error, Result};
