//! Certified arbitrary-precision evaluation of the Riemann zeta function.
//!
//! The library evaluates `zeta(s)` for real `s > 1` and for complex
//! `s = sigma + i t` with `sigma != 1` to any requested precision `2^-n`,
//! returning an enclosing ball together with resource statistics. Precision
//! flows through explicit affine schedules; a runtime ball certifies the
//! error actually accumulated.

pub mod approx;
pub mod cli;
pub mod dyadic;
pub mod elementary;
pub mod error;
pub mod reference;
pub mod zeta_complex;
pub mod zeta_real;

pub use approx::{ApproxReal, Ball, Caps, EvalContext, ResourceStats};
pub use dyadic::Dyadic;
pub use elementary::{ComplexBall, ComplexDyadic};
pub use error::{Error, Result};
