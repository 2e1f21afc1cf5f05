//! Rigorous elementary functions to requested precision, real and complex.
//!
//! Everything is built from two certified constants (ln 2 and pi) and three
//! Taylor kernels (exp, atanh, sin/cos) with explicit truncation and tail
//! accounting. `(1+x)^h` is realized as `exp(h * ln(1+x))` so a single code
//! path serves real and complex exponents.

mod complex;
mod consts;
mod real;

pub use complex::{
    cball_add, cball_mul, cball_round, exp_complex, pow1p_complex, ComplexBall, ComplexDyadic,
};
pub use consts::{ln2, pi};
pub use real::{cos_real, exp_for_nonpositive, exp_real, log1p_real, pow1p_real, sin_real, sincos_real};

pub(crate) use complex::exp_complex_parts;
