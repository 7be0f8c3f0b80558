//! Exact scalar and polynomial arithmetic.
//!
//! Everything here is exact: arbitrary-precision rationals, elements of the
//! cyclotomic field `Q(zeta_N)` in the power basis, Puiseux-Laurent polynomials
//! in the equivariant parameters `w_1..w_r`, and power series in one or two
//! auxiliary variables truncated at a caller-supplied order.

mod bernoulli;
mod cyclotomic;
mod puiseux;
mod rational;
mod series;

pub use bernoulli::{bernoulli_eval, bernoulli_number, bernoulli_polynomial};
pub use cyclotomic::{CycRational, CyclotomicField};
pub use puiseux::{Exponent, PuiseuxMonomial, PuiseuxPoly, TermRecord};
pub use rational::{format_rational, parse_rational, rat, Rational};
pub use series::{SeriesVars, TruncSeries};
