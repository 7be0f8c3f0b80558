//! Exact all-genus descendant equivariant Gromov-Witten correlators of `[C^r/G]`
//! for finite abelian `G`.
//!
//! Two independent evaluation paths are provided:
//!
//! * [`graphsum`] enumerates stable labeled graphs and multiplies vertex,
//!   edge and leaf weights built from the R-matrix of [`rmatrix`] and the
//!   psi-class intersection numbers of [`psiint`];
//! * [`qrroracle`] applies the quantized quantum Riemann-Roch operator to the
//!   truncated descendant potential of `BG` ([`bgpotential`]) and reads off
//!   twisted correlators.
//!
//! All arithmetic is exact ([`exactalg`]); character values live in a
//! cyclotomic field and equivariant parameters appear as Puiseux monomials.

pub mod bgpotential;
pub mod error;
pub mod exactalg;
pub mod graphsum;
pub mod groupchar;
pub mod psiint;
pub mod qrroracle;
pub mod rmatrix;

pub use error::{Error, Result};
pub use exactalg::{
    CycRational, CyclotomicField, Exponent, PuiseuxMonomial, PuiseuxPoly, Rational, SeriesVars,
    TruncSeries,
};
pub use graphsum::{correlator, CorrelatorRequest, InsertionSeries, LabeledGraph, Normalization};
pub use groupchar::{Character, ClassTag, Element, Frame, OrbifoldData};
pub use rmatrix::RMatrix;
