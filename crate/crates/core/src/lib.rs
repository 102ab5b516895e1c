//! Exact function-field circle method toolkit over `F_q[t]`.
//!
//! Modules, bottom up:
//! - [`ff`]: finite fields, polynomials, residue rings, Laurent series.
//! - [`cyclo`]: exact arithmetic in `Q(zeta_p)` for character sums.
//! - [`characters`]: additive characters, Gauss sums, Kubota sums, dissection.
//! - [`kloosterman`]: finite and archimedean Kloosterman sums.
//! - [`circle`]: exponential sums, oscillatory integrals, solution counts,
//!   local densities for the Morgenstern quadratic form.
//! - [`graphs`]: Morgenstern Cayley graphs, BFS distances, spectra.
//! - [`tlsweep`]: twisted Linnik-Selberg sums and sweeps.
//! - [`io`]: instance files shared by the CLI and tests.
//! - [`acceptance`]: the end-to-end self-test.

pub mod acceptance;
pub mod budget;
pub mod characters;
pub mod circle;
pub mod cyclo;
pub mod error;
pub mod ff;
pub mod graphs;
pub mod io;
pub mod kloosterman;
pub mod tlsweep;

pub use error::{Error, Result};
pub use ff::{Fq, FqElem, Laurent, Poly};

/// Package version plus the git revision the crate was built from.
pub const REVISION: &str = env!("FFCIRCLE_REVISION");

use num_rational::BigRational;

/// Exact elements of `Q(zeta_p)` with rational coefficients.
pub type ExactCyclo = cyclo::Cyclotomic<BigRational>;
/// Elements of `Z[zeta_p]`, used for direct character sums.
pub type IntCyclo = cyclo::Cyclotomic<i64>;
