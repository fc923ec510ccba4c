//! Hausdorff dimension of the set of `x` in `[0, 1)` whose base-`q` orbit
//! `{q^n x}` never drops below a threshold `c`.
//!
//! At thresholds `c = i / q^m` the set is a subshift of finite type on
//! length-`m` words with transition matrix `A_m(i)`, and the dimension is
//! `log(rho) / log(q)` for the Perron root `rho` of that matrix. The
//! characteristic polynomial of `A_m(i)` has a closed form driven by the
//! minimal prefix of `i`:
//!
//! * [`base_arith`]: base-q part/residue arithmetic and digit words,
//! * [`prefix`]: prefix length and minimal prefix,
//! * [`subshift`]: the transition matrices, their cycles and traces,
//! * [`charpoly`]: the closed form and two brute-force oracles,
//! * [`spectrum`]: Perron roots, `phi`, `psi`, plateaus and brackets,
//! * [`verify`]: the self-check suite,
//! * [`cli`]: the `dimshift` command line.
//!
//! Floating-point code is generic over [`num_traits::Float`]; the aliases
//! below fix it to `f64`.

pub mod base_arith;
pub mod charpoly;
pub mod cli;
pub mod dense;
pub mod error;
pub mod prefix;
pub mod spectrum;
pub mod subshift;
pub mod verify;

pub use base_arith::{Context, DigitWord, PartRes};
pub use charpoly::CharPoly;
pub use error::{Error, Result};
pub use prefix::PrefixInfo;
pub use subshift::{Cycle, DenseBudget, TransitionMatrix};

/// Exact parameter `c`.
pub type Rational = num_rational::BigRational;
/// Exact integer matrix used by the trace and determinant oracles.
pub type ExactMatrix = dense::DenseMatrix<num_bigint::BigInt>;
pub type FloatMatrix = dense::DenseMatrix<f64>;
pub type DimPoint = spectrum::DimPoint<f64>;
pub type DimBracket = spectrum::DimBracket<f64>;
pub type PerronRoot = spectrum::PerronRoot<f64>;
pub type Plateau = spectrum::Plateau<f64>;
pub type AsymRow = spectrum::AsymRow<f64>;
