//! Rigorous verification that partial sums of the Riemann zeta function,
//! `ζ_N(s) = Σ_{n<=N} n^-s`, have no zeros with `1 <= Re(s) < 2 - 2^-16`.
//!
//! The search variable is `θ_p = t·log p` per prime, evaluated with
//! outward-rounded interval arithmetic over boxes that are pruned or halved
//! until every box is certified zero-free.
//!
//! The arithmetic is generic over [`Endpoint`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which the CLI uses.

pub mod cli;
pub mod error;
pub mod evaluator;
pub mod interval;
pub mod reduction;
pub mod report;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use evaluator::{ComplexPoint, Evaluator, ScanResult, ThetaAssignment};
pub use interval::Interval;
pub use reduction::{classify, factorize, ExponentVector, ReductionPlan};
pub use scalar::Endpoint;
pub use search::{SearchConfig, VerdictKind};

/// Values of `N` whose zero-free status is settled by this computation.
pub const TARGET_N: [u64; 12] = [10, 11, 12, 13, 14, 15, 16, 17, 18, 20, 21, 28];

pub type Interval64 = interval::Interval<f64>;
pub type Interval32 = interval::Interval<f32>;
pub type ThetaAssignment64 = evaluator::ThetaAssignment<f64>;
pub type Evaluator64<'a> = evaluator::Evaluator<'a, f64>;
pub type SearchBox64 = search::SearchBox<f64>;
pub type Verdict64 = search::Verdict<f64>;
pub type SliceReport64 = search::SliceReport<f64>;
pub type SearchReport64 = search::SearchReport<f64>;
