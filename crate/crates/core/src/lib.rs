//! Approximation algorithms for the ordered k-median problem on explicit finite
//! metrics.
//!
//! Given `n` points with a distance matrix, a budget `k` and a non-increasing
//! weight vector `w`, the ordered k-median objective of a center set is
//! `w · c↓`, the weighted sum of the clients' assignment costs sorted from
//! largest to smallest. The all-ones vector gives k-median, `(1, 0, …, 0)`
//! gives k-center, and `{0,1}` vectors give the ℓ-centrum problem.
//!
//! The crate is organised bottom-up:
//!
//! * [`instance`]: metric instances, weight vectors, solutions and generators.
//! * [`ordered_cost`]: the ordered objective and the proxy distance transforms
//!   (truncated costs for ℓ-centrum, interval-weighted surrogates for general
//!   weights) together with the guess enumeration that drives them.
//! * [`lp`]: a dense two-phase simplex used to compute exact LP optima and
//!   duals at desk scale.
//! * [`primal_dual`]: Lagrangian dual ascent with pruning, its LMP certificate
//!   and the bisection over the facility price.
//! * [`bipoint`]: clustering and integral rounding of two primal-dual
//!   solutions that bracket the budget.
//! * [`centrum`]: the two ℓ-centrum pipelines (primal-dual and LP reduction to
//!   weighted k-median).
//! * [`ordered`]: the general-weight pipeline (per-guess solve, best-of).
//! * [`oracle`]: exhaustive solvers used as ground truth.
//!
//! Everything here is `no_std` with `alloc`; file formats, the CLI and the
//! benchmark harness live in the companion `okmedian` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bipoint;
pub mod centrum;
mod error;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod ordered;
pub mod ordered_cost;
pub mod primal_dual;
pub mod tol;

pub use error::{Error, MetricError, Result};
pub use instance::{MetricInstance, Solution, WeightVector};
pub use ordered_cost::{ProxySpec, SurrogateParams, TruncatedCostParams};
