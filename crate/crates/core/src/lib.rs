//! Expectation and variance curves of topological invariants of random
//! Vietoris–Rips and Čech complexes on model manifolds.
//!
//! The crate is organised bottom-up:
//!
//! * [`manifold`]: model manifolds (circle, flat torus, round 2-sphere) with
//!   their uniform probability measures, deterministic samplers, geodesic
//!   distances, ball measures and covering radii.
//! * [`complex`]: Vietoris–Rips and Čech complexes of a sample, edge
//!   creation scales and edge counts.
//! * [`homology`]: Betti numbers over GF(2), Euler characteristic and a
//!   brute-force rank oracle used for cross-validation.
//! * [`circle_oracle`]: the exact probability that the Vietoris–Rips complex
//!   of `n` uniform points on the circle is homotopy equivalent to the circle,
//!   and the induced moments of the first Betti number.
//! * [`estimator`]: reproducible parallel Monte Carlo estimation of invariant
//!   curves, convergence tables and discrete Lipschitz diagnostics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle_oracle;
pub mod complex;
pub mod error;
pub mod estimator;
pub mod homology;
pub mod manifold;
pub mod union_find;

pub use error::{Error, Result};
