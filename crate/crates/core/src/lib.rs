//! Solver and analysis toolkit for the maximum `ell`-multi-coverage problem.
//!
//! Given `m` subsets of a ground set of `n` elements, a budget `k`, and a
//! coverage cap `ell`, the goal is to pick `k` sets maximizing
//!
//! ```text
//! C(S) = sum_e min(ell, #{ i in S : e in T_i })
//! ```
//!
//! so an element keeps paying until it has been covered `ell` times.  The
//! main pipeline ([`pipage::solve`]) solves an exact rational LP relaxation
//! and rounds it with pipage rounding, which guarantees a
//! `1 - ell^ell e^-ell / ell!` fraction of the optimum ([`combinatorics::rho`]).
//! Supporting modules provide the greedy and brute-force baselines, weighted
//! and partition-matroid variants, combinatorial gadget generation and
//! verification, and a reduction from list-decoding channel codes.

pub mod baselines;
pub mod channels;
pub mod combinatorics;
pub mod error;
pub mod gadget;
pub mod lp;
pub mod model;
pub mod multilinear;
pub mod pipage;
pub mod rational;
pub mod rng;

pub use error::{Error, Result};
pub use model::{
    coverage_value, is_feasible, weighted_coverage_value, CoverageInstance, IntegralSolution,
    MatroidConstraint, WeightedCoverageInstance,
};
pub use rational::Rat;
