//! Weighted small-step walks in the quarter plane.
//!
//! The crate covers the whole pipeline for a model with weights `d_{i,j}`
//! on `{-1,0,1}^2` and a rational `t` in `(0,1)`:
//!
//! * [`model`]: parsing, validation and normalisation of walk models;
//! * [`series`]: exact walk counts `q_{i,j,k}` and the kernel functional
//!   equation checked as an identity of polynomials;
//! * [`kernel`]: the kernel polynomial, its discriminants, the degeneracy
//!   criterion and the half-plane (genus) classification;
//! * [`curve`]: branch points, periods, the Weierstrass function of the
//!   period lattice, the uniformisation of the kernel curve and the QRT map;
//! * [`group`]: finiteness of the group of the walk at the given `t`;
//! * [`continuation`]: meromorphic continuation of `F^1`, `F^2` over the
//!   uniformisation plane;
//! * [`classify`]: the differential nature verdict;
//! * [`report`] and [`cli`]: the command-line driver and its reports.

// Negated float comparisons are used on purpose so that NaN fails checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod continuation;
pub mod curve;
pub mod group;
pub mod kernel;
pub mod model;
pub mod par;
pub mod poly;
pub mod report;
pub mod series;

pub use classify::{classify, Nature, NatureReport};
pub use curve::{CurveAnalytics, CurveConfig};
pub use group::{group_report, GroupReport, GroupVerdict};
pub use kernel::{KernelPolynomial, QuarticDiscriminant};
pub use model::{StepSet, WeightedModel};
pub use series::SeriesTable;

/// Exact rational scalar used for weights, `t` and walk counts.
pub type Rational = num_rational::BigRational;
