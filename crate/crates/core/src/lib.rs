//! Multivariate Euler products of Igusa type.
//!
//! A library for exploring products `prod_p h(p^{-s_1}, ..., p^{-s_n}, p^{-c})`
//! attached to an integer polynomial `h` with constant term 1:
//!
//! - exact cyclotomic-expansion exponents `gamma(beta)` and their verification,
//! - convergence/meromorphy polytopes, face enumeration, and the hypothesis
//!   checks behind the strong/weak natural-boundary verdicts,
//! - numerical meromorphic continuation through truncated sieved-zeta products,
//! - Puiseux-branch extraction at a boundary point and the resulting lattice of
//!   zeros accumulating to the right of the boundary,
//! - the Igusa zeta function of `Z[T, 1/T]` as a worked end-to-end application.
//!
//! Structural decisions (collinearity, face supports, expansion exponents) are
//! made in exact integer/rational arithmetic; only evaluation is floating point.

pub mod arith;
pub mod cli;
pub mod continuation;
pub mod cyclotomy;
pub mod geometry;
pub mod igusa;
pub mod poly;
pub mod puiseux;
pub mod report;

pub mod linalg;
pub mod roots;

pub(crate) mod series;
