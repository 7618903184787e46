//! Thresholding greedy algorithm with Cesàro and de la Vallée-Poussin
//! summation over concrete sequence-space norms.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; parallel execution is plugged in through
//! [`search::Executor`].

#![no_std]

extern crate alloc;

pub mod constants;
pub mod error;
pub mod greedy;
mod lp;
pub mod search;
pub mod spaces;
pub mod vector;
pub mod verify;

pub use error::{Error, Result};
pub use greedy::{GreedyOrdering, TiePolicy};
pub use spaces::{AlphaConstants, Family, Space, SpaceSpec, Weights};
pub use vector::{CoefVector, Sign, SignPattern};

/// Relative closeness `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1.0_f64.max(a.abs()).max(b.abs())
}
