//! Exact-arithmetic modified Schmidt games on ℝⁿ for the weighted contraction
//! flow `diag(2^{-(1+r_i)t})`, the hyperplane-avoidance strategy for weighted
//! badly approximable vectors, and the tree-like dimension machinery.

pub mod adversary;
pub mod bad;
pub mod dimension;
pub mod error;
pub mod game;
pub mod geometry;
pub mod intersect;
pub mod rational;
pub mod ternary;
pub mod transcript;

pub use error::{Error, Result};
