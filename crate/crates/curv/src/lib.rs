//! Bakry-Emery curvature functions of locally finite graphs.
//!
//! The crate computes, for a vertex `x` of a (possibly weighted) graph, the
//! curvature function `K_{G,x} : (0, inf] -> R` defined as the largest `K`
//! such that the curvature-dimension inequality
//!
//! ```text
//!     Gamma2(f)(x) >= (1/N) (Delta f(x))^2 + K * Gamma(f)(x)
//! ```
//!
//! holds for all functions `f`. Everything is local: only the incomplete
//! 2-ball around `x` (with edges inside the 2-sphere removed) enters the
//! computation.
//!
//! The main entry points are [`engine::curvature_at`] for a single dimension
//! value, [`engine::curvature_function`] for a whole grid, and the
//! [`families`] module for named graph families together with their known
//! closed-form curvature functions. [`star`] implements the `*`-product of
//! curvature functions, which computes curvature of Cartesian products
//! without ever constructing the product graph.

// Index loops below mirror the matrix formulas entry by entry; iterator
// rewrites would obscure them.
#![allow(clippy::needless_range_loop)]

pub mod dim;
pub mod engine;
pub mod families;
pub mod graph;
pub mod linalg;
pub mod matrices;
pub mod spectral;
pub mod star;

pub use dim::Dimension;
pub use engine::{curvature_at, curvature_function, CurvaturePoint, CurvatureReport};
pub use families::{FamilySpec, VertexClass};
pub use graph::{Graph, LaplacianKind, LocalStructure};
pub use linalg::{SymMatrix, Tolerances};
pub use star::{cartesian_product, star, star_fold, FKFunction};
