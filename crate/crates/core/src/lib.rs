//! Numerical laboratory for the Dirichlet Monge-Ampère problem
//! det D²u = 1, u = 0 on the boundary of a bounded strictly convex domain.
//!
//! The crate solves the problem exactly on balls and ellipsoids and by a
//! damped Newton finite-difference scheme on general smooth convex domains,
//! evaluates the curvature functionals of the level sets of u (Gauss and mean
//! curvature, the auxiliary functions φ and ψ), and turns the maximum
//! principles, gradient bounds, and rigidity dichotomy those functionals obey
//! into quantitative pass/fail checks.

pub mod curvature;
pub mod error;
pub mod field;
pub mod geometry;
pub mod report;
pub mod solver;
pub mod symfunc;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Grid, NodeClass, PointJet, ScalarField};
pub use geometry::ConvexDomain;
pub use solver::{AnalyticSolution, SolveResult, SolverOptions};
pub use symfunc::SymMatrix;
