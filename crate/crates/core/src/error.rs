use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("normal direction degenerate: |Dg| = {grad_norm:.3e} below tolerance at boundary point")]
    DegenerateNormal { grad_norm: f64 },

    #[error("comparison radius unbounded: sampled minimum principal curvature {kappa_min:.3e} is not positive")]
    UnboundedRadius { kappa_min: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("Hessian singular: smallest eigenvalue {min_eig:.3e} below tolerance")]
    SingularHessian { min_eig: f64 },

    #[error("finite-difference stencil unavailable at node {node}")]
    StencilUnavailable { node: usize },

    #[error("gradient magnitude {grad_norm:.3e} below floor {floor:.3e}; level-set curvature undefined")]
    VanishingGradient { grad_norm: f64, floor: f64 },

    #[error("jet carries no third derivatives")]
    MissingThirdDerivatives,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("grid too coarse: {count} interior nodes along axis {axis}, need at least {min}")]
    GridTooCoarse { axis: usize, count: usize, min: usize },

    #[error("Newton iteration did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("convexity lost at Newton iteration {iteration}: no damping step keeps the Hessian positive definite")]
    ConvexityLoss { iteration: usize },

    #[error("coefficient product {product:.6e} violates the unit-determinant constraint")]
    ProductConstraint { product: f64 },

    #[error("sublevel threshold {c:.6e} outside (min u, 0) = ({min_u:.6e}, 0)")]
    ThresholdOutOfRange { c: f64, min_u: f64 },

    #[error("sublevel region under-resolved: {count} nodes along axis {axis}, need at least {min}")]
    RegionUnderResolved { axis: usize, count: usize, min: usize },

    #[error("no boundary-adjacent nodes: grid does not resolve the boundary band")]
    EmptyBoundaryBand,

    #[error("linear solve failed in the Newton step")]
    LinearSolve,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("point outside the domain of the expression")]
    OutsideDomain,
}

pub type Result<T> = std::result::Result<T, Error>;
