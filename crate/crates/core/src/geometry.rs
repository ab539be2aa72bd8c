//! Convex domains given as strict sublevel sets {g < 0} of smooth convex
//! defining functions, with boundary-curvature queries.
//!
//! Working with defining functions (rather than boundary meshes) lets the
//! boundary of the domain and the level sets of the solution share one
//! curvature formalism: project the Hessian of the defining function onto the
//! tangent space of the level set and divide by the gradient norm.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symfunc::SymMatrix;

/// Boundary-point tolerance, relative to the bounding-box diameter.
pub const BOUNDARY_TOL_REL: f64 = 1e-9;

/// Below this norm the outward normal is considered degenerate.
const NORMAL_TOL: f64 = 1e-12;

/// Sampled minimum curvatures at or below this count as a flat boundary
/// piece, for which the circumscribed comparison radius is unbounded.
const CURVATURE_TOL: f64 = 1e-10;

/// Fixed angular offset of the boundary sampling grid. Keeps axis-aligned
/// flat points (e.g. of superellipses) from being sampled exactly while
/// staying close enough to the axes that curvature extremes located there
/// are recovered to ~offset².
const DIRECTION_OFFSET: f64 = 1e-4;

/// Default boundary sampling density in two dimensions.
pub const DEFAULT_BOUNDARY_SAMPLES_2D: usize = 2048;
/// Default boundary sampling density in three dimensions.
pub const DEFAULT_BOUNDARY_SAMPLES_3D: usize = 10_000;

/// User-supplied defining function for domains without a closed-form kind.
/// Implementations must be smooth and convex near {g = 0} with a bounded
/// sublevel set; `gradient` and `hessian` default to central differences.
pub trait DefiningFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
    fn interior_point(&self) -> Vec<f64>;
    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>);

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let h = fd_step(self.bounding_box());
        let n = self.dim();
        let mut g = vec![0.0; n];
        let mut xp = x.to_vec();
        for i in 0..n {
            xp[i] = x[i] + h;
            let fp = self.eval(&xp);
            xp[i] = x[i] - h;
            let fm = self.eval(&xp);
            xp[i] = x[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        g
    }

    fn hessian(&self, x: &[f64]) -> SymMatrix {
        let h = fd_step(self.bounding_box());
        let n = self.dim();
        let f0 = self.eval(x);
        let mut m = SymMatrix::zeros(n);
        let mut xp = x.to_vec();
        for i in 0..n {
            xp[i] = x[i] + h;
            let fp = self.eval(&xp);
            xp[i] = x[i] - h;
            let fm = self.eval(&xp);
            xp[i] = x[i];
            m.set(i, i, (fp - 2.0 * f0 + fm) / (h * h));
            for j in (i + 1)..n {
                let mut corner = |si: f64, sj: f64| {
                    xp[i] = x[i] + si * h;
                    xp[j] = x[j] + sj * h;
                    let v = self.eval(&xp);
                    xp[i] = x[i];
                    xp[j] = x[j];
                    v
                };
                let v = (corner(1.0, 1.0) + corner(-1.0, -1.0)
                    - corner(1.0, -1.0)
                    - corner(-1.0, 1.0))
                    / (4.0 * h * h);
                m.set(i, j, v);
            }
        }
        m
    }
}

fn fd_step(bbox: (Vec<f64>, Vec<f64>)) -> f64 {
    let (lo, hi) = bbox;
    let diam: f64 = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt();
    1e-5 * diam.max(1.0)
}

/// Bounded strictly convex domain Ω = {g < 0}.
#[derive(Clone)]
pub enum ConvexDomain {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
    },
    /// {|x/scale|^p + |y/scale|^p < 1}, two-dimensional, exponent p ≥ 2.
    Superellipse {
        exponent: f64,
        scale: f64,
    },
    Generic(Arc<dyn DefiningFunction>),
}

impl std::fmt::Debug for ConvexDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConvexDomain::Ball { center, radius } => f
                .debug_struct("Ball")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            ConvexDomain::Ellipsoid { center, semi_axes } => f
                .debug_struct("Ellipsoid")
                .field("center", center)
                .field("semi_axes", semi_axes)
                .finish(),
            ConvexDomain::Superellipse { exponent, scale } => f
                .debug_struct("Superellipse")
                .field("exponent", exponent)
                .field("scale", scale)
                .finish(),
            ConvexDomain::Generic(_) => f.write_str("Generic(..)"),
        }
    }
}

impl ConvexDomain {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || center.len() < 2 {
            return Err(Error::Config("ball needs dimension >= 2 and radius > 0".into()));
        }
        Ok(ConvexDomain::Ball { center, radius })
    }

    pub fn ellipsoid(center: Vec<f64>, semi_axes: Vec<f64>) -> Result<Self> {
        if center.len() != semi_axes.len() || center.len() < 2 {
            return Err(Error::Config("ellipsoid center/semi-axes mismatch".into()));
        }
        if semi_axes.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Config("ellipsoid semi-axes must be positive".into()));
        }
        Ok(ConvexDomain::Ellipsoid { center, semi_axes })
    }

    pub fn superellipse(exponent: f64, scale: f64) -> Result<Self> {
        if !(exponent >= 2.0) || !(scale > 0.0) {
            return Err(Error::Config("superellipse needs exponent >= 2 and scale > 0".into()));
        }
        Ok(ConvexDomain::Superellipse { exponent, scale })
    }

    pub fn generic(def: Arc<dyn DefiningFunction>) -> Self {
        ConvexDomain::Generic(def)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexDomain::Ball { center, .. } => center.len(),
            ConvexDomain::Ellipsoid { center, .. } => center.len(),
            ConvexDomain::Superellipse { .. } => 2,
            ConvexDomain::Generic(d) => d.dim(),
        }
    }

    /// Defining function value; Ω = {g < 0}, ∂Ω = {g = 0}.
    pub fn g(&self, x: &[f64]) -> f64 {
        match self {
            ConvexDomain::Ball { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                r2 - radius * radius
            }
            ConvexDomain::Ellipsoid { center, semi_axes } => {
                x.iter()
                    .zip(center)
                    .zip(semi_axes)
                    .map(|((a, c), s)| {
                        let t = (a - c) / s;
                        t * t
                    })
                    .sum::<f64>()
                    - 1.0
            }
            ConvexDomain::Superellipse { exponent, scale } => {
                (x[0] / scale).abs().powf(*exponent) + (x[1] / scale).abs().powf(*exponent) - 1.0
            }
            ConvexDomain::Generic(d) => d.eval(x),
        }
    }

    pub fn grad_g(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ConvexDomain::Ball { center, .. } => {
                x.iter().zip(center).map(|(a, c)| 2.0 * (a - c)).collect()
            }
            ConvexDomain::Ellipsoid { center, semi_axes } => x
                .iter()
                .zip(center)
                .zip(semi_axes)
                .map(|((a, c), s)| 2.0 * (a - c) / (s * s))
                .collect(),
            ConvexDomain::Superellipse { exponent, scale } => {
                let p = *exponent;
                let sp = scale.powf(p);
                x.iter()
                    .map(|&v| p * v.abs().powf(p - 1.0) * v.signum() / sp)
                    .collect()
            }
            ConvexDomain::Generic(d) => d.gradient(x),
        }
    }

    pub fn hess_g(&self, x: &[f64]) -> SymMatrix {
        let n = self.dim();
        match self {
            ConvexDomain::Ball { .. } => SymMatrix::identity(n).scale(2.0),
            ConvexDomain::Ellipsoid { semi_axes, .. } => {
                SymMatrix::from_diag(&semi_axes.iter().map(|s| 2.0 / (s * s)).collect::<Vec<_>>())
            }
            ConvexDomain::Superellipse { exponent, scale } => {
                let p = *exponent;
                let sp = scale.powf(p);
                let d: Vec<f64> = x
                    .iter()
                    .map(|&v| {
                        if p == 2.0 {
                            2.0 / sp
                        } else {
                            p * (p - 1.0) * v.abs().powf(p - 2.0) / sp
                        }
                    })
                    .collect();
                SymMatrix::from_diag(&d)
            }
            ConvexDomain::Generic(d) => d.hessian(x),
        }
    }

    /// Strict membership: g(x) < 0. Boundary points are excluded.
    pub fn contains(&self, x: &[f64]) -> bool {
        assert!(x.iter().all(|v| v.is_finite()), "point must be finite");
        self.g(x) < 0.0
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ConvexDomain::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            ConvexDomain::Ellipsoid { center, semi_axes } => (
                center.iter().zip(semi_axes).map(|(c, s)| c - s).collect(),
                center.iter().zip(semi_axes).map(|(c, s)| c + s).collect(),
            ),
            ConvexDomain::Superellipse { scale, .. } => {
                (vec![-scale, -scale], vec![*scale, *scale])
            }
            ConvexDomain::Generic(d) => d.bounding_box(),
        }
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.iter()
            .zip(&hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }

    /// An interior anchor point (the center for the closed-form kinds).
    pub fn anchor(&self) -> Vec<f64> {
        match self {
            ConvexDomain::Ball { center, .. } => center.clone(),
            ConvexDomain::Ellipsoid { center, .. } => center.clone(),
            ConvexDomain::Superellipse { .. } => vec![0.0, 0.0],
            ConvexDomain::Generic(d) => d.interior_point(),
        }
    }

    /// The boundary point hit by a ray from the anchor in direction `dir`
    /// (unit vector). Closed forms where available, bisection otherwise.
    pub fn boundary_point(&self, dir: &[f64]) -> Vec<f64> {
        match self {
            ConvexDomain::Ball { center, radius } => center
                .iter()
                .zip(dir)
                .map(|(c, d)| c + radius * d)
                .collect(),
            ConvexDomain::Ellipsoid { center, semi_axes } => {
                let q: f64 = dir
                    .iter()
                    .zip(semi_axes)
                    .map(|(d, s)| (d / s) * (d / s))
                    .sum();
                let t = 1.0 / q.sqrt();
                center.iter().zip(dir).map(|(c, d)| c + t * d).collect()
            }
            ConvexDomain::Superellipse { exponent, scale } => {
                let p = *exponent;
                let q = dir[0].abs().powf(p) + dir[1].abs().powf(p);
                let t = scale / q.powf(1.0 / p);
                vec![t * dir[0], t * dir[1]]
            }
            ConvexDomain::Generic(_) => {
                let anchor = self.anchor();
                let diam = self.diameter();
                // bracket the crossing, then bisect g to ~1e-13 of the diameter
                let mut t_hi = diam;
                let at = |t: f64| -> Vec<f64> {
                    anchor.iter().zip(dir).map(|(a, d)| a + t * d).collect()
                };
                let mut guard = 0;
                while self.g(&at(t_hi)) <= 0.0 {
                    t_hi *= 2.0;
                    guard += 1;
                    assert!(guard < 60, "domain does not appear bounded along {dir:?}");
                }
                let mut t_lo = 0.0;
                for _ in 0..80 {
                    let mid = 0.5 * (t_lo + t_hi);
                    if self.g(&at(mid)) < 0.0 {
                        t_lo = mid;
                    } else {
                        t_hi = mid;
                    }
                }
                at(0.5 * (t_lo + t_hi))
            }
        }
    }

    /// Principal curvatures of ∂Ω at a boundary point, ascending. These are
    /// the eigenvalues of the shape operator of {g = g(x)} with respect to
    /// the outward normal Dg/|Dg|; all nonnegative on a convex domain.
    pub fn boundary_principal_curvatures(&self, x: &[f64]) -> Result<Vec<f64>> {
        let tol = BOUNDARY_TOL_REL * self.diameter();
        assert!(
            self.g(x).abs() <= tol.max(1e-12),
            "point is not on the boundary: g = {:.3e}",
            self.g(x)
        );
        tangential_curvatures(&self.grad_g(x), &self.hess_g(x))
    }

    /// (min over the sampled boundary of the smallest principal curvature,
    ///  max over the sampled boundary of the largest principal curvature).
    ///
    /// Sampling refinement N → 2N reuses every old direction, so the min is
    /// non-increasing and the max non-decreasing under refinement.
    pub fn kappa_extremes(&self, boundary_sampling: usize) -> Result<(f64, f64)> {
        let stats = self.boundary_curvature_stats(boundary_sampling)?;
        Ok((stats.kappa_m_min, stats.kappa_max_max))
    }

    /// Curvature extremes plus the Gauss/mean-curvature extremes used by the
    /// sublevel-set bound checks, gathered in one sampling pass.
    pub fn boundary_curvature_stats(&self, boundary_sampling: usize) -> Result<BoundaryCurvatureStats> {
        let mut stats = BoundaryCurvatureStats {
            kappa_m_min: f64::INFINITY,
            kappa_max_max: f64::NEG_INFINITY,
            gauss_max: f64::NEG_INFINITY,
            mean_max: f64::NEG_INFINITY,
            samples: 0,
        };
        for dir in self.sample_directions(boundary_sampling) {
            let x = self.boundary_point(&dir);
            let kappas = self.boundary_principal_curvatures(&x)?;
            let kmin = kappas[0];
            let kmax = kappas[kappas.len() - 1];
            stats.kappa_m_min = stats.kappa_m_min.min(kmin);
            stats.kappa_max_max = stats.kappa_max_max.max(kmax);
            stats.gauss_max = stats.gauss_max.max(kappas.iter().product());
            stats.mean_max = stats.mean_max.max(kappas.iter().sum());
            stats.samples += 1;
        }
        Ok(stats)
    }

    /// Comparison-ball radii (r, R) = (1/max κ_M, 1/min κ_m) over the sampled
    /// boundary. Errors with `UnboundedRadius` when the sampled minimum
    /// curvature is not positive (flat boundary piece).
    pub fn comparison_radii(&self) -> Result<(f64, f64)> {
        let samples = self.default_boundary_samples();
        let (kmin, kmax) = self.kappa_extremes(samples)?;
        if kmin <= CURVATURE_TOL {
            return Err(Error::UnboundedRadius { kappa_min: kmin });
        }
        Ok((1.0 / kmax, 1.0 / kmin))
    }

    pub fn default_boundary_samples(&self) -> usize {
        if self.dim() == 2 {
            DEFAULT_BOUNDARY_SAMPLES_2D
        } else {
            DEFAULT_BOUNDARY_SAMPLES_3D
        }
    }

    /// Radius of the smallest anchor-centered ball containing the sampled
    /// boundary. Used to seed the solver.
    pub fn circumscribed_radius(&self) -> f64 {
        match self {
            ConvexDomain::Ball { radius, .. } => *radius,
            ConvexDomain::Ellipsoid { semi_axes, .. } => {
                semi_axes.iter().fold(0.0f64, |m, s| m.max(*s))
            }
            ConvexDomain::Superellipse { exponent, scale } => {
                scale * 2.0f64.powf(0.5 - 1.0 / exponent)
            }
            ConvexDomain::Generic(_) => {
                let anchor = self.anchor();
                self.sample_directions(256)
                    .into_iter()
                    .map(|d| {
                        let x = self.boundary_point(&d);
                        x.iter()
                            .zip(&anchor)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(0.0f64, f64::max)
            }
        }
    }

    /// Samples the convexity invariant: the Hessian of g must be positive
    /// semidefinite at boundary and interior sample points.
    pub fn validate_convexity(&self, samples: usize) -> Result<()> {
        let anchor = self.anchor();
        for dir in self.sample_directions(samples) {
            let b = self.boundary_point(&dir);
            for t in [0.3, 0.7, 1.0] {
                let x: Vec<f64> = anchor
                    .iter()
                    .zip(&b)
                    .map(|(a, p)| a + t * (p - a))
                    .collect();
                let eig = self.hess_g(&x).eigenvalues();
                if eig[0] < -1e-8 * eig[eig.len() - 1].abs().max(1.0) {
                    return Err(Error::Config(format!(
                        "defining function is not convex near {x:?}: min Hessian eigenvalue {:.3e}",
                        eig[0]
                    )));
                }
            }
        }
        Ok(())
    }

    fn sample_directions(&self, total: usize) -> Vec<Vec<f64>> {
        match self.dim() {
            2 => {
                let n = total.max(8);
                (0..n)
                    .map(|i| {
                        let th = DIRECTION_OFFSET
                            + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                        vec![th.cos(), th.sin()]
                    })
                    .collect()
            }
            3 => {
                // nested latitude-longitude grid with offset, ~total points
                let m = ((total as f64 / 2.0).sqrt().round() as usize).max(4);
                let mut dirs = Vec::with_capacity(2 * m * (m - 1));
                for j in 1..m {
                    let polar = DIRECTION_OFFSET + std::f64::consts::PI * j as f64 / m as f64;
                    let (sp, cp) = polar.sin_cos();
                    for i in 0..(2 * m) {
                        let az = DIRECTION_OFFSET
                            + std::f64::consts::PI * i as f64 / m as f64;
                        dirs.push(vec![sp * az.cos(), sp * az.sin(), cp]);
                    }
                }
                dirs
            }
            n => panic!("boundary sampling not implemented for dimension {n}"),
        }
    }
}

/// Curvature statistics gathered over a boundary sampling pass.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryCurvatureStats {
    /// min over samples of the smallest principal curvature
    pub kappa_m_min: f64,
    /// max over samples of the largest principal curvature
    pub kappa_max_max: f64,
    /// max over samples of the product of principal curvatures
    pub gauss_max: f64,
    /// max over samples of the sum of principal curvatures
    pub mean_max: f64,
    pub samples: usize,
}

/// Principal curvatures (ascending) of the level set of a scalar function
/// through a point, from its gradient and Hessian: restrict Hess to the
/// tangent space of the level set and divide by |grad|.
pub fn tangential_curvatures(grad: &[f64], hess: &SymMatrix) -> Result<Vec<f64>> {
    let n = grad.len();
    assert!(n >= 2);
    let norm: f64 = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < NORMAL_TOL {
        return Err(Error::DegenerateNormal { grad_norm: norm });
    }
    let nu: Vec<f64> = grad.iter().map(|v| v / norm).collect();
    // orthonormal tangent basis by Gram-Schmidt, seeded from the axes least
    // parallel to the normal so no projection cancels catastrophically
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| nu[a].abs().partial_cmp(&nu[b].abs()).unwrap());
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for &k in &order {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        let d: f64 = v.iter().zip(&nu).map(|(a, b)| a * b).sum();
        for (vi, ni) in v.iter_mut().zip(&nu) {
            *vi -= d * ni;
        }
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= d * bi;
            }
        }
        let vn: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if vn > 1e-8 {
            basis.push(v.iter().map(|a| a / vn).collect());
        }
    }
    debug_assert_eq!(basis.len(), n - 1);
    let mut shape = SymMatrix::zeros(n - 1);
    for a in 0..(n - 1) {
        let hb = hess.apply(&basis[a]);
        for b in a..(n - 1) {
            let v: f64 = hb.iter().zip(&basis[b]).map(|(x, y)| x * y).sum();
            shape.set(a, b, v / norm);
        }
    }
    Ok(shape.eigenvalues())
}

/// Strict sublevel region Ω' = {x ∈ Ω : u(x) < c} of a solution u.
/// Membership is evaluated against u values supplied by the caller.
#[derive(Debug, Clone, Copy)]
pub struct SublevelRegion {
    pub c: f64,
}

impl SublevelRegion {
    /// Requires min u < c < 0 so that Ω' is nonempty and strictly inside Ω.
    pub fn new(c: f64, min_u: f64) -> Result<Self> {
        if !(c > min_u && c < 0.0) {
            return Err(Error::ThresholdOutOfRange { c, min_u });
        }
        Ok(SublevelRegion { c })
    }

    #[inline]
    pub fn contains_value(&self, u: f64) -> bool {
        u < self.c
    }
}
