//! The strictly convex solution of det D²u = 1, u = 0 on ∂Ω: exact
//! quadratics on balls and ellipsoids, damped Newton finite differences on
//! general smooth strictly convex domains.
//!
//! The discrete system imposes det D²_h u = 1 with full central stencils
//! (mixed terms included) at interior nodes. Boundary-adjacent nodes carry a
//! one-sided linear-interpolation row anchored at the exact boundary crossing
//! of the most tightly cut one-ring direction: with the crossing at distance
//! θs towards the boundary and the opposite neighbor at distance s inside,
//! u_b = θ/(1+θ)·u_opp. The Newton linearization applies the adjugate
//! identity δ(det M) = tr(adj M · δM); steps are halved until the residual
//! norm drops and the discrete Hessian stays positive definite at every
//! interior node.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};
use crate::field::{jet_at, Grid, JetOrder, NodeClass, ScalarField};
use crate::geometry::ConvexDomain;
use crate::symfunc::{sigma_all, sigma_k_gradient, SymMatrix};

/// Minimum interior nodes per axis before a solve is attempted.
const MIN_INTERIOR_PER_AXIS: usize = 16;
const MAX_DAMPING_HALVINGS: usize = 20;

/// Options for the Newton solve.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Print per-iteration diagnostics to stderr.
    pub trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-8,
            max_iterations: 50,
            trace: false,
        }
    }
}

/// Converged discrete solution with its certificates.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: ScalarField,
    /// max over interior nodes of |det D²_h u - 1|
    pub residual_max: f64,
    pub newton_iterations: usize,
    /// min over interior nodes of the smallest discrete Hessian eigenvalue
    pub convexity_min_eig: f64,
    /// location of the minimum of u, by quadratic interpolation around the
    /// minimal node
    pub critical_point: Vec<f64>,
    pub min_value: f64,
}

/// Closed-form solution expression.
#[derive(Debug, Clone)]
pub enum AnalyticSolution {
    /// u = ½(|x-center|² - r²) on the ball of radius r.
    Ball { center: Vec<f64>, radius: f64 },
    /// u = ½(Σ aᵢ(xᵢ-cᵢ)² - level) with Π aᵢ = 1 on the ellipsoid
    /// {Σ aᵢ(xᵢ-cᵢ)² < level}.
    Ellipsoid {
        center: Vec<f64>,
        coefficients: Vec<f64>,
        level: f64,
    },
}

/// The ball solution; det D²u = 1 identically and u vanishes on the sphere.
pub fn analytic_ball(center: Vec<f64>, radius: f64) -> AnalyticSolution {
    assert!(radius > 0.0 && center.len() >= 2);
    AnalyticSolution::Ball { center, radius }
}

/// The ellipsoid solution family. The coefficient product must equal one so
/// that det D²u = 1.
pub fn analytic_ellipsoid(
    center: Vec<f64>,
    coefficients: Vec<f64>,
    level: f64,
) -> Result<AnalyticSolution> {
    assert!(center.len() == coefficients.len() && center.len() >= 2 && level > 0.0);
    let product: f64 = coefficients.iter().product();
    if (product - 1.0).abs() > 1e-12 || coefficients.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::ProductConstraint { product });
    }
    Ok(AnalyticSolution::Ellipsoid {
        center,
        coefficients,
        level,
    })
}

impl AnalyticSolution {
    pub fn dim(&self) -> usize {
        match self {
            AnalyticSolution::Ball { center, .. } => center.len(),
            AnalyticSolution::Ellipsoid { center, .. } => center.len(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            AnalyticSolution::Ball { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                0.5 * (r2 - radius * radius)
            }
            AnalyticSolution::Ellipsoid {
                center,
                coefficients,
                level,
            } => {
                let q: f64 = x
                    .iter()
                    .zip(center)
                    .zip(coefficients)
                    .map(|((a, c), k)| k * (a - c) * (a - c))
                    .sum();
                0.5 * (q - level)
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            AnalyticSolution::Ball { center, .. } => {
                x.iter().zip(center).map(|(a, c)| a - c).collect()
            }
            AnalyticSolution::Ellipsoid {
                center,
                coefficients,
                ..
            } => x
                .iter()
                .zip(center)
                .zip(coefficients)
                .map(|((a, c), k)| k * (a - c))
                .collect(),
        }
    }

    /// D²u, constant in space.
    pub fn hessian(&self) -> SymMatrix {
        match self {
            AnalyticSolution::Ball { center, .. } => SymMatrix::identity(center.len()),
            AnalyticSolution::Ellipsoid { coefficients, .. } => SymMatrix::from_diag(coefficients),
        }
    }

    pub fn critical_point(&self) -> Vec<f64> {
        match self {
            AnalyticSolution::Ball { center, .. } => center.clone(),
            AnalyticSolution::Ellipsoid { center, .. } => center.clone(),
        }
    }

    pub fn min_value(&self) -> f64 {
        match self {
            AnalyticSolution::Ball { radius, .. } => -0.5 * radius * radius,
            AnalyticSolution::Ellipsoid { level, .. } => -0.5 * level,
        }
    }

    /// The domain {u < 0} the expression solves on.
    pub fn domain(&self) -> ConvexDomain {
        match self {
            AnalyticSolution::Ball { center, radius } => {
                ConvexDomain::ball(center.clone(), *radius).unwrap()
            }
            AnalyticSolution::Ellipsoid {
                center,
                coefficients,
                level,
            } => {
                let semi = coefficients.iter().map(|a| (level / a).sqrt()).collect();
                ConvexDomain::ellipsoid(center.clone(), semi).unwrap()
            }
        }
    }

    /// Exact jet at a point of the closed domain (no discretization error).
    /// Third derivatives of the quadratic are identically zero.
    pub fn jet(&self, x: &[f64], order: JetOrder) -> Result<crate::field::PointJet> {
        let scale = self.min_value().abs();
        if self.eval(x) > 1e-9 * scale {
            return Err(Error::OutsideDomain);
        }
        let third = match order {
            JetOrder::Second => None,
            JetOrder::Third => Some(crate::field::SymTensor3::zeros(self.dim())),
        };
        crate::field::PointJet::new(
            x.to_vec(),
            self.eval(x),
            self.gradient(x),
            self.hessian(),
            third,
        )
    }

    /// Samples the expression onto a grid.
    pub fn sample(&self, grid: Arc<Grid>) -> ScalarField {
        ScalarField::from_fn(grid, |x| self.eval(x))
    }
}

struct InteriorPlan {
    row: usize,
    /// unknown ids: self, then per axis (plus, minus), then per pair the four
    /// corners (++, --, +-, -+)
    center: usize,
    axes: Vec<(usize, usize)>,
    pairs: Vec<(usize, usize, [usize; 4])>,
}

struct BoundaryPlan {
    row: usize,
    b_id: usize,
    /// opposite-neighbor unknown and its interpolation coefficient θ/(1+θ)
    opp: Option<(usize, f64)>,
}

/// Solves det D²u = 1, u = 0 on ∂Ω on the given grid. The domain must be
/// bounded and strictly convex and the grid must resolve at least 16 interior
/// nodes per axis.
pub fn solve_dirichlet(
    domain: &ConvexDomain,
    grid: &Arc<Grid>,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    let n = grid.dim();
    let h = grid.spacing();
    for ax in 0..n {
        let count = grid.interior_extent(ax);
        if count < MIN_INTERIOR_PER_AXIS {
            return Err(Error::GridTooCoarse {
                axis: ax,
                count,
                min: MIN_INTERIOR_PER_AXIS,
            });
        }
    }

    // unknown numbering over non-exterior nodes, in node order
    let mut unknown = vec![usize::MAX; grid.num_nodes()];
    let mut nodes = Vec::new();
    for idx in grid.non_exterior_nodes() {
        unknown[idx] = nodes.len();
        nodes.push(idx);
    }
    let n_unknowns = nodes.len();

    let (interior_plans, boundary_plans) = build_plans(grid, &unknown)?;

    // initial iterate: the ball solution of the circumscribed radius
    let anchor = domain.anchor();
    let radius = domain.circumscribed_radius();
    let seed = analytic_ball(anchor, radius);
    let mut u: Vec<f64> = nodes.iter().map(|&idx| seed.eval(&grid.node_pos(idx))).collect();

    let h2 = h * h;
    // Newton runs on the log-determinant residual ln(det D²_h u): it agrees
    // with det - 1 to first order at the solution and blows up towards the
    // boundary of the convexity cone, so damped steps are naturally repelled
    // from losing positive definiteness.
    let eval_residual = |u: &[f64], out: &mut Vec<f64>| -> bool {
        out.clear();
        out.resize(n_unknowns, 0.0);
        let mut ok = true;
        for p in &interior_plans {
            let hess = hessian_from_plan(u, p, h2, n);
            let d = sigma_all(&hess)[n];
            if d <= 0.0 {
                ok = false;
                out[p.row] = f64::INFINITY;
            } else {
                out[p.row] = d.ln();
            }
        }
        for p in &boundary_plans {
            out[p.row] = match p.opp {
                Some((opp, c)) => u[p.b_id] - c * u[opp],
                None => u[p.b_id],
            };
        }
        ok
    };
    let min_interior_eig = |u: &[f64]| -> f64 {
        let mut worst = f64::INFINITY;
        for p in &interior_plans {
            let hess = hessian_from_plan(u, p, h2, n);
            let eig = hess.eigenvalues()[0];
            if eig < worst {
                worst = eig;
            }
        }
        worst
    };

    // fixed sparsity pattern: factorize the symbolic structure once
    let pattern = jacobian_triplets(&interior_plans, &boundary_plans, &u, h2, n);
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n_unknowns, n_unknowns, &pattern)
        .map_err(|_| Error::LinearSolve)?;
    let symbolic = SymbolicLu::try_new(mat.symbolic()).map_err(|_| Error::LinearSolve)?;

    // Refine the seed by solving the Poisson problem Δu = n with the same
    // boundary rows (same sparsity pattern, corner entries structurally
    // zero). This start already satisfies the boundary interpolation, so
    // early Newton corrections stay small in the boundary layer where the
    // convexity monitor is tightest.
    {
        let mut tri = Vec::with_capacity(pattern.len());
        for p in &interior_plans {
            tri.push(Triplet::new(p.row, p.center, -2.0 * n as f64 / h2));
            for &(plus, minus) in &p.axes {
                tri.push(Triplet::new(p.row, plus, 1.0 / h2));
                tri.push(Triplet::new(p.row, minus, 1.0 / h2));
            }
            for &(_, _, corners) in &p.pairs {
                for c in corners {
                    tri.push(Triplet::new(p.row, c, 0.0));
                }
            }
        }
        for p in &boundary_plans {
            tri.push(Triplet::new(p.row, p.b_id, 1.0));
            if let Some((opp, c)) = p.opp {
                tri.push(Triplet::new(p.row, opp, -c));
            }
        }
        let pmat =
            SparseColMat::<usize, f64>::try_new_from_triplets(n_unknowns, n_unknowns, &tri)
                .map_err(|_| Error::LinearSolve)?;
        let lu = Lu::try_new_with_symbolic(symbolic.clone(), pmat.as_ref())
            .map_err(|_| Error::LinearSolve)?;
        let mut rhs = Mat::<f64>::zeros(n_unknowns, 1);
        for p in &interior_plans {
            rhs[(p.row, 0)] = n as f64;
        }
        let sol = lu.solve(&rhs);
        let cand: Vec<f64> = (0..n_unknowns).map(|i| sol[(i, 0)]).collect();
        if cand.iter().all(|v| v.is_finite()) {
            if min_interior_eig(&cand) > 0.0 {
                u = cand;
            } else {
                // blend back towards the convex quadratic seed until the
                // discrete Hessian is positive definite everywhere
                for k in 1..10 {
                    let t = 1.0 - k as f64 / 10.0;
                    let blend: Vec<f64> = cand
                        .iter()
                        .zip(&u)
                        .map(|(c, q)| t * c + (1.0 - t) * q)
                        .collect();
                    if min_interior_eig(&blend) > 0.0 {
                        u = blend;
                        break;
                    }
                }
            }
        }
    }

    let mut residual = Vec::new();
    eval_residual(&u, &mut residual);
    let mut res_norm = l2(&residual);

    let mut iterations = 0;
    let mut converged = max_abs(&residual) < opts.tolerance;
    while !converged && iterations < opts.max_iterations {
        let triplets = jacobian_triplets(&interior_plans, &boundary_plans, &u, h2, n);
        let mat =
            SparseColMat::<usize, f64>::try_new_from_triplets(n_unknowns, n_unknowns, &triplets)
                .map_err(|_| Error::LinearSolve)?;
        let lu = Lu::try_new_with_symbolic(symbolic.clone(), mat.as_ref())
            .map_err(|_| Error::LinearSolve)?;
        let mut rhs = Mat::<f64>::zeros(n_unknowns, 1);
        for (i, r) in residual.iter().enumerate() {
            rhs[(i, 0)] = -r;
        }
        let delta = lu.solve(&rhs);
        if (0..n_unknowns).any(|i| !delta[(i, 0)].is_finite()) {
            return Err(Error::LinearSolve);
        }

        let mut lambda = 1.0;
        let mut accepted = false;
        let mut trial = vec![0.0; n_unknowns];
        let mut trial_res = Vec::new();
        let mut pd_ok_somewhere = false;
        for _ in 0..=MAX_DAMPING_HALVINGS {
            for i in 0..n_unknowns {
                trial[i] = u[i] + lambda * delta[(i, 0)];
            }
            let dets_ok = eval_residual(&trial, &mut trial_res);
            let trial_norm = l2(&trial_res);
            let pd = dets_ok && min_interior_eig(&trial) > 0.0;
            if pd {
                pd_ok_somewhere = true;
            }
            if trial_norm < res_norm && pd {
                std::mem::swap(&mut u, &mut trial);
                std::mem::swap(&mut residual, &mut trial_res);
                res_norm = trial_norm;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return if pd_ok_somewhere {
                Err(Error::NonConvergence {
                    iterations,
                    residual: max_abs(&residual),
                })
            } else {
                Err(Error::ConvexityLoss {
                    iteration: iterations,
                })
            };
        }
        iterations += 1;
        if opts.trace {
            eprintln!(
                "newton iter {iterations}: |f|_2 {res_norm:.3e} |f|_max {:.3e} step {lambda}",
                max_abs(&residual)
            );
        }
        converged = max_abs(&residual) < opts.tolerance;
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations,
            residual: max_abs(&residual),
        });
    }

    // certificates
    let mut residual_max = 0.0f64;
    let mut convexity_min_eig = f64::INFINITY;
    for p in &interior_plans {
        let hess = hessian_from_plan(&u, p, h2, n);
        residual_max = residual_max.max((sigma_all(&hess)[n] - 1.0).abs());
        convexity_min_eig = convexity_min_eig.min(hess.eigenvalues()[0]);
    }
    if convexity_min_eig <= 0.0 {
        return Err(Error::ConvexityLoss { iteration: iterations });
    }

    let mut values = vec![f64::NAN; grid.num_nodes()];
    for (k, &idx) in nodes.iter().enumerate() {
        values[idx] = u[k];
    }
    let field = ScalarField::from_values(grid.clone(), values);

    for idx in grid.non_exterior_nodes() {
        if field.get(idx) >= 0.0 {
            return Err(Error::NonConvergence {
                iterations,
                residual: residual_max,
            });
        }
    }
    let argmin = unique_minimum(&field).ok_or(Error::NonConvergence {
        iterations,
        residual: residual_max,
    })?;

    let (critical_point, min_value) = locate_minimum(&field, argmin);

    Ok(SolveResult {
        u: field,
        residual_max,
        newton_iterations: iterations,
        convexity_min_eig,
        critical_point,
        min_value,
    })
}

fn build_plans(
    grid: &Arc<Grid>,
    unknown: &[usize],
) -> Result<(Vec<InteriorPlan>, Vec<BoundaryPlan>)> {
    let n = grid.dim();
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for idx in grid.non_exterior_nodes() {
        let row = unknown[idx];
        match grid.class(idx) {
            NodeClass::Interior => {
                let id = |off: &[i32]| -> usize {
                    let nb = grid.neighbor(idx, off).expect("interior one-ring in bounds");
                    debug_assert_ne!(grid.class(nb), NodeClass::Exterior);
                    unknown[nb]
                };
                let mut off = vec![0i32; n];
                let mut axes = Vec::with_capacity(n);
                for i in 0..n {
                    off[i] = 1;
                    let p = id(&off);
                    off[i] = -1;
                    let m = id(&off);
                    off[i] = 0;
                    axes.push((p, m));
                }
                let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
                for i in 0..n {
                    for j in (i + 1)..n {
                        let mut corner = |si: i32, sj: i32| {
                            off[i] = si;
                            off[j] = sj;
                            let v = id(&off);
                            off[i] = 0;
                            off[j] = 0;
                            v
                        };
                        pairs.push((
                            i,
                            j,
                            [corner(1, 1), corner(-1, -1), corner(1, -1), corner(-1, 1)],
                        ));
                    }
                }
                interior.push(InteriorPlan {
                    row,
                    center: unknown[idx],
                    axes,
                    pairs,
                });
            }
            NodeClass::BoundaryAdjacent => {
                // choose the cut to anchor the interpolation row: axis cuts
                // first, then the smallest θ, requiring the opposite neighbor
                // to be inside
                let mut best: Option<(bool, f64, usize)> = None;
                for cut in grid.cuts(idx) {
                    let opposite: Vec<i32> = cut.offset.iter().map(|v| -v).collect();
                    let opp_id = match grid.neighbor(idx, &opposite) {
                        Some(nb) if grid.class(nb) != NodeClass::Exterior => unknown[nb],
                        _ => continue,
                    };
                    let cand = (cut.is_axis(), cut.theta, opp_id);
                    best = Some(match best {
                        None => cand,
                        // axis cuts beat diagonal ones, then the tighter cut wins
                        Some(b) if (cand.0 && !b.0) || (cand.0 == b.0 && cand.1 < b.1) => cand,
                        Some(b) => b,
                    });
                }
                let opp = best.map(|(_, theta, opp_id)| (opp_id, theta / (1.0 + theta)));
                boundary.push(BoundaryPlan {
                    row,
                    b_id: unknown[idx],
                    opp,
                });
            }
            NodeClass::Exterior => unreachable!(),
        }
    }
    if boundary.is_empty() {
        return Err(Error::EmptyBoundaryBand);
    }
    Ok((interior, boundary))
}

fn hessian_from_plan(u: &[f64], p: &InteriorPlan, h2: f64, n: usize) -> SymMatrix {
    let u0 = u[p.center];
    let mut hess = SymMatrix::zeros(n);
    for (i, &(plus, minus)) in p.axes.iter().enumerate() {
        hess.set(i, i, (u[plus] - 2.0 * u0 + u[minus]) / h2);
    }
    for &(i, j, [pp, mm, pm, mp]) in &p.pairs {
        hess.set(i, j, (u[pp] + u[mm] - u[pm] - u[mp]) / (4.0 * h2));
    }
    hess
}

fn jacobian_triplets(
    interior: &[InteriorPlan],
    boundary: &[BoundaryPlan],
    u: &[f64],
    h2: f64,
    n: usize,
) -> Vec<Triplet<usize, usize, f64>> {
    let stencil = 1 + 2 * n + 2 * n * (n - 1);
    let mut triplets = Vec::with_capacity(interior.len() * stencil + boundary.len() * 2);
    for p in interior {
        let hess = hessian_from_plan(u, p, h2, n);
        let det = sigma_all(&hess)[n];
        // d ln det = tr(adj·dH)/det
        let adj = sigma_k_gradient(&hess, n).scale(1.0 / det);
        let mut center_coeff = 0.0;
        for i in 0..n {
            center_coeff += adj.get(i, i) * (-2.0 / h2);
            let (plus, minus) = p.axes[i];
            triplets.push(Triplet::new(p.row, plus, adj.get(i, i) / h2));
            triplets.push(Triplet::new(p.row, minus, adj.get(i, i) / h2));
        }
        for &(i, j, [pp, mm, pm, mp]) in &p.pairs {
            // symmetric entry appears twice in the determinant expansion
            let w = 2.0 * adj.get(i, j) / (4.0 * h2);
            triplets.push(Triplet::new(p.row, pp, w));
            triplets.push(Triplet::new(p.row, mm, w));
            triplets.push(Triplet::new(p.row, pm, -w));
            triplets.push(Triplet::new(p.row, mp, -w));
        }
        triplets.push(Triplet::new(p.row, p.center, center_coeff));
    }
    for p in boundary {
        triplets.push(Triplet::new(p.row, p.b_id, 1.0));
        if let Some((opp, c)) = p.opp {
            triplets.push(Triplet::new(p.row, opp, -c));
        }
    }
    triplets
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

/// The global minimal node, after checking that every weak local minimum
/// (ties allowed to absorb grid symmetry) sits in the one-ring of the argmin,
/// i.e. that u has a single basin.
fn unique_minimum(field: &ScalarField) -> Option<usize> {
    let grid = field.grid();
    let offsets = crate::field::one_ring_offsets(grid.dim());
    let argmin = grid
        .non_exterior_nodes()
        .min_by(|&a, &b| field.get(a).partial_cmp(&field.get(b)).unwrap())?;
    let tie = 1e-12 * field.get(argmin).abs().max(1e-300);
    let argmin_coords = grid.coords(argmin);
    for idx in grid.non_exterior_nodes() {
        let v = field.get(idx);
        let mut weak_min = true;
        for off in &offsets {
            if let Some(nb) = grid.neighbor(idx, off) {
                let w = field.get(nb);
                if w.is_finite() && w < v - tie {
                    weak_min = false;
                    break;
                }
            }
        }
        if weak_min {
            let coords = grid.coords(idx);
            let near = coords
                .iter()
                .zip(&argmin_coords)
                .all(|(a, b)| a.abs_diff(*b) <= 1);
            if !near {
                return None;
            }
        }
    }
    Some(argmin)
}

/// Quadratic fit around the minimal node: one Newton step of the local
/// central-difference model.
fn locate_minimum(field: &ScalarField, node: usize) -> (Vec<f64>, f64) {
    let grid = field.grid();
    let pos = grid.node_pos(node);
    match jet_at(field, node, JetOrder::Second) {
        Ok(jet) => {
            let step = jet.inverse_hessian.apply(&jet.gradient);
            let x0: Vec<f64> = pos.iter().zip(&step).map(|(p, s)| p - s).collect();
            let correction: f64 = jet
                .gradient
                .iter()
                .zip(&step)
                .map(|(g, s)| g * s)
                .sum();
            (x0, jet.value - 0.5 * correction)
        }
        Err(_) => (pos, field.get(node)),
    }
}
