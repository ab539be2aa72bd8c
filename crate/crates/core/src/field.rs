//! Uniform Cartesian grids, scalar fields with node classification, and
//! finite-difference differential calculus up to third derivatives.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::ConvexDomain;
use crate::symfunc::{invert_spd, SymMatrix};

/// A jet's discrete Hessian must have smallest eigenvalue above this to be
/// invertible.
const SINGULAR_HESSIAN_TOL: f64 = 1e-10;

/// Node classification on a domain-fitted grid.
///
/// `Interior` nodes have their whole one-ring (all offsets with max-norm 1,
/// diagonals included) inside Ω, so every central second-order stencil is
/// available there. `BoundaryAdjacent` nodes are inside Ω with at least one
/// one-ring neighbor outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    BoundaryAdjacent,
    Exterior,
}

/// A boundary crossing along a one-ring direction: the segment from the node
/// towards `offset` leaves Ω at parameter `theta` ∈ (0, 1].
#[derive(Debug, Clone)]
pub struct DirectionCut {
    pub offset: Vec<i32>,
    pub theta: f64,
}

impl DirectionCut {
    pub fn is_axis(&self) -> bool {
        self.offset.iter().filter(|v| **v != 0).count() == 1
    }
}

/// Uniform isotropic Cartesian grid fitted to a convex domain.
#[derive(Debug)]
pub struct Grid {
    dim: usize,
    h: f64,
    origin: Vec<f64>,
    shape: Vec<usize>,
    class: Vec<NodeClass>,
    cuts: Vec<Vec<DirectionCut>>,
}

impl Grid {
    /// Builds a grid whose longest bounding-box extent is resolved by
    /// `nodes_per_axis` nodes, with a ~1.5h exterior margin all around so no
    /// inside node touches the grid edge. Dimensions 2 and 3 only.
    pub fn from_domain(domain: &ConvexDomain, nodes_per_axis: usize) -> Result<Arc<Grid>> {
        let dim = domain.dim();
        if dim < 2 || dim > 3 {
            return Err(Error::Dimension { expected: 2, got: dim });
        }
        if nodes_per_axis < 8 {
            return Err(Error::GridTooCoarse { axis: 0, count: nodes_per_axis, min: 8 });
        }
        let (lo, hi) = domain.bounding_box();
        // isotropic spacing sized so the SHORTEST extent gets the requested
        // node count; longer axes receive proportionally more nodes
        let shortest = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| b - a)
            .fold(f64::INFINITY, f64::min);
        let h = shortest / (nodes_per_axis - 1) as f64;
        let mut shape = Vec::with_capacity(dim);
        let mut origin = Vec::with_capacity(dim);
        for ax in 0..dim {
            let len = hi[ax] - lo[ax];
            let count = ((len + 3.0 * h) / h).ceil() as usize + 1;
            let mid = 0.5 * (lo[ax] + hi[ax]);
            shape.push(count);
            origin.push(mid - 0.5 * (count - 1) as f64 * h);
        }
        let total: usize = shape.iter().product();

        let mut grid = Grid {
            dim,
            h,
            origin,
            shape,
            class: vec![NodeClass::Exterior; total],
            cuts: vec![Vec::new(); total],
        };

        let inside: Vec<bool> = (0..total)
            .map(|idx| domain.g(&grid.node_pos(idx)) < 0.0)
            .collect();

        let offsets = one_ring_offsets(dim);
        for idx in 0..total {
            if !inside[idx] {
                continue;
            }
            let coords = grid.coords(idx);
            let mut interior = true;
            for off in &offsets {
                match grid.neighbor_of(&coords, off) {
                    Some(n) if inside[n] => {}
                    _ => {
                        interior = false;
                        break;
                    }
                }
            }
            grid.class[idx] = if interior {
                NodeClass::Interior
            } else {
                NodeClass::BoundaryAdjacent
            };
        }

        // boundary cuts for every one-ring direction that leaves the domain
        for idx in 0..total {
            if grid.class[idx] != NodeClass::BoundaryAdjacent {
                continue;
            }
            let coords = grid.coords(idx);
            let pos = grid.node_pos(idx);
            for off in &offsets {
                let exits = match grid.neighbor_of(&coords, off) {
                    Some(n) => !inside[n],
                    None => true,
                };
                if !exits {
                    continue;
                }
                let theta = bisect_cut(domain, &pos, off, h);
                grid.cuts[idx].push(DirectionCut {
                    offset: off.clone(),
                    theta,
                });
            }
        }

        Ok(Arc::new(grid))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn num_nodes(&self) -> usize {
        self.class.len()
    }

    #[inline]
    pub fn class(&self, idx: usize) -> NodeClass {
        self.class[idx]
    }

    pub fn cuts(&self, idx: usize) -> &[DirectionCut] {
        &self.cuts[idx]
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim];
        for ax in (0..self.dim).rev() {
            c[ax] = idx % self.shape[ax];
            idx /= self.shape[ax];
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        let mut idx = 0;
        for ax in 0..self.dim {
            idx = idx * self.shape[ax] + coords[ax];
        }
        idx
    }

    pub fn node_pos(&self, idx: usize) -> Vec<f64> {
        self.coords(idx)
            .iter()
            .zip(&self.origin)
            .map(|(c, o)| o + *c as f64 * self.h)
            .collect()
    }

    fn neighbor_of(&self, coords: &[usize], offset: &[i32]) -> Option<usize> {
        let mut c = vec![0usize; self.dim];
        for ax in 0..self.dim {
            let v = coords[ax] as i64 + offset[ax] as i64;
            if v < 0 || v >= self.shape[ax] as i64 {
                return None;
            }
            c[ax] = v as usize;
        }
        Some(self.index(&c))
    }

    pub fn neighbor(&self, idx: usize, offset: &[i32]) -> Option<usize> {
        self.neighbor_of(&self.coords(idx), offset)
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(|&i| self.class[i] == NodeClass::Interior)
    }

    pub fn boundary_adjacent_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(|&i| self.class[i] == NodeClass::BoundaryAdjacent)
    }

    pub fn non_exterior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(|&i| self.class[i] != NodeClass::Exterior)
    }

    /// Number of distinct coordinate values along `axis` that carry at least
    /// one interior node.
    pub fn interior_extent(&self, axis: usize) -> usize {
        let mut seen = vec![false; self.shape[axis]];
        for idx in self.interior_nodes() {
            seen[self.coords(idx)[axis]] = true;
        }
        seen.iter().filter(|b| **b).count()
    }
}

/// All offsets with max-norm 1 (the Moore one-ring), deterministic order.
pub(crate) fn one_ring_offsets(dim: usize) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    let mut off = vec![-1i32; dim];
    loop {
        if off.iter().any(|v| *v != 0) {
            out.push(off.clone());
        }
        let mut ax = dim;
        loop {
            if ax == 0 {
                return out;
            }
            ax -= 1;
            if off[ax] < 1 {
                off[ax] += 1;
                break;
            }
            off[ax] = -1;
        }
    }
}

fn bisect_cut(domain: &ConvexDomain, pos: &[f64], offset: &[i32], h: f64) -> f64 {
    let at = |t: f64| -> Vec<f64> {
        pos.iter()
            .zip(offset)
            .map(|(p, o)| p + t * h * *o as f64)
            .collect()
    };
    debug_assert!(domain.g(pos) < 0.0);
    if domain.g(&at(1.0)) < 0.0 {
        // neighbor is outside the grid but still inside the domain; cannot
        // happen with the margin the grid constructor adds
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if domain.g(&at(mid)) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One axis crossing of the boundary trace of a field.
#[derive(Debug, Clone, Copy)]
pub struct AxisCut {
    pub axis: usize,
    /// +1 or -1: the direction along the axis that leaves the domain.
    pub sign: i32,
    /// Signed distance from the node to the boundary along that direction.
    pub distance: f64,
}

/// Boundary trace entry of a boundary-adjacent node.
#[derive(Debug, Clone)]
pub struct BoundaryTraceEntry {
    pub node: usize,
    pub cuts: Vec<AxisCut>,
    /// Dirichlet value at the crossings.
    pub value: f64,
}

/// Scalar values on the non-exterior nodes of a grid. Exterior nodes hold
/// NaN; every non-exterior value is finite.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    boundary_value: f64,
}

impl ScalarField {
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> ScalarField {
        let values = (0..grid.num_nodes())
            .map(|idx| {
                if grid.class(idx) == NodeClass::Exterior {
                    f64::NAN
                } else {
                    f(&grid.node_pos(idx))
                }
            })
            .collect();
        ScalarField {
            grid,
            values,
            boundary_value: 0.0,
        }
    }

    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> ScalarField {
        assert_eq!(values.len(), grid.num_nodes());
        for idx in grid.non_exterior_nodes() {
            assert!(values[idx].is_finite(), "non-exterior node {idx} not finite");
        }
        ScalarField {
            grid,
            values,
            boundary_value: 0.0,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    #[inline]
    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Per-axis boundary crossings of every boundary-adjacent node together
    /// with the Dirichlet value imposed there.
    pub fn boundary_trace(&self) -> Vec<BoundaryTraceEntry> {
        self.grid
            .boundary_adjacent_nodes()
            .map(|node| {
                let cuts = self
                    .grid
                    .cuts(node)
                    .iter()
                    .filter(|c| c.is_axis())
                    .map(|c| {
                        let axis = c.offset.iter().position(|v| *v != 0).unwrap();
                        AxisCut {
                            axis,
                            sign: c.offset[axis],
                            distance: c.theta * self.grid.spacing(),
                        }
                    })
                    .collect();
                BoundaryTraceEntry {
                    node,
                    cuts,
                    value: self.boundary_value,
                }
            })
            .collect()
    }

    /// Multilinear interpolation. None outside the grid or when a corner of
    /// the containing cell has no value.
    pub fn interpolate(&self, x: &[f64]) -> Option<f64> {
        let g = &self.grid;
        let n = g.dim();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0f64; n];
        for ax in 0..n {
            let t = (x[ax] - g.origin[ax]) / g.h;
            if t < 0.0 || t > (g.shape[ax] - 1) as f64 {
                return None;
            }
            let i = (t.floor() as usize).min(g.shape[ax] - 2);
            base[ax] = i;
            frac[ax] = t - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut c = base.clone();
            let mut w = 1.0;
            for ax in 0..n {
                if corner >> ax & 1 == 1 {
                    c[ax] += 1;
                    w *= frac[ax];
                } else {
                    w *= 1.0 - frac[ax];
                }
            }
            let v = self.values[g.index(&c)];
            if !v.is_finite() {
                if w == 0.0 {
                    continue;
                }
                return None;
            }
            acc += w * v;
        }
        Some(acc)
    }

    /// CSV dump: x1,...,xn,value,classification — one row per non-exterior
    /// node.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        let n = self.grid.dim();
        let cols: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        writeln!(w, "{},value,classification", cols.join(","))?;
        for idx in self.grid.non_exterior_nodes() {
            let pos = self.grid.node_pos(idx);
            let coords: Vec<String> = pos.iter().map(|v| format!("{v}")).collect();
            let class = match self.grid.class(idx) {
                NodeClass::Interior => "interior",
                NodeClass::BoundaryAdjacent => "boundary_adjacent",
                NodeClass::Exterior => unreachable!(),
            };
            writeln!(w, "{},{},{}", coords.join(","), self.values[idx], class)?;
        }
        Ok(())
    }
}

/// Fully symmetric rank-3 tensor of third derivatives; stored dense with all
/// index permutations written on set.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor3 {
    n: usize,
    data: Vec<f64>,
}

impl SymTensor3 {
    pub fn zeros(n: usize) -> Self {
        SymTensor3 {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.n;
        let mut put = |a: usize, b: usize, c: usize| {
            self.data[(a * n + b) * n + c] = v;
        };
        put(i, j, k);
        put(i, k, j);
        put(j, i, k);
        put(j, k, i);
        put(k, i, j);
        put(k, j, i);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, &v| a.max(v.abs()))
    }
}

/// Derivative data of a scalar function at one point.
#[derive(Debug, Clone)]
pub struct PointJet {
    pub position: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: SymMatrix,
    pub inverse_hessian: SymMatrix,
    pub third: Option<SymTensor3>,
}

impl PointJet {
    /// Assembles a jet, inverting the Hessian. Errors when the smallest
    /// Hessian eigenvalue is below 1e-10.
    pub fn new(
        position: Vec<f64>,
        value: f64,
        gradient: Vec<f64>,
        hessian: SymMatrix,
        third: Option<SymTensor3>,
    ) -> Result<PointJet> {
        let min_eig = hessian.eigenvalues()[0];
        if min_eig < SINGULAR_HESSIAN_TOL {
            return Err(Error::SingularHessian { min_eig });
        }
        let inverse_hessian = invert_spd(&hessian)?;
        Ok(PointJet {
            position,
            value,
            gradient,
            hessian,
            inverse_hessian,
            third,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn gradient_norm(&self) -> f64 {
        self.gradient.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn third(&self) -> Result<&SymTensor3> {
        self.third.as_ref().ok_or(Error::MissingThirdDerivatives)
    }
}

/// Jet order: second derivatives, or second and third.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOrder {
    Second,
    Third,
}

/// Central-difference jet at a node. Second-order accurate on full stencils;
/// exact on quadratics (cubics for the third-derivative stencils). Errors
/// with `StencilUnavailable` when any required stencil point is exterior.
pub fn jet_at(field: &ScalarField, node: usize, order: JetOrder) -> Result<PointJet> {
    let grid = field.grid();
    let n = grid.dim();
    let h = grid.spacing();
    let coords = grid.coords(node);

    let fetch = |off: &[i32]| -> Result<f64> {
        let idx = grid
            .neighbor_of(&coords, off)
            .ok_or(Error::StencilUnavailable { node })?;
        let v = field.get(idx);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::StencilUnavailable { node })
        }
    };

    let u0 = field.get(node);
    if !u0.is_finite() {
        return Err(Error::StencilUnavailable { node });
    }

    let mut gradient = vec![0.0; n];
    let mut hessian = SymMatrix::zeros(n);
    let mut off = vec![0i32; n];
    for i in 0..n {
        off[i] = 1;
        let up = fetch(&off)?;
        off[i] = -1;
        let um = fetch(&off)?;
        off[i] = 0;
        gradient[i] = (up - um) / (2.0 * h);
        hessian.set(i, i, (up - 2.0 * u0 + um) / (h * h));
        for j in (i + 1)..n {
            let mut corner = |si: i32, sj: i32| -> Result<f64> {
                off[i] = si;
                off[j] = sj;
                let v = fetch(&off);
                off[i] = 0;
                off[j] = 0;
                v
            };
            let v = (corner(1, 1)? + corner(-1, -1)? - corner(1, -1)? - corner(-1, 1)?)
                / (4.0 * h * h);
            hessian.set(i, j, v);
        }
    }

    let third = if order == JetOrder::Third {
        let mut t = SymTensor3::zeros(n);
        let h3 = h * h * h;
        for i in 0..n {
            off[i] = 2;
            let u2p = fetch(&off)?;
            off[i] = 1;
            let u1p = fetch(&off)?;
            off[i] = -1;
            let u1m = fetch(&off)?;
            off[i] = -2;
            let u2m = fetch(&off)?;
            off[i] = 0;
            t.set_sym(i, i, i, (u2p - 2.0 * u1p + 2.0 * u1m - u2m) / (2.0 * h3));
            // u_iij: second difference in i, first central difference in j
            for j in 0..n {
                if j == i {
                    continue;
                }
                let mut at = |si: i32, sj: i32| -> Result<f64> {
                    off[i] = si;
                    off[j] = sj;
                    let v = fetch(&off);
                    off[i] = 0;
                    off[j] = 0;
                    v
                };
                let dplus = at(1, 1)? - 2.0 * at(0, 1)? + at(-1, 1)?;
                let dminus = at(1, -1)? - 2.0 * at(0, -1)? + at(-1, -1)?;
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                // indices (i,i,j) sorted
                let (p, q, r) = if i <= j { (a, a, b) } else { (a, b, b) };
                t.set_sym(p, q, r, (dplus - dminus) / (2.0 * h3));
            }
        }
        if n == 3 {
            // u_123: the four-corner mixed stencil differenced along the
            // remaining axis
            let at = |s: [i32; 3]| -> Result<f64> {
                let o = [s[0], s[1], s[2]];
                fetch(&o)
            };
            let mixed_p = at([1, 1, 1])? + at([1, -1, -1])? - at([1, 1, -1])? - at([1, -1, 1])?;
            let mixed_m =
                at([-1, 1, 1])? + at([-1, -1, -1])? - at([-1, 1, -1])? - at([-1, -1, 1])?;
            t.set_sym(0, 1, 2, (mixed_p - mixed_m) / (8.0 * h3));
        }
        Some(t)
    } else {
        None
    };

    PointJet::new(grid.node_pos(node), u0, gradient, hessian, third)
}

/// Second-order jet with one-sided fallbacks near the boundary: gradient
/// falls back to the three-point one-sided formula (still second order, then
/// two-point first order), pure second derivatives to the shifted three-point
/// formula (first order), mixed entries to the first available corner
/// orientation (first order).
pub fn jet_at_one_sided(field: &ScalarField, node: usize) -> Result<PointJet> {
    if let Ok(jet) = jet_at(field, node, JetOrder::Second) {
        return Ok(jet);
    }
    let grid = field.grid();
    let n = grid.dim();
    let h = grid.spacing();
    let coords = grid.coords(node);
    let fetch = |off: &[i32]| -> Option<f64> {
        let idx = grid.neighbor_of(&coords, off)?;
        let v = field.get(idx);
        v.is_finite().then_some(v)
    };
    let u0 = field.get(node);
    if !u0.is_finite() {
        return Err(Error::StencilUnavailable { node });
    }

    let axis = |i: usize, s: i32| {
        let mut o = vec![0i32; n];
        o[i] = s;
        o
    };
    let mut gradient = vec![0.0; n];
    let mut hessian = SymMatrix::zeros(n);
    for i in 0..n {
        let up = fetch(&axis(i, 1));
        let um = fetch(&axis(i, -1));
        let up2 = fetch(&axis(i, 2));
        let um2 = fetch(&axis(i, -2));
        gradient[i] = match (up, um) {
            (Some(p), Some(m)) => (p - m) / (2.0 * h),
            (Some(p), None) => match up2 {
                Some(p2) => (-3.0 * u0 + 4.0 * p - p2) / (2.0 * h),
                None => (p - u0) / h,
            },
            (None, Some(m)) => match um2 {
                Some(m2) => (3.0 * u0 - 4.0 * m + m2) / (2.0 * h),
                None => (u0 - m) / h,
            },
            (None, None) => return Err(Error::StencilUnavailable { node }),
        };
        hessian.set(
            i,
            i,
            match (up, um) {
                (Some(p), Some(m)) => (p - 2.0 * u0 + m) / (h * h),
                (Some(p), None) => {
                    let p2 = up2.ok_or(Error::StencilUnavailable { node })?;
                    (u0 - 2.0 * p + p2) / (h * h)
                }
                (None, Some(m)) => {
                    let m2 = um2.ok_or(Error::StencilUnavailable { node })?;
                    (u0 - 2.0 * m + m2) / (h * h)
                }
                (None, None) => return Err(Error::StencilUnavailable { node }),
            },
        );
        for j in (i + 1)..n {
            let corner = |si: i32, sj: i32| {
                let mut o = vec![0i32; n];
                o[i] = si;
                o[j] = sj;
                fetch(&o)
            };
            let central = (|| {
                Some(
                    (corner(1, 1)? + corner(-1, -1)? - corner(1, -1)? - corner(-1, 1)?)
                        / (4.0 * h * h),
                )
            })();
            let v = central.or_else(|| {
                // one-sided corner orientations
                for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    let c = corner(si, sj);
                    let ei = fetch(&axis(i, si));
                    let ej = fetch(&axis(j, sj));
                    if let (Some(c), Some(ei), Some(ej)) = (c, ei, ej) {
                        return Some((c - ei - ej + u0) / (si as f64 * sj as f64 * h * h));
                    }
                }
                None
            });
            hessian.set(i, j, v.ok_or(Error::StencilUnavailable { node })?);
        }
    }
    PointJet::new(grid.node_pos(node), u0, gradient, hessian, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexDomain;
    use proptest::prelude::*;

    fn disk_grid(nodes: usize) -> Arc<Grid> {
        let ball = ConvexDomain::ball(vec![0.0, 0.0], 1.0).unwrap();
        Grid::from_domain(&ball, nodes).unwrap()
    }

    #[test]
    fn classification_consistent_with_contains() {
        let ball = ConvexDomain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let grid = Grid::from_domain(&ball, 33).unwrap();
        for idx in 0..grid.num_nodes() {
            let inside = ball.contains(&grid.node_pos(idx));
            match grid.class(idx) {
                NodeClass::Exterior => assert!(!inside),
                _ => assert!(inside),
            }
        }
        assert!(grid.interior_nodes().count() > 0);
        assert!(grid.boundary_adjacent_nodes().count() > 0);
    }

    #[test]
    fn boundary_cuts_bracket_the_boundary() {
        let ball = ConvexDomain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let grid = Grid::from_domain(&ball, 33).unwrap();
        let h = grid.spacing();
        for idx in grid.boundary_adjacent_nodes() {
            let pos = grid.node_pos(idx);
            for cut in grid.cuts(idx) {
                assert!(cut.theta > 0.0 && cut.theta <= 1.0);
                let x: Vec<f64> = pos
                    .iter()
                    .zip(&cut.offset)
                    .map(|(p, o)| p + cut.theta * h * *o as f64)
                    .collect();
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                assert!((r - 1.0).abs() < 1e-12, "cut point off the circle: r = {r}");
            }
        }
    }

    #[test]
    fn jet_linear_function_is_exact() {
        let grid = disk_grid(33);
        let f = ScalarField::from_fn(grid.clone(), |x| x[0]);
        let node = grid.interior_nodes().next().unwrap();
        let jet = jet_at(&f, node, JetOrder::Second);
        // Hessian of a linear function is singular; the jet must refuse it
        assert!(matches!(jet, Err(Error::SingularHessian { .. })));
    }

    #[test]
    fn jet_quadratic_is_exact() {
        let grid = disk_grid(33);
        let f = ScalarField::from_fn(grid.clone(), |x| {
            0.5 * (x[0] * x[0] + x[1] * x[1]) + 3.0 * x[0] - 0.25 * x[1] + 0.125 * x[0] * x[1]
        });
        let mut seen = 0;
        for node in grid.interior_nodes() {
            // order-3 stencils also need the ±2 axis points
            let Ok(jet) = jet_at(&f, node, JetOrder::Third) else {
                continue;
            };
            seen += 1;
            let p = &jet.position;
            assert!((jet.gradient[0] - (p[0] + 3.0 + 0.125 * p[1])).abs() < 1e-12);
            assert!((jet.gradient[1] - (p[1] - 0.25 + 0.125 * p[0])).abs() < 1e-12);
            assert!((jet.hessian.get(0, 0) - 1.0).abs() < 1e-11);
            assert!((jet.hessian.get(1, 1) - 1.0).abs() < 1e-11);
            assert!((jet.hessian.get(0, 1) - 0.125).abs() < 1e-11);
            assert!(jet.third.as_ref().unwrap().max_abs() < 1e-9);
        }
        assert!(seen > 50, "too few order-3 jets: {seen}");
    }

    #[test]
    fn jet_cubic_third_derivative() {
        // f = x^3 + y^2: differentiating the closed form gives the constant
        // u_111 = 6, and the symmetric stencil reproduces it exactly
        let grid = disk_grid(21); // h = 0.1
        let f = ScalarField::from_fn(grid.clone(), |x| x[0] * x[0] * x[0] + x[1] * x[1]);
        let mut seen = 0;
        for node in grid.interior_nodes() {
            let Ok(jet) = jet_at(&f, node, JetOrder::Third) else {
                continue;
            };
            seen += 1;
            let t = jet.third.as_ref().unwrap();
            assert!(
                (t.get(0, 0, 0) - 6.0).abs() < 1e-9,
                "u_111 = {} at x1 = {}",
                t.get(0, 0, 0),
                jet.position[0]
            );
            assert!(t.get(0, 0, 1).abs() < 1e-9);
            assert!(t.get(0, 1, 1).abs() < 1e-9);
            assert!(t.get(1, 1, 1).abs() < 1e-9);
        }
        assert!(seen > 0);

        // spatially varying check: u_111 of x^4 is 24x, also exact here
        let f = ScalarField::from_fn(grid.clone(), |x| x[0].powi(4) + x[1] * x[1]);
        for node in grid.interior_nodes() {
            let Ok(jet) = jet_at(&f, node, JetOrder::Third) else {
                continue;
            };
            let t = jet.third.as_ref().unwrap();
            let expect = 24.0 * jet.position[0];
            assert!(
                (t.get(0, 0, 0) - expect).abs() < 1e-8,
                "u_111 = {} vs {expect}",
                t.get(0, 0, 0)
            );
        }
    }

    #[test]
    fn jet_refinement_is_second_order() {
        // smooth non-polynomial field: errors must shrink by ~4 per doubling
        let f = |x: &[f64]| (x[0] * 1.3).sin() * (0.9 * x[1]).cos() + 0.7 * x[0] * x[0];
        let exact_h11 = |x: &[f64]| -(1.3f64 * 1.3) * (x[0] * 1.3).sin() * (0.9 * x[1]).cos() + 1.4;
        let mut errs = Vec::new();
        for nodes in [33, 65, 129] {
            let grid = disk_grid(nodes);
            let fld = ScalarField::from_fn(grid.clone(), f);
            let mut worst = 0.0f64;
            for node in grid.interior_nodes() {
                let Ok(jet) = jet_at(&fld, node, JetOrder::Second) else {
                    continue;
                };
                let e = (jet.hessian.get(0, 0) - exact_h11(&jet.position)).abs();
                worst = worst.max(e);
            }
            errs.push(worst);
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(
                (3.5..=4.5).contains(&ratio),
                "second-derivative refinement ratio {ratio} outside [3.5, 4.5]: {errs:?}"
            );
        }
    }

    #[test]
    fn jet_stencil_unavailable_near_boundary() {
        let grid = disk_grid(33);
        let f = ScalarField::from_fn(grid.clone(), |x| x[0] * x[0] + x[1] * x[1]);
        let ba = grid.boundary_adjacent_nodes().next().unwrap();
        assert!(matches!(
            jet_at(&f, ba, JetOrder::Second),
            Err(Error::StencilUnavailable { .. })
        ));
    }

    #[test]
    fn one_sided_jet_recovers_quadratic_gradient() {
        let grid = disk_grid(33);
        let f = ScalarField::from_fn(grid.clone(), |x| {
            0.5 * (2.0 * x[0] * x[0] + x[1] * x[1]) - 0.3 * x[0]
        });
        let mut checked = 0;
        for node in grid.boundary_adjacent_nodes() {
            let Ok(jet) = jet_at_one_sided(&f, node) else {
                continue;
            };
            let p = &jet.position;
            // one-sided three-point gradients stay exact on quadratics
            assert!(
                (jet.gradient[0] - (2.0 * p[0] - 0.3)).abs() < 1e-10,
                "gradient {} vs {}",
                jet.gradient[0],
                2.0 * p[0] - 0.3
            );
            assert!((jet.gradient[1] - p[1]).abs() < 1e-10);
            checked += 1;
        }
        assert!(checked > 0, "no boundary-adjacent jets were computable");
    }

    #[test]
    fn interpolation_reproduces_linear_fields() {
        let grid = disk_grid(33);
        let f = ScalarField::from_fn(grid.clone(), |x| 2.0 * x[0] - 0.5 * x[1] + 0.25);
        for (x, y) in [(0.1, 0.2), (-0.33, 0.47), (0.0, 0.0), (0.505, -0.505)] {
            let v = f.interpolate(&[x, y]).unwrap();
            assert!((v - (2.0 * x - 0.5 * y + 0.25)).abs() < 1e-12);
        }
        assert!(f.interpolate(&[50.0, 0.0]).is_none());
    }

    #[test]
    fn csv_dump_row_per_non_exterior_node() {
        let grid = disk_grid(17);
        let f = ScalarField::from_fn(grid.clone(), |x| x[0]);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows = text.lines().count() - 1;
        assert_eq!(rows, grid.non_exterior_nodes().count());
        assert!(text.starts_with("x1,x2,value,classification"));
        assert!(text.contains("interior"));
        assert!(text.contains("boundary_adjacent"));
    }

    #[test]
    fn boundary_trace_distances_match_cuts() {
        let grid = disk_grid(33);
        let f = ScalarField::from_fn(grid.clone(), |x| x[0] * x[0] + x[1] * x[1] - 1.0);
        let trace = f.boundary_trace();
        assert!(!trace.is_empty());
        for entry in &trace {
            assert_eq!(f.grid().class(entry.node), NodeClass::BoundaryAdjacent);
            assert_eq!(entry.value, 0.0);
            for cut in &entry.cuts {
                assert!(cut.distance > 0.0 && cut.distance <= grid.spacing());
                assert!(cut.sign == 1 || cut.sign == -1);
                assert!(cut.axis < 2);
            }
        }
    }

    proptest! {
        // gradient/Hessian exactness on random quadratics, as required of
        // central differences
        #[test]
        fn jets_exact_on_random_quadratics(
            a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0,
            d in -1.0f64..1.0, e in -1.0f64..1.0,
        ) {
            let grid = disk_grid(17);
            let f = ScalarField::from_fn(grid.clone(), |x| {
                (a + 1.5) * x[0] * x[0] + (b + 1.5) * x[1] * x[1] + c * x[0] * x[1]
                    + d * x[0] + e * x[1]
            });
            for node in grid.interior_nodes().take(8) {
                if let Ok(jet) = jet_at(&f, node, JetOrder::Second) {
                    let p = &jet.position;
                    prop_assert!((jet.gradient[0]
                        - (2.0 * (a + 1.5) * p[0] + c * p[1] + d)).abs() < 1e-10);
                    prop_assert!((jet.hessian.get(0, 1) - c).abs() < 1e-10);
                    prop_assert!((jet.hessian.get(0, 0) - 2.0 * (a + 1.5)).abs() < 1e-10);
                }
            }
        }
    }
}
