//! Elementary symmetric functions of symmetric matrices and the small dense
//! linear algebra built on them: σ_k from characteristic-polynomial
//! coefficients, the derivative matrices ∂σ_k/∂w_ij (Newton transformations,
//! adjugate for k = n), Newton's inequality margin, and SPD inversion.
//!
//! σ_k is never computed through an eigendecomposition: closed forms cover
//! n ≤ 3 and Faddeev-LeVerrier covers the rest, so derivative checks are free
//! of eigenvalue-ordering noise.

use crate::error::{Error, Result};

/// Relative pivot threshold for the Cholesky positive-definiteness test.
const PD_PIVOT_REL: f64 = 1e-12;

/// Symmetric n×n matrix. Only the upper triangle is stored, so symmetry is
/// exact by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        SymMatrix {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds from full rows; the strict lower triangle is ignored.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            assert_eq!(rows[i].len(), n, "row {i} has wrong length");
            for j in i..n {
                m.set(i, j, rows[i][j]);
            }
        }
        m
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + j
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Quadratic form Σ_{i,j} w_ij v_i v_j.
    pub fn qform(&self, v: &[f64]) -> f64 {
        assert_eq!(v.len(), self.n);
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.get(i, i) * v[i] * v[i];
            for j in (i + 1)..self.n {
                s += 2.0 * self.get(i, j) * v[i] * v[j];
            }
        }
        s
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Product with another polynomial in the same matrix (the result is
    /// symmetric because the factors commute). Used by the Newton
    /// transformation recurrence.
    fn mul_commuting(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, &v| a.max(v.abs()))
    }

    /// Eigenvalues in ascending order. Closed forms for n ≤ 3, cyclic Jacobi
    /// otherwise.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eig = match self.n {
            1 => vec![self.get(0, 0)],
            2 => {
                let (a, b, c) = (self.get(0, 0), self.get(0, 1), self.get(1, 1));
                let mean = 0.5 * (a + c);
                let disc = (0.5 * (a - c)).hypot(b);
                vec![mean - disc, mean + disc]
            }
            3 => self.eigenvalues3(),
            _ => self.eigenvalues_jacobi(),
        };
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eig
    }

    /// Trigonometric closed form for symmetric 3×3 eigenvalues.
    fn eigenvalues3(&self) -> Vec<f64> {
        let (a11, a22, a33) = (self.get(0, 0), self.get(1, 1), self.get(2, 2));
        let (a12, a13, a23) = (self.get(0, 1), self.get(0, 2), self.get(1, 2));
        let p1 = a12 * a12 + a13 * a13 + a23 * a23;
        if p1 == 0.0 {
            return vec![a11, a22, a33];
        }
        let q = (a11 + a22 + a33) / 3.0;
        let p2 = (a11 - q).powi(2) + (a22 - q).powi(2) + (a33 - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        // B = (A - qI)/p
        let b = |x: f64| x / p;
        let (b11, b22, b33) = (b(a11 - q), b(a22 - q), b(a33 - q));
        let (b12, b13, b23) = (b(a12), b(a13), b(a23));
        let detb = b11 * (b22 * b33 - b23 * b23) - b12 * (b12 * b33 - b23 * b13)
            + b13 * (b12 * b23 - b22 * b13);
        let r = (detb / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        let e2 = 3.0 * q - e1 - e3;
        vec![e1, e2, e3]
    }

    fn eigenvalues_jacobi(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = self.get(i, j);
            }
        }
        let scale = self.max_abs().max(1e-300);
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off.max(a[i * n + j].abs());
                }
            }
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[i * n + i]).collect()
    }

    /// Cholesky positive-definiteness test: factorization succeeds with every
    /// pivot above `PD_PIVOT_REL` times the largest diagonal entry.
    pub fn is_positive_definite(&self) -> bool {
        self.cholesky_lower().is_some()
    }

    fn cholesky_lower(&self) -> Option<Vec<f64>> {
        let n = self.n;
        let max_diag = (0..n).fold(0.0f64, |m, i| m.max(self.get(i, i)));
        if max_diag <= 0.0 {
            return None;
        }
        let tol = PD_PIVOT_REL * max_diag;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= tol {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Some(l)
    }
}

/// All elementary symmetric functions σ_0..σ_n of the eigenvalues, computed
/// from characteristic-polynomial coefficients.
pub fn sigma_all(w: &SymMatrix) -> Vec<f64> {
    let n = w.dim();
    match n {
        1 => vec![1.0, w.get(0, 0)],
        2 => {
            let (a, b, c) = (w.get(0, 0), w.get(0, 1), w.get(1, 1));
            vec![1.0, a + c, a * c - b * b]
        }
        3 => {
            let (a11, a22, a33) = (w.get(0, 0), w.get(1, 1), w.get(2, 2));
            let (a12, a13, a23) = (w.get(0, 1), w.get(0, 2), w.get(1, 2));
            let s1 = a11 + a22 + a33;
            let s2 = a11 * a22 + a11 * a33 + a22 * a33 - a12 * a12 - a13 * a13 - a23 * a23;
            let s3 = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13)
                + a13 * (a12 * a23 - a22 * a13);
            vec![1.0, s1, s2, s3]
        }
        _ => {
            // Faddeev-LeVerrier. With M_1 = I and M_{k+1} = W·M_k + (-1)^k σ_k I,
            // the coefficients of det(λI - W) give σ_k = (-1)^{k+1} tr(W·M_k)/k.
            let mut sig = vec![1.0];
            let mut m = SymMatrix::identity(n);
            for k in 1..=n {
                let p = w.mul_commuting(&m);
                let sgn = if k % 2 == 1 { 1.0 } else { -1.0 };
                let sk = sgn * p.trace() / k as f64;
                sig.push(sk);
                if k < n {
                    let mut next = p;
                    let shift = if k % 2 == 0 { sk } else { -sk };
                    for i in 0..n {
                        next.add_to(i, i, shift);
                    }
                    m = next;
                }
            }
            sig
        }
    }
}

/// k-th elementary symmetric function of the eigenvalues of `w`.
/// σ_0 = 1, σ_n = det.
pub fn sigma_k(w: &SymMatrix, k: usize) -> f64 {
    assert!(k <= w.dim(), "sigma index {k} out of range for n = {}", w.dim());
    sigma_all(w)[k]
}

/// Determinant (σ_n).
pub fn det(w: &SymMatrix) -> f64 {
    sigma_k(w, w.dim())
}

/// The derivative matrix ∂σ_k(W)/∂w_ij, i.e. the (k-1)-st Newton
/// transformation T_{k-1}(W) = σ_{k-1} I - W T_{k-2}. For k = 1 this is the
/// identity, for k = 2 it is (tr W) I - W, and for k = n it is the adjugate.
pub fn sigma_k_gradient(w: &SymMatrix, k: usize) -> SymMatrix {
    let n = w.dim();
    assert!(k >= 1 && k <= n, "gradient index {k} out of range for n = {n}");
    let sig = sigma_all(w);
    let mut t = SymMatrix::identity(n); // T_0
    for m in 1..k {
        let wt = w.mul_commuting(&t);
        let mut next = wt.scale(-1.0);
        for i in 0..n {
            next.add_to(i, i, sig[m]);
        }
        t = next;
    }
    t
}

/// Adjugate (cofactor) matrix, ∂(det W)/∂W. Equals W⁻¹ when det W = 1.
pub fn adjugate(w: &SymMatrix) -> SymMatrix {
    sigma_k_gradient(w, w.dim())
}

/// Newton's inequality margin σ₂(W) - C(n,2)·σ_n(W)^{2/n} for positive
/// definite W. Nonnegative always; zero exactly when all eigenvalues agree.
/// For n = 2 it is identically zero because σ₂ = σ_n.
pub fn newton_margin(w: &SymMatrix) -> Result<f64> {
    if !w.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = w.dim();
    let sig = sigma_all(w);
    let binom = (n * (n - 1) / 2) as f64;
    Ok(sig[2] - binom * sig[n].powf(2.0 / n as f64))
}

/// Inverse of a positive definite matrix. Closed-form adjugate/det for n ≤ 3,
/// Cholesky otherwise.
pub fn invert_spd(w: &SymMatrix) -> Result<SymMatrix> {
    let n = w.dim();
    let l = w.cholesky_lower().ok_or(Error::NotPositiveDefinite)?;
    if n <= 3 {
        let d = det(w);
        return Ok(adjugate(w).scale(1.0 / d));
    }
    // Solve W x = e_j column by column through the Cholesky factor.
    let mut inv = SymMatrix::zeros(n);
    for j in 0..n {
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = if i == j { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k * n + i] * x[k];
            }
            x[i] = s / l[i * n + i];
        }
        for i in j..n {
            inv.set(j, i, x[i]);
        }
    }
    Ok(inv)
}

/// Full contraction Σ_{i,j} a_ij b_ij (off-diagonal terms counted twice).
pub fn contract(a: &SymMatrix, b: &SymMatrix) -> f64 {
    assert_eq!(a.dim(), b.dim());
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        s += a.get(i, i) * b.get(i, i);
        for j in (i + 1)..n {
            s += 2.0 * a.get(i, j) * b.get(i, j);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    #[test]
    fn sigma_identity_3x3() {
        let w = SymMatrix::identity(3);
        assert_close(sigma_k(&w, 0), 1.0, 0.0);
        assert_close(sigma_k(&w, 1), 3.0, 0.0);
        assert_close(sigma_k(&w, 2), 3.0, 0.0);
        assert_close(sigma_k(&w, 3), 1.0, 0.0);
    }

    #[test]
    fn sigma_diagonal_cases() {
        let w = SymMatrix::from_diag(&[2.0, 0.5]);
        assert_close(sigma_k(&w, 2), 1.0, 1e-15);
        let w = SymMatrix::from_diag(&[2.0, 1.0, 0.5]);
        assert_close(sigma_k(&w, 2), 3.5, 1e-14);
        assert_close(sigma_k(&w, 3), 1.0, 1e-15);
    }

    #[test]
    fn sigma_general_n_matches_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = 4;
            let mut w = SymMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    w.set(i, j, rng.gen_range(-1.0..1.0));
                }
                w.add_to(i, i, 3.0);
            }
            let eig = w.eigenvalues();
            // elementary symmetric functions of the eigenvalues, brute force
            let mut esf = vec![0.0; n + 1];
            esf[0] = 1.0;
            for &lam in &eig {
                for k in (1..=n).rev() {
                    esf[k] += esf[k - 1] * lam;
                }
            }
            let sig = sigma_all(&w);
            for k in 0..=n {
                assert_close(sig[k], esf[k], 1e-10 * esf[k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn gradient_sigma2_paper_case() {
        // b^{kk} = sum of the other diagonal entries, b^{kl} = -w_{kl}
        let w = SymMatrix::from_diag(&[1.0, 2.0, 3.0]);
        let g = sigma_k_gradient(&w, 2);
        assert_close(g.get(0, 0), 5.0, 0.0);
        assert_close(g.get(1, 1), 4.0, 0.0);
        assert_close(g.get(2, 2), 3.0, 0.0);
        let mut w = SymMatrix::from_diag(&[1.0, 2.0, 3.0]);
        w.set(0, 1, 0.25);
        let g = sigma_k_gradient(&w, 2);
        assert_close(g.get(0, 1), -0.25, 0.0);
    }

    #[test]
    fn gradient_sigma_n_is_adjugate() {
        let w = SymMatrix::from_diag(&[2.0, 0.5]);
        let g = sigma_k_gradient(&w, 2);
        assert_close(g.get(0, 0), 0.5, 0.0);
        assert_close(g.get(1, 1), 2.0, 0.0);
        assert_close(g.get(0, 1), 0.0, 0.0);
    }

    #[test]
    fn gradient_sigma1_is_identity() {
        let w = SymMatrix::from_rows(&[vec![3.0, -1.0], vec![-1.0, 2.0]]);
        let g = sigma_k_gradient(&w, 1);
        assert_close(g.get(0, 0), 1.0, 0.0);
        assert_close(g.get(1, 1), 1.0, 0.0);
        assert_close(g.get(0, 1), 0.0, 0.0);
    }

    #[test]
    fn newton_margin_cases() {
        for n in 2..=4 {
            assert_close(newton_margin(&SymMatrix::identity(n)).unwrap(), 0.0, 1e-15);
        }
        let w = SymMatrix::from_diag(&[2.0, 1.0, 0.5]);
        assert_close(newton_margin(&w).unwrap(), 0.5, 1e-13);
        // n = 2: sigma_2 = det, so the margin vanishes identically
        let w = SymMatrix::from_diag(&[5.0, 0.2]);
        assert_close(newton_margin(&w).unwrap(), 0.0, 0.0);
        let not_pd = SymMatrix::from_diag(&[1.0, -1.0]);
        assert!(matches!(newton_margin(&not_pd), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn newton_margin_random_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..10_000 {
            let n = if trial % 2 == 0 { 2 } else { 3 };
            let mut b = vec![vec![0.0; n]; n];
            for row in b.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.gen_range(-1.0..1.0);
                }
            }
            // W = B^T B + 0.01 I is positive definite
            let mut w = SymMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let mut s = if i == j { 0.01 } else { 0.0 };
                    for k in 0..n {
                        s += b[k][i] * b[k][j];
                    }
                    w.set(i, j, s);
                }
            }
            let m = newton_margin(&w).unwrap();
            assert!(m >= -1e-12, "margin {m} negative beyond tolerance (trial {trial})");
            if n == 3 {
                let eig = w.eigenvalues();
                let spread = eig[n - 1] - eig[0];
                if m < 1e-12 {
                    assert!(spread < 1e-8, "tiny margin {m} with spread {spread}");
                }
            }
        }
        // equality direction: a near-scalar matrix has a tiny margin
        let mut w = SymMatrix::identity(3);
        w.set(0, 1, 1e-9);
        let m = newton_margin(&w).unwrap();
        assert!(m < 1e-12, "near-equal eigenvalues should give margin < 1e-12, got {m}");
    }

    #[test]
    fn invert_spd_cases() {
        let inv = invert_spd(&SymMatrix::identity(3)).unwrap();
        for i in 0..3 {
            assert_close(inv.get(i, i), 1.0, 1e-15);
        }
        let inv = invert_spd(&SymMatrix::from_diag(&[2.0, 0.5])).unwrap();
        assert_close(inv.get(0, 0), 0.5, 1e-15);
        assert_close(inv.get(1, 1), 2.0, 1e-15);
        let w = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]);
        let inv = invert_spd(&w).unwrap();
        assert_close(inv.get(0, 0), 1.0, 1e-14);
        assert_close(inv.get(0, 1), -1.0, 1e-14);
        assert_close(inv.get(1, 1), 2.0, 1e-14);
        assert!(invert_spd(&SymMatrix::from_diag(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn invert_spd_large_n_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 5;
        let mut w = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                w.set(i, j, rng.gen_range(-0.2..0.2));
            }
            w.add_to(i, i, 2.0);
        }
        let inv = invert_spd(&w).unwrap();
        for i in 0..n {
            let col: Vec<f64> = (0..n).map(|j| inv.get(j, i)).collect();
            let e = w.apply(&col);
            for (j, v) in e.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_close(*v, expect, 1e-12);
            }
        }
    }

    fn sym_strategy(n: usize) -> impl Strategy<Value = SymMatrix> {
        proptest::collection::vec(-1.0f64..1.0, n * (n + 1) / 2).prop_map(move |vals| {
            let mut w = SymMatrix::zeros(n);
            let mut it = vals.into_iter();
            for i in 0..n {
                for j in i..n {
                    w.set(i, j, it.next().unwrap());
                }
                // diagonal dominance keeps the matrix positive definite
                w.add_to(i, i, 2.5);
            }
            w
        })
    }

    proptest! {
        // Central finite differences of sigma_k against the analytic gradient.
        // Perturbing a stored off-diagonal entry moves both w_ij and w_ji, so
        // the difference quotient equals twice the gradient entry there.
        #[test]
        fn gradient_matches_finite_differences(w in sym_strategy(3), k in 1usize..=3) {
            let g = sigma_k_gradient(&w, k);
            let eps = 1e-4;
            for i in 0..3 {
                for j in i..3 {
                    let mut wp = w.clone();
                    wp.set(i, j, w.get(i, j) + eps);
                    let mut wm = w.clone();
                    wm.set(i, j, w.get(i, j) - eps);
                    let fd = (sigma_k(&wp, k) - sigma_k(&wm, k)) / (2.0 * eps);
                    let factor = if i == j { 1.0 } else { 2.0 };
                    prop_assert!((fd - factor * g.get(i, j)).abs() < 1e-6,
                        "entry ({i},{j}): fd {fd} vs gradient {}", factor * g.get(i, j));
                }
            }
        }

        // Adjugate identity at unit determinant: grad(sigma_n) W = I.
        #[test]
        fn adjugate_identity_at_unit_det(w in sym_strategy(3)) {
            let d = det(&w);
            prop_assume!(d > 1e-6);
            let w1 = w.scale(1.0 / d.powf(1.0 / 3.0));
            let adj = sigma_k_gradient(&w1, 3);
            let prod = adj.mul_commuting(&w1);
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((prod.get(i, j) - expect).abs() < 1e-10);
                }
            }
        }

        // Degree-2 homogeneity of sigma_2: contracting the gradient with W
        // recovers 2 sigma_2.
        #[test]
        fn sigma2_euler_relation(w in sym_strategy(3)) {
            let b = sigma_k_gradient(&w, 2);
            let lhs = contract(&b, &w);
            prop_assert!((lhs - 2.0 * sigma_k(&w, 2)).abs() < 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn eigenvalue_orderings() {
        let e = SymMatrix::from_diag(&[3.0, 1.0, 2.0]).eigenvalues();
        assert_eq!(e, vec![1.0, 2.0, 3.0]);
        let w = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let e = w.eigenvalues();
        assert_close(e[0], 1.0, 1e-14);
        assert_close(e[1], 3.0, 1e-14);
    }
}
