//! Dense symmetric linear algebra sized for local curvature computations.
//!
//! Matrix orders here are tiny (a 2-ball around a vertex), so everything is
//! dense and exact-ish: a cyclic Jacobi eigensolver, Cholesky, Schur
//! complements, and generalized eigenvalues via congruence. All tolerance
//! decisions are *relative* to a matrix scale and centralized in
//! [`Tolerances`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix rows do not form a symmetric square matrix")]
    NotSymmetric,
    #[error("Jacobi sweep limit reached without convergence (off-norm {off:.3e} after {sweeps} sweeps)")]
    NoConvergence { off: f64, sweeps: usize },
    #[error("trailing block is not positive definite; Schur complement undefined")]
    SingularTrailingBlock,
    #[error("right-hand matrix of the pencil is not positive definite")]
    BNotDefinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid tolerance configuration: {0}")]
    BadTolerances(String),
}

/// Relative tolerances used by every numeric decision in the crate.
///
/// All thresholds scale with the matrix at hand (Frobenius norm or spectral
/// radius), never with an absolute constant, so curvature computations behave
/// identically for a graph and a scaled copy of its weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Jacobi convergence: off-diagonal norm relative to the Frobenius norm.
    pub eig_tol: f64,
    /// Positive-semidefiniteness slack relative to matrix scale.
    pub psd_tol: f64,
    /// Eigenvalues within this fraction of the spectral radius count as zero.
    pub zero_mult_tol: f64,
    /// Absolute width at which curvature bisection stops.
    pub bisect_tol: f64,
    /// Agreement required between independent computation routes.
    pub agree_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eig_tol: 1e-11,
            psd_tol: 1e-9,
            zero_mult_tol: 1e-8,
            bisect_tol: 1e-9,
            agree_tol: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), LinalgError> {
        let fields = [
            ("eig_tol", self.eig_tol),
            ("psd_tol", self.psd_tol),
            ("zero_mult_tol", self.zero_mult_tol),
            ("bisect_tol", self.bisect_tol),
            ("agree_tol", self.agree_tol),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(LinalgError::BadTolerances(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Dense symmetric matrix in full row-major storage.
///
/// All mutating operations preserve symmetry by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from explicit rows; fails unless the rows form a symmetric
    /// square matrix (entries must match exactly).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::NotSymmetric);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(LinalgError::NotSymmetric);
                }
            }
        }
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            a.extend_from_slice(r);
        }
        Ok(SymMatrix { n, a })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Sets entry `(i, j)` and its mirror.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    /// Adds to entry `(i, j)` and its mirror.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] += v;
        if i != j {
            self.a[j * self.n + i] += v;
        }
    }

    /// `self += c * u u^T`.
    pub fn add_outer(&mut self, u: &[f64], c: f64) {
        debug_assert_eq!(u.len(), self.n);
        for i in 0..self.n {
            if u[i] == 0.0 {
                continue;
            }
            let cu = c * u[i];
            for j in 0..self.n {
                self.a[i * self.n + j] += cu * u[j];
            }
        }
    }

    /// `self += c * (u w^T + w u^T) / 2` — the symmetric part of `c u w^T`.
    pub fn add_sym_outer(&mut self, u: &[f64], w: &[f64], c: f64) {
        debug_assert_eq!(u.len(), self.n);
        debug_assert_eq!(w.len(), self.n);
        let h = 0.5 * c;
        for i in 0..self.n {
            for j in 0..self.n {
                self.a[i * self.n + j] += h * (u[i] * w[j] + w[i] * u[j]);
            }
        }
    }

    /// `self += c * other`.
    pub fn scaled_add(&mut self, c: f64, other: &SymMatrix) {
        assert_eq!(self.n, other.n, "scaled_add order mismatch");
        for (x, y) in self.a.iter_mut().zip(other.a.iter()) {
            *x += c * y;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for x in self.a.iter_mut() {
            *x *= c;
        }
    }

    /// Leading principal `k x k` block.
    pub fn principal_block(&self, k: usize) -> SymMatrix {
        assert!(k <= self.n);
        let mut b = SymMatrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                b.a[i * k + j] = self.get(i, j);
            }
        }
        b
    }

    /// Sub-matrix on the given index set (in the given order).
    pub fn sub_matrix(&self, idx: &[usize]) -> SymMatrix {
        let k = idx.len();
        let mut b = SymMatrix::zeros(k);
        for (bi, &i) in idx.iter().enumerate() {
            for (bj, &j) in idx.iter().enumerate() {
                b.a[bi * k + bj] = self.get(i, j);
            }
        }
        b
    }

    pub fn fro_norm(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Scale used for relative tolerance decisions: `max(1, ||A||_F)`.
    pub fn tol_scale(&self) -> f64 {
        self.fro_norm().max(1.0)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.a[i * self.n..(i + 1) * self.n];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn quad_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Congruence `B^T A B` for a rectangular basis `B` given by columns.
    pub fn restrict(&self, basis: &[Vec<f64>]) -> SymMatrix {
        let k = basis.len();
        let mut out = SymMatrix::zeros(k);
        let images: Vec<Vec<f64>> = basis.iter().map(|b| self.mul_vec(b)).collect();
        for i in 0..k {
            for j in i..k {
                let v: f64 = basis[i].iter().zip(&images[j]).map(|(a, b)| a * b).sum();
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.a[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Cyclic Jacobi eigendecomposition; eigenvalues ascending with matching
    /// orthonormal eigenvectors.
    pub fn eigen(&self, tol: &Tolerances) -> Result<Eigen, LinalgError> {
        eigen_sym(self, tol)
    }

    pub fn min_eig(&self, tol: &Tolerances) -> Result<f64, LinalgError> {
        Ok(*self
            .eigen(tol)?
            .values
            .first()
            .expect("eigen of empty matrix"))
    }

    pub fn spectral_radius(&self, tol: &Tolerances) -> Result<f64, LinalgError> {
        let e = self.eigen(tol)?;
        Ok(e.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }

    /// Positive semidefinite up to the relative `psd_tol` slack.
    pub fn is_psd(&self, tol: &Tolerances) -> Result<bool, LinalgError> {
        if self.n == 0 {
            return Ok(true);
        }
        Ok(self.min_eig(tol)? >= -tol.psd_tol * self.tol_scale())
    }

    /// Cholesky factor `L` with `A = L L^T`; fails unless positive definite.
    pub fn cholesky(&self) -> Result<Vec<f64>, LinalgError> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(LinalgError::BNotDefinite);
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(l)
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut a = self.a.clone();
        let mut det = 1.0;
        for c in 0..n {
            let mut p = c;
            for r in (c + 1)..n {
                if a[r * n + c].abs() > a[p * n + c].abs() {
                    p = r;
                }
            }
            if a[p * n + c] == 0.0 {
                return 0.0;
            }
            if p != c {
                for j in 0..n {
                    a.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            det *= a[c * n + c];
            for r in (c + 1)..n {
                let f = a[r * n + c] / a[c * n + c];
                if f != 0.0 {
                    for j in c..n {
                        a[r * n + j] -= f * a[c * n + j];
                    }
                }
            }
        }
        det
    }
}

/// Eigendecomposition: `values` ascending, `vectors[k]` the unit eigenvector
/// for `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

fn off_diag_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = a[i * n + j];
            s += 2.0 * v * v;
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi; converges when the off-diagonal norm falls below
/// `eig_tol * ||A||_F`, errors after 100 sweeps.
pub fn eigen_sym(m: &SymMatrix, tol: &Tolerances) -> Result<Eigen, LinalgError> {
    const MAX_SWEEPS: usize = 100;
    let n = m.n;
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: vec![] });
    }
    let scale = m.fro_norm();
    let mut a = m.a.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if scale > 0.0 && n > 1 {
        let target = tol.eig_tol * scale;
        let mut converged = false;
        let mut sweeps = 0;
        while sweeps < MAX_SWEEPS {
            if off_diag_norm(&a, n) <= target {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
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
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
            sweeps += 1;
        }
        if !converged && off_diag_norm(&a, n) > target {
            return Err(LinalgError::NoConvergence {
                off: off_diag_norm(&a, n),
                sweeps,
            });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i * n + i]
            .partial_cmp(&a[j * n + j])
            .expect("NaN eigenvalue")
    });
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&c| (0..n).map(|r| v[r * n + c]).collect())
        .collect();
    Ok(Eigen { values, vectors })
}

/// Deterministic orthonormal basis of the orthogonal complement of the
/// all-ones vector in `R^n` (Helmert construction), as `n-1` columns.
pub fn ones_complement_basis(n: usize) -> Vec<Vec<f64>> {
    assert!(n >= 1);
    let mut cols = Vec::with_capacity(n - 1);
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        let mut col = vec![0.0; n];
        for item in col.iter_mut().take(k) {
            *item = 1.0 / norm;
        }
        col[k] = -(k as f64) / norm;
        cols.push(col);
    }
    cols
}

/// Smallest eigenvalue of `A` restricted to the complement of the all-ones
/// vector.
pub fn min_eig_on_ones_complement(a: &SymMatrix, tol: &Tolerances) -> Result<f64, LinalgError> {
    if a.order() <= 1 {
        return Err(LinalgError::DimensionMismatch(
            "ones-complement restriction needs order >= 2".into(),
        ));
    }
    let basis = ones_complement_basis(a.order());
    a.restrict(&basis).min_eig(tol)
}

/// Schur complement of the trailing block: for `M = [[A, B], [B^T, C]]` with
/// `A` the leading `k x k` block, returns `A - B C^{-1} B^T`. The trailing
/// block `C` must be positive definite.
pub fn schur_complement(m: &SymMatrix, k: usize, _tol: &Tolerances) -> Result<SymMatrix, LinalgError> {
    let n = m.order();
    assert!(k <= n, "leading block larger than matrix");
    let s = n - k;
    if s == 0 {
        return Ok(m.clone());
    }
    let c = m.sub_matrix(&(k..n).collect::<Vec<_>>());
    let l = c.cholesky().map_err(|_| LinalgError::SingularTrailingBlock)?;
    // Columns of B^T (one per leading index), solved against C.
    let mut q = m.principal_block(k);
    for i in 0..k {
        let b_i: Vec<f64> = (0..s).map(|t| m.get(i, k + t)).collect();
        let x = chol_solve(&l, s, &b_i);
        for j in i..k {
            let b_j: Vec<f64> = (0..s).map(|t| m.get(j, k + t)).collect();
            let dot: f64 = x.iter().zip(&b_j).map(|(a, b)| a * b).sum();
            q.add(i, j, -dot);
        }
    }
    Ok(q)
}

fn chol_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
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
    x
}

/// Smallest `lambda` with `A v = lambda B v` for symmetric `A` and positive
/// definite `B`, via `B = L L^T` and the congruent standard problem
/// `L^{-1} A L^{-T}`.
pub fn min_generalized_eig(a: &SymMatrix, b: &SymMatrix, tol: &Tolerances) -> Result<f64, LinalgError> {
    let n = a.order();
    if b.order() != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "pencil orders {} vs {}",
            n,
            b.order()
        )));
    }
    if n == 0 {
        return Err(LinalgError::DimensionMismatch("empty pencil".into()));
    }
    let l = b.cholesky()?;
    // C = L^{-1} A L^{-T}: solve L X = A, then L Y = X^T, C = Y^T (symmetric).
    let mut c = SymMatrix::zeros(n);
    // First compute A L^{-T} column by column: for each row i of A, solve
    // nothing — instead build W = L^{-1} A (rows), then C = W L^{-T} = (L^{-1} W^T)^T.
    let mut w = vec![0.0; n * n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
        let y = forward_solve(&l, n, &col);
        for i in 0..n {
            w[i * n + j] = y[i];
        }
    }
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| w[i * n + j]).collect();
        let y = forward_solve(&l, n, &row);
        for j in 0..n {
            if j >= i {
                c.set(i, j, y[j]);
            }
        }
    }
    c.min_eig(tol)
}

fn forward_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}

/// Number of eigenvalues within `zero_mult_tol * spectral_radius` of zero.
pub fn zero_multiplicity(a: &SymMatrix, tol: &Tolerances) -> Result<usize, LinalgError> {
    let e = a.eigen(tol)?;
    let radius = e.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let thresh = tol.zero_mult_tol * radius.max(1.0);
    Ok(e.values.iter().filter(|v| v.abs() <= thresh).count())
}
