//! Local operator matrices at a vertex: Δ, Γ, Γ₂, and the sharpness matrix P̂.
//!
//! Everything is expressed in a fixed row order (center, S1 ascending, S2
//! ascending). Γ lives on the 1-ball (order `1 + d`), Γ₂ on the incomplete
//! 2-ball (order `1 + d + s`). Entries are written out directly from closed
//! forms — the operator-composition route exists only as a hidden test
//! oracle.
//!
//! Conventions: the quadratic forms stored are Γ and Γ₂ themselves; printed
//! integer tables correspond to `2Γ` and `4Γ₂`, which are recovered exactly
//! by scaling with powers of two.

use crate::dim::Dimension;
use crate::graph::{LaplacianKind, LocalStructure};
use crate::linalg::{schur_complement, LinalgError, SymMatrix, Tolerances};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("2-sphere weight block is singular at local vertex {0}")]
    DegenerateSphereVertex(usize),
}

/// Weights and measures of a 2-ball as seen by one Laplacian kind.
///
/// * `NonNormalized`: all weights 1, all measures 1.
/// * `Normalized`: all weights 1, measure = full degree in the host graph.
/// * `General`: the stored weights and measures.
#[derive(Debug, Clone)]
pub struct KindView {
    pub kind: LaplacianKind,
    pub d: usize,
    pub s: usize,
    /// Center-to-S1 weights.
    pub w: Vec<f64>,
    /// Measure of the center and of each S1 vertex.
    pub mu: f64,
    pub mu_s1: Vec<f64>,
    /// Weighted degree of the center (sum of `w`).
    pub dx: f64,
    /// Dense spherical weights, `w_s1[i][j]` for the S1 edge `y_i ~ y_j`.
    pub w_s1: Vec<Vec<f64>>,
    /// Dense radial weights, `w_rad[i][j]` for `y_i ~ z_j`.
    pub w_rad: Vec<Vec<f64>>,
    /// Weighted spherical / out degree of each S1 vertex.
    pub sph_w: Vec<f64>,
    pub out_w: Vec<f64>,
}

/// Resolves the effective weights of a local structure under a kind.
pub fn kind_view(ls: &LocalStructure, kind: LaplacianKind) -> KindView {
    let d = ls.degree();
    let s = ls.s2_size();
    let unit = !matches!(kind, LaplacianKind::General);
    let w: Vec<f64> = if unit {
        vec![1.0; d]
    } else {
        ls.w_center.clone()
    };
    let (mu, mu_s1): (f64, Vec<f64>) = match kind {
        LaplacianKind::NonNormalized => (1.0, vec![1.0; d]),
        LaplacianKind::Normalized => (
            d as f64,
            ls.deg_s1.iter().map(|&dg| dg as f64).collect(),
        ),
        LaplacianKind::General => (ls.mu_center, ls.mu_s1.clone()),
    };
    let mut w_s1 = vec![vec![0.0; d]; d];
    for &(i, j, we) in &ls.s1_edges {
        let v = if unit { 1.0 } else { we };
        w_s1[i][j] = v;
        w_s1[j][i] = v;
    }
    let mut w_rad = vec![vec![0.0; s]; d];
    for &(i, j, we) in &ls.radial_edges {
        w_rad[i][j] = if unit { 1.0 } else { we };
    }
    let sph_w: Vec<f64> = w_s1.iter().map(|r| r.iter().sum()).collect();
    let out_w: Vec<f64> = w_rad.iter().map(|r| r.iter().sum()).collect();
    let dx = w.iter().sum();
    KindView {
        kind,
        d,
        s,
        w,
        mu,
        mu_s1,
        dx,
        w_s1,
        w_rad,
        sph_w,
        out_w,
    }
}

/// Row vector of the Laplacian at the center over (x, S1):
/// `Δf(x) = Σ_i w_i (f(y_i) - f(x)) / μ(x)`.
pub fn delta_row(kv: &KindView) -> Vec<f64> {
    let mut row = Vec::with_capacity(kv.d + 1);
    row.push(-kv.dx / kv.mu);
    for i in 0..kv.d {
        row.push(kv.w[i] / kv.mu);
    }
    row
}

/// Γ at the center, order `1 + d`. `2Γ = (1/μ) [[dx, -w^T], [-w, diag(w)]]`.
pub fn gamma_matrix(kv: &KindView) -> SymMatrix {
    let mut g = SymMatrix::zeros(kv.d + 1);
    g.set(0, 0, kv.dx / kv.mu);
    for i in 0..kv.d {
        g.set(0, 1 + i, -kv.w[i] / kv.mu);
        g.set(1 + i, 1 + i, kv.w[i] / kv.mu);
    }
    g.scale(0.5);
    g
}

/// Γ₂ at the center, order `1 + d + s`, via closed-form entries.
pub fn gamma2_matrix(kv: &KindView) -> SymMatrix {
    match kv.kind {
        LaplacianKind::NonNormalized => gamma2_unit(kv),
        _ => gamma2_general(kv),
    }
}

/// Integer-table route for the unit-weight, unit-measure kind. `4Γ₂` has
/// integer entries: the diagonal and off-diagonal patterns depend only on
/// degrees, spherical degrees, and out-degrees.
fn gamma2_unit(kv: &KindView) -> SymMatrix {
    let d = kv.d;
    let s = kv.s;
    let df = d as f64;
    let mut m = SymMatrix::zeros(1 + d + s);
    m.set(0, 0, 3.0 * df + df * df);
    for i in 0..d {
        let out = kv.out_w[i];
        let sph = kv.sph_w[i];
        m.set(0, 1 + i, -3.0 - df - out);
        m.set(1 + i, 1 + i, 5.0 - df + 3.0 * out + 4.0 * sph);
        for j in (i + 1)..d {
            m.set(1 + i, 1 + j, 2.0 - 4.0 * kv.w_s1[i][j]);
        }
    }
    for j in 0..s {
        let in_deg: f64 = (0..d).map(|i| kv.w_rad[i][j]).sum();
        m.set(0, 1 + d + j, in_deg);
        m.set(1 + d + j, 1 + d + j, in_deg);
        for i in 0..d {
            if kv.w_rad[i][j] != 0.0 {
                m.set(1 + i, 1 + d + j, -2.0 * kv.w_rad[i][j]);
            }
        }
    }
    m.scale(0.25);
    m
}

/// General-weight route: closed-form `4Γ₂` entries for arbitrary positive
/// edge weights and vertex measures. With `W_i = w(x, y_i)`, `μ = μ(x)`,
/// `μ_i = μ(y_i)`, `D_i` the weighted degree of `y_i` and `dx = Σ W_i`:
///
/// ```text
/// (x , x )  dx²/μ² + 3 Σ_i W_i²/(μ μ_i)
/// (x , y_i) -W_i (3W_i + D_i - W_i)/(μ μ_i) + (1/μ) Σ_j W_j w_ij/μ_j - dx W_i/μ²
/// (y_i,y_i) 3 W_i D_i/(μ μ_i) + (1/μ) Σ_j W_j w_ij/μ_j + W_i (2W_i - dx)/μ²
/// (y_i,y_j) 2 W_i W_j/μ² - (2 w_ij/μ)(W_i/μ_i + W_j/μ_j)
/// (x , z )  (1/μ) Σ_i W_i w_iz/μ_i        (also the (z, z) entry)
/// (y_i,z )  -2 W_i w_iz/(μ μ_i)
/// (z , z')  0
/// ```
fn gamma2_general(kv: &KindView) -> SymMatrix {
    let d = kv.d;
    let s = kv.s;
    let mu = kv.mu;
    let mut m = SymMatrix::zeros(1 + d + s);
    let xx = kv.dx * kv.dx / (mu * mu)
        + 3.0
            * (0..d)
                .map(|i| kv.w[i] * kv.w[i] / (mu * kv.mu_s1[i]))
                .sum::<f64>();
    m.set(0, 0, xx);
    for i in 0..d {
        let wi = kv.w[i];
        let mui = kv.mu_s1[i];
        // Spherical exchange term common to (x, y_i) and (y_i, y_i).
        let exch: f64 = (0..d)
            .map(|j| {
                if j == i || kv.w_s1[i][j] == 0.0 {
                    0.0
                } else {
                    kv.w[j] * kv.w_s1[i][j] / kv.mu_s1[j]
                }
            })
            .sum::<f64>()
            / mu;
        let deg_i = wi + kv.sph_w[i] + kv.out_w[i];
        m.set(
            0,
            1 + i,
            -wi * (3.0 * wi + kv.sph_w[i] + kv.out_w[i]) / (mu * mui) + exch
                - kv.dx * wi / (mu * mu),
        );
        m.set(
            1 + i,
            1 + i,
            3.0 * wi * deg_i / (mu * mui) + exch + wi * (2.0 * wi - kv.dx) / (mu * mu),
        );
        for j in (i + 1)..d {
            let wj = kv.w[j];
            let wij = kv.w_s1[i][j];
            m.set(
                1 + i,
                1 + j,
                2.0 * wi * wj / (mu * mu) - (2.0 * wij / mu) * (wi / mui + wj / kv.mu_s1[j]),
            );
        }
        for z in 0..s {
            let wiz = kv.w_rad[i][z];
            if wiz != 0.0 {
                m.set(1 + i, 1 + d + z, -2.0 * wi * wiz / (mu * mui));
            }
        }
    }
    for z in 0..s {
        let cz: f64 = (0..d)
            .map(|i| kv.w[i] * kv.w_rad[i][z] / kv.mu_s1[i])
            .sum::<f64>()
            / mu;
        m.set(0, 1 + d + z, cz);
        m.set(1 + d + z, 1 + d + z, cz);
    }
    m.scale(0.25);
    m
}

/// Γ₂ assembled by operator composition (iterated difference operators).
/// Exists purely as an independent oracle for tests of the closed-form
/// entries; O(d² + ball²) per rank-one update and numerically noisier.
#[doc(hidden)]
pub fn gamma2_assembled(kv: &KindView) -> SymMatrix {
    let d = kv.d;
    let s = kv.s;
    let nb = 1 + d + s;
    let mu = kv.mu;
    let mut m = SymMatrix::zeros(nb);
    // Laplacian row of the center over the ball.
    let mut delta_x = vec![0.0; nb];
    delta_x[0] = -kv.dx / mu;
    for i in 0..d {
        delta_x[1 + i] = kv.w[i] / mu;
    }
    for i in 0..d {
        let wi = kv.w[i];
        let mui = kv.mu_s1[i];
        // Σ over neighbours u of y_i of (W_i w / (μ μ_i)) (e_u - e_{y_i})⊗².
        let push = |m: &mut SymMatrix, u: usize, wu: f64| {
            let mut v = vec![0.0; nb];
            v[u] += 1.0;
            v[1 + i] -= 1.0;
            m.add_outer(&v, wi * wu / (mu * mui));
        };
        push(&mut m, 0, wi);
        for j in 0..d {
            if kv.w_s1[i][j] != 0.0 {
                push(&mut m, 1 + j, kv.w_s1[i][j]);
            }
        }
        for z in 0..s {
            if kv.w_rad[i][z] != 0.0 {
                push(&mut m, 1 + d + z, kv.w_rad[i][z]);
            }
        }
        // -(dx/μ²) W_i (e_{y_i} - e_x)⊗².
        let mut r = vec![0.0; nb];
        r[1 + i] = 1.0;
        r[0] = -1.0;
        m.add_outer(&r, -kv.dx * wi / (mu * mu));
        // -(2 W_i/μ) sym[(e_{y_i} - e_x)(Δrow(y_i) - Δrow(x))ᵀ].
        let mut delta_yi = vec![0.0; nb];
        let deg_i = wi + kv.sph_w[i] + kv.out_w[i];
        delta_yi[0] = wi / mui;
        delta_yi[1 + i] = -deg_i / mui;
        for j in 0..d {
            if kv.w_s1[i][j] != 0.0 {
                delta_yi[1 + j] = kv.w_s1[i][j] / mui;
            }
        }
        for z in 0..s {
            if kv.w_rad[i][z] != 0.0 {
                delta_yi[1 + d + z] = kv.w_rad[i][z] / mui;
            }
        }
        let diff: Vec<f64> = delta_yi.iter().zip(&delta_x).map(|(a, b)| a - b).collect();
        m.add_sym_outer(&r, &diff, -2.0 * wi / mu);
    }
    m.scale(0.25);
    m
}

/// The center's local matrices under one Laplacian kind.
#[derive(Debug, Clone)]
pub struct LocalMatrices {
    pub kind: LaplacianKind,
    pub d: usize,
    pub s: usize,
    /// Global vertex ids in row order (center, S1..., S2...).
    pub vertices: Vec<usize>,
    /// Laplacian row at the center over (x, S1): length `d + 1`.
    pub delta_row: Vec<f64>,
    /// Γ, order `d + 1`.
    pub gamma: SymMatrix,
    /// Γ₂, order `1 + d + s`.
    pub gamma2: SymMatrix,
}

pub fn build_local_matrices(ls: &LocalStructure, kind: LaplacianKind) -> LocalMatrices {
    let kv = kind_view(ls, kind);
    LocalMatrices {
        kind,
        d: kv.d,
        s: kv.s,
        vertices: ls.vertex_order(),
        delta_row: delta_row(&kv),
        gamma: gamma_matrix(&kv),
        gamma2: gamma2_matrix(&kv),
    }
}

impl LocalMatrices {
    pub fn ball_order(&self) -> usize {
        1 + self.d + self.s
    }

    /// Local row index of a global vertex id.
    pub fn index_of(&self, global: usize) -> Option<usize> {
        self.vertices.iter().position(|&v| v == global)
    }

    /// `Δ^T Δ` at the center, order `d + 1`.
    pub fn delta_t_delta(&self) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.d + 1);
        m.add_outer(&self.delta_row, 1.0);
        m
    }

    /// The curvature test matrix `M(K, N) = Γ₂ - (1/N) Δ^T Δ - K Γ` on the
    /// ball (Γ and Δ zero-padded over S2). At `N = ∞` the middle term is
    /// dropped exactly.
    pub fn m_matrix(&self, k: f64, n: Dimension) -> SymMatrix {
        let nb = self.ball_order();
        let mut m = self.gamma2.clone();
        for i in 0..=self.d {
            for j in i..=self.d {
                m.add(i, j, -k * self.gamma.get(i, j));
            }
        }
        let inv_n = n.inv();
        if inv_n != 0.0 {
            let mut padded = vec![0.0; nb];
            padded[..=self.d].copy_from_slice(&self.delta_row);
            m.add_outer(&padded, -inv_n);
        }
        m
    }

    /// CSV dump of Δ, Γ, Γ₂ with vertex labels, for debugging.
    pub fn dump_csv(&self) -> String {
        let labels: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        let head = &labels[..=self.d];
        let mut out = String::new();
        out.push_str(&format!("delta,{}\n", head.join(",")));
        let row: Vec<String> = self.delta_row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&format!(",{}\n\n", row.join(",")));
        out.push_str(&matrix_csv("gamma", &self.gamma, head));
        out.push('\n');
        out.push_str(&matrix_csv("gamma2", &self.gamma2, &labels));
        out
    }
}

/// One labeled matrix as CSV (header row + one labeled line per row).
pub fn matrix_csv(name: &str, m: &SymMatrix, labels: &[String]) -> String {
    assert_eq!(m.order(), labels.len());
    let mut out = format!("{name},{}\n", labels.join(","));
    for (i, lab) in labels.iter().enumerate() {
        let row: Vec<String> = (0..m.order()).map(|j| format!("{}", m.get(i, j))).collect();
        out.push_str(&format!("{lab},{}\n", row.join(",")));
    }
    out
}

/// The dimension-free curvature upper bound at the center:
/// `K⁰ = dx/(2μ) + (1/(2 dx)) Σ_i W_i (3W_i - out_i)/μ_i`,
/// where `out_i` is the weighted out-degree of `y_i`. For unit weights this
/// is `(3 + d - av₁⁺)/2`.
pub fn k_zero_upper(kv: &KindView) -> f64 {
    let tail: f64 = (0..kv.d)
        .map(|i| kv.w[i] * (3.0 * kv.w[i] - kv.out_w[i]) / kv.mu_s1[i])
        .sum();
    kv.dx / (2.0 * kv.mu) + tail / (2.0 * kv.dx)
}

/// The sharpness matrix `P̂_N`, order `d + 1`, tagged with its dimension and
/// kind. `P̂_∞ = 4 Q(Γ₂ - K⁰ Γ)` with `Q` the Schur complement eliminating
/// the 2-sphere block, and
/// `P̂_N = P̂_∞ + (4/(N μ²)) (0 ⊕ (dx·diag(W) - W W^T))`.
/// Rows and columns sum to zero.
#[derive(Debug, Clone)]
pub struct PHatMatrix {
    pub mat: SymMatrix,
    pub n: Dimension,
    pub kind: LaplacianKind,
}

/// Builds `P̂_N` directly: the S2 block of `Γ₂ - K⁰ Γ` is diagonal, so the
/// Schur complement reduces to one rank-one update per 2-sphere vertex.
pub fn p_hat(ls: &LocalStructure, kind: LaplacianKind, n: Dimension) -> Result<PHatMatrix, MatrixError> {
    let kv = kind_view(ls, kind);
    let d = kv.d;
    let g2 = gamma2_matrix(&kv);
    let k0 = k_zero_upper(&kv);
    let gamma = gamma_matrix(&kv);
    let mut p = SymMatrix::zeros(d + 1);
    for i in 0..=d {
        for j in i..=d {
            p.set(i, j, 4.0 * (g2.get(i, j) - k0 * gamma.get(i, j)));
        }
    }
    for z in 0..kv.s {
        let zz = 4.0 * g2.get(1 + d + z, 1 + d + z);
        if zz <= 0.0 {
            return Err(MatrixError::DegenerateSphereVertex(1 + d + z));
        }
        let u: Vec<f64> = (0..=d).map(|i| 4.0 * g2.get(i, 1 + d + z)).collect();
        p.add_outer(&u, -1.0 / zz);
    }
    let inv_n = n.inv();
    if inv_n != 0.0 {
        let c = 4.0 * inv_n / (kv.mu * kv.mu);
        for i in 0..d {
            for j in i..d {
                let cij = if i == j {
                    kv.dx * kv.w[i] - kv.w[i] * kv.w[j]
                } else {
                    -kv.w[i] * kv.w[j]
                };
                p.add(1 + i, 1 + j, c * cij);
            }
        }
    }
    Ok(PHatMatrix { mat: p, n, kind })
}

/// Reference route for `P̂_N` through the generic Schur complement of the
/// full curvature matrix; used to cross-check [`p_hat`].
#[doc(hidden)]
pub fn p_hat_by_schur(
    ls: &LocalStructure,
    kind: LaplacianKind,
    n: Dimension,
    tol: &Tolerances,
) -> Result<SymMatrix, MatrixError> {
    let kv = kind_view(ls, kind);
    let lm = build_local_matrices(ls, kind);
    let k0 = k_zero_upper(&kv);
    // 4 (Γ₂ - K⁰ Γ - (1/N)(Δ^T Δ - (2 dx/μ) Γ)) padded over the ball; its
    // Schur complement over S2 equals P̂_N because the dimension correction
    // is supported on the 1-ball.
    let nb = lm.ball_order();
    let mut m = lm.gamma2.clone();
    for i in 0..=lm.d {
        for j in i..=lm.d {
            m.add(i, j, -(k0 - 2.0 * kv.dx * n.inv() / kv.mu) * lm.gamma.get(i, j));
        }
    }
    if n.inv() != 0.0 {
        let mut padded = vec![0.0; nb];
        padded[..=lm.d].copy_from_slice(&lm.delta_row);
        m.add_outer(&padded, -n.inv());
    }
    m.scale(4.0);
    Ok(schur_complement(&m, lm.d + 1, tol)?)
}
