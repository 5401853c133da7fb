//! The curvature engine: evaluates the curvature function of a vertex.
//!
//! For each dimension `N ∈ (0, ∞]` the curvature `K(N)` is the largest `K`
//! such that `M(K, N) = Γ₂ - (1/N) Δ^T Δ - K Γ` is positive semidefinite on
//! the incomplete 2-ball. Two independent routes compute it:
//!
//! * **primary** — eliminate the 2-sphere block of `M(0, N)` by a Schur
//!   complement `Q`; since the `K`-dependence lives entirely on the 1-ball,
//!   `K(N)` is the smallest generalized eigenvalue of the pencil
//!   `(Q(M(0,N)), Γ)` restricted to the complement of the constants.
//! * **witness** — `K(N) = K⁰ - (2 dx)/(μ N) + μ'/2` where `μ'` is the
//!   smallest generalized eigenvalue of `(P̂_N, 2Γ)` on the same complement.
//!
//! Both must agree to `agree_tol`; disagreement is a hard error, never a
//! silent average. A slow PSD-bisection oracle exists for cross-checking.

use crate::dim::Dimension;
use crate::graph::{local_structure, Graph, GraphError, LaplacianKind, LocalStructure};
use crate::linalg::{
    min_eig_on_ones_complement, min_generalized_eig, ones_complement_basis, schur_complement,
    zero_multiplicity, LinalgError, Tolerances,
};
use crate::matrices::{
    build_local_matrices, k_zero_upper, kind_view, p_hat, MatrixError,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(
        "independent curvature routes disagree at vertex {vertex}, N={n}: primary {primary} vs witness {witness}"
    )]
    InternalDisagreement {
        vertex: usize,
        n: Dimension,
        primary: f64,
        witness: f64,
    },
    #[error("bisection bracket [{lo}, {hi}] failed to enclose the curvature")]
    BracketFailure { lo: f64, hi: f64 },
}

/// One evaluated point of the curvature function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePoint {
    pub n: Dimension,
    pub k: f64,
    /// Whether `K(N)` attains the upper bound `K⁰ - 2dx/(μN)`.
    pub sharp: bool,
    /// Distance to sharpness: `-μ' ≥ 0` from the witness route.
    pub lambda_star: f64,
    /// Kernel dimension of `M(K(N), N)` on the 2-ball (≥ 2 at the true
    /// curvature: the constants plus at least one curvature eigenvector).
    pub zero_mult: usize,
}

/// Default dimension grid used by the reporting layer.
pub fn default_grid() -> Vec<Dimension> {
    let mut g: Vec<Dimension> = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 8.0, 16.0, 32.0, 1000.0]
        .iter()
        .map(|&v| Dimension::Finite(v))
        .collect();
    g.push(Dimension::Infinite);
    g
}

/// Curvature at one vertex and one dimension, both routes cross-checked.
pub fn curvature_at(
    g: &Graph,
    x: usize,
    kind: LaplacianKind,
    n: Dimension,
    tol: &Tolerances,
) -> Result<CurvaturePoint, EngineError> {
    kind.validate(g)?;
    let ls = local_structure(g, x)?;
    curvature_at_structure(&ls, kind, n, tol)
}

/// Curvature from a pre-extracted local structure.
pub fn curvature_at_structure(
    ls: &LocalStructure,
    kind: LaplacianKind,
    n: Dimension,
    tol: &Tolerances,
) -> Result<CurvaturePoint, EngineError> {
    tol.validate()?;
    let lm = build_local_matrices(ls, kind);
    let kv = kind_view(ls, kind);
    let b1 = lm.d + 1;

    // Primary: Schur-complement M(0, N) over the 2-sphere, then the pencil
    // against Γ on the complement of constants.
    let m0 = lm.m_matrix(0.0, n);
    let q = schur_complement(&m0, b1, tol).map_err(MatrixError::from)?;
    let basis = ones_complement_basis(b1);
    let qr = q.restrict(&basis);
    let gr = lm.gamma.restrict(&basis);
    let k_primary = min_generalized_eig(&qr, &gr, tol)?;

    // Witness: sharpness matrix route.
    let k0 = k_zero_upper(&kv);
    let ph = p_hat(ls, kind, n)?;
    let mut two_gamma = lm.gamma.clone();
    two_gamma.scale(2.0);
    let pr = ph.mat.restrict(&basis);
    let g2r = two_gamma.restrict(&basis);
    let mu_prime = if b1 >= 2 {
        min_generalized_eig(&pr, &g2r, tol)?
    } else {
        0.0
    };
    let k_witness = k0 - 2.0 * kv.dx * n.inv() / kv.mu + 0.5 * mu_prime;

    if (k_primary - k_witness).abs() > tol.agree_tol * k_primary.abs().max(1.0) {
        return Err(EngineError::InternalDisagreement {
            vertex: ls.center,
            n,
            primary: k_primary,
            witness: k_witness,
        });
    }

    let m_at_k = lm.m_matrix(k_primary, n);
    let zero_mult = zero_multiplicity(&m_at_k, tol)?;
    Ok(CurvaturePoint {
        n,
        k: k_primary,
        sharp: mu_prime.abs() <= 2.0 * tol.agree_tol,
        lambda_star: (-mu_prime).max(0.0),
        zero_mult,
    })
}

/// Slow oracle: bisection on `K ↦ (M(K, N) PSD)`. The initial bracket comes
/// from the envelope `K⁰ - 2dx/(μN) + μ'/2 ≤ K(N) ≤ K⁰ - 2dx/(μN)` with
/// `μ' ≥ min(0, λ_min(P̂_N)) / γ₁` and `γ₁` the smallest eigenvalue of `2Γ`
/// off the constants; one unit of slack on both ends, one expansion retry.
pub fn curvature_oracle_bisect(
    g: &Graph,
    x: usize,
    kind: LaplacianKind,
    n: Dimension,
    tol: &Tolerances,
) -> Result<f64, EngineError> {
    kind.validate(g)?;
    let ls = local_structure(g, x)?;
    let lm = build_local_matrices(&ls, kind);
    let kv = kind_view(&ls, kind);
    let k0 = k_zero_upper(&kv);
    let shift = k0 - 2.0 * kv.dx * n.inv() / kv.mu;
    let ph = p_hat(&ls, kind, n)?;
    let lam_min = ph.mat.min_eig(tol)?;
    let gamma1 = if lm.d + 1 >= 2 {
        let mut two_gamma = lm.gamma.clone();
        two_gamma.scale(2.0);
        min_eig_on_ones_complement(&two_gamma, tol)?
    } else {
        1.0
    };
    let mut lo = shift + lam_min.min(0.0) / (2.0 * gamma1) - 1.0;
    let mut hi = shift + 1.0;
    let psd_at = |k: f64| -> Result<bool, EngineError> {
        Ok(lm.m_matrix(k, n).is_psd(tol)?)
    };
    if !psd_at(lo)? {
        let width = hi - lo;
        lo -= width;
        if !psd_at(lo)? {
            return Err(EngineError::BracketFailure { lo, hi });
        }
    }
    if psd_at(hi)? {
        let width = hi - lo;
        hi += width;
        if psd_at(hi)? {
            return Err(EngineError::BracketFailure { lo, hi });
        }
    }
    while hi - lo > tol.bisect_tol {
        let mid = 0.5 * (lo + hi);
        if psd_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Full per-vertex report of the curvature function over a dimension grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub vertex: usize,
    pub label: String,
    pub kind: LaplacianKind,
    pub degree: usize,
    pub s2_size: usize,
    pub av1_plus: f64,
    pub s1_out_regular: bool,
    /// Upper-bound intercept `K⁰`.
    pub k_zero_upper: f64,
    pub k_at_infty: f64,
    /// Largest `N` at which the curvature is `N`-sharp (non-normalized kind
    /// at out-regular vertices only; `None` otherwise).
    pub n_sharp_threshold: Option<Dimension>,
    pub samples: Vec<CurvaturePoint>,
    /// Every sample lies in `[K(∞) - 2dx/(μN), K⁰ - 2dx/(μN)]`.
    pub envelope_ok: bool,
    /// Samples are nondecreasing in `N`.
    pub monotone_ok: bool,
    /// Samples at `N` past the sharpness threshold equal `K(∞)`.
    pub plateau_ok: bool,
}

/// Evaluates the curvature function on a grid and packages diagnostics.
pub fn curvature_function(
    g: &Graph,
    x: usize,
    kind: LaplacianKind,
    grid: &[Dimension],
    tol: &Tolerances,
) -> Result<CurvatureReport, EngineError> {
    kind.validate(g)?;
    let ls = local_structure(g, x)?;
    let kv = kind_view(&ls, kind);
    let k0 = k_zero_upper(&kv);

    let mut dims: Vec<Dimension> = grid.to_vec();
    dims.sort_by(|a, b| a.partial_cmp(b).expect("NaN dimension"));
    dims.dedup();

    let samples: Vec<CurvaturePoint> = dims
        .iter()
        .map(|&n| curvature_at_structure(&ls, kind, n, tol))
        .collect::<Result<_, _>>()?;
    let k_at_infty = match samples.iter().find(|p| p.n.is_infinite()) {
        Some(p) => p.k,
        None => curvature_at_structure(&ls, kind, Dimension::Infinite, tol)?.k,
    };

    let n_sharp_threshold = if kind == LaplacianKind::NonNormalized {
        n_sharp_threshold(&ls, tol)?
    } else {
        None
    };

    let slack = |k: f64| tol.agree_tol * k.abs().max(1.0);
    let rate = 2.0 * kv.dx / kv.mu;
    let envelope_ok = samples.iter().all(|p| {
        p.k <= k0 - rate * p.n.inv() + slack(p.k)
            && p.k >= k_at_infty - rate * p.n.inv() - slack(p.k)
    });
    let monotone_ok = samples
        .windows(2)
        .all(|w| w[1].k >= w[0].k - slack(w[0].k));
    let plateau_ok = match n_sharp_threshold {
        Some(Dimension::Finite(n0)) => samples.iter().all(|p| {
            if p.n.as_f64() >= n0 {
                (p.k - k_at_infty).abs() <= slack(k_at_infty)
            } else {
                true
            }
        }),
        _ => true,
    };

    Ok(CurvatureReport {
        vertex: x,
        label: g.label(x),
        kind,
        degree: ls.degree(),
        s2_size: ls.s2_size(),
        av1_plus: ls.av1_plus(),
        s1_out_regular: ls.s1_out_regular().is_some(),
        k_zero_upper: k0,
        k_at_infty,
        n_sharp_threshold,
        samples,
        envelope_ok,
        monotone_ok,
        plateau_ok,
    })
}

/// Largest `N` at which the vertex is `N`-sharp for the non-normalized
/// Laplacian: `None` unless the vertex is S1-out-regular; `∞` when the inner
/// sharpness block is PSD; otherwise `4 d_x / (-λ_min)`.
pub fn n_sharp_threshold(
    ls: &LocalStructure,
    tol: &Tolerances,
) -> Result<Option<Dimension>, EngineError> {
    if ls.s1_out_regular().is_none() {
        return Ok(None);
    }
    let d = ls.degree();
    if d == 1 {
        // A pendant vertex has an affine curvature function that attains the
        // upper bound for every N.
        return Ok(Some(Dimension::Infinite));
    }
    let ph = p_hat(ls, LaplacianKind::NonNormalized, Dimension::Infinite)?;
    let inner_idx: Vec<usize> = (1..=d).collect();
    let inner = ph.mat.sub_matrix(&inner_idx);
    let lam = min_eig_on_ones_complement(&inner, tol)?;
    if lam >= -tol.zero_mult_tol * inner.tol_scale() {
        Ok(Some(Dimension::Infinite))
    } else {
        Ok(Some(Dimension::Finite(4.0 * d as f64 / (-lam))))
    }
}

/// Result of the vertex-degree and principal-minor necessary conditions for
/// `CD(0, N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cd0Minors {
    /// `N ≥ 4 d_x / (d_x + 3)` holds.
    pub deg_bound_ok: bool,
    /// `c₁ ≥ c₂ / N` holds, where `det(Γ₂|B₁ - t Δ^T Δ) = c₁ - c₂ t`.
    pub adjugate_ok: bool,
    pub c1: f64,
    pub c2: f64,
}

/// Necessary conditions for `CD(0, N)` at a vertex via the determinant of
/// the 1-ball block (non-normalized kind). The rank-one structure of
/// `Δ^T Δ` makes the determinant affine in `1/N`:
/// `c₂ = det(Γ₂|B₁ + Δ^T Δ) - det(Γ₂|B₁)`.
pub fn cd0_minor_tests(
    g: &Graph,
    x: usize,
    n: Dimension,
    tol: &Tolerances,
) -> Result<Cd0Minors, EngineError> {
    tol.validate()?;
    let ls = local_structure(g, x)?;
    let lm = build_local_matrices(&ls, LaplacianKind::NonNormalized);
    let b1 = lm.d + 1;
    let g2_b1 = lm.gamma2.principal_block(b1);
    let c1 = g2_b1.det();
    let mut plus = g2_b1.clone();
    plus.add_outer(&lm.delta_row, 1.0);
    let c2 = plus.det() - c1;
    let d = lm.d as f64;
    let deg_bound_ok = match n {
        Dimension::Infinite => true,
        Dimension::Finite(v) => v >= 4.0 * d / (d + 3.0) - tol.agree_tol,
    };
    let scale = g2_b1.tol_scale();
    let adjugate_ok = c1 >= c2 * n.inv() - tol.agree_tol * scale;
    Ok(Cd0Minors {
        deg_bound_ok,
        adjugate_ok,
        c1,
        c2,
    })
}

/// What a far-field curvature sample reveals about the local geometry:
/// at tiny `N`, `-N K(N) / 2` approaches the degree and
/// `3 + d_x - 2 (K(N) + 2 d_x / N)` approaches the average out-degree
/// (non-normalized kind).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadOffDiagnostics {
    pub n_probe: f64,
    pub degree_estimate: f64,
    pub degree_true: usize,
    pub av1_plus_estimate: f64,
    pub av1_plus_true: f64,
}

pub fn read_off_diagnostics(
    g: &Graph,
    x: usize,
    tol: &Tolerances,
) -> Result<ReadOffDiagnostics, EngineError> {
    const N_PROBE: f64 = 1e-4;
    let ls = local_structure(g, x)?;
    let point = curvature_at_structure(
        &ls,
        LaplacianKind::NonNormalized,
        Dimension::Finite(N_PROBE),
        tol,
    )?;
    let d = ls.degree() as f64;
    Ok(ReadOffDiagnostics {
        n_probe: N_PROBE,
        degree_estimate: -0.5 * N_PROBE * point.k,
        degree_true: ls.degree(),
        av1_plus_estimate: 3.0 + d - 2.0 * (point.k + 2.0 * d / N_PROBE),
        av1_plus_true: ls.av1_plus(),
    })
}

/// Curvature of every vertex at one dimension, in parallel.
pub fn curvature_map(
    g: &Graph,
    kind: LaplacianKind,
    n: Dimension,
    tol: &Tolerances,
) -> Result<Vec<(usize, CurvaturePoint)>, EngineError> {
    kind.validate(g)?;
    (0..g.n())
        .into_par_iter()
        .map(|x| {
            let ls = local_structure(g, x)?;
            Ok((x, curvature_at_structure(&ls, kind, n, tol)?))
        })
        .collect()
}

/// Outcome of a whole-graph `CD(k, N)` check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdCheck {
    pub ok: bool,
    pub min_k: f64,
    /// A vertex attaining the minimum.
    pub witness_vertex: usize,
    pub points: Vec<(usize, CurvaturePoint)>,
}

/// `CD(k, N)` holds iff every vertex curvature is at least `k` (up to
/// `agree_tol`).
pub fn check_cd(
    g: &Graph,
    kind: LaplacianKind,
    k: f64,
    n: Dimension,
    tol: &Tolerances,
) -> Result<CdCheck, EngineError> {
    let points = curvature_map(g, kind, n, tol)?;
    let (witness_vertex, min_k) = points
        .iter()
        .map(|(v, p)| (*v, p.k))
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("NaN curvature"))
        .expect("graph has at least one vertex");
    Ok(CdCheck {
        ok: min_k >= k - tol.agree_tol,
        min_k,
        witness_vertex,
        points,
    })
}

/// CSV rendering of per-vertex curvature points: `vertex,n,k,sharp`.
pub fn map_csv(points: &[(usize, CurvaturePoint)]) -> String {
    let mut out = String::from("vertex,n,k,sharp\n");
    for (v, p) in points {
        out.push_str(&format!("{},{},{},{}\n", v, p.n, p.k, p.sharp));
    }
    out
}
