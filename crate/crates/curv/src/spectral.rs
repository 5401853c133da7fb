//! Spectral shortcuts on the 1-sphere: weighted sphere graphs, their
//! Laplacian gap, and closed-form curvature functions read off from the gap.
//!
//! For the non-normalized Laplacian at an S1-out-regular vertex, all
//! curvature information collapses onto a weighted graph on the 1-sphere:
//! direct spherical edges keep weight `w`, and every 2-step path through a
//! 2-sphere vertex `z` contributes `w_{iz} w_{zj} / d_z⁻`. The second
//! Laplacian eigenvalue `λ₁` of that combined graph determines the whole
//! curvature function.

use crate::dim::Dimension;
use crate::graph::{punctured_components, LaplacianKind, LocalStructure};
use crate::linalg::{LinalgError, SymMatrix, Tolerances};
use crate::matrices::{p_hat, MatrixError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("sphere-graph analysis needs degree ≥ 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("sphere-Laplacian identity violated at an out-regular vertex (max deviation {0:.3e})")]
    IdentityViolation(f64),
}

/// The 1-sphere of a vertex as a weighted graph, in three layers: direct
/// spherical edges (`w`), 2-step transit weights through the 2-sphere
/// (`w' = Σ_z w_iz w_zj / d_z⁻`), and their sum (`w'' = w + w'`).
#[derive(Debug, Clone)]
pub struct WeightedSphereGraph {
    /// Global vertex ids of the 1-sphere, ascending.
    pub vertices: Vec<usize>,
    pub w_direct: Vec<Vec<f64>>,
    pub w_transit: Vec<Vec<f64>>,
    pub w_combined: Vec<Vec<f64>>,
    /// Transit degree of each sphere vertex (row sums of `w_transit`).
    pub d_prime: Vec<f64>,
    /// PSD Laplacians `D - W` of the three layers.
    pub lap_direct: SymMatrix,
    pub lap_transit: SymMatrix,
    pub laplacian: SymMatrix,
    /// Second-smallest eigenvalue of the combined Laplacian.
    pub lambda1: f64,
}

fn laplacian_of(w: &[Vec<f64>]) -> SymMatrix {
    let d = w.len();
    let mut l = SymMatrix::zeros(d);
    for i in 0..d {
        let deg: f64 = w[i].iter().sum();
        l.set(i, i, deg);
        for j in (i + 1)..d {
            if w[i][j] != 0.0 {
                l.set(i, j, -w[i][j]);
            }
        }
    }
    l
}

/// Builds the weighted sphere graphs at a vertex (unit-weight semantics,
/// degree ≥ 2). At S1-out-regular vertices the identity
/// `P_∞ = 4 L'' - 2 (d I - J)` against the sharpness matrix is verified to
/// relative 10⁻⁹; it is an identity only under out-regularity, so other
/// vertices skip the check.
pub fn sphere_graphs(ls: &LocalStructure) -> Result<WeightedSphereGraph, SpectralError> {
    let d = ls.degree();
    if d < 2 {
        return Err(SpectralError::DegreeTooSmall(d));
    }
    let s = ls.s2_size();
    let tol = Tolerances::default();
    let mut w_direct = vec![vec![0.0; d]; d];
    for &(i, j, _) in &ls.s1_edges {
        w_direct[i][j] = 1.0;
        w_direct[j][i] = 1.0;
    }
    let mut rad = vec![vec![0.0; s]; d];
    for &(i, z, _) in &ls.radial_edges {
        rad[i][z] = 1.0;
    }
    let mut w_transit = vec![vec![0.0; d]; d];
    for z in 0..s {
        let dz = ls.in_deg[z] as f64;
        for i in 0..d {
            if rad[i][z] == 0.0 {
                continue;
            }
            for j in (i + 1)..d {
                if rad[j][z] != 0.0 {
                    w_transit[i][j] += 1.0 / dz;
                    w_transit[j][i] += 1.0 / dz;
                }
            }
        }
    }
    let mut w_combined = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            w_combined[i][j] = w_direct[i][j] + w_transit[i][j];
        }
    }
    let d_prime: Vec<f64> = w_transit.iter().map(|r| r.iter().sum()).collect();
    let lap_direct = laplacian_of(&w_direct);
    let lap_transit = laplacian_of(&w_transit);
    let laplacian = laplacian_of(&w_combined);
    let eig = laplacian.eigen(&tol)?;
    let lambda1 = eig.values[1];

    if ls.s1_out_regular().is_some() {
        let ph = p_hat(ls, LaplacianKind::NonNormalized, Dimension::Infinite)?;
        let mut max_dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let want = 4.0 * laplacian.get(i, j)
                    - 2.0 * if i == j { d as f64 - 1.0 } else { -1.0 };
                let dev = (ph.mat.get(1 + i, 1 + j) - want).abs();
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev > 1e-9 * ph.mat.tol_scale() {
            return Err(SpectralError::IdentityViolation(max_dev));
        }
    }

    Ok(WeightedSphereGraph {
        vertices: ls.s1.clone(),
        w_direct,
        w_transit,
        w_combined,
        d_prime,
        lap_direct,
        lap_transit,
        laplacian,
        lambda1,
    })
}

/// Curvature of an S1-out-regular vertex from raw local data: degree,
/// average out-degree, and the sphere-Laplacian gap `λ₁`. Taking raw numbers
/// keeps literature examples reproducible without constructing their graphs.
///
/// * `λ₁ ≥ d/2`: the function is the full upper bound
///   `(3 + d - av₁⁺)/2 - 2d/N`.
/// * `λ₁ < d/2`: the same affine branch up to `N = 2d/(d - 2λ₁)`, then the
///   constant `(3 - d - av₁⁺)/2 + 2λ₁`.
pub fn curvature_from_gap(d: usize, av1_plus: f64, lambda1: f64, n: Dimension) -> f64 {
    let df = d as f64;
    let affine = |n: Dimension| (3.0 + df - av1_plus) / 2.0 - 2.0 * df * n.inv();
    if lambda1 >= df / 2.0 {
        return affine(n);
    }
    let n_break = 2.0 * df / (df - 2.0 * lambda1);
    match n {
        Dimension::Finite(v) if v <= n_break => affine(n),
        _ => (3.0 - df - av1_plus) / 2.0 + 2.0 * lambda1,
    }
}

/// Two-branch closed-form curvature of an S1-out-regular vertex whose
/// punctured 2-ball is disconnected: the gap formula with `λ₁ = 0`, so the
/// break sits at `N = 2` and the plateau is `(3 - d - av₁⁺)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCurve {
    pub d: usize,
    pub av1_plus: f64,
    pub lambda1: f64,
}

impl GapCurve {
    pub fn eval(&self, n: Dimension) -> f64 {
        curvature_from_gap(self.d, self.av1_plus, self.lambda1, n)
    }
}

pub fn disconnected_s1out_curvature(ls: &LocalStructure) -> Result<GapCurve, SpectralError> {
    if ls.s1_out_regular().is_none() {
        return Err(SpectralError::NotApplicable("vertex is not S1-out-regular"));
    }
    if punctured_components(ls).len() < 2 {
        return Err(SpectralError::NotApplicable(
            "punctured 2-ball is connected",
        ));
    }
    Ok(GapCurve {
        d: ls.degree(),
        av1_plus: ls.av1_plus(),
        lambda1: 0.0,
    })
}

/// The tree-comparison bound on the 2-sphere size at an S1-out-regular
/// vertex: `|S₂| ≤ Σ_j (deg(y_j) - 1) - (d - 1) λ₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct S2Bound {
    pub bound: f64,
    pub actual: usize,
    pub ok: bool,
}

pub fn s2_cardinality_bound(ls: &LocalStructure) -> Result<S2Bound, SpectralError> {
    if ls.degree() < 2 {
        return Err(SpectralError::DegreeTooSmall(ls.degree()));
    }
    if ls.s1_out_regular().is_none() {
        return Err(SpectralError::NotApplicable("vertex is not S1-out-regular"));
    }
    let sphere = sphere_graphs(ls)?;
    let d = ls.degree() as f64;
    let deg_sum: f64 = ls.deg_s1.iter().map(|&dg| dg as f64 - 1.0).sum();
    let bound = deg_sum - (d - 1.0) * sphere.lambda1;
    let actual = ls.s2_size();
    Ok(S2Bound {
        bound,
        actual,
        ok: (actual as f64) <= bound + 1e-9,
    })
}

/// Non-negativity criterion at an S1-out-regular vertex:
/// `K(∞) ≥ 0 ⇔ av₁⁺ ≤ 3 + d and λ₁ ≥ (d + av₁⁺ - 3)/4`.
/// Comparisons carry a 10⁻⁹ slack so computed eigenvalues sitting exactly on
/// the boundary (common in the regular examples) classify as non-negative.
pub fn nonneg_criterion(d: usize, av1_plus: f64, lambda1: f64) -> bool {
    let df = d as f64;
    av1_plus <= 3.0 + df + 1e-9 && lambda1 >= (df + av1_plus - 3.0) / 4.0 - 1e-9
}

/// The five shapes of a disconnected punctured 2-ball that still allow
/// non-negative curvature at infinity. Everything else with more than one
/// punctured component has `K(∞) < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExceptionalShape {
    /// d = 2, empty 2-sphere, no spherical edge (middle of a 3-path).
    PathCenter,
    /// d = 2, out-degrees {0, 1} (next to a pendant vertex).
    NextToPendant,
    /// d = 2, out-degrees {1, 1} into distinct 2-sphere vertices
    /// (middle of a 5-path).
    TwoRadialPairs,
    /// d = 3, empty 2-sphere, no spherical edge (3-star hub).
    ThreeSpokes,
    /// d = 3, empty 2-sphere, one spherical edge (triangle with a pendant).
    ThreeSpokesOneTie,
}

/// Classifies a disconnected punctured 2-ball; `None` means the shape is not
/// exceptional (so its curvature at infinity is strictly negative), or the
/// ball is connected.
pub fn classify_exceptional(ls: &LocalStructure) -> Option<ExceptionalShape> {
    if punctured_components(ls).len() < 2 {
        return None;
    }
    let d = ls.degree();
    let s = ls.s2_size();
    let ties = ls.s1_edges.len();
    let mut outs = ls.out_deg.clone();
    outs.sort_unstable();
    match (d, s, ties, outs.as_slice()) {
        (2, 0, 0, _) => Some(ExceptionalShape::PathCenter),
        (2, 1, 0, [0, 1]) => Some(ExceptionalShape::NextToPendant),
        (2, 2, 0, [1, 1]) => Some(ExceptionalShape::TwoRadialPairs),
        (3, 0, 0, _) => Some(ExceptionalShape::ThreeSpokes),
        (3, 0, 1, _) => Some(ExceptionalShape::ThreeSpokesOneTie),
        _ => None,
    }
}

/// Exact curvature functions of the five exceptional shapes.
pub fn exceptional_curvature(shape: ExceptionalShape, n: Dimension) -> f64 {
    use ExceptionalShape::*;
    match shape {
        PathCenter => two_branch(2.5, 4.0, 2.0, 0.5, n),
        NextToPendant => match n {
            Dimension::Infinite => (5.0 - 17.0f64.sqrt()) / 4.0,
            Dimension::Finite(v) => {
                let root = (v * v + (4.0 * v - 8.0) * (4.0 * v - 8.0)).sqrt();
                1.25 - (8.0 + root) / (4.0 * v)
            }
        },
        TwoRadialPairs => two_branch(2.0, 4.0, 2.0, 0.0, n),
        ThreeSpokes | ThreeSpokesOneTie => two_branch(3.0, 6.0, 2.0, 0.0, n),
    }
}

fn two_branch(intercept: f64, slope: f64, n_break: f64, plateau: f64, n: Dimension) -> f64 {
    match n {
        Dimension::Finite(v) if v <= n_break => intercept - slope / v,
        _ => plateau,
    }
}
