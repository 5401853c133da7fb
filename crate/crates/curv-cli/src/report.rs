//! Serializable command outputs. The same structures back every renderer,
//! and the JSON form deserializes back to the in-memory value.

use curv::dim::Dimension;
use curv::engine::{CurvaturePoint, CurvatureReport};
use curv::graph::LaplacianKind;
use curv::star::FKTag;
use serde::{Deserialize, Serialize};

/// `curvature` output: one full report per selected vertex, plus an
/// optional whole-graph CD verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureOut {
    pub kind: LaplacianKind,
    pub reports: Vec<CurvatureReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cd: Option<CdSummary>,
}

/// Whole-graph CD(k, ·) verdict across the requested grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdSummary {
    pub k: f64,
    pub ok: bool,
    /// Smallest curvature over all vertices and grid points.
    pub min_k: f64,
    pub witness_vertex: usize,
    pub witness_n: Dimension,
    /// Vertices violating the bound at some grid point, ascending.
    pub failing_vertices: Vec<usize>,
}

/// `function` output: flat samples in (vertex, n) order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionOut {
    pub kind: LaplacianKind,
    pub rows: Vec<SampleRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub vertex: usize,
    pub n: Dimension,
    pub k: f64,
    pub sharp: bool,
}

/// `analyze` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOut {
    pub kind: LaplacianKind,
    pub vertex_count: usize,
    pub edge_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub srg: Option<SrgSummary>,
    pub vertices: Vec<VertexAnalysis>,
}

/// Strong-regularity certificate and the resulting closed-form curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrgSummary {
    pub n: usize,
    pub d: usize,
    pub alpha: usize,
    pub beta: usize,
    pub curve: CurveShape,
    pub k_at_infty: f64,
}

/// Serializable mirror of a curvature-function shape tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum CurveShape {
    Affine { a: f64, b: f64 },
    TwoBranch { a: f64, b: f64, n_break: f64 },
    Surd,
    EngineBacked { vertex: usize },
    Star,
}

impl From<&FKTag> for CurveShape {
    fn from(tag: &FKTag) -> Self {
        match *tag {
            FKTag::Affine { a, b } => CurveShape::Affine { a, b },
            FKTag::TwoBranch { a, b, n_break } => CurveShape::TwoBranch { a, b, n_break },
            FKTag::Surd => CurveShape::Surd,
            FKTag::EngineBacked { vertex } => CurveShape::EngineBacked { vertex },
            FKTag::Star => CurveShape::Star,
        }
    }
}

impl CurveShape {
    /// Human rendering, e.g. `K(N) = 3 - 12/N for N <= 12, then 2`.
    pub fn describe(&self) -> String {
        let f = crate::commands::fmt_f;
        match self {
            CurveShape::Affine { a, b } => format!("K(N) = {} - {}/N", f(*a), f(*b)),
            CurveShape::TwoBranch { a, b, n_break } => format!(
                "K(N) = {} - {}/N for N <= {}, then {}",
                f(*a),
                f(*b),
                f(*n_break),
                f(*a - *b / *n_break)
            ),
            CurveShape::Surd => "algebraic (square-root) shape".into(),
            CurveShape::EngineBacked { vertex } => format!("engine-backed at vertex {vertex}"),
            CurveShape::Star => "*-product".into(),
        }
    }
}

/// Per-vertex structural diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexAnalysis {
    pub vertex: usize,
    pub label: String,
    pub degree: usize,
    pub s2_size: usize,
    pub av1_plus: f64,
    /// Out-degrees of the 1-sphere vertices, in sphere order.
    pub out_degrees: Vec<usize>,
    pub s1_out_regular: bool,
    pub k_zero_upper: f64,
    pub k_at_infty: f64,
    /// Largest N at which the curvature attains its upper bound
    /// (non-normalized kind at out-regular vertices; `None` otherwise).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sharp_threshold: Option<Dimension>,
    pub sharp_range: String,
    pub punctured_components: usize,
    /// `(|S1 part|, |S2 part|)` of each punctured 2-ball component.
    pub component_shapes: Vec<(usize, usize)>,
    /// Name of the exceptional disconnected shape, when the vertex is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exceptional: Option<String>,
    /// Second-smallest eigenvalue of the combined 1-sphere Laplacian
    /// (degree >= 2 only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    /// Eigenvalues of the 1-sphere adjacency matrix, ascending.
    pub s1_adjacency_spectrum: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s2_bound: Option<S2BoundOut>,
    /// Spectral-gap criterion for `K(inf) >= 0` (out-regular, degree >= 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonneg_at_infty: Option<bool>,
}

/// Tree-comparison bound on the 2-sphere size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S2BoundOut {
    pub bound: f64,
    pub actual: usize,
    pub ok: bool,
}

/// `product` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductOut {
    pub left: FactorOut,
    pub right: FactorOut,
    pub product_vertex_count: usize,
    pub product_edge_count: usize,
    /// Index of the product vertex `(left, right)`.
    pub product_vertex: usize,
    pub rows: Vec<ProductRow>,
    /// Largest |k_star - k_engine| over the grid.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorOut {
    pub spec: String,
    pub class: String,
    pub vertex: usize,
    pub vertex_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRow {
    pub n: Dimension,
    /// The *-product of the factor curvature functions.
    pub k_star: f64,
    /// The curvature engine on the product graph.
    pub k_engine: f64,
    pub sharp: bool,
}

/// `check-cd` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckCdOut {
    pub kind: LaplacianKind,
    pub k: f64,
    pub ok: bool,
    pub results: Vec<CdAtN>,
}

/// Verdict at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdAtN {
    pub n: Dimension,
    pub ok: bool,
    pub min_k: f64,
    pub witness_vertex: usize,
    /// Vertices below the bound at this dimension, ascending.
    pub failing: Vec<usize>,
    pub points: Vec<(usize, CurvaturePoint)>,
}
