//! Command implementations and the table/JSON/CSV renderers.
//!
//! Each `cmd_*` produces a serializable report; each `render_*` turns one
//! into terminal text. Keeping the two apart lets tests compare the JSON
//! form against the in-memory value directly.

use rayon::prelude::*;
use serde::Serialize;

use curv::dim::Dimension;
use curv::engine::{
    check_cd, curvature_at, curvature_function, n_sharp_threshold, CurvatureReport,
};
use curv::graph::{local_structure, punctured_components, Graph, LaplacianKind, LocalStructure};
use curv::linalg::{SymMatrix, Tolerances};
use curv::matrices::{k_zero_upper, kind_view};
use curv::spectral::{
    classify_exceptional, nonneg_criterion, s2_cardinality_bound, sphere_graphs, SpectralError,
};
use curv::star::{cartesian_product, star, FKFunction};

use crate::args::{
    parse_factor, resolve_vertices, AnalyzeArgs, CheckCdArgs, CurvatureArgs, Format, FunctionArgs,
    ProductArgs,
};
use crate::report::{
    AnalyzeOut, CdAtN, CdSummary, CheckCdOut, CurvatureOut, CurveShape, FactorOut, FunctionOut,
    ProductOut, ProductRow, S2BoundOut, SampleRow, SrgSummary, VertexAnalysis,
};
use crate::{usage, CliError};

/// `{:.6}` with trailing zeros trimmed; the table format for floats.
pub fn fmt_f(x: f64) -> String {
    let mut s = format!("{x:.6}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn fmt_dim(n: Dimension) -> String {
    match n {
        Dimension::Infinite => "inf".into(),
        Dimension::Finite(v) => fmt_f(v),
    }
}

fn json_of<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Math(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Fixed-width left-aligned text table.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let render_row = |cells: &[String]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{:<width$}", cell, width = widths[i]));
        }
        line.trim_end().to_string()
    };
    let mut out = String::new();
    out.push_str(&render_row(
        &headers.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
    ));
    out.push('\n');
    for row in rows {
        out.push_str(&render_row(row));
        out.push('\n');
    }
    out
}

fn vertex_heading(report_vertex: usize, label: &str) -> String {
    if label == report_vertex.to_string() {
        format!("vertex {report_vertex}")
    } else {
        format!("vertex {report_vertex} ({label})")
    }
}

// ---------------------------------------------------------------- curvature

pub fn cmd_curvature(a: &CurvatureArgs) -> Result<CurvatureOut, CliError> {
    let kind = a.kind.resolve()?;
    let tol = a.tol.resolve()?;
    let grid = a.grid.resolve()?;
    let loaded = a.input.load(kind)?;
    let verts = resolve_vertices(&a.vertex.parse()?, &loaded.graph, loaded.family.as_ref())?;
    let reports = vertex_reports(&loaded.graph, &verts, kind, &grid, &tol)?;
    let cd = match a.check_cd {
        Some(k) => Some(cd_summary(&loaded.graph, kind, k, &grid, &tol)?),
        None => None,
    };
    Ok(CurvatureOut { kind, reports, cd })
}

fn vertex_reports(
    g: &Graph,
    verts: &[usize],
    kind: LaplacianKind,
    grid: &[Dimension],
    tol: &Tolerances,
) -> Result<Vec<CurvatureReport>, CliError> {
    verts
        .par_iter()
        .map(|&x| curvature_function(g, x, kind, grid, tol).map_err(CliError::from))
        .collect()
}

fn cd_summary(
    g: &Graph,
    kind: LaplacianKind,
    k: f64,
    grid: &[Dimension],
    tol: &Tolerances,
) -> Result<CdSummary, CliError> {
    let mut min_k = f64::INFINITY;
    let mut witness_vertex = 0;
    let mut witness_n = grid[0];
    let mut failing: Vec<usize> = Vec::new();
    let mut ok = true;
    for &n in grid {
        let c = check_cd(g, kind, k, n, tol)?;
        ok &= c.ok;
        if c.min_k < min_k {
            min_k = c.min_k;
            witness_vertex = c.witness_vertex;
            witness_n = n;
        }
        for (v, p) in &c.points {
            if p.k < k - tol.agree_tol {
                failing.push(*v);
            }
        }
    }
    failing.sort_unstable();
    failing.dedup();
    Ok(CdSummary {
        k,
        ok,
        min_k,
        witness_vertex,
        witness_n,
        failing_vertices: failing,
    })
}

pub fn render_curvature(out: &CurvatureOut, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json_of(out),
        Format::Csv => {
            let mut s = String::from("vertex,n,k,sharp\n");
            for r in &out.reports {
                for p in &r.samples {
                    s.push_str(&format!("{},{},{},{}\n", r.vertex, p.n, p.k, p.sharp));
                }
            }
            Ok(s)
        }
        Format::Table => {
            let mut s = format!("kind: {}\n", out.kind);
            for r in &out.reports {
                s.push('\n');
                s.push_str(&format!(
                    "{}: degree {}, |S2| {}, av1+ {}, S1-out-regular {}\n",
                    vertex_heading(r.vertex, &r.label),
                    r.degree,
                    r.s2_size,
                    fmt_f(r.av1_plus),
                    if r.s1_out_regular { "yes" } else { "no" },
                ));
                s.push_str(&format!(
                    "  K0 = {}, K(inf) = {}, sharp range: {}\n",
                    fmt_f(r.k_zero_upper),
                    fmt_f(r.k_at_infty),
                    sharp_range_text(r.kind, r.s1_out_regular, r.n_sharp_threshold),
                ));
                let rows: Vec<Vec<String>> = r
                    .samples
                    .iter()
                    .map(|p| {
                        vec![
                            fmt_dim(p.n),
                            fmt_f(p.k),
                            p.sharp.to_string(),
                            fmt_f(p.lambda_star),
                            p.zero_mult.to_string(),
                        ]
                    })
                    .collect();
                for line in table(&["n", "k", "sharp", "lambda*", "mult"], &rows).lines() {
                    s.push_str("  ");
                    s.push_str(line);
                    s.push('\n');
                }
            }
            if let Some(cd) = &out.cd {
                s.push('\n');
                s.push_str(&render_cd_summary(cd));
            }
            Ok(s)
        }
    }
}

fn render_cd_summary(cd: &CdSummary) -> String {
    let mut s = format!(
        "CD({}): {} — min K = {} at vertex {}, N = {}\n",
        fmt_f(cd.k),
        if cd.ok { "PASS" } else { "FAIL" },
        fmt_f(cd.min_k),
        cd.witness_vertex,
        fmt_dim(cd.witness_n),
    );
    if !cd.failing_vertices.is_empty() {
        let list: Vec<String> = cd.failing_vertices.iter().map(|v| v.to_string()).collect();
        s.push_str(&format!("failing vertices: {}\n", list.join(", ")));
    }
    s
}

fn sharp_range_text(
    kind: LaplacianKind,
    out_regular: bool,
    threshold: Option<Dimension>,
) -> String {
    if kind != LaplacianKind::NonNormalized {
        return "n/a (non-normalized kind only)".into();
    }
    match threshold {
        None => {
            if out_regular {
                "unknown".into()
            } else {
                "never (not S1-out-regular)".into()
            }
        }
        Some(Dimension::Infinite) => "every N".into(),
        Some(Dimension::Finite(t)) => format!("N <= {}", fmt_f(t)),
    }
}

// ----------------------------------------------------------------- function

pub fn cmd_function(a: &FunctionArgs) -> Result<FunctionOut, CliError> {
    let kind = a.kind.resolve()?;
    let tol = a.tol.resolve()?;
    let grid = a.grid.resolve()?;
    let loaded = a.input.load(kind)?;
    let verts = resolve_vertices(&a.vertex.parse()?, &loaded.graph, loaded.family.as_ref())?;
    let reports = vertex_reports(&loaded.graph, &verts, kind, &grid, &tol)?;
    let rows = reports
        .iter()
        .flat_map(|r| {
            r.samples.iter().map(|p| SampleRow {
                vertex: r.vertex,
                n: p.n,
                k: p.k,
                sharp: p.sharp,
            })
        })
        .collect();
    Ok(FunctionOut { kind, rows })
}

pub fn render_function(out: &FunctionOut, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json_of(out),
        Format::Csv => {
            let mut s = String::from("vertex,n,k,sharp\n");
            for r in &out.rows {
                s.push_str(&format!("{},{},{},{}\n", r.vertex, r.n, r.k, r.sharp));
            }
            Ok(s)
        }
        Format::Table => {
            let mut s = format!("kind: {}\n", out.kind);
            let rows: Vec<Vec<String>> = out
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.vertex.to_string(),
                        fmt_dim(r.n),
                        fmt_f(r.k),
                        r.sharp.to_string(),
                    ]
                })
                .collect();
            s.push_str(&table(&["vertex", "n", "k", "sharp"], &rows));
            Ok(s)
        }
    }
}

// ------------------------------------------------------------------ analyze

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<AnalyzeOut, CliError> {
    let kind = a.kind.resolve()?;
    let tol = a.tol.resolve()?;
    let loaded = a.input.load(kind)?;
    let g = &loaded.graph;
    let verts = resolve_vertices(&a.vertex.parse()?, g, loaded.family.as_ref())?;
    let srg = match curv::families::srg_params(g) {
        Ok(p) => {
            let f = curv::families::srg_curvature(g, verts[0])?;
            Some(SrgSummary {
                n: p.n,
                d: p.d,
                alpha: p.alpha,
                beta: p.beta,
                curve: CurveShape::from(&f.tag),
                k_at_infty: f.at_infinity,
            })
        }
        Err(curv::families::FamilyError::NotStronglyRegular) => None,
        Err(e) => return Err(e.into()),
    };
    let vertices = verts
        .par_iter()
        .map(|&x| analyze_vertex(g, x, kind, &tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AnalyzeOut {
        kind,
        vertex_count: g.n(),
        edge_count: g.edge_count(),
        srg,
        vertices,
    })
}

fn analyze_vertex(
    g: &Graph,
    x: usize,
    kind: LaplacianKind,
    tol: &Tolerances,
) -> Result<VertexAnalysis, CliError> {
    let ls = local_structure(g, x)?;
    let kv = kind_view(&ls, kind);
    let k_at_infty = curvature_at(g, x, kind, Dimension::Infinite, tol)?.k;
    let threshold = if kind == LaplacianKind::NonNormalized {
        n_sharp_threshold(&ls, tol)?
    } else {
        None
    };
    let comps = punctured_components(&ls);
    let sphere = match sphere_graphs(&ls) {
        Ok(s) => Some(s),
        Err(SpectralError::DegreeTooSmall(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let s2_bound = match s2_cardinality_bound(&ls) {
        Ok(b) => Some(S2BoundOut {
            bound: b.bound,
            actual: b.actual,
            ok: b.ok,
        }),
        Err(SpectralError::DegreeTooSmall(_) | SpectralError::NotApplicable(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let out_regular = ls.s1_out_regular().is_some();
    let nonneg_at_infty = match (&sphere, out_regular) {
        (Some(s), true) => Some(nonneg_criterion(ls.degree(), ls.av1_plus(), s.lambda1)),
        _ => None,
    };
    Ok(VertexAnalysis {
        vertex: x,
        label: g.label(x),
        degree: ls.degree(),
        s2_size: ls.s2_size(),
        av1_plus: ls.av1_plus(),
        out_degrees: ls.out_deg.clone(),
        s1_out_regular: out_regular,
        k_zero_upper: k_zero_upper(&kv),
        k_at_infty,
        n_sharp_threshold: threshold,
        sharp_range: sharp_range_text(kind, out_regular, threshold),
        punctured_components: comps.len(),
        component_shapes: comps.iter().map(|c| c.shape()).collect(),
        exceptional: classify_exceptional(&ls).map(|shape| format!("{shape:?}")),
        lambda1: sphere.as_ref().map(|s| s.lambda1),
        s1_adjacency_spectrum: s1_spectrum(&ls, tol)?,
        s2_bound,
        nonneg_at_infty,
    })
}

fn s1_spectrum(ls: &LocalStructure, tol: &Tolerances) -> Result<Vec<f64>, CliError> {
    let d = ls.degree();
    let mut adj = SymMatrix::zeros(d);
    for &(i, j, w) in &ls.s1_edges {
        adj.set(i, j, w);
    }
    Ok(adj.eigen(tol)?.values)
}

pub fn render_analyze(out: &AnalyzeOut, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json_of(out),
        Format::Csv => Err(usage("analyze has no CSV form (use table or json)")),
        Format::Table => {
            let mut s = format!(
                "kind: {}\ngraph: {} vertices, {} edges\n",
                out.kind, out.vertex_count, out.edge_count
            );
            if let Some(srg) = &out.srg {
                s.push_str(&format!(
                    "strongly regular: ({}, {}, {}, {})\n  {}\n  K(inf) = {}\n",
                    srg.n,
                    srg.d,
                    srg.alpha,
                    srg.beta,
                    srg.curve.describe(),
                    fmt_f(srg.k_at_infty),
                ));
            }
            for v in &out.vertices {
                s.push('\n');
                s.push_str(&render_vertex_analysis(v));
            }
            Ok(s)
        }
    }
}

fn render_vertex_analysis(v: &VertexAnalysis) -> String {
    let mut s = format!("{}:\n", vertex_heading(v.vertex, &v.label));
    s.push_str(&format!(
        "  degree {}, |S2| {}, av1+ {}\n",
        v.degree,
        v.s2_size,
        fmt_f(v.av1_plus)
    ));
    let degs: Vec<String> = v.out_degrees.iter().map(|d| d.to_string()).collect();
    if v.s1_out_regular {
        s.push_str(&format!(
            "  S1-out-regular: yes (out-degree {})\n",
            v.out_degrees.first().copied().unwrap_or(0)
        ));
    } else {
        s.push_str(&format!(
            "  S1-out-regular: no (out-degrees {})\n",
            degs.join(", ")
        ));
    }
    let shapes: Vec<String> = v
        .component_shapes
        .iter()
        .map(|(a, b)| format!("({a}, {b})"))
        .collect();
    s.push_str(&format!(
        "  punctured 2-ball components: {} [{}]\n",
        v.punctured_components,
        shapes.join(", ")
    ));
    if let Some(shape) = &v.exceptional {
        s.push_str(&format!("  exceptional shape: {shape}\n"));
    }
    let spec: Vec<String> = v.s1_adjacency_spectrum.iter().map(|e| fmt_f(*e)).collect();
    s.push_str(&format!("  sigma(A_S1): [{}]\n", spec.join(", ")));
    if let Some(l) = v.lambda1 {
        s.push_str(&format!("  lambda1(S1'') = {}\n", fmt_f(l)));
    }
    if let Some(b) = &v.s2_bound {
        s.push_str(&format!(
            "  |S2| bound: {} <= {} ({})\n",
            b.actual,
            fmt_f(b.bound),
            if b.ok { "ok" } else { "violated" }
        ));
    }
    if let Some(nn) = v.nonneg_at_infty {
        s.push_str(&format!(
            "  nonnegative at inf: {}\n",
            if nn { "yes" } else { "no" }
        ));
    }
    s.push_str(&format!(
        "  K0 = {}, K(inf) = {}\n  sharp range: {}\n",
        fmt_f(v.k_zero_upper),
        fmt_f(v.k_at_infty),
        v.sharp_range
    ));
    s
}

// ------------------------------------------------------------------ product

pub fn cmd_product(a: &ProductArgs) -> Result<ProductOut, CliError> {
    let tol = a.tol.resolve()?;
    let grid = a.grid.resolve()?;
    let kind = LaplacianKind::NonNormalized;
    let (lf, lc) = parse_factor(&a.left)?;
    let (rf, rc) = parse_factor(&a.right)?;
    let lg = lf.generate()?;
    let rg = rf.generate()?;
    let lv = lf.representative_vertex(lc)?;
    let rv = rf.representative_vertex(rc)?;
    let f = FKFunction::engine_backed(&lg, lv, kind, &tol)?;
    let h = FKFunction::engine_backed(&rg, rv, kind, &tol)?;
    let fh = star(&f, &h)?;
    let pg = cartesian_product(&lg, &rg)?;
    let pv = lv * rg.n() + rv;
    let mut rows = Vec::with_capacity(grid.len());
    let mut max_deviation: f64 = 0.0;
    for &n in &grid {
        let k_star = fh.eval(n);
        let point = curvature_at(&pg, pv, kind, n, &tol)?;
        max_deviation = max_deviation.max((k_star - point.k).abs());
        rows.push(ProductRow {
            n,
            k_star,
            k_engine: point.k,
            sharp: point.sharp,
        });
    }
    Ok(ProductOut {
        left: FactorOut {
            spec: a.left.clone(),
            class: lc.to_string(),
            vertex: lv,
            vertex_count: lg.n(),
        },
        right: FactorOut {
            spec: a.right.clone(),
            class: rc.to_string(),
            vertex: rv,
            vertex_count: rg.n(),
        },
        product_vertex_count: pg.n(),
        product_edge_count: pg.edge_count(),
        product_vertex: pv,
        rows,
        max_deviation,
    })
}

pub fn render_product(out: &ProductOut, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json_of(out),
        Format::Csv => {
            let mut s = String::from("vertex,n,k,sharp\n");
            for r in &out.rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    out.product_vertex, r.n, r.k_star, r.sharp
                ));
            }
            Ok(s)
        }
        Format::Table => {
            let mut s = format!(
                "product: {} (vertex {} of {}) x {} (vertex {} of {})\n",
                out.left.spec,
                out.left.vertex,
                out.left.vertex_count,
                out.right.spec,
                out.right.vertex,
                out.right.vertex_count,
            );
            s.push_str(&format!(
                "product graph: {} vertices, {} edges; evaluated at vertex {}\n",
                out.product_vertex_count, out.product_edge_count, out.product_vertex
            ));
            let rows: Vec<Vec<String>> = out
                .rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_dim(r.n),
                        fmt_f(r.k_star),
                        fmt_f(r.k_engine),
                        r.sharp.to_string(),
                    ]
                })
                .collect();
            s.push_str(&table(&["n", "k_star", "k_engine", "sharp"], &rows));
            s.push_str(&format!(
                "max |k_star - k_engine| = {:.3e}\n",
                out.max_deviation
            ));
            Ok(s)
        }
    }
}

// ----------------------------------------------------------------- check-cd

pub fn cmd_check_cd(a: &CheckCdArgs) -> Result<CheckCdOut, CliError> {
    let kind = a.kind.resolve()?;
    let tol = a.tol.resolve()?;
    let grid = a.grid.resolve()?;
    let loaded = a.input.load(kind)?;
    let mut results = Vec::with_capacity(grid.len());
    let mut ok = true;
    for &n in &grid {
        let c = check_cd(&loaded.graph, kind, a.k, n, &tol)?;
        ok &= c.ok;
        let failing: Vec<usize> = c
            .points
            .iter()
            .filter(|(_, p)| p.k < a.k - tol.agree_tol)
            .map(|(v, _)| *v)
            .collect();
        results.push(CdAtN {
            n,
            ok: c.ok,
            min_k: c.min_k,
            witness_vertex: c.witness_vertex,
            failing,
            points: c.points,
        });
    }
    Ok(CheckCdOut {
        kind,
        k: a.k,
        ok,
        results,
    })
}

pub fn render_check_cd(out: &CheckCdOut, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json_of(out),
        Format::Csv => {
            let mut s = String::from("vertex,n,k,sharp\n");
            for r in &out.results {
                for (v, p) in &r.points {
                    s.push_str(&format!("{},{},{},{}\n", v, p.n, p.k, p.sharp));
                }
            }
            Ok(s)
        }
        Format::Table => {
            let mut s = format!("kind: {}\nCD({}):\n", out.kind, fmt_f(out.k));
            for r in &out.results {
                let mut line = format!(
                    "  N = {}: {}  min K = {} at vertex {}",
                    fmt_dim(r.n),
                    if r.ok { "PASS" } else { "FAIL" },
                    fmt_f(r.min_k),
                    r.witness_vertex
                );
                if !r.failing.is_empty() {
                    let list: Vec<String> = r.failing.iter().map(|v| v.to_string()).collect();
                    line.push_str(&format!("; failing: {}", list.join(", ")));
                }
                s.push_str(&line);
                s.push('\n');
            }
            s.push_str(&format!(
                "verdict: {}\n",
                if out.ok { "PASS" } else { "FAIL" }
            ));
            Ok(s)
        }
    }
}
