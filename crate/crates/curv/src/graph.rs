//! Graphs, Laplacian kinds, and the local structure of 2-balls.
//!
//! Curvature at a vertex `x` depends only on the incomplete 2-ball `B2(x)`:
//! the center, its 1-sphere `S1(x)`, the 2-sphere `S2(x)`, and the edges
//! inside `{x} ∪ S1` plus the radial edges `S1 - S2`. Edges inside `S2` are
//! irrelevant and are dropped during extraction, so any finite host graph
//! containing the 2-ball yields the same curvature.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("loop edge at vertex {0}")]
    LoopEdge(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge endpoint {0} out of range (vertex count {1})")]
    VertexOutOfRange(usize, usize),
    #[error("edge weight must be positive and finite, got {0}")]
    NonPositiveWeight(f64),
    #[error("vertex measure must be positive and finite, got {0}")]
    NonPositiveMeasure(f64),
    #[error("expected {expected} {what}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("vertex {0} is isolated; curvature is undefined at degree 0")]
    IsolatedVertex(usize),
    #[error("no vertex {0} (vertex count {1})")]
    NoSuchVertex(usize, usize),
    #[error("{kind} Laplacian requires unit edge weights, but edge {u}-{v} has weight {w}")]
    NonUnitWeights {
        kind: &'static str,
        u: usize,
        v: usize,
        w: f64,
    },
    #[error("Cartesian product requires unit weights and unit measure on both factors")]
    ProductRequiresUnitGraphs,
    #[error("edge list line {line}: {msg}")]
    ParseEdge { line: usize, msg: String },
    #[error("measure line {line}: {msg}")]
    ParseMeasure { line: usize, msg: String },
    #[error("graph has no vertices")]
    Empty,
    #[error("unknown Laplacian kind {0:?} (expected non-normalized | normalized | general)")]
    UnknownKind(String),
}

/// Which Laplacian the curvature refers to.
///
/// * `NonNormalized`: unit weights, unit vertex measure.
/// * `Normalized`: unit weights, vertex measure = degree.
/// * `General`: the stored edge weights and vertex measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplacianKind {
    NonNormalized,
    Normalized,
    General,
}

impl LaplacianKind {
    /// NonNormalized and Normalized modes are only meaningful on unit-weight
    /// graphs; General accepts anything.
    pub fn validate(&self, g: &Graph) -> Result<(), GraphError> {
        match self {
            LaplacianKind::General => Ok(()),
            _ => {
                for u in 0..g.n() {
                    for (idx, &v) in g.nbrs[u].iter().enumerate() {
                        let w = g.wts[u][idx];
                        if u < v && w != 1.0 {
                            return Err(GraphError::NonUnitWeights {
                                kind: self.name(),
                                u,
                                v,
                                w,
                            });
                        }
                    }
                }
                Ok(())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LaplacianKind::NonNormalized => "non-normalized",
            LaplacianKind::Normalized => "normalized",
            LaplacianKind::General => "general",
        }
    }
}

impl fmt::Display for LaplacianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LaplacianKind {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "nonnormalized" | "nonnorm" | "unnormalized" => Ok(LaplacianKind::NonNormalized),
            "normalized" | "norm" | "nor" => Ok(LaplacianKind::Normalized),
            "general" | "weighted" => Ok(LaplacianKind::General),
            _ => Err(GraphError::UnknownKind(s.to_string())),
        }
    }
}

/// Finite simple graph with optional positive edge weights, vertex measure,
/// and vertex labels. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    nbrs: Vec<Vec<usize>>,
    wts: Vec<Vec<f64>>,
    measure: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Unit-weight, unit-measure graph on `n` vertices from an edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let unit: Vec<f64> = vec![1.0; edges.len()];
        Self::build(n, edges, Some(&unit), None)
    }

    /// Fully general builder. `weights`/`measure` default to all-ones.
    pub fn build(
        n: usize,
        edges: &[(usize, usize)],
        weights: Option<&[f64]>,
        measure: Option<&[f64]>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if let Some(w) = weights {
            if w.len() != edges.len() {
                return Err(GraphError::LengthMismatch {
                    what: "edge weights",
                    expected: edges.len(),
                    got: w.len(),
                });
            }
        }
        if let Some(m) = measure {
            if m.len() != n {
                return Err(GraphError::LengthMismatch {
                    what: "vertex measures",
                    expected: n,
                    got: m.len(),
                });
            }
        }
        let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::LoopEdge(u));
            }
            let w = weights.map_or(1.0, |ws| ws[e]);
            if !(w.is_finite() && w > 0.0) {
                return Err(GraphError::NonPositiveWeight(w));
            }
            if adj[u].insert(v, w).is_some() {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            adj[v].insert(u, w);
        }
        let mu: Vec<f64> = measure.map_or_else(|| vec![1.0; n], |m| m.to_vec());
        for &m in &mu {
            if !(m.is_finite() && m > 0.0) {
                return Err(GraphError::NonPositiveMeasure(m));
            }
        }
        let mut nbrs = Vec::with_capacity(n);
        let mut wts = Vec::with_capacity(n);
        for a in adj {
            let mut ns = Vec::with_capacity(a.len());
            let mut ws = Vec::with_capacity(a.len());
            for (v, w) in a {
                ns.push(v);
                ws.push(w);
            }
            nbrs.push(ns);
            wts.push(ws);
        }
        Ok(Graph {
            nbrs,
            wts,
            measure: mu,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n() {
            return Err(GraphError::LengthMismatch {
                what: "labels",
                expected: self.n(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_measure(mut self, measure: Vec<f64>) -> Result<Self, GraphError> {
        if measure.len() != self.n() {
            return Err(GraphError::LengthMismatch {
                what: "vertex measures",
                expected: self.n(),
                got: measure.len(),
            });
        }
        for &m in &measure {
            if !(m.is_finite() && m > 0.0) {
                return Err(GraphError::NonPositiveMeasure(m));
            }
        }
        self.measure = measure;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.nbrs.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.nbrs[v].len()
    }

    /// Sum of incident edge weights.
    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.wts[v].iter().sum()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.nbrs[v]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.nbrs[u]
            .binary_search(&v)
            .ok()
            .map(|idx| self.wts[u][idx])
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.nbrs[u].binary_search(&v).is_ok()
    }

    pub fn measure(&self, v: usize) -> f64 {
        self.measure[v]
    }

    pub fn edge_count(&self) -> usize {
        self.nbrs.iter().map(|ns| ns.len()).sum::<usize>() / 2
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(ls) => ls[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n() {
            return Err(GraphError::NoSuchVertex(v, self.n()));
        }
        Ok(())
    }

    /// All edges as (u, v, w) with u < v, ascending.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n() {
            for (idx, &v) in self.nbrs[u].iter().enumerate() {
                if u < v {
                    out.push((u, v, self.wts[u][idx]));
                }
            }
        }
        out
    }

    /// Parses the edge-list text format: one edge per line as `u v [w]`,
    /// `#` starts a comment. Vertex ids are non-negative integers or quoted
    /// names ("..."). If every id is an integer, ids are used directly
    /// (vertex count = max id + 1); otherwise ids are assigned by first
    /// appearance and kept as labels.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        enum RawId {
            Int(usize),
            Name(String),
        }
        fn parse_id(tok: &str, line: usize) -> Result<RawId, GraphError> {
            if let Some(stripped) = tok.strip_prefix('"') {
                let name = stripped.strip_suffix('"').ok_or(GraphError::ParseEdge {
                    line,
                    msg: format!("unterminated quoted name {tok:?}"),
                })?;
                return Ok(RawId::Name(name.to_string()));
            }
            tok.parse::<usize>()
                .map(RawId::Int)
                .map_err(|_| GraphError::ParseEdge {
                    line,
                    msg: format!("vertex id {tok:?} is neither a non-negative integer nor a quoted name"),
                })
        }
        let mut raw_edges: Vec<(RawId, RawId, f64)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 && toks.len() != 3 {
                return Err(GraphError::ParseEdge {
                    line: lineno + 1,
                    msg: format!("expected 'u v [w]', got {} tokens", toks.len()),
                });
            }
            let u = parse_id(toks[0], lineno + 1)?;
            let v = parse_id(toks[1], lineno + 1)?;
            let w = if toks.len() == 3 {
                toks[2].parse::<f64>().map_err(|_| GraphError::ParseEdge {
                    line: lineno + 1,
                    msg: format!("bad weight {:?}", toks[2]),
                })?
            } else {
                1.0
            };
            raw_edges.push((u, v, w));
        }
        if raw_edges.is_empty() {
            return Err(GraphError::Empty);
        }
        let all_int = raw_edges
            .iter()
            .all(|(u, v, _)| matches!(u, RawId::Int(_)) && matches!(v, RawId::Int(_)));
        let mut labels: Vec<String> = Vec::new();
        let mut index: BTreeMap<RawId, usize> = BTreeMap::new();
        let mut resolve = |id: &RawId, labels: &mut Vec<String>| -> usize {
            if let Some(&i) = index.get(id) {
                return i;
            }
            let i = labels.len();
            labels.push(match id {
                RawId::Int(k) => k.to_string(),
                RawId::Name(s) => s.clone(),
            });
            index.insert(id.clone(), i);
            i
        };
        let mut edges = Vec::with_capacity(raw_edges.len());
        let mut weights = Vec::with_capacity(raw_edges.len());
        let n;
        if all_int {
            let mut max_id = 0usize;
            for (u, v, w) in &raw_edges {
                let (RawId::Int(u), RawId::Int(v)) = (u, v) else {
                    unreachable!()
                };
                max_id = max_id.max(*u).max(*v);
                edges.push((*u, *v));
                weights.push(*w);
            }
            n = max_id + 1;
        } else {
            for (u, v, w) in &raw_edges {
                let ui = resolve(u, &mut labels);
                let vi = resolve(v, &mut labels);
                edges.push((ui, vi));
                weights.push(*w);
            }
            n = labels.len();
        }
        let g = Graph::build(n, &edges, Some(&weights), None)?;
        if all_int {
            Ok(g)
        } else {
            g.with_labels(labels)
        }
    }

    /// Parses a measure file (`vertex value` per line, `#` comments) and
    /// returns a copy of the graph carrying it. Unlisted vertices keep
    /// measure 1.
    pub fn parse_measure(&self, text: &str) -> Result<Self, GraphError> {
        let mut mu = vec![1.0; self.n()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(GraphError::ParseMeasure {
                    line: lineno + 1,
                    msg: format!("expected 'vertex value', got {} tokens", toks.len()),
                });
            }
            let v: usize = toks[0].parse().map_err(|_| GraphError::ParseMeasure {
                line: lineno + 1,
                msg: format!("bad vertex id {:?}", toks[0]),
            })?;
            if v >= self.n() {
                return Err(GraphError::ParseMeasure {
                    line: lineno + 1,
                    msg: format!("vertex {v} out of range"),
                });
            }
            let m: f64 = toks[1].parse().map_err(|_| GraphError::ParseMeasure {
                line: lineno + 1,
                msg: format!("bad measure {:?}", toks[1]),
            })?;
            mu[v] = m;
        }
        self.clone().with_measure(mu)
    }
}

/// The incomplete 2-ball around a center vertex, with all degree counters.
///
/// Orders are deterministic: `s1` and `s2` ascending by vertex index; every
/// matrix row/column in downstream modules follows (center, s1..., s2...).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalStructure {
    pub center: usize,
    /// 1-sphere, ascending.
    pub s1: Vec<usize>,
    /// 2-sphere, ascending.
    pub s2: Vec<usize>,
    /// Stored weight of the center-to-`s1[i]` edge.
    pub w_center: Vec<f64>,
    /// Spherical edges inside S1 as (i, j, w) with i < j (local indices).
    pub s1_edges: Vec<(usize, usize, f64)>,
    /// Radial edges as (s1 local index, s2 local index, w).
    pub radial_edges: Vec<(usize, usize, f64)>,
    /// Measure of the center and of each S1 vertex (stored graph measure).
    pub mu_center: f64,
    pub mu_s1: Vec<f64>,
    /// Unweighted out/spherical degree per S1 vertex, in-degree per S2 vertex.
    pub out_deg: Vec<usize>,
    pub sph_deg: Vec<usize>,
    pub in_deg: Vec<usize>,
    /// Full unweighted degree of each S1 vertex in the host graph.
    pub deg_s1: Vec<usize>,
}

/// Extracts the local structure at `x`. Errors on isolated vertices.
pub fn local_structure(g: &Graph, x: usize) -> Result<LocalStructure, GraphError> {
    g.check_vertex(x)?;
    let d = g.degree(x);
    if d == 0 {
        return Err(GraphError::IsolatedVertex(x));
    }
    let s1: Vec<usize> = g.neighbors(x).to_vec();
    let mut s1_pos: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &y) in s1.iter().enumerate() {
        s1_pos.insert(y, i);
    }
    let mut s2: Vec<usize> = Vec::new();
    for &y in &s1 {
        for &u in g.neighbors(y) {
            if u != x && !s1_pos.contains_key(&u) {
                s2.push(u);
            }
        }
    }
    s2.sort_unstable();
    s2.dedup();
    let mut s2_pos: BTreeMap<usize, usize> = BTreeMap::new();
    for (j, &z) in s2.iter().enumerate() {
        s2_pos.insert(z, j);
    }

    let w_center: Vec<f64> = s1.iter().map(|&y| g.weight(x, y).unwrap()).collect();
    let mut s1_edges = Vec::new();
    let mut radial_edges = Vec::new();
    let mut out_deg = vec![0usize; s1.len()];
    let mut sph_deg = vec![0usize; s1.len()];
    let mut in_deg = vec![0usize; s2.len()];
    for (i, &y) in s1.iter().enumerate() {
        for (idx, &u) in g.neighbors(y).iter().enumerate() {
            if u == x {
                continue;
            }
            let w = g.wts[y][idx];
            if let Some(&j) = s1_pos.get(&u) {
                sph_deg[i] += 1;
                if i < j {
                    s1_edges.push((i, j, w));
                }
            } else {
                let j = s2_pos[&u];
                out_deg[i] += 1;
                in_deg[j] += 1;
                radial_edges.push((i, j, w));
            }
        }
    }
    Ok(LocalStructure {
        center: x,
        deg_s1: s1.iter().map(|&y| g.degree(y)).collect(),
        mu_center: g.measure(x),
        mu_s1: s1.iter().map(|&y| g.measure(y)).collect(),
        s1,
        s2,
        w_center,
        s1_edges,
        radial_edges,
        out_deg,
        sph_deg,
        in_deg,
    })
}

impl LocalStructure {
    /// Unweighted degree of the center.
    pub fn degree(&self) -> usize {
        self.s1.len()
    }

    pub fn s2_size(&self) -> usize {
        self.s2.len()
    }

    /// Order of the full local matrix: 1 + |S1| + |S2|.
    pub fn ball_order(&self) -> usize {
        1 + self.s1.len() + self.s2.len()
    }

    /// Average out-degree over the 1-sphere (unweighted).
    pub fn av1_plus(&self) -> f64 {
        self.out_deg.iter().sum::<usize>() as f64 / self.degree() as f64
    }

    /// Number of triangles containing the center.
    pub fn triangle_count(&self) -> usize {
        self.s1_edges.len()
    }

    /// All S1 out-degrees equal? Returns that common degree if so.
    pub fn s1_out_regular(&self) -> Option<usize> {
        let first = *self.out_deg.first()?;
        self.out_deg.iter().all(|&d| d == first).then_some(first)
    }

    /// Global vertex ids in matrix row order (center, S1..., S2...).
    pub fn vertex_order(&self) -> Vec<usize> {
        let mut v = Vec::with_capacity(self.ball_order());
        v.push(self.center);
        v.extend_from_slice(&self.s1);
        v.extend_from_slice(&self.s2);
        v
    }
}

/// One connected component of the punctured 2-ball (the 2-ball minus the
/// center and its incident edges). Members are local indices into `s1`/`s2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturedComponent {
    pub s1_members: Vec<usize>,
    pub s2_members: Vec<usize>,
}

impl PuncturedComponent {
    /// (r, s) = (#S1 vertices, #S2 vertices).
    pub fn shape(&self) -> (usize, usize) {
        (self.s1_members.len(), self.s2_members.len())
    }
}

/// Connected components of S1 ∪ S2 under spherical + radial edges,
/// deterministically ordered by smallest S1 member.
pub fn punctured_components(ls: &LocalStructure) -> Vec<PuncturedComponent> {
    let d = ls.degree();
    let total = d + ls.s2_size();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let union = |parent: &mut [usize], a: usize, b: usize| {
        let ra = find(parent, a);
        let rb = find(parent, b);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for &(i, j, _) in &ls.s1_edges {
        union(&mut parent, i, j);
    }
    for &(i, j, _) in &ls.radial_edges {
        union(&mut parent, i, d + j);
    }
    let mut groups: BTreeMap<usize, PuncturedComponent> = BTreeMap::new();
    for v in 0..total {
        let root = find(&mut parent, v);
        let entry = groups.entry(root).or_insert_with(|| PuncturedComponent {
            s1_members: vec![],
            s2_members: vec![],
        });
        if v < d {
            entry.s1_members.push(v);
        } else {
            entry.s2_members.push(v - d);
        }
    }
    groups.into_values().collect()
}
