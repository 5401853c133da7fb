//! Named graph families, their closed-form curvature functions, and two
//! analyzers (Coxeter diagrams, strongly regular graphs).
//!
//! Every generator is deterministic: the same spec always produces the same
//! vertex numbering, so vertex classes can point at concrete indices.

use crate::graph::{local_structure, Graph, GraphError};
use crate::linalg::{LinalgError, SymMatrix, Tolerances};
use crate::star::{cartesian_product, FKFunction, FKTag};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("bad family parameters: {0}")]
    BadParams(String),
    #[error("Paley({0}) needs a prime modulus; prime powers are not generated")]
    PaleyNonPrime(u64),
    #[error("no closed-form curvature for this family / vertex class")]
    NoClosedForm,
    #[error("graph is not strongly regular")]
    NotStronglyRegular,
    #[error("cannot parse family spec {0:?}")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn bad(msg: impl Into<String>) -> FamilyError {
    FamilyError::BadParams(msg.into())
}

/// A constructible graph family.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Complete(usize),
    CompleteBipartite(usize, usize),
    Star(usize),
    Crown(usize),
    Path(usize),
    Cycle(usize),
    Hypercube(usize),
    /// Depth-2 ball of the d-regular tree, rooted at vertex 0; only the
    /// root's curvature is meaningful.
    TreeBall(usize),
    Johnson(usize, usize),
    CocktailParty(usize),
    LineGraphOf(Box<FamilySpec>),
    Rook(usize),
    Shrikhande,
    Paley(u64),
    /// Cayley graph of Z_{o₁} × … × Z_{o_k}; the generator set is
    /// symmetrized automatically.
    AbelianCayley {
        orders: Vec<u64>,
        gens: Vec<Vec<i64>>,
    },
    /// The dihedral group of order 14 with four involution generators.
    Dihedral4Gen,
    /// The 4-regular 7-vertex graph with two vertex classes: three `x`
    /// vertices joined to four `y` vertices, plus the edges y₁y₂ and y₃y₄.
    PaperExample7,
    CartesianOf(Box<FamilySpec>, Box<FamilySpec>),
}

/// Vertex classes for families that are not vertex-transitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexClass {
    /// Any vertex of a vertex-transitive family.
    Any,
    /// Star hub.
    Hub,
    /// Pendant vertex (star or path).
    Leaf,
    /// Path vertex adjacent to a leaf.
    NextToLeaf,
    /// Path vertex at distance ≥ 2 from both leaves.
    Inner,
    /// Tree-ball root.
    Center,
    /// Complete bipartite: vertex in the part of size m (degree n).
    SideM,
    /// Complete bipartite: vertex in the part of size n (degree m).
    SideN,
    /// 7-vertex example: one of the three `x` vertices.
    XClass,
    /// 7-vertex example: one of the four `y` vertices.
    YClass,
}

impl FromStr for VertexClass {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, FamilyError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "any" => VertexClass::Any,
            "hub" => VertexClass::Hub,
            "leaf" => VertexClass::Leaf,
            "next-to-leaf" | "nexttoleaf" | "next_to_leaf" => VertexClass::NextToLeaf,
            "inner" => VertexClass::Inner,
            "center" | "centre" | "root" => VertexClass::Center,
            "side-m" | "sidem" | "m" => VertexClass::SideM,
            "side-n" | "siden" | "n" => VertexClass::SideN,
            "x" => VertexClass::XClass,
            "y" => VertexClass::YClass,
            other => return Err(FamilyError::Parse(other.into())),
        })
    }
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VertexClass::Any => "any",
            VertexClass::Hub => "hub",
            VertexClass::Leaf => "leaf",
            VertexClass::NextToLeaf => "next-to-leaf",
            VertexClass::Inner => "inner",
            VertexClass::Center => "center",
            VertexClass::SideM => "side-m",
            VertexClass::SideN => "side-n",
            VertexClass::XClass => "x",
            VertexClass::YClass => "y",
        };
        f.write_str(s)
    }
}

fn complete_edges(n: usize) -> Vec<(usize, usize)> {
    let mut e = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            e.push((i, j));
        }
    }
    e
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut r = q;
            while r.is_multiple_of(p) {
                r /= p;
            }
            return r == 1;
        }
        p += 1;
    }
    true // q itself prime
}

impl FamilySpec {
    /// Builds the graph. Vertex numbering is part of the contract: parts,
    /// roots and classes sit at the indices `representative_vertex` reports.
    pub fn generate(&self) -> Result<Graph, FamilyError> {
        use FamilySpec::*;
        match self {
            Complete(n) => {
                if *n < 1 {
                    return Err(bad("complete graph needs n >= 1"));
                }
                Ok(Graph::from_edges(*n, &complete_edges(*n))?)
            }
            CompleteBipartite(m, n) => {
                if *m < 1 || *n < 1 {
                    return Err(bad("complete bipartite graph needs m, n >= 1"));
                }
                let mut e = vec![];
                for a in 0..*m {
                    for b in 0..*n {
                        e.push((a, m + b));
                    }
                }
                Ok(Graph::from_edges(m + n, &e)?)
            }
            Star(n) => CompleteBipartite(1, *n).generate(),
            Crown(n) => {
                if *n < 1 {
                    return Err(bad("crown graph needs n >= 1"));
                }
                let mut e = vec![];
                for i in 0..*n {
                    for j in 0..*n {
                        if i != j {
                            e.push((i, n + j));
                        }
                    }
                }
                Ok(Graph::from_edges(2 * n, &e)?)
            }
            Path(n) => {
                if *n < 2 {
                    return Err(bad("path needs n >= 2"));
                }
                let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
                Ok(Graph::from_edges(*n, &e)?)
            }
            Cycle(n) => {
                if *n < 3 {
                    return Err(bad("cycle needs n >= 3"));
                }
                let e: Vec<_> = (0..*n).map(|i| (i, (i + 1) % n)).collect();
                Ok(Graph::from_edges(*n, &e)?)
            }
            Hypercube(n) => {
                if !(1..=16).contains(n) {
                    return Err(bad("hypercube dimension must be in 1..=16"));
                }
                let size = 1usize << n;
                let mut e = vec![];
                for v in 0..size {
                    for b in 0..*n {
                        let u = v ^ (1 << b);
                        if v < u {
                            e.push((v, u));
                        }
                    }
                }
                Ok(Graph::from_edges(size, &e)?)
            }
            TreeBall(d) => {
                if *d < 1 {
                    return Err(bad("tree ball needs degree >= 1"));
                }
                let mut e = vec![];
                let mut next = 1;
                let mut leaves = vec![];
                for _ in 0..*d {
                    e.push((0, next));
                    leaves.push(next);
                    next += 1;
                }
                for y in leaves {
                    for _ in 0..d - 1 {
                        e.push((y, next));
                        next += 1;
                    }
                }
                Ok(Graph::from_edges(next, &e)?)
            }
            Johnson(n, k) => {
                if !(1..*n).contains(k) {
                    return Err(bad("Johnson graph needs 1 <= k < n"));
                }
                if *n > 16 {
                    return Err(bad("Johnson ground set capped at 16"));
                }
                let subsets: Vec<u32> = (0u32..1 << n)
                    .filter(|s| s.count_ones() as usize == *k)
                    .collect();
                let mut e = vec![];
                for (i, a) in subsets.iter().enumerate() {
                    for (j, b) in subsets.iter().enumerate().skip(i + 1) {
                        if (a & b).count_ones() as usize == k - 1 {
                            e.push((i, j));
                        }
                    }
                }
                Ok(Graph::from_edges(subsets.len(), &e)?)
            }
            CocktailParty(m) => {
                if *m < 1 {
                    return Err(bad("cocktail party graph needs m >= 1"));
                }
                let mut e = vec![];
                for i in 0..2 * m {
                    for j in (i + 1)..2 * m {
                        if i / 2 != j / 2 {
                            e.push((i, j));
                        }
                    }
                }
                Ok(Graph::from_edges(2 * m, &e)?)
            }
            LineGraphOf(base) => {
                let g = base.generate()?;
                let edges = g.edges();
                if edges.is_empty() {
                    return Err(bad("line graph of an edgeless graph"));
                }
                let mut e = vec![];
                for (i, (a1, b1, _)) in edges.iter().enumerate() {
                    for (j, (a2, b2, _)) in edges.iter().enumerate().skip(i + 1) {
                        if a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2 {
                            e.push((i, j));
                        }
                    }
                }
                Ok(Graph::from_edges(edges.len(), &e)?)
            }
            Rook(n) => {
                if *n < 2 {
                    return Err(bad("rook graph needs n >= 2"));
                }
                let kn = Complete(*n).generate()?;
                Ok(cartesian_product(&kn, &kn)?)
            }
            Shrikhande => AbelianCayley {
                orders: vec![4, 4],
                gens: vec![vec![0, 1], vec![1, 0], vec![1, 1]],
            }
            .generate(),
            Paley(q) => {
                if !is_prime(*q) {
                    if is_prime_power(*q) {
                        return Err(FamilyError::PaleyNonPrime(*q));
                    }
                    return Err(bad(format!("Paley({q}): modulus must be prime")));
                }
                if q % 4 != 1 {
                    return Err(bad(format!("Paley({q}): need q = 1 (mod 4)")));
                }
                let q = *q as usize;
                let mut residues = vec![false; q];
                for k in 1..q {
                    residues[(k * k) % q] = true;
                }
                let mut e = vec![];
                for i in 0..q {
                    for j in (i + 1)..q {
                        if residues[j - i] {
                            e.push((i, j));
                        }
                    }
                }
                Ok(Graph::from_edges(q, &e)?)
            }
            AbelianCayley { orders, gens } => {
                if orders.is_empty() || orders.iter().any(|&o| o < 1) {
                    return Err(bad("group orders must be positive"));
                }
                let size: u64 = orders.iter().product();
                if size > 100_000 {
                    return Err(bad("group size capped at 100000"));
                }
                let size = size as usize;
                let k = orders.len();
                let mut sym: BTreeSet<Vec<u64>> = BTreeSet::new();
                for gen in gens {
                    if gen.len() != k {
                        return Err(bad("generator arity does not match group rank"));
                    }
                    let reduce = |g: &[i64], negate: bool| -> Vec<u64> {
                        g.iter()
                            .zip(orders)
                            .map(|(&c, &o)| {
                                let o = o as i64;
                                let c = if negate { -c } else { c };
                                (((c % o) + o) % o) as u64
                            })
                            .collect()
                    };
                    let plus = reduce(gen, false);
                    let minus = reduce(gen, true);
                    if plus.iter().all(|&c| c == 0) {
                        return Err(bad("zero generator"));
                    }
                    sym.insert(plus);
                    sym.insert(minus);
                }
                if sym.is_empty() {
                    return Err(bad("empty generating set"));
                }
                // Mixed-radix vertex index, last coordinate fastest.
                let idx = |coords: &[u64]| -> usize {
                    coords
                        .iter()
                        .zip(orders)
                        .fold(0usize, |acc, (&c, &o)| acc * o as usize + c as usize)
                };
                let mut e = BTreeSet::new();
                let mut coords = vec![0u64; k];
                for v in 0..size {
                    for s in &sym {
                        let shifted: Vec<u64> = coords
                            .iter()
                            .zip(s)
                            .zip(orders)
                            .map(|((&c, &g), &o)| (c + g) % o)
                            .collect();
                        let u = idx(&shifted);
                        if u != v {
                            e.insert((v.min(u), v.max(u)));
                        }
                    }
                    // increment mixed-radix counter
                    for pos in (0..k).rev() {
                        coords[pos] += 1;
                        if coords[pos] < orders[pos] {
                            break;
                        }
                        coords[pos] = 0;
                    }
                }
                let edges: Vec<(usize, usize)> = e.into_iter().collect();
                Ok(Graph::from_edges(size, &edges)?)
            }
            Dihedral4Gen => {
                // Elements (a, e) with a mod 7, e mod 2; index a + 7e.
                // Four involution generators (b, 1), b in {0, 6, 1, 3}.
                let mut e = BTreeSet::new();
                for a in 0..7usize {
                    for b in [0usize, 6, 1, 3] {
                        let u = a;
                        let v = 7 + (a + b) % 7;
                        e.insert((u, v));
                    }
                }
                let edges: Vec<(usize, usize)> = e.into_iter().collect();
                Ok(Graph::from_edges(14, &edges)?)
            }
            PaperExample7 => Ok(Graph::from_edges(
                7,
                &[
                    (0, 3),
                    (0, 4),
                    (0, 5),
                    (0, 6),
                    (1, 3),
                    (1, 4),
                    (1, 5),
                    (1, 6),
                    (2, 3),
                    (2, 4),
                    (2, 5),
                    (2, 6),
                    (3, 4),
                    (5, 6),
                ],
            )?),
            CartesianOf(a, b) => {
                let ga = a.generate()?;
                let gb = b.generate()?;
                Ok(cartesian_product(&ga, &gb)?)
            }
        }
    }

    /// A concrete vertex in `generate()`'s numbering that belongs to the
    /// given class.
    pub fn representative_vertex(&self, class: VertexClass) -> Result<usize, FamilyError> {
        use FamilySpec::*;
        use VertexClass::*;
        match (self, class) {
            (CompleteBipartite(_, _), SideM) | (Star(_), Hub | Center) => Ok(0),
            (CompleteBipartite(m, _), SideN) => Ok(*m),
            (CompleteBipartite(1, _), Hub | Center) => Ok(0),
            (CompleteBipartite(m, 1), Hub | Center) => Ok(*m),
            (Star(_), Leaf) => Ok(1),
            (Path(n), Leaf) if *n >= 2 => Ok(0),
            (Path(n), NextToLeaf) if *n >= 4 => Ok(1),
            (Path(n), Inner) if *n >= 5 => Ok(n / 2),
            (TreeBall(_), Center) => Ok(0),
            (PaperExample7, XClass) => Ok(0),
            (PaperExample7, YClass) => Ok(3),
            (_, Any) => Ok(0),
            _ => Err(bad(format!(
                "vertex class {class} does not apply to {self}"
            ))),
        }
    }

    /// The printed closed-form curvature function of a family / vertex-class
    /// pair, when one exists.
    pub fn closed_form(&self, class: VertexClass) -> Result<FKFunction, FamilyError> {
        use FamilySpec::*;
        use VertexClass::*;
        match (self, class) {
            (Complete(n), Any) if *n >= 2 => {
                Ok(FKFunction::affine((*n as f64 + 2.0) / 2.0, 2.0 * (*n as f64 - 1.0)))
            }
            (CompleteBipartite(m, n), SideM) => Ok(bipartite_form(*m, *n)),
            (CompleteBipartite(m, n), SideN) => Ok(bipartite_form(*n, *m)),
            (Star(n), Hub) => Ok(bipartite_form(1, *n)),
            (Star(n), Leaf) => Ok(bipartite_form(*n, 1)),
            (Crown(n), Any) if *n >= 4 => Ok(FKFunction::affine(2.0, 2.0 * (*n as f64 - 1.0))),
            (Path(n), Leaf) if *n >= 2 => Ok(if *n == 2 {
                FKFunction::affine(2.0, 2.0)
            } else {
                FKFunction::affine(1.5, 2.0)
            }),
            (Path(n), NextToLeaf) if *n >= 4 => Ok(next_to_leaf_form()),
            (Path(n), Inner) if *n >= 5 => Ok(FKFunction::two_branch(2.0, 4.0, 2.0)),
            (Cycle(3), Any) => Ok(FKFunction::affine(2.5, 4.0)),
            (Cycle(4), Any) => Ok(FKFunction::affine(2.0, 4.0)),
            (Cycle(n), Any) if *n >= 5 => Ok(FKFunction::two_branch(2.0, 4.0, 2.0)),
            (Hypercube(n), Any) => Ok(FKFunction::affine(2.0, 2.0 * *n as f64)),
            (TreeBall(d), Center) if *d >= 2 => {
                Ok(FKFunction::two_branch(2.0, 2.0 * *d as f64, 2.0))
            }
            (Johnson(n, k), Any) => Ok(FKFunction::affine(
                (*n as f64 + 2.0) / 2.0,
                2.0 * (*k as f64) * (*n as f64 - *k as f64),
            )),
            (CocktailParty(m), Any) if *m >= 2 => {
                Ok(FKFunction::affine(*m as f64, 4.0 * (*m as f64 - 1.0)))
            }
            (LineGraphOf(base), Any) => match base.as_ref() {
                CompleteBipartite(m, n) if *m >= 2 && *n >= 2 => {
                    Ok(line_graph_bipartite_form(*m, *n))
                }
                _ => Err(FamilyError::NoClosedForm),
            },
            (Rook(n), Any) if *n >= 2 => Ok(FKFunction::affine(
                (*n as f64 + 2.0) / 2.0,
                4.0 * (*n as f64 - 1.0),
            )),
            (Shrikhande, Any) => Ok(FKFunction::two_branch(3.0, 12.0, 12.0)),
            (Paley(13), Any) => Ok(FKFunction::affine(3.0, 12.0)),
            (Paley(17), Any) => Ok(FKFunction::affine(3.5, 16.0)),
            (AbelianCayley { .. }, Any) => {
                let g = self.generate()?;
                let d = long_relation_cayley_degree(&g)?;
                Ok(FKFunction::two_branch(2.0, 2.0 * d as f64, d as f64))
            }
            (Dihedral4Gen, Any) => Ok(FKFunction::affine(2.0, 8.0)),
            (PaperExample7, XClass) => Ok(FKFunction::affine(2.5, 8.0)),
            (PaperExample7, YClass) => Ok(FKFunction::from_closure(
                |n| 5.0 - (8.0 + (21.0 * n * n + 72.0 * n + 64.0).sqrt()) / (2.0 * n),
                5.0 - 21.0f64.sqrt() / 2.0,
                FKTag::Surd,
            )),
            _ => Err(FamilyError::NoClosedForm),
        }
    }
}

/// Degree-n vertex of K_{m,n}: affine when n = 1 or n ≤ 2m−2, otherwise
/// two-branch with the break at 2n/(n−2m+2).
fn bipartite_form(m: usize, n: usize) -> FKFunction {
    let (mf, nf) = (m as f64, n as f64);
    let a = (4.0 + nf - mf) / 2.0;
    let b = 2.0 * nf;
    if n == 1 || nf <= 2.0 * mf - 2.0 {
        FKFunction::affine(a, b)
    } else {
        FKFunction::two_branch(a, b, 2.0 * nf / (nf - 2.0 * mf + 2.0))
    }
}

/// Path vertex next to a leaf (d = 2, out-degrees {0, 1}).
fn next_to_leaf_form() -> FKFunction {
    FKFunction::from_closure(
        |n| {
            let root = (n * n + (4.0 * n - 8.0) * (4.0 * n - 8.0)).sqrt();
            1.25 - (8.0 + root) / (4.0 * n)
        },
        (5.0 - 17.0f64.sqrt()) / 4.0,
        FKTag::Surd,
    )
}

/// Any vertex of L(K_{m,n}) for m, n ≥ 2.
fn line_graph_bipartite_form(m: usize, n: usize) -> FKFunction {
    let (mf, nf) = (m as f64, n as f64);
    let s = mf + nf;
    FKFunction::from_closure(
        move |x| {
            let root = (16.0 * (s - 2.0) * (s - 2.0)
                + (nf - mf) * (nf - mf) * x * (x - 8.0))
                .sqrt();
            (s + 4.0) / 4.0 - (4.0 * (s - 2.0) + root) / (4.0 * x)
        },
        (s + 4.0) / 4.0 - (nf - mf).abs() / 4.0,
        FKTag::Surd,
    )
}

/// Verifies the local structure of an abelian Cayley graph whose reduced
/// relations all have length ≥ 5, and returns its degree. At such a vertex
/// the 1-sphere has no internal edges, every distinct generator pair reaches
/// its own 2-sphere vertex twice, and every doubled generator reaches its
/// own 2-sphere vertex once.
fn long_relation_cayley_degree(g: &Graph) -> Result<usize, FamilyError> {
    let ls = local_structure(g, 0)?;
    let d = ls.degree();
    if d % 2 != 0 {
        return Err(FamilyError::NoClosedForm);
    }
    let m = d / 2;
    let regular = ls.s1_out_regular() == Some(d - 1);
    let structure_ok = ls.s1_edges.is_empty()
        && ls.s2_size() == 2 * m * m
        && ls.in_deg.iter().filter(|&&z| z == 1).count() == 2 * m
        && ls.in_deg.iter().filter(|&&z| z == 2).count() == 2 * m * m - 2 * m;
    if regular && structure_ok {
        Ok(d)
    } else {
        Err(FamilyError::NoClosedForm)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FamilySpec::*;
        match self {
            Complete(n) => write!(f, "K{n}"),
            CompleteBipartite(m, n) => write!(f, "K{m},{n}"),
            Star(n) => write!(f, "star{n}"),
            Crown(n) => write!(f, "crown{n}"),
            Path(n) => write!(f, "path{n}"),
            Cycle(n) => write!(f, "cycle{n}"),
            Hypercube(n) => write!(f, "Q{n}"),
            TreeBall(d) => write!(f, "tree{d}"),
            Johnson(n, k) => write!(f, "J({n},{k})"),
            CocktailParty(m) => write!(f, "cocktail{m}"),
            LineGraphOf(base) => write!(f, "L({base})"),
            Rook(n) => write!(f, "rook{n}"),
            Shrikhande => write!(f, "shrikhande"),
            Paley(q) => write!(f, "paley{q}"),
            AbelianCayley { orders, gens } => {
                write!(f, "cayley(")?;
                for (i, o) in orders.iter().enumerate() {
                    if i > 0 {
                        write!(f, "x")?;
                    }
                    write!(f, "{o}")?;
                }
                for g in gens {
                    write!(f, ";")?;
                    for (i, c) in g.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{c}")?;
                    }
                }
                write!(f, ")")
            }
            Dihedral4Gen => write!(f, "dihedral14"),
            PaperExample7 => write!(f, "example7"),
            CartesianOf(a, b) => write!(f, "prod({a},{b})"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = FamilyError;

    /// Accepts the CLI spellings: `K5`, `K2,6`, `Q4`, `J(5,2)`, `crown8`,
    /// `path7` / `P7`, `cycle6` / `C6`, `tree4`, `star5`, `rook4`,
    /// `cocktail3`, `shrikhande`, `paley13`, `dihedral14`, `example7`
    /// (also spelled `paperexample7`),
    /// `torus7`, `L(K3,3)`, `prod(K2,K3)`, and
    /// `cayley(7x7;1,0;0,1)`.
    fn from_str(raw: &str) -> Result<Self, FamilyError> {
        use FamilySpec::*;
        let s = raw.trim();
        let lower = s.to_ascii_lowercase();
        let parse_err = || FamilyError::Parse(raw.into());
        let num = |t: &str| t.parse::<usize>().map_err(|_| parse_err());

        if lower == "shrikhande" {
            return Ok(Shrikhande);
        }
        if lower == "dihedral14" {
            return Ok(Dihedral4Gen);
        }
        if lower == "example7" || lower == "paperexample7" {
            return Ok(PaperExample7);
        }
        if lower == "torus7" {
            return Ok(AbelianCayley {
                orders: vec![7, 7],
                gens: vec![vec![1, 0], vec![0, 1]],
            });
        }
        if let Some(rest) = strip_call(&lower, "prod") {
            let (a, b) = split_top_comma(rest).ok_or_else(parse_err)?;
            return Ok(CartesianOf(
                Box::new(a.parse::<FamilySpec>()?),
                Box::new(b.parse::<FamilySpec>()?),
            ));
        }
        if let Some(rest) = strip_call(&lower, "j") {
            let (a, b) = split_top_comma(rest).ok_or_else(parse_err)?;
            return Ok(Johnson(num(a.trim())?, num(b.trim())?));
        }
        if let Some(rest) = strip_call(&lower, "l") {
            return Ok(LineGraphOf(Box::new(rest.parse::<FamilySpec>()?)));
        }
        if let Some(rest) = strip_call(&lower, "cayley") {
            let mut parts = rest.split(';');
            let orders_part = parts.next().ok_or_else(parse_err)?;
            let orders: Vec<u64> = orders_part
                .split('x')
                .map(|t| t.trim().parse::<u64>().map_err(|_| parse_err()))
                .collect::<Result<_, _>>()?;
            let gens: Vec<Vec<i64>> = parts
                .map(|gen| {
                    gen.split(',')
                        .map(|t| t.trim().parse::<i64>().map_err(|_| parse_err()))
                        .collect::<Result<Vec<i64>, _>>()
                })
                .collect::<Result<_, _>>()?;
            if gens.is_empty() {
                return Err(parse_err());
            }
            return Ok(AbelianCayley { orders, gens });
        }
        for (prefix, make) in [
            ("crown", Crown as fn(usize) -> FamilySpec),
            ("path", Path),
            ("cycle", Cycle),
            ("tree", TreeBall),
            ("star", Star),
            ("rook", Rook),
            ("cocktail", CocktailParty),
        ] {
            if let Some(tail) = lower.strip_prefix(prefix) {
                if !tail.is_empty() && tail.chars().all(|c| c.is_ascii_digit()) {
                    return Ok(make(num(tail)?));
                }
            }
        }
        if let Some(tail) = lower.strip_prefix("paley") {
            return Ok(Paley(tail.parse::<u64>().map_err(|_| parse_err())?));
        }
        if let Some(tail) = lower.strip_prefix('k') {
            if let Some((a, b)) = tail.split_once(',') {
                return Ok(CompleteBipartite(num(a)?, num(b)?));
            }
            if !tail.is_empty() && tail.chars().all(|c| c.is_ascii_digit()) {
                return Ok(Complete(num(tail)?));
            }
        }
        if let Some(tail) = lower.strip_prefix('q') {
            if !tail.is_empty() && tail.chars().all(|c| c.is_ascii_digit()) {
                return Ok(Hypercube(num(tail)?));
            }
        }
        if let Some(tail) = lower.strip_prefix('p') {
            if !tail.is_empty() && tail.chars().all(|c| c.is_ascii_digit()) {
                return Ok(Path(num(tail)?));
            }
        }
        if let Some(tail) = lower.strip_prefix('c') {
            if !tail.is_empty() && tail.chars().all(|c| c.is_ascii_digit()) {
                return Ok(Cycle(num(tail)?));
            }
        }
        Err(parse_err())
    }
}

/// `strip_call("j(5,2)", "j")` → `Some("5,2")`.
fn strip_call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    let rest = s.strip_prefix(name)?;
    let inner = rest.strip_prefix('(')?;
    inner.strip_suffix(')')
}

/// Splits at the first comma not nested in parentheses.
fn split_top_comma(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

/// A Coxeter system: `k` generators with exponents `m(i,j)`; the diagram has
/// an edge wherever `m(i,j) ≥ 3`. Use [`COXETER_INFINITY`] for `m = ∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterSystem {
    m: Vec<Vec<u32>>,
}

pub const COXETER_INFINITY: u32 = u32::MAX;

impl CoxeterSystem {
    pub fn new(m: Vec<Vec<u32>>) -> Result<Self, FamilyError> {
        let k = m.len();
        if k == 0 {
            return Err(bad("Coxeter system needs at least one generator"));
        }
        for (i, row) in m.iter().enumerate() {
            if row.len() != k {
                return Err(bad("exponent matrix must be square"));
            }
            if row[i] != 1 {
                return Err(bad("diagonal exponents must be 1"));
            }
            for (j, &v) in row.iter().enumerate() {
                if j != i && v < 2 {
                    return Err(bad("off-diagonal exponents must be >= 2"));
                }
                if v != m[j][i] {
                    return Err(bad("exponent matrix must be symmetric"));
                }
            }
        }
        Ok(CoxeterSystem { m })
    }

    pub fn generator_count(&self) -> usize {
        self.m.len()
    }

    /// Dihedral system: two generators with exponent `k`.
    pub fn dihedral(k: u32) -> Result<Self, FamilyError> {
        if k < 2 {
            return Err(bad("dihedral exponent must be >= 2"));
        }
        CoxeterSystem::new(vec![vec![1, k], vec![k, 1]])
    }

    /// Linear diagram with `n` generators and consecutive exponents 3
    /// (symmetric-group type).
    pub fn type_a(n: usize) -> Result<Self, FamilyError> {
        if n == 0 {
            return Err(bad("need at least one generator"));
        }
        let mut m = vec![vec![2u32; n]; n];
        for i in 0..n {
            m[i][i] = 1;
            if i + 1 < n {
                m[i][i + 1] = 3;
                m[i + 1][i] = 3;
            }
        }
        CoxeterSystem::new(m)
    }

    /// Cyclic diagram with `n + 1` generators (affine symmetric type),
    /// `n ≥ 2`.
    pub fn affine_a(n: usize) -> Result<Self, FamilyError> {
        if n < 2 {
            return Err(bad("cyclic diagram needs n >= 2"));
        }
        let k = n + 1;
        let mut m = vec![vec![2u32; k]; k];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        for i in 0..k {
            let j = (i + 1) % k;
            m[i][j] = 3;
            m[j][i] = 3;
        }
        CoxeterSystem::new(m)
    }

    /// Laplacian of the diagram (edge wherever `m(i,j) ≥ 3`).
    pub fn diagram_laplacian(&self) -> SymMatrix {
        let k = self.m.len();
        let mut l = SymMatrix::zeros(k);
        for i in 0..k {
            let mut deg = 0.0;
            for j in 0..k {
                if j != i && self.m[i][j] >= 3 {
                    deg += 1.0;
                    l.set(i, j, -1.0);
                }
            }
            l.set(i, i, deg);
        }
        l
    }
}

/// Curvature function of the Cayley graph of a Coxeter group with respect to
/// its generator set: `2 − 2k/N` up to `N₀ = 2k/μ`, then the constant
/// `2 − μ`, where `μ` is the largest diagram Laplacian eigenvalue. An
/// edgeless diagram gives the affine function everywhere.
pub fn coxeter_curvature(cs: &CoxeterSystem) -> Result<FKFunction, FamilyError> {
    let k = cs.generator_count() as f64;
    let lap = cs.diagram_laplacian();
    let mu_max = lap.eigen(&Tolerances::default())?.values[cs.generator_count() - 1];
    if mu_max <= 0.0 {
        return Ok(FKFunction::affine(2.0, 2.0 * k));
    }
    Ok(FKFunction::two_branch(2.0, 2.0 * k, 2.0 * k / mu_max))
}

/// Strong-regularity parameters `(N, d, α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SrgParams {
    pub n: usize,
    pub d: usize,
    pub alpha: usize,
    pub beta: usize,
}

/// Verifies strong regularity by common-neighbour counting: `d`-regular,
/// every adjacent pair has exactly `α` common neighbours, every non-adjacent
/// pair exactly `β ≥ 1`.
pub fn srg_params(g: &Graph) -> Result<SrgParams, FamilyError> {
    let n = g.n();
    if n < 2 {
        return Err(FamilyError::NotStronglyRegular);
    }
    let d = g.degree(0);
    if (1..n).any(|v| g.degree(v) != d) {
        return Err(FamilyError::NotStronglyRegular);
    }
    let mut alpha: Option<usize> = None;
    let mut beta: Option<usize> = None;
    for u in 0..n {
        for v in (u + 1)..n {
            let common = g
                .neighbors(u)
                .iter()
                .filter(|&&w| g.is_edge(v, w))
                .count();
            let slot = if g.is_edge(u, v) { &mut alpha } else { &mut beta };
            match slot {
                None => *slot = Some(common),
                Some(prev) if *prev != common => return Err(FamilyError::NotStronglyRegular),
                Some(_) => {}
            }
        }
    }
    let alpha = alpha.ok_or(FamilyError::NotStronglyRegular)?;
    let beta = beta.unwrap_or(0);
    if beta < 1 {
        return Err(FamilyError::NotStronglyRegular);
    }
    Ok(SrgParams {
        n,
        d,
        alpha,
        beta,
    })
}

/// Exact curvature function of a vertex in a strongly regular graph, from
/// `(d, α, β)` and the adjacency spectrum of the induced 1-sphere with one
/// copy of `α` removed:
///
/// ```text
/// K(N) = 2 + α/2 − 2d/N + min(0, (2d(β−2) − α²)/(2β) + 2d/N + (2/β)·min_λ (λ − α/2)²)
/// ```
///
/// The function is affine when the inner minimum never activates, otherwise
/// two-branch with an exactly constant tail.
pub fn srg_curvature(g: &Graph, x: usize) -> Result<FKFunction, FamilyError> {
    let params = srg_params(g)?;
    let (d, alpha, beta) = (params.d as f64, params.alpha as f64, params.beta as f64);
    let ls = local_structure(g, x)?;
    let k = ls.degree();
    let mut adj = SymMatrix::zeros(k);
    for &(i, j, _) in &ls.s1_edges {
        adj.set(i, j, 1.0);
    }
    let mut eigs = adj.eigen(&Tolerances::default())?.values;
    // The 1-sphere is α-regular, so α is an eigenvalue; drop one copy.
    let drop = eigs
        .iter()
        .enumerate()
        .min_by(|a, b| {
            let da = (a.1 - alpha).abs();
            let db = (b.1 - alpha).abs();
            da.partial_cmp(&db).unwrap()
        })
        .map(|(i, _)| i)
        .expect("non-empty spectrum");
    eigs.remove(drop);
    let min_sq = eigs
        .iter()
        .map(|&l| (l - alpha / 2.0) * (l - alpha / 2.0))
        .fold(f64::INFINITY, f64::min);
    let c = (2.0 * d * (beta - 2.0) - alpha * alpha) / (2.0 * beta) + 2.0 / beta * min_sq;
    let a = 2.0 + alpha / 2.0;
    let b = 2.0 * d;
    if c >= 0.0 {
        Ok(FKFunction::affine(a, b))
    } else {
        Ok(FKFunction::two_branch(a, b, b / (-c)))
    }
}
