//! Shared test corpus and random-graph helpers.
#![allow(dead_code)] // each test binary uses a subset

use curv::dim::Dimension;
use curv::families::FamilySpec;
use curv::graph::{local_structure, Graph};
use curv::linalg::Tolerances;
use rand::seq::SliceRandom;
use rand::Rng;

pub struct CorpusEntry {
    pub name: String,
    pub graph: Graph,
    /// Vertices exercised by whole-corpus properties. All of them for small
    /// graphs; class representatives for large vertex-transitive ones.
    pub vertices: Vec<usize>,
}

fn entry(name: &str, graph: Graph, reps: Option<Vec<usize>>) -> CorpusEntry {
    let vertices = match reps {
        Some(v) => v,
        None => {
            if graph.n() <= 16 {
                (0..graph.n()).collect()
            } else {
                vec![0]
            }
        }
    };
    CorpusEntry {
        name: name.to_string(),
        graph,
        vertices,
    }
}

pub fn family(name: &str) -> Graph {
    name.parse::<FamilySpec>()
        .unwrap_or_else(|e| panic!("{name}: {e}"))
        .generate()
        .unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// The standard test corpus: one entry per family instance the suite reasons
/// about. Deterministic order and vertex numbering.
pub fn corpus() -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for n in 2..=6 {
        out.push(entry(&format!("K{n}"), family(&format!("K{n}")), None));
    }
    out.push(entry("K2,6", family("K2,6"), None));
    out.push(entry("K3,4", family("K3,4"), None));
    out.push(entry("star3", family("star3"), None));
    out.push(entry("star4", family("star4"), None));
    out.push(entry("crown4", family("crown4"), None));
    out.push(entry("crown5", family("crown5"), None));
    for n in 4..=7 {
        out.push(entry(&format!("path{n}"), family(&format!("path{n}")), None));
    }
    for n in 3..=8 {
        out.push(entry(&format!("cycle{n}"), family(&format!("cycle{n}")), None));
    }
    for d in 2..=4 {
        out.push(entry(&format!("tree{d}"), family(&format!("tree{d}")), None));
    }
    for n in 1..=3 {
        out.push(entry(&format!("Q{n}"), family(&format!("Q{n}")), None));
    }
    out.push(entry("L(K2,3)", family("L(K2,3)"), None));
    out.push(entry("J(4,2)", family("J(4,2)"), None));
    out.push(entry("J(5,2)", family("J(5,2)"), Some(vec![0])));
    out.push(entry("rook3", family("rook3"), None));
    out.push(entry("rook4", family("rook4"), None));
    out.push(entry("shrikhande", family("shrikhande"), None));
    out.push(entry("paley13", family("paley13"), None));
    out.push(entry("cocktail3", family("cocktail3"), None));
    out.push(entry("torus7", family("torus7"), Some(vec![0])));
    out.push(entry("dihedral14", family("dihedral14"), None));
    out.push(entry("example7", family("example7"), None));
    out
}

pub fn tols() -> Tolerances {
    Tolerances::default()
}

pub fn dim_grid(values: &[f64], with_inf: bool) -> Vec<Dimension> {
    let mut g: Vec<Dimension> = values.iter().map(|&v| Dimension::Finite(v)).collect();
    if with_inf {
        g.push(Dimension::Infinite);
    }
    g
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            let other = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                count += 1;
                stack.push(other);
            }
        }
    }
    count == n
}

/// Random connected simple graph with 4..=max_v vertices.
pub fn random_connected(rng: &mut impl Rng, max_v: usize) -> Graph {
    loop {
        let n = rng.gen_range(4..=max_v);
        let p: f64 = rng.gen_range(0.25..0.7);
        let mut edges = vec![];
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        if !edges.is_empty() && connected(n, &edges) {
            return Graph::from_edges(n, &edges).unwrap();
        }
    }
}

/// Adds one absent edge inside S1(x); returns None if S1 is a clique.
pub fn add_spherical_edge(g: &Graph, x: usize, rng: &mut impl Rng) -> Option<Graph> {
    let ls = local_structure(g, x).ok()?;
    let mut candidates = vec![];
    for i in 0..ls.s1.len() {
        for j in (i + 1)..ls.s1.len() {
            if !g.is_edge(ls.s1[i], ls.s1[j]) {
                candidates.push((ls.s1[i], ls.s1[j]));
            }
        }
    }
    let &(a, b) = candidates.choose(rng)?;
    let mut edges: Vec<(usize, usize)> = g.edges().iter().map(|&(u, v, _)| (u, v)).collect();
    edges.push((a, b));
    Some(Graph::from_edges(g.n(), &edges).unwrap())
}

/// Merges two non-adjacent, common-neighbour-free vertices of S2(x);
/// returns the mutated graph together with the center's new index, or None
/// if no eligible pair exists.
pub fn merge_s2_pair(g: &Graph, x: usize, rng: &mut impl Rng) -> Option<(Graph, usize)> {
    let ls = local_structure(g, x).ok()?;
    let mut candidates = vec![];
    for i in 0..ls.s2.len() {
        for j in (i + 1)..ls.s2.len() {
            let (z1, z2) = (ls.s2[i], ls.s2[j]);
            if g.is_edge(z1, z2) {
                continue;
            }
            let share = g.neighbors(z1).iter().any(|&w| g.is_edge(z2, w));
            if !share {
                candidates.push((z1, z2));
            }
        }
    }
    let &(z1, z2) = candidates.choose(rng)?;
    // Reattach z2's edges to z1, then drop z2 by renumbering the tail.
    let map = |v: usize| -> usize {
        let v = if v == z2 { z1 } else { v };
        if v > z2 {
            v - 1
        } else {
            v
        }
    };
    let mut edges: Vec<(usize, usize)> = vec![];
    for (u, v, _) in g.edges() {
        let (mu, mv) = (map(u), map(v));
        let e = (mu.min(mv), mu.max(mv));
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    Some((Graph::from_edges(g.n() - 1, &edges).unwrap(), map(x)))
}

/// Builds a graph whose punctured 2-ball at vertex 0 has ≥ 2 components:
/// spokes are partitioned into groups, and all spherical / radial structure
/// stays inside a group.
pub fn random_disconnected_ball(rng: &mut impl Rng) -> Graph {
    let d: usize = rng.gen_range(2..=6);
    let c: usize = rng.gen_range(2..=d.min(3));
    // group assignment: first c spokes seed the groups, rest random
    let mut group = vec![0usize; d];
    for (i, slot) in group.iter_mut().enumerate() {
        *slot = if i < c { i } else { rng.gen_range(0..c) };
    }
    let mut edges: Vec<(usize, usize)> = (1..=d).map(|y| (0, y)).collect();
    let mut next = d + 1;
    for gi in 0..c {
        let members: Vec<usize> = (0..d).filter(|&i| group[i] == gi).map(|i| i + 1).collect();
        if members.len() >= 2 {
            // connect the group: a spherical path or one shared 2-sphere hub
            if rng.gen_bool(0.5) {
                for w in members.windows(2) {
                    edges.push((w[0], w[1]));
                }
            } else {
                for &y in &members {
                    edges.push((y, next));
                }
                next += 1;
            }
        }
        // optional extra 2-sphere pendants inside the group
        for &y in &members {
            if rng.gen_bool(0.3) {
                edges.push((y, next));
                next += 1;
            }
        }
    }
    Graph::from_edges(next, &edges).unwrap()
}
