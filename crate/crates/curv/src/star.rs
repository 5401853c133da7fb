//! The *-product on curvature functions and Cartesian products of graphs.
//!
//! Curvature functions live in the class of continuous, monotone
//! non-decreasing functions on (0,∞] that diverge to −∞ at 0. The *-product
//! of two such functions splits the dimension parameter: `(f*g)(N)` is the
//! common value `f(N₁) = g(N−N₁)`, and the curvature function of a Cartesian
//! product of graphs is the *-product of the factors' curvature functions.

use crate::dim::Dimension;
use crate::engine::{curvature_at, EngineError};
use crate::graph::{Graph, GraphError, LaplacianKind};
use crate::linalg::Tolerances;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StarError {
    #[error("function left the admissible class: value drops by {drop:.3e} near N = {at}")]
    NotInFK { at: f64, drop: f64 },
    #[error("split search could not bracket a root at N = {n}")]
    SplitBracket { n: f64 },
    #[error("empty function sequence")]
    EmptySequence,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Closed-form shape of an admissible curvature function, for reporting.
#[derive(Debug, Clone, PartialEq)]
pub enum FKTag {
    /// `a - b/N` on all of (0,∞].
    Affine { a: f64, b: f64 },
    /// `a - b/N` up to `n_break`, then the constant `a - b/n_break`.
    TwoBranch { a: f64, b: f64, n_break: f64 },
    /// Algebraic but not piecewise-affine (square-root shapes).
    Surd,
    /// Backed by the curvature engine at a vertex.
    EngineBacked { vertex: usize },
    /// A *-product of other admissible functions.
    Star,
}

/// A member of the admissible function class: continuous, monotone
/// non-decreasing on (0,∞], −∞ at 0⁺. Cheap to evaluate (closed forms) or
/// memoized (engine-backed).
#[derive(Clone)]
pub struct FKFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub tag: FKTag,
    pub at_infinity: f64,
}

impl std::fmt::Debug for FKFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FKFunction")
            .field("tag", &self.tag)
            .field("at_infinity", &self.at_infinity)
            .finish()
    }
}

impl FKFunction {
    pub fn eval(&self, n: Dimension) -> f64 {
        match n {
            Dimension::Infinite => self.at_infinity,
            Dimension::Finite(v) => (self.eval)(v),
        }
    }

    /// `a - b/N`.
    pub fn affine(a: f64, b: f64) -> Self {
        FKFunction {
            eval: Arc::new(move |n| a - b / n),
            tag: FKTag::Affine { a, b },
            at_infinity: a,
        }
    }

    /// `a - b/N` for `N ≤ n_break`, then constant; continuity pins the
    /// plateau at `a - b/n_break`.
    pub fn two_branch(a: f64, b: f64, n_break: f64) -> Self {
        let plateau = a - b / n_break;
        FKFunction {
            eval: Arc::new(move |n| if n <= n_break { a - b / n } else { plateau }),
            tag: FKTag::TwoBranch { a, b, n_break },
            at_infinity: plateau,
        }
    }

    /// Wraps an arbitrary closed form. The closure must be total on finite
    /// arguments; the value at ∞ is taken from `at_infinity`.
    pub fn from_closure(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        at_infinity: f64,
        tag: FKTag,
    ) -> Self {
        FKFunction {
            eval: Arc::new(f),
            tag,
            at_infinity,
        }
    }

    /// Curvature function of a vertex, evaluated by the engine on demand and
    /// memoized. Panics on later evaluations only if the engine's two
    /// computation routes disagree, which indicates a bug, not bad input.
    pub fn engine_backed(
        g: &Graph,
        x: usize,
        kind: LaplacianKind,
        tol: &Tolerances,
    ) -> Result<Self, StarError> {
        let at_infinity = curvature_at(g, x, kind, Dimension::Infinite, tol)?.k;
        let g = g.clone();
        let tol = tol.clone();
        let memo: Mutex<HashMap<u64, f64>> = Mutex::new(HashMap::new());
        let eval = move |n: f64| -> f64 {
            let key = n.to_bits();
            if let Some(&v) = memo.lock().unwrap().get(&key) {
                return v;
            }
            let v = curvature_at(&g, x, kind, Dimension::Finite(n), &tol)
                .expect("engine evaluation")
                .k;
            memo.lock().unwrap().insert(key, v);
            v
        };
        Ok(FKFunction {
            eval: Arc::new(eval),
            tag: FKTag::EngineBacked { vertex: x },
            at_infinity,
        })
    }
}

/// 64-point admissibility probe: geometric grid on [10⁻², 10²] plus ∞,
/// requiring monotone non-decreasing values up to `agree_tol` slack. The
/// upper end stays at 10² so that the absolute resolution of product split
/// searches (10⁻¹⁰·N) cannot masquerade as a monotonicity violation on an
/// exactly flat plateau.
fn fk_probe(f: &FKFunction, agree_tol: f64) -> Result<(), StarError> {
    const POINTS: usize = 63;
    let (lo, hi) = (1e-2f64, 1e2f64);
    let ratio = (hi / lo).powf(1.0 / (POINTS - 1) as f64);
    let mut prev = f64::NEG_INFINITY;
    let mut prev_n = 0.0;
    let mut n = lo;
    for _ in 0..POINTS {
        let v = f.eval(Dimension::Finite(n));
        if v < prev - agree_tol {
            return Err(StarError::NotInFK {
                at: prev_n,
                drop: prev - v,
            });
        }
        prev = v;
        prev_n = n;
        n *= ratio;
    }
    let v = f.at_infinity;
    if v < prev - agree_tol {
        return Err(StarError::NotInFK {
            at: prev_n,
            drop: prev - v,
        });
    }
    Ok(())
}

fn split_value(f: &FKFunction, g: &FKFunction, n: f64) -> Result<f64, StarError> {
    // h(t) = f(t) - g(n - t) is monotone non-decreasing, -∞ at t→0⁺ and +∞
    // at t→n⁻, so bisection brackets a root. Any root yields the same
    // product value; we take the midpoint of the final interval.
    let h = |t: f64| f.eval(Dimension::Finite(t)) - g.eval(Dimension::Finite(n - t));
    let mut lo = n * 1e-12;
    let mut hi = n * (1.0 - 1e-12);
    if h(lo) > 0.0 || h(hi) < 0.0 {
        return Err(StarError::SplitBracket { n });
    }
    while hi - lo > 1e-10 * n {
        let mid = 0.5 * (lo + hi);
        if h(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(f.eval(Dimension::Finite(0.5 * (lo + hi))))
}

/// The *-product. At finite `N` the value is `f(N₁) = g(N−N₁)` for the
/// dimension split found by bisection; at ∞ it is exactly
/// `min(f(∞), g(∞))`. Inputs are screened by the admissibility probe —
/// except those that are themselves *-products: the class is closed under
/// the product, so their membership is already established, and probing a
/// nested product repeats its whole split-search cascade 63 times over.
pub fn star(f: &FKFunction, g: &FKFunction) -> Result<FKFunction, StarError> {
    let agree = Tolerances::default().agree_tol;
    if f.tag != FKTag::Star {
        fk_probe(f, agree)?;
    }
    if g.tag != FKTag::Star {
        fk_probe(g, agree)?;
    }
    let at_infinity = f.at_infinity.min(g.at_infinity);
    let (f, g) = (f.clone(), g.clone());
    let eval = move |n: f64| split_value(&f, &g, n).expect("star split bracket");
    Ok(FKFunction {
        eval: Arc::new(eval),
        tag: FKTag::Star,
        at_infinity,
    })
}

/// Left fold of the *-product; a single function folds to itself. At ∞ the
/// result is the minimum over all inputs.
pub fn star_fold(fs: &[FKFunction]) -> Result<FKFunction, StarError> {
    let (first, rest) = fs.split_first().ok_or(StarError::EmptySequence)?;
    let mut acc = first.clone();
    for f in rest {
        acc = star(&acc, f)?;
    }
    Ok(acc)
}

/// Cartesian product of two unit-weight graphs: vertex set V₁×V₂, with
/// `(u,v) ~ (u',v)` for `u ~ u'` and `(u,v) ~ (u,v')` for `v ~ v'`.
/// Vertex `(i, j)` maps to index `i·|V₂| + j`; degrees add.
pub fn cartesian_product(g1: &Graph, g2: &Graph) -> Result<Graph, GraphError> {
    for g in [g1, g2] {
        if (0..g.n()).any(|u| (g.measure(u) - 1.0).abs() > 1e-12)
            || g.edges().iter().any(|&(_, _, w)| (w - 1.0).abs() > 1e-12)
        {
            return Err(GraphError::ProductRequiresUnitGraphs);
        }
    }
    let (n1, n2) = (g1.n(), g2.n());
    let idx = |i: usize, j: usize| i * n2 + j;
    let mut edges = Vec::new();
    for j in 0..n2 {
        for &(u, v, _) in &g1.edges() {
            edges.push((idx(u, j), idx(v, j)));
        }
    }
    for i in 0..n1 {
        for &(u, v, _) in &g2.edges() {
            edges.push((idx(i, u), idx(i, v)));
        }
    }
    Graph::from_edges(n1 * n2, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::local_structure;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Vec<Dimension> {
        vec![
            Dimension::Finite(0.5),
            Dimension::Finite(1.0),
            Dimension::Finite(2.0),
            Dimension::Finite(3.0),
            Dimension::Finite(5.0),
            Dimension::Finite(8.0),
            Dimension::Finite(20.0),
            Dimension::Infinite,
        ]
    }

    fn complete(n: usize) -> Graph {
        let mut e = vec![];
        for i in 0..n {
            for j in (i + 1)..n {
                e.push((i, j));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    fn k_complete(n: usize) -> FKFunction {
        FKFunction::affine((n as f64 + 2.0) / 2.0, 2.0 * (n as f64 - 1.0))
    }

    #[test]
    fn affine_rule_exact() {
        let f = FKFunction::affine(1.5, 3.0);
        let g = FKFunction::affine(1.5, 5.0);
        let p = star(&f, &g).unwrap();
        for n in grid() {
            let want = 1.5 - 8.0 * n.inv();
            assert!((p.eval(n) - want).abs() < 1e-8, "at {n}");
        }
    }

    #[test]
    fn k2_times_k3_at_eight() {
        let p = star(&k_complete(2), &k_complete(3)).unwrap();
        assert!((p.eval(Dimension::Finite(8.0)) - 1.5).abs() < 1e-9);
        assert_eq!(p.eval(Dimension::Infinite), 2.0);
    }

    #[test]
    fn self_product_halves_dimension() {
        let f = k_complete(4);
        let p = star(&f, &f).unwrap();
        for n in [1.0, 2.0, 7.0, 40.0] {
            let want = f.eval(Dimension::Finite(n / 2.0));
            assert!((p.eval(Dimension::Finite(n)) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn commutativity_and_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = FKFunction::two_branch(2.0, 4.0, 2.0);
        let g = k_complete(3);
        let fg = star(&f, &g).unwrap();
        let gf = star(&g, &f).unwrap();
        for n in grid() {
            assert!((fg.eval(n) - gf.eval(n)).abs() < 1e-7, "at {n}");
        }
        for _ in 0..50 {
            let n1: f64 = rng.gen_range(0.2..20.0);
            let n2: f64 = rng.gen_range(0.2..20.0);
            let a = f.eval(Dimension::Finite(n1));
            let b = g.eval(Dimension::Finite(n2));
            let v = fg.eval(Dimension::Finite(n1 + n2));
            assert!(a.min(b) - 1e-9 <= v && v <= a.max(b) + 1e-9);
        }
    }

    #[test]
    fn infinity_rule_exact() {
        let f = FKFunction::two_branch(2.0, 4.0, 2.0); // plateau 0
        let g = FKFunction::affine(3.0, 6.0);
        let p = star(&f, &g).unwrap();
        assert_eq!(p.eval(Dimension::Infinite), 0.0);
        let q = star(&g, &k_complete(5)).unwrap();
        assert_eq!(q.eval(Dimension::Infinite), 3.0);
    }

    #[test]
    fn fold_is_single_function_for_one_input() {
        let f = k_complete(3);
        let p = star_fold(std::slice::from_ref(&f)).unwrap();
        for n in grid() {
            assert_eq!(p.eval(n), f.eval(n));
        }
        assert!(matches!(star_fold(&[]), Err(StarError::EmptySequence)));
    }

    #[test]
    fn hypercube_fold() {
        let k2 = k_complete(2);
        for copies in 2..=4 {
            let fs = vec![k2.clone(); copies];
            let p = star_fold(&fs).unwrap();
            for n in grid() {
                let want = 2.0 - 2.0 * copies as f64 * n.inv();
                assert!((p.eval(n) - want).abs() < 1e-8, "n = {n}, {copies} copies");
            }
        }
    }

    #[test]
    fn fold_order_invariance() {
        let fs = [
            k_complete(2),
            FKFunction::two_branch(2.0, 4.0, 2.0),
            FKFunction::affine(2.5, 4.0),
        ];
        let orders: [[usize; 3]; 3] = [[0, 1, 2], [2, 1, 0], [1, 0, 2]];
        let folded: Vec<FKFunction> = orders
            .iter()
            .map(|ord| {
                let seq: Vec<FKFunction> = ord.iter().map(|&i| fs[i].clone()).collect();
                star_fold(&seq).unwrap()
            })
            .collect();
        for n in grid() {
            let v0 = folded[0].eval(n);
            for p in &folded[1..] {
                assert!((p.eval(n) - v0).abs() < 1e-7, "at {n}");
            }
        }
    }

    #[test]
    fn probe_rejects_decreasing() {
        let bad = FKFunction::from_closure(|n| -n, -1e9, FKTag::Surd);
        assert!(matches!(
            star(&bad, &k_complete(2)),
            Err(StarError::NotInFK { .. })
        ));
    }

    #[test]
    fn engine_backed_diverges_at_zero() {
        let tol = Tolerances::default();
        for (g, x) in [(complete(4), 0), (complete_bipartite(2, 3), 2)] {
            let f = FKFunction::engine_backed(&g, x, LaplacianKind::NonNormalized, &tol).unwrap();
            assert!(f.eval(Dimension::Finite(1e-6)) < -1e3);
        }
    }

    fn complete_bipartite(m: usize, n: usize) -> Graph {
        let mut e = vec![];
        for a in 0..m {
            for b in 0..n {
                e.push((a, m + b));
            }
        }
        Graph::from_edges(m + n, &e).unwrap()
    }

    #[test]
    fn product_graphs() {
        let k2 = complete(2);
        let k3 = complete(3);
        let c4 = cartesian_product(&k2, &k2).unwrap();
        assert_eq!(c4.n(), 4);
        assert_eq!(c4.edge_count(), 4);
        for v in 0..4 {
            assert_eq!(c4.degree(v), 2);
        }
        assert_eq!(local_structure(&c4, 0).unwrap().triangle_count(), 0);

        let prism = cartesian_product(&k2, &k3).unwrap();
        assert_eq!(prism.n(), 6);
        assert_eq!(prism.edge_count(), 9);
        for v in 0..6 {
            assert_eq!(prism.degree(v), 3);
        }

        let rook3 = cartesian_product(&k3, &k3).unwrap();
        assert_eq!(rook3.n(), 9);
        for v in 0..9 {
            assert_eq!(rook3.degree(v), 4);
        }
    }

    #[test]
    fn product_rejects_weighted_factors() {
        let k2 = complete(2);
        let wk2 = Graph::build(2, &[(0, 1)], Some(&[2.0]), None).unwrap();
        assert!(cartesian_product(&k2, &wk2).is_err());
        let mk2 = Graph::build(2, &[(0, 1)], None, Some(&[1.0, 3.0])).unwrap();
        assert!(cartesian_product(&mk2, &k2).is_err());
    }

    #[test]
    fn product_theorem_prism() {
        let tol = Tolerances::default();
        let k2 = complete(2);
        let k3 = complete(3);
        let prism = cartesian_product(&k2, &k3).unwrap();
        let f1 = FKFunction::engine_backed(&k2, 0, LaplacianKind::NonNormalized, &tol).unwrap();
        let f2 = FKFunction::engine_backed(&k3, 0, LaplacianKind::NonNormalized, &tol).unwrap();
        let p = star(&f1, &f2).unwrap();
        for n in grid() {
            let direct = curvature_at(&prism, 0, LaplacianKind::NonNormalized, n, &tol)
                .unwrap()
                .k;
            assert!((p.eval(n) - direct).abs() < 1e-6, "at {n}");
        }
        assert!((p.eval(Dimension::Finite(8.0)) - 1.5).abs() < 1e-6);
    }

    #[test]
    fn distinguishing_vertices_through_products() {
        // Two vertex classes of the 7-vertex example stay distinguishable
        // after *-multiplication with a cycle curvature function.
        let g = Graph::from_edges(
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
        )
        .unwrap();
        let tol = Tolerances::default();
        let fx = FKFunction::engine_backed(&g, 0, LaplacianKind::NonNormalized, &tol).unwrap();
        let fy = FKFunction::engine_backed(&g, 3, LaplacianKind::NonNormalized, &tol).unwrap();
        let cycle = FKFunction::two_branch(2.0, 4.0, 2.0);
        let px = star(&fx, &cycle).unwrap();
        let py = star(&fy, &cycle).unwrap();
        let max_gap = grid()
            .into_iter()
            .map(|n| (px.eval(n) - py.eval(n)).abs())
            .fold(0.0f64, f64::max);
        assert!(max_gap > 1e-3, "products must differ somewhere");
    }
}
