//! Weighted dual graphs of minimal resolutions of surface germs: the
//! coefficients of the negative part of `-K`, klt and redundant-point tests,
//! and a bounded enumeration of trees that checks which ones are log
//! terminal without redundant points.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::birational::{SurfaceModel, TrackedCurve};
use crate::error::{Error, Result};
use crate::lattice::{linalg, DivisorClass, IntersectionLattice, NegDefCertificate};
use crate::rational::{int, serde_rational, Rational};

/// Connected graph of smooth rational curves meeting transversally, each
/// with self-intersection `≤ -2`, and negative definite intersection form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualGraph {
    weights: Vec<i64>,
    edges: Vec<(usize, usize)>,
}

/// Graph description as read from a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub weights: Vec<i64>,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    /// The connected components, each as a validated graph.
    pub fn components(&self) -> Result<Vec<DualGraph>> {
        let n = self.weights.len();
        let edges = normalize_edges(n, &self.edges)?;
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut k = 0;
            while k < comp.len() {
                let v = comp[k];
                for &(a, b) in &edges {
                    let w = if a == v {
                        b
                    } else if b == v {
                        a
                    } else {
                        continue;
                    };
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            let index: BTreeMap<usize, usize> =
                comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let weights = comp.iter().map(|&v| self.weights[v]).collect();
            let sub = edges
                .iter()
                .filter(|(a, _)| index.contains_key(a))
                .map(|(a, b)| (index[a], index[b]))
                .collect();
            out.push(DualGraph::new(weights, sub)?);
        }
        Ok(out)
    }
}

fn normalize_edges(n: usize, edges: &[(usize, usize)]) -> Result<Vec<(usize, usize)>> {
    let mut out = BTreeSet::new();
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range")));
        }
        if a == b {
            return Err(Error::InvalidGraph(format!("loop at vertex {a}")));
        }
        if !out.insert((a.min(b), a.max(b))) {
            return Err(Error::InvalidGraph(format!("repeated edge ({a}, {b})")));
        }
    }
    Ok(out.into_iter().collect())
}

impl DualGraph {
    pub fn new(weights: Vec<i64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        if let Some(w) = weights.iter().find(|&&w| w > -2) {
            return Err(Error::InvalidGraph(format!("weight {w} is above -2")));
        }
        let edges = normalize_edges(weights.len(), &edges)?;
        let g = DualGraph { weights, edges };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        if !g.negative_definite().is_valid() {
            return Err(Error::NotNegativeDefinite {
                curves: (1..=g.len()).map(|i| format!("E{i}")).collect(),
            });
        }
        Ok(g)
    }

    /// A path with the given weights in order.
    pub fn chain(weights: &[i64]) -> Result<Self> {
        let edges = (1..weights.len()).map(|i| (i - 1, i)).collect();
        DualGraph::new(weights.to_vec(), edges)
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    fn is_connected(&self) -> bool {
        let adj = self.neighbours();
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.len()
    }

    pub fn gram(&self) -> Vec<Vec<Rational>> {
        let n = self.len();
        let mut g = vec![vec![Rational::zero(); n]; n];
        for (i, &w) in self.weights.iter().enumerate() {
            g[i][i] = int(w);
        }
        for &(a, b) in &self.edges {
            g[a][b] = Rational::one();
            g[b][a] = Rational::one();
        }
        g
    }

    pub fn negative_definite(&self) -> NegDefCertificate {
        NegDefCertificate::for_matrix((0..self.len()).collect(), &self.gram())
    }

    /// The weights in path order if the graph is a path, oriented so that
    /// the weight sequence is lexicographically largest.
    pub fn as_chain(&self) -> Option<Vec<i64>> {
        let adj = self.neighbours();
        if !self.is_tree() || adj.iter().any(|a| a.len() > 2) {
            return None;
        }
        let start = (0..self.len()).find(|&v| adj[v].len() <= 1)?;
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
            order.push(next);
            prev = cur;
            cur = next;
        }
        let forward: Vec<i64> = order.iter().map(|&v| self.weights[v]).collect();
        let backward: Vec<i64> = forward.iter().rev().copied().collect();
        Some(forward.max(backward))
    }

    /// `b` with `(K + Σ b_i E_i)·E_j = 0`, where `K·E_j = -2 - w_j`.
    pub fn resolve_coefficients(&self) -> Vec<Rational> {
        let rhs: Vec<Rational> = self.weights.iter().map(|&w| int(2 + w)).collect();
        linalg::solve_square(&self.gram(), &rhs).expect("negative definite graphs are regular")
    }

    /// Largest `b_i + b_j` over edges.
    pub fn max_edge_sum(&self, b: &[Rational]) -> Option<Rational> {
        self.edges.iter().map(|&(i, j)| &b[i] + &b[j]).max()
    }

    pub fn has_redundant_point(&self) -> bool {
        let b = self.resolve_coefficients();
        self.max_edge_sum(&b).is_some_and(|m| m >= Rational::one())
    }

    pub fn classify(&self) -> GraphVerdict {
        let b = self.resolve_coefficients();
        let klt = b.iter().all(|x| x < &Rational::one());
        let canonical = b.iter().all(Zero::is_zero);
        let max_edge_sum = self.max_edge_sum(&b);
        let redundant_free = max_edge_sum.as_ref().is_none_or(|m| m < &Rational::one());
        let matched_family = Family::of(self);
        GraphVerdict {
            weights: self.weights.clone(),
            edges: self.edges.clone(),
            b,
            klt,
            canonical,
            redundant_free,
            max_edge_sum,
            matched_family,
        }
    }

    /// The germ inside a smooth model: `⟨h⟩ ⊕ G` with `h² = 1`, curves
    /// `E1, E2, ...`, canonical class `-h - Σ b_i E_i` and nef axiom `h`.
    pub fn germ_model(&self) -> Result<SurfaceModel> {
        let n = self.len();
        let mut gram = vec![vec![Rational::zero(); n + 1]; n + 1];
        gram[0][0] = Rational::one();
        for (i, row) in self.gram().into_iter().enumerate() {
            for (j, x) in row.into_iter().enumerate() {
                gram[i + 1][j + 1] = x;
            }
        }
        let mut names = vec!["h".to_string()];
        names.extend((1..=n).map(|i| format!("E{i}")));
        let lattice = IntersectionLattice::new(gram, names)?;
        let b = self.resolve_coefficients();
        let mut k = vec![-Rational::one()];
        k.extend(b.into_iter().map(|x| -x));
        let curves = (0..n)
            .map(|i| TrackedCurve::new(format!("E{}", i + 1), DivisorClass::basis(n + 1, i + 1)))
            .collect();
        SurfaceModel::new(
            lattice,
            DivisorClass::new(k),
            curves,
            vec![DivisorClass::basis(n + 1, 0)],
        )
    }

    /// Canonical form of a weighted tree, invariant under relabelling.
    pub fn canonical_form(&self) -> String {
        assert!(self.is_tree(), "canonical form is only defined for trees");
        let adj = self.neighbours();
        centers(&adj)
            .into_iter()
            .map(|c| encode(&adj, &self.weights, c, usize::MAX))
            .min()
            .expect("a tree has a center")
    }

    /// Adds a leaf of weight `w` at vertex `v`. `None` if the result is not
    /// negative definite.
    fn with_leaf(&self, v: usize, w: i64) -> Option<DualGraph> {
        let mut weights = self.weights.clone();
        weights.push(w);
        let mut edges = self.edges.clone();
        edges.push((v, self.len()));
        let g = DualGraph { weights, edges };
        g.negative_definite().is_valid().then_some(g)
    }
}

impl fmt::Display for DualGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws = |ws: &[i64]| {
            ws.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        match self.as_chain() {
            Some(c) => write!(f, "[{}]", ws(&c)),
            None => {
                let es: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                write!(f, "tree[{}; {}]", ws(&self.weights), es.join(","))
            }
        }
    }
}

fn centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= leaves.len();
        let mut next = Vec::new();
        for &leaf in &leaves {
            degree[leaf] = 0;
            for &w in &adj[leaf] {
                if degree[w] > 0 {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        leaves = next;
    }
    leaves
}

fn encode(adj: &[Vec<usize>], weights: &[i64], v: usize, parent: usize) -> String {
    let mut children: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| encode(adj, weights, w, v))
        .collect();
    children.sort();
    format!("({}{})", weights[v], children.concat())
}

/// The non-canonical shapes allowed for a log terminal germ whose minimal
/// resolution has no redundant point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    /// All weights `-2`.
    Canonical,
    /// `α ≥ 1` curves of weight `-2` followed by one `-3`.
    TwosThenThree { alpha: usize },
    /// `[-2, -2, -3, -2]`.
    TwoTwoThreeTwo,
    /// `[-2, -3, -2]`.
    TwoThreeTwo,
    /// `[-2, -4]`.
    TwoFour,
    /// A single curve of weight `-n`, `n ≥ 3`.
    Single { n: i64 },
}

impl Family {
    pub fn of(g: &DualGraph) -> Option<Family> {
        if g.weights.iter().all(|&w| w == -2) {
            return Some(Family::Canonical);
        }
        let c = g.as_chain()?;
        match c.as_slice() {
            [w] => Some(Family::Single { n: -w }),
            [-2, -4] => Some(Family::TwoFour),
            [-2, -3, -2] => Some(Family::TwoThreeTwo),
            [-2, -2, -3, -2] => Some(Family::TwoTwoThreeTwo),
            [twos @ .., -3] if !twos.is_empty() && twos.iter().all(|&w| w == -2) => {
                Some(Family::TwosThenThree { alpha: twos.len() })
            }
            _ => None,
        }
    }

    pub fn weights(&self) -> Option<Vec<i64>> {
        match *self {
            Family::Canonical => None,
            Family::TwosThenThree { alpha } => {
                let mut w = vec![-2; alpha];
                w.push(-3);
                Some(w)
            }
            Family::TwoTwoThreeTwo => Some(vec![-2, -2, -3, -2]),
            Family::TwoThreeTwo => Some(vec![-2, -3, -2]),
            Family::TwoFour => Some(vec![-2, -4]),
            Family::Single { n } => Some(vec![-n]),
        }
    }

    /// Every non-canonical member with at most `max_vertices` vertices and
    /// weights `≥ min_weight`.
    pub fn all_within(max_vertices: usize, min_weight: i64) -> Vec<Family> {
        let mut out = Vec::new();
        for n in 3..=-min_weight {
            out.push(Family::Single { n });
        }
        for alpha in 1..max_vertices {
            out.push(Family::TwosThenThree { alpha });
        }
        out.extend([Family::TwoTwoThreeTwo, Family::TwoThreeTwo, Family::TwoFour]);
        out.retain(|f| {
            let w = f.weights().expect("non-canonical");
            w.len() <= max_vertices && w.iter().all(|&x| x >= min_weight)
        });
        out
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Canonical => f.write_str("canonical"),
            Family::TwosThenThree { alpha } => write!(f, "-2^{alpha} -3"),
            Family::TwoTwoThreeTwo => f.write_str("-2 -2 -3 -2"),
            Family::TwoThreeTwo => f.write_str("-2 -3 -2"),
            Family::TwoFour => f.write_str("-2 -4"),
            Family::Single { n } => write!(f, "-{n}"),
        }
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphVerdict {
    pub weights: Vec<i64>,
    pub edges: Vec<(usize, usize)>,
    #[serde(with = "serde_rational::vec")]
    pub b: Vec<Rational>,
    pub klt: bool,
    pub canonical: bool,
    pub redundant_free: bool,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub max_edge_sum: Option<Rational>,
    pub matched_family: Option<Family>,
}

fn serialize_opt_rational<S: serde::Serializer>(
    x: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => serde_rational::serialize(x, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationMode {
    /// Grow only graphs that are klt and free of redundant points.
    Pruned,
    /// Grow every klt graph.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationReport {
    pub max_vertices: usize,
    pub min_weight: i64,
    pub mode: EnumerationMode,
    /// Distinct negative definite klt trees met.
    pub klt_graphs: usize,
    pub canonical: usize,
    pub with_redundant_point: usize,
    pub redundant_free_non_canonical: Vec<String>,
    pub expected: Vec<String>,
    pub missing: Vec<String>,
    pub unexpected: Vec<String>,
    /// Graphs where adding a vertex or lowering a weight decreased some `b_i`.
    pub monotonicity_violations: Vec<String>,
    pub ok: bool,
}

/// Enumerates trees with at most `max_vertices` vertices and weights in
/// `[min_weight, -2]` by adding leaves, and compares the klt trees without
/// redundant points against [`Family::all_within`].
///
/// In [`EnumerationMode::Pruned`] only klt, redundant-free graphs are
/// extended; this relies on `b` being monotone under adding vertices, which
/// is checked along the way and reported.
pub fn enumerate_and_verify(
    max_vertices: usize,
    min_weight: i64,
    mode: EnumerationMode,
) -> EnumerationReport {
    let mut found: BTreeMap<String, (DualGraph, GraphVerdict)> = BTreeMap::new();
    let mut frontier: Vec<(DualGraph, Vec<Rational>)> = Vec::new();
    let mut violations = Vec::new();
    let weights: Vec<i64> = (min_weight.min(-2)..=-2).rev().collect();

    let mut admit = |g: DualGraph,
                     parent_b: Option<&[Rational]>,
                     found: &mut BTreeMap<String, (DualGraph, GraphVerdict)>,
                     next: &mut Vec<(DualGraph, Vec<Rational>)>| {
        let key = g.canonical_form();
        if found.contains_key(&key) {
            return;
        }
        let verdict = g.classify();
        if let Some(pb) = parent_b {
            if pb.iter().zip(&verdict.b).any(|(old, new)| new < old) {
                violations.push(format!("vertex added: {g}"));
            }
        }
        if !verdict.klt {
            return;
        }
        for (v, &w) in g.weights.iter().enumerate() {
            if w <= min_weight {
                continue;
            }
            let mut lower = g.weights.clone();
            lower[v] -= 1;
            let h = DualGraph {
                weights: lower,
                edges: g.edges.clone(),
            };
            let hb = h.resolve_coefficients();
            if hb.iter().zip(&verdict.b).any(|(new, old)| new < old) {
                violations.push(format!("weight lowered at {v}: {g}"));
            }
        }
        let grow = match mode {
            EnumerationMode::Pruned => verdict.redundant_free,
            EnumerationMode::Exhaustive => true,
        };
        if grow && g.len() < max_vertices {
            next.push((g.clone(), verdict.b.clone()));
        }
        found.insert(key, (g, verdict));
    };

    for &w in &weights {
        let g = DualGraph {
            weights: vec![w],
            edges: vec![],
        };
        admit(g, None, &mut found, &mut frontier);
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (g, b) in &frontier {
            for v in 0..g.len() {
                for &w in &weights {
                    if let Some(child) = g.with_leaf(v, w) {
                        admit(child, Some(b), &mut found, &mut next);
                    }
                }
            }
        }
        frontier = next;
    }

    let mut canonical = 0;
    let mut with_redundant_point = 0;
    let mut free: BTreeSet<String> = BTreeSet::new();
    for (g, v) in found.values() {
        if v.canonical {
            canonical += 1;
        } else if v.redundant_free {
            free.insert(g.to_string());
        } else {
            with_redundant_point += 1;
        }
    }
    let expected: BTreeSet<String> = Family::all_within(max_vertices, min_weight)
        .into_iter()
        .map(|f| {
            DualGraph::chain(&f.weights().expect("non-canonical"))
                .expect("family members are negative definite")
                .to_string()
        })
        .collect();
    let missing: Vec<String> = expected.difference(&free).cloned().collect();
    let unexpected: Vec<String> = free.difference(&expected).cloned().collect();
    let ok = missing.is_empty() && unexpected.is_empty() && violations.is_empty();
    EnumerationReport {
        max_vertices,
        min_weight,
        mode,
        klt_graphs: found.len(),
        canonical,
        with_redundant_point,
        redundant_free_non_canonical: free.into_iter().collect(),
        expected: expected.into_iter().collect(),
        missing,
        unexpected,
        monotonicity_violations: violations,
        ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn b(ws: &[i64]) -> Vec<Rational> {
        DualGraph::chain(ws).unwrap().resolve_coefficients()
    }

    #[test]
    fn coefficients_of_small_chains() {
        assert_eq!(b(&[-2, -4]), vec![q(2, 7), q(4, 7)]);
        assert_eq!(b(&[-3, -3]), vec![q(1, 2), q(1, 2)]);
        assert_eq!(b(&[-2, -5]), vec![q(1, 3), q(2, 3)]);
        assert_eq!(b(&[-2, -3, -2]), vec![q(1, 4), q(1, 2), q(1, 4)]);
        assert_eq!(
            b(&[-2, -2, -3, -2]),
            vec![q(2, 11), q(4, 11), q(6, 11), q(3, 11)]
        );
        assert_eq!(b(&[-2, -2, -4]), vec![q(1, 5), q(2, 5), q(3, 5)]);
        assert_eq!(b(&[-5]), vec![q(3, 5)]);
    }

    #[test]
    fn twos_then_three_coefficients() {
        for alpha in 1..8 {
            let mut ws = vec![-2; alpha];
            ws.push(-3);
            let den = 2 * alpha as i64 + 3;
            let expect: Vec<Rational> = (1..=alpha as i64 + 1).map(|k| q(k, den)).collect();
            assert_eq!(b(&ws), expect);
        }
    }

    #[test]
    fn redundancy_and_families() {
        let g = DualGraph::chain(&[-3, -3]).unwrap();
        assert!(g.has_redundant_point());
        assert_eq!(Family::of(&g), None);
        let g = DualGraph::chain(&[-2, -3, -2, -2]).unwrap();
        assert_eq!(Family::of(&g), Some(Family::TwoTwoThreeTwo));
        assert!(!g.has_redundant_point());
        let v = DualGraph::chain(&[-3, -2, -2]).unwrap().classify();
        assert_eq!(v.matched_family, Some(Family::TwosThenThree { alpha: 2 }));
        let v = DualGraph::chain(&[-2, -2, -2]).unwrap().classify();
        assert!(v.canonical && v.redundant_free && v.klt);
        assert_eq!(v.matched_family, Some(Family::Canonical));
    }

    #[test]
    fn invalid_graphs() {
        assert!(DualGraph::chain(&[-1]).is_err());
        assert!(DualGraph::new(vec![-2, -2], vec![]).is_err());
        assert!(DualGraph::new(vec![-2, -2], vec![(0, 1), (1, 0)]).is_err());
        // Affine D4 is only semidefinite.
        let d4 = DualGraph::new(vec![-2; 5], vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert!(matches!(d4, Err(Error::NotNegativeDefinite { .. })));
    }

    #[test]
    fn canonical_form_ignores_labels() {
        let a = DualGraph::new(vec![-2, -3, -2, -4], vec![(0, 1), (1, 2), (1, 3)]).unwrap();
        let b = DualGraph::new(vec![-4, -2, -2, -3], vec![(3, 0), (3, 1), (2, 3)]).unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());
        let c = DualGraph::chain(&[-2, -3, -4]).unwrap();
        let d = DualGraph::chain(&[-4, -3, -2]).unwrap();
        assert_eq!(c.canonical_form(), d.canonical_form());
        assert_ne!(a.canonical_form(), c.canonical_form());
    }

    #[test]
    fn components_are_split() {
        let spec = GraphSpec {
            weights: vec![-2, -4, -3],
            edges: vec![(0, 1)],
        };
        let comps = spec.components().unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].to_string(), "[-2,-4]");
        assert_eq!(comps[1].to_string(), "[-3]");
    }

    #[test]
    fn small_enumeration_matches_families() {
        let r = enumerate_and_verify(4, -4, EnumerationMode::Pruned);
        assert!(r.ok, "{r:?}");
        let e = enumerate_and_verify(4, -4, EnumerationMode::Exhaustive);
        assert!(e.ok, "{e:?}");
        assert_eq!(
            r.redundant_free_non_canonical,
            e.redundant_free_non_canonical
        );
        assert!(e.klt_graphs >= r.klt_graphs);
    }
}
