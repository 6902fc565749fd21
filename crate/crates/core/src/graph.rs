//! Vertex-weighted metric multigraphs and the combinatorics of subcurves.
//!
//! A [`MetricGraph`] is the dual graph of a nodal curve: vertices are
//! irreducible components carrying the geometric genus of their
//! normalization, edges are nodes carrying a positive rational length.
//! Loops and parallel edges are allowed. Every edge keeps the orientation
//! `tail -> head` it was constructed with; chains and cycle bases are
//! expressed relative to it.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

macro_rules! bitset {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
        pub struct $name(pub u64);

        impl $name {
            pub const EMPTY: $name = $name(0);

            pub fn full(n: usize) -> Self {
                debug_assert!(n <= 64);
                if n == 64 { $name(u64::MAX) } else { $name((1u64 << n) - 1) }
            }

            pub fn singleton(i: usize) -> Self {
                $name(1u64 << i)
            }

            pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
                $name(it.into_iter().fold(0u64, |acc, i| acc | (1u64 << i)))
            }

            pub fn contains(&self, i: usize) -> bool {
                i < 64 && self.0 & (1u64 << i) != 0
            }

            pub fn insert(&mut self, i: usize) {
                self.0 |= 1u64 << i;
            }

            pub fn remove(&mut self, i: usize) {
                self.0 &= !(1u64 << i);
            }

            pub fn len(&self) -> usize {
                self.0.count_ones() as usize
            }

            pub fn is_empty(&self) -> bool {
                self.0 == 0
            }

            pub fn union(&self, other: &Self) -> Self {
                $name(self.0 | other.0)
            }

            pub fn intersection(&self, other: &Self) -> Self {
                $name(self.0 & other.0)
            }

            pub fn difference(&self, other: &Self) -> Self {
                $name(self.0 & !other.0)
            }

            pub fn is_subset(&self, other: &Self) -> bool {
                self.0 & !other.0 == 0
            }

            /// Complement inside a universe of `n` elements.
            pub fn complement(&self, n: usize) -> Self {
                $name(!self.0 & Self::full(n).0)
            }

            pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
                let bits = self.0;
                (0..64).filter(move |i| bits & (1u64 << i) != 0)
            }

            pub fn indices(&self) -> Vec<usize> {
                self.iter().collect()
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.iter()).finish()
            }
        }

        impl PartialOrd for $name {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }

        /// Ordered by size, then lexicographically by sorted member indices.
        impl Ord for $name {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                self.len()
                    .cmp(&other.len())
                    .then_with(|| self.indices().cmp(&other.indices()))
            }
        }
    };
}

bitset!(
    /// A set of vertices. A [`Subcurve`] is a nonempty proper one.
    VertexSet
);
bitset!(
    /// A set of edges (nodes of the curve).
    EdgeSet
);

/// The vertex set of a subcurve: nonempty and proper by convention, though
/// the genus functions also accept the full vertex set.
pub type Subcurve = VertexSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub weight: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub length: Rational,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    /// The other endpoint, seen from `v`.
    pub fn opposite(&self, v: usize) -> usize {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }
}

/// Edge counts between a vertex set `W` and its complement, split by
/// membership in a node set `S`, plus the `S`-edges internal to `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryCounts {
    pub total: usize,
    pub in_s: usize,
    pub not_in_s: usize,
    pub s_internal: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    vertex_ids: HashMap<String, usize>,
    edge_ids: HashMap<String, usize>,
}

/// Builds a [`MetricGraph`] by string ids.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    vertices: Vec<(String, u32)>,
    edges: Vec<(String, String, String, Rational)>,
}

impl GraphBuilder {
    pub fn vertex(mut self, id: &str, weight: u32) -> Self {
        self.vertices.push((id.to_string(), weight));
        self
    }

    pub fn edge(mut self, id: &str, tail: &str, head: &str, length: Rational) -> Self {
        self.edges
            .push((id.to_string(), tail.to_string(), head.to_string(), length));
        self
    }

    pub fn build(self) -> Result<MetricGraph> {
        let vertices: Vec<Vertex> = self
            .vertices
            .into_iter()
            .map(|(id, weight)| Vertex { id, weight })
            .collect();
        let mut lookup = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            lookup.insert(v.id.clone(), i);
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for (id, t, h, length) in self.edges {
            let tail = *lookup.get(&t).ok_or(Error::UnknownVertex(t))?;
            let head = *lookup.get(&h).ok_or(Error::UnknownVertex(h))?;
            edges.push(Edge { id, tail, head, length });
        }
        MetricGraph::new(vertices, edges)
    }
}

impl MetricGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Domain("a graph needs at least one vertex".into()));
        }
        if vertices.len() > 64 || edges.len() > 64 {
            return Err(Error::Cap("vertex and edge sets are limited to 64 elements".into()));
        }
        let mut vertex_ids = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_ids.insert(v.id.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate vertex id `{}`", v.id)));
            }
        }
        let mut edge_ids = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if edge_ids.insert(e.id.clone(), i).is_some() || vertex_ids.contains_key(&e.id) {
                return Err(Error::Domain(format!("duplicate edge id `{}`", e.id)));
            }
            if !e.length.is_positive() {
                return Err(Error::Domain(format!(
                    "edge `{}` has non-positive length {}",
                    e.id,
                    rational::format(&e.length)
                )));
            }
            if e.tail >= vertices.len() || e.head >= vertices.len() {
                return Err(Error::Domain(format!("edge `{}` has a dangling endpoint", e.id)));
            }
        }
        Ok(MetricGraph {
            vertices,
            edges,
            vertex_ids,
            edge_ids,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.vertices[v].weight as i64
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertex_ids
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge_index(&self, id: &str) -> Result<usize> {
        self.edge_ids
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.num_vertices())
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::full(self.num_edges())
    }

    /// Every nonempty proper vertex subset, in increasing bitmask order.
    pub fn subcurves(&self) -> impl Iterator<Item = Subcurve> {
        let full = VertexSet::full(self.num_vertices()).0;
        (1..full).map(VertexSet)
    }

    /// Edges incident to `v`, loops listed once.
    pub fn incident_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.tail == v || e.head == v)
            .map(|(i, _)| i)
    }

    /// Number of edge germs at `v` (loops count twice).
    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.tail == v) as usize + (e.head == v) as usize)
            .sum()
    }

    /// Connected components after deleting the edges in `removed`; vertices
    /// are all kept. Components are listed by smallest member.
    pub fn components_without(&self, removed: &EdgeSet) -> Vec<VertexSet> {
        let mut uf = UnionFind::new(self.num_vertices());
        for (i, e) in self.edges.iter().enumerate() {
            if !removed.contains(i) {
                uf.union(e.tail, e.head);
            }
        }
        let mut comps: Vec<VertexSet> = Vec::new();
        let mut root_slot: HashMap<usize, usize> = HashMap::new();
        for v in 0..self.num_vertices() {
            let r = uf.find(v);
            let slot = *root_slot.entry(r).or_insert_with(|| {
                comps.push(VertexSet::EMPTY);
                comps.len() - 1
            });
            comps[slot].insert(v);
        }
        comps
    }

    pub fn components(&self) -> Vec<VertexSet> {
        self.components_without(&EdgeSet::EMPTY)
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// First Betti number `|E| - |V| + #components`.
    pub fn betti_number(&self) -> usize {
        self.num_edges() + self.components().len() - self.num_vertices()
    }

    /// Total genus `sum g_v + b_1(G)`.
    pub fn genus(&self) -> i64 {
        self.vertices.iter().map(|v| v.weight as i64).sum::<i64>() + self.betti_number() as i64
    }

    /// Number of edges with both endpoints in `w` (loops included).
    pub fn internal_edge_count(&self, w: &VertexSet, within: Option<&EdgeSet>) -> usize {
        self.edges
            .iter()
            .enumerate()
            .filter(|(i, e)| w.contains(e.tail) && w.contains(e.head) && within.is_none_or(|s| s.contains(*i)))
            .count()
    }

    /// Arithmetic genus of the subcurve on `w`:
    /// `sum_{v in W} g_v + |E(W)| - |W| + 1`. Negative for some disconnected `W`.
    pub fn arithmetic_genus(&self, w: &VertexSet) -> Result<i64> {
        self.check_vertex_set(w)?;
        let weights: i64 = w.iter().map(|v| self.weight(v)).sum();
        Ok(weights + self.internal_edge_count(w, None) as i64 - w.len() as i64 + 1)
    }

    /// Genus of the partial normalization of the subcurve on `w` along `s`.
    pub fn normalized_genus(&self, w: &VertexSet, s: &EdgeSet) -> Result<i64> {
        Ok(self.arithmetic_genus(w)? - self.internal_edge_count(w, Some(s)) as i64)
    }

    pub fn boundary_counts(&self, w: &VertexSet, s: &EdgeSet) -> BoundaryCounts {
        let mut counts = BoundaryCounts {
            total: 0,
            in_s: 0,
            not_in_s: 0,
            s_internal: 0,
        };
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b) = (w.contains(e.tail), w.contains(e.head));
            if a != b {
                counts.total += 1;
                if s.contains(i) {
                    counts.in_s += 1;
                } else {
                    counts.not_in_s += 1;
                }
            } else if a && s.contains(i) {
                counts.s_internal += 1;
            }
        }
        counts
    }

    /// Non-loop edges joining `w` to its complement.
    pub fn boundary_edges(&self, w: &VertexSet) -> EdgeSet {
        EdgeSet::from_indices(
            self.edges
                .iter()
                .enumerate()
                .filter(|(_, e)| w.contains(e.tail) != w.contains(e.head))
                .map(|(i, _)| i),
        )
    }

    fn check_vertex_set(&self, w: &VertexSet) -> Result<()> {
        if w.is_empty() {
            return Err(Error::Domain("empty vertex set".into()));
        }
        if !w.is_subset(&self.all_vertices()) {
            return Err(Error::Domain(format!("vertex set {w:?} is not inside the graph")));
        }
        Ok(())
    }

    /// A spanning forest chosen greedily in edge order.
    pub fn spanning_forest(&self) -> EdgeSet {
        self.spanning_forest_in_order(0..self.num_edges())
    }

    /// Greedy spanning forest scanning the edges in the given order.
    pub fn spanning_forest_in_order(&self, order: impl IntoIterator<Item = usize>) -> EdgeSet {
        let mut uf = UnionFind::new(self.num_vertices());
        let mut tree = EdgeSet::EMPTY;
        for i in order {
            let e = &self.edges[i];
            if uf.union(e.tail, e.head) {
                tree.insert(i);
            }
        }
        tree
    }

    pub fn validate_forest(&self, tree: &EdgeSet) -> Result<()> {
        if !tree.is_subset(&self.all_edges()) {
            return Err(Error::InvalidForest("contains unknown edges".into()));
        }
        let mut uf = UnionFind::new(self.num_vertices());
        for i in tree.iter() {
            let e = &self.edges[i];
            if !uf.union(e.tail, e.head) {
                return Err(Error::InvalidForest(format!("edge `{}` closes a cycle", e.id)));
            }
        }
        if tree.len() + self.components().len() != self.num_vertices() {
            return Err(Error::InvalidForest("does not span every component".into()));
        }
        Ok(())
    }

    /// Integer cycle basis relative to a spanning forest: for each non-tree
    /// edge `f` (in edge order), `f` plus the tree path from `head(f)` back to
    /// `tail(f)`.
    pub fn cycle_basis(&self, tree: &EdgeSet) -> Result<Vec<Chain>> {
        let forest = RootedForest::new(self, tree)?;
        Ok(self
            .non_tree_edges(tree)
            .into_iter()
            .map(|f| {
                let e = &self.edges[f];
                let mut c = forest.path(self, e.head, e.tail);
                c.0[f] += int(1);
                c
            })
            .collect())
    }

    pub fn non_tree_edges(&self, tree: &EdgeSet) -> Vec<usize> {
        (0..self.num_edges()).filter(|i| !tree.contains(*i)).collect()
    }

    /// `sum_e c1(e) c2(e) l(e)`.
    pub fn edge_pairing(&self, c1: &Chain, c2: &Chain) -> Rational {
        self.edges
            .iter()
            .zip(c1.0.iter().zip(c2.0.iter()))
            .filter(|(_, (a, b))| !a.is_zero() && !b.is_zero())
            .fold(Rational::zero(), |acc, (e, (a, b))| acc + a * b * &e.length)
    }

    /// Boundary of a chain as a rational function on vertices (`head - tail`).
    pub fn boundary(&self, c: &Chain) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.num_vertices()];
        for (e, x) in self.edges.iter().zip(c.0.iter()) {
            if x.is_zero() {
                continue;
            }
            out[e.head] += x;
            out[e.tail] -= x;
        }
        out
    }

    /// `G - S`: same vertices, edges of `s` deleted. Edge indices are renumbered;
    /// the returned vector maps new edge index to old.
    pub fn delete_edges(&self, s: &EdgeSet) -> (MetricGraph, Vec<usize>) {
        let keep: Vec<usize> = (0..self.num_edges()).filter(|i| !s.contains(*i)).collect();
        let edges = keep.iter().map(|&i| self.edges[i].clone()).collect();
        let g = MetricGraph::new(self.vertices.clone(), edges).expect("subgraph of a valid graph");
        (g, keep)
    }

    /// Subgraph induced on `w`, keeping only edges not in `removed`. Returns the
    /// graph and the old index of each new vertex.
    pub fn induced(&self, w: &VertexSet, removed: &EdgeSet) -> (MetricGraph, Vec<usize>) {
        let old: Vec<usize> = w.indices();
        let mut new_of = vec![usize::MAX; self.num_vertices()];
        for (k, &v) in old.iter().enumerate() {
            new_of[v] = k;
        }
        let vertices = old.iter().map(|&v| self.vertices[v].clone()).collect();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, e)| !removed.contains(*i) && w.contains(e.tail) && w.contains(e.head))
            .map(|(_, e)| Edge {
                id: e.id.clone(),
                tail: new_of[e.tail],
                head: new_of[e.head],
                length: e.length.clone(),
            })
            .collect();
        let g = MetricGraph::new(vertices, edges).expect("induced subgraph of a valid graph");
        (g, old)
    }

    /// Inserts a weight-0 exceptional vertex in the middle of every edge of `s`
    /// and extends `d` by 1 on each exceptional vertex.
    pub fn subdivide_type(&self, s: &EdgeSet, d: &Divisor) -> (MetricGraph, Divisor) {
        let mut vertices = self.vertices.clone();
        let mut values = d.0.clone();
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !s.contains(i) {
                edges.push(e.clone());
                continue;
            }
            let x = vertices.len();
            vertices.push(Vertex {
                id: format!("{}~x", e.id),
                weight: 0,
            });
            values.push(1);
            let half = &e.length / int(2);
            edges.push(Edge {
                id: format!("{}~a", e.id),
                tail: e.tail,
                head: x,
                length: half.clone(),
            });
            edges.push(Edge {
                id: format!("{}~b", e.id),
                tail: x,
                head: e.head,
                length: half,
            });
        }
        let g = MetricGraph::new(vertices, edges).expect("subdivision of a valid graph");
        (g, Divisor(values))
    }

    /// Kirchhoff count of spanning trees of the underlying multigraph (loops
    /// ignored), via the reduced Laplacian determinant.
    pub fn spanning_tree_count(&self) -> num_bigint::BigInt {
        let n = self.num_vertices();
        if !self.is_connected() {
            return num_bigint::BigInt::zero();
        }
        if n == 1 {
            return num_bigint::BigInt::from(1);
        }
        let mut lap = vec![vec![Rational::zero(); n]; n];
        for e in self.edges.iter().filter(|e| !e.is_loop()) {
            lap[e.tail][e.tail] += int(1);
            lap[e.head][e.head] += int(1);
            lap[e.tail][e.head] -= int(1);
            lap[e.head][e.tail] -= int(1);
        }
        let minor: Vec<Vec<Rational>> = lap[1..].iter().map(|r| r[1..].to_vec()).collect();
        crate::linalg::det(&minor).to_integer()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// A spanning forest with every component rooted at its smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedForest {
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
}

impl RootedForest {
    pub fn new(g: &MetricGraph, tree: &EdgeSet) -> Result<Self> {
        g.validate_forest(tree)?;
        let n = g.num_vertices();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for i in tree.iter() {
                    let e = g.edge(i);
                    if e.tail != v && e.head != v {
                        continue;
                    }
                    let u = e.opposite(v);
                    if !seen[u] {
                        seen[u] = true;
                        parent[u] = Some((v, i));
                        depth[u] = depth[v] + 1;
                        stack.push(u);
                    }
                }
            }
        }
        Ok(RootedForest { parent, depth })
    }

    /// The oriented tree path from `from` to `to` as an integer chain. Both
    /// vertices must lie in the same component.
    pub fn path(&self, g: &MetricGraph, from: usize, to: usize) -> Chain {
        let mut c = Chain::zero(g.num_edges());
        let (mut a, mut b) = (from, to);
        // Walking up from `a` traverses edges toward the root (forward part);
        // walking up from `b` traverses edges that the path uses in reverse.
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let (p, e) = self.parent[a].expect("vertices share a component");
                c.0[e] += if g.edge(e).tail == a { int(1) } else { int(-1) };
                a = p;
            } else {
                let (p, e) = self.parent[b].expect("vertices share a component");
                c.0[e] += if g.edge(e).head == b { int(1) } else { int(-1) };
                b = p;
            }
        }
        c
    }
}

/// An integer-valued function on the vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Divisor(pub Vec<i64>);

impl Divisor {
    pub fn zero(n: usize) -> Self {
        Divisor(vec![0; n])
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn sum_over(&self, w: &VertexSet) -> i64 {
        w.iter().map(|v| self.0[v]).sum()
    }

    pub fn point(n: usize, v: usize, k: i64) -> Self {
        let mut d = Divisor::zero(n);
        d.0[v] = k;
        d
    }

    pub fn scaled(&self, k: i64) -> Self {
        Divisor(self.0.iter().map(|x| x * k).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Index<usize> for Divisor {
    type Output = i64;
    fn index(&self, v: usize) -> &i64 {
        &self.0[v]
    }
}

impl IndexMut<usize> for Divisor {
    fn index_mut(&mut self, v: usize) -> &mut i64 {
        &mut self.0[v]
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        Divisor(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        Divisor(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor(self.0.iter().map(|a| -a).collect())
    }
}

/// A rational 1-chain, dense over the edges, relative to stored orientations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chain(pub Vec<Rational>);

impl Chain {
    pub fn zero(num_edges: usize) -> Self {
        Chain(vec![Rational::zero(); num_edges])
    }

    pub fn unit(num_edges: usize, e: usize) -> Self {
        let mut c = Chain::zero(num_edges);
        c.0[e] = int(1);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, k: &Rational) -> Chain {
        Chain(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add_assign_scaled(&mut self, other: &Chain, k: &Rational) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a += b * k;
            }
        }
    }
}

impl Add for &Chain {
    type Output = Chain;
    fn add(self, rhs: &Chain) -> Chain {
        Chain(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Chain {
    type Output = Chain;
    fn sub(self, rhs: &Chain) -> Chain {
        Chain(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// A point of the metric graph: a vertex, or an interior point of an edge at
/// distance `offset` from its tail.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    Vertex(usize),
    EdgePoint { edge: usize, offset: Rational },
}

impl Location {
    /// Canonical form: an edge point at offset 0 or `l(e)` becomes the endpoint.
    pub fn normalized(self, g: &MetricGraph) -> Result<Location> {
        match self {
            Location::Vertex(v) if v < g.num_vertices() => Ok(Location::Vertex(v)),
            Location::Vertex(v) => Err(Error::UnknownVertex(format!("#{v}"))),
            Location::EdgePoint { edge, offset } => {
                if edge >= g.num_edges() {
                    return Err(Error::UnknownEdge(format!("#{edge}")));
                }
                let e = g.edge(edge);
                if offset.is_zero() {
                    Ok(Location::Vertex(e.tail))
                } else if offset == e.length {
                    Ok(Location::Vertex(e.head))
                } else if offset.is_negative() || offset > e.length {
                    Err(Error::Domain(format!(
                        "offset {} outside edge `{}`",
                        rational::format(&offset),
                        e.id
                    )))
                } else {
                    Ok(Location::EdgePoint { edge, offset })
                }
            }
        }
    }
}

/// A finite formal sum of points of the metric graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TropicalDivisor {
    points: Vec<(Location, i64)>,
}

impl TropicalDivisor {
    /// Normalizes locations, merges repeated points and drops zero multiplicities.
    pub fn new(g: &MetricGraph, points: Vec<(Location, i64)>) -> Result<Self> {
        let mut merged: std::collections::BTreeMap<Location, i64> = Default::default();
        for (loc, m) in points {
            *merged.entry(loc.normalized(g)?).or_insert(0) += m;
        }
        Ok(TropicalDivisor {
            points: merged.into_iter().filter(|(_, m)| *m != 0).collect(),
        })
    }

    pub fn zero() -> Self {
        TropicalDivisor { points: Vec::new() }
    }

    pub fn from_divisor(d: &Divisor) -> Self {
        TropicalDivisor {
            points: d
                .0
                .iter()
                .enumerate()
                .filter(|(_, m)| **m != 0)
                .map(|(v, m)| (Location::Vertex(v), *m))
                .collect(),
        }
    }

    /// `d + sum_{e in S} (point of e at offsets[e])`.
    pub fn of_type(g: &MetricGraph, s: &EdgeSet, d: &Divisor, offsets: &[(usize, Rational)]) -> Result<Self> {
        let mut pts: Vec<(Location, i64)> = d.0.iter().enumerate().map(|(v, m)| (Location::Vertex(v), *m)).collect();
        for (e, t) in offsets {
            if !s.contains(*e) {
                return Err(Error::Domain(format!("edge #{e} not in S")));
            }
            let len = &g.edge(*e).length;
            if !t.is_positive() || t >= len {
                return Err(Error::Domain("type points must be interior to their edges".into()));
            }
            pts.push((
                Location::EdgePoint {
                    edge: *e,
                    offset: t.clone(),
                },
                1,
            ));
        }
        TropicalDivisor::new(g, pts)
    }

    pub fn points(&self) -> &[(Location, i64)] {
        &self.points
    }

    pub fn degree(&self) -> i64 {
        self.points.iter().map(|(_, m)| m).sum()
    }

    pub fn is_effective(&self) -> bool {
        self.points.iter().all(|(_, m)| *m >= 0)
    }

    pub fn plus(&self, g: &MetricGraph, other: &TropicalDivisor) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        TropicalDivisor::new(g, pts)
    }

    pub fn negated(&self) -> Self {
        TropicalDivisor {
            points: self.points.iter().map(|(l, m)| (l.clone(), -m)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::frac;

    fn set(ix: &[usize]) -> VertexSet {
        VertexSet::from_indices(ix.iter().copied())
    }

    fn eset(ix: &[usize]) -> EdgeSet {
        EdgeSet::from_indices(ix.iter().copied())
    }

    #[test]
    fn arithmetic_genus_examples() {
        let g = fixtures::two_vertex_loop();
        assert_eq!(g.arithmetic_genus(&set(&[1])).unwrap(), 1);
        assert_eq!(g.arithmetic_genus(&g.all_vertices()).unwrap(), 3);
        assert_eq!(g.genus(), 3);
        let point = MetricGraph::builder().vertex("p", 0).build().unwrap();
        assert_eq!(point.arithmetic_genus(&point.all_vertices()).unwrap(), 0);
        assert!(g.arithmetic_genus(&VertexSet::EMPTY).is_err());
    }

    #[test]
    fn normalized_genus_examples() {
        let g = fixtures::two_vertex_loop();
        assert_eq!(g.normalized_genus(&g.all_vertices(), &eset(&[0])).unwrap(), 2);
        assert_eq!(g.normalized_genus(&set(&[1]), &eset(&[0, 1])).unwrap(), 1);
        assert_eq!(g.normalized_genus(&g.all_vertices(), &eset(&[0, 1])).unwrap(), 1);
    }

    #[test]
    fn boundary_count_examples() {
        let g = fixtures::two_vertex_loop();
        let c = g.boundary_counts(&set(&[1]), &EdgeSet::EMPTY);
        assert_eq!((c.total, c.in_s, c.not_in_s, c.s_internal), (2, 0, 2, 0));
        let c = g.boundary_counts(&set(&[1]), &eset(&[0, 1]));
        assert_eq!((c.total, c.in_s, c.not_in_s, c.s_internal), (2, 2, 0, 0));
    }

    #[test]
    fn loops_never_on_the_boundary() {
        let g = fixtures::dumbbell();
        let left = set(&[0]);
        let c = g.boundary_counts(&left, &g.all_edges());
        assert_eq!(c.total, 1);
        assert_eq!(c.s_internal, 1);
        assert_eq!(g.arithmetic_genus(&left).unwrap(), 1);
    }

    #[test]
    fn cycle_basis_of_two_vertex_loop() {
        let g = fixtures::two_vertex_loop();
        let basis = g.cycle_basis(&eset(&[0])).unwrap();
        assert_eq!(basis, vec![Chain(vec![int(-1), int(1)])]);
        assert!(g.cycle_basis(&eset(&[0, 1])).is_err());
    }

    #[test]
    fn cycle_basis_degenerate_cases() {
        let path = MetricGraph::builder()
            .vertex("a", 0)
            .vertex("b", 0)
            .edge("e", "a", "b", int(1))
            .build()
            .unwrap();
        assert!(path.cycle_basis(&path.spanning_forest()).unwrap().is_empty());
        let lp = MetricGraph::builder()
            .vertex("a", 0)
            .edge("e", "a", "a", int(2))
            .build()
            .unwrap();
        assert_eq!(lp.cycle_basis(&EdgeSet::EMPTY).unwrap(), vec![Chain(vec![int(1)])]);
    }

    #[test]
    fn pairing_examples() {
        let g = fixtures::two_vertex_loop();
        let c = Chain(vec![int(1), int(-1)]);
        assert_eq!(g.edge_pairing(&c, &c), int(2));
        assert_eq!(g.edge_pairing(&c, &Chain::zero(2)), int(0));
        assert_eq!(g.edge_pairing(&Chain::unit(2, 0), &c), int(1));
    }

    #[test]
    fn subdivision_examples() {
        let g = fixtures::two_vertex_loop();
        let (h, dh) = g.subdivide_type(&eset(&[0]), &Divisor(vec![0, 1]));
        assert_eq!(h.num_vertices(), 3);
        assert_eq!(dh, Divisor(vec![0, 1, 1]));
        assert_eq!(dh.degree(), 2);
        assert_eq!(h.edge(0).length, frac(1, 2));

        let (same, d) = g.subdivide_type(&EdgeSet::EMPTY, &Divisor(vec![3, 4]));
        assert_eq!(same, g);
        assert_eq!(d, Divisor(vec![3, 4]));

        let lp = MetricGraph::builder()
            .vertex("a", 0)
            .edge("e", "a", "a", int(2))
            .build()
            .unwrap();
        let (h, _) = lp.subdivide_type(&eset(&[0]), &Divisor(vec![0]));
        assert_eq!(h.num_edges(), 2);
        assert!(h.edges().iter().all(|e| !e.is_loop()));
        assert!(h.edges().iter().all(|e| e.length == int(1)));
    }

    #[test]
    fn tropical_divisor_normalizes() {
        let g = fixtures::two_vertex_loop();
        let d = TropicalDivisor::new(
            &g,
            vec![
                (
                    Location::EdgePoint {
                        edge: 0,
                        offset: int(1),
                    },
                    2,
                ),
                (Location::Vertex(1), -2),
                (
                    Location::EdgePoint {
                        edge: 1,
                        offset: frac(1, 3),
                    },
                    1,
                ),
            ],
        )
        .unwrap();
        assert_eq!(d.points().len(), 1);
        assert_eq!(d.degree(), 1);
        assert!(TropicalDivisor::new(
            &g,
            vec![(
                Location::EdgePoint {
                    edge: 0,
                    offset: int(5)
                },
                1
            )]
        )
        .is_err());
    }

    #[test]
    fn spanning_tree_counts() {
        assert_eq!(fixtures::two_vertex_loop().spanning_tree_count(), 2.into());
        assert_eq!(fixtures::triangle().spanning_tree_count(), 3.into());
        assert_eq!(fixtures::dumbbell().spanning_tree_count(), 1.into());
    }
}
