//! Period lattice coordinates and the Abel–Jacobi map.
//!
//! With a cycle basis `gamma_1..gamma_n` from a spanning tree, a 1-chain `c`
//! gets coordinates `x_j(c) = <c, gamma_j>_l`. In these coordinates the
//! lattice of integral functionals `Lambda*` is `Z^n` and the period lattice
//! `Lambda` is spanned by the rows of the Gram matrix `M`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{Chain, EdgeSet, Location, MetricGraph, RootedForest, TropicalDivisor};
use crate::linalg::{self, Matrix};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeData {
    pub tree: EdgeSet,
    /// Non-tree edges, in the order of the basis.
    pub non_tree: Vec<usize>,
    pub basis: Vec<Chain>,
    pub gram: Matrix,
    gram_inv: Matrix,
    forest: RootedForest,
}

impl LatticeData {
    /// Lattice data from the greedy spanning tree in edge order.
    pub fn new(g: &MetricGraph) -> Result<Self> {
        Self::with_tree(g, g.spanning_forest())
    }

    pub fn with_tree(g: &MetricGraph, tree: EdgeSet) -> Result<Self> {
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let forest = RootedForest::new(g, &tree)?;
        let basis = g.cycle_basis(&tree)?;
        let gram: Matrix = basis
            .iter()
            .map(|a| basis.iter().map(|b| g.edge_pairing(a, b)).collect())
            .collect();
        let gram_inv = linalg::inverse(&gram).expect("edge-length Gram matrix is positive definite");
        Ok(LatticeData {
            tree,
            non_tree: g.non_tree_edges(&tree),
            basis,
            gram,
            gram_inv,
            forest,
        })
    }

    /// `b_1(G)`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn covolume(&self) -> Rational {
        linalg::det(&self.gram)
    }

    pub fn gram_inverse(&self) -> &Matrix {
        &self.gram_inv
    }

    pub fn forest(&self) -> &RootedForest {
        &self.forest
    }

    /// `(<c, gamma_j>_l)_j`.
    pub fn coords(&self, g: &MetricGraph, c: &Chain) -> Vec<Rational> {
        self.basis.iter().map(|b| g.edge_pairing(c, b)).collect()
    }

    /// Coordinates of the full edge `e`, i.e. `l(e) * (gamma_j(e))_j`.
    pub fn edge_vector(&self, g: &MetricGraph, e: usize) -> Vec<Rational> {
        let len = &g.edge(e).length;
        self.basis.iter().map(|b| &b.0[e] * len).collect()
    }

    /// The lattice point `sum k_i Lambda_i`.
    pub fn lattice_point(&self, k: &[BigInt]) -> Vec<Rational> {
        let k: Vec<Rational> = k.iter().map(|x| Rational::from_integer(x.clone())).collect();
        linalg::vec_mat(&k, &self.gram)
    }

    /// `M^{-1} x`: the coefficients of `x` in the basis of `Lambda`.
    pub fn lattice_coefficients(&self, x: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&self.gram_inv, x)
    }

    pub fn is_lattice_vector(&self, x: &[Rational]) -> bool {
        self.lattice_coefficients(x).iter().all(|k| k.is_integer())
    }

    /// Representative of `x` modulo `Lambda` with lattice coefficients in `[0, 1)`,
    /// and those coefficients.
    pub fn reduce(&self, x: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let k = self.lattice_coefficients(x);
        let frac: Vec<Rational> = k.iter().map(|c| c - c.floor()).collect();
        (linalg::vec_mat(&frac, &self.gram), frac)
    }

    pub fn congruent(&self, x: &[Rational], y: &[Rational]) -> bool {
        self.is_lattice_vector(&linalg::sub(x, y))
    }

    /// A 1-chain with boundary `D - deg(D) * basepoint`, built from paths in
    /// `paths` (a rooted spanning forest of `g`).
    pub fn divisor_chain(g: &MetricGraph, paths: &RootedForest, basepoint: usize, d: &TropicalDivisor) -> Chain {
        let mut xi = Chain::zero(g.num_edges());
        for (loc, m) in d.points() {
            let m = int(*m);
            match loc {
                Location::Vertex(v) => xi.add_assign_scaled(&paths.path(g, basepoint, *v), &m),
                Location::EdgePoint { edge, offset } => {
                    let e = g.edge(*edge);
                    xi.add_assign_scaled(&paths.path(g, basepoint, e.tail), &m);
                    xi.0[*edge] += &m * offset / &e.length;
                }
            }
        }
        xi
    }

    /// Abel–Jacobi coordinates of `D - deg(D) * basepoint`, with paths taken
    /// in the lattice's own spanning tree.
    pub fn abel_jacobi(&self, g: &MetricGraph, basepoint: usize, d: &TropicalDivisor) -> Result<Vec<Rational>> {
        self.abel_jacobi_via(g, &self.forest, basepoint, d)
    }

    /// Abel–Jacobi coordinates using paths from another spanning forest. The
    /// result differs from [`LatticeData::abel_jacobi`] by a lattice vector.
    pub fn abel_jacobi_via(
        &self,
        g: &MetricGraph,
        paths: &RootedForest,
        basepoint: usize,
        d: &TropicalDivisor,
    ) -> Result<Vec<Rational>> {
        if basepoint >= g.num_vertices() {
            return Err(Error::UnknownVertex(format!("#{basepoint}")));
        }
        Ok(self.coords(g, &Self::divisor_chain(g, paths, basepoint, d)))
    }

    /// The integers in `[lo, hi]`, as inclusive bounds.
    pub(crate) fn integer_range(lo: &Rational, hi: &Rational) -> Option<(BigInt, BigInt)> {
        let a = lo.ceil().to_integer();
        let b = hi.floor().to_integer();
        (a <= b).then_some((a, b))
    }

    /// All `k` in `Z^n` with `k M` inside the box `[lo, hi]`.
    pub fn lattice_points_in_box(&self, lo: &[Rational], hi: &[Rational]) -> Vec<Vec<BigInt>> {
        let n = self.dim();
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut ranges = Vec::with_capacity(n);
        for row in &self.gram_inv {
            let (mut a, mut b) = (Rational::zero(), Rational::zero());
            for ((c, l), h) in row.iter().zip(lo).zip(hi) {
                let (x, y) = (c * l, c * h);
                if x < y {
                    a += x;
                    b += y;
                } else {
                    a += y;
                    b += x;
                }
            }
            match Self::integer_range(&a, &b) {
                Some(r) => ranges.push(r),
                None => return Vec::new(),
            }
        }
        let mut out = Vec::new();
        let mut cur: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
        loop {
            let p = self.lattice_point(&cur);
            if p.iter().zip(lo).zip(hi).all(|((x, l), h)| l <= x && x <= h) {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                if cur[i] < ranges[i].1 {
                    cur[i] += BigInt::one();
                    break;
                }
                cur[i] = ranges[i].0.clone();
                i += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::Divisor;
    use crate::rational::frac;

    #[test]
    fn two_vertex_loop_lattice() {
        let g = fixtures::two_vertex_loop();
        let l = LatticeData::new(&g).unwrap();
        assert_eq!(l.dim(), 1);
        assert_eq!(l.gram, vec![vec![int(2)]]);
        assert!(l.is_lattice_vector(&[int(4)]));
        assert!(!l.is_lattice_vector(&[int(1)]));
    }

    #[test]
    fn tree_and_triangle_lattices() {
        let path = MetricGraph::builder()
            .vertex("a", 0)
            .vertex("b", 1)
            .edge("e", "a", "b", int(3))
            .build()
            .unwrap();
        let l = LatticeData::new(&path).unwrap();
        assert_eq!(l.dim(), 0);
        assert_eq!(l.covolume(), int(1));
        let t = LatticeData::new(&fixtures::triangle()).unwrap();
        assert_eq!(t.gram, vec![vec![int(3)]]);
    }

    #[test]
    fn abel_jacobi_examples() {
        let g = fixtures::two_vertex_loop();
        let l = LatticeData::new(&g).unwrap();
        // Basis cycle is e2 - e1, so moving along e1 decreases the coordinate.
        let t = frac(1, 3);
        let p = TropicalDivisor::new(
            &g,
            vec![(
                Location::EdgePoint {
                    edge: 0,
                    offset: t.clone(),
                },
                1,
            )],
        )
        .unwrap();
        assert_eq!(l.abel_jacobi(&g, 0, &p).unwrap(), vec![-t]);
        let base = TropicalDivisor::from_divisor(&Divisor(vec![3, 0]));
        assert_eq!(l.abel_jacobi(&g, 0, &base).unwrap(), vec![int(0)]);
        let d = TropicalDivisor::from_divisor(&Divisor(vec![0, 3]));
        let x = l.abel_jacobi(&g, 0, &d).unwrap();
        assert_eq!(x, vec![int(-3)]);
        assert!(l.congruent(&x, &[int(1)]));
        assert_eq!(l.reduce(&x).0, vec![int(1)]);
    }

    #[test]
    fn lattice_points_in_a_box() {
        let l = LatticeData::new(&fixtures::two_vertex_loop()).unwrap();
        let pts = l.lattice_points_in_box(&[int(-3)], &[int(2)]);
        assert_eq!(
            pts,
            vec![vec![BigInt::from(-1)], vec![BigInt::from(0)], vec![BigInt::from(1)]]
        );
    }
}
