//! Zonotopes `base + sum [0, 1] g_i` and the cells `Q_{S,d}` of the
//! decompositions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::admissible::{admissible_halfspaces, SurdZonotope};
use super::lattice::LatticeData;
use crate::graph::{Chain, MetricGraph};
use crate::linalg::{self, Matrix};
use crate::lp::{Cmp, Lp, LpOutcome};
use crate::rational::{self, frac, int, Rational};
use crate::stability::SheafType;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zonotope {
    pub base: Vec<Rational>,
    pub generators: Vec<Vec<Rational>>,
}

/// Identifies a zonotope as a point set: its center and its generators with
/// parallel ones merged (primitive direction, positive total multiple).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZonotopeKey {
    pub generators: Vec<(Vec<BigInt>, Rational)>,
    pub center: Vec<Rational>,
}

impl Zonotope {
    pub fn point(base: Vec<Rational>) -> Self {
        Zonotope {
            base,
            generators: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn dim(&self) -> usize {
        linalg::rank_of(&self.generators)
    }

    /// `base + sum s_i g_i`.
    pub fn at(&self, s: &[Rational]) -> Vec<Rational> {
        let mut p = self.base.clone();
        for (g, si) in self.generators.iter().zip(s) {
            for (x, y) in p.iter_mut().zip(g) {
                *x += si * y;
            }
        }
        p
    }

    pub fn center(&self) -> Vec<Rational> {
        self.at(&vec![frac(1, 2); self.generators.len()])
    }

    pub fn reduced_generators(&self) -> Vec<(Vec<BigInt>, Rational)> {
        let mut merged: BTreeMap<Vec<BigInt>, Rational> = BTreeMap::new();
        for g in &self.generators {
            if let Some((dir, c)) = rational::canonical_direction(g) {
                *merged.entry(dir).or_insert_with(Rational::zero) += c.abs();
            }
        }
        merged.into_iter().collect()
    }

    /// Key of the exact point set.
    pub fn exact_key(&self) -> ZonotopeKey {
        ZonotopeKey {
            generators: self.reduced_generators(),
            center: self.center(),
        }
    }

    /// Key of the point set modulo the period lattice; the center is stored
    /// by the fractional parts of its lattice coefficients.
    pub fn key(&self, lattice: &LatticeData) -> ZonotopeKey {
        ZonotopeKey {
            generators: self.reduced_generators(),
            center: lattice.reduce(&self.center()).1,
        }
    }

    pub fn translated(&self, v: &[Rational]) -> Zonotope {
        Zonotope {
            base: linalg::add(&self.base, v),
            generators: self.generators.clone(),
        }
    }

    pub fn bounding_box(&self) -> (Vec<Rational>, Vec<Rational>) {
        let mut lo = self.base.clone();
        let mut hi = self.base.clone();
        for g in &self.generators {
            for (j, x) in g.iter().enumerate() {
                if x.is_negative() {
                    lo[j] += x;
                } else {
                    hi[j] += x;
                }
            }
        }
        (lo, hi)
    }

    /// The distinct vertices among the `2^k` corner sums.
    pub fn corners(&self) -> Vec<Vec<Rational>> {
        let k = self.generators.len();
        let mut out: Vec<Vec<Rational>> = (0..1u64 << k)
            .map(|mask| {
                let s: Vec<Rational> = (0..k).map(|i| int(((mask >> i) & 1) as i64)).collect();
                self.at(&s)
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// `dim`-dimensional volume, for a zonotope of full dimension `dim`.
    pub fn volume(&self) -> Rational {
        linalg::zonotope_volume(&self.generators, self.ambient_dim())
    }

    /// The facets, each as a zonotope on the generators of its flat.
    pub fn facets(&self) -> Vec<Zonotope> {
        let r = self.dim();
        if r == 0 {
            return Vec::new();
        }
        let n = self.ambient_dim();
        let k = self.generators.len();
        let mut flats: Vec<u64> = Vec::new();
        linalg::for_each_subset(k, r - 1, |ix| {
            let sub: Vec<Vec<Rational>> = ix.iter().map(|&i| self.generators[i].clone()).collect();
            if linalg::rank_of(&sub) != r - 1 {
                return;
            }
            let mut mask = 0u64;
            for (i, g) in self.generators.iter().enumerate() {
                let mut with = sub.clone();
                with.push(g.clone());
                if linalg::rank_of(&with) == r - 1 {
                    mask |= 1 << i;
                }
            }
            if !flats.contains(&mask) {
                flats.push(mask);
            }
        });
        let mut out = Vec::with_capacity(2 * flats.len());
        for mask in flats {
            let inside: Matrix = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.generators[i].clone())
                .collect();
            let outside: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).collect();
            let phi = linalg::nullspace(&inside, n)
                .into_iter()
                .find(|u| outside.iter().any(|&i| !linalg::dot(u, &self.generators[i]).is_zero()))
                .expect("a flat of corank one has a separating functional");
            for sign in [1i64, -1] {
                let mut base = self.base.clone();
                for &i in &outside {
                    if (linalg::dot(&phi, &self.generators[i]) * int(sign)).is_positive() {
                        base = linalg::add(&base, &self.generators[i]);
                    }
                }
                out.push(Zonotope {
                    base,
                    generators: inside.clone(),
                });
            }
        }
        out
    }

    /// Every proper face, each once, from facets down to vertices.
    pub fn faces(&self) -> Vec<Zonotope> {
        let mut seen: BTreeMap<ZonotopeKey, Zonotope> = BTreeMap::new();
        let mut frontier = self.facets();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for f in frontier {
                let key = f.exact_key();
                if seen.contains_key(&key) {
                    continue;
                }
                next.extend(f.facets());
                seen.insert(key, f);
            }
            frontier = next;
        }
        let mut faces: Vec<Zonotope> = seen.into_values().collect();
        faces.sort_by_key(|f| std::cmp::Reverse(f.dim()));
        faces
    }

    /// Largest `tau <= 1/2` such that `p = base + sum s_i g_i` with every
    /// `s_i` in `[tau, 1 - tau]`; `None` when `p` is outside the zonotope.
    /// The point is in the relative interior iff the depth is positive.
    pub fn depth(&self, p: &[Rational]) -> Option<Rational> {
        let rhs = linalg::sub(p, &self.base);
        box_depth(&[(&self.generators, 1)], &rhs)
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.depth(p).is_some()
    }

    pub fn in_relative_interior(&self, p: &[Rational]) -> bool {
        self.depth(p).is_some_and(|t| t.is_positive())
    }

    /// `[min, max]` of `<u, .>` over the zonotope.
    pub fn value_range(&self, u: &[Rational]) -> (Rational, Rational) {
        let at_base = linalg::dot(u, &self.base);
        let (mut lo, mut hi) = (at_base.clone(), at_base);
        for g in &self.generators {
            let x = linalg::dot(u, g);
            if x.is_negative() {
                lo += x;
            } else {
                hi += x;
            }
        }
        (lo, hi)
    }

    pub fn hull(&self) -> Hull {
        let functionals = admissible_halfspaces(&SurdZonotope::from_rational(self, 2))
            .expect("rational zonotopes are admissible")
            .into_iter()
            .map(|h| {
                let u: Vec<Rational> = h.normal.into_iter().map(Rational::from_integer).collect();
                let (lo, hi) = self.value_range(&u);
                Functional { u, lo, hi }
            })
            .collect();
        Hull { functionals }
    }

    /// Some parameter vector `s` in `[0, 1]^k` with `at(s) = p`.
    pub fn parameters(&self, p: &[Rational]) -> Option<Vec<Rational>> {
        let k = self.generators.len();
        let mut lp = Lp::new(k);
        add_equations(&mut lp, &[(&self.generators, 1)], &linalg::sub(p, &self.base), 0);
        for i in 0..k {
            lp.add(unit(k, i), Cmp::Le, int(1));
        }
        lp.feasible_point()
    }
}

/// A functional `u` with its range `[lo, hi]` on a zonotope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functional {
    pub u: Vec<Rational>,
    pub lo: Rational,
    pub hi: Rational,
}

/// The facet and affine-hull functionals of a zonotope: it is the set where
/// every functional lies in its range, and its relative interior is where
/// each nonconstant one lies strictly inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hull {
    pub functionals: Vec<Functional>,
}

impl Hull {
    pub fn in_relative_interior(&self, p: &[Rational]) -> bool {
        self.functionals.iter().all(|f| {
            let v = linalg::dot(&f.u, p);
            if f.lo == f.hi {
                v == f.lo
            } else {
                f.lo < v && v < f.hi
            }
        })
    }

    /// A cheap certificate that the relative interiors of this zonotope and
    /// `other` are disjoint: some functional has `other` on the far side of
    /// the zonotope's minimum, strictly unless the functional is constant.
    pub fn separates(&self, other: &Zonotope) -> bool {
        self.functionals.iter().any(|f| {
            let (_, other_hi) = other.value_range(&f.u);
            other_hi < f.lo || (other_hi == f.lo && f.hi > f.lo)
        })
    }
}

/// Whether the relative interiors of two zonotopes meet.
pub fn relative_interiors_meet(a: &Zonotope, b: &Zonotope) -> bool {
    let rhs = linalg::sub(&b.base, &a.base);
    box_depth(&[(&a.generators, 1), (&b.generators, -1)], &rhs).is_some_and(|t| t.is_positive())
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = int(1);
    v
}

/// Adds `sum_blocks sign * sum_i s_i g_i = rhs`, variables laid out block
/// after block, with `extra` trailing variables left out of the equations.
fn add_equations(lp: &mut Lp, blocks: &[(&Vec<Vec<Rational>>, i64)], rhs: &[Rational], extra: usize) {
    let k: usize = blocks.iter().map(|(g, _)| g.len()).sum();
    for (j, r) in rhs.iter().enumerate() {
        let mut row = Vec::with_capacity(k + extra);
        for (gens, sign) in blocks {
            row.extend(gens.iter().map(|g| &g[j] * int(*sign)));
        }
        row.extend(std::iter::repeat_n(Rational::zero(), extra));
        lp.add(row, Cmp::Eq, r.clone());
    }
}

fn box_depth(blocks: &[(&Vec<Vec<Rational>>, i64)], rhs: &[Rational]) -> Option<Rational> {
    let k: usize = blocks.iter().map(|(g, _)| g.len()).sum();
    let tau = k;
    let mut lp = Lp::new(k + 1);
    add_equations(&mut lp, blocks, rhs, 1);
    for i in 0..k {
        let mut lower = unit(k + 1, i);
        lower[tau] = int(-1);
        lp.add(lower, Cmp::Ge, int(0));
        let mut upper = unit(k + 1, i);
        upper[tau] = int(1);
        lp.add(upper, Cmp::Le, int(1));
    }
    lp.add(unit(k + 1, tau), Cmp::Le, frac(1, 2));
    lp.objective = unit(k + 1, tau);
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Some(value),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("tau is bounded"),
    }
}

/// A cell of a decomposition: the zonotope `Q_{S,d}` of a type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub label: SheafType,
    /// The edges of `S`, matching the generators.
    pub edges: Vec<usize>,
    pub zonotope: Zonotope,
    pub dim: usize,
}

/// `Q_{S,d}`: the classes of `d + sum_{e in S} p_e` with `p_e` on `e`.
///
/// The base point is the class of `d + sum_{e in S} tail(e)`, so a point of
/// `e` at distance `s * l(e)` from its tail has parameter `s`.
pub fn cell_zonotope(g: &MetricGraph, lattice: &LatticeData, basepoint: usize, t: &SheafType) -> Cell {
    let forest = lattice.forest();
    let mut xi = Chain::zero(g.num_edges());
    for (v, &m) in t.d.0.iter().enumerate() {
        if m != 0 {
            xi.add_assign_scaled(&forest.path(g, basepoint, v), &int(m));
        }
    }
    let edges = t.s.indices();
    for &e in &edges {
        xi.add_assign_scaled(&forest.path(g, basepoint, g.edge(e).tail), &int(1));
    }
    let zonotope = Zonotope {
        base: lattice.coords(g, &xi),
        generators: edges.iter().map(|&e| lattice.edge_vector(g, e)).collect(),
    };
    Cell {
        label: t.clone(),
        dim: zonotope.dim(),
        edges,
        zonotope,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{Divisor, EdgeSet};

    fn z(base: &[i64], gens: &[&[i64]]) -> Zonotope {
        Zonotope {
            base: base.iter().map(|&x| int(x)).collect(),
            generators: gens.iter().map(|g| g.iter().map(|&x| int(x)).collect()).collect(),
        }
    }

    #[test]
    fn cells_of_two_vertex_loop() {
        let g = fixtures::two_vertex_loop();
        let l = LatticeData::new(&g).unwrap();
        let full = SheafType::new(g.all_edges(), Divisor(vec![0, 0]));
        let c = cell_zonotope(&g, &l, 0, &full);
        assert_eq!(c.zonotope.base, vec![int(0)]);
        assert_eq!(c.zonotope.generators, vec![vec![int(-1)], vec![int(1)]]);
        assert_eq!(c.dim, 1);
        assert_eq!(c.zonotope.bounding_box(), (vec![int(-1)], vec![int(1)]));

        let point = cell_zonotope(&g, &l, 0, &SheafType::line_bundle(Divisor(vec![1, 1])));
        assert_eq!(point.dim, 0);
        assert!(l.congruent(&point.zonotope.base, &[int(1)]));

        let one = SheafType::new(EdgeSet::singleton(0), Divisor(vec![1, 1]));
        let c = cell_zonotope(&g, &l, 0, &one);
        assert_eq!(c.zonotope.bounding_box(), (vec![int(-2)], vec![int(-1)]));
    }

    #[test]
    fn square_faces() {
        let sq = z(&[0, 0], &[&[1, 0], &[0, 1]]);
        assert_eq!(sq.facets().len(), 4);
        let faces = sq.faces();
        assert_eq!(faces.len(), 8);
        assert_eq!(faces.iter().filter(|f| f.dim() == 0).count(), 4);
        assert_eq!(sq.volume(), int(1));
    }

    #[test]
    fn hexagon_faces() {
        let hex = z(&[0, 0], &[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(hex.facets().len(), 6);
        assert_eq!(hex.faces().len(), 12);
        assert_eq!(hex.volume(), int(3));
        assert_eq!(hex.corners().len(), 6 + 1);
    }

    #[test]
    fn degenerate_segments() {
        let seg = z(&[0], &[&[-1], &[1]]);
        assert_eq!(seg.dim(), 1);
        let f = seg.facets();
        assert_eq!(f.len(), 2);
        assert_eq!(seg.exact_key(), z(&[-1], &[&[2]]).exact_key());
        assert!(seg.in_relative_interior(&[int(0)]));
        assert!(seg.contains(&[int(1)]));
        assert!(!seg.in_relative_interior(&[int(1)]));
        assert!(!seg.contains(&[int(2)]));
    }

    #[test]
    fn interiors_meeting() {
        let a = z(&[0, 0], &[&[1, 0], &[0, 1]]);
        let b = z(&[1, 0], &[&[1, 0], &[0, 1]]);
        assert!(!relative_interiors_meet(&a, &b));
        let c = z(&[0, 0], &[&[1, 1]]);
        assert!(relative_interiors_meet(&a, &c));
        let p = Zonotope::point(vec![frac(1, 2), frac(1, 2)]);
        assert!(relative_interiors_meet(&a, &p));
        assert!(!relative_interiors_meet(&b, &p));
    }
}
