//! Stability of sheaf types `(S, d)` with respect to a polarization.
//!
//! A type records the nodes `S` where a rank-one torsion-free sheaf fails to
//! be locally free and the multidegree `d` of its pullback to the partial
//! normalization. Every predicate here reduces to the basic inequality
//!
//! ```text
//! sum_{v in W} d_v  <=  g(W^nu_S) - 1 + (H_W / deg H)(deg F + 1 - g) + #(boundary of W outside S)
//! ```
//!
//! over the nonempty proper vertex subsets `W`.

pub mod oda_seshadri;

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Divisor, EdgeSet, MetricGraph, Subcurve, VertexSet};
use crate::rational::{self, int, Rational};

pub use oda_seshadri::{
    epsilon_for_quasistability, os_is_semistable, os_is_stable, os_parameter, os_parameter_v, OsParameter,
};

/// The combinatorial type `(S, d)` of a rank-one torsion-free sheaf.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SheafType {
    pub s: EdgeSet,
    pub d: Divisor,
}

impl SheafType {
    pub fn new(s: EdgeSet, d: Divisor) -> Self {
        SheafType { s, d }
    }

    pub fn line_bundle(d: Divisor) -> Self {
        SheafType { s: EdgeSet::EMPTY, d }
    }

    /// `deg F = deg d + |S|`.
    pub fn degree(&self) -> i64 {
        self.d.degree() + self.s.len() as i64
    }

    /// `(S, d + k v)`.
    pub fn twist(&self, v: usize, k: i64) -> SheafType {
        let mut d = self.d.clone();
        d[v] += k;
        SheafType { s: self.s, d }
    }

    pub fn check(&self, g: &MetricGraph) -> Result<()> {
        if self.d.len() != g.num_vertices() {
            return Err(Error::Domain(format!(
                "multidegree has {} entries for {} vertices",
                self.d.len(),
                g.num_vertices()
            )));
        }
        if !self.s.is_subset(&g.all_edges()) {
            return Err(Error::Domain("S contains unknown edges".into()));
        }
        Ok(())
    }
}

impl PartialOrd for SheafType {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: `|S|`, then the sorted edge indices of `S`, then `d`.
impl Ord for SheafType {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.s.cmp(&other.s).then_with(|| self.d.cmp(&other.d))
    }
}

/// A strictly positive vertex divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polarization(Divisor);

impl Polarization {
    pub fn new(multidegree: Divisor) -> Result<Self> {
        if multidegree.0.iter().any(|&h| h <= 0) {
            return Err(Error::Domain(
                "a polarization must be strictly positive at every vertex".into(),
            ));
        }
        Ok(Polarization(multidegree))
    }

    /// The polarization with value 1 everywhere.
    pub fn uniform(num_vertices: usize) -> Self {
        Polarization(Divisor(vec![1; num_vertices]))
    }

    pub fn multidegree(&self) -> &Divisor {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.degree()
    }

    pub fn on(&self, w: &VertexSet) -> i64 {
        self.0.sum_over(w)
    }

    /// Restriction to the vertices `old` (in that order).
    pub fn restrict(&self, old: &[usize]) -> Polarization {
        Polarization(Divisor(old.iter().map(|&v| self.0[v]).collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub semistable: bool,
    pub stable: bool,
    pub polystable: bool,
    pub quasistable_for: Vec<usize>,
    pub equality_subcurves: Vec<Subcurve>,
}

/// `m(F) = (deg F + 1 - g) / deg H`.
pub fn slope(g: &MetricGraph, h: &Polarization, t: &SheafType) -> Rational {
    Rational::new((t.degree() + 1 - g.genus()).into(), h.degree().into())
}

/// Degree of the maximal subsheaf supported on the subcurve `W`:
/// `sum_W d_v + |S cap E(W)| - #(boundary of W outside S)`.
pub fn subsheaf_degree(g: &MetricGraph, t: &SheafType, w: &Subcurve) -> i64 {
    let c = g.boundary_counts(w, &t.s);
    t.d.sum_over(w) + c.s_internal as i64 - c.not_in_s as i64
}

/// Right-hand side of the basic inequality for `W`.
pub fn basic_rhs(g: &MetricGraph, h: &Polarization, t: &SheafType, w: &Subcurve) -> Result<Rational> {
    let c = g.boundary_counts(w, &t.s);
    let ng = g.normalized_genus(w, &t.s)?;
    let weight = Rational::new(h.on(w).into(), h.degree().into());
    Ok(int(ng - 1 + c.not_in_s as i64) + weight * int(t.degree() + 1 - g.genus()))
}

/// `basic_rhs(W) - sum_W d_v`; nonnegative everywhere iff semistable.
pub fn slack(g: &MetricGraph, h: &Polarization, t: &SheafType, w: &Subcurve) -> Rational {
    basic_rhs(g, h, t, w).expect("subcurves are nonempty") - int(t.d.sum_over(w))
}

/// `(semistable, equality subcurves)`.
fn scan(g: &MetricGraph, h: &Polarization, t: &SheafType) -> (bool, Vec<Subcurve>) {
    let mut ties = Vec::new();
    for w in g.subcurves() {
        let s = slack(g, h, t, &w);
        if s < Rational::zero() {
            return (false, Vec::new());
        }
        if s.is_zero() {
            ties.push(w);
        }
    }
    (true, ties)
}

pub fn is_semistable(g: &MetricGraph, h: &Polarization, t: &SheafType) -> bool {
    scan(g, h, t).0
}

pub fn is_stable(g: &MetricGraph, h: &Polarization, t: &SheafType) -> bool {
    let (ss, ties) = scan(g, h, t);
    ss && ties.is_empty()
}

/// Equality subcurves of a semistable type (empty when not semistable).
pub fn equality_subcurves(g: &MetricGraph, h: &Polarization, t: &SheafType) -> Vec<Subcurve> {
    scan(g, h, t).1
}

/// Semistable, and the line bundle part on every connected component of
/// `G - S` is stable there.
pub fn is_polystable(g: &MetricGraph, h: &Polarization, t: &SheafType) -> bool {
    is_semistable(g, h, t) && components_stable(g, h, t)
}

fn components_stable(g: &MetricGraph, h: &Polarization, t: &SheafType) -> bool {
    g.components_without(&t.s).iter().all(|c| {
        let (sub, old) = g.induced(c, &t.s);
        let d = Divisor(old.iter().map(|&v| t.d[v]).collect());
        is_stable(&sub, &h.restrict(&old), &SheafType::line_bundle(d))
    })
}

pub fn is_quasistable(g: &MetricGraph, h: &Polarization, t: &SheafType, v: usize) -> Result<bool> {
    if v >= g.num_vertices() {
        return Err(Error::UnknownVertex(format!("#{v}")));
    }
    let (ss, ties) = scan(g, h, t);
    Ok(ss && ties.iter().all(|w| !w.contains(v)))
}

pub fn classify(g: &MetricGraph, h: &Polarization, t: &SheafType) -> StabilityReport {
    let (semistable, equality_subcurves) = scan(g, h, t);
    let stable = semistable && equality_subcurves.is_empty();
    let polystable = semistable && (stable || components_stable(g, h, t));
    let quasistable_for = if semistable {
        (0..g.num_vertices())
            .filter(|&v| equality_subcurves.iter().all(|w| !w.contains(v)))
            .collect()
    } else {
        Vec::new()
    };
    StabilityReport {
        semistable,
        stable,
        polystable,
        quasistable_for,
        equality_subcurves,
    }
}

/// Equality subcurves whose boundary is not contained in `S`, reduced to the
/// inclusion-minimal ones, in lexicographic vertex order.
fn peelable(g: &MetricGraph, h: &Polarization, t: &SheafType) -> Vec<Subcurve> {
    let ties: Vec<Subcurve> = equality_subcurves(g, h, t)
        .into_iter()
        .filter(|w| !g.boundary_edges(w).is_subset(&t.s))
        .collect();
    let mut minimal: Vec<Subcurve> = ties
        .iter()
        .filter(|w| !ties.iter().any(|u| u != *w && u.is_subset(w)))
        .copied()
        .collect();
    minimal.sort_by_key(|w| w.indices());
    minimal
}

fn peel(g: &MetricGraph, t: &SheafType, w: &Subcurve) -> SheafType {
    let mut next = t.clone();
    for (i, e) in g.edges().iter().enumerate() {
        if t.s.contains(i) || w.contains(e.tail) == w.contains(e.head) {
            continue;
        }
        let inside = if w.contains(e.tail) { e.tail } else { e.head };
        next.d[inside] -= 1;
        next.s.insert(i);
    }
    next
}

fn grade_by(
    g: &MetricGraph,
    h: &Polarization,
    t: &SheafType,
    mut choose: impl FnMut(&[Subcurve]) -> Subcurve,
) -> Result<SheafType> {
    t.check(g)?;
    if !is_semistable(g, h, t) {
        return Err(Error::NotSemistable(t.clone()));
    }
    let mut cur = t.clone();
    while !is_polystable(g, h, &cur) {
        let candidates = peelable(g, h, &cur);
        if candidates.is_empty() {
            return Err(Error::Check(format!(
                "semistable type {cur:?} is not polystable yet has no peelable subcurve"
            )));
        }
        let w = choose(&candidates);
        cur = peel(g, &cur, &w);
    }
    Ok(cur)
}

/// The polystable type of the Jordan–Hölder grading, by peeling minimal
/// equality subcurves (lexicographically first).
pub fn grade(g: &MetricGraph, h: &Polarization, t: &SheafType) -> Result<SheafType> {
    grade_by(g, h, t, |c| c[0])
}

/// [`grade`] with the peeled subcurve chosen at random among the admissible
/// ones; the result must not depend on the choices.
pub fn grade_with<R: Rng>(g: &MetricGraph, h: &Polarization, t: &SheafType, rng: &mut R) -> Result<SheafType> {
    grade_by(g, h, t, |c| *c.choose(rng).expect("nonempty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Semistable,
    Stable,
    Polystable,
    Quasistable(usize),
}

impl Mode {
    pub fn admits(&self, g: &MetricGraph, h: &Polarization, t: &SheafType) -> bool {
        let r = classify(g, h, t);
        match self {
            Mode::Semistable => r.semistable,
            Mode::Stable => r.stable,
            Mode::Polystable => r.polystable,
            Mode::Quasistable(v) => r.quasistable_for.contains(v),
        }
    }
}

/// Size limits for the exhaustive enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_types: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: 16,
            max_types: 1_000_000,
        }
    }
}

impl Limits {
    pub fn unbounded() -> Self {
        Limits {
            max_vertices: 64,
            max_types: u64::MAX,
        }
    }

    pub fn check_graph(&self, g: &MetricGraph) -> Result<()> {
        if g.num_vertices() > self.max_vertices {
            return Err(Error::Cap(format!(
                "{} vertices exceed the limit of {}",
                g.num_vertices(),
                self.max_vertices
            )));
        }
        Ok(())
    }
}

/// Per-vertex bounds `lo_v <= d_v <= hi_v` satisfied by every semistable
/// type with node set `s` and total degree `degree`, from the singleton and
/// co-singleton basic inequalities.
pub fn multidegree_box(g: &MetricGraph, h: &Polarization, s: &EdgeSet, degree: i64) -> Vec<(i64, i64)> {
    let n = g.num_vertices();
    let deg_d = degree - s.len() as i64;
    if n == 1 {
        return vec![(deg_d, deg_d)];
    }
    // basic_rhs only depends on S and the total degree, not on d.
    let probe = SheafType::new(*s, Divisor::point(n, 0, deg_d));
    let all = g.all_vertices();
    (0..n)
        .map(|v| {
            let single = VertexSet::singleton(v);
            let hi = rational::floor_i64(&basic_rhs(g, h, &probe, &single).expect("nonempty"));
            let rest = all.difference(&single);
            let lo = deg_d - rational::floor_i64(&basic_rhs(g, h, &probe, &rest).expect("nonempty"));
            (lo, hi)
        })
        .collect()
}

/// Every multidegree in the box with the given total, lexicographically.
pub fn box_divisors(bounds: &[(i64, i64)], total: i64) -> Vec<Divisor> {
    let n = bounds.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    // suffix sums of bounds prune infeasible partial assignments
    let mut min_suffix = vec![0i64; n + 1];
    let mut max_suffix = vec![0i64; n + 1];
    for i in (0..n).rev() {
        min_suffix[i] = min_suffix[i + 1] + bounds[i].0;
        max_suffix[i] = max_suffix[i + 1] + bounds[i].1;
    }
    let mut cur = vec![0i64; n];
    fn rec(
        i: usize,
        remaining: i64,
        bounds: &[(i64, i64)],
        min_suffix: &[i64],
        max_suffix: &[i64],
        cur: &mut Vec<i64>,
        out: &mut Vec<Divisor>,
    ) {
        let n = bounds.len();
        if i == n {
            if remaining == 0 {
                out.push(Divisor(cur.clone()));
            }
            return;
        }
        let lo = bounds[i].0.max(remaining - max_suffix[i + 1]);
        let hi = bounds[i].1.min(remaining - min_suffix[i + 1]);
        for x in lo..=hi {
            cur[i] = x;
            rec(i + 1, remaining - x, bounds, min_suffix, max_suffix, cur, out);
        }
    }
    rec(0, total, bounds, &min_suffix, &max_suffix, &mut cur, &mut out);
    out
}

/// All edge subsets of the graph, smallest first.
pub fn all_node_sets(g: &MetricGraph) -> Vec<EdgeSet> {
    let m = g.num_edges();
    let mut sets: Vec<EdgeSet> = (0..(1u64 << m)).map(EdgeSet).collect();
    sets.sort();
    sets
}

/// All types of total degree `degree` satisfying `mode`, duplicate-free and
/// in canonical order.
pub fn enumerate_types(g: &MetricGraph, h: &Polarization, degree: i64, mode: Mode) -> Result<Vec<SheafType>> {
    enumerate_types_with(g, h, degree, mode, &Limits::default())
}

pub fn enumerate_types_with(
    g: &MetricGraph,
    h: &Polarization,
    degree: i64,
    mode: Mode,
    limits: &Limits,
) -> Result<Vec<SheafType>> {
    limits.check_graph(g)?;
    if let Mode::Quasistable(v) = mode {
        if v >= g.num_vertices() {
            return Err(Error::UnknownVertex(format!("#{v}")));
        }
    }
    if g.num_edges() > 20 {
        return Err(Error::Cap(format!(
            "{} edges give too many node sets to scan",
            g.num_edges()
        )));
    }
    let sets = all_node_sets(g);
    let boxes: Vec<(EdgeSet, Vec<(i64, i64)>)> = sets
        .par_iter()
        .map(|s| (*s, multidegree_box(g, h, s, degree)))
        .collect();
    let candidates: u64 = boxes
        .iter()
        .map(|(_, b)| {
            b.iter()
                .map(|(lo, hi)| (hi - lo + 1).max(0) as u64)
                .fold(1u64, |a, x| a.saturating_mul(x))
        })
        .fold(0u64, |a, x| a.saturating_add(x));
    if candidates > limits.max_types {
        return Err(Error::Cap(format!(
            "{candidates} candidate types exceed the limit of {}",
            limits.max_types
        )));
    }
    let found: Vec<Vec<SheafType>> = boxes
        .par_iter()
        .map(|(s, b)| {
            box_divisors(b, degree - s.len() as i64)
                .into_iter()
                .map(|d| SheafType::new(*s, d))
                .filter(|t| mode.admits(g, h, t))
                .collect()
        })
        .collect();
    let set: BTreeSet<SheafType> = found.into_iter().flatten().collect();
    Ok(set.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::frac;
    use rand::SeedableRng;

    fn l2() -> (MetricGraph, Polarization) {
        (
            fixtures::two_vertex_loop(),
            Polarization::new(Divisor(vec![2, 2])).unwrap(),
        )
    }

    fn ty(s: &[usize], d: &[i64]) -> SheafType {
        SheafType::new(EdgeSet::from_indices(s.iter().copied()), Divisor(d.to_vec()))
    }

    #[test]
    fn slope_examples() {
        let (g, h) = l2();
        assert_eq!(slope(&g, &h, &ty(&[], &[0, 2])), int(0));
        assert_eq!(slope(&g, &h, &ty(&[0, 1], &[0, 0])), int(0));
        assert_eq!(slope(&g, &h, &ty(&[], &[0, 3])), frac(1, 4));
    }

    #[test]
    fn subsheaf_degree_examples() {
        let (g, _) = l2();
        let w = VertexSet::singleton(1);
        assert_eq!(subsheaf_degree(&g, &ty(&[], &[0, 2]), &w), 0);
        assert_eq!(subsheaf_degree(&g, &ty(&[0, 1], &[0, 0]), &w), 0);
    }

    #[test]
    fn basic_rhs_examples() {
        let (g, h) = l2();
        let t = ty(&[], &[0, 2]);
        assert_eq!(basic_rhs(&g, &h, &t, &VertexSet::singleton(1)).unwrap(), int(2));
        assert_eq!(basic_rhs(&g, &h, &t, &VertexSet::singleton(0)).unwrap(), int(2));
    }

    #[test]
    fn predicate_examples() {
        let (g, h) = l2();
        let t = ty(&[], &[0, 2]);
        assert!(is_semistable(&g, &h, &t));
        assert!(!is_stable(&g, &h, &t));
        assert!(!is_polystable(&g, &h, &t));
        assert!(is_quasistable(&g, &h, &t, 0).unwrap());
        assert!(!is_quasistable(&g, &h, &t, 1).unwrap());
        assert!(is_quasistable(&g, &h, &t, 2).is_err());
        assert!(is_stable(&g, &h, &ty(&[], &[1, 1])));
        assert!(!is_semistable(&g, &h, &ty(&[], &[3, -1])));
        assert!(is_polystable(&g, &h, &ty(&[0, 1], &[0, 0])));
        assert!(!is_polystable(&g, &h, &ty(&[0], &[0, 1])));
    }

    #[test]
    fn classify_reports_quasistable_split() {
        let (g, h) = l2();
        let r = classify(&g, &h, &ty(&[], &[0, 2]));
        assert!(r.semistable && !r.stable && !r.polystable);
        assert_eq!(r.quasistable_for, vec![0]);
        assert_eq!(r.equality_subcurves, vec![VertexSet::singleton(1)]);
    }

    #[test]
    fn grade_examples() {
        let (g, h) = l2();
        assert_eq!(grade(&g, &h, &ty(&[], &[0, 2])).unwrap(), ty(&[0, 1], &[0, 0]));
        assert_eq!(grade(&g, &h, &ty(&[], &[2, 0])).unwrap(), ty(&[0, 1], &[0, 0]));
        assert_eq!(grade(&g, &h, &ty(&[], &[1, 1])).unwrap(), ty(&[], &[1, 1]));
        assert!(matches!(
            grade(&g, &h, &ty(&[], &[3, -1])),
            Err(Error::NotSemistable(_))
        ));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        assert_eq!(
            grade_with(&g, &h, &ty(&[], &[0, 2]), &mut rng).unwrap(),
            ty(&[0, 1], &[0, 0])
        );
    }

    #[test]
    fn enumerate_examples() {
        let (g, h) = l2();
        let ps = enumerate_types(&g, &h, 2, Mode::Polystable).unwrap();
        assert_eq!(ps, vec![ty(&[], &[1, 1]), ty(&[0, 1], &[0, 0])]);
        let ss = enumerate_types(&g, &h, 3, Mode::Semistable).unwrap();
        let st = enumerate_types(&g, &h, 3, Mode::Stable).unwrap();
        assert_eq!(ss, st);
        assert_eq!(
            ss,
            vec![ty(&[], &[1, 2]), ty(&[], &[2, 1]), ty(&[0], &[1, 1]), ty(&[1], &[1, 1])]
        );
    }

    #[test]
    fn box_enumeration() {
        let ds = box_divisors(&[(0, 2), (0, 2)], 2);
        assert_eq!(ds.len(), 3);
        assert!(box_divisors(&[(0, 0), (0, 0)], 1).is_empty());
    }

    #[test]
    fn twist_round_trip() {
        let t = ty(&[0], &[1, 1]);
        assert_eq!(t.twist(0, 0), t);
        assert_eq!(t.twist(1, 4).twist(1, -4), t);
        assert_eq!(t.twist(0, -1).degree(), 2);
    }

    #[test]
    fn polarization_must_be_positive() {
        assert!(Polarization::new(Divisor(vec![0, 2])).is_err());
    }
}
