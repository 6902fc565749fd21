//! Break divisors, by spanning trees and by subcurve inequalities, and their
//! role in degree `g`.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Divisor, EdgeSet, MetricGraph, VertexSet};
use crate::jacobian::{cell_zonotope, LatticeData};
use crate::stability::{self, all_node_sets, box_divisors, enumerate_types, Mode, Polarization, SheafType};

/// `d = sum g_v v + sum_{e not in tree} phi(e)`, with `phi(e)` an endpoint of `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakWitness {
    pub tree: EdgeSet,
    /// `(edge, endpoint)` for every edge outside the tree.
    pub assignment: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakCheck {
    pub is_break: bool,
    pub witness: Option<BreakWitness>,
    /// Why the answer is no, when it is.
    pub reason: Option<String>,
}

impl BreakCheck {
    fn no(reason: impl Into<String>) -> Self {
        BreakCheck {
            is_break: false,
            witness: None,
            reason: Some(reason.into()),
        }
    }
}

/// Every spanning tree of a connected graph, as edge sets in lexicographic
/// order of their edge lists. Loops never belong to a tree.
pub fn spanning_trees(g: &MetricGraph) -> Vec<EdgeSet> {
    let n = g.num_vertices();
    let edges: Vec<usize> = (0..g.num_edges()).filter(|&e| !g.edge(e).is_loop()).collect();
    let mut out = Vec::new();
    if n == 0 || !g.is_connected() {
        return out;
    }
    fn rec(g: &MetricGraph, edges: &[usize], i: usize, chosen: &mut Vec<usize>, need: usize, out: &mut Vec<EdgeSet>) {
        if chosen.len() == need {
            let t = EdgeSet::from_indices(chosen.iter().copied());
            if g.validate_forest(&t).is_ok() {
                out.push(t);
            }
            return;
        }
        if edges.len() - i < need - chosen.len() {
            return;
        }
        // Skip edges closing a cycle early.
        let e = g.edge(edges[i]);
        let mut uf: Vec<usize> = (0..g.num_vertices()).collect();
        fn find(uf: &[usize], mut x: usize) -> usize {
            while uf[x] != x {
                x = uf[x];
            }
            x
        }
        for &c in chosen.iter() {
            let (a, b) = (find(&uf, g.edge(c).tail), find(&uf, g.edge(c).head));
            uf[a] = b;
        }
        if find(&uf, e.tail) != find(&uf, e.head) {
            chosen.push(edges[i]);
            rec(g, edges, i + 1, chosen, need, out);
            chosen.pop();
        }
        rec(g, edges, i + 1, chosen, need, out);
    }
    rec(g, &edges, 0, &mut Vec::new(), n - 1, &mut out);
    out
}

/// Tree characterization, searched exhaustively over spanning trees and
/// endpoint assignments.
pub fn is_break_divisor_tree(g: &MetricGraph, d: &Divisor) -> Result<BreakCheck> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if d.len() != g.num_vertices() {
        return Err(Error::Domain("divisor length differs from the vertex count".into()));
    }
    if d.degree() != g.genus() {
        return Ok(BreakCheck::no(format!(
            "degree {} differs from the genus {}",
            d.degree(),
            g.genus()
        )));
    }
    let residual: Vec<i64> = (0..g.num_vertices()).map(|v| d[v] - g.weight(v)).collect();
    if residual.iter().any(|&r| r < 0) {
        return Ok(BreakCheck::no("some vertex has fewer chips than its weight"));
    }
    for tree in spanning_trees(g) {
        let rest: Vec<usize> = (0..g.num_edges()).filter(|e| !tree.contains(*e)).collect();
        let mut left = residual.clone();
        let mut assignment = Vec::with_capacity(rest.len());
        if assign(g, &rest, &mut left, &mut assignment) {
            return Ok(BreakCheck {
                is_break: true,
                witness: Some(BreakWitness { tree, assignment }),
                reason: None,
            });
        }
    }
    Ok(BreakCheck::no(
        "no spanning tree and orientation of the remaining edges produce it",
    ))
}

fn assign(g: &MetricGraph, rest: &[usize], left: &mut [i64], out: &mut Vec<(usize, usize)>) -> bool {
    let Some((&e, tail)) = rest.split_first() else {
        return left.iter().all(|&r| r == 0);
    };
    let edge = g.edge(e);
    let ends = if edge.is_loop() {
        vec![edge.tail]
    } else {
        vec![edge.tail, edge.head]
    };
    for v in ends {
        if left[v] > 0 {
            left[v] -= 1;
            out.push((e, v));
            if assign(g, tail, left, out) {
                return true;
            }
            out.pop();
            left[v] += 1;
        }
    }
    false
}

/// Subcurve characterization of a break divisor on `G - S`: the genus of
/// the complement of every proper subcurve, normalized along `S`, is at most
/// its degree.
pub fn is_break_divisor_ineq(g: &MetricGraph, s: &EdgeSet, d: &Divisor) -> Result<bool> {
    if d.degree() + s.len() as i64 != g.genus() {
        return Err(Error::DegreeMismatch {
            expected: g.genus() - s.len() as i64,
            found: d.degree(),
        });
    }
    for w in g.subcurves() {
        let c = g.all_vertices().difference(&w);
        if g.normalized_genus(&c, s)? > d.sum_over(&c) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bounds on `d_v` implied by the inequalities for `{v}` and its complement.
fn break_box(g: &MetricGraph, s: &EdgeSet) -> Result<Vec<(i64, i64)>> {
    let n = g.num_vertices();
    let total = g.genus() - s.len() as i64;
    if n == 1 {
        return Ok(vec![(total, total)]);
    }
    let all = g.all_vertices();
    (0..n)
        .map(|v| {
            let single = VertexSet::singleton(v);
            let lo = g.normalized_genus(&single, s)?;
            let hi = total - g.normalized_genus(&all.difference(&single), s)?;
            Ok((lo, hi))
        })
        .collect()
}

/// All types `(S, d)` of degree `g` passing the subcurve inequalities.
pub fn break_types(g: &MetricGraph) -> Result<Vec<SheafType>> {
    let total = g.genus();
    let mut out: Vec<SheafType> = all_node_sets(g)
        .par_iter()
        .filter(|s| s.len() as i64 <= total)
        .map(|s| -> Result<Vec<SheafType>> {
            let mut found = Vec::new();
            for d in box_divisors(&break_box(g, s)?, total - s.len() as i64) {
                if is_break_divisor_ineq(g, s, &d)? {
                    found.push(SheafType::new(*s, d));
                }
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeGReport {
    pub types: Vec<SheafType>,
    pub maximal_cells: usize,
    pub spanning_trees: usize,
    pub matrix_tree_count: BigInt,
}

/// In degree `g`: polystable types are exactly the break types, the maximal
/// cells are as many as the spanning trees, and both tree counts agree.
pub fn degree_g_equivalence(g: &MetricGraph, h: &Polarization) -> Result<DegreeGReport> {
    let degree = g.genus();
    let polystable = enumerate_types(g, h, degree, Mode::Polystable)?;
    let breaks = break_types(g)?;
    if let Some(t) = polystable.iter().find(|t| breaks.binary_search(t).is_err()) {
        return Err(Error::Check(format!("polystable type {t:?} is not a break type")));
    }
    if let Some(t) = breaks.iter().find(|t| polystable.binary_search(t).is_err()) {
        return Err(Error::Check(format!(
            "break type {t:?} is not polystable (stable: {})",
            stability::is_stable(g, h, t)
        )));
    }
    let lattice = LatticeData::new(g)?;
    let maximal_cells = polystable
        .iter()
        .filter(|t| cell_zonotope(g, &lattice, 0, t).dim == lattice.dim())
        .count();
    let spanning_trees = spanning_trees(g).len();
    let matrix_tree_count = g.spanning_tree_count();
    if BigInt::from(spanning_trees) != matrix_tree_count {
        return Err(Error::Check(format!(
            "{spanning_trees} spanning trees enumerated, matrix-tree gives {matrix_tree_count}"
        )));
    }
    if maximal_cells != spanning_trees {
        return Err(Error::Check(format!(
            "{maximal_cells} maximal cells but {spanning_trees} spanning trees"
        )));
    }
    Ok(DegreeGReport {
        types: polystable,
        maximal_cells,
        spanning_trees,
        matrix_tree_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;

    #[test]
    fn two_vertex_loop_tree_version() {
        let g = fixtures::two_vertex_loop();
        let yes = is_break_divisor_tree(&g, &Divisor(vec![2, 1])).unwrap();
        assert!(yes.is_break);
        let w = yes.witness.unwrap();
        assert_eq!(w.tree, EdgeSet::singleton(0));
        assert_eq!(w.assignment, vec![(1, 0)]);
        assert!(!is_break_divisor_tree(&g, &Divisor(vec![3, 0])).unwrap().is_break);
        let wrong = is_break_divisor_tree(&g, &Divisor(vec![1, 1])).unwrap();
        assert!(!wrong.is_break && wrong.reason.is_some());
    }

    #[test]
    fn tree_graph() {
        let g = MetricGraph::builder()
            .vertex("a", 0)
            .vertex("b", 0)
            .edge("e", "a", "b", int(1))
            .build()
            .unwrap();
        assert!(is_break_divisor_tree(&g, &Divisor(vec![0, 0])).unwrap().is_break);
        let r = degree_g_equivalence(&g, &Polarization::uniform(2)).unwrap();
        assert_eq!(r.types, vec![SheafType::line_bundle(Divisor(vec![0, 0]))]);
    }

    #[test]
    fn two_vertex_loop_inequalities() {
        let g = fixtures::two_vertex_loop();
        assert!(is_break_divisor_ineq(&g, &EdgeSet::singleton(0), &Divisor(vec![1, 1])).unwrap());
        assert!(is_break_divisor_ineq(&g, &EdgeSet::EMPTY, &Divisor(vec![2, 1])).unwrap());
        assert!(!is_break_divisor_ineq(&g, &g.all_edges(), &Divisor(vec![1, 0])).unwrap());
    }

    #[test]
    fn degree_g_sets() {
        let g = fixtures::two_vertex_loop();
        let expected = vec![
            SheafType::new(EdgeSet::singleton(0), Divisor(vec![1, 1])),
            SheafType::new(EdgeSet::singleton(1), Divisor(vec![1, 1])),
            SheafType::line_bundle(Divisor(vec![1, 2])),
            SheafType::line_bundle(Divisor(vec![2, 1])),
        ];
        for h in [vec![2, 2], vec![1, 3]] {
            let r = degree_g_equivalence(&g, &Polarization::new(Divisor(h)).unwrap()).unwrap();
            let mut got = r.types.clone();
            got.sort();
            let mut want = expected.clone();
            want.sort();
            assert_eq!(got, want);
            assert_eq!(r.maximal_cells, 2);
            assert_eq!(r.spanning_trees, 2);
        }
    }

    #[test]
    fn spanning_tree_counts() {
        for (_, g, _) in fixtures::all() {
            assert_eq!(BigInt::from(spanning_trees(&g).len()), g.spanning_tree_count());
        }
    }
}
