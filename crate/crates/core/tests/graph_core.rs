mod common;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use namikawa::breakdiv::spanning_trees;
use namikawa::fixtures;
use namikawa::graph::{Chain, Divisor, EdgeSet, MetricGraph, VertexSet};
use namikawa::jacobian::LatticeData;
use namikawa::linalg;
use namikawa::rational::{frac, int, Rational};

use common::graph_and_polarization;

#[test]
fn fixture_invariants() {
    let l2 = fixtures::two_vertex_loop();
    assert_eq!((l2.genus(), l2.betti_number()), (3, 1));
    let t = fixtures::triangle();
    assert_eq!((t.genus(), t.betti_number()), (1, 1));
    let d = fixtures::dumbbell();
    assert_eq!(d.betti_number(), 2);
}

#[test]
fn two_vertex_loop_gram_is_the_cycle_length() {
    let g = fixtures::two_vertex_loop();
    let l = LatticeData::new(&g).unwrap();
    assert_eq!(l.gram, vec![vec![int(2)]]);
    assert_eq!(l.covolume(), int(2));
}

#[test]
fn loops_and_normalization() {
    let g = MetricGraph::builder()
        .vertex("a", 1)
        .vertex("b", 0)
        .edge("l", "a", "a", frac(1, 2))
        .edge("e", "a", "b", int(1))
        .build()
        .unwrap();
    let a = VertexSet::singleton(0);
    assert_eq!(g.arithmetic_genus(&a).unwrap(), 2);
    assert_eq!(g.normalized_genus(&a, &EdgeSet::singleton(0)).unwrap(), 1);
    let c = g.boundary_counts(&a, &EdgeSet::singleton(0));
    assert_eq!((c.total, c.in_s, c.not_in_s, c.s_internal), (1, 0, 1, 1));
}

/// Leading principal minors, an oracle for positive definiteness
/// independent of the determinant alone.
fn leading_minors_positive(m: &[Vec<Rational>]) -> bool {
    (1..=m.len()).all(|k| {
        let sub: Vec<Vec<Rational>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
        linalg::det(&sub) > Rational::zero()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn genus_is_additive_over_cuts((_, g, _) in graph_and_polarization()) {
        let all = g.all_vertices();
        let total = g.arithmetic_genus(&all).unwrap();
        prop_assert_eq!(total, g.genus());
        for w in g.subcurves() {
            let rest = all.difference(&w);
            let cut = g.boundary_counts(&w, &EdgeSet::EMPTY).total as i64;
            prop_assert_eq!(
                g.arithmetic_genus(&w).unwrap() + g.arithmetic_genus(&rest).unwrap() + cut - 1,
                total
            );
        }
    }

    #[test]
    fn cycle_basis_is_closed_and_gram_positive((_, g, _) in graph_and_polarization()) {
        let l = LatticeData::new(&g).unwrap();
        prop_assert_eq!(l.dim(), g.betti_number());
        for gamma in &l.basis {
            prop_assert!(g.boundary(gamma).iter().all(Zero::is_zero));
        }
        prop_assert!(leading_minors_positive(&l.gram));
        for (i, a) in l.basis.iter().enumerate() {
            for (j, b) in l.basis.iter().enumerate() {
                prop_assert_eq!(&l.gram[i][j], &g.edge_pairing(a, b));
            }
        }
    }

    #[test]
    fn tree_count_matches_enumeration((_, g, _) in graph_and_polarization()) {
        prop_assert_eq!(BigInt::from(spanning_trees(&g).len()), g.spanning_tree_count());
    }

    #[test]
    fn subdivision_adds_one_per_node((seed, g, _) in graph_and_polarization()) {
        let s = EdgeSet(seed % (1u64 << g.num_edges()));
        let d = Divisor((0..g.num_vertices() as i64).collect());
        let (sub, dhat) = g.subdivide_type(&s, &d);
        prop_assert_eq!(dhat.degree(), d.degree() + s.len() as i64);
        prop_assert_eq!(sub.num_vertices(), g.num_vertices() + s.len());
        prop_assert_eq!(sub.betti_number(), g.betti_number());
    }

    #[test]
    fn pairing_of_a_loop_with_itself_is_its_length((seed, g, _) in graph_and_polarization()) {
        let e = (seed as usize) % g.num_edges();
        let c = Chain::unit(g.num_edges(), e);
        prop_assert_eq!(g.edge_pairing(&c, &c), g.edge(e).length.clone());
    }
}
