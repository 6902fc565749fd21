mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use namikawa::breakdiv::{degree_g_equivalence, is_break_divisor_ineq, is_break_divisor_tree, spanning_trees};
use namikawa::fixtures;
use namikawa::graph::{Divisor, EdgeSet, MetricGraph};
use namikawa::rational::int;
use namikawa::stability::{box_divisors, Polarization};

use common::graph_and_polarization;

fn degree_g_multidegrees(g: &MetricGraph) -> Vec<Divisor> {
    let b: Vec<(i64, i64)> = (0..g.num_vertices())
        .map(|v| (g.weight(v) - 1, g.genus() + 1))
        .collect();
    box_divisors(&b, g.genus())
}

#[test]
fn two_vertex_loop() {
    let g = fixtures::two_vertex_loop();
    assert!(is_break_divisor_tree(&g, &Divisor(vec![2, 1])).unwrap().is_break);
    assert!(!is_break_divisor_tree(&g, &Divisor(vec![3, 0])).unwrap().is_break);
    assert!(is_break_divisor_ineq(&g, &EdgeSet::singleton(0), &Divisor(vec![1, 1])).unwrap());
    assert!(!is_break_divisor_ineq(&g, &EdgeSet::from_indices([0, 1]), &Divisor(vec![1, 0])).unwrap());
}

#[test]
fn wrong_degree_is_a_negative_answer_with_a_reason() {
    let g = fixtures::two_vertex_loop();
    let r = is_break_divisor_tree(&g, &Divisor(vec![1, 1])).unwrap();
    assert!(!r.is_break);
    assert!(r.reason.unwrap().contains("degree"));
    assert!(is_break_divisor_ineq(&g, &EdgeSet::EMPTY, &Divisor(vec![1, 1])).is_err());
}

#[test]
fn weightless_tree_has_only_zero() {
    let g = MetricGraph::builder()
        .vertex("a", 0)
        .vertex("b", 0)
        .vertex("c", 0)
        .edge("x", "a", "b", int(1))
        .edge("y", "b", "c", int(2))
        .build()
        .unwrap();
    let breaks: Vec<Divisor> = degree_g_multidegrees(&g)
        .into_iter()
        .filter(|d| is_break_divisor_tree(&g, d).unwrap().is_break)
        .collect();
    assert_eq!(breaks, vec![Divisor(vec![0, 0, 0])]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The tree and subcurve characterizations agree, and integral break
    /// divisors are as many as spanning trees.
    #[test]
    fn characterizations_agree_and_count_trees((_, g, _) in graph_and_polarization()) {
        let mut breaks = 0usize;
        for d in degree_g_multidegrees(&g) {
            let check = is_break_divisor_tree(&g, &d).unwrap();
            prop_assert_eq!(check.is_break, is_break_divisor_ineq(&g, &EdgeSet::EMPTY, &d).unwrap());
            if let Some(w) = check.witness {
                prop_assert!(spanning_trees(&g).contains(&w.tree));
                let mut rebuilt: Vec<i64> = (0..g.num_vertices()).map(|v| g.weight(v)).collect();
                for (e, v) in &w.assignment {
                    prop_assert!(!w.tree.contains(*e));
                    prop_assert!(g.edge(*e).tail == *v || g.edge(*e).head == *v);
                    rebuilt[*v] += 1;
                }
                prop_assert_eq!(Divisor(rebuilt), d);
                breaks += 1;
            }
        }
        prop_assert_eq!(BigInt::from(breaks), g.spanning_tree_count());
    }

    #[test]
    fn degree_g_polystability_is_polarization_free((seed, g, h) in graph_and_polarization()) {
        let base = degree_g_equivalence(&g, &h).unwrap();
        let mut rng = common::rng(seed);
        for _ in 0..5 {
            let other: Polarization = fixtures::random_polarization(&mut rng, g.num_vertices());
            prop_assert_eq!(&degree_g_equivalence(&g, &other).unwrap().types, &base.types);
        }
    }
}
