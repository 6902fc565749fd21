mod common;

use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

use namikawa::fixtures;
use namikawa::graph::{Divisor, EdgeSet, Location, MetricGraph, TropicalDivisor};
use namikawa::io::{decomposition_from_json, decomposition_to_json};
use namikawa::jacobian::{namikawa_decomposition, Kind, LatticeData};
use namikawa::linalg;
use namikawa::rational::{frac, int, Rational};
use namikawa::reduce::{is_equivalent, reduce_divisor, tent_divisor};
use namikawa::stability::{Polarization, SheafType};
use namikawa::verify;

use common::{graph_and_polarization, rng};

fn l2() -> (MetricGraph, Polarization) {
    (
        fixtures::two_vertex_loop(),
        Polarization::new(Divisor(vec![2, 2])).unwrap(),
    )
}

#[test]
fn two_vertex_loop_degree_three_locates_break_divisors() {
    let (g, h) = l2();
    let d = namikawa_decomposition(&g, &h, 3, 0, Kind::Polystable).unwrap();
    assert_eq!(d.cells.len(), 4);
    assert!(d.report.passed());
    let on_v2 = TropicalDivisor::from_divisor(&Divisor(vec![0, 3]));
    let loc = d.locate_divisor(&on_v2).unwrap();
    assert_eq!(loc.label, SheafType::line_bundle(Divisor(vec![2, 1])));
    assert!(is_equivalent(&g, &loc.witness, &on_v2).unwrap());
}

#[test]
fn two_vertex_loop_degree_two_family_cell() {
    let (g, h) = l2();
    let d = namikawa_decomposition(&g, &h, 2, 0, Kind::Polystable).unwrap();
    let family = SheafType::new(EdgeSet::from_indices([0, 1]), Divisor(vec![0, 0]));
    let i = d.cell_index(&family).unwrap();
    // Both generators are parallel: a segment, not a square.
    assert_eq!(d.cells[i].dim, 1);
    assert_eq!(d.cells[i].zonotope.volume(), int(2));
    assert_eq!(d.report.covolume, int(2));
}

fn random_point<R: Rng>(rng: &mut R, g: &MetricGraph) -> Location {
    if rng.gen_bool(0.5) {
        return Location::Vertex(rng.gen_range(0..g.num_vertices()));
    }
    let edge = rng.gen_range(0..g.num_edges());
    let q = rng.gen_range(2..=5i64);
    Location::EdgePoint {
        edge,
        offset: &g.edge(edge).length * frac(rng.gen_range(1..q), q),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Abel–Jacobi classes against the chip-firing oracle: principal tents
    /// map to lattice vectors, and equivalence agrees with congruence.
    #[test]
    fn abel_jacobi_matches_chip_firing((seed, g, _) in graph_and_polarization()) {
        let mut r = rng(seed);
        let l = LatticeData::new(&g).unwrap();
        let degree = r.gen_range(-1..=3i64);
        let d1 = fixtures::random_divisor(&mut r, &g, degree);
        let aj = |d: &TropicalDivisor| l.abel_jacobi(&g, 0, d).unwrap();

        let e = r.gen_range(0..g.num_edges());
        let len = g.edge(e).length.clone();
        let tent = tent_divisor(&g, e, &(&len * frac(1, 4)), &(&len * frac(3, 4)), r.gen_range(1..=2)).unwrap();
        prop_assert!(l.is_lattice_vector(&aj(&tent)));
        prop_assert!(l.congruent(&aj(&d1), &aj(&d1.plus(&g, &tent).unwrap())));

        let reduced = reduce_divisor(&g, &d1, &random_point(&mut r, &g)).unwrap();
        prop_assert!(l.congruent(&aj(&d1), &aj(&reduced)));

        let d2 = fixtures::random_divisor(&mut r, &g, degree);
        prop_assert_eq!(is_equivalent(&g, &d1, &d2).unwrap(), l.congruent(&aj(&d1), &aj(&d2)));
    }

    #[test]
    fn abel_jacobi_is_path_independent((seed, g, _) in graph_and_polarization()) {
        let c = verify::abel_jacobi_paths(&g, g.genus(), 0, 8, seed).unwrap();
        prop_assert!(c.passed(), "{:?}", c.failures);
    }

    /// Volume identity, JSON round trip and degree-g agreement of both
    /// decompositions.
    #[test]
    fn degree_g_decompositions((_, g, h) in graph_and_polarization()) {
        let ps = namikawa_decomposition(&g, &h, g.genus(), 0, Kind::Polystable).unwrap();
        let det = linalg::det(&ps.lattice.gram);
        let volume = ps.maximal_cells().map(|(_, c)| c.zonotope.volume()).fold(Rational::zero(), |a, v| a + v);
        prop_assert_eq!(volume, det);
        prop_assert_eq!(num_bigint::BigInt::from(ps.maximal_cells().count()), g.spanning_tree_count());
        for v in 0..g.num_vertices() {
            let qs = namikawa_decomposition(&g, &h, g.genus(), 0, Kind::Quasistable(v)).unwrap();
            prop_assert_eq!(&qs.cells, &ps.cells);
        }
        let back = decomposition_from_json(&decomposition_to_json(&ps)).unwrap();
        prop_assert_eq!(back, ps);
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let g = fixtures::dumbbell();
    let h = Polarization::new(Divisor(vec![1, 2])).unwrap();
    let build = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let d = namikawa_decomposition(&g, &h, 1, 0, Kind::Quasistable(1)).unwrap();
                decomposition_to_json(&d).to_string()
            })
    };
    assert_eq!(build(1), build(4));
}
