//! Small graphs shared by tests, examples and the CLI, plus a seeded
//! generator of random connected metric graphs.

use rand::Rng;

use crate::graph::{Divisor, Location, MetricGraph, TropicalDivisor};
use crate::rational::{frac, int};
use crate::stability::Polarization;

/// Problem files shipped with the crate, by name.
pub const PROBLEMS: [(&str, &str); 3] = [
    ("two_vertex_loop", include_str!("../fixtures/two_vertex_loop.json")),
    ("triangle", include_str!("../fixtures/triangle.json")),
    ("dumbbell", include_str!("../fixtures/dumbbell.json")),
];

/// Two genus-one vertices joined by two unit edges; total genus 3.
pub fn two_vertex_loop() -> MetricGraph {
    MetricGraph::builder()
        .vertex("v1", 1)
        .vertex("v2", 1)
        .edge("e1", "v1", "v2", int(1))
        .edge("e2", "v1", "v2", int(1))
        .build()
        .expect("valid fixture")
}

/// A cycle of three rational curves with unit edges; total genus 1.
pub fn triangle() -> MetricGraph {
    MetricGraph::builder()
        .vertex("a", 0)
        .vertex("b", 0)
        .vertex("c", 0)
        .edge("ab", "a", "b", int(1))
        .edge("bc", "b", "c", int(1))
        .edge("ca", "c", "a", int(1))
        .build()
        .expect("valid fixture")
}

/// Two vertices carrying loops of lengths 1 and 2, joined by a unit bridge;
/// total genus 2.
pub fn dumbbell() -> MetricGraph {
    MetricGraph::builder()
        .vertex("l", 0)
        .vertex("r", 0)
        .edge("loop_l", "l", "l", int(1))
        .edge("bridge", "l", "r", int(1))
        .edge("loop_r", "r", "r", int(2))
        .build()
        .expect("valid fixture")
}

/// The three fixtures with the polarizations used throughout the tests.
pub fn all() -> Vec<(&'static str, MetricGraph, Polarization)> {
    let pol = |v: Vec<i64>| Polarization::new(Divisor(v)).expect("positive");
    vec![
        ("two_vertex_loop", two_vertex_loop(), pol(vec![2, 2])),
        ("triangle", triangle(), pol(vec![1, 1, 1])),
        ("dumbbell", dumbbell(), pol(vec![1, 2])),
    ]
}

/// A random connected graph with 2 to 4 vertices, at most
/// `min(6, |V| + 2)` edges (loops and parallel edges allowed), weights in
/// `{0, 1}` and lengths `p/q` with `q <= 7`.
pub fn random_graph<R: Rng>(rng: &mut R) -> MetricGraph {
    let n = rng.gen_range(2..=4usize);
    let max_edges = (n + 2).min(6);
    let m = rng.gen_range(n - 1..=max_edges);
    let mut b = MetricGraph::builder();
    for v in 0..n {
        b = b.vertex(&format!("v{v}"), rng.gen_range(0..=1));
    }
    let length = |rng: &mut R| {
        let q = rng.gen_range(1..=7i64);
        frac(rng.gen_range(1..=2 * q), q)
    };
    let mut k = 0;
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let l = length(rng);
        b = b.edge(&format!("e{k}"), &format!("v{u}"), &format!("v{v}"), l);
        k += 1;
    }
    while k < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let l = length(rng);
        b = b.edge(&format!("e{k}"), &format!("v{u}"), &format!("v{v}"), l);
        k += 1;
    }
    b.build().expect("generated graph is valid")
}

pub fn random_polarization<R: Rng>(rng: &mut R, n: usize) -> Polarization {
    Polarization::new(Divisor((0..n).map(|_| rng.gen_range(1..=3)).collect())).expect("positive entries")
}

/// A divisor of the given degree: a few points at random rational positions
/// with multiplicities in `-1..=2`, the balance put on a random vertex.
pub fn random_divisor<R: Rng>(rng: &mut R, g: &MetricGraph, degree: i64) -> TropicalDivisor {
    let mut points = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let m = rng.gen_range(-1..=2i64);
        if g.num_edges() == 0 || rng.gen_bool(0.3) {
            points.push((Location::Vertex(rng.gen_range(0..g.num_vertices())), m));
        } else {
            let edge = rng.gen_range(0..g.num_edges());
            let q = rng.gen_range(2..=7i64);
            let offset = &g.edge(edge).length * frac(rng.gen_range(1..q), q);
            points.push((Location::EdgePoint { edge, offset }, m));
        }
    }
    let sum: i64 = points.iter().map(|(_, m)| m).sum();
    points.push((Location::Vertex(rng.gen_range(0..g.num_vertices())), degree - sum));
    TropicalDivisor::new(g, points).expect("points lie on the graph")
}
