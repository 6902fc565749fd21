#![allow(dead_code)]

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use namikawa::fixtures;
use namikawa::graph::MetricGraph;
use namikawa::stability::Polarization;

/// Seeded random graphs with a polarization, so failures shrink to a seed.
pub fn graph_and_polarization() -> impl Strategy<Value = (u64, MetricGraph, Polarization)> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = fixtures::random_graph(&mut rng);
        let h = fixtures::random_polarization(&mut rng, g.num_vertices());
        (seed, g, h)
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
