//! Face poset of a decomposition modulo the lattice, and the rays of the
//! local fan at each vertex.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::Serialize;

use super::decomposition::Decomposition;
use crate::linalg;
use crate::rational::{self, frac};

/// A covering relation: `face` is a facet of `cell`, `multiplicity` times
/// (a cell may wrap around the torus onto the same face).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct HasseEdge {
    pub face: usize,
    pub cell: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacePoset {
    pub edges: Vec<HasseEdge>,
    /// For each 0-cell, the primitive integral generators of the rays of its
    /// star, sorted.
    pub stars: Vec<(usize, Vec<Vec<BigInt>>)>,
}

impl FacePoset {
    /// Whether `a` lies in the closure of `b` (reflexive).
    pub fn is_face(&self, a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        self.edges
            .iter()
            .filter(|e| e.cell == b)
            .any(|e| self.is_face(a, e.face))
    }
}

pub fn face_poset(d: &Decomposition) -> FacePoset {
    let keys = d.key_index();
    let mut edges = Vec::new();
    for (i, c) in d.cells.iter().enumerate() {
        let mut counts: Vec<usize> = vec![0; d.cells.len()];
        for f in c.zonotope.facets() {
            if let Some(&j) = keys.get(&f.key(&d.lattice)) {
                counts[j] += 1;
            }
        }
        for (j, m) in counts.into_iter().enumerate() {
            if m > 0 {
                edges.push(HasseEdge {
                    face: j,
                    cell: i,
                    multiplicity: m,
                });
            }
        }
    }
    edges.sort();

    let mut stars = Vec::new();
    for (v, vc) in d.cells.iter().enumerate().filter(|(_, c)| c.dim == 0) {
        let vkey = vc.zonotope.key(&d.lattice);
        let mut rays: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        for c in d.cells.iter().filter(|c| c.dim == 1) {
            let center = c.zonotope.center();
            for (dir, len) in c.zonotope.reduced_generators() {
                let u: Vec<_> = dir
                    .iter()
                    .map(|x| rational::Rational::from_integer(x.clone()))
                    .collect();
                let half = linalg::scale(&u, &(len * frac(1, 2)));
                for (end, ray) in [(linalg::sub(&center, &half), 1), (linalg::add(&center, &half), -1)] {
                    let end_key = super::cell::Zonotope::point(end).key(&d.lattice);
                    if end_key == vkey {
                        rays.insert(dir.iter().map(|x| x * BigInt::from(ray)).collect());
                    }
                }
            }
        }
        stars.push((v, rays.into_iter().collect()));
    }
    FacePoset { edges, stars }
}
