//! The map from quasistable cells to the polystable cells containing them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::decomposition::{Decomposition, Kind};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::Rational;
use crate::stability::{self, SheafType};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    /// For each qs cell, the ps cell whose relative interior contains its
    /// relative interior, and the lattice shift taking one to the other.
    pub map: Vec<(usize, Vec<BigInt>)>,
    /// Number of qs cells whose image is the cell of the graded type.
    pub grade_agreements: usize,
    /// `(qs label, graded label, image label)` where grading and geometry
    /// disagree.
    pub grade_disagreements: Vec<(SheafType, SheafType, SheafType)>,
}

impl Refinement {
    pub fn agrees_with_grade(&self) -> bool {
        self.grade_disagreements.is_empty()
    }
}

/// Checks that `qs` refines `ps`: every closed qs cell lies in the closed ps
/// cell whose relative interior contains its center, maximal cells map to
/// maximal cells, and the qs maximal cells partition each ps maximal cell by
/// volume.
pub fn refinement_map(qs: &Decomposition, ps: &Decomposition) -> Result<Refinement> {
    if !matches!(qs.kind, Kind::Quasistable(_)) || ps.kind != Kind::Polystable {
        return Err(Error::Domain(
            "expected a quasistable and a polystable decomposition".into(),
        ));
    }
    if qs.graph != ps.graph
        || qs.polarization != ps.polarization
        || qs.degree != ps.degree
        || qs.basepoint != ps.basepoint
    {
        return Err(Error::Domain("decompositions are over different data".into()));
    }
    let g = &qs.graph;
    let mut map = Vec::with_capacity(qs.cells.len());
    let mut grade_agreements = 0;
    let mut grade_disagreements = Vec::new();
    let mut filled: BTreeMap<usize, Rational> = BTreeMap::new();
    for c in &qs.cells {
        let hits = ps.hits(&c.zonotope.center());
        let [(j, k)] = hits.as_slice() else {
            return Err(Error::Refinement(format!(
                "the center of {:?} lies in {} polystable cells",
                c.label,
                hits.len()
            )));
        };
        let target = &ps.cells[*j];
        let shift = ps.lattice.lattice_point(k);
        for p in c.zonotope.corners() {
            if !target.zonotope.contains(&linalg::sub(&p, &shift)) {
                return Err(Error::Refinement(format!(
                    "{:?} is not contained in {:?}",
                    c.label, target.label
                )));
            }
        }
        if c.dim == qs.dim() {
            if target.dim != ps.dim() {
                return Err(Error::Refinement(format!(
                    "maximal cell {:?} maps to the lower-dimensional {:?}",
                    c.label, target.label
                )));
            }
            *filled.entry(*j).or_insert_with(Rational::zero) += c.zonotope.volume();
        }
        let graded = stability::grade(g, &ps.polarization, &c.label)?;
        if graded == target.label {
            grade_agreements += 1;
        } else {
            grade_disagreements.push((c.label.clone(), graded, target.label.clone()));
        }
        map.push((*j, k.clone()));
    }
    for (j, c) in ps.maximal_cells() {
        let got = filled.get(&j).cloned().unwrap_or_else(Rational::zero);
        if got != c.zonotope.volume() {
            return Err(Error::Refinement(format!(
                "quasistable cells fill volume {got} of {:?}, which has volume {}",
                c.label,
                c.zonotope.volume()
            )));
        }
    }
    Ok(Refinement {
        map,
        grade_agreements,
        grade_disagreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{Divisor, EdgeSet};
    use crate::jacobian::namikawa_decomposition;
    use crate::stability::Polarization;

    #[test]
    fn two_vertex_loop_degree_two() {
        let g = fixtures::two_vertex_loop();
        let h = Polarization::new(Divisor(vec![2, 2])).unwrap();
        let ps = namikawa_decomposition(&g, &h, 2, 0, Kind::Polystable).unwrap();
        let qs = namikawa_decomposition(&g, &h, 2, 0, Kind::Quasistable(0)).unwrap();
        let r = refinement_map(&qs, &ps).unwrap();
        let family = ps
            .cell_index(&SheafType::new(g.all_edges(), Divisor(vec![0, 0])))
            .unwrap();
        for (i, c) in qs.cells.iter().enumerate() {
            if c.label.s.len() == 1 {
                assert_eq!(r.map[i].0, family);
            }
        }
        assert!(r.agrees_with_grade(), "{:?}", r.grade_disagreements);
        let _ = EdgeSet::EMPTY;
    }

    #[test]
    fn degree_g_is_the_identity() {
        let g = fixtures::two_vertex_loop();
        let h = Polarization::new(Divisor(vec![2, 2])).unwrap();
        let ps = namikawa_decomposition(&g, &h, 3, 0, Kind::Polystable).unwrap();
        let qs = namikawa_decomposition(&g, &h, 3, 0, Kind::Quasistable(0)).unwrap();
        let r = refinement_map(&qs, &ps).unwrap();
        for (i, c) in qs.cells.iter().enumerate() {
            assert_eq!(ps.cells[r.map[i].0].label, c.label);
        }
    }
}
