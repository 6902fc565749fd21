//! Point location: the unique cell whose relative interior contains a class.

use num_bigint::BigInt;

use super::cell::Zonotope;
use super::decomposition::Decomposition;
use crate::error::{DecompositionClause, Error, Result};
use crate::graph::TropicalDivisor;
use crate::linalg;
use crate::lp::{Cmp, Lp, LpOutcome};
use crate::rational::{frac, int, Rational};
use crate::stability::SheafType;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellLocation {
    pub cell: usize,
    pub label: SheafType,
    /// One parameter in `(0, 1)` per edge of `S`.
    pub parameters: Vec<Rational>,
    /// The lattice shift `k`: the query equals `cell(parameters) + k M`.
    pub shift: Vec<BigInt>,
    /// A divisor of the cell's type in the class of the query.
    pub witness: TropicalDivisor,
}

impl Decomposition {
    /// Every `(cell, k)` such that `p - k M` lies in the relative interior of
    /// the cell.
    pub fn hits(&self, p: &[Rational]) -> Vec<(usize, Vec<BigInt>)> {
        let mut out = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            for k in self.shifts_to(&c.zonotope, p) {
                let q = linalg::sub(p, &self.lattice.lattice_point(&k));
                if self.hull(i).in_relative_interior(&q) {
                    out.push((i, k));
                }
            }
        }
        out
    }

    fn shifts_to(&self, z: &Zonotope, p: &[Rational]) -> Vec<Vec<BigInt>> {
        let (lo, hi) = z.bounding_box();
        self.lattice
            .lattice_points_in_box(&linalg::sub(p, &hi), &linalg::sub(p, &lo))
    }

    /// Locates a point given in lattice coordinates. Cells are tried by
    /// decreasing dimension; the parameters are the lexicographic midpoint
    /// of the open parameter set.
    pub fn locate_point(&self, p: &[Rational]) -> Result<CellLocation> {
        if p.len() != self.dim() {
            return Err(Error::Domain(format!(
                "point has {} coordinates, the torus has dimension {}",
                p.len(),
                self.dim()
            )));
        }
        for (i, c) in self.cells.iter().enumerate() {
            for k in self.shifts_to(&c.zonotope, p) {
                let q = linalg::sub(p, &self.lattice.lattice_point(&k));
                if !self.hull(i).in_relative_interior(&q) {
                    continue;
                }
                let parameters = midpoint_parameters(&c.zonotope, &q);
                let offsets: Vec<(usize, Rational)> = c
                    .edges
                    .iter()
                    .zip(&parameters)
                    .map(|(&e, s)| (e, s * &self.graph.edge(e).length))
                    .collect();
                let witness = TropicalDivisor::of_type(&self.graph, &c.label.s, &c.label.d, &offsets)?;
                return Ok(CellLocation {
                    cell: i,
                    label: c.label.clone(),
                    parameters,
                    shift: k,
                    witness,
                });
            }
        }
        Err(Error::invalid(
            DecompositionClause::Cover,
            format!("no cell contains {p:?}"),
        ))
    }

    /// Locates the class of a divisor of the decomposition's degree.
    pub fn locate_divisor(&self, d: &TropicalDivisor) -> Result<CellLocation> {
        if d.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: d.degree(),
            });
        }
        let p = self.lattice.abel_jacobi(&self.graph, self.basepoint, d)?;
        self.locate_point(&p)
    }

    /// Whether exactly one divisor of a labelled type represents the class:
    /// a single `(cell, shift)` hit with linearly independent generators.
    pub fn has_unique_witness(&self, p: &[Rational]) -> bool {
        let hits = self.hits(p);
        hits.len() == 1 && {
            let c = &self.cells[hits[0].0];
            c.dim == c.edges.len()
        }
    }
}

/// Fixes `s_1, s_2, ...` in turn at the midpoint of their feasible range,
/// given the earlier choices. `q` must be in the relative interior, so every
/// range is a nonempty open interval (or a single point) and the result has
/// all entries in `(0, 1)`.
fn midpoint_parameters(z: &Zonotope, q: &[Rational]) -> Vec<Rational> {
    let k = z.generators.len();
    let rhs = linalg::sub(q, &z.base);
    let mut fixed: Vec<Rational> = Vec::with_capacity(k);
    for i in 0..k {
        let mut lp = Lp::new(k);
        for (j, r) in rhs.iter().enumerate() {
            lp.add(z.generators.iter().map(|g| g[j].clone()).collect(), Cmp::Eq, r.clone());
        }
        for m in 0..k {
            let mut row = vec![int(0); k];
            row[m] = int(1);
            if m < i {
                lp.add(row, Cmp::Eq, fixed[m].clone());
            } else {
                lp.add(row, Cmp::Le, int(1));
            }
        }
        let mut obj = vec![int(0); k];
        obj[i] = int(1);
        lp.objective = obj.clone();
        let hi = optimum(&lp);
        lp.objective = obj.iter().map(|x| -x).collect();
        let lo = -optimum(&lp);
        fixed.push((lo + hi) * frac(1, 2));
    }
    fixed
}

fn optimum(lp: &Lp) -> Rational {
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => value,
        other => unreachable!("parameter range of an interior point: {other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::super::decomposition::{namikawa_decomposition, Kind};
    use crate::fixtures;
    use crate::graph::{Divisor, Location, TropicalDivisor};
    use crate::rational::{frac, int};
    use crate::stability::{Polarization, SheafType};

    #[test]
    fn locate_degree_three() {
        let g = fixtures::two_vertex_loop();
        let h = Polarization::new(Divisor(vec![2, 2])).unwrap();
        let d = namikawa_decomposition(&g, &h, 3, 0, Kind::Polystable).unwrap();
        let loc = d
            .locate_divisor(&TropicalDivisor::from_divisor(&Divisor(vec![0, 3])))
            .unwrap();
        assert_eq!(loc.label, SheafType::line_bundle(Divisor(vec![2, 1])));
        assert!(d
            .locate_divisor(&TropicalDivisor::from_divisor(&Divisor(vec![0, 2])))
            .is_err());
    }

    #[test]
    fn locate_degree_two_family() {
        let g = fixtures::two_vertex_loop();
        let h = Polarization::new(Divisor(vec![2, 2])).unwrap();
        let d = namikawa_decomposition(&g, &h, 2, 0, Kind::Polystable).unwrap();
        let loc = d
            .locate_divisor(&TropicalDivisor::from_divisor(&Divisor(vec![0, 2])))
            .unwrap();
        assert_eq!(loc.label, SheafType::new(g.all_edges(), Divisor(vec![0, 0])));
        assert_eq!(loc.parameters, vec![frac(1, 2), frac(1, 2)]);
        assert!(!d.has_unique_witness(&d.lattice.abel_jacobi(&g, 0, &loc.witness).unwrap()));
    }

    #[test]
    fn interior_type_locates_to_itself() {
        let g = fixtures::two_vertex_loop();
        let h = Polarization::new(Divisor(vec![2, 2])).unwrap();
        let d = namikawa_decomposition(&g, &h, 3, 0, Kind::Polystable).unwrap();
        let p = TropicalDivisor::new(
            &g,
            vec![
                (Location::Vertex(0), 1),
                (Location::Vertex(1), 1),
                (
                    Location::EdgePoint {
                        edge: 1,
                        offset: frac(1, 3),
                    },
                    1,
                ),
            ],
        )
        .unwrap();
        let loc = d.locate_divisor(&p).unwrap();
        assert_eq!(
            loc.label,
            SheafType::new(crate::graph::EdgeSet::singleton(1), Divisor(vec![1, 1]))
        );
        assert_eq!(loc.parameters, vec![frac(1, 3)]);
        assert_eq!(loc.witness, p);
        assert!(d.has_unique_witness(&d.lattice.abel_jacobi(&g, 0, &p).unwrap()));
        let _ = int(0);
    }
}
