//! The Namikawa decompositions `Delta_ps` and `Delta_qs` of `R^n / Lambda`,
//! and their validation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::admissible::check_admissible;
use super::cell::{cell_zonotope, relative_interiors_meet, Cell, Hull, ZonotopeKey};
use super::lattice::LatticeData;
use crate::error::{DecompositionClause as Clause, Error, Result};
use crate::graph::MetricGraph;
use crate::linalg;
use crate::rational::{frac, Rational};
use crate::stability::{self, enumerate_types_with, Limits, Mode, Polarization};

/// Which types label the cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Polystable types: `Delta_ps`.
    Polystable,
    /// `v`-quasistable types: `Delta_qs`.
    Quasistable(usize),
}

impl Kind {
    pub fn mode(&self) -> Mode {
        match self {
            Kind::Polystable => Mode::Polystable,
            Kind::Quasistable(v) => Mode::Quasistable(*v),
        }
    }
}

/// How thoroughly the pairwise face-to-face condition was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceCheck {
    /// Every pair of cells and every relevant lattice translate was tested
    /// with an exact linear program.
    Exact,
    /// Random relative-interior points of each cell were located instead.
    Sampled,
    /// Validation was skipped.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub covolume: Rational,
    pub maximal_volume: Rational,
    pub maximal_cells: usize,
    pub sampled_points: usize,
    pub face_check: FaceCheck,
    pub pairs_checked: usize,
    pub faces_checked: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.face_check != FaceCheck::Skipped && self.covolume == self.maximal_volume
    }
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub limits: Limits,
    pub validate: bool,
    /// Random torus points located during validation.
    pub samples: usize,
    pub seed: u64,
    /// Largest lattice rank for which the face-to-face check is exhaustive.
    pub exact_rank: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            limits: Limits::default(),
            validate: true,
            samples: 64,
            seed: 0,
            exact_rank: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub graph: MetricGraph,
    pub polarization: Polarization,
    pub lattice: LatticeData,
    pub cells: Vec<Cell>,
    pub kind: Kind,
    pub degree: i64,
    pub basepoint: usize,
    pub report: ValidationReport,
    hulls: Vec<Hull>,
}

/// Builds and validates `Delta_ps` or `Delta_qs`.
pub fn namikawa_decomposition(
    g: &MetricGraph,
    h: &Polarization,
    degree: i64,
    basepoint: usize,
    kind: Kind,
) -> Result<Decomposition> {
    namikawa_decomposition_with(g, h, degree, basepoint, kind, &BuildOptions::default())
}

pub fn namikawa_decomposition_with(
    g: &MetricGraph,
    h: &Polarization,
    degree: i64,
    basepoint: usize,
    kind: Kind,
    options: &BuildOptions,
) -> Result<Decomposition> {
    if basepoint >= g.num_vertices() {
        return Err(Error::UnknownVertex(format!("#{basepoint}")));
    }
    let lattice = LatticeData::new(g)?;
    let types = enumerate_types_with(g, h, degree, kind.mode(), &options.limits)?;
    let mut cells: Vec<Cell> = types
        .par_iter()
        .map(|t| cell_zonotope(g, &lattice, basepoint, t))
        .collect();
    // Higher-dimensional cells first; canonical type order within a dimension.
    cells.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.label.cmp(&b.label)));
    let mut dec = Decomposition::from_cells(g.clone(), h.clone(), lattice, cells, kind, degree, basepoint);
    dec.report = if options.validate {
        dec.validate(options)?
    } else {
        dec.volume_report()
    };
    Ok(dec)
}

impl Decomposition {
    /// Assembles a decomposition from its cells without validating it; the
    /// report only carries the volumes.
    pub fn from_cells(
        graph: MetricGraph,
        polarization: Polarization,
        lattice: LatticeData,
        cells: Vec<Cell>,
        kind: Kind,
        degree: i64,
        basepoint: usize,
    ) -> Self {
        let hulls = cells.par_iter().map(|c| c.zonotope.hull()).collect();
        let mut dec = Decomposition {
            graph,
            polarization,
            lattice,
            cells,
            kind,
            degree,
            basepoint,
            report: ValidationReport {
                covolume: Rational::zero(),
                maximal_volume: Rational::zero(),
                maximal_cells: 0,
                sampled_points: 0,
                face_check: FaceCheck::Skipped,
                pairs_checked: 0,
                faces_checked: 0,
            },
            hulls,
        };
        dec.report = dec.volume_report();
        dec
    }

    pub(crate) fn hull(&self, i: usize) -> &Hull {
        &self.hulls[i]
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn maximal_cells(&self) -> impl Iterator<Item = (usize, &Cell)> {
        let n = self.dim();
        self.cells.iter().enumerate().filter(move |(_, c)| c.dim == n)
    }

    pub fn cell_index(&self, label: &stability::SheafType) -> Option<usize> {
        self.cells.iter().position(|c| &c.label == label)
    }

    /// Cell keys modulo the lattice, mapped to cell indices.
    pub fn key_index(&self) -> BTreeMap<ZonotopeKey, usize> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.zonotope.key(&self.lattice), i))
            .collect()
    }

    fn volume_report(&self) -> ValidationReport {
        let maximal_volume = self
            .maximal_cells()
            .fold(Rational::zero(), |acc, (_, c)| acc + c.zonotope.volume());
        ValidationReport {
            covolume: self.lattice.covolume(),
            maximal_volume,
            maximal_cells: self.maximal_cells().count(),
            sampled_points: 0,
            face_check: FaceCheck::Skipped,
            pairs_checked: 0,
            faces_checked: 0,
        }
    }

    /// Checks the decomposition axioms; the error names the violated one.
    pub fn validate(&self, options: &BuildOptions) -> Result<ValidationReport> {
        let g = &self.graph;
        let mut report = self.volume_report();

        for c in &self.cells {
            let must_connect =
                matches!(self.kind, Kind::Quasistable(_)) || stability::is_stable(g, &self.polarization, &c.label);
            if must_connect && g.components_without(&c.label.s).len() != 1 {
                return Err(Error::invalid(
                    Clause::Structure,
                    format!("G - S is disconnected for the cell of {:?}", c.label),
                ));
            }
            if !check_admissible(c) {
                return Err(Error::invalid(Clause::Admissibility, format!("cell of {:?}", c.label)));
            }
        }

        if report.maximal_volume != report.covolume {
            return Err(Error::invalid(
                Clause::Volume,
                format!(
                    "maximal cells have total volume {} but det(M) = {}",
                    report.maximal_volume, report.covolume
                ),
            ));
        }

        let keys = self.key_index();
        if keys.len() != self.cells.len() {
            return Err(Error::invalid(
                Clause::FaceToFace,
                "two cells coincide modulo the lattice",
            ));
        }
        // (number of faces, whether one of them is missing) per cell
        let closure: Vec<(usize, bool)> = self
            .cells
            .par_iter()
            .map(|c| {
                let faces = c.zonotope.faces();
                let missing = faces.iter().any(|f| !keys.contains_key(&f.key(&self.lattice)));
                (faces.len(), missing)
            })
            .collect();
        if let Some(i) = closure.iter().position(|(_, missing)| *missing) {
            return Err(Error::invalid(
                Clause::FaceClosure,
                format!("a face of the cell of {:?} is not a cell", self.cells[i].label),
            ));
        }
        report.faces_checked = closure.iter().map(|(n, _)| n).sum();

        if self.dim() <= options.exact_rank {
            report.pairs_checked = self.check_pairs()?;
            report.face_check = FaceCheck::Exact;
        } else {
            self.check_sampled_interiors(options)?;
            report.face_check = FaceCheck::Sampled;
        }

        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        for _ in 0..options.samples {
            let p = self.random_torus_point(&mut rng);
            if self.hits(&p).is_empty() {
                return Err(Error::invalid(
                    Clause::Cover,
                    format!("no cell contains the point {p:?}"),
                ));
            }
        }
        report.sampled_points = options.samples;
        Ok(report)
    }

    /// A random point `k M` with `k` in `[0, 1)^n` having small denominators.
    pub fn random_torus_point<R: Rng>(&self, rng: &mut R) -> Vec<Rational> {
        let k: Vec<Rational> = (0..self.dim())
            .map(|_| {
                let q = rng.gen_range(1..=97i64);
                frac(rng.gen_range(0..q), q)
            })
            .collect();
        linalg::vec_mat(&k, &self.lattice.gram)
    }

    /// Lattice shifts `k` for which cell `j` translated by `k M` can meet cell `i`.
    fn shifts_between(&self, i: usize, j: usize) -> Vec<Vec<BigInt>> {
        let (lo_i, hi_i) = self.cells[i].zonotope.bounding_box();
        let (lo_j, hi_j) = self.cells[j].zonotope.bounding_box();
        self.lattice
            .lattice_points_in_box(&linalg::sub(&lo_i, &hi_j), &linalg::sub(&hi_i, &lo_j))
    }

    fn check_pairs(&self) -> Result<usize> {
        let n = self.cells.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let results: Vec<(usize, Option<Vec<BigInt>>)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let mut checked = 0;
                for k in self.shifts_between(i, j) {
                    if i == j && k.iter().all(Zero::is_zero) {
                        continue;
                    }
                    checked += 1;
                    let shift = self.lattice.lattice_point(&k);
                    let a = &self.cells[i].zonotope;
                    let shifted = self.cells[j].zonotope.translated(&shift);
                    if self.hulls[i].separates(&shifted)
                        || self.hulls[j].separates(&a.translated(&linalg::scale(&shift, &-frac(1, 1))))
                    {
                        continue;
                    }
                    if relative_interiors_meet(a, &shifted) {
                        return (checked, Some(k));
                    }
                }
                (checked, None)
            })
            .collect();
        for ((i, j), (_, bad)) in pairs.iter().zip(&results) {
            if let Some(k) = bad {
                return Err(Error::invalid(
                    Clause::FaceToFace,
                    format!(
                        "relative interiors of {:?} and {:?} (shifted by {k:?}) overlap",
                        self.cells[*i].label, self.cells[*j].label
                    ),
                ));
            }
        }
        Ok(results.iter().map(|(c, _)| c).sum())
    }

    fn check_sampled_interiors(&self, options: &BuildOptions) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x5eed);
        for (i, c) in self.cells.iter().enumerate() {
            for _ in 0..4 {
                let s: Vec<Rational> = c
                    .edges
                    .iter()
                    .map(|_| {
                        let q = rng.gen_range(2..=31i64);
                        frac(rng.gen_range(1..q), q)
                    })
                    .collect();
                let p = c.zonotope.at(&s);
                let hits = self.hits(&p);
                if hits.iter().any(|(j, _)| *j != i) {
                    return Err(Error::invalid(
                        Clause::FaceToFace,
                        format!("an interior point of {:?} lies in another cell", c.label),
                    ));
                }
            }
        }
        Ok(())
    }
}
