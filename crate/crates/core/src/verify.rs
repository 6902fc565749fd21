//! The invariant suite run by `namikawa verify`: every structural property of
//! stability, the Jacobian decompositions and break divisors, checked
//! exhaustively (or on seeded random samples) for one problem.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::breakdiv::{self, degree_g_equivalence};
use crate::error::Result;
use crate::fixtures;
use crate::graph::{MetricGraph, RootedForest};
use crate::io::ProblemSpec;
use crate::jacobian::{namikawa_decomposition, refinement_map, Kind, LatticeData};
use crate::linalg;
use crate::reduce::is_equivalent;
use crate::stability::oda_seshadri::{
    epsilon_for_quasistability, os_is_semistable, os_is_stable, os_parameter, os_parameter_v_with,
};
use crate::stability::{
    self, all_node_sets, box_divisors, enumerate_types, grade, grade_with, multidegree_box, Mode, Polarization,
    SheafType,
};

/// Failures kept per check; the count is always exact.
const SHOWN: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            cases: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < SHOWN {
                self.failures.push(what());
            }
        }
    }

    fn fail(&mut self, what: String) {
        self.expect(false, || what);
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// All types of the given degree whose multidegree lies within one of the
/// semistable box, so unstable types on every side are included.
pub fn types_near_semistable(g: &MetricGraph, h: &Polarization, degree: i64) -> Vec<SheafType> {
    let mut out = Vec::new();
    for s in all_node_sets(g) {
        let b: Vec<(i64, i64)> = multidegree_box(g, h, &s, degree)
            .into_iter()
            .map(|(lo, hi)| (lo - 1, hi + 1))
            .collect();
        for d in box_divisors(&b, degree - s.len() as i64) {
            out.push(SheafType::new(s, d));
        }
    }
    out
}

fn show(g: &MetricGraph, t: &SheafType) -> String {
    crate::io::type_to_json(g, t).to_string()
}

/// Genus additivity, positivity of the Gram matrix, closed cycle basis and
/// the degree of subdivided types.
pub fn graph_identities(g: &MetricGraph, types: &[SheafType]) -> Check {
    let mut c = Check::new("graph identities");
    let all = g.all_vertices();
    let total = g.arithmetic_genus(&all).expect("nonempty");
    for w in g.subcurves() {
        let rest = all.difference(&w);
        let lhs = g.arithmetic_genus(&w).expect("nonempty")
            + g.arithmetic_genus(&rest).expect("nonempty")
            + g.boundary_counts(&w, &Default::default()).total as i64
            - 1;
        c.expect(lhs == total, || format!("genus additivity fails at {:?}", w.indices()));
    }
    match LatticeData::new(g) {
        Ok(l) => {
            c.expect(l.dim() == 0 || l.covolume() > crate::rational::int(0), || {
                "Gram determinant is not positive".into()
            });
            for (i, gamma) in l.basis.iter().enumerate() {
                c.expect(g.boundary(gamma).iter().all(num_traits::Zero::is_zero), || {
                    format!("cycle {i} has nonzero boundary")
                });
            }
        }
        Err(e) => c.fail(e.to_string()),
    }
    for t in types {
        let (_, d) = g.subdivide_type(&t.s, &t.d);
        c.expect(d.degree() == t.degree(), || {
            format!("subdivision changes the degree of {}", show(g, t))
        });
    }
    c
}

/// stable => polystable => semistable; stable => v-quasistable => semistable.
pub fn implication_chain(g: &MetricGraph, h: &Polarization, types: &[SheafType]) -> Check {
    let mut c = Check::new("implication chain");
    for t in types {
        let r = stability::classify(g, h, t);
        let qs_ok = r.quasistable_for.is_empty() || r.semistable;
        let stable_ok = !r.stable || (r.polystable && r.quasistable_for.len() == g.num_vertices());
        c.expect(qs_ok && stable_ok && (!r.polystable || r.semistable), || {
            format!("{} breaks the chain: {r:?}", show(g, t))
        });
    }
    c
}

/// For a semistable type, a subcurve whose boundary lies in `S` and its
/// complement are both equality subcurves.
pub fn strictly_semistable(g: &MetricGraph, h: &Polarization, types: &[SheafType]) -> Check {
    let mut c = Check::new("subcurves split along S are equality subcurves");
    let all = g.all_vertices();
    for t in types.iter().filter(|t| stability::is_semistable(g, h, t)) {
        let ties = stability::equality_subcurves(g, h, t);
        for w in g.subcurves().filter(|w| g.boundary_edges(w).is_subset(&t.s)) {
            let rest = all.difference(&w);
            c.expect(ties.contains(&w) && ties.contains(&rest), || {
                format!("{} at {:?}", show(g, t), w.indices())
            });
        }
    }
    c
}

/// Stable and quasistable types have connected normalization `G - S`.
pub fn connected_normalization(g: &MetricGraph, h: &Polarization, types: &[SheafType]) -> Check {
    let mut c = Check::new("stable and quasistable types have connected G - S");
    for t in types {
        let r = stability::classify(g, h, t);
        if r.stable || !r.quasistable_for.is_empty() {
            c.expect(g.components_without(&t.s).len() == 1, || show(g, t));
        }
    }
    c
}

/// Grading is polystable, degree-preserving, idempotent and independent of
/// the peeling order.
pub fn grade_properties(g: &MetricGraph, h: &Polarization, types: &[SheafType], seeds: u64) -> Check {
    let mut c = Check::new("grade");
    for t in types.iter().filter(|t| stability::is_semistable(g, h, t)) {
        let gr = match grade(g, h, t) {
            Ok(x) => x,
            Err(e) => {
                c.fail(format!("{}: {e}", show(g, t)));
                continue;
            }
        };
        c.expect(stability::is_polystable(g, h, &gr), || {
            format!("grade of {} is not polystable", show(g, t))
        });
        c.expect(gr.degree() == t.degree(), || {
            format!("grade of {} changes degree", show(g, t))
        });
        c.expect(grade(g, h, &gr).ok().as_ref() == Some(&gr), || {
            format!("grade not idempotent at {}", show(g, t))
        });
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let other = grade_with(g, h, t, &mut rng).ok();
            c.expect(other.as_ref() == Some(&gr), || {
                format!("grade of {} depends on the peeling order (seed {seed})", show(g, t))
            });
        }
    }
    c
}

/// In degree `g` all stability notions agree, polystable types are break
/// types, and maximal cells match spanning trees.
pub fn degree_g_collapse(g: &MetricGraph, h: &Polarization) -> Result<Check> {
    let mut c = Check::new("degree g collapse");
    let d = g.genus();
    let ss = enumerate_types(g, h, d, Mode::Semistable)?;
    for mode in [Mode::Stable, Mode::Polystable]
        .into_iter()
        .chain((0..g.num_vertices()).map(Mode::Quasistable))
    {
        c.expect(enumerate_types(g, h, d, mode)? == ss, || {
            format!("{mode:?} types differ from semistable ones")
        });
    }
    if let Err(e) = degree_g_equivalence(g, h) {
        c.fail(e.to_string());
    } else {
        c.cases += 1;
    }
    Ok(c)
}

/// The tree and subcurve characterizations of break divisors agree on every
/// multidegree of degree `g` in a box around the weights.
pub fn break_predicates_agree(g: &MetricGraph) -> Result<Check> {
    let mut c = Check::new("break divisor characterizations agree");
    let genus = g.genus();
    let b: Vec<(i64, i64)> = (0..g.num_vertices()).map(|v| (g.weight(v) - 1, genus + 1)).collect();
    for d in box_divisors(&b, genus) {
        let tree = breakdiv::is_break_divisor_tree(g, &d)?.is_break;
        let ineq = breakdiv::is_break_divisor_ineq(g, &Default::default(), &d)?;
        c.expect(tree == ineq, || format!("{:?}: tree {tree}, inequalities {ineq}", d.0));
    }
    Ok(c)
}

/// In degree `g - 1` the semistable and stable sets do not depend on the
/// polarization.
pub fn polarization_independence(g: &MetricGraph, h: &Polarization, samples: usize, seed: u64) -> Result<Check> {
    let mut c = Check::new("degree g-1 polarization independence");
    let d = g.genus() - 1;
    let ss = enumerate_types(g, h, d, Mode::Semistable)?;
    let st = enumerate_types(g, h, d, Mode::Stable)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let other = fixtures::random_polarization(&mut rng, g.num_vertices());
        let same = enumerate_types(g, &other, d, Mode::Semistable)? == ss
            && enumerate_types(g, &other, d, Mode::Stable)? == st;
        c.expect(same, || {
            format!("polarization {:?} changes the sets", other.multidegree().0)
        });
    }
    Ok(c)
}

/// Twisting by `-v` maps degree-`g` polystable types onto degree-`(g-1)`
/// `v`-quasistable types.
pub fn twist_bijection(g: &MetricGraph, h: &Polarization) -> Result<Check> {
    let mut c = Check::new("twist bijection");
    let ps = enumerate_types(g, h, g.genus(), Mode::Polystable)?;
    for v in 0..g.num_vertices() {
        let twisted: BTreeSet<SheafType> = ps.iter().map(|t| t.twist(v, -1)).collect();
        let qs: BTreeSet<SheafType> = enumerate_types(g, h, g.genus() - 1, Mode::Quasistable(v))?
            .into_iter()
            .collect();
        c.expect(twisted.len() == ps.len() && twisted == qs, || {
            format!("twist at {} is not onto the quasistable types", g.vertex(v).id)
        });
    }
    Ok(c)
}

/// Polarized (semi)stability and `v`-quasistability against Oda–Seshadri
/// (semi)stability of the twist to degree 0.
pub fn os_audit(
    g: &MetricGraph,
    h: &Polarization,
    degree: i64,
    basepoint: usize,
    types: &[SheafType],
) -> Result<Check> {
    let mut c = Check::new("Oda-Seshadri translation");
    let eps = (0..g.num_vertices())
        .map(|v| epsilon_for_quasistability(g, h, degree, v))
        .collect::<Result<Vec<_>>>()?;
    for t in types {
        let r = stability::classify(g, h, t);
        let tw = t.twist(basepoint, -degree);
        let q = os_parameter(g, h, degree, basepoint, t)?;
        let (oss, ost) = (os_is_semistable(g, &q, &tw)?, os_is_stable(g, &q, &tw)?);
        c.expect(oss == r.semistable && ost == r.stable, || {
            format!(
                "{}: semistable {} vs {oss}, stable {} vs {ost}",
                show(g, t),
                r.semistable,
                r.stable
            )
        });
        for (v, e) in eps.iter().enumerate() {
            let qv = os_parameter_v_with(g, h, degree, basepoint, v, t, e.clone())?;
            let os = os_is_stable(g, &qv, &tw)?;
            let qs = r.quasistable_for.contains(&v);
            c.expect(os == qs, || {
                format!(
                    "{}: {}-quasistable {qs} vs q_H^v-stable {os}",
                    show(g, t),
                    g.vertex(v).id
                )
            });
        }
    }
    Ok(c)
}

/// Abel–Jacobi images through two random spanning trees differ by a lattice
/// vector.
pub fn abel_jacobi_paths(g: &MetricGraph, degree: i64, basepoint: usize, samples: usize, seed: u64) -> Result<Check> {
    let mut c = Check::new("Abel-Jacobi path independence");
    let lattice = LatticeData::new(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..g.num_edges()).collect();
    for _ in 0..samples {
        let d = fixtures::random_divisor(&mut rng, g, degree);
        let mut forest = || -> Result<RootedForest> {
            order.shuffle(&mut rng);
            RootedForest::new(g, &g.spanning_forest_in_order(order.iter().copied()))
        };
        let (f1, f2) = (forest()?, forest()?);
        let a = lattice.abel_jacobi_via(g, &f1, basepoint, &d)?;
        let b = lattice.abel_jacobi_via(g, &f2, basepoint, &d)?;
        c.expect(lattice.is_lattice_vector(&linalg::sub(&a, &b)), || {
            format!("{}", crate::io::divisor_to_json(g, &d))
        });
    }
    Ok(c)
}

/// Both decompositions validate, the quasistable one refines the polystable
/// one with grade-compatible labels, random classes locate uniquely with
/// certified witnesses, and in degree `g` all decompositions coincide.
pub fn decompositions(p: &ProblemSpec, samples: usize, seed: u64) -> Result<Check> {
    let mut c = Check::new("decompositions");
    let (g, h) = (&p.graph, &p.polarization);
    let v = p.section.unwrap_or(p.basepoint);
    let ps = namikawa_decomposition(g, h, p.degree, p.basepoint, Kind::Polystable);
    let qs = namikawa_decomposition(g, h, p.degree, p.basepoint, Kind::Quasistable(v));
    let (ps, qs) = match (ps, qs) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            for e in [a.err(), b.err()].into_iter().flatten() {
                c.fail(e.to_string());
            }
            return Ok(c);
        }
    };
    c.cases += 2;
    match refinement_map(&qs, &ps) {
        Ok(r) => c.expect(r.agrees_with_grade(), || {
            format!("{} refinement images differ from grade", r.grade_disagreements.len())
        }),
        Err(e) => c.fail(e.to_string()),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let d = fixtures::random_divisor(&mut rng, g, p.degree);
        for dec in [&ps, &qs] {
            let at = dec.lattice.abel_jacobi(g, p.basepoint, &d)?;
            let hits = dec.hits(&at);
            c.expect(hits.len() == 1, || {
                format!(
                    "{} lies in {} cell interiors",
                    crate::io::divisor_to_json(g, &d),
                    hits.len()
                )
            });
            match dec.locate_divisor(&d) {
                Ok(loc) => {
                    c.expect(is_equivalent(g, &loc.witness, &d)?, || {
                        format!("witness of {} is not equivalent", crate::io::divisor_to_json(g, &d))
                    });
                    if dec.kind != Kind::Polystable {
                        c.expect(dec.has_unique_witness(&at), || {
                            format!(
                                "{} has several quasistable witnesses",
                                crate::io::divisor_to_json(g, &d)
                            )
                        });
                    }
                }
                Err(e) => c.fail(e.to_string()),
            }
        }
    }
    let genus = g.genus();
    let top = namikawa_decomposition(g, h, genus, p.basepoint, Kind::Polystable)?;
    for w in 0..g.num_vertices() {
        let other = namikawa_decomposition(g, h, genus, p.basepoint, Kind::Quasistable(w))?;
        c.expect(other.cells == top.cells, || {
            format!("degree g decompositions differ at {}", g.vertex(w).id)
        });
    }
    Ok(c)
}

/// Options for [`verify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub grade_seeds: u64,
    pub polarizations: usize,
    pub samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            grade_seeds: 10,
            polarizations: 5,
            samples: 20,
        }
    }
}

/// Runs every check. Stability properties are checked on the problem's
/// degree and on `g - 1`, `g`, `g + 1`.
pub fn verify(p: &ProblemSpec, o: &VerifyOptions) -> Result<VerifyReport> {
    let (g, h) = (&p.graph, &p.polarization);
    let genus = g.genus();
    let degrees: BTreeSet<i64> = [p.degree, genus - 1, genus, genus + 1].into_iter().collect();
    let types: Vec<SheafType> = degrees.iter().flat_map(|&d| types_near_semistable(g, h, d)).collect();
    let mut os = Check::new("Oda-Seshadri translation");
    for &d in &degrees {
        let of_degree: Vec<SheafType> = types.iter().filter(|t| t.degree() == d).cloned().collect();
        let c = os_audit(g, h, d, p.basepoint, &of_degree)?;
        os.cases += c.cases;
        os.failed += c.failed;
        os.failures
            .extend(c.failures.into_iter().take(SHOWN - os.failures.len().min(SHOWN)));
    }
    let checks = vec![
        graph_identities(g, &types),
        implication_chain(g, h, &types),
        strictly_semistable(g, h, &types),
        connected_normalization(g, h, &types),
        grade_properties(g, h, &types, o.grade_seeds),
        degree_g_collapse(g, h)?,
        break_predicates_agree(g)?,
        polarization_independence(g, h, o.polarizations, o.seed)?,
        twist_bijection(g, h)?,
        os,
        abel_jacobi_paths(g, p.degree, p.basepoint, o.samples, o.seed)?,
        decompositions(p, o.samples, o.seed)?,
    ];
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_problem_str;

    #[test]
    fn fixtures_pass() {
        for (name, text) in fixtures::PROBLEMS {
            let p = parse_problem_str(text).unwrap();
            let r = verify(
                &p,
                &VerifyOptions {
                    samples: 5,
                    ..Default::default()
                },
            )
            .unwrap();
            for c in &r.checks {
                assert!(c.passed(), "{name}: {} {:?}", c.name, c.failures);
                assert!(c.cases > 0, "{name}: {} ran nothing", c.name);
            }
        }
    }

    #[test]
    fn broken_chain_is_reported() {
        let g = fixtures::two_vertex_loop();
        let h = Polarization::new(crate::graph::Divisor(vec![2, 2])).unwrap();
        let mut c = Check::new("x");
        c.expect(false, || "a".into());
        c.expect(true, || unreachable!());
        assert!(!c.passed() && c.cases == 2 && c.failed == 1);
        let types = types_near_semistable(&g, &h, 2);
        assert!(types.iter().any(|t| !stability::is_semistable(&g, &h, t)));
        assert!(types.iter().any(|t| stability::is_stable(&g, &h, t)));
    }
}
