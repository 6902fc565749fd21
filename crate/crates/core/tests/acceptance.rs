//! Acceptance run: one PASS/FAIL line per criterion. All comparisons are
//! exact rational equalities; only the wall-clock budgets are tolerances.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use namikawa::breakdiv::degree_g_equivalence;
use namikawa::fixtures;
use namikawa::graph::{Divisor, EdgeSet, MetricGraph};
use namikawa::io::{parse_problem_str, ProblemSpec};
use namikawa::jacobian::{namikawa_decomposition, refinement_map, Decomposition, Kind};
use namikawa::linalg;
use namikawa::rational::Rational;
use namikawa::reduce::is_equivalent;
use namikawa::stability::{self, enumerate_types, Mode, Polarization, SheafType};
use namikawa::verify::{self, VerifyOptions};

const EXAMPLE_BUDGET: Duration = Duration::from_secs(1);
const TILING_BUDGET: Duration = Duration::from_secs(300);
const VERIFY_BUDGET: Duration = Duration::from_secs(120);
const RANDOM_GRAPHS: usize = 20;
const GRAPH_SEED: u64 = 7;
const DIVISORS_PER_FIXTURE: usize = 200;
const DIVISOR_SEED: u64 = 11;

struct Case {
    name: String,
    graph: MetricGraph,
    polarization: Polarization,
    fixture: bool,
}

/// Decompositions in one degree: the polystable one and the quasistable ones.
struct Built {
    case: usize,
    degree: i64,
    ps: Decomposition,
    qs: Vec<Decomposition>,
}

fn problems() -> Vec<(&'static str, ProblemSpec)> {
    fixtures::PROBLEMS
        .iter()
        .map(|(n, text)| (*n, parse_problem_str(text).expect("fixture parses")))
        .collect()
}

fn cases() -> Vec<Case> {
    let mut out: Vec<Case> = problems()
        .into_iter()
        .map(|(n, p)| Case {
            name: n.into(),
            graph: p.graph,
            polarization: p.polarization,
            fixture: true,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(GRAPH_SEED);
    for i in 0..RANDOM_GRAPHS {
        let graph = fixtures::random_graph(&mut rng);
        let polarization = fixtures::random_polarization(&mut rng, graph.num_vertices());
        out.push(Case {
            name: format!("random{i}"),
            graph,
            polarization,
            fixture: false,
        });
    }
    out
}

fn report(n: usize, title: &str, ok: bool, detail: String) -> bool {
    println!("criterion {n} {}: {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn ty(s: &[usize], d: &[i64]) -> SheafType {
    SheafType::new(EdgeSet::from_indices(s.iter().copied()), Divisor(d.to_vec()))
}

fn criterion_1() -> bool {
    let t0 = Instant::now();
    let g = fixtures::two_vertex_loop();
    let h = Polarization::new(Divisor(vec![2, 2])).expect("positive");
    let t = ty(&[], &[0, 2]);
    let r = stability::classify(&g, &h, &t);
    let graded = stability::grade(&g, &h, &t).ok();
    let took = t0.elapsed();
    let ok = r.semistable && !r.polystable && graded == Some(ty(&[0, 1], &[0, 0])) && took < EXAMPLE_BUDGET;
    report(
        1,
        "two-vertex loop example",
        ok,
        format!(
            "semistable={} polystable={} grade={graded:?} in {took:?}",
            r.semistable, r.polystable
        ),
    )
}

fn volume_sum(d: &Decomposition) -> Rational {
    d.maximal_cells()
        .map(|(_, c)| c.zonotope.volume())
        .fold(Rational::zero(), |a, v| a + v)
}

fn criterion_2(cases: &[Case]) -> (bool, Vec<Built>) {
    let t0 = Instant::now();
    let mut built = Vec::new();
    let mut failures = Vec::new();
    let mut decompositions = 0;
    for (i, c) in cases.iter().enumerate() {
        let (g, h) = (&c.graph, &c.polarization);
        let det = linalg::det(&namikawa::jacobian::LatticeData::new(g).expect("connected").gram);
        let sections: Vec<usize> = if c.fixture {
            (0..g.num_vertices()).collect()
        } else {
            vec![0]
        };
        for degree in [g.genus() - 1, g.genus(), g.genus() + 1] {
            let mut check = |kind: Kind| -> Option<Decomposition> {
                decompositions += 1;
                match namikawa_decomposition(g, h, degree, 0, kind) {
                    Ok(d) if volume_sum(&d) == det => Some(d),
                    Ok(d) => {
                        failures.push(format!(
                            "{} deg {degree} {kind:?}: volume {} vs {det}",
                            c.name,
                            volume_sum(&d)
                        ));
                        None
                    }
                    Err(e) => {
                        failures.push(format!("{} deg {degree} {kind:?}: {e}", c.name));
                        None
                    }
                }
            };
            let ps = check(Kind::Polystable);
            let qs: Vec<Decomposition> = sections.iter().filter_map(|&v| check(Kind::Quasistable(v))).collect();
            if let Some(ps) = ps {
                built.push(Built {
                    case: i,
                    degree,
                    ps,
                    qs,
                });
            }
        }
    }
    let took = t0.elapsed();
    let ok = failures.is_empty() && took < TILING_BUDGET;
    let ok = report(
        2,
        "exact volume tiling",
        ok,
        format!(
            "{decompositions} decompositions on {} graphs, {} failures {:?}, in {took:?}",
            cases.len(),
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    );
    (ok, built)
}

fn criterion_3() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(DIVISOR_SEED);
    let mut failures = Vec::new();
    let mut located = 0;
    for (name, p) in problems() {
        let g = &p.graph;
        let v = p.section.unwrap_or(p.basepoint);
        let ps = namikawa_decomposition(g, &p.polarization, p.degree, p.basepoint, Kind::Polystable);
        let qs = namikawa_decomposition(g, &p.polarization, p.degree, p.basepoint, Kind::Quasistable(v));
        let (Ok(ps), Ok(qs)) = (ps, qs) else {
            failures.push(format!("{name}: decomposition failed"));
            continue;
        };
        for _ in 0..DIVISORS_PER_FIXTURE {
            let d = fixtures::random_divisor(&mut rng, g, p.degree);
            for dec in [&ps, &qs] {
                let at = dec.lattice.abel_jacobi(g, p.basepoint, &d).expect("valid basepoint");
                let hits = dec.hits(&at);
                let certified = dec
                    .locate_divisor(&d)
                    .ok()
                    .map(|loc| is_equivalent(g, &loc.witness, &d).unwrap_or(false));
                let unique = dec.kind == Kind::Polystable || dec.has_unique_witness(&at);
                located += 1;
                if hits.len() != 1 || certified != Some(true) || !unique {
                    failures.push(format!(
                        "{name} {:?}: {} hits, certified {certified:?}, unique witness {unique}",
                        dec.kind,
                        hits.len()
                    ));
                }
            }
        }
    }
    report(
        3,
        "unique location with certified witnesses",
        failures.is_empty(),
        format!(
            "{located} locations, {} failures {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn criterion_4(cases: &[Case], built: &[Built]) -> bool {
    let mut failures = Vec::new();
    let (mut maps, mut agree, mut disagree) = (0, 0, 0);
    for b in built {
        for qs in &b.qs {
            maps += 1;
            match refinement_map(qs, &b.ps) {
                Ok(r) => {
                    agree += r.grade_agreements;
                    disagree += r.grade_disagreements.len();
                }
                Err(e) => failures.push(format!("{} deg {} {:?}: {e}", cases[b.case].name, b.degree, qs.kind)),
            }
        }
    }
    report(
        4,
        "quasistable refines polystable",
        failures.is_empty() && maps > 0,
        format!(
            "{maps} refinements, {} failures {:?}; grade matches geometry on {agree} cells, differs on {disagree}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn criterion_5(cases: &[Case], built: &[Built]) -> bool {
    let mut failures = Vec::new();
    for (i, c) in cases.iter().enumerate().filter(|(_, c)| c.fixture) {
        let (g, h) = (&c.graph, &c.polarization);
        let genus = g.genus();
        match degree_g_equivalence(g, h) {
            Ok(r) if r.matrix_tree_count == BigInt::from(r.maximal_cells) => {}
            Ok(r) => failures.push(format!(
                "{}: {} cells vs {} trees",
                c.name, r.maximal_cells, r.matrix_tree_count
            )),
            Err(e) => failures.push(format!("{}: {e}", c.name)),
        }
        let ss = enumerate_types(g, h, genus, Mode::Semistable).expect("small graph");
        let modes = [Mode::Stable]
            .into_iter()
            .chain((0..g.num_vertices()).map(Mode::Quasistable));
        for m in modes {
            if enumerate_types(g, h, genus, m).expect("small graph") != ss {
                failures.push(format!("{}: {m:?} types differ from semistable types", c.name));
            }
        }
        let Some(b) = built.iter().find(|b| b.case == i && b.degree == genus) else {
            failures.push(format!("{}: no degree g decomposition", c.name));
            continue;
        };
        let cells = b.ps.maximal_cells().count();
        if BigInt::from(cells) != g.spanning_tree_count() {
            failures.push(format!(
                "{}: {cells} maximal cells, {} spanning trees",
                c.name,
                g.spanning_tree_count()
            ));
        }
    }
    report(
        5,
        "degree g: polystable = break, all stabilities agree, cells = trees",
        failures.is_empty(),
        format!("{} failures {:?}", failures.len(), failures),
    )
}

fn criterion_6(cases: &[Case]) -> bool {
    let mut failures = Vec::new();
    for c in cases.iter().filter(|c| c.fixture) {
        match verify::twist_bijection(&c.graph, &c.polarization) {
            Ok(r) if r.passed() => {}
            Ok(r) => failures.push(format!("{}: {:?}", c.name, r.failures)),
            Err(e) => failures.push(format!("{}: {e}", c.name)),
        }
    }
    report(
        6,
        "twist bijection",
        failures.is_empty(),
        format!("{} failures {:?}", failures.len(), failures),
    )
}

fn criterion_7(cases: &[Case]) -> bool {
    let mut failures = Vec::new();
    let mut checked = 0;
    for c in cases.iter().filter(|c| c.fixture) {
        let (g, h) = (&c.graph, &c.polarization);
        for degree in [g.genus() - 1, g.genus(), g.genus() + 1] {
            let types = verify::types_near_semistable(g, h, degree);
            match verify::os_audit(g, h, degree, 0, &types) {
                Ok(r) => {
                    checked += r.cases;
                    failures.extend(r.failures.into_iter().map(|f| format!("{} deg {degree}: {f}", c.name)));
                }
                Err(e) => failures.push(format!("{}: {e}", c.name)),
            }
        }
    }
    report(
        7,
        "Oda-Seshadri biconditionals",
        failures.is_empty() && checked > 0,
        format!("{checked} biconditionals, {} failures {:?}", failures.len(), failures),
    )
}

fn criterion_8() -> bool {
    let mut failures = Vec::new();
    let mut times = Vec::new();
    for (name, p) in problems() {
        let t0 = Instant::now();
        match verify::verify(&p, &VerifyOptions::default()) {
            Ok(r) => {
                for c in r.checks.iter().filter(|c| !c.passed()) {
                    failures.push(format!("{name}: {} {:?}", c.name, c.failures));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
        let took = t0.elapsed();
        if took >= VERIFY_BUDGET {
            failures.push(format!("{name}: took {took:?}"));
        }
        times.push(format!("{name} {took:?}"));
    }
    report(
        8,
        "property suites",
        failures.is_empty(),
        format!("{} failures {:?}; {}", failures.len(), failures, times.join(", ")),
    )
}

fn main() -> ExitCode {
    let cases = cases();
    let mut ok = criterion_1();
    let (tiled, built) = criterion_2(&cases);
    ok &= tiled;
    ok &= criterion_3();
    ok &= criterion_4(&cases, &built);
    ok &= criterion_5(&cases, &built);
    ok &= criterion_6(&cases);
    ok &= criterion_7(&cases);
    ok &= criterion_8();
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
