use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use namikawa::breakdiv;
use namikawa::error::{Error, InputErrorCode as Code, Result};
use namikawa::graph::MetricGraph;
use namikawa::io::{self, ProblemSpec};
use namikawa::jacobian::{face_poset, namikawa_decomposition_with, refinement_map, BuildOptions, Decomposition, Kind};
use namikawa::rational::{self, Rational};
use namikawa::stability::oda_seshadri::{
    epsilon_for_quasistability, os_is_semistable, os_is_stable, os_parameter, os_parameter_v_with,
};
use namikawa::stability::{self, enumerate_types_with, Limits, Mode};
use namikawa::svg;
use namikawa::verify::{verify, VerifyOptions};

/// Stability of sheaf types on nodal curves and Namikawa decompositions of
/// tropical Jacobians.
#[derive(Parser)]
#[command(name = "namikawa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Total degree; overrides the problem file.
    #[arg(long, global = true, allow_negative_numbers = true)]
    degree: Option<i64>,
    /// Basepoint vertex id; overrides the problem file.
    #[arg(long, global = true)]
    basepoint: Option<String>,
    /// Vertex for quasistability; defaults to the problem's section, then the basepoint.
    #[arg(long, global = true)]
    section: Option<String>,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Lift the size caps.
    #[arg(long, global = true)]
    force: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Ps,
    Qs,
    Semistable,
    Stable,
}

#[derive(Subcommand)]
enum Command {
    /// Stability report of a type.
    Classify {
        problem: PathBuf,
        #[arg(long = "type")]
        ty: String,
    },
    /// Polystable type of the Jordan–Hölder grading.
    Grade {
        problem: PathBuf,
        #[arg(long = "type")]
        ty: String,
    },
    /// All types of the degree satisfying a stability condition.
    Enumerate {
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "ps")]
        mode: ModeArg,
    },
    /// Oda–Seshadri parameters of a type and the translated verdicts.
    OsTranslate {
        problem: PathBuf,
        #[arg(long = "type")]
        ty: String,
    },
    /// Build and validate a decomposition.
    Decompose {
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "ps")]
        mode: ModeArg,
        /// Also draw it (dimension 1 or 2).
        #[arg(long)]
        svg: bool,
    },
    /// Cell of a divisor class or of a point of the torus.
    Locate {
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "ps")]
        mode: ModeArg,
        /// `[[location, multiplicity], ...]`.
        #[arg(long, conflicts_with = "point")]
        divisor: Option<String>,
        /// `["p/q", ...]` in lattice coordinates.
        #[arg(long)]
        point: Option<String>,
    },
    /// Map from quasistable to polystable cells.
    Refine { problem: PathBuf },
    /// Break divisor tests for a multidegree, or for a type on `G - S`.
    Breakdiv {
        problem: PathBuf,
        /// `{"vertex": n, ...}`.
        #[arg(long, conflicts_with = "ty")]
        divisor: Option<String>,
        #[arg(long = "type")]
        ty: Option<String>,
    },
    /// Run the invariant suite.
    Verify {
        problem: PathBuf,
        /// Random divisors per randomized check.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

struct Ctx {
    spec: ProblemSpec,
    limits: Limits,
    section: usize,
    seed: u64,
}

impl Ctx {
    fn load(path: &Path, c: &Common) -> Result<Ctx> {
        let mut spec = io::parse_problem(path)?;
        let vertex = |id: &str| {
            spec.graph
                .vertex_index(id)
                .map_err(|_| Error::input(Code::UnknownId, format!("unknown vertex `{id}`")))
        };
        if let Some(b) = &c.basepoint {
            spec.basepoint = vertex(b)?;
        }
        if let Some(s) = &c.section {
            spec.section = Some(vertex(s)?);
        }
        if let Some(d) = c.degree {
            spec.degree = d;
        }
        let limits = if c.force {
            Limits::unbounded()
        } else {
            Limits::default()
        };
        limits.check_graph(&spec.graph)?;
        Ok(Ctx {
            section: spec.section.unwrap_or(spec.basepoint),
            spec,
            limits,
            seed: c.seed,
        })
    }

    fn g(&self) -> &MetricGraph {
        &self.spec.graph
    }

    fn kind(&self, m: ModeArg) -> Result<Kind> {
        match m {
            ModeArg::Ps => Ok(Kind::Polystable),
            ModeArg::Qs => Ok(Kind::Quasistable(self.section)),
            _ => Err(Error::input(Code::Json, "decompositions need --mode ps or qs")),
        }
    }

    fn decompose(&self, kind: Kind, degree: i64) -> Result<Decomposition> {
        let options = BuildOptions {
            limits: self.limits,
            seed: self.seed,
            ..Default::default()
        };
        namikawa_decomposition_with(
            self.g(),
            &self.spec.polarization,
            degree,
            self.spec.basepoint,
            kind,
            &options,
        )
    }

    fn ids(&self, vs: &[usize]) -> Value {
        json!(vs.iter().map(|&v| self.g().vertex(v).id.clone()).collect::<Vec<_>>())
    }

    fn ty(&self, t: &stability::SheafType) -> Value {
        io::type_to_json(self.g(), t)
    }
}

fn rats(v: &[Rational]) -> Value {
    json!(v.iter().map(rational::format).collect::<Vec<_>>())
}

fn vertex_map(g: &MetricGraph, v: &[Rational]) -> Value {
    Value::Object(
        v.iter()
            .enumerate()
            .map(|(i, q)| (g.vertex(i).id.clone(), json!(rational::format(q))))
            .collect(),
    )
}

fn classify(ctx: &Ctx, ty: &str) -> Result<Value> {
    let (g, h) = (ctx.g(), &ctx.spec.polarization);
    let t = io::parse_type(g, ty)?;
    t.check(g)?;
    let r = stability::classify(g, h, &t);
    Ok(json!({
        "type": ctx.ty(&t),
        "slope": rational::format(&stability::slope(g, h, &t)),
        "semistable": r.semistable,
        "stable": r.stable,
        "polystable": r.polystable,
        "quasistable_for": ctx.ids(&r.quasistable_for),
        "equality_subcurves": r.equality_subcurves.iter().map(|w| ctx.ids(&w.indices())).collect::<Vec<_>>(),
    }))
}

fn grade(ctx: &Ctx, ty: &str) -> Result<Value> {
    let t = io::parse_type(ctx.g(), ty)?;
    let gr = stability::grade(ctx.g(), &ctx.spec.polarization, &t)?;
    Ok(json!({"type": ctx.ty(&t), "grade": ctx.ty(&gr)}))
}

fn enumerate(ctx: &Ctx, mode: ModeArg) -> Result<Value> {
    let m = match mode {
        ModeArg::Ps => Mode::Polystable,
        ModeArg::Qs => Mode::Quasistable(ctx.section),
        ModeArg::Semistable => Mode::Semistable,
        ModeArg::Stable => Mode::Stable,
    };
    let types = enumerate_types_with(ctx.g(), &ctx.spec.polarization, ctx.spec.degree, m, &ctx.limits)?;
    Ok(json!({
        "degree": ctx.spec.degree,
        "count": types.len(),
        "types": types.iter().map(|t| ctx.ty(t)).collect::<Vec<_>>(),
    }))
}

fn os_translate(ctx: &Ctx, ty: &str) -> Result<Value> {
    let (g, h, bp) = (ctx.g(), &ctx.spec.polarization, ctx.spec.basepoint);
    let t = io::parse_type(g, ty)?;
    t.check(g)?;
    let degree = t.degree();
    let twisted = t.twist(bp, -degree);
    let q = os_parameter(g, h, degree, bp, &t)?;
    let r = stability::classify(g, h, &t);
    let mut per_vertex = serde_json::Map::new();
    for v in 0..g.num_vertices() {
        let eps = epsilon_for_quasistability(g, h, degree, v)?;
        let qv = os_parameter_v_with(g, h, degree, bp, v, &t, eps)?;
        per_vertex.insert(
            g.vertex(v).id.clone(),
            json!({
                "q": vertex_map(g, &qv.q),
                "epsilon": qv.epsilon.as_ref().map(rational::format),
                "os_stable": os_is_stable(g, &qv, &twisted)?,
                "quasistable": r.quasistable_for.contains(&v),
            }),
        );
    }
    Ok(json!({
        "type": ctx.ty(&t),
        "twisted": ctx.ty(&twisted),
        "q": vertex_map(g, &q.q),
        "os_semistable": os_is_semistable(g, &q, &twisted)?,
        "os_stable": os_is_stable(g, &q, &twisted)?,
        "semistable": r.semistable,
        "stable": r.stable,
        "quasistability": per_vertex,
    }))
}

fn decompose(ctx: &Ctx, mode: ModeArg, draw: bool, out: Option<&Path>) -> Result<Value> {
    let d = ctx.decompose(ctx.kind(mode)?, ctx.spec.degree)?;
    let mut v = io::decomposition_to_json(&d);
    v["validation"] = json!(if d.report.passed() { "PASS" } else { "FAIL" });
    if draw {
        let picture = svg::decomposition_svg(&d)?;
        match out {
            Some(p) => std::fs::write(p.with_extension("svg"), picture)?,
            None => v["svg"] = json!(picture),
        }
    }
    Ok(v)
}

fn parse_point(text: &str, n: usize) -> Result<Vec<Rational>> {
    let bad = |m: String| Error::input(Code::Rational, m);
    let v: Vec<Value> = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if v.len() != n {
        return Err(bad(format!(
            "point has {} coordinates, the torus has dimension {n}",
            v.len()
        )));
    }
    v.iter()
        .map(|x| {
            x.as_str()
                .and_then(rational::parse)
                .or_else(|| x.as_i64().map(rational::int))
                .ok_or_else(|| bad(format!("{x} is not an exact rational")))
        })
        .collect()
}

fn locate(ctx: &Ctx, mode: ModeArg, divisor: Option<&str>, point: Option<&str>) -> Result<Value> {
    let g = ctx.g();
    let (p, degree, query) = match (divisor, point) {
        (Some(text), _) => {
            let d = io::parse_divisor(g, text)?;
            let degree = d.degree();
            (None, degree, Some(d))
        }
        (None, Some(text)) => (Some(text), ctx.spec.degree, None),
        (None, None) => return Err(Error::input(Code::Divisor, "give --divisor or --point")),
    };
    let dec = ctx.decompose(ctx.kind(mode)?, degree)?;
    let at = match (&query, p) {
        (Some(d), _) => dec.lattice.abel_jacobi(g, ctx.spec.basepoint, d)?,
        (None, Some(text)) => parse_point(text, dec.dim())?,
        _ => unreachable!(),
    };
    let loc = dec.locate_point(&at)?;
    let mut v = json!({
        "point": rats(&at),
        "type": ctx.ty(&loc.label),
        "parameters": rats(&loc.parameters),
        "shift": loc.shift.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
        "witness": io::divisor_to_json(g, &loc.witness),
        "unique_witness": dec.has_unique_witness(&at),
    });
    if let Some(d) = &query {
        v["equivalent"] = json!(namikawa::reduce::is_equivalent(g, d, &loc.witness)?);
    }
    Ok(v)
}

fn refine(ctx: &Ctx) -> Result<Value> {
    let qs = ctx.decompose(Kind::Quasistable(ctx.section), ctx.spec.degree)?;
    let ps = ctx.decompose(Kind::Polystable, ctx.spec.degree)?;
    let r = refinement_map(&qs, &ps)?;
    Ok(json!({
        "map": r.map.iter().enumerate().map(|(i, (j, k))| json!({
            "qs": ctx.ty(&qs.cells[i].label),
            "ps": ctx.ty(&ps.cells[*j].label),
            "shift": k.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "grade_agreements": r.grade_agreements,
        "grade_disagreements": r.grade_disagreements.iter().map(|(a, b, c)| json!({
            "qs": ctx.ty(a), "graded": ctx.ty(b), "image": ctx.ty(c),
        })).collect::<Vec<_>>(),
        "ps_poset": face_poset(&ps).edges,
    }))
}

fn breakdiv(ctx: &Ctx, divisor: Option<&str>, ty: Option<&str>) -> Result<Value> {
    let g = ctx.g();
    let t = match (divisor, ty) {
        (Some(text), _) => {
            let v: Value = serde_json::from_str(text).map_err(|e| Error::input(Code::Divisor, e.to_string()))?;
            io::type_from_json(g, &json!({"S": [], "d": v})).map_err(|e| Error::input(Code::Divisor, e.to_string()))?
        }
        (None, Some(text)) => io::parse_type(g, text)?,
        (None, None) => return Err(Error::input(Code::Divisor, "give --divisor or --type")),
    };
    let ineq = breakdiv::is_break_divisor_ineq(g, &t.s, &t.d)?;
    let (rest, old) = g.delete_edges(&t.s);
    let tree = if rest.is_connected() {
        let check = breakdiv::is_break_divisor_tree(&rest, &t.d)?;
        let witness = check.witness.map(|w| {
            json!({
                "tree": w.tree.iter().map(|e| g.edge(old[e]).id.clone()).collect::<Vec<_>>(),
                "assignment": w.assignment.iter().map(|(e, v)| json!([g.edge(old[*e]).id, g.vertex(*v).id])).collect::<Vec<_>>(),
            })
        });
        json!({"is_break": check.is_break, "witness": witness, "reason": check.reason})
    } else {
        json!({"is_break": false, "witness": Value::Null, "reason": "G - S is disconnected"})
    };
    Ok(json!({"type": ctx.ty(&t), "inequalities": ineq, "spanning_tree": tree}))
}

fn emit(v: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n";
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let c = &cli.common;
    let out = c.out.as_deref();
    let (value, ok) = match &cli.command {
        Command::Classify { problem, ty } => (classify(&Ctx::load(problem, c)?, ty)?, true),
        Command::Grade { problem, ty } => (grade(&Ctx::load(problem, c)?, ty)?, true),
        Command::Enumerate { problem, mode } => (enumerate(&Ctx::load(problem, c)?, *mode)?, true),
        Command::OsTranslate { problem, ty } => (os_translate(&Ctx::load(problem, c)?, ty)?, true),
        Command::Decompose { problem, mode, svg } => {
            let v = decompose(&Ctx::load(problem, c)?, *mode, *svg, out)?;
            let ok = v["validation"] == "PASS";
            (v, ok)
        }
        Command::Locate {
            problem,
            mode,
            divisor,
            point,
        } => {
            let v = locate(&Ctx::load(problem, c)?, *mode, divisor.as_deref(), point.as_deref())?;
            (v, true)
        }
        Command::Refine { problem } => (refine(&Ctx::load(problem, c)?)?, true),
        Command::Breakdiv { problem, divisor, ty } => (
            breakdiv(&Ctx::load(problem, c)?, divisor.as_deref(), ty.as_deref())?,
            true,
        ),
        Command::Verify { problem, samples } => {
            let ctx = Ctx::load(problem, c)?;
            let options = VerifyOptions {
                seed: c.seed,
                samples: *samples,
                ..Default::default()
            };
            let r = verify(&ctx.spec, &options)?;
            let ok = r.passed();
            (json!({"passed": ok, "checks": r.checks}), ok)
        }
    };
    emit(&value, out)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("{}", json!({"error": e.code(), "message": e.to_string()}));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
