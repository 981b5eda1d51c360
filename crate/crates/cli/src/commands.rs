use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};
use uniformity_core::algebra::{FpVector, Modulus, QuadraticForm};
use uniformity_core::counting::{average_product_direct, average_product_dual, solution_probability, CountMethod, ORACLE_TOLERANCE};
use uniformity_core::functions::{
    balanced, norm_report, norm_report_exact, random_bounded_complex, random_bounded_real, uk_power_direct, FunctionFile,
    GroupDomain, GroupFunction, IndicatorSet, LoadedFunction, NormMethod,
};
use uniformity_core::hypergraph::{lift, octahedral_power, vertex_uniformity_counterexample};
use uniformity_core::sample::{random_factor, random_quadratic_form, random_vector};
use uniformity_core::systems::{LinearFormSystem, SystemFile, BUILTIN_SYSTEMS};
use uniformity_core::verification::{
    atom_distribution, quadratic_zero_set, verify_badex, verify_bound1, verify_completefactor, verify_gauss,
    verify_gvn, verify_projection_lemmas, verify_pythagoras, verify_quadfactor, Check, ExperimentReport,
    QuadraticMap, Relation,
};
use uniformity_core::{Budget, Error};

use crate::args::{Cli, Command, CountMethodArg, Experiment, FunctionInput, NormMethodArg, OctahedronCheck};
use crate::envelope::{Failure, Report};

/// Absolute tolerance for the lift identity.
const LIFT_TOLERANCE: f64 = 1e-9;

struct Ctx<'a> {
    cli: &'a Cli,
    p: Modulus,
    budget: Budget,
}

/// Runs the command, prints its output and writes the report. Returns the
/// overall verdict.
pub fn run(cli: &Cli) -> Result<bool, Failure> {
    let ctx = Ctx {
        cli,
        p: Modulus::new(cli.common.p)?,
        budget: Budget::new(cli.common.budget)?,
    };
    let (results, text) = match &cli.command {
        Command::Complexity => complexity(&ctx)?,
        Command::Independence { k } => independence(&ctx, *k)?,
        Command::NormalForm { s } => normal_form(&ctx, *s)?,
        Command::Norm { input, k, method } => (vec![norm(&ctx, input, *k, *method)?], None),
        Command::Count { input, method } => (vec![count(&ctx, input, *method)?], None),
        Command::Verify {
            experiment,
            trials,
            d1,
            d2,
        } => (verify(&ctx, *experiment, *trials, *d1, *d2)?, None),
        Command::Octahedron { size, check } => (vec![octahedron(&ctx, *size, *check)?], None),
        Command::List { csv } => list(&ctx, *csv)?,
    };
    let report = Report::new(config_echo(cli)?, results);
    match text {
        Some(t) => print!("{t}"),
        None => print!("{}", report.to_json()),
    }
    if let Some(path) = &cli.common.out {
        report.write(path)?;
    }
    Ok(report.pass)
}

fn config_echo(cli: &Cli) -> Result<Value, Failure> {
    let mut map = Map::new();
    if let Value::Object(m) = serde_json::to_value(&cli.command)? {
        map.extend(m);
    }
    if let Value::Object(m) = serde_json::to_value(&cli.common)? {
        map.extend(m);
    }
    // Budgets beyond u64 are kept as strings.
    map.insert(
        "budget".into(),
        u64::try_from(cli.common.budget).map_or_else(|_| Value::String(cli.common.budget.to_string()), Value::from),
    );
    Ok(Value::Object(map))
}

fn to_value(v: impl Serialize) -> Result<Value, Failure> {
    Ok(serde_json::to_value(v)?)
}

fn load_system(ctx: &Ctx, default: &str) -> Result<LinearFormSystem, Failure> {
    let name = ctx.cli.common.system.as_deref().unwrap_or(default);
    if BUILTIN_SYSTEMS.contains(&name) {
        return Ok(LinearFormSystem::builtin(name, ctx.p)?);
    }
    let text = std::fs::read_to_string(name).map_err(|e| {
        Failure::parse(format!("`{name}` is neither a built-in system ({}) nor a readable file: {e}", BUILTIN_SYSTEMS.join(", ")))
    })?;
    let file: SystemFile = serde_json::from_str(&text).map_err(|e| Failure::parse(format!("{name}: {e}")))?;
    if file.p != ctx.p.get() {
        return Err(Failure::parse(format!("{name} is over F_{}, but --p is {}", file.p, ctx.p.get())));
    }
    Ok(LinearFormSystem::from_file(&file)?)
}

fn load_function_file(path: &Path) -> Result<LoadedFunction, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let file: FunctionFile =
        serde_json::from_str(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    Ok(file.load()?)
}

fn load_set(ctx: &Ctx, spec: &str) -> Result<IndicatorSet, Failure> {
    if spec == "quadzero" {
        return Ok(quadratic_zero_set(ctx.p, ctx.cli.common.n)?);
    }
    match load_function_file(Path::new(spec))? {
        LoadedFunction::Indicator(a) => Ok(a),
        _ => Err(Failure::parse(format!("{spec}: expected a file of mode indicator"))),
    }
}

fn complexity(ctx: &Ctx) -> Result<(Vec<Value>, Option<String>), Failure> {
    let sys = load_system(ctx, "ap4")?;
    let cs = sys.cs_complexity()?;
    let result = json!({
        "name": "complexity",
        "system": sys.to_file(),
        "cs_complexity": cs,
        "pass": true,
    });
    Ok((vec![result], Some(format!("{cs}\n"))))
}

fn independence(ctx: &Ctx, k: usize) -> Result<(Vec<Value>, Option<String>), Failure> {
    let sys = load_system(ctx, "ap4")?;
    let independent = sys.power_independence(k)?;
    let conjectured = match sys.conjectured_true_complexity() {
        Ok(t) => Value::from(t),
        Err(Error::NoIndependentPower { .. }) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let result = json!({
        "name": "independence",
        "system": sys.to_file(),
        "k": k,
        "independent": independent,
        "conjectured_true_complexity": conjectured,
        "maximal_square_independent_subsystem": sys.maximal_square_independent_subsystem(),
        "pass": true,
    });
    Ok((vec![result], Some(format!("{independent}\n"))))
}

fn normal_form(ctx: &Ctx, s: usize) -> Result<(Vec<Value>, Option<String>), Failure> {
    let sys = load_system(ctx, "nf4")?;
    let witness = sys.normal_form_check(s);
    let result = json!({
        "name": "normal-form",
        "system": sys.to_file(),
        "s": s,
        "in_normal_form": witness.is_some(),
        "witness": witness,
        "pass": true,
    });
    Ok((vec![result], Some(format!("{}\n", witness.is_some()))))
}

fn norm(ctx: &Ctx, input: &FunctionInput, k: usize, method: NormMethodArg) -> Result<Value, Failure> {
    let method = match method {
        NormMethodArg::Direct => NormMethod::Direct,
        NormMethodArg::Derivative => NormMethod::Derivative,
        NormMethodArg::Fourier => NormMethod::Fourier,
        NormMethodArg::Exact => NormMethod::Exact,
    };
    let loaded = match (&input.set, input.function.as_slice()) {
        (Some(spec), []) => LoadedFunction::Indicator(load_set(ctx, spec)?),
        (None, [path]) => load_function_file(path)?,
        _ => return Err(Failure::parse("norm needs exactly one of --set or --function")),
    };
    let report = match (&loaded, method) {
        (LoadedFunction::Rational(f), NormMethod::Exact) => norm_report_exact(f, k, ctx.budget)?,
        _ => norm_report(&loaded.to_float(), k, method, ctx.budget)?,
    };
    let mut v = to_value(&report)?;
    v["name"] = Value::from("norm");
    v["pass"] = Value::from(report.value.is_finite());
    Ok(v)
}

fn count(ctx: &Ctx, input: &FunctionInput, method: CountMethodArg) -> Result<Value, Failure> {
    let sys = load_system(ctx, "ap3")?;
    let method = match method {
        CountMethodArg::Direct => CountMethod::Direct,
        CountMethodArg::Dual => CountMethod::Dual,
        CountMethodArg::Both => CountMethod::Both,
    };
    if let Some(spec) = &input.set {
        let a = load_set(ctx, spec)?;
        let mut report = solution_probability(&sys, &a, method, ctx.budget)?;
        let independent = sys.is_square_independent();
        if spec == "quadzero" && independent {
            let n = a.domain().dim() as f64;
            report = report.with_bound((ctx.p.get() as f64).powf(-n / 2.0));
        }
        let mut v = to_value(&report)?;
        v["name"] = Value::from("count");
        v["system"] = to_value(sys.to_file())?;
        v["square_independent"] = Value::from(independent);
        v["consistent"] = Value::from(report.is_consistent());
        v["pass"] = Value::from(report.passed() && report.is_consistent());
        return Ok(v);
    }
    let fs: Vec<GroupFunction> = input
        .function
        .iter()
        .map(|p| load_function_file(p).map(|f| f.to_float()))
        .collect::<Result<_, _>>()?;
    let fs = match fs.len() {
        0 => return Err(Failure::parse("count needs --set or at least one --function")),
        1 => vec![fs[0].clone(); sys.len()],
        l if l == sys.len() => fs,
        l => return Err(Failure::parse(format!("{l} functions given for {} forms", sys.len()))),
    };
    let direct = match method {
        CountMethod::Direct | CountMethod::Both => Some(average_product_direct(&sys, &fs, ctx.budget)?),
        CountMethod::Dual => None,
    };
    let dual = match method {
        CountMethod::Dual | CountMethod::Both => Some(average_product_dual(&sys, &fs, ctx.budget)?),
        CountMethod::Direct => None,
    };
    let agree = match (direct, dual) {
        (Some(a), Some(b)) => Some((a - b).norm() <= ORACLE_TOLERANCE),
        _ => None,
    };
    let value = direct.or(dual).expect("a method ran");
    Ok(json!({
        "name": "count",
        "system": sys.to_file(),
        "method": method,
        "average": [value.re, value.im],
        "direct": direct.map(|c| [c.re, c.im]),
        "dual": dual.map(|c| [c.re, c.im]),
        "methods_agree": agree,
        "pass": agree.unwrap_or(true),
    }))
}

fn verify(ctx: &Ctx, experiment: Experiment, trials: usize, d1: usize, d2: usize) -> Result<Vec<Value>, Failure> {
    const ALL: [Experiment; 9] = [
        Experiment::Gauss,
        Experiment::Badex,
        Experiment::Gvn,
        Experiment::Atoms,
        Experiment::Quadfactor,
        Experiment::Completefactor,
        Experiment::Projections,
        Experiment::Bound1,
        Experiment::Pythagoras,
    ];
    let list: &[Experiment] = if experiment == Experiment::All { &ALL } else { std::slice::from_ref(&experiment) };
    let mut out = Vec::new();
    for &e in list {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.cli.common.seed);
        for report in experiment_reports(ctx, e, trials.max(1), d1, d2, &mut rng)? {
            if !report.audit() {
                return Err(Failure::parse(format!("report `{}` failed its own audit", report.name)));
            }
            out.push(to_value(&report)?);
        }
    }
    Ok(out)
}

fn experiment_reports(
    ctx: &Ctx,
    e: Experiment,
    trials: usize,
    d1: usize,
    d2: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<ExperimentReport>, Failure> {
    let (p, n, budget) = (ctx.p, ctx.cli.common.n, ctx.budget);
    let domain = GroupDomain::new(p, n)?;
    let mut reports = Vec::new();
    match e {
        Experiment::Gauss => {
            reports.push(verify_gauss(&QuadraticForm::scaled_dot(p, n, 1), budget)?);
            for _ in 0..trials {
                reports.push(verify_gauss(&random_quadratic_form(p, n, true, rng), budget)?);
            }
        }
        Experiment::Badex => {
            let sys = load_system(ctx, "gw6a")?;
            reports.push(verify_badex(&sys, n, CountMethod::Both, budget)?);
        }
        Experiment::Gvn => {
            let sys = load_system(ctx, "ap3")?;
            let k = sys.cs_complexity()?.finite().ok_or(Error::InvalidArgument("system has infinite complexity".into()))?;
            for _ in 0..trials {
                let fs: Vec<_> = (0..sys.len()).map(|_| random_bounded_complex(domain, rng)).collect();
                reports.push(verify_gvn(&sys, &fs, k, budget)?);
            }
        }
        Experiment::Atoms => {
            for _ in 0..trials {
                reports.push(atom_distribution(&random_factor(p, n, d1, d2, rng)?, budget)?);
            }
        }
        Experiment::Quadfactor => {
            let sys = load_system(ctx, "gw6b")?;
            for _ in 0..trials {
                let forms = (0..d2).map(|_| random_quadratic_form(p, n, true, rng)).collect();
                let gamma2 = QuadraticMap::new(p, n, forms)?;
                let bs: Vec<FpVector> = (0..sys.len()).map(|_| random_vector(p, d2, rng)).collect();
                reports.push(verify_quadfactor(&sys, &gamma2, &[], &bs, budget)?);
            }
        }
        Experiment::Completefactor => {
            let sys = load_system(ctx, "gw6b")?;
            for _ in 0..trials {
                let factor = random_factor(p, n, d1, d2, rng)?;
                // Targets read off a random point, so `a` lies in the image.
                let xs: Vec<Vec<u32>> = (0..sys.vars()).map(|_| random_vector(p, n, rng).into_coords()).collect();
                let a: Vec<FpVector> = (0..sys.len())
                    .map(|i| {
                        let y = form_at(&sys, i, &xs, p, n);
                        FpVector::new(p, factor.gamma1().mul_vec(&y))
                    })
                    .collect();
                let b: Vec<FpVector> = (0..sys.len()).map(|_| random_vector(p, d2, rng)).collect();
                reports.push(verify_completefactor(&sys, &factor, &a, &b, budget)?);
            }
        }
        Experiment::Projections => {
            for _ in 0..trials {
                let f = random_bounded_real(domain, rng);
                reports.push(verify_projection_lemmas(&f, &random_factor(p, n, d1, d2, rng)?)?);
            }
        }
        Experiment::Bound1 => {
            let sys = load_system(ctx, "gw6b")?;
            for _ in 0..trials {
                let f = random_bounded_real(domain, rng);
                reports.push(verify_bound1(&f, &random_factor(p, n, d1, d2, rng)?, &sys, budget)?);
            }
        }
        Experiment::Pythagoras => {
            let f = balanced(&quadratic_zero_set(p, n)?).scale(0.5);
            reports.push(verify_pythagoras(&f, 0.5, budget)?);
        }
        Experiment::All => unreachable!("expanded by the caller"),
    }
    Ok(reports)
}

/// `L_i(x_1, …, x_d) ∈ F_p^n`.
fn form_at(sys: &LinearFormSystem, i: usize, xs: &[Vec<u32>], p: Modulus, n: usize) -> Vec<u32> {
    let coeffs = sys.form(i).coeffs().coords();
    (0..n)
        .map(|t| coeffs.iter().zip(xs).fold(0, |acc, (&c, x)| p.add(acc, p.mul(c, x[t]))))
        .collect()
}

fn octahedron(ctx: &Ctx, size: usize, check: OctahedronCheck) -> Result<Value, Failure> {
    let seed = ctx.cli.common.seed;
    match check {
        OctahedronCheck::Counterexample => Ok(to_value(vertex_uniformity_counterexample(seed, size, ctx.budget)?)?),
        OctahedronCheck::Lift => {
            let domain = GroupDomain::new(ctx.p, ctx.cli.common.n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_bounded_complex(domain, &mut rng);
            let lifted = lift(&g);
            let oct = octahedral_power(&lifted, ctx.budget)?;
            let u3 = uk_power_direct(&g, 3, ctx.budget)?;
            let mut rep = ExperimentReport::new("lift");
            rep.param("p", ctx.p.get()).param("n", domain.dim()).param("seed", seed);
            rep.observe("octahedral_8", oct).observe("u3_8", u3);
            rep.check(Check::float("octahedral norm of the lift equals U3", oct, Relation::Eq, u3, LIFT_TOLERANCE));
            Ok(to_value(rep)?)
        }
    }
}

#[derive(Serialize)]
struct CatalogRow {
    name: &'static str,
    m: Option<usize>,
    d: Option<usize>,
    cs_complexity: Option<String>,
    square_independent: Option<bool>,
    conjectured_true_complexity: Option<usize>,
    error: Option<String>,
}

fn list(ctx: &Ctx, csv: bool) -> Result<(Vec<Value>, Option<String>), Failure> {
    let rows: Vec<CatalogRow> = BUILTIN_SYSTEMS
        .iter()
        .map(|&name| match LinearFormSystem::builtin(name, ctx.p) {
            Ok(sys) => CatalogRow {
                name,
                m: Some(sys.len()),
                d: Some(sys.vars()),
                cs_complexity: sys.cs_complexity().ok().map(|c| c.to_string()),
                square_independent: Some(sys.is_square_independent()),
                conjectured_true_complexity: sys.conjectured_true_complexity().ok(),
                error: None,
            },
            Err(e) => CatalogRow {
                name,
                m: None,
                d: None,
                cs_complexity: None,
                square_independent: None,
                conjectured_true_complexity: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let cell = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    let mut text = String::new();
    if csv {
        text.push_str("name,m,d,cs_complexity,square_independent,conjectured_true_complexity\n");
    } else {
        text.push_str(&format!("{:<6} {:>2} {:>2} {:>3} {:>8} {:>5}\n", "name", "m", "d", "cs", "sq-indep", "true"));
    }
    for r in &rows {
        let fields = [
            r.name.to_string(),
            cell(r.m.map(|v| v.to_string())),
            cell(r.d.map(|v| v.to_string())),
            cell(r.cs_complexity.clone()),
            cell(r.square_independent.map(|v| v.to_string())),
            cell(r.conjectured_true_complexity.map(|v| v.to_string())),
        ];
        if csv {
            text.push_str(&fields.join(","));
        } else {
            text.push_str(&format!(
                "{:<6} {:>2} {:>2} {:>3} {:>8} {:>5}",
                fields[0], fields[1], fields[2], fields[3], fields[4], fields[5]
            ));
            if let Some(e) = &r.error {
                text.push_str(&format!("  ({e})"));
            }
        }
        text.push('\n');
    }
    let result = json!({ "name": "list", "p": ctx.p.get(), "systems": rows, "pass": true });
    Ok((vec![result], Some(text)))
}
