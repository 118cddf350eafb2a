use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use ricci_core::curvature::{lagrange_residual, ricci, PrescribedTensor};
use ricci_core::exec::Execution;
use ricci_core::optimizer::{certify_maximum, maximize_on_manifold, OptOptions, OptResult, Target};
use ricci_core::oracle::{self, derive_pair};
use ricci_core::pair::{
    catalog, lookup, validate_pair, BuiltinFamily, ClassicalFamily, SymmetricPairSpec,
};
use ricci_core::scalar::{format_rational, parse_number_list, Number, Scalar};
use ricci_core::scaled::{
    classify_m0, simple_k_count, solve_scaled_all, sufficient_conditions, CubicAnalysis,
    ScanOptions,
};
use ricci_core::scan::{scan, write_csv, Grid, ScanRequest};
use ricci_core::{solve_exact, Error, Metric};

const EXIT_USAGE: u8 = 2;
const EXIT_NO_SOLUTION: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser)]
#[command(
    name = "ricci",
    version,
    about = "Prescribed Ricci curvature on non-compact simple Lie groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the pair catalog or derive a pair from a matrix model.
    #[command(subcommand)]
    Pairs(PairsCommand),
    /// Solve Ricci(g) = T or Ricci(g) = cT.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Critical points of the scalar curvature on tr_g T = 0.
    Classify(SolveArgs),
    /// Sweep (T1, T2) and write CSV.
    Scan(ScanArgs),
    /// Maximise the scalar curvature on tr_g T = -1, 0 or 1.
    Optimize(OptimizeArgs),
    /// Cross-check closed forms against the matrix models.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum PairsCommand {
    List,
    Show {
        name: String,
    },
    Derive {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Su,
    So,
}

impl From<Family> for ClassicalFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Su => ClassicalFamily::Su,
            Family::So => ClassicalFamily::So,
        }
    }
}

#[derive(Subcommand)]
enum SolveCommand {
    Exact {
        #[command(flatten)]
        args: SolveArgs,
        /// Defaults to 0 for rational input and 1e-9 otherwise.
        #[arg(long)]
        tol: Option<f64>,
    },
    Scaled(SolveArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Catalog name, su_P_Q / so_P_Q, or a JSON file.
    #[arg(long)]
    pair: String,
    /// Tp,T1,...,Tk as integers, p/q rationals or decimals.
    #[arg(long = "T", allow_hyphen_values = true)]
    t: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    pair: String,
    #[arg(long = "Tp")]
    tp: String,
    /// a:b:steps, inclusive.
    #[arg(long = "T1")]
    t1: String,
    #[arg(long = "T2")]
    t2: String,
    /// Fixed T3 for pairs with three ideals.
    #[arg(long = "T3")]
    t3: Option<String>,
    #[arg(long)]
    classify: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Manifold {
    Plus,
    Minus,
    Zero,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    pair: String,
    #[arg(long = "T", allow_hyphen_values = true)]
    t: String,
    #[arg(long, value_enum)]
    manifold: Manifold,
    /// Overrides RICCI_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Random samples for the certification of the maximum.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// A pair id or `all`.
    #[arg(long)]
    pair: String,
    #[arg(long, default_value_t = 20)]
    metrics: usize,
}

enum Failure {
    Error(Error),
    Exit(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(Error::Io(e))
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Pairs(cmd) => cmd_pairs(cmd),
        Command::Solve(SolveCommand::Exact { args, tol }) => cmd_solve_exact(&args, tol),
        Command::Solve(SolveCommand::Scaled(args)) => cmd_solve_scaled(&args),
        Command::Classify(args) => cmd_classify(&args),
        Command::Scan(args) => cmd_scan(&args),
        Command::Optimize(args) => cmd_optimize(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Exit(code)) => ExitCode::from(code),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoFeasiblePoint(_) => EXIT_INFEASIBLE,
        _ => EXIT_USAGE,
    }
}

fn resolve_pair(id: &str) -> Result<SymmetricPairSpec, Error> {
    if id.ends_with(".json") || Path::new(id).is_file() {
        return SymmetricPairSpec::from_json_file(id);
    }
    for (prefix, family) in [("su_", ClassicalFamily::Su), ("so_", ClassicalFamily::So)] {
        if let Some(rest) = id.strip_prefix(prefix) {
            let parsed = rest
                .split_once('_')
                .and_then(|(p, q)| Some((p.parse().ok()?, q.parse().ok()?)));
            if let Some((p, q)) = parsed {
                return Ok(derive_pair(family, p, q)?.spec);
            }
        }
    }
    lookup(id)
}

/// Tensor in exact mode when every entry is rational.
enum Tensor {
    Exact(PrescribedTensor<BigRational>),
    Float(PrescribedTensor<f64>),
}

impl Tensor {
    fn parse(s: &str) -> Result<(Self, Vec<Number>), Error> {
        let nums = parse_number_list(s)?;
        if nums.len() < 2 {
            return Err(Error::Parse("T needs Tp and at least one T_i".into()));
        }
        let exact: Option<Vec<BigRational>> = nums.iter().map(|n| n.as_exact().cloned()).collect();
        let tensor = match exact {
            Some(v) => Tensor::Exact(PrescribedTensor::new(v[0].clone(), v[1..].to_vec())?),
            None => {
                let v: Vec<f64> = nums.iter().map(Number::to_f64).collect();
                Tensor::Float(PrescribedTensor::new(v[0], v[1..].to_vec())?)
            }
        };
        Ok((tensor, nums))
    }

    fn to_f64(&self) -> PrescribedTensor<f64> {
        match self {
            Tensor::Exact(t) => t.to_f64(),
            Tensor::Float(t) => t.clone(),
        }
    }

    fn mode(&self) -> &'static str {
        match self {
            Tensor::Exact(_) => "exact",
            Tensor::Float(_) => "float",
        }
    }
}

fn t_json(nums: &[Number]) -> Value {
    json!(nums.iter().map(Number::to_string).collect::<Vec<_>>())
}

fn print_json(v: &Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::other)?;
    writeln!(out)
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn spec_summary(spec: &SymmetricPairSpec) -> String {
    let ideals: Vec<String> = spec
        .ideals
        .iter()
        .map(|i| {
            let tag = if i.center { " center" } else { "" };
            format!("({}, {}{tag})", i.d, format_rational(&i.kappa))
        })
        .collect();
    format!(
        "{}: n={} r={} s={} ideals=[{}]",
        spec.name,
        spec.n,
        spec.r,
        spec.s,
        ideals.join(", ")
    )
}

fn cmd_pairs(cmd: PairsCommand) -> CmdResult {
    match cmd {
        PairsCommand::List => {
            let mut out = io::stdout().lock();
            for family in catalog() {
                let spec = ricci_core::builtin_pair(family)?;
                writeln!(out, "{}", spec_summary(&spec))?;
            }
        }
        PairsCommand::Show { name } => {
            let spec = resolve_pair(&name)?;
            println!("{}", spec.to_json()?);
        }
        PairsCommand::Derive { family, p, q } => {
            let derived = derive_pair(family.into(), p, q)?;
            let spec: Value =
                serde_json::from_str(&derived.spec.to_json()?).map_err(Error::from)?;
            print_json(&json!({
                "spec": spec,
                "kappa_numeric": derived.kappa_numeric,
                "rounding_residual": derived.rounding_residual,
            }))?;
        }
    }
    Ok(())
}

fn solution_json(c: f64, g: &Metric<f64>, residual: f64) -> Value {
    json!({ "c": c, "beta": g.beta(), "alphas": g.alphas(), "residual": residual })
}

fn cmd_solve_exact(args: &SolveArgs, tol: Option<f64>) -> CmdResult {
    let spec = resolve_pair(&args.pair)?;
    let (tensor, nums) = Tensor::parse(&args.t)?;
    let report = match &tensor {
        Tensor::Exact(t) => solve_exact(&spec, t, tol.unwrap_or(0.0))?,
        Tensor::Float(t) => solve_exact(
            &spec,
            t,
            tol.unwrap_or(ricci_core::exact::DEFAULT_TOLERANCE),
        )?,
    };
    let solutions: Vec<Value> = report
        .solution
        .iter()
        .map(|g| solution_json(1.0, g, report.tp_residual.map_or(f64::NAN, f64::abs)))
        .collect();
    if args.json {
        print_json(&json!({
            "pair": spec.name,
            "T": t_json(&nums),
            "mode": tensor.mode(),
            "solutions": solutions,
            "report": report,
        }))?;
    } else {
        let mut out = io::stdout().lock();
        writeln!(out, "pair {} ({} mode)", spec.name, tensor.mode())?;
        writeln!(out, "positivity_ok {:?}", report.positivity_ok)?;
        match report.tp_residual {
            Some(r) => writeln!(out, "tp_residual {r}")?,
            None => writeln!(out, "tp_residual undefined (4 T_i - kappa_i < 0)")?,
        }
        match &report.solution {
            Some(g) => writeln!(
                out,
                "solution beta={} alphas={}",
                g.beta(),
                fmt_list(g.alphas())
            )?,
            None => writeln!(out, "no solution")?,
        }
    }
    if report.solution.is_none() {
        return Err(Failure::Exit(EXIT_NO_SOLUTION));
    }
    Ok(())
}

fn cmd_solve_scaled(args: &SolveArgs) -> CmdResult {
    let spec = resolve_pair(&args.pair)?;
    let (tensor, nums) = Tensor::parse(&args.t)?;
    let t = tensor.to_f64();
    let rep = solve_scaled_all(&spec, &t, &ScanOptions::default())?;
    let simple_k = if (spec.r, spec.s) == (1, 0) {
        Some(match &tensor {
            Tensor::Exact(t) => simple_k_count(&spec, t)?,
            Tensor::Float(t) => simple_k_count(&spec, t)?,
        })
    } else {
        None
    };
    let sufficiency = match &tensor {
        Tensor::Exact(t) => sufficient_conditions(&spec, t)?,
        Tensor::Float(t) => sufficient_conditions(&spec, t)?,
    };
    let mut solutions = Vec::new();
    for s in &rep.solutions {
        let fit = lagrange_residual(&spec, &s.metric, &t)?;
        solutions.push(solution_json(s.c, &s.metric, fit.residual));
    }
    if args.json {
        print_json(&json!({
            "pair": spec.name,
            "T": t_json(&nums),
            "mode": tensor.mode(),
            "solutions": solutions,
            "report": {
                "c_min": rep.c_min,
                "c_max": rep.c_max,
                "tangential": rep.solutions.iter().map(|s| s.tangential).collect::<Vec<_>>(),
                "warnings": rep.warnings,
                "simple_k": simple_k,
                "sufficiency": sufficiency,
            },
        }))?;
    } else {
        let mut out = io::stdout().lock();
        writeln!(out, "pair {} ({} mode)", spec.name, tensor.mode())?;
        if rep.solutions.is_empty() {
            writeln!(out, "no solutions")?;
        } else {
            writeln!(out, "{} solution(s)", rep.solutions.len())?;
        }
        for s in &rep.solutions {
            let tag = if s.tangential { " (double root)" } else { "" };
            writeln!(
                out,
                "c={} beta=1 alphas={} f_residual={:e}{tag}",
                s.c,
                fmt_list(s.metric.alphas()),
                s.f_residual
            )?;
        }
        for w in &rep.warnings {
            writeln!(out, "{w}")?;
        }
        if let Some(k) = simple_k {
            writeln!(out, "simple_k_count {} (E = {})", k.count, k.e)?;
        }
        writeln!(
            out,
            "cond_zero {} cond_inf {}",
            sufficiency.cond_zero, sufficiency.cond_inf
        )?;
    }
    if rep.solutions.is_empty() {
        return Err(Failure::Exit(EXIT_NO_SOLUTION));
    }
    Ok(())
}

fn analysis_json<S: Scalar>(an: &CubicAnalysis<S>, show: impl Fn(&S) -> Value) -> Value {
    json!({
        "mode": an.mode,
        "a3": show(&an.a3),
        "a2": show(&an.a2),
        "a1": show(&an.a1),
        "a0": show(&an.a0),
        "disc": show(&an.disc),
        "Rt": an.rt.as_ref().map(&show),
        "Rd": an.rd.as_ref().map(&show),
        "Rs": an.rs.as_ref().map(&show),
        "threshold": show(&an.threshold),
        "classification": an.classification,
    })
}

fn cmd_classify(args: &SolveArgs) -> CmdResult {
    let spec = resolve_pair(&args.pair)?;
    let (tensor, nums) = Tensor::parse(&args.t)?;
    let analysis = match &tensor {
        Tensor::Exact(t) => analysis_json(&classify_m0(&spec, t)?, |x| json!(format_rational(x))),
        Tensor::Float(t) => analysis_json(&classify_m0(&spec, t)?, |x| json!(x)),
    };
    if args.json {
        print_json(&json!({
            "pair": spec.name,
            "T": t_json(&nums),
            "mode": tensor.mode(),
            "report": analysis,
        }))?;
    } else {
        let mut out = io::stdout().lock();
        writeln!(out, "pair {} ({} mode)", spec.name, tensor.mode())?;
        if let Value::Object(map) = &analysis {
            for key in [
                "a3",
                "a2",
                "a1",
                "a0",
                "disc",
                "Rt",
                "Rd",
                "Rs",
                "threshold",
                "classification",
            ] {
                let v = &map[key];
                let shown = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                writeln!(out, "{key} {shown}")?;
            }
        }
    }
    Ok(())
}

fn cmd_scan(args: &ScanArgs) -> CmdResult {
    let spec = resolve_pair(&args.pair)?;
    let tp = args.tp.parse::<Number>()?.to_f64();
    let rest = match &args.t3 {
        Some(s) => vec![s.parse::<Number>()?.to_f64()],
        None => Vec::new(),
    };
    let req = ScanRequest {
        tp,
        t1: args.t1.parse::<Grid>()?,
        t2: args.t2.parse::<Grid>()?,
        rest,
        classify: args.classify,
        execution: Execution::default(),
    };
    let cells = scan(&spec, &req)?;
    write_csv(&cells, io::stdout().lock())?;
    Ok(())
}

fn seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("RICCI_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("RICCI_SEED is not an integer: {v:?}"))),
        Err(_) => Ok(OptOptions::default().seed),
    }
}

fn opt_json(r: &OptResult) -> Value {
    json!({
        "status": r.status,
        "converged": r.converged,
        "s_value": r.s_value,
        "iterations": r.iterations,
        "restarts_used": r.restarts_used,
        "basins": r.basins,
    })
}

fn cmd_optimize(args: &OptimizeArgs) -> CmdResult {
    let spec = resolve_pair(&args.pair)?;
    let (tensor, nums) = Tensor::parse(&args.t)?;
    let t = tensor.to_f64();
    let target = match args.manifold {
        Manifold::Plus => Target::Plus,
        Manifold::Minus => Target::Minus,
        Manifold::Zero => Target::Zero,
    };
    let seed = seed(args.seed)?;
    let opts = OptOptions {
        seed,
        restarts: args.restarts,
        ..OptOptions::default()
    };
    let r = maximize_on_manifold(&spec, &t, target, &opts)?;
    let certified = if r.converged {
        Some(certify_maximum(&spec, &t, &r, args.samples, seed)?)
    } else {
        None
    };
    if args.json {
        let mut report = opt_json(&r);
        report["certified"] = json!(certified);
        print_json(&json!({
            "pair": spec.name,
            "T": t_json(&nums),
            "mode": "float",
            "solutions": [solution_json(r.c_estimate, &r.metric, r.residual)],
            "report": report,
        }))?;
    } else {
        let mut out = io::stdout().lock();
        writeln!(
            out,
            "pair {} manifold tr_g T = {}",
            spec.name,
            target.value()
        )?;
        writeln!(out, "status {:?} (converged: {})", r.status, r.converged)?;
        writeln!(
            out,
            "metric beta={} alphas={}",
            r.metric.beta(),
            fmt_list(r.metric.alphas())
        )?;
        writeln!(out, "S {}", r.s_value)?;
        writeln!(out, "c_estimate {}", r.c_estimate)?;
        writeln!(out, "residual {:e}", r.residual)?;
        writeln!(
            out,
            "iterations {} restarts {}",
            r.iterations, r.restarts_used
        )?;
        writeln!(out, "basins {}", r.basins.len())?;
        match certified {
            Some(c) => writeln!(out, "certified {c} ({} samples)", args.samples)?,
            None => writeln!(out, "certified skipped (not converged)")?,
        }
    }
    if !r.converged {
        return Err(Failure::Exit(EXIT_NO_SOLUTION));
    }
    Ok(())
}

struct CheckLine {
    pair: String,
    check: &'static str,
    ok: Option<bool>,
    detail: String,
}

fn verify_pair(id: &str, metrics: usize, seed: u64) -> Result<Vec<CheckLine>, Error> {
    let spec = resolve_pair(id)?;
    let mut lines = Vec::new();
    let mut line = |check, ok: Option<bool>, detail: String| {
        lines.push(CheckLine {
            pair: spec.name.clone(),
            check,
            ok,
            detail,
        })
    };
    let valid = validate_pair(spec.clone()).is_ok();
    line("trace identity (exact)", Some(valid), String::new());

    let model = BuiltinFamily::from_name(&spec.name)
        .and_then(|f| f.matrix_model())
        .or_else(|| classical_id(&spec.name));
    let Some((family, p, q)) = model.filter(|&(_, p, q)| p + q <= oracle::MAX_SIZE) else {
        line(
            "matrix model",
            None,
            "skipped: no matrix model in range".into(),
        );
        return Ok(lines);
    };
    let alg = oracle::build_algebra(family, p, q)?;
    let kappa = oracle::kappa_numeric(&alg)?;
    let expected: Vec<f64> = spec.ideals.iter().map(|i| i.kappa.to_f64()).collect();
    let kappa_dev = kappa
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    line(
        "kappa oracle",
        Some(kappa.len() == expected.len() && kappa_dev <= 1e-9),
        format!(
            "numeric {} vs {} (max dev {kappa_dev:e})",
            fmt_list(&kappa),
            fmt_list(&expected)
        ),
    );

    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..metrics {
        let beta = (rng.gen_range(-2.0f64..2.0)).exp();
        let alphas: Vec<f64> = (0..spec.ideal_count())
            .map(|_| rng.gen_range(-2.0f64..2.0).exp())
            .collect();
        let g = Metric::new(beta, alphas)?;
        let num = oracle::ricci_numeric(&alg, &g)?;
        let closed = ricci(&spec, &g)?;
        worst = worst.max((num.ric_p - closed.ric_p).abs());
        for (a, b) in num.ric_k.iter().zip(&closed.ric_k) {
            worst = worst.max((a - b).abs());
        }
    }
    line(
        "ricci oracle",
        Some(worst <= 1e-8),
        format!("{metrics} metrics, max dev {worst:e}"),
    );
    let a = oracle::a_forms_check(&alg)?;
    line(
        "A_j forms",
        Some(a.passed),
        format!(
            "traces {} sum dev {:e}",
            fmt_list(&a.traces),
            a.sum_deviation
        ),
    );
    Ok(lines)
}

fn classical_id(name: &str) -> Option<(ClassicalFamily, u32, u32)> {
    let (family, rest) = if let Some(r) = name.strip_prefix("su_") {
        (ClassicalFamily::Su, r)
    } else {
        (ClassicalFamily::So, name.strip_prefix("so_")?)
    };
    let (p, q) = rest.split_once('_')?;
    Some((family, p.parse().ok()?, q.parse().ok()?))
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let ids: Vec<String> = if args.pair == "all" {
        catalog().iter().map(BuiltinFamily::name).collect()
    } else {
        vec![args.pair.clone()]
    };
    let seed = seed(None)?;
    let mut all_ok = true;
    let mut out = io::stdout().lock();
    writeln!(out, "{:<16} {:<24} {:<6} detail", "pair", "check", "result")?;
    for id in &ids {
        for l in verify_pair(id, args.metrics, seed)? {
            let status = match l.ok {
                Some(true) => "pass",
                Some(false) => {
                    all_ok = false;
                    "FAIL"
                }
                None => "skip",
            };
            writeln!(
                out,
                "{:<16} {:<24} {:<6} {}",
                l.pair, l.check, status, l.detail
            )?;
        }
    }
    writeln!(
        out,
        "{}",
        if all_ok {
            "all checks passed"
        } else {
            "verification failed"
        }
    )?;
    if !all_ok {
        return Err(Failure::Exit(EXIT_VERIFY));
    }
    Ok(())
}
