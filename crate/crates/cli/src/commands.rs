use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use polyjac_core::diagnostics::{instance_report, jacobian_error_estimate};
use polyjac_core::discretize::{assemble, perturbed_start, ProblemKind, ProblemSpec};
use polyjac_core::jacobian::{fd_jacobian, system_jacobian, FdKind, FdScheme};
use polyjac_core::linalg::MAX_EIGEN_ORDER;
use polyjac_core::solvers::{solve as run_solver, Clock, InnerSolver, Method, SolveReport, SolverConfig};
use polyjac_core::{Error, PolySystem, Vector};

use crate::args::{FdArg, Format, InnerArg, JacobianArgs, MethodArg, OutputArgs, SolveArgs, SourceArgs, VerifyArgs};
use crate::formats::{read_config, read_system, write_system, ConfigDoc};
use crate::report::{num, resolve_format, to_json, ComparisonDoc, InstanceDoc, JacobianDoc, SolveDoc, StepDoc};
use crate::suite::{check_orders, random_suite, systems_suite, SuiteReport};
use crate::{Failure, EXIT_FAILURE, EXIT_OK};

const DEFAULT_ORDERS: [f64; 3] = [2.0, 3.0, 1.5];
const DEFAULT_DIMS: [usize; 5] = [1, 2, 4, 8, 16];
const DEFAULT_N: usize = 16;
const DEFAULT_OMEGA: f64 = 1.5;

struct StdClock(Instant);

impl Clock for StdClock {
    fn now_millis(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

enum Origin {
    Problem { kind: ProblemKind, params: BTreeMap<String, f64>, ns: Vec<usize> },
    System(PathBuf),
    Random { dims: Vec<usize> },
}

struct Case {
    label: String,
    sys: PolySystem,
    exact: Option<Vector>,
}

fn parse_param(s: &str) -> Result<(String, f64), Failure> {
    let bad = || Failure::usage(format!("--param expects NAME=VALUE, got '{s}'"));
    let (name, value) = s.split_once('=').ok_or_else(bad)?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    Ok((name.trim().to_string(), value))
}

fn resolve(src: &SourceArgs) -> Result<(ConfigDoc, Origin), Failure> {
    let config = match &src.config {
        Some(p) => read_config(p)?,
        None => ConfigDoc::default(),
    };
    if src.problem.is_some() && src.system.is_some() {
        return Err(Failure::usage("--problem and --system are mutually exclusive"));
    }
    let from_config = src.problem.is_none() && src.system.is_none();
    let problem = src.problem.clone().or_else(|| from_config.then(|| config.problem.as_ref().map(|p| p.name.clone())).flatten());
    let system = src.system.clone().or_else(|| from_config.then(|| config.system.clone()).flatten());
    if problem.is_some() && system.is_some() {
        return Err(Failure::usage("config names both a problem and a system"));
    }
    let mut ns = src.n.clone();
    if let Some(name) = problem {
        let kind: ProblemKind = name.parse().map_err(|_| {
            let known: Vec<&str> = ProblemKind::ALL.iter().map(|k| k.name()).collect();
            Failure::usage(format!("unknown problem '{name}' (known: {})", known.join(", ")))
        })?;
        let mut params = BTreeMap::new();
        if let Some(p) = config.problem.as_ref().filter(|p| p.name.parse::<ProblemKind>().ok() == Some(kind)) {
            params.extend(p.params.clone());
            if ns.is_empty() {
                ns.extend(p.n);
            }
        }
        for s in &src.params {
            let (k, v) = parse_param(s)?;
            params.insert(k, v);
        }
        return Ok((config, Origin::Problem { kind, params, ns }));
    }
    if !src.params.is_empty() {
        return Err(Failure::usage("--param applies to --problem"));
    }
    Ok(match system {
        Some(path) => (config, Origin::System(path)),
        None => (config, Origin::Random { dims: ns }),
    })
}

fn problem_case(kind: ProblemKind, n: usize, params: &BTreeMap<String, f64>) -> Result<Case, Failure> {
    let mut spec = ProblemSpec::new(kind, n);
    for (k, v) in params {
        spec = spec.with_param(k, *v);
    }
    let (sys, exact) = assemble(&spec).map_err(|e| Failure::usage(format!("{kind}: {e}")))?;
    Ok(Case { label: kind.name().into(), sys, exact: Some(exact) })
}

/// The single system addressed by `solve` and `jacobian`.
fn single_case(src: &SourceArgs) -> Result<(ConfigDoc, Case), Failure> {
    let (config, origin) = resolve(src)?;
    let case = match origin {
        Origin::Problem { kind, params, ns } => {
            let n = match ns.as_slice() {
                [] => DEFAULT_N,
                [n] => *n,
                _ => return Err(Failure::usage("--n takes a single value here")),
            };
            problem_case(kind, n, &params)?
        }
        Origin::System(path) => {
            if !src.n.is_empty() {
                return Err(Failure::usage("--n does not apply to --system"));
            }
            let sys = read_system(&path)?;
            Case { label: path.display().to_string(), sys, exact: None }
        }
        Origin::Random { .. } => return Err(Failure::usage("give --problem, --system or a config naming one")),
    };
    if let Some(path) = &src.export_system {
        write_system(path, &case.sys)?;
    }
    Ok((config, case))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure::usage(format!("stdout: {e}")))
}

fn write_report(output: &OutputArgs, json: impl FnOnce() -> String, csv: impl FnOnce() -> String) -> Result<(), Failure> {
    let Some(path) = &output.out else { return Ok(()) };
    let text = match resolve_format(output.format, Some(path)) {
        Format::Json => json(),
        Format::Csv => csv(),
    };
    write_file(path, &text)
}

fn fresh_seed() -> u64 {
    let d = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    d.as_secs() ^ u64::from(d.subsec_nanos()).rotate_left(32)
}

fn suite_csv(r: &SuiteReport) -> String {
    let mut s = String::from("order,samples,skipped,max_residual,passed\n");
    for c in &r.classes {
        s.push_str(&format!("{},{},{},{},{}\n", num(c.order), c.samples, c.skipped, num(c.max_residual), c.passed));
    }
    s
}

fn suite_table(r: &SuiteReport) -> String {
    let mut s = format!("source: {}\nthreshold: {:e}\n", r.source, r.threshold);
    if let Some(notice) = &r.notice {
        s.push_str(&format!("{notice}\n"));
    }
    if !r.classes.is_empty() {
        s.push_str(&format!("{:>8} {:>8} {:>8} {:>14} {:>7}\n", "order", "samples", "skipped", "max residual", "worst n"));
    }
    for c in &r.classes {
        s.push_str(&format!(
            "{:>8} {:>8} {:>8} {:>14.6e} {:>7}{}\n",
            num(c.order),
            c.samples,
            c.skipped,
            c.max_residual,
            c.worst_n,
            if c.passed { "" } else { "  BREACH" }
        ));
    }
    if let Some(k) = r.stiffness_max {
        s.push_str(&format!("stiffness identity max residual {k:.6e}\n"));
    }
    s.push_str(if r.passed { "all within threshold\n" } else { "threshold breached\n" });
    s
}

pub fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if !(args.threshold.is_finite() && args.threshold > 0.0) {
        return Err(Failure::usage("--threshold must be positive"));
    }
    if args.trials == 0 {
        return Err(Failure::usage("--trials must be positive"));
    }
    let (_, origin) = resolve(&args.source)?;
    if !args.orders.is_empty() && !matches!(origin, Origin::Random { .. }) {
        return Err(Failure::usage("--orders applies to the random suite only"));
    }
    let seed = args.seed.unwrap_or_else(fresh_seed);
    emit(out, &format!("seed: {seed}\n"))?;
    let report = match origin {
        Origin::Random { dims } => {
            let orders = if args.orders.is_empty() { DEFAULT_ORDERS.to_vec() } else { args.orders.clone() };
            check_orders(&orders).map_err(Failure::usage)?;
            let dims = if dims.is_empty() { DEFAULT_DIMS.to_vec() } else { dims };
            if dims.contains(&0) {
                return Err(Failure::usage("--n must be positive"));
            }
            random_suite(&orders, &dims, args.trials, seed, args.threshold)
        }
        Origin::Problem { kind, params, ns } => {
            let ns = if ns.is_empty() { vec![DEFAULT_N] } else { ns };
            let cases = ns
                .iter()
                .map(|&n| problem_case(kind, n, &params).map(|c| (c.sys, c.exact)))
                .collect::<Result<Vec<_>, _>>()?;
            systems_suite(kind.name().into(), &cases, args.trials, seed, args.threshold)
        }
        Origin::System(path) => {
            if !args.source.n.is_empty() {
                return Err(Failure::usage("--n does not apply to --system"));
            }
            let sys = read_system(&path)?;
            systems_suite(path.display().to_string(), &[(sys, None)], args.trials, seed, args.threshold)
        }
    }
    .map_err(Failure::numeric)?;
    emit(out, &suite_table(&report))?;
    write_report(&args.output, || to_json(&report), || suite_csv(&report))?;
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILURE })
}

fn solver_config(args: &SolveArgs, config: &ConfigDoc, start: Vector) -> Result<SolverConfig, Failure> {
    let doc = &config.solver;
    let method = match (args.method, &doc.method) {
        (Some(MethodArg::Newton), _) => Method::Newton,
        (Some(MethodArg::NewtonNofe), _) => Method::NewtonNofe,
        (Some(MethodArg::LinearLike), _) => Method::LinearLike,
        (None, Some(m)) => m.parse().map_err(|_| Failure::usage(format!("unknown method '{m}'")))?,
        (None, None) => Method::Newton,
    };
    let inner_name = match args.inner {
        Some(InnerArg::Lu) => "lu",
        Some(InnerArg::Jacobi) => "jacobi",
        Some(InnerArg::Gs) => "gs",
        Some(InnerArg::Sor) => "sor",
        None => doc.inner.as_deref().unwrap_or("lu"),
    };
    let omega = args.omega.or(doc.omega);
    let inner = match inner_name {
        "lu" => InnerSolver::Lu,
        "jacobi" => InnerSolver::Jacobi,
        "gs" | "gauss_seidel" | "gauss-seidel" => InnerSolver::GaussSeidel,
        "sor" => InnerSolver::Sor { omega: omega.unwrap_or(DEFAULT_OMEGA) },
        other => return Err(Failure::usage(format!("unknown inner solver '{other}'"))),
    };
    if args.omega.is_some() && !matches!(inner, InnerSolver::Sor { .. }) {
        return Err(Failure::usage("--omega applies to --inner sor"));
    }
    let start = match &doc.initial_guess {
        Some(g) => Vector::from_slice(g).map_err(|e| Failure::usage(format!("initial_guess: {e}")))?,
        None => start,
    };
    let mut cfg = SolverConfig::new(method, start).with_inner(inner);
    if let Some(t) = args.tol.or(doc.tol_residual) {
        cfg.tol_residual = t;
    }
    if let Some(t) = doc.tol_step {
        cfg.tol_step = t;
    }
    if let Some(m) = args.max_iters.or(doc.max_iters) {
        cfg.max_iters = m;
    }
    if let Some(m) = doc.max_inner_iters {
        cfg.max_inner_iters = m;
    }
    if let Some(t) = doc.inner_tol {
        cfg.inner_tol = t;
    }
    Ok(cfg)
}

type Outcome = (Vector, SolveReport, Option<Error>);

fn run_method(sys: &PolySystem, cfg: &SolverConfig, clock: &dyn Clock) -> Outcome {
    match run_solver(sys, cfg, clock) {
        Ok((root, rep)) => (root, rep, None),
        Err(f) => {
            let last = f.report.iterates.last().cloned().unwrap_or_else(|| cfg.initial_guess.clone());
            (last, *f.report, Some(f.error))
        }
    }
}

/// `||a_k - b_k||_inf / (1 + ||b_k||_inf)` over the common prefix.
pub(crate) fn iterate_deviations(a: &[Vector], b: &[Vector]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(x, r)| x.sub(r).map_or(f64::INFINITY, |d| d.norm_inf()) / (1.0 + r.norm_inf()))
        .collect()
}

pub fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (config, case) = single_case(&args.source)?;
    let start = match &case.exact {
        Some(exact) => perturbed_start(exact),
        None => Vector::filled(case.sys.n(), 1.0),
    };
    let cfg = solver_config(args, &config, start)?;
    if args.compare && cfg.method != Method::NewtonNofe {
        return Err(Failure::usage("--compare applies to --method newton-nofe"));
    }
    cfg.validate(case.sys.n()).map_err(|e| Failure::usage(e.to_string()))?;
    let clock = StdClock(Instant::now());
    let (root, rep, error) = run_method(&case.sys, &cfg, &clock);
    if let Some(e @ Error::UnsupportedSystem(_)) = error {
        return Err(Failure::numeric(e));
    }
    let mut doc = SolveDoc::new(case.label.clone(), &rep, &root, !args.no_timing);
    if args.compare {
        let reference = SolverConfig { method: Method::Newton, ..cfg.clone() };
        let (_, nrep, _) = run_method(&case.sys, &reference, &clock);
        let deviations = iterate_deviations(&rep.iterates, &nrep.iterates);
        let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
        doc.comparison = Some(ComparisonDoc { reference: Method::Newton.name().into(), deviations, max_deviation });
    }
    let mut text = format!("{}: {}, n = {}\n", case.label, cfg.method, case.sys.n());
    text.push_str(&doc.table());
    match (&error, rep.final_residual) {
        (None, Some(r)) => text.push_str(&format!("converged in {} iterations, residual {r:.3e}\n", rep.iterations)),
        _ => text.push_str(&format!("not converged: {}\n", rep.failure_reason.as_deref().unwrap_or("unknown"))),
    }
    if let Some(c) = &doc.comparison {
        text.push_str(&format!("max deviation from {}: {:.3e}\n", c.reference, c.max_deviation));
    }
    emit(out, &text)?;
    write_report(&args.output, || to_json(&doc), || doc.to_csv())?;
    match error {
        None => Ok(EXIT_OK),
        Some(e) => Err(Failure::numeric(e)),
    }
}

pub fn jacobian(args: &JacobianArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let kind = match args.fd {
        FdArg::Forward => FdKind::Forward,
        FdArg::Central => FdKind::Central,
    };
    let steps = if args.h.is_empty() { vec![FdScheme::default_for(kind).step()] } else { args.h.clone() };
    let schemes = steps
        .iter()
        .map(|&h| FdScheme::new(kind, h).map_err(|_| Failure::usage(format!("--h {h} must lie in (0, 1)"))))
        .collect::<Result<Vec<_>, _>>()?;
    let (config, case) = single_case(&args.source)?;
    let (u, point) = match (&config.solver.initial_guess, &case.exact) {
        (Some(g), _) => (Vector::from_slice(g).map_err(|e| Failure::usage(format!("initial_guess: {e}")))?, "configured"),
        (None, Some(exact)) => (exact.clone(), "manufactured"),
        (None, None) => (Vector::filled(case.sys.n(), 1.0), "all-ones"),
    };
    if u.len() != case.sys.n() {
        return Err(Failure::usage(format!("point has length {}, expected {}", u.len(), case.sys.n())));
    }
    let sys = &case.sys;
    let j = system_jacobian(sys, &u).map_err(Failure::numeric)?;
    let scale = j.max_abs().max(f64::MIN_POSITIVE);
    let mut doc = JacobianDoc {
        source: case.label.clone(),
        n: sys.n(),
        fd: format!("{kind:?}").to_lowercase(),
        point: point.into(),
        steps: Vec::new(),
        report: None,
    };
    for scheme in schemes {
        let jf = fd_jacobian(sys, &u, scheme).map_err(Failure::numeric)?;
        let max_deviation = jf.sub(&j).map_err(Failure::numeric)?.max_abs() / scale;
        let estimate = jacobian_error_estimate(sys, &u, &jf).map_err(Failure::numeric)?;
        doc.steps.push(StepDoc { h: scheme.step(), max_deviation, estimate });
    }
    let mut notice = None;
    if args.report {
        if sys.n() > MAX_EIGEN_ORDER {
            notice = Some(format!("instance analysis skipped: n = {} exceeds {MAX_EIGEN_ORDER}\n", sys.n()));
        } else {
            let r = instance_report(sys, &u).map_err(Failure::numeric)?;
            doc.report = Some(InstanceDoc::from(&r));
        }
    }
    emit(out, &doc.table())?;
    if let Some(n) = notice {
        emit(out, &n)?;
    }
    write_report(&args.output, || to_json(&doc), || doc.to_csv())?;
    Ok(EXIT_OK)
}
