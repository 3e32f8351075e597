//! Root-finders for `psi(c) = 0`.
//!
//! * [`newton_solve`]: `c+ = c - J(c)^-1 psi(c)`.
//! * [`newton_nofe_solve`]: the same iterates for single-order systems,
//!   computed without evaluating the nonlinear vector:
//!   `c+ = s/(1+s) c - 1/(1+s) J(c)^-1 (s D c + (1+s) b)`.
//! * [`linear_like_solve`]: the fixed point `K(u_k) u_{k+1} = -b` with the
//!   physical stiffness `K`, inner solve by LU or a stationary iteration.
//!
//! Every method returns the root together with a [`SolveReport`], or a
//! [`SolveFailure`] carrying the error and the partial report.

mod inner;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::euler::physical_stiffness;
use crate::jacobian::system_jacobian;
use crate::linalg::{lu_factor, Vector};
use crate::polysys::PolySystem;

pub use inner::{inner_solve, InnerSolver, DIVERGENCE_WINDOW};

/// Outer iteration scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Newton,
    NewtonNofe,
    LinearLike,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Newton, Method::NewtonNofe, Method::LinearLike];

    pub fn name(self) -> &'static str {
        match self {
            Method::Newton => "newton",
            Method::NewtonNofe => "newton-nofe",
            Method::LinearLike => "linear-like",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "newton" => Ok(Method::Newton),
            "newton-nofe" | "newton_nofe" | "nofe" => Ok(Method::NewtonNofe),
            "linear-like" | "linear_like" => Ok(Method::LinearLike),
            _ => Err(Error::InvalidSpec("unknown solver method")),
        }
    }
}

/// Solver settings. Norms are max-norms throughout.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub inner: InnerSolver,
    pub tol_residual: f64,
    pub tol_step: f64,
    pub max_iters: usize,
    pub max_inner_iters: usize,
    pub inner_tol: f64,
    pub initial_guess: Vector,
}

impl SolverConfig {
    pub const DEFAULT_TOL_RESIDUAL: f64 = 1e-10;
    pub const DEFAULT_TOL_STEP: f64 = 1e-12;
    pub const DEFAULT_MAX_ITERS: usize = 50;
    pub const DEFAULT_MAX_INNER_ITERS: usize = 500;
    pub const DEFAULT_INNER_TOL: f64 = 1e-12;

    /// Defaults with LU inner solves.
    pub fn new(method: Method, initial_guess: Vector) -> Self {
        Self {
            method,
            inner: InnerSolver::Lu,
            tol_residual: Self::DEFAULT_TOL_RESIDUAL,
            tol_step: Self::DEFAULT_TOL_STEP,
            max_iters: Self::DEFAULT_MAX_ITERS,
            max_inner_iters: Self::DEFAULT_MAX_INNER_ITERS,
            inner_tol: Self::DEFAULT_INNER_TOL,
            initial_guess,
        }
    }

    pub fn with_inner(mut self, inner: InnerSolver) -> Self {
        self.inner = inner;
        self
    }

    pub fn with_tol_residual(mut self, tol: f64) -> Self {
        self.tol_residual = tol;
        self
    }

    pub fn with_tol_step(mut self, tol: f64) -> Self {
        self.tol_step = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.tol_residual) || !positive(self.tol_step) || !positive(self.inner_tol) {
            return Err(Error::InvalidSpec("tolerances must be positive"));
        }
        if self.max_iters == 0 || self.max_inner_iters == 0 {
            return Err(Error::InvalidSpec("iteration limits must be positive"));
        }
        if let InnerSolver::Sor { omega } = self.inner {
            if !(omega > 0.0 && omega < 2.0) {
                return Err(Error::InvalidSpec("SOR relaxation must lie in (0, 2)"));
            }
        }
        if self.initial_guess.len() != n {
            return Err(Error::BadLength { expected: n, found: self.initial_guess.len() });
        }
        Ok(())
    }
}

/// Source of wall-clock time in milliseconds from an arbitrary origin.
pub trait Clock {
    fn now_millis(&self) -> f64;
}

/// A clock that never advances; every record then reports 0 ms.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now_millis(&self) -> f64 {
        0.0
    }
}

/// One outer iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    /// `||psi||_inf` after the step; `None` where the method skips it.
    pub residual_norm: Option<f64>,
    /// `||c_{k+1} - c_k||_inf`.
    pub step_norm: f64,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub method: Method,
    pub converged: bool,
    pub iterations: usize,
    pub records: Vec<IterationRecord>,
    /// `c_0, c_1, ..., c_iterations`.
    pub iterates: Vec<Vector>,
    /// `||psi||_inf` at the starting point, when the method computes it.
    pub initial_residual: Option<f64>,
    /// `||psi||_inf` at the returned point.
    pub final_residual: Option<f64>,
    pub failure_reason: Option<String>,
    /// Nonlinear-term evaluations made inside the iteration loop.
    pub loop_term_evaluations: usize,
    /// Inner sweeps summed over all outer iterations (0 for LU).
    pub inner_sweeps: usize,
}

impl SolveReport {
    fn new(method: Method, start: &Vector) -> Self {
        Self {
            method,
            converged: false,
            iterations: 0,
            records: Vec::new(),
            iterates: alloc::vec![start.clone()],
            initial_residual: None,
            final_residual: None,
            failure_reason: None,
            loop_term_evaluations: 0,
            inner_sweeps: 0,
        }
    }

    fn push(&mut self, next: &Vector, residual_norm: Option<f64>, step_norm: f64, millis: f64) {
        self.iterations += 1;
        self.records.push(IterationRecord { iteration: self.iterations, residual_norm, step_norm, millis });
        self.iterates.push(next.clone());
    }
}

/// A failed solve: the cause and everything recorded up to it.
#[derive(Clone, Debug)]
pub struct SolveFailure {
    pub error: Error,
    pub report: Box<SolveReport>,
}

impl fmt::Display for SolveFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.report.failure_reason {
            Some(reason) => write!(f, "{} ({})", self.error, reason),
            None => write!(f, "{}", self.error),
        }
    }
}

impl core::error::Error for SolveFailure {}

impl From<SolveFailure> for Error {
    fn from(f: SolveFailure) -> Self {
        f.error
    }
}

pub type SolveResult = core::result::Result<(Vector, SolveReport), SolveFailure>;

/// Runs `cfg.method` with wall-time taken from `clock`.
pub fn solve(sys: &PolySystem, cfg: &SolverConfig, clock: &dyn Clock) -> SolveResult {
    match cfg.method {
        Method::Newton => run_newton(sys, cfg, clock),
        Method::NewtonNofe => run_nofe(sys, cfg, clock),
        Method::LinearLike => run_linear_like(sys, cfg, clock),
    }
}

/// Standard Newton iteration with the analytical system Jacobian.
pub fn newton_solve(sys: &PolySystem, cfg: &SolverConfig) -> SolveResult {
    run_newton(sys, cfg, &NullClock)
}

/// Newton iteration that never evaluates the nonlinear vector inside the
/// loop. Needs every nonlinear term to share one order `1 + s`.
pub fn newton_nofe_solve(sys: &PolySystem, cfg: &SolverConfig) -> SolveResult {
    run_nofe(sys, cfg, &NullClock)
}

/// Linear-like fixed point `K(u_k) u_{k+1} = -b`.
pub fn linear_like_solve(sys: &PolySystem, cfg: &SolverConfig) -> SolveResult {
    run_linear_like(sys, cfg, &NullClock)
}

struct Run<'a> {
    sys: &'a PolySystem,
    report: SolveReport,
    evals_at_start: usize,
}

impl<'a> Run<'a> {
    fn start(sys: &'a PolySystem, cfg: &'a SolverConfig) -> core::result::Result<Self, SolveFailure> {
        let report = SolveReport::new(cfg.method, &cfg.initial_guess);
        let run = Self { sys, report, evals_at_start: sys.term_evaluations() };
        match cfg.validate(sys.n()) {
            Ok(()) => Ok(run),
            Err(e) => Err(run.fail(e, String::from("invalid configuration"))),
        }
    }

    fn evals(&self) -> usize {
        self.sys.term_evaluations().wrapping_sub(self.evals_at_start)
    }

    fn fail(mut self, error: Error, reason: String) -> SolveFailure {
        self.report.converged = false;
        self.report.failure_reason = Some(reason);
        SolveFailure { error, report: Box::new(self.report) }
    }

    fn fail_at(self, error: Error, what: &str) -> SolveFailure {
        let k = self.report.iterations + 1;
        self.fail(error, format!("{what} at iteration {k}"))
    }

    fn no_convergence(self, reason: String) -> SolveFailure {
        let iterations = self.report.iterations;
        self.fail(Error::NoConvergence { iterations }, reason)
    }

    fn finish(mut self, root: Vector, residual: f64) -> SolveResult {
        self.report.final_residual = Some(residual);
        self.report.converged = true;
        Ok((root, self.report))
    }
}

fn diverged(step: &Vector) -> Option<String> {
    (!step.is_finite()).then(|| String::from("iterate became non-finite"))
}

fn run_newton(sys: &PolySystem, cfg: &SolverConfig, clock: &dyn Clock) -> SolveResult {
    let mut run = Run::start(sys, cfg)?;
    let mut c = cfg.initial_guess.clone();
    let mut psi = match sys.residual(&c) {
        Ok(p) => p,
        Err(e) => return Err(run.fail(e, String::from("initial guess not admissible"))),
    };
    let mut res = psi.norm_inf();
    run.report.initial_residual = Some(res);
    run.report.final_residual = Some(res);
    if res <= cfg.tol_residual {
        return run.finish(c, res);
    }
    let base = run.evals();
    while run.report.iterations < cfg.max_iters {
        let t0 = clock.now_millis();
        let delta = match system_jacobian(sys, &c).and_then(|j| lu_factor(&j)?.solve(&psi.scale(-1.0))) {
            Ok(d) => d,
            Err(e) => return Err(run.fail_at(e, "singular Jacobian")),
        };
        let next = c.add(&delta).expect("matching lengths");
        if let Some(reason) = diverged(&next) {
            return Err(run.no_convergence(reason));
        }
        psi = match sys.residual(&next) {
            Ok(p) => p,
            Err(e) => return Err(run.fail_at(e, "iterate left the admissible region")),
        };
        res = psi.norm_inf();
        let step = delta.norm_inf();
        run.report.push(&next, Some(res), step, clock.now_millis() - t0);
        run.report.loop_term_evaluations = run.evals() - base;
        run.report.final_residual = Some(res);
        c = next;
        if res <= cfg.tol_residual {
            return run.finish(c, res);
        }
        if step <= cfg.tol_step {
            return Err(run.no_convergence(format!("stagnated: step {step:e} with residual {res:e}")));
        }
    }
    Err(run.no_convergence(format!("iteration budget exhausted, residual {res:e}")))
}

fn run_nofe(sys: &PolySystem, cfg: &SolverConfig, clock: &dyn Clock) -> SolveResult {
    let run = Run::start(sys, cfg)?;
    let m = match sys.common_order() {
        Some(m) => m,
        None if sys.terms().is_empty() => {
            return Err(run.fail(Error::UnsupportedSystem("no nonlinear terms"), String::from("order undefined")));
        }
        None => {
            return Err(run.fail(Error::UnsupportedSystem("nonlinear terms of mixed order"), String::from("mixed orders")));
        }
    };
    let mut run = run;
    let s = m - 1.0;
    let d = sys.linear_or_zero();
    let b = sys.constant();
    let mut c = cfg.initial_guess.clone();
    let base = sys.term_evaluations();
    let mut stopped = false;
    while run.report.iterations < cfg.max_iters {
        let t0 = clock.now_millis();
        let mut rhs = d.mul_vec(&c).expect("square D").scale(s);
        rhs.axpy(1.0 + s, b).expect("matching lengths");
        let y = match system_jacobian(sys, &c).and_then(|j| lu_factor(&j)?.solve(&rhs)) {
            Ok(y) => y,
            Err(e) => return Err(run.fail_at(e, "singular Jacobian")),
        };
        let mut next = c.scale(s / (1.0 + s));
        next.axpy(-1.0 / (1.0 + s), &y).expect("matching lengths");
        if let Some(reason) = diverged(&next) {
            return Err(run.no_convergence(reason));
        }
        let step = next.sub(&c).expect("matching lengths").norm_inf();
        run.report.push(&next, None, step, clock.now_millis() - t0);
        c = next;
        if step <= cfg.tol_step {
            stopped = true;
            break;
        }
    }
    run.report.loop_term_evaluations = sys.term_evaluations().wrapping_sub(base);
    let res = match sys.residual(&c) {
        Ok(p) => p.norm_inf(),
        Err(e) => return Err(run.fail(e, String::from("returned point not admissible"))),
    };
    run.report.final_residual = Some(res);
    if let Some(last) = run.report.records.last_mut() {
        last.residual_norm = Some(res);
    }
    if res <= cfg.tol_residual {
        return run.finish(c, res);
    }
    Err(run.no_convergence(if stopped {
        format!("stagnated: residual {res:e} after step below tolerance")
    } else {
        format!("iteration budget exhausted, residual {res:e}")
    }))
}

fn run_linear_like(sys: &PolySystem, cfg: &SolverConfig, clock: &dyn Clock) -> SolveResult {
    let mut run = Run::start(sys, cfg)?;
    let mut c = cfg.initial_guess.clone();
    let rhs = sys.constant().scale(-1.0);
    let mut res = match sys.residual(&c) {
        Ok(p) => p.norm_inf(),
        Err(e) => return Err(run.fail(e, String::from("initial guess not admissible"))),
    };
    run.report.initial_residual = Some(res);
    run.report.final_residual = Some(res);
    if res <= cfg.tol_residual {
        return run.finish(c, res);
    }
    let base = run.evals();
    while run.report.iterations < cfg.max_iters {
        let t0 = clock.now_millis();
        let k = match physical_stiffness(sys, &c) {
            Ok(k) => k,
            Err(e) => return Err(run.fail_at(e, "stiffness assembly failed")),
        };
        let next = match inner_solve(&k, &rhs, cfg.inner, cfg.inner_tol, cfg.max_inner_iters) {
            Ok((x, sweeps)) => {
                run.report.inner_sweeps += sweeps;
                x
            }
            Err(e @ Error::SingularMatrix { .. }) => return Err(run.fail_at(e, "singular stiffness")),
            Err(e) => return Err(run.fail_at(e, "inner solver failed")),
        };
        if let Some(reason) = diverged(&next) {
            return Err(run.no_convergence(reason));
        }
        res = match sys.residual(&next) {
            Ok(p) => p.norm_inf(),
            Err(e) => return Err(run.fail_at(e, "iterate left the admissible region")),
        };
        let step = next.sub(&c).expect("matching lengths").norm_inf();
        run.report.push(&next, Some(res), step, clock.now_millis() - t0);
        run.report.loop_term_evaluations = run.evals() - base;
        run.report.final_residual = Some(res);
        c = next;
        if res <= cfg.tol_residual {
            return run.finish(c, res);
        }
        if step <= cfg.tol_step {
            return Err(run.no_convergence(format!("stagnated: step {step:e} with residual {res:e}")));
        }
    }
    Err(run.no_convergence(format!("iteration budget exhausted, residual {res:e}")))
}
