//! Randomized checks of `N(u) = J(u) u / m` behind the `verify` command.

use polyjac_core::euler::{euler_identity_residual, stiffness_identity_residual};
use polyjac_core::{Error, Matrix, PolySystem, PolyTerm, TermForm, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Attempts at drawing an admissible point before a trial is skipped.
pub const MAX_DRAWS: usize = 100;

/// Largest residual seen for one term order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderClass {
    pub order: f64,
    pub samples: usize,
    pub skipped: usize,
    pub max_residual: f64,
    /// Dimension at which `max_residual` occurred.
    pub worst_n: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub source: String,
    pub seed: u64,
    pub threshold: f64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub classes: Vec<OrderClass>,
    /// Largest `||K u + b - psi|| / max(||psi||, 1)`, for whole systems.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stiffness_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(source: String, seed: u64, threshold: f64, trials: usize, dims: Vec<usize>) -> Self {
        Self { source, seed, threshold, trials, dims, classes: Vec::new(), stiffness_max: None, notice: None, passed: true }
    }

    fn record(&mut self, order: f64, n: usize, residual: Option<f64>) {
        let idx = match self.classes.iter().position(|c| c.order == order) {
            Some(i) => i,
            None => {
                self.classes.push(OrderClass { order, samples: 0, skipped: 0, max_residual: 0.0, worst_n: n, passed: true });
                self.classes.len() - 1
            }
        };
        let class = &mut self.classes[idx];
        match residual {
            Some(r) => {
                class.samples += 1;
                if r > class.max_residual {
                    class.max_residual = r;
                    class.worst_n = n;
                }
            }
            None => class.skipped += 1,
        }
    }

    fn close(mut self) -> Self {
        self.classes.sort_by(|a, b| a.order.total_cmp(&b.order));
        for c in &mut self.classes {
            c.passed = c.max_residual <= self.threshold;
        }
        let stiff_ok = self.stiffness_max.is_none_or(|s| s <= self.threshold);
        self.passed = stiff_ok && self.classes.iter().all(|c| c.passed);
        self
    }
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

fn uniform_matrix(rng: &mut ChaCha8Rng, n: usize, lo: f64) -> Matrix {
    Matrix::from_fn(n, n, |_, _| rng.gen_range(lo..1.0)).expect("finite entries")
}

/// A random term of order `m`: a pointwise product with `s = m - 1`, or a
/// power with `k = m`. Non-integer exponents get non-negative matrices so
/// that positive points are admissible.
pub fn random_term(rng: &mut ChaCha8Rng, n: usize, m: f64, pointwise: bool) -> Result<PolyTerm, Error> {
    let lo = if is_integer(m) { -1.0 } else { 0.0 };
    if pointwise {
        let a_p = uniform_matrix(rng, n, -1.0);
        let a_r = uniform_matrix(rng, n, lo);
        PolyTerm::pointwise_product(a_p, a_r, m - 1.0)
    } else {
        PolyTerm::power(uniform_matrix(rng, n, lo), m)
    }
}

/// A random point: the positive orthant `[0.05, 1)^n` when `positive`,
/// otherwise `[-1, 1)^n`.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize, positive: bool) -> Vector {
    let lo = if positive { 0.05 } else { -1.0 };
    Vector::from_fn(n, |_| rng.gen_range(lo..1.0)).expect("finite entries")
}

pub fn check_orders(orders: &[f64]) -> Result<(), String> {
    match orders.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
        Some(m) => Err(format!("term order {m} must be positive")),
        None => Ok(()),
    }
}

/// Random terms and points: `trials` of each per order and dimension,
/// alternating between pointwise-product and power terms.
pub fn random_suite(orders: &[f64], dims: &[usize], trials: usize, seed: u64, threshold: f64) -> Result<SuiteReport, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("random".into(), seed, threshold, trials, dims.to_vec());
    for &m in orders {
        for &n in dims {
            for t in 0..trials {
                let term = random_term(&mut rng, n, m, t % 2 == 0)?;
                let u = random_point(&mut rng, n, !is_integer(m));
                report.record(m, n, Some(euler_identity_residual(&term, &u)?));
            }
        }
    }
    Ok(report.close())
}

fn has_fractional(sys: &PolySystem) -> bool {
    sys.terms().iter().any(|t| match t.form() {
        TermForm::PointwiseProduct { s, .. } => !is_integer(*s),
        TermForm::Power { k, .. } => !is_integer(*k),
    })
}

/// Draws an admissible point, either near `center` (relative spread 0.5%)
/// or uniformly.
fn draw(rng: &mut ChaCha8Rng, sys: &PolySystem, center: Option<&Vector>) -> Option<Vector> {
    let positive = has_fractional(sys);
    for _ in 0..MAX_DRAWS {
        let u = match center {
            Some(c) => {
                let scale = c.norm_inf().max(1.0);
                Vector::from_fn(c.len(), |i| c[i] + scale * rng.gen_range(-0.005..0.005)).expect("finite")
            }
            None => random_point(rng, sys.n(), positive),
        };
        if sys.residual(&u).is_ok() {
            return Some(u);
        }
    }
    None
}

/// One suite over the terms of `sys`, appended to `report`.
pub fn system_trials(
    report: &mut SuiteReport,
    rng: &mut ChaCha8Rng,
    sys: &PolySystem,
    center: Option<&Vector>,
) -> Result<(), Error> {
    let n = sys.n();
    for _ in 0..report.trials {
        let Some(u) = draw(rng, sys, center) else {
            for t in sys.terms() {
                report.record(t.order(), n, None);
            }
            continue;
        };
        for t in sys.terms() {
            report.record(t.order(), n, Some(euler_identity_residual(t, &u)?));
        }
        let k = stiffness_identity_residual(sys, &u)?;
        report.stiffness_max = Some(report.stiffness_max.map_or(k, |m| m.max(k)));
    }
    Ok(())
}

/// Identity checks on whole systems, each paired with an optional center
/// point for sampling.
pub fn systems_suite(
    source: String,
    systems: &[(PolySystem, Option<Vector>)],
    trials: usize,
    seed: u64,
    threshold: f64,
) -> Result<SuiteReport, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = systems.iter().map(|(s, _)| s.n()).collect();
    let mut report = SuiteReport::new(source, seed, threshold, trials, dims);
    if systems.iter().all(|(s, _)| s.terms().is_empty()) {
        report.notice = Some("no nonlinear terms".into());
    }
    for (sys, center) in systems {
        system_trials(&mut report, &mut rng, sys, center.as_ref())?;
    }
    Ok(report.close())
}
