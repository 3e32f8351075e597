//! Stationary inner iterations for `K x = r`.

use crate::error::{Error, Result};
use crate::linalg::{lu_factor, Matrix, Vector};

/// Inner linear solver used by the linear-like iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InnerSolver {
    Lu,
    Jacobi,
    GaussSeidel,
    /// Successive over-relaxation with `omega` in `(0, 2)`.
    Sor { omega: f64 },
}

/// Sweeps of consecutive residual growth that count as divergence.
pub const DIVERGENCE_WINDOW: usize = 10;

/// Solves `k x = r`. Iterative methods start from zero and stop once
/// `||k x - r||_inf <= tol * max(||r||_inf, 1)`.
///
/// Returns the solution and the number of sweeps (0 for LU).
pub fn inner_solve(
    k: &Matrix,
    r: &Vector,
    method: InnerSolver,
    tol: f64,
    max_sweeps: usize,
) -> Result<(Vector, usize)> {
    let omega = match method {
        InnerSolver::Lu => return Ok((lu_factor(k)?.solve(r)?, 0)),
        InnerSolver::Jacobi => return jacobi(k, r, tol, max_sweeps),
        InnerSolver::GaussSeidel => 1.0,
        InnerSolver::Sor { omega } => omega,
    };
    sor(k, r, omega, tol, max_sweeps)
}

fn check(k: &Matrix, r: &Vector) -> Result<()> {
    if !k.is_square() || k.rows() != r.len() {
        return Err(Error::DimensionMismatch {
            op: "inner_solve",
            expected: (r.len(), r.len()),
            found: k.shape(),
        });
    }
    if let Some(i) = (0..k.rows()).find(|&i| k[(i, i)] == 0.0) {
        return Err(Error::SingularMatrix { pivot: i });
    }
    Ok(())
}

/// Tracks the residual history and decides when to stop.
struct Monitor {
    target: f64,
    last: f64,
    growth: usize,
}

impl Monitor {
    fn new(r: &Vector, tol: f64) -> Self {
        Self { target: tol * r.norm_inf().max(1.0), last: f64::INFINITY, growth: 0 }
    }

    /// `Ok(true)` once converged, `Err` on divergence.
    fn update(&mut self, k: &Matrix, x: &Vector, r: &Vector, sweeps: usize) -> Result<bool> {
        let res = k.mul_vec(x)?.sub(r)?.norm_inf();
        if !res.is_finite() {
            return Err(Error::InnerNoConvergence { sweeps, residual: res });
        }
        if res <= self.target {
            return Ok(true);
        }
        self.growth = if res > self.last { self.growth + 1 } else { 0 };
        self.last = res;
        if self.growth >= DIVERGENCE_WINDOW {
            return Err(Error::InnerNoConvergence { sweeps, residual: res });
        }
        Ok(false)
    }
}

fn jacobi(k: &Matrix, r: &Vector, tol: f64, max_sweeps: usize) -> Result<(Vector, usize)> {
    check(k, r)?;
    let n = r.len();
    let mut x = Vector::zeros(n);
    let mut next = Vector::zeros(n);
    let mut mon = Monitor::new(r, tol);
    for sweep in 1..=max_sweeps {
        for i in 0..n {
            let row = k.row(i);
            let off: f64 = row.iter().zip(x.iter()).enumerate().filter(|(j, _)| *j != i).map(|(_, (a, b))| a * b).sum();
            next[i] = (r[i] - off) / row[i];
        }
        core::mem::swap(&mut x, &mut next);
        if mon.update(k, &x, r, sweep)? {
            return Ok((x, sweep));
        }
    }
    Err(Error::InnerNoConvergence { sweeps: max_sweeps, residual: mon.last })
}

fn sor(k: &Matrix, r: &Vector, omega: f64, tol: f64, max_sweeps: usize) -> Result<(Vector, usize)> {
    if !(omega > 0.0 && omega < 2.0) {
        return Err(Error::InvalidSpec("SOR relaxation must lie in (0, 2)"));
    }
    check(k, r)?;
    let n = r.len();
    let mut x = Vector::zeros(n);
    let mut mon = Monitor::new(r, tol);
    for sweep in 1..=max_sweeps {
        for i in 0..n {
            let row = k.row(i);
            let off: f64 = row.iter().zip(x.iter()).enumerate().filter(|(j, _)| *j != i).map(|(_, (a, b))| a * b).sum();
            let gs = (r[i] - off) / row[i];
            x[i] += omega * (gs - x[i]);
        }
        if mon.update(k, &x, r, sweep)? {
            return Ok((x, sweep));
        }
    }
    Err(Error::InnerNoConvergence { sweeps: max_sweeps, residual: mon.last })
}
