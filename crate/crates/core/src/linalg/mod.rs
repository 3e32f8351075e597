//! Minimal dense linear algebra shared by every other module.

mod eigen;
mod lu;
mod matrix;
mod vector;

pub use eigen::{eigenvalues, MAX_EIGEN_ORDER, SWEEPS_PER_ORDER};
pub use lu::{lu_factor, lu_solve, LuFactors, PIVOT_TOL};
pub use matrix::Matrix;
pub use vector::{NormKind, Vector};

use crate::error::Result;

/// Standard vector norm; the zero vector has norm 0.
pub fn norm(v: &Vector, kind: NormKind) -> f64 {
    let x = v.as_slice();
    match kind {
        NormKind::One => x.iter().map(|a| a.abs()).sum(),
        NormKind::Inf => x.iter().fold(0.0, |m, a| m.max(a.abs())),
        NormKind::Two => {
            // scaled to avoid overflow on large entries
            let scale = x.iter().fold(0.0, |m: f64, a| m.max(a.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            let ss: f64 = x.iter().map(|a| (a / scale) * (a / scale)).sum();
            scale * libm::sqrt(ss)
        }
    }
}

/// Exact 1-norm condition number `||A||_1 ||A^-1||_1` from an explicit
/// LU-based inverse.
pub fn condition_estimate(a: &Matrix) -> Result<f64> {
    let inv = lu_factor(a)?.inverse();
    Ok(a.norm_one() * inv.norm_one())
}
