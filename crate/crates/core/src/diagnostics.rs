//! Jacobian-accuracy estimator and instance analysis of the physical
//! stiffness `K(u)`.
//!
//! The estimator uses the scaled residual `psi_bar(u) = D u + sum_t m_t N_t(u) + b`,
//! for which the exact Jacobian satisfies `J(u) u + b = psi_bar(u)`. An
//! approximate `J_hat` is scored by
//! `||psi_bar(u) - (J_hat u + b)|| / ||psi_bar(u)||`, zero for the exact `J`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::euler::physical_stiffness;
use crate::linalg::{condition_estimate, eigenvalues, norm, Matrix, NormKind, Vector};
use crate::polysys::PolySystem;

/// Smallest `||psi_bar||` accepted as a normalizer.
pub const MIN_NORMALIZER: f64 = 1e-300;

/// Tolerance for the symmetry and constant-diagonal flags.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Which reference vector `J_hat` is compared against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EstimatorForm {
    /// `psi_bar - (J_hat u + b)`: zero for the exact Jacobian.
    #[default]
    Vanishing,
    /// `psi_bar - J_hat u`: leaves `b` as residue even for the exact Jacobian.
    Literal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EstimateOptions {
    pub norm: NormKind,
    pub form: EstimatorForm,
}

/// Relative deviation of `j_hat` in the 2-norm, vanishing form.
pub fn jacobian_error_estimate(sys: &PolySystem, u: &Vector, j_hat: &Matrix) -> Result<f64> {
    jacobian_error_estimate_with(sys, u, j_hat, EstimateOptions::default())
}

pub fn jacobian_error_estimate_with(
    sys: &PolySystem,
    u: &Vector,
    j_hat: &Matrix,
    opts: EstimateOptions,
) -> Result<f64> {
    let n = sys.n();
    if j_hat.shape() != (n, n) {
        return Err(Error::DimensionMismatch { op: "jacobian_error_estimate", expected: (n, n), found: j_hat.shape() });
    }
    let psi_bar = sys.scaled_residual(u)?;
    let scale = norm(&psi_bar, opts.norm);
    if scale < MIN_NORMALIZER {
        return Err(Error::DegenerateNormalization);
    }
    let mut reference = j_hat.mul_vec(u)?;
    if opts.form == EstimatorForm::Vanishing {
        reference.axpy(1.0, sys.constant())?;
    }
    Ok(norm(&psi_bar.sub(&reference)?, opts.norm) / scale)
}

/// Structure and spectrum of the physical stiffness at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceReport {
    pub n: usize,
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// `||K||_1 ||K^-1||_1`.
    pub condition: f64,
    /// `||K - K^T||_inf / ||K||_inf` (0 for `K = 0`).
    pub symmetry_deviation: f64,
    pub symmetric: bool,
    /// Every diagonal of `K` constant to [`STRUCTURE_TOL`] relative to its
    /// largest entry.
    pub circulant: bool,
    pub trace: f64,
    pub eigenvalue_sum: Complex64,
}

impl InstanceReport {
    /// `|sum(lambda) - trace| / max(|trace|, 1)`.
    pub fn trace_deviation(&self) -> f64 {
        let d = self.eigenvalue_sum - Complex64::new(self.trace, 0.0);
        libm::hypot(d.re, d.im) / self.trace.abs().max(1.0)
    }
}

/// Instance analysis of `K(u)`.
pub fn instance_report(sys: &PolySystem, u: &Vector) -> Result<InstanceReport> {
    matrix_report(&physical_stiffness(sys, u)?)
}

/// Instance analysis of an arbitrary square matrix.
pub fn matrix_report(k: &Matrix) -> Result<InstanceReport> {
    let eig = eigenvalues(k)?;
    let condition = condition_estimate(k)?;
    let symmetry_deviation = symmetry_deviation(k);
    let eigenvalue_sum = eig.iter().sum();
    Ok(InstanceReport {
        n: k.rows(),
        eigenvalues: eig,
        condition,
        symmetry_deviation,
        symmetric: symmetry_deviation <= STRUCTURE_TOL,
        circulant: constant_diagonals(k, STRUCTURE_TOL),
        trace: k.trace(),
        eigenvalue_sum,
    })
}

fn symmetry_deviation(k: &Matrix) -> f64 {
    let scale = k.norm_inf();
    if scale == 0.0 {
        return 0.0;
    }
    k.sub(&k.transpose()).expect("square").norm_inf() / scale
}

fn constant_diagonals(k: &Matrix, tol: f64) -> bool {
    let n = k.rows();
    let tol = tol * k.max_abs().max(f64::MIN_POSITIVE);
    (0..n).all(|i| {
        (0..n).all(|j| i == 0 || j == 0 || (k[(i, j)] - k[(i - 1, j - 1)]).abs() <= tol)
    })
}
