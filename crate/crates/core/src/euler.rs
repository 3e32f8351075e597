//! Executable form of the homogeneous-function identity
//! `N(u) = (1/m) J(u) u`, and the stiffness matrices it induces.
//!
//! Applying the identity termwise writes any polynomial system in the
//! linear-like form `K(u) u + b = psi(u)` with the physical stiffness
//! `K(u) = D + sum_t J_t(u) / m_t`. The Newton tangent stiffness is
//! `D + sum_t J_t(u)` instead.

use crate::error::Result;
use crate::jacobian::{system_jacobian, term_jacobian, weighted_jacobian};
use crate::linalg::{Matrix, Vector};
use crate::polysys::{eval_term, term_order, PolySystem, PolyTerm};

/// `||N(u) - J(u) u / m||_inf / (1 + ||N(u)||_inf)`.
///
/// Zero in exact arithmetic for every term and admissible `u`.
pub fn euler_identity_residual(t: &PolyTerm, u: &Vector) -> Result<f64> {
    let n = eval_term(t, u)?;
    let ju = term_jacobian(t, u)?.mul_vec(u)?;
    let diff = n.sub(&ju.scale(1.0 / term_order(t)))?;
    Ok(diff.norm_inf() / (1.0 + n.norm_inf()))
}

/// Physical stiffness `K(u) = D + sum_t J_t(u) / m_t`.
pub fn physical_stiffness(sys: &PolySystem, u: &Vector) -> Result<Matrix> {
    weighted_jacobian(sys, u, |t| 1.0 / term_order(t))
}

/// Tangent stiffness `D + sum_t J_t(u)`, the Newton matrix.
pub fn tangent_stiffness(sys: &PolySystem, u: &Vector) -> Result<Matrix> {
    system_jacobian(sys, u)
}

/// `||K(u) u + b - psi(u)||_inf / max(||psi(u)||_inf, 1)`.
pub fn stiffness_identity_residual(sys: &PolySystem, u: &Vector) -> Result<f64> {
    let psi = sys.residual(u)?;
    let mut ku = physical_stiffness(sys, u)?.mul_vec(u)?;
    ku.axpy(1.0, sys.constant())?;
    Ok(ku.sub(&psi)?.norm_inf() / psi.norm_inf().max(1.0))
}
