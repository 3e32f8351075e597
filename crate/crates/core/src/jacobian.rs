//! Analytical Jacobians via SJT products, finite-difference Jacobians, and the
//! Kronecker-form Jacobian of `phi(X) = X A X`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hadamard::{hadamard_power_vec, hadamard_product_vec, sjt_post, sjt_pre};
use crate::linalg::{Matrix, Vector};
use crate::polysys::{PolySystem, PolyTerm, TermForm};

/// Analytical Jacobian of one term.
///
/// * pointwise product: `A_p <> (A_r u)^s + s * A_r <> ((A_r u)^(s-1) o (A_p u))`
/// * power: `(k u^(k-1))^T <> A`
pub fn term_jacobian(t: &PolyTerm, u: &Vector) -> Result<Matrix> {
    if u.len() != t.dim() {
        return Err(Error::DimensionMismatch {
            op: "term_jacobian",
            expected: (t.dim(), 1),
            found: (u.len(), 1),
        });
    }
    match t.form() {
        TermForm::PointwiseProduct { a_p, a_r, s } => {
            if *s == 0.0 {
                return Ok(a_p.clone());
            }
            let r = a_r.mul_vec(u)?;
            let mut jac = sjt_post(a_p, &hadamard_power_vec(&r, *s)?)?;
            let p = a_p.mul_vec(u)?;
            let w = hadamard_product_vec(&hadamard_power_vec(&r, s - 1.0)?, &p)?;
            jac.add_scaled(*s, &sjt_post(a_r, &w)?)?;
            Ok(jac)
        }
        TermForm::Power { a, k } => {
            if *k == 1.0 {
                return Ok(a.clone());
            }
            let w = hadamard_power_vec(u, k - 1.0)?.scale(*k);
            sjt_pre(&w, a)
        }
    }
}

/// Total Jacobian `D + sum_t J_t(u)`.
pub fn system_jacobian(sys: &PolySystem, u: &Vector) -> Result<Matrix> {
    weighted_jacobian(sys, u, |_| 1.0)
}

/// `D + sum_t w(t) J_t(u)`.
pub(crate) fn weighted_jacobian(
    sys: &PolySystem,
    u: &Vector,
    weight: impl Fn(&PolyTerm) -> f64,
) -> Result<Matrix> {
    if u.len() != sys.n() {
        return Err(Error::DimensionMismatch {
            op: "system_jacobian",
            expected: (sys.n(), 1),
            found: (u.len(), 1),
        });
    }
    let mut jac = sys.linear_or_zero();
    for t in sys.terms() {
        jac.add_scaled(weight(t), &term_jacobian(t, u)?)?;
    }
    Ok(jac)
}

/// Finite-difference flavour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdKind {
    Forward,
    Central,
}

/// Finite-difference scheme with an absolute step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdScheme {
    kind: FdKind,
    step: f64,
}

impl FdScheme {
    pub const DEFAULT_FORWARD_STEP: f64 = 1e-6;
    pub const DEFAULT_CENTRAL_STEP: f64 = 1e-5;

    /// `step` must lie in `(0, 1)`.
    pub fn new(kind: FdKind, step: f64) -> Result<Self> {
        if !(step > 0.0 && step < 1.0) {
            return Err(Error::InvalidSpec("finite-difference step must lie in (0, 1)"));
        }
        Ok(Self { kind, step })
    }

    pub fn forward() -> Self {
        Self { kind: FdKind::Forward, step: Self::DEFAULT_FORWARD_STEP }
    }

    pub fn central() -> Self {
        Self { kind: FdKind::Central, step: Self::DEFAULT_CENTRAL_STEP }
    }

    pub fn default_for(kind: FdKind) -> Self {
        match kind {
            FdKind::Forward => Self::forward(),
            FdKind::Central => Self::central(),
        }
    }

    pub fn kind(&self) -> FdKind {
        self.kind
    }

    pub fn step(&self) -> f64 {
        self.step
    }
}

/// Finite-difference Jacobian of an arbitrary vector map.
pub fn fd_jacobian_of<F>(f: F, u: &Vector, scheme: FdScheme) -> Result<Matrix>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    let h = scheme.step;
    let base = match scheme.kind {
        FdKind::Forward => Some(f(u)?),
        FdKind::Central => None,
    };
    let mut cols: Vec<Vector> = Vec::with_capacity(u.len());
    for j in 0..u.len() {
        let mut up = u.clone();
        up[j] += h;
        let col = match &base {
            Some(f0) => f(&up)?.sub(f0)?.scale(1.0 / h),
            None => {
                let mut dn = u.clone();
                dn[j] -= h;
                f(&up)?.sub(&f(&dn)?)?.scale(0.5 / h)
            }
        };
        cols.push(col);
    }
    let rows = cols[0].len();
    Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Finite-difference Jacobian of the residual `psi`.
pub fn fd_jacobian(sys: &PolySystem, u: &Vector, scheme: FdScheme) -> Result<Matrix> {
    fd_jacobian_of(|x| sys.residual(x), u, scheme)
}

/// Row-major flattening: the rows of `x` stacked end to end.
pub fn vec_rows(x: &Matrix) -> Vector {
    Vector::from_vec_unchecked(x.as_slice().to_vec())
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Matrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `X A X`.
pub fn xax(x: &Matrix, a: &Matrix) -> Result<Matrix> {
    x.matmul(a)?.matmul(x)
}

/// Jacobian of `vec_rows(X A X)` with respect to `vec_rows(X)`.
///
/// With row stacking, `vec_rows(L M R) = (L (x) R^T) vec_rows(M)`, so
/// `d(X A X) = dX (A X) + (X A) dX` gives
/// `J = I (x) (A X)^T + (X A) (x) I`. It satisfies
/// `J vec_rows(X) = 2 vec_rows(X A X)`.
pub fn xax_jacobian(x: &Matrix, a: &Matrix) -> Result<Matrix> {
    let n = x.rows();
    if !x.is_square() || a.shape() != (n, n) {
        return Err(Error::DimensionMismatch { op: "xax_jacobian", expected: (n, n), found: a.shape() });
    }
    let eye = Matrix::identity(n);
    let left = kron(&eye, &a.matmul(x)?.transpose());
    let right = kron(&x.matmul(a)?, &eye);
    left.add(&right)
}
