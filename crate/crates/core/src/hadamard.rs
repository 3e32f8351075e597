//! Hadamard (entrywise) product, power and inverse, and the SJT row/column
//! scaling products.
//!
//! The SJT products are what turn Hadamard-form nonlinear terms into
//! analytical Jacobians:
//!
//! * post-multiplying, `A <> u = diag(u) A`: row `i` of `A` scaled by `u[i]`,
//! * pre-multiplying, `v^T <> A = A diag(v)`: column `j` of `A` scaled by `v[j]`.
//!
//! Both are plain scaling loops, `rows * cols` multiplications each.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// `x^q` under the real-domain policy shared by every Hadamard power:
/// `q == 0` gives 1 for any `x`; integer `q` accepts any `x` except zero with
/// negative `q`; non-integer `q` needs `x > 0`.
pub(crate) fn pow_entry(x: f64, q: f64) -> Option<f64> {
    if q == 0.0 {
        return Some(1.0);
    }
    if is_integer(q) {
        if q < 0.0 && x == 0.0 {
            return None;
        }
        let p = powi(x, q.abs() as u64);
        return Some(if q < 0.0 { 1.0 / p } else { p });
    }
    if x <= 0.0 {
        return None;
    }
    Some(if q == 0.5 { libm::sqrt(x) } else { libm::pow(x, q) })
}

#[inline]
pub(crate) fn is_integer(q: f64) -> bool {
    q.is_finite() && libm::trunc(q) == q && q.abs() < 1e15
}

fn powi(mut base: f64, mut e: u64) -> f64 {
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        e >>= 1;
        if e > 0 {
            base *= base;
        }
    }
    acc
}

pub(crate) fn pow_slice(x: &[f64], q: f64) -> Result<Vec<f64>> {
    x.iter()
        .enumerate()
        .map(|(index, &value)| {
            pow_entry(value, q).ok_or(Error::DomainError { index, value, exponent: q })
        })
        .collect()
}

/// Entrywise product `A o B`.
pub fn hadamard_product(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.zip_with(b, "hadamard_product", |x, y| x * y)
}

/// Entrywise power `A^(o q)`; `q = 0` gives the all-ones matrix.
pub fn hadamard_power(a: &Matrix, q: f64) -> Result<Matrix> {
    let data = pow_slice(a.as_slice(), q)?;
    Ok(Matrix::from_parts_unchecked(a.rows(), a.cols(), data))
}

/// Entrywise reciprocal `A^(o -1)`; fails on zero entries.
pub fn hadamard_inverse(a: &Matrix) -> Result<Matrix> {
    hadamard_power(a, -1.0)
}

/// The all-ones matrix, identity element of the Hadamard product.
pub fn hadamard_unit(rows: usize, cols: usize) -> Matrix {
    Matrix::filled(rows, cols, 1.0)
}

/// Entrywise product of two vectors.
pub fn hadamard_product_vec(a: &Vector, b: &Vector) -> Result<Vector> {
    a.zip_with(b, "hadamard_product", |x, y| x * y)
}

/// Entrywise power of a vector, same domain rules as [`hadamard_power`].
pub fn hadamard_power_vec(a: &Vector, q: f64) -> Result<Vector> {
    Ok(Vector::from_vec_unchecked(pow_slice(a.as_slice(), q)?))
}

/// Post-multiplying SJT product: row `i` of `a` scaled by `u[i]`,
/// identical to `diag(u) * a`.
pub fn sjt_post(a: &Matrix, u: &Vector) -> Result<Matrix> {
    if u.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            op: "sjt_post",
            expected: (a.rows(), 1),
            found: (u.len(), 1),
        });
    }
    let mut out = a.clone();
    for (i, &ui) in u.iter().enumerate() {
        for x in out.row_mut(i) {
            *x *= ui;
        }
    }
    Ok(out)
}

/// Pre-multiplying SJT product: column `j` of `a` scaled by `v[j]`,
/// identical to `a * diag(v)`.
pub fn sjt_pre(v: &Vector, a: &Matrix) -> Result<Matrix> {
    if v.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            op: "sjt_pre",
            expected: (a.cols(), 1),
            found: (v.len(), 1),
        });
    }
    let mut out = a.clone();
    for i in 0..a.rows() {
        for (x, &vj) in out.row_mut(i).iter_mut().zip(v.iter()) {
            *x *= vj;
        }
    }
    Ok(out)
}
