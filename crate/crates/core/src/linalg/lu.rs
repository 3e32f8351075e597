use alloc::vec::Vec;

use super::{Matrix, Vector};
use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot is singular when its magnitude falls
/// below this times the largest absolute row sum of the input.
pub const PIVOT_TOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P A = L U`.
///
/// `L` (unit diagonal, stored below the diagonal) and `U` share one packed
/// matrix. Row `i` of `P A` is row `pivots[i]` of `A`.
#[derive(Clone, Debug)]
pub struct LuFactors {
    factors: Matrix,
    pivots: Vec<usize>,
    sign: f64,
}

/// Factors a square matrix.
pub fn lu_factor(a: &Matrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "lu_factor",
            expected: (a.rows(), a.rows()),
            found: a.shape(),
        });
    }
    let n = a.rows();
    let tol = PIVOT_TOL * a.norm_inf();
    let mut lu = a.clone();
    let mut pivots: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;

    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax == 0.0 || pmax < tol {
            return Err(Error::SingularMatrix { pivot: k });
        }
        if p != k {
            let s = lu.as_mut_slice();
            for j in 0..n {
                s.swap(k * n + j, p * n + j);
            }
            pivots.swap(k, p);
            sign = -sign;
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / d;
            lu[(i, k)] = l;
            if l != 0.0 {
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= l * u;
                }
            }
        }
    }
    Ok(LuFactors { factors: lu, pivots, sign })
}

/// Solves `A x = y` with previously computed factors.
pub fn lu_solve(f: &LuFactors, y: &Vector) -> Result<Vector> {
    f.solve(y)
}

impl LuFactors {
    #[inline]
    pub fn order(&self) -> usize {
        self.factors.rows()
    }

    pub fn factors(&self) -> &Matrix {
        &self.factors
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Permutation parity, `+1` or `-1`.
    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn solve(&self, y: &Vector) -> Result<Vector> {
        let n = self.order();
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                op: "lu_solve",
                expected: (n, 1),
                found: (y.len(), 1),
            });
        }
        let mut x: Vec<f64> = self.pivots.iter().map(|&p| y[p]).collect();
        self.substitute(&mut x);
        Ok(Vector::from_vec_unchecked(x))
    }

    fn substitute(&self, x: &mut [f64]) {
        let n = self.order();
        let lu = &self.factors;
        for i in 1..n {
            let row = lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = lu.row(i);
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / row[i];
        }
    }

    pub fn determinant(&self) -> f64 {
        self.factors.diagonal().iter().fold(self.sign, |d, u| d * u)
    }

    /// Explicit inverse, one column per unit right-hand side.
    pub fn inverse(&self) -> Matrix {
        let n = self.order();
        let mut inv = Matrix::zeros(n, n);
        let mut col = alloc::vec![0.0; n];
        for j in 0..n {
            for (i, c) in col.iter_mut().enumerate() {
                *c = if self.pivots[i] == j { 1.0 } else { 0.0 };
            }
            self.substitute(&mut col);
            for (i, &c) in col.iter().enumerate() {
                inv[(i, j)] = c;
            }
        }
        inv
    }

    /// Unit lower triangular factor.
    pub fn lower(&self) -> Matrix {
        let n = self.order();
        let mut l = Matrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.factors[(i, j)];
            }
        }
        l
    }

    /// Upper triangular factor.
    pub fn upper(&self) -> Matrix {
        let n = self.order();
        let mut u = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                u[(i, j)] = self.factors[(i, j)];
            }
        }
        u
    }

    /// Applies the row permutation to `a`, giving `P A`.
    pub fn permute_rows(&self, a: &Matrix) -> Matrix {
        let mut out = Vec::with_capacity(a.rows() * a.cols());
        for &p in &self.pivots {
            out.extend_from_slice(a.row(p));
        }
        Matrix::from_parts_unchecked(a.rows(), a.cols(), out)
    }
}
