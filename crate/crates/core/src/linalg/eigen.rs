//! Eigenvalues of small dense real matrices.
//!
//! Balancing, reduction to upper Hessenberg form by stabilized elementary
//! similarity transforms, then Francis double-shift QR sweeps with
//! deflation. Only eigenvalues are computed.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::Matrix;
use crate::error::{Error, Result};

/// Largest order accepted by [`eigenvalues`].
pub const MAX_EIGEN_ORDER: usize = 64;

/// Total QR sweep budget per unit of matrix order.
pub const SWEEPS_PER_ORDER: usize = 100;

/// All eigenvalues of a square matrix of order at most [`MAX_EIGEN_ORDER`],
/// sorted by real part then imaginary part.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "eigenvalues",
            expected: (a.rows(), a.rows()),
            found: a.shape(),
        });
    }
    let n = a.rows();
    if n > MAX_EIGEN_ORDER {
        return Err(Error::InvalidSpec("eigenvalues are limited to order 64"));
    }
    let mut h = Hess { n, a: a.as_slice().to_vec() };
    h.balance();
    h.reduce();
    let mut ev = h.qr_sweeps(SWEEPS_PER_ORDER * n)?;
    ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(ev)
}

struct Hess {
    n: usize,
    a: Vec<f64>,
}

impl Hess {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }

    fn balance(&mut self) {
        const RADIX: f64 = 2.0;
        let sqrdx = RADIX * RADIX;
        let n = self.n;
        let mut done = false;
        while !done {
            done = true;
            for i in 0..n {
                let (mut c, mut r) = (0.0, 0.0);
                for j in (0..n).filter(|&j| j != i) {
                    c += self.at(j, i).abs();
                    r += self.at(i, j).abs();
                }
                if c == 0.0 || r == 0.0 {
                    continue;
                }
                let s = c + r;
                let mut f = 1.0;
                let mut g = r / RADIX;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        *self.at_mut(i, j) *= g;
                        *self.at_mut(j, i) *= f;
                    }
                }
            }
        }
    }

    /// Gaussian elimination with pivoting down to upper Hessenberg form.
    fn reduce(&mut self) {
        let n = self.n;
        for m in 1..n.saturating_sub(1) {
            let mut x: f64 = 0.0;
            let mut piv = m;
            for j in m..n {
                if self.at(j, m - 1).abs() > x.abs() {
                    x = self.at(j, m - 1);
                    piv = j;
                }
            }
            if piv != m {
                for j in m - 1..n {
                    self.a.swap(piv * n + j, m * n + j);
                }
                for j in 0..n {
                    self.a.swap(j * n + piv, j * n + m);
                }
            }
            if x != 0.0 {
                for i in m + 1..n {
                    let mut y = self.at(i, m - 1);
                    if y != 0.0 {
                        y /= x;
                        *self.at_mut(i, m - 1) = 0.0;
                        for j in m..n {
                            let v = self.at(m, j);
                            *self.at_mut(i, j) -= y * v;
                        }
                        for j in 0..n {
                            let v = self.at(j, i);
                            *self.at_mut(j, m) += y * v;
                        }
                    }
                }
            }
        }
    }

    fn qr_sweeps(&mut self, budget: usize) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut wr = vec![0.0; n];
        let mut wi = vec![0.0; n];
        let mut anorm = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(1)..n {
                anorm += self.at(i, j).abs();
            }
        }

        let mut sweeps = 0usize;
        let mut t = 0.0;
        let mut nn = n as isize - 1;
        while nn >= 0 {
            let mut its = 0;
            loop {
                let u = nn as usize;
                // look for a single small subdiagonal element
                let mut l = u;
                while l >= 1 {
                    let mut s = self.at(l - 1, l - 1).abs() + self.at(l, l).abs();
                    if s == 0.0 {
                        s = anorm;
                    }
                    if self.at(l, l - 1).abs() + s == s {
                        *self.at_mut(l, l - 1) = 0.0;
                        break;
                    }
                    l -= 1;
                }
                let mut x = self.at(u, u);
                if l == u {
                    wr[u] = x + t;
                    wi[u] = 0.0;
                    nn -= 1;
                } else {
                    let mut y = self.at(u - 1, u - 1);
                    let mut w = self.at(u, u - 1) * self.at(u - 1, u);
                    if l == u - 1 {
                        let p = 0.5 * (y - x);
                        let q = p * p + w;
                        let mut z = libm::sqrt(q.abs());
                        x += t;
                        if q >= 0.0 {
                            z = p + z.copysign(p);
                            wr[u - 1] = x + z;
                            wr[u] = if z != 0.0 { x - w / z } else { x + z };
                            wi[u - 1] = 0.0;
                            wi[u] = 0.0;
                        } else {
                            wr[u - 1] = x + p;
                            wr[u] = x + p;
                            wi[u - 1] = -z;
                            wi[u] = z;
                        }
                        nn -= 2;
                    } else {
                        if sweeps >= budget {
                            return Err(Error::NoConvergence { iterations: sweeps });
                        }
                        if its == 10 || its == 20 {
                            // exceptional shift
                            t += x;
                            for i in 0..=u {
                                *self.at_mut(i, i) -= x;
                            }
                            let s = self.at(u, u - 1).abs() + self.at(u - 1, u - 2).abs();
                            x = 0.75 * s;
                            y = x;
                            w = -0.4375 * s * s;
                        }
                        its += 1;
                        sweeps += 1;
                        self.francis_step(l, u, x, y, w);
                    }
                }
                if nn < 0 || (l as isize) >= nn - 1 {
                    break;
                }
            }
        }
        Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
    }

    fn francis_step(&mut self, l: usize, u: usize, x: f64, y: f64, w: f64) {
        let (mut p, mut q, mut r, mut z);
        // find two consecutive small subdiagonal elements
        let mut m = u - 2;
        loop {
            z = self.at(m, m);
            let rr = x - z;
            let s = y - z;
            p = (rr * s - w) / self.at(m + 1, m) + self.at(m, m + 1);
            q = self.at(m + 1, m + 1) - z - rr - s;
            r = self.at(m + 2, m + 1);
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            let a = self.at(m, m - 1).abs() * (q.abs() + r.abs());
            let b = p.abs() * (self.at(m - 1, m - 1).abs() + z.abs() + self.at(m + 1, m + 1).abs());
            if a + b == b {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=u {
            *self.at_mut(i, i - 2) = 0.0;
            if i != m + 2 {
                *self.at_mut(i, i - 3) = 0.0;
            }
        }
        let mut xx = 0.0;
        for k in m..u {
            if k != m {
                p = self.at(k, k - 1);
                q = self.at(k + 1, k - 1);
                r = if k != u - 1 { self.at(k + 2, k - 1) } else { 0.0 };
                xx = p.abs() + q.abs() + r.abs();
                if xx != 0.0 {
                    p /= xx;
                    q /= xx;
                    r /= xx;
                }
            }
            let s = libm::sqrt(p * p + q * q + r * r).copysign(p);
            if s == 0.0 {
                continue;
            }
            if k == m {
                if l != m {
                    *self.at_mut(k, k - 1) = -self.at(k, k - 1);
                }
            } else {
                *self.at_mut(k, k - 1) = -s * xx;
            }
            p += s;
            let xk = p / s;
            let yk = q / s;
            let zk = r / s;
            q /= p;
            r /= p;
            for j in k..=u {
                let mut pj = self.at(k, j) + q * self.at(k + 1, j);
                if k != u - 1 {
                    pj += r * self.at(k + 2, j);
                    *self.at_mut(k + 2, j) -= pj * zk;
                }
                *self.at_mut(k + 1, j) -= pj * yk;
                *self.at_mut(k, j) -= pj * xk;
            }
            let mmin = if u < k + 3 { u } else { k + 3 };
            for i in l..=mmin {
                let mut pi = xk * self.at(i, k) + yk * self.at(i, k + 1);
                if k != u - 1 {
                    pi += zk * self.at(i, k + 2);
                    *self.at_mut(i, k + 2) -= pi * r;
                }
                *self.at_mut(i, k + 1) -= pi * q;
                *self.at_mut(i, k) -= pi;
            }
        }
    }
}
