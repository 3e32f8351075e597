//! Finite-difference (collocation) model problems on `[0, 1]`.
//!
//! Each problem is discretized on `n` interior points of a uniform grid,
//! `x_i = i h` with `h = 1/(n+1)`, and written in Hadamard form
//! `D u + N(u) + b = 0`. The forcing comes from a manufactured solution with
//! closed-form derivatives, and `b = -f`.
//!
//! | problem            | equation                       | manufactured `u` |
//! |--------------------|--------------------------------|------------------|
//! | `burgers_steady`   | `-nu u'' + u u' = f`           | `sin(pi x)`      |
//! | `fractional_sqrt`  | `u (u')^(1/2) + u = f`         | `1 + x`          |
//! | `duffing_cubic`    | `u'' - u^3 = f`                | `sin(pi x)`      |
//! | `mixed_quad_cubic` | `u'' + u u' + u^3 = f`         | `x (1 - x)`      |
//!
//! Zero Dirichlet values are folded out of the difference matrices.
//! `fractional_sqrt` has nonzero boundary values, so its first-derivative
//! matrix uses one-sided differences in the first and last rows and needs no
//! boundary data at all (still exact on linear functions).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::polysys::{PolySystem, PolyTerm};

/// Allowed range of the Burgers viscosity.
pub const VISCOSITY_RANGE: (f64, f64) = (1e-3, 10.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProblemKind {
    BurgersSteady,
    FractionalSqrt,
    DuffingCubic,
    MixedQuadCubic,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] =
        [Self::BurgersSteady, Self::FractionalSqrt, Self::DuffingCubic, Self::MixedQuadCubic];

    pub fn name(self) -> &'static str {
        match self {
            Self::BurgersSteady => "burgers_steady",
            Self::FractionalSqrt => "fractional_sqrt",
            Self::DuffingCubic => "duffing_cubic",
            Self::MixedQuadCubic => "mixed_quad_cubic",
        }
    }

    /// Parameter names and defaults.
    fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            Self::BurgersSteady => &[("nu", 1.0)],
            _ => &[],
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    /// Accepts the full names and the short forms `burgers`, `fractional`,
    /// `duffing`, `mixed`.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "burgers_steady" | "burgers" => Self::BurgersSteady,
            "fractional_sqrt" | "fractional" => Self::FractionalSqrt,
            "duffing_cubic" | "duffing" => Self::DuffingCubic,
            "mixed_quad_cubic" | "mixed" => Self::MixedQuadCubic,
            _ => return Err(Error::InvalidSpec("unknown problem name")),
        })
    }
}

/// Declarative description of a discretized model problem on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// Interior grid points.
    pub n: usize,
    pub params: BTreeMap<String, f64>,
}

impl ProblemSpec {
    /// Spec with default parameters.
    pub fn new(kind: ProblemKind, n: usize) -> Self {
        let params = kind.defaults().iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Self { kind, n, params }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidSpec("at least 3 interior grid points are required"));
        }
        let known = self.kind.defaults();
        for (name, value) in &self.params {
            if !known.iter().any(|(k, _)| k == name) {
                return Err(Error::InvalidSpec("unknown parameter for this problem"));
            }
            if !value.is_finite() {
                return Err(Error::InvalidSpec("parameters must be finite"));
            }
        }
        if self.kind == ProblemKind::BurgersSteady {
            let nu = self.param("nu").unwrap_or(1.0);
            if !(VISCOSITY_RANGE.0..=VISCOSITY_RANGE.1).contains(&nu) {
                return Err(Error::InvalidSpec("viscosity nu must lie in [1e-3, 10]"));
            }
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.n + 1) as f64
    }
}

/// Interior grid points `x_i = i/(n+1)`, `i = 1..=n`.
pub fn grid(n: usize) -> Vec<f64> {
    let h = 1.0 / (n + 1) as f64;
    (1..=n).map(|i| i as f64 * h).collect()
}

/// Second-order central difference matrix for `d/dx` (`order = 1`) or
/// `d^2/dx^2` (`order = 2`) with zero Dirichlet values folded out.
pub fn diff_matrix(n: usize, order: u8) -> Result<Matrix> {
    if n < 3 {
        return Err(Error::InvalidSpec("at least 3 interior grid points are required"));
    }
    let h = 1.0 / (n + 1) as f64;
    let (lo, mid, hi) = match order {
        1 => (-0.5 / h, 0.0, 0.5 / h),
        2 => (1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)),
        _ => return Err(Error::InvalidSpec("difference order must be 1 or 2")),
    };
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = mid;
        if i > 0 {
            m[(i, i - 1)] = lo;
        }
        if i + 1 < n {
            m[(i, i + 1)] = hi;
        }
    }
    Ok(m)
}

/// First-difference matrix with central rows inside and one-sided first and
/// last rows; uses interior values only.
pub fn diff_matrix_one_sided(n: usize) -> Result<Matrix> {
    let mut m = diff_matrix(n, 1)?;
    let h = 1.0 / (n + 1) as f64;
    m[(0, 0)] = -1.0 / h;
    m[(0, 1)] = 1.0 / h;
    m[(n - 1, n - 2)] = -1.0 / h;
    m[(n - 1, n - 1)] = 1.0 / h;
    Ok(m)
}

/// Manufactured solution sampled at `x`.
pub fn manufactured_solution(kind: ProblemKind, x: f64) -> f64 {
    match kind {
        ProblemKind::BurgersSteady | ProblemKind::DuffingCubic => libm::sin(PI * x),
        ProblemKind::FractionalSqrt => 1.0 + x,
        ProblemKind::MixedQuadCubic => x * (1.0 - x),
    }
}

fn forcing(spec: &ProblemSpec, x: f64) -> f64 {
    match spec.kind {
        ProblemKind::BurgersSteady => {
            let nu = spec.param("nu").unwrap_or(1.0);
            let (s, c) = (libm::sin(PI * x), libm::cos(PI * x));
            nu * PI * PI * s + PI * s * c
        }
        ProblemKind::FractionalSqrt => 2.0 * (1.0 + x),
        ProblemKind::DuffingCubic => {
            let s = libm::sin(PI * x);
            -PI * PI * s - s * s * s
        }
        ProblemKind::MixedQuadCubic => {
            let u = x * (1.0 - x);
            -2.0 + u * (1.0 - 2.0 * x) + u * u * u
        }
    }
}

/// Builds the system for `spec` and the manufactured solution on the grid.
pub fn assemble(spec: &ProblemSpec) -> Result<(PolySystem, Vector)> {
    spec.validate()?;
    let n = spec.n;
    let xs = grid(n);
    let eye = Matrix::identity(n);
    let (d, terms) = match spec.kind {
        ProblemKind::BurgersSteady => {
            let nu = spec.param("nu").unwrap_or(1.0);
            let d = diff_matrix(n, 2)?.scale(-nu);
            (d, vec![PolyTerm::pointwise_product(eye, diff_matrix(n, 1)?, 1.0)?])
        }
        ProblemKind::FractionalSqrt => {
            let term = PolyTerm::pointwise_product(eye.clone(), diff_matrix_one_sided(n)?, 0.5)?;
            (eye, vec![term])
        }
        ProblemKind::DuffingCubic => (diff_matrix(n, 2)?, vec![PolyTerm::power(eye.scale(-1.0), 3.0)?]),
        ProblemKind::MixedQuadCubic => (
            diff_matrix(n, 2)?,
            vec![
                PolyTerm::pointwise_product(eye.clone(), diff_matrix(n, 1)?, 1.0)?,
                PolyTerm::power(eye, 3.0)?,
            ],
        ),
    };
    let b = Vector::from_vec(xs.iter().map(|&x| -forcing(spec, x)).collect())?;
    let exact = Vector::from_vec(xs.iter().map(|&x| manufactured_solution(spec.kind, x)).collect())?;
    Ok((PolySystem::new(Some(d), terms, b)?, exact))
}

/// Default starting point: the manufactured samples plus a smooth
/// perturbation of 1% of their magnitude.
pub fn perturbed_start(exact: &Vector) -> Vector {
    let xs = grid(exact.len());
    let amp = 0.01 * exact.norm_inf();
    Vector::from_fn(exact.len(), |i| exact[i] + amp * libm::sin(2.0 * PI * xs[i]))
        .expect("finite samples")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::euler_identity_residual;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stencils() {
        let d2 = diff_matrix(3, 2).unwrap();
        let expected = Matrix::from_rows(&[[-2.0, 1.0, 0.0], [1.0, -2.0, 1.0], [0.0, 1.0, -2.0]])
            .unwrap()
            .scale(16.0);
        assert_eq!(d2, expected);
        let d1 = diff_matrix(3, 1).unwrap();
        let expected = Matrix::from_rows(&[[0.0, 1.0, 0.0], [-1.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
            .unwrap()
            .scale(2.0);
        assert_eq!(d1, expected);
        assert!(diff_matrix(2, 1).is_err());
        assert!(diff_matrix(5, 3).is_err());
    }

    #[test]
    fn second_difference_exact_on_quadratic() {
        for n in [3, 10, 40] {
            let u = Vector::from_vec(grid(n).iter().map(|x| x * (1.0 - x)).collect()).unwrap();
            let d2u = diff_matrix(n, 2).unwrap().mul_vec(&u).unwrap();
            assert!(d2u.iter().all(|y| (y + 2.0).abs() <= 1e-10), "{d2u:?}");
        }
    }

    #[test]
    fn one_sided_difference_exact_on_linear() {
        let n = 9;
        let u = Vector::from_vec(grid(n).iter().map(|x| 1.0 + x).collect()).unwrap();
        let du = diff_matrix_one_sided(n).unwrap().mul_vec(&u).unwrap();
        assert!(du.iter().all(|y| (y - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn spec_validation() {
        assert!(ProblemSpec::new(ProblemKind::DuffingCubic, 2).validate().is_err());
        let bad_nu = ProblemSpec::new(ProblemKind::BurgersSteady, 8).with_param("nu", 100.0);
        assert!(assemble(&bad_nu).is_err());
        let unknown = ProblemSpec::new(ProblemKind::DuffingCubic, 8).with_param("nu", 1.0);
        assert!(unknown.validate().is_err());
        assert_eq!("mixed".parse::<ProblemKind>().unwrap(), ProblemKind::MixedQuadCubic);
        assert!("navier".parse::<ProblemKind>().is_err());
    }

    #[test]
    fn burgers_small_layout() {
        let (sys, exact) = assemble(&ProblemSpec::new(ProblemKind::BurgersSteady, 3)).unwrap();
        assert_eq!(sys.linear().unwrap(), &diff_matrix(3, 2).unwrap().scale(-1.0));
        assert_eq!(sys.terms().len(), 1);
        assert_eq!(sys.terms()[0].order(), 2.0);
        assert_eq!(exact.len(), 3);
    }

    fn residual_at_exact(kind: ProblemKind, n: usize) -> f64 {
        let (sys, exact) = assemble(&ProblemSpec::new(kind, n)).unwrap();
        sys.residual(&exact).unwrap().norm_inf()
    }

    #[test]
    fn truncation_error_is_second_order() {
        for kind in [ProblemKind::BurgersSteady, ProblemKind::DuffingCubic] {
            let (r1, r2) = (residual_at_exact(kind, 15), residual_at_exact(kind, 31));
            let ratio = r1 / r2;
            // h halves from 1/16 to 1/32
            assert!((ratio.log2() - 2.0).abs() < 0.3, "{kind}: ratio {ratio}");
        }
        // exact for linear/quadratic manufactured solutions
        assert!(residual_at_exact(ProblemKind::FractionalSqrt, 16) < 1e-12);
        assert!(residual_at_exact(ProblemKind::MixedQuadCubic, 16) < 1e-9);
    }

    #[test]
    fn fractional_argument_positive_near_solution() {
        let (sys, exact) = assemble(&ProblemSpec::new(ProblemKind::FractionalSqrt, 32)).unwrap();
        let crate::polysys::TermForm::PointwiseProduct { a_r, .. } = sys.terms()[0].form() else {
            panic!("expected pointwise product");
        };
        for u in [exact.clone(), perturbed_start(&exact)] {
            let r = a_r.mul_vec(&u).unwrap();
            assert!(r.iter().all(|&x| x > 0.5));
        }
    }

    #[test]
    fn assembled_systems_satisfy_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for kind in ProblemKind::ALL {
            let (sys, exact) = assemble(&ProblemSpec::new(kind, 12)).unwrap();
            for _ in 0..10 {
                let u = Vector::from_fn(12, |i| exact[i] * (1.0 + rng.gen_range(-0.005..0.005))).unwrap();
                for t in sys.terms() {
                    assert!(euler_identity_residual(t, &u).unwrap() <= 1e-12);
                }
            }
        }
    }
}
