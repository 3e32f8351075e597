//! Polynomial nonlinear systems `psi(u) = D u + sum_t N_t(u) + b`.

use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::hadamard::{hadamard_power_vec, hadamard_product_vec};
use crate::linalg::{Matrix, Vector};

/// Shape of a homogeneous nonlinear term.
#[derive(Clone, Debug, PartialEq)]
pub enum TermForm {
    /// `(A_p u) o (A_r u)^(o s)`, order `1 + s`.
    PointwiseProduct { a_p: Matrix, a_r: Matrix, s: f64 },
    /// `A u^(o k)`, order `k`.
    Power { a: Matrix, k: f64 },
}

/// One homogeneous nonlinear term of a [`PolySystem`].
#[derive(Clone, Debug, PartialEq)]
pub struct PolyTerm {
    form: TermForm,
}

fn check_square(a: &Matrix, n: usize, op: &'static str) -> Result<()> {
    if a.shape() != (n, n) {
        return Err(Error::DimensionMismatch { op, expected: (n, n), found: a.shape() });
    }
    Ok(())
}

impl PolyTerm {
    /// Pointwise-product term. `a_p` and `a_r` must be square of equal order
    /// and `s` must differ from -1.
    pub fn pointwise_product(a_p: Matrix, a_r: Matrix, s: f64) -> Result<Self> {
        check_square(&a_p, a_p.rows(), "pointwise_product")?;
        check_square(&a_r, a_p.rows(), "pointwise_product")?;
        if !s.is_finite() || s == -1.0 {
            return Err(Error::InvalidSpec("pointwise-product exponent must be finite and != -1"));
        }
        Ok(Self { form: TermForm::PointwiseProduct { a_p, a_r, s } })
    }

    /// Power term. `a` must be square and `k` nonzero.
    pub fn power(a: Matrix, k: f64) -> Result<Self> {
        check_square(&a, a.rows(), "power")?;
        if !k.is_finite() || k == 0.0 {
            return Err(Error::InvalidSpec("power exponent must be finite and nonzero"));
        }
        Ok(Self { form: TermForm::Power { a, k } })
    }

    pub fn form(&self) -> &TermForm {
        &self.form
    }

    /// System order `n` the term acts on.
    pub fn dim(&self) -> usize {
        match &self.form {
            TermForm::PointwiseProduct { a_p, .. } => a_p.rows(),
            TermForm::Power { a, .. } => a.rows(),
        }
    }

    /// Homogeneity order `m`: `1 + s` or `k`.
    pub fn order(&self) -> f64 {
        term_order(self)
    }

    /// Evaluates the term at `u`.
    pub fn eval(&self, u: &Vector) -> Result<Vector> {
        eval_term(self, u)
    }
}

/// Homogeneity order of a term.
pub fn term_order(t: &PolyTerm) -> f64 {
    match &t.form {
        TermForm::PointwiseProduct { s, .. } => 1.0 + s,
        TermForm::Power { k, .. } => *k,
    }
}

/// `(A_p u) o (A_r u)^(o s)` or `A u^(o k)`.
pub fn eval_term(t: &PolyTerm, u: &Vector) -> Result<Vector> {
    if u.len() != t.dim() {
        return Err(Error::DimensionMismatch {
            op: "eval_term",
            expected: (t.dim(), 1),
            found: (u.len(), 1),
        });
    }
    match &t.form {
        TermForm::PointwiseProduct { a_p, a_r, s } => {
            let p = a_p.mul_vec(u)?;
            if *s == 0.0 {
                return Ok(p);
            }
            let r = hadamard_power_vec(&a_r.mul_vec(u)?, *s)?;
            hadamard_product_vec(&p, &r)
        }
        TermForm::Power { a, k } => {
            if *k == 1.0 {
                return a.mul_vec(u);
            }
            a.mul_vec(&hadamard_power_vec(u, *k)?)
        }
    }
}

/// A polynomial system `psi(u) = D u + sum_t N_t(u) + b`.
///
/// Immutable after construction. Every evaluation of a nonlinear term made
/// through the system bumps a shared counter, so callers can check which code
/// paths evaluate the nonlinear vector.
#[derive(Debug)]
pub struct PolySystem {
    n: usize,
    d: Option<Matrix>,
    terms: Vec<PolyTerm>,
    b: Vector,
    term_evals: AtomicUsize,
}

impl Clone for PolySystem {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            d: self.d.clone(),
            terms: self.terms.clone(),
            b: self.b.clone(),
            term_evals: AtomicUsize::new(0),
        }
    }
}

impl PartialEq for PolySystem {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d && self.terms == other.terms && self.b == other.b
    }
}

impl PolySystem {
    /// Builds a system of order `b.len()`. `d = None` means no linear part.
    pub fn new(d: Option<Matrix>, terms: Vec<PolyTerm>, b: Vector) -> Result<Self> {
        let n = b.len();
        if let Some(d) = &d {
            check_square(d, n, "PolySystem::new")?;
        }
        for t in &terms {
            if t.dim() != n {
                return Err(Error::DimensionMismatch {
                    op: "PolySystem::new",
                    expected: (n, n),
                    found: (t.dim(), t.dim()),
                });
            }
        }
        Ok(Self { n, d, terms, b, term_evals: AtomicUsize::new(0) })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Linear part `D`, if any.
    pub fn linear(&self) -> Option<&Matrix> {
        self.d.as_ref()
    }

    /// `D` materialized, zero when absent.
    pub fn linear_or_zero(&self) -> Matrix {
        self.d.clone().unwrap_or_else(|| Matrix::zeros(self.n, self.n))
    }

    pub fn terms(&self) -> &[PolyTerm] {
        &self.terms
    }

    pub fn constant(&self) -> &Vector {
        &self.b
    }

    /// The single order shared by every nonlinear term, if there is one.
    pub fn common_order(&self) -> Option<f64> {
        let first = self.terms.first()?.order();
        self.terms.iter().all(|t| t.order() == first).then_some(first)
    }

    /// Number of nonlinear-term evaluations performed through this system.
    pub fn term_evaluations(&self) -> usize {
        self.term_evals.load(Ordering::Relaxed)
    }

    pub fn reset_term_evaluations(&self) {
        self.term_evals.store(0, Ordering::Relaxed);
    }

    fn check_point(&self, u: &Vector, op: &'static str) -> Result<()> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch { op, expected: (self.n, 1), found: (u.len(), 1) });
        }
        Ok(())
    }

    fn linear_plus_constant(&self, u: &Vector) -> Result<Vector> {
        match &self.d {
            Some(d) => d.mul_vec(u)?.add(&self.b),
            None => Ok(self.b.clone()),
        }
    }

    fn accumulate(&self, u: &Vector, weight: impl Fn(&PolyTerm) -> f64) -> Result<Vector> {
        self.check_point(u, "eval_residual")?;
        let mut acc = self.linear_plus_constant(u)?;
        for t in &self.terms {
            self.term_evals.fetch_add(1, Ordering::Relaxed);
            acc.axpy(weight(t), &eval_term(t, u)?)?;
        }
        Ok(acc)
    }

    /// `psi(u) = D u + sum_t N_t(u) + b`.
    pub fn residual(&self, u: &Vector) -> Result<Vector> {
        self.accumulate(u, |_| 1.0)
    }

    /// `D u + sum_t m_t N_t(u) + b`, each term weighted by its order.
    pub fn scaled_residual(&self, u: &Vector) -> Result<Vector> {
        self.accumulate(u, term_order)
    }
}

/// `psi(u)` for `sys`.
pub fn eval_residual(sys: &PolySystem, u: &Vector) -> Result<Vector> {
    sys.residual(u)
}

/// `D u + sum_t m_t N_t(u) + b`: the residual with every nonlinear term
/// multiplied by its order.
pub fn eval_scaled_residual(sys: &PolySystem, u: &Vector) -> Result<Vector> {
    sys.scaled_residual(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    fn scalar(x: f64) -> Matrix {
        Matrix::from_rows(&[[x]]).unwrap()
    }

    fn swap2() -> Matrix {
        Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap()
    }

    /// u + u^2 + u^3 - 14
    fn scalar_cubic() -> PolySystem {
        PolySystem::new(
            Some(scalar(1.0)),
            vec![PolyTerm::power(scalar(1.0), 2.0).unwrap(), PolyTerm::power(scalar(1.0), 3.0).unwrap()],
            v(&[-14.0]),
        )
        .unwrap()
    }

    fn scalar_square() -> PolySystem {
        PolySystem::new(None, vec![PolyTerm::power(scalar(1.0), 2.0).unwrap()], v(&[-4.0])).unwrap()
    }

    #[test]
    fn orders() {
        let pp = |s| PolyTerm::pointwise_product(Matrix::identity(2), swap2(), s).unwrap();
        assert_eq!(term_order(&pp(1.0)), 2.0);
        assert_eq!(term_order(&pp(0.5)), 1.5);
        assert_eq!(term_order(&PolyTerm::power(Matrix::identity(2), 3.0).unwrap()), 3.0);
    }

    #[test]
    fn rejects_degenerate_terms() {
        assert!(PolyTerm::power(Matrix::identity(2), 0.0).is_err());
        assert!(PolyTerm::pointwise_product(Matrix::identity(2), swap2(), -1.0).is_err());
        assert!(PolyTerm::pointwise_product(Matrix::identity(2), Matrix::identity(3), 1.0).is_err());
        assert!(PolyTerm::power(Matrix::zeros(2, 3), 2.0).is_err());
        let t = PolyTerm::power(Matrix::identity(3), 2.0).unwrap();
        assert!(PolySystem::new(None, vec![t], v(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn eval_term_examples() {
        let t = PolyTerm::pointwise_product(Matrix::identity(2), swap2(), 1.0).unwrap();
        assert_eq!(eval_term(&t, &v(&[1.0, 2.0])).unwrap(), v(&[2.0, 2.0]));

        let t = PolyTerm::power(Matrix::identity(3), 3.0).unwrap();
        assert_eq!(eval_term(&t, &v(&[1.0, 2.0, 3.0])).unwrap(), v(&[1.0, 8.0, 27.0]));

        let a_p = Matrix::from_rows(&[[1.0, -2.0], [0.5, 3.0]]).unwrap();
        let t = PolyTerm::pointwise_product(a_p.clone(), swap2(), 0.0).unwrap();
        let u = v(&[0.3, 0.7]);
        assert_eq!(eval_term(&t, &u).unwrap(), a_p.mul_vec(&u).unwrap());
    }

    #[test]
    fn eval_term_matches_generic_elementwise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 5;
        let a_p = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)).unwrap();
        let a_r = Matrix::from_fn(n, n, |_, _| rng.gen_range(0.1..1.0)).unwrap();
        let u = Vector::from_fn(n, |_| rng.gen_range(0.1..1.0)).unwrap();
        let t = PolyTerm::pointwise_product(a_p.clone(), a_r.clone(), 0.5).unwrap();
        let got = eval_term(&t, &u).unwrap();
        for i in 0..n {
            let p: f64 = (0..n).map(|j| a_p[(i, j)] * u[j]).sum();
            let r: f64 = (0..n).map(|j| a_r[(i, j)] * u[j]).sum();
            assert!((got[i] - p * r.powf(0.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn eval_term_domain_and_shape_errors() {
        let t = PolyTerm::power(Matrix::identity(2), 1.5).unwrap();
        assert!(matches!(eval_term(&t, &v(&[1.0, -1.0])), Err(Error::DomainError { .. })));
        assert!(matches!(eval_term(&t, &v(&[1.0])), Err(Error::DimensionMismatch { .. })));
        let t = PolyTerm::pointwise_product(Matrix::identity(2), Matrix::identity(2), 0.5).unwrap();
        assert!(eval_term(&t, &v(&[-1.0, 1.0])).is_err());
    }

    #[test]
    fn residual_examples() {
        let sq = scalar_square();
        assert_eq!(eval_residual(&sq, &v(&[2.0])).unwrap(), v(&[0.0]));
        assert_eq!(eval_residual(&sq, &v(&[1.0])).unwrap(), v(&[-3.0]));
        assert_eq!(eval_residual(&scalar_cubic(), &v(&[2.0])).unwrap(), v(&[0.0]));
    }

    #[test]
    fn scaled_residual_examples() {
        assert_eq!(eval_scaled_residual(&scalar_square(), &v(&[3.0])).unwrap(), v(&[14.0]));
        assert_eq!(eval_scaled_residual(&scalar_cubic(), &v(&[2.0])).unwrap(), v(&[20.0]));
        let lin = PolySystem::new(Some(Matrix::from_rows(&[[2.0, 1.0], [0.0, 3.0]]).unwrap()), vec![], v(&[1.0, -1.0]))
            .unwrap();
        let u = v(&[0.25, -2.0]);
        assert_eq!(eval_scaled_residual(&lin, &u).unwrap(), eval_residual(&lin, &u).unwrap());
    }

    #[test]
    fn residual_is_affine_in_the_constant() {
        let sys = scalar_cubic();
        let doubled = PolySystem::new(sys.linear().cloned(), sys.terms().to_vec(), sys.constant().scale(2.0)).unwrap();
        let u = v(&[1.3]);
        let diff = eval_residual(&doubled, &u).unwrap().sub(&eval_residual(&sys, &u).unwrap()).unwrap();
        assert_eq!(diff, *sys.constant());
    }

    #[test]
    fn counter_tracks_term_evaluations() {
        let sys = scalar_cubic();
        assert_eq!(sys.term_evaluations(), 0);
        sys.residual(&v(&[1.0])).unwrap();
        sys.scaled_residual(&v(&[1.0])).unwrap();
        assert_eq!(sys.term_evaluations(), 4);
        sys.reset_term_evaluations();
        assert_eq!(sys.term_evaluations(), 0);
        assert_eq!(sys.clone(), sys);
    }

    #[test]
    fn common_order() {
        assert_eq!(scalar_cubic().common_order(), None);
        assert_eq!(scalar_square().common_order(), Some(2.0));
        assert_eq!(PolySystem::new(None, vec![], v(&[1.0])).unwrap().common_order(), None);
    }

    fn random_term(n: usize, variant: bool, exponent: f64, rng: &mut ChaCha8Rng) -> PolyTerm {
        let pos = !crate::hadamard::is_integer(exponent);
        let mut mat = |lo: f64| Matrix::from_fn(n, n, |_, _| rng.gen_range(lo..1.0)).unwrap();
        if variant {
            let a_p = mat(-1.0);
            let a_r = mat(if pos { 0.0 } else { -1.0 });
            PolyTerm::pointwise_product(a_p, a_r, exponent).unwrap()
        } else {
            PolyTerm::power(mat(-1.0), exponent).unwrap()
        }
    }

    proptest! {
        #[test]
        fn terms_are_homogeneous(
            seed in any::<u64>(),
            n in 1usize..8,
            variant in any::<bool>(),
            ei in 0usize..4,
            alpha in 0.1..3.0f64,
            flip in any::<bool>(),
        ) {
            let exponent = [1.0, 2.0, 0.5, 3.0][ei];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_term(n, variant, exponent, &mut rng);
            let integer = crate::hadamard::is_integer(exponent);
            let u = Vector::from_fn(n, |_| if integer { rng.gen_range(-1.0..1.0) } else { rng.gen_range(0.1..1.0) }).unwrap();
            let alpha = if integer && flip { -alpha } else { alpha };
            let m = term_order(&t);
            let lhs = eval_term(&t, &u.scale(alpha)).unwrap();
            let rhs = eval_term(&t, &u).unwrap().scale(libm::pow(alpha, m));
            let scale = rhs.norm_inf().max(1e-300);
            prop_assert!(lhs.sub(&rhs).unwrap().norm_inf() <= 1e-12 * scale.max(1.0));
        }
    }
}
