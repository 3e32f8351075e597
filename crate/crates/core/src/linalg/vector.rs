use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Vector norm selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NormKind {
    One,
    #[default]
    Two,
    Inf,
}

/// Dense real column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    /// Wraps `data`, rejecting empty input and non-finite entries.
    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyShape);
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { data })
    }

    pub fn from_slice(data: &[f64]) -> Result<Self> {
        Self::from_vec(data.to_vec())
    }

    /// Builds a vector from `f(i)` for `i in 0..len`.
    pub fn from_fn(len: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::from_vec((0..len).map(f).collect())
    }

    /// Wraps data produced by arithmetic on validated operands.
    pub(crate) fn from_vec_unchecked(data: Vec<f64>) -> Self {
        debug_assert!(!data.is_empty());
        Self { data }
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "vector length must be positive");
        Self { data: vec![0.0; len] }
    }

    pub fn filled(len: usize, value: f64) -> Self {
        assert!(len > 0, "vector length must be positive");
        Self { data: vec![value; len] }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn iter(&self) -> core::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        super::norm(self, kind)
    }

    #[inline]
    pub fn norm_inf(&self) -> f64 {
        self.norm(NormKind::Inf)
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        self.check_len(other, "dot")?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Vector) -> Result<()> {
        self.check_len(other, "axpy")?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scale(&self, alpha: f64) -> Vector {
        self.map(|x| alpha * x)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector::from_vec_unchecked(self.data.iter().map(|&x| f(x)).collect())
    }

    pub(crate) fn zip_with(
        &self,
        other: &Vector,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Vector> {
        self.check_len(other, op)?;
        Ok(Vector::from_vec_unchecked(
            self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    fn check_len(&self, other: &Vector, op: &'static str) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                op,
                expected: (self.len(), 1),
                found: (other.len(), 1),
            });
        }
        Ok(())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for Vector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.data
    }
}
