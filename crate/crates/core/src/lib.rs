//! Dense numerics for polynomial nonlinear algebraic systems.
//!
//! A system is written as
//!
//! ```text
//! psi(u) = D u + sum_t N_t(u) + b
//! ```
//!
//! where each `N_t` is homogeneous of some order `m_t`, either in
//! pointwise-product form `(A_p u) o (A_r u)^s` (order `1 + s`) or in power
//! form `A u^k` (order `k`). Here `o` is the Hadamard (entrywise) product.
//!
//! Homogeneity gives the identity `N(u) = (1/m) J(u) u` between a term and its
//! Jacobian. The crate builds on it to provide:
//!
//! * analytical Jacobians assembled from row/column scaling ("SJT") products
//!   ([`jacobian`]),
//! * executable checks of the identity and the linear-like stiffness form
//!   `K(u) u + b = psi(u)` ([`euler`]),
//! * a Newton iteration that never evaluates the nonlinear vector, next to
//!   standard Newton and a fixed-point `K(u) u = -b` iteration ([`solvers`]),
//! * an estimator of the relative error of an approximate Jacobian and a
//!   small "instance analysis" of `K(u)` ([`diagnostics`]),
//! * collocation / finite-difference model problems with manufactured
//!   solutions ([`discretize`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, wall-clock
//! timing and the command-line front end live in the `polyjac` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;

pub mod diagnostics;
pub mod discretize;
pub mod euler;
pub mod hadamard;
pub mod jacobian;
pub mod linalg;
pub mod polysys;
pub mod solvers;

pub use error::{Error, Result};
pub use linalg::{Matrix, NormKind, Vector};
pub use polysys::{PolySystem, PolyTerm, TermForm};
pub use num_complex::Complex64;
