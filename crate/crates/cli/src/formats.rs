//! JSON documents: polynomial systems and run configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use polyjac_core::{Error as CoreError, Matrix, PolySystem, PolyTerm, TermForm, Vector};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// `psi(u) = D u + sum_t N_t(u) + b` as a JSON document. Matrices are
/// arrays of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub n: usize,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub terms: Vec<TermDoc>,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub variant: Variant,
    /// `[A_p, A_r]` for a pointwise product, `[A]` for a power.
    pub matrices: Vec<Vec<Vec<f64>>>,
    /// `s` for a pointwise product, `k` for a power.
    pub exponent: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    PointwiseProduct,
    Power,
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn matrix_of(rows: &[Vec<f64>], n: usize, what: &str) -> Result<Matrix, String> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(format!("{what} must be {n}x{n}"));
    }
    Matrix::from_rows(rows).map_err(|e| format!("{what}: {e}"))
}

impl SystemDoc {
    pub fn from_system(sys: &PolySystem) -> Self {
        let terms = sys
            .terms()
            .iter()
            .map(|t| match t.form() {
                TermForm::PointwiseProduct { a_p, a_r, s } => TermDoc {
                    variant: Variant::PointwiseProduct,
                    matrices: vec![rows_of(a_p), rows_of(a_r)],
                    exponent: *s,
                },
                TermForm::Power { a, k } => TermDoc { variant: Variant::Power, matrices: vec![rows_of(a)], exponent: *k },
            })
            .collect();
        Self { n: sys.n(), d: sys.linear().map(rows_of), terms, b: sys.constant().as_slice().to_vec() }
    }

    pub fn to_system(&self) -> Result<PolySystem, String> {
        let n = self.n;
        if n == 0 {
            return Err("n must be positive".into());
        }
        if self.b.len() != n {
            return Err(format!("b has length {}, expected {n}", self.b.len()));
        }
        let d = self.d.as_deref().map(|rows| matrix_of(rows, n, "D")).transpose()?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            let what = |j: usize| format!("terms[{i}].matrices[{j}]");
            let term = match (t.variant, t.matrices.as_slice()) {
                (Variant::PointwiseProduct, [a_p, a_r]) => {
                    PolyTerm::pointwise_product(matrix_of(a_p, n, &what(0))?, matrix_of(a_r, n, &what(1))?, t.exponent)
                }
                (Variant::Power, [a]) => PolyTerm::power(matrix_of(a, n, &what(0))?, t.exponent),
                (Variant::PointwiseProduct, _) => return Err(format!("terms[{i}]: pointwise_product needs 2 matrices")),
                (Variant::Power, _) => return Err(format!("terms[{i}]: power needs 1 matrix")),
            };
            terms.push(term.map_err(|e| format!("terms[{i}]: {e}"))?);
        }
        let b = Vector::from_slice(&self.b).map_err(|e| format!("b: {e}"))?;
        PolySystem::new(d, terms, b).map_err(|e: CoreError| e.to_string())
    }
}

pub fn read_system(path: &Path) -> Result<PolySystem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let doc: SystemDoc =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    doc.to_system().map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn write_system(path: &Path, sys: &PolySystem) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(&SystemDoc::from_system(sys)).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

/// Run configuration; command-line flags override every field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    #[serde(default)]
    pub problem: Option<ProblemDoc>,
    /// Relative paths resolve against the config file's directory.
    #[serde(default)]
    pub system: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub name: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDoc {
    pub method: Option<String>,
    pub inner: Option<String>,
    pub omega: Option<f64>,
    pub tol_residual: Option<f64>,
    pub tol_step: Option<f64>,
    pub max_iters: Option<usize>,
    pub max_inner_iters: Option<usize>,
    pub inner_tol: Option<f64>,
    pub initial_guess: Option<Vec<f64>>,
}

pub fn read_config(path: &Path) -> Result<ConfigDoc, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let mut doc: ConfigDoc =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    if let (Some(sys), Some(dir)) = (doc.system.as_mut(), path.parent()) {
        if sys.is_relative() {
            *sys = dir.join(&*sys);
        }
    }
    Ok(doc)
}
