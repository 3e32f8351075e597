//! Report documents (JSON and CSV) and plain-text tables.

use std::fmt::Write as _;
use std::path::Path;

use polyjac_core::diagnostics::InstanceReport;
use polyjac_core::solvers::SolveReport;
use polyjac_core::Vector;
use serde::Serialize;

use crate::args::Format;

/// Shortest round-trip decimal form, as used in the JSON output.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite or null")
}

/// `--format`, else the `--out` extension, else CSV.
pub fn resolve_format(format: Option<Format>, out: Option<&Path>) -> Format {
    format.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Csv,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecordDoc {
    pub iter: usize,
    pub residual_norm: Option<f64>,
    pub step_norm: f64,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonDoc {
    pub reference: String,
    /// `||c_k - r_k||_inf / (1 + ||r_k||_inf)` over the common iterates.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveDoc {
    pub source: String,
    pub method: String,
    pub converged: bool,
    pub iterations: usize,
    pub initial_residual: Option<f64>,
    pub final_residual: Option<f64>,
    pub failure_reason: Option<String>,
    pub loop_term_evaluations: usize,
    pub inner_sweeps: usize,
    pub records: Vec<RecordDoc>,
    pub solution: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonDoc>,
}

impl SolveDoc {
    pub fn new(source: String, rep: &SolveReport, solution: &Vector, timing: bool) -> Self {
        let records = rep
            .records
            .iter()
            .map(|r| RecordDoc {
                iter: r.iteration,
                residual_norm: r.residual_norm,
                step_norm: r.step_norm,
                millis: if timing { r.millis } else { 0.0 },
            })
            .collect();
        Self {
            source,
            method: rep.method.name().into(),
            converged: rep.converged,
            iterations: rep.iterations,
            initial_residual: rep.initial_residual,
            final_residual: rep.final_residual,
            failure_reason: rep.failure_reason.clone(),
            loop_term_evaluations: rep.loop_term_evaluations,
            inner_sweeps: rep.inner_sweeps,
            records,
            solution: solution.as_slice().to_vec(),
            comparison: None,
        }
    }

    /// `iter,residual_norm,step_norm,millis`, LF line endings. A missing
    /// residual is an empty field.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iter,residual_norm,step_norm,millis\n");
        for r in &self.records {
            let res = r.residual_norm.map(num).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{}", r.iter, res, num(r.step_norm), num(r.millis));
        }
        s
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let dev = self.comparison.as_ref().map(|c| &c.deviations);
        let _ = write!(s, "{:>5} {:>14} {:>14} {:>10}", "iter", "residual", "step", "ms");
        if dev.is_some() {
            let _ = write!(s, " {:>14}", "deviation");
        }
        s.push('\n');
        for (i, r) in self.records.iter().enumerate() {
            let res = r.residual_norm.map_or_else(|| "-".into(), |x| format!("{x:.6e}"));
            let _ = write!(s, "{:>5} {:>14} {:>14.6e} {:>10.3}", r.iter, res, r.step_norm, r.millis);
            if let Some(d) = dev {
                // deviations[0] is the shared starting point
                match d.get(i + 1) {
                    Some(x) => {
                        let _ = write!(s, " {x:>14.6e}");
                    }
                    None => {
                        let _ = write!(s, " {:>14}", "-");
                    }
                }
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceDoc {
    pub n: usize,
    pub eigenvalues: Vec<ComplexDoc>,
    pub condition: f64,
    pub symmetry_deviation: f64,
    pub symmetric: bool,
    pub circulant: bool,
    pub trace: f64,
    pub eigenvalue_sum: ComplexDoc,
    pub trace_deviation: f64,
}

impl From<&InstanceReport> for InstanceDoc {
    fn from(r: &InstanceReport) -> Self {
        let c = |z: &polyjac_core::Complex64| ComplexDoc { re: z.re, im: z.im };
        Self {
            n: r.n,
            eigenvalues: r.eigenvalues.iter().map(c).collect(),
            condition: r.condition,
            symmetry_deviation: r.symmetry_deviation,
            symmetric: r.symmetric,
            circulant: r.circulant,
            trace: r.trace,
            eigenvalue_sum: c(&r.eigenvalue_sum),
            trace_deviation: r.trace_deviation(),
        }
    }
}

impl InstanceDoc {
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "instance analysis of K(u), n = {}", self.n);
        let _ = writeln!(s, "  condition (1-norm)   {:.6e}", self.condition);
        let _ = writeln!(s, "  symmetry deviation   {:.6e}{}", self.symmetry_deviation, if self.symmetric { " (symmetric)" } else { "" });
        let _ = writeln!(s, "  constant diagonals   {}", if self.circulant { "yes" } else { "no" });
        let _ = writeln!(s, "  trace                {:.12e}", self.trace);
        let _ = writeln!(s, "  eigenvalue sum       {:.12e} {:+.3e}i", self.eigenvalue_sum.re, self.eigenvalue_sum.im);
        let _ = writeln!(s, "  trace deviation      {:.3e}", self.trace_deviation);
        let _ = writeln!(s, "  eigenvalues:");
        for z in &self.eigenvalues {
            let _ = writeln!(s, "    {:>16.9e} {:+.9e}i", z.re, z.im);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepDoc {
    pub h: f64,
    /// `max |J_fd - J| / max |J|` over all entries.
    pub max_deviation: f64,
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobianDoc {
    pub source: String,
    pub n: usize,
    pub fd: String,
    pub point: String,
    pub steps: Vec<StepDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<InstanceDoc>,
}

impl JacobianDoc {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,max_deviation,estimate\n");
        for st in &self.steps {
            let _ = writeln!(s, "{},{},{}", num(st.h), num(st.max_deviation), num(st.estimate));
        }
        s
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} n = {}, {} differences at the {} point", self.source, self.n, self.fd, self.point);
        let _ = writeln!(s, "{:>10} {:>14} {:>14}", "h", "deviation", "estimate");
        for st in &self.steps {
            let _ = writeln!(s, "{:>10.1e} {:>14.6e} {:>14.6e}", st.h, st.max_deviation, st.estimate);
        }
        if let Some(r) = &self.report {
            s.push_str(&r.table());
        }
        s
    }
}
