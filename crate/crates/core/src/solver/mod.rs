//! Desk-scale convex engines.
//!
//! Programs are stated in the conic form
//!
//! ```text
//! minimize cᵀx  subject to  A x + s = b,  s ∈ K
//! ```
//!
//! with `x` free and `K` a product of zero cones (equalities), nonnegative
//! orthants, second-order cones and PSD cones. A PSD block of order `k`
//! occupies `k(k+1)/2` rows in `svec` layout: the lower triangle in
//! column-major order, off-diagonal entries scaled by `√2` so that the
//! Euclidean inner product on rows equals the trace inner product.
//!
//! Dual variables follow `μ ∈ K*` with `c + Aᵀμ = 0`; the dual objective
//! is `-bᵀμ`.
//!
//! LPs go through a dense two-phase simplex ([`solve_lp`]); everything with
//! SOC or PSD blocks goes through an ADMM splitting method ([`solve_conic`]).

mod admm;
mod cones;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use admm::{solve_conic, solve_sdp, solve_socp_feasibility, AdmmSettings, Feasibility};
pub use cones::project_onto_cone;
pub use simplex::{solve_lp, LpSettings};

pub type SparseRow = Vec<(usize, f64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    Zero(usize),
    NonNeg(usize),
    /// `(t, v)` with `‖v‖ ≤ t`; the size counts `t`.
    Soc(usize),
    /// Symmetric `k×k` PSD block, `k(k+1)/2` rows.
    Psd(usize),
}

impl Cone {
    pub fn rows(&self) -> usize {
        match *self {
            Cone::Zero(m) | Cone::NonNeg(m) | Cone::Soc(m) => m,
            Cone::Psd(k) => svec_len(k),
        }
    }
}

pub fn svec_len(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Position of entry `(i, j)` of a `k×k` symmetric matrix in `svec` layout.
pub fn svec_index(k: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    j * k - j * j.saturating_sub(1) / 2 + (i - j)
}

/// Scale applied to entry `(i, j)` in `svec` layout.
#[inline]
pub fn svec_scale(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        std::f64::consts::SQRT_2
    }
}

/// Symmetric matrix from its `svec`.
pub fn smat(k: usize, v: &[f64]) -> nalgebra::DMatrix<f64> {
    let mut m = nalgebra::DMatrix::zeros(k, k);
    for j in 0..k {
        for i in j..k {
            let val = v[svec_index(k, i, j)] / svec_scale(i, j);
            m[(i, j)] = val;
            m[(j, i)] = val;
        }
    }
    m
}

/// `svec` of a symmetric matrix.
pub fn svec(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let k = m.nrows();
    let mut v = vec![0.0; svec_len(k)];
    for j in 0..k {
        for i in j..k {
            v[svec_index(k, i, j)] = m[(i, j)] * svec_scale(i, j);
        }
    }
    v
}

/// A conic program. Serializes to JSON as
/// `{num_vars, objective, rows: [[[col, val], ...], ...], rhs, cones: [{"Psd": k}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<SparseRow>,
    pub rhs: Vec<f64>,
    pub cones: Vec<Cone>,
}

impl ConeProgram {
    pub fn new(num_vars: usize) -> Self {
        ConeProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            rhs: Vec::new(),
            cones: Vec::new(),
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_objective(&mut self, c: Vec<f64>) {
        assert_eq!(c.len(), self.num_vars);
        self.objective = c;
    }

    /// `Σ coef·x = rhs`.
    pub fn add_equality(&mut self, row: SparseRow, rhs: f64) {
        self.push_block(Cone::Zero(1), vec![(row, rhs)], false);
    }

    /// `Σ coef·x + constant ≥ 0`.
    pub fn add_nonneg(&mut self, row: SparseRow, constant: f64) {
        self.push_block(Cone::NonNeg(1), vec![(row, constant)], true);
    }

    /// The affine expressions `e_0 ≥ ‖(e_1, …)‖`.
    pub fn add_soc(&mut self, exprs: Vec<(SparseRow, f64)>) {
        self.push_block(Cone::Soc(exprs.len()), exprs, true);
    }

    /// The symmetric matrix with affine entries `entry(i, j)` (for `i ≥ j`)
    /// is PSD.
    pub fn add_psd(&mut self, k: usize, entry: impl Fn(usize, usize) -> (SparseRow, f64)) {
        let mut exprs = vec![(Vec::new(), 0.0); svec_len(k)];
        for j in 0..k {
            for i in j..k {
                let (row, c) = entry(i, j);
                let sc = svec_scale(i, j);
                exprs[svec_index(k, i, j)] =
                    (row.into_iter().map(|(col, v)| (col, v * sc)).collect(), c * sc);
            }
        }
        self.push_block(Cone::Psd(k), exprs, true);
    }

    // Expression blocks become `A = -C`, `b = constant`; equality rows keep `A = C`.
    fn push_block(&mut self, cone: Cone, exprs: Vec<(SparseRow, f64)>, negate: bool) {
        debug_assert_eq!(cone.rows(), exprs.len());
        // Adjacent scalar blocks of the same kind share one cone entry.
        match (cone, self.cones.last_mut()) {
            (Cone::Zero(m), Some(Cone::Zero(prev))) => *prev += m,
            (Cone::NonNeg(m), Some(Cone::NonNeg(prev))) => *prev += m,
            _ => self.cones.push(cone),
        }
        for (row, c) in exprs {
            let row = if negate {
                row.into_iter().map(|(col, v)| (col, -v)).collect()
            } else {
                row
            };
            self.rows.push(row);
            self.rhs.push(c);
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::Input("objective length differs from num_vars".into()));
        }
        if self.rows.len() != self.rhs.len() {
            return Err(Error::Input("row count differs from rhs length".into()));
        }
        let total: usize = self.cones.iter().map(Cone::rows).sum();
        if total != self.rows.len() {
            return Err(Error::Input(format!(
                "cones cover {total} rows, program has {}",
                self.rows.len()
            )));
        }
        for cone in &self.cones {
            if let Cone::Psd(k) = cone {
                if *k > 64 {
                    return Err(Error::Input(format!("PSD block of order {k} exceeds 64")));
                }
            }
        }
        if self
            .rows
            .iter()
            .flatten()
            .any(|&(col, v)| col >= self.num_vars || !v.is_finite())
        {
            return Err(Error::Input("row references a missing variable or holds a non-finite value".into()));
        }
        Ok(())
    }

    pub fn is_lp(&self) -> bool {
        self.cones
            .iter()
            .all(|c| matches!(c, Cone::Zero(_) | Cone::NonNeg(_)))
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| v * x[c]).sum())
            .collect()
    }

    /// `Aᵀ y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_vars];
        for (row, &yr) in self.rows.iter().zip(y) {
            for &(c, v) in row {
                out[c] += v * yr;
            }
        }
        out
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cone programs always serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    /// A Farkas-type certificate of primal infeasibility was found.
    InfeasibleCertificate,
    /// The objective is unbounded below.
    Unbounded,
    MaxIterations,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    /// Independent recomputation of the cone violation of the returned point.
    #[serde(default)]
    pub cone_violation: f64,
    #[serde(skip)]
    pub wall_time: std::time::Duration,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub report: SolveReport,
    pub x: Vec<f64>,
    /// Dual multipliers `μ ∈ K*` (for `Optimal`) or the certificate ray
    /// (for `InfeasibleCertificate`).
    pub dual: Vec<f64>,
}

impl Solution {
    pub fn is_optimal(&self) -> bool {
        self.report.status == SolveStatus::Optimal
    }
}

/// Independent recomputation of how far `x` is from satisfying the cones.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConeCheck {
    /// Largest `|b - Ax|` over equality rows.
    pub equality: f64,
    /// Largest distance of a cone block of `b - Ax` from its cone
    /// (`max(0, -λ_min)` for PSD blocks).
    pub cone: f64,
}

impl ConeCheck {
    pub fn worst(&self) -> f64 {
        self.equality.max(self.cone)
    }
}

pub fn check_point(program: &ConeProgram, x: &[f64]) -> Result<ConeCheck> {
    let ax = program.apply(x);
    let s: Vec<f64> = program.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut out = ConeCheck {
        equality: 0.0,
        cone: 0.0,
    };
    let mut off = 0;
    for cone in &program.cones {
        let m = cone.rows();
        let block = &s[off..off + m];
        match *cone {
            Cone::Zero(_) => {
                out.equality = block.iter().fold(out.equality, |a, v| a.max(v.abs()))
            }
            Cone::NonNeg(_) => out.cone = block.iter().fold(out.cone, |a, &v| a.max(-v)),
            Cone::Soc(_) => {
                let norm = block[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                out.cone = out.cone.max(norm - block[0]);
            }
            Cone::Psd(k) => {
                let mat = crate::linalg::SymMatrix::symmetrized(smat(k, block));
                let lmin = crate::linalg::psd_margin(&mat)?;
                out.cone = out.cone.max(-lmin);
            }
        }
        off += m;
    }
    Ok(out)
}
