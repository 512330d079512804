//! Extended polynomial bounds.
//!
//! `xpoly₀(M)` is the largest Fourier level on which the Gram matrix `M` has
//! diagonal weight. For phase matrices, the ε-error version asks for the
//! smallest degree of a Gram matrix `N` that is an ε-valid output for `Φ_f`;
//! writing `N = B Y Bᵀ` with `B` the orthonormal characters of degree `≤ d`
//! and the output direction as `s = Y^{1/2}u`, a degree `d` is feasible iff
//!
//! ```text
//! max γ  s.t.  [[1, sᵀ], [s, Y]] ⪰ 0,  diag(B Y Bᵀ) = 1,  φ(x)(Bs)_x ≥ γ
//! ```
//!
//! reaches `γ ≥ √(1-ε)`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{character, weight, BooleanFunction};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::gram::{
    fourier_diagonal, phase_matrix, phase_validity_check, FourierProjectorFamily, GramMatrix,
    OracleAction, ProjectorFamily,
};
use crate::linalg::SymMatrix;
use crate::solver::{solve_sdp, ConeProgram, Feasibility, SolveStatus};

/// Largest `|S|` with `⟨χ_S|M|χ_S⟩ > τ_deg`.
pub fn xpoly0(m: &GramMatrix, tol: &Tolerances) -> usize {
    level_of_diagonal(&m.fourier_diagonal(), tol.deg_threshold(m.n()))
}

pub(crate) fn level_of_diagonal(diag: &[f64], threshold: f64) -> usize {
    diag.iter()
        .enumerate()
        .filter(|(_, &d)| d > threshold)
        .map(|(s, _)| weight(s))
        .max()
        .unwrap_or(0)
}

/// Feasibility of one degree in the ε-scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XpolyStep {
    pub degree: usize,
    /// Best achievable `min_x φ(x)⟨u|ψ_x⟩` at this degree.
    pub overlap: f64,
    pub verdict: Feasibility,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XpolyResult {
    pub value: usize,
    pub eps: f64,
    /// Fourier diagonal of the certifying matrix.
    pub witness_diagonal: Vec<f64>,
    /// The valid output `N` (for ε > 0, the SDP optimum at `value`).
    pub witness: GramMatrix,
    /// Overlaps `t_x = ⟨u|ψ_x⟩`.
    pub overlaps: Vec<f64>,
    pub scan: Vec<XpolyStep>,
    /// Some scanned degree fell inside the marginal band and was counted
    /// as feasible.
    pub marginal: bool,
}

/// Exact `xpoly_ε(Φ_f)` by scanning degrees `d = 0..deg(f)`.
pub fn xpoly_eps_phase(f: &BooleanFunction, eps: f64, tol: &Tolerances) -> Result<XpolyResult> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Input(format!("ε = {eps} outside [0, 1)")));
    }
    let phi = phase_matrix(f)?;
    let top = f.degree();
    let exact = |scan: Vec<XpolyStep>, marginal| XpolyResult {
        value: top,
        eps,
        witness_diagonal: phi.fourier_diagonal(),
        witness: phi.clone(),
        overlaps: vec![1.0; f.size()],
        scan,
        marginal,
    };
    if eps == 0.0 {
        return Ok(exact(vec![], false));
    }
    let threshold = (1.0 - eps).sqrt();
    let mut scan = Vec::new();
    let mut marginal = false;
    for d in 0..top {
        let (step, n_mat, t) = best_overlap_at_degree(f, d, tol)?;
        let verdict = if step.overlap > threshold + tol.marginal {
            Feasibility::Feasible
        } else if step.overlap < threshold - tol.marginal {
            Feasibility::Infeasible
        } else {
            Feasibility::Marginal
        };
        let step = XpolyStep { verdict, ..step };
        let accept = verdict != Feasibility::Infeasible;
        marginal |= verdict == Feasibility::Marginal;
        scan.push(step);
        if accept {
            let witness = GramMatrix::from_parts(f.n(), n_mat);
            return Ok(XpolyResult {
                value: d,
                eps,
                witness_diagonal: witness.fourier_diagonal(),
                witness,
                overlaps: t,
                scan,
                marginal,
            });
        }
    }
    Ok(exact(scan, marginal))
}

/// Solves the overlap SDP at degree `d` and returns the step, the
/// renormalized `N` and the overlaps.
pub fn best_overlap_at_degree(
    f: &BooleanFunction,
    d: usize,
    tol: &Tolerances,
) -> Result<(XpolyStep, SymMatrix, Vec<f64>)> {
    let size = f.size();
    let basis: Vec<usize> = (0..size).filter(|&s| weight(s) <= d).collect();
    let m = basis.len();
    let k = m + 1;
    let norm = 1.0 / (size as f64).sqrt();
    let b = |x: usize, j: usize| norm * character(basis[j], x);

    // Plain lower-triangle entries of Z, then γ.
    let zvar = |i: usize, j: usize| {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        crate::solver::svec_index(k, i, j)
    };
    let gamma = crate::solver::svec_len(k);
    let mut p = ConeProgram::new(gamma + 1);
    let mut obj = vec![0.0; gamma + 1];
    obj[gamma] = -1.0;
    p.set_objective(obj);
    p.add_psd(k, |i, j| (vec![(zvar(i, j), 1.0)], 0.0));
    p.add_equality(vec![(zvar(0, 0), 1.0)], 1.0);
    for x in 0..size {
        let mut row = Vec::with_capacity(m * (m + 1) / 2);
        for a in 0..m {
            for c in 0..=a {
                let w = if a == c { 1.0 } else { 2.0 };
                row.push((zvar(a + 1, c + 1), w * b(x, a) * b(x, c)));
            }
        }
        p.add_equality(row, 1.0);
    }
    for x in 0..size {
        let sx = f.sign(x);
        let mut row: Vec<(usize, f64)> = (0..m).map(|a| (zvar(a + 1, 0), sx * b(x, a))).collect();
        row.push((gamma, -1.0));
        p.add_nonneg(row, 0.0);
    }
    let sol = solve_sdp(&p, &tol.admm())?;
    if sol.report.status != SolveStatus::Optimal {
        return Err(Error::numeric(
            "xpoly overlap SDP",
            format!(
                "degree {d}: status {:?}, residuals {:.2e}/{:.2e} after {} iterations",
                sol.report.status,
                sol.report.primal_residual,
                sol.report.dual_residual,
                sol.report.iterations
            ),
        ));
    }
    let y = DMatrix::from_fn(m, m, |a, c| sol.x[zvar(a + 1, c + 1)]);
    let s: Vec<f64> = (0..m).map(|a| sol.x[zvar(a + 1, 0)]).collect();
    let bm = DMatrix::from_fn(size, m, &b);
    let n_raw = &bm * &y * bm.transpose();
    // Rescale to an exact unit diagonal; the first-order change of the
    // Fourier support vanishes because N annihilates the high levels.
    let scale: Vec<f64> = (0..size)
        .map(|x| 1.0 / n_raw[(x, x)].max(f64::MIN_POSITIVE).sqrt())
        .collect();
    let n_mat = SymMatrix::symmetrized(DMatrix::from_fn(size, size, |x, z| {
        scale[x] * scale[z] * n_raw[(x, z)]
    }));
    let t: Vec<f64> = (0..size)
        .map(|x| scale[x] * (0..m).map(|a| b(x, a) * s[a]).sum::<f64>())
        .collect();
    let step = XpolyStep {
        degree: d,
        overlap: sol.x[gamma],
        verdict: Feasibility::Marginal,
        iterations: sol.report.iterations,
        primal_residual: sol.report.primal_residual,
        dual_residual: sol.report.dual_residual,
    };
    Ok((step, n_mat, t))
}

/// Re-checks an [`XpolyResult`]: `N` is a normalized Gram matrix with no
/// weight above `value` and passes the convex output check.
pub fn verify_xpoly_result(
    f: &BooleanFunction,
    r: &XpolyResult,
    tol: &Tolerances,
) -> Result<bool> {
    let n = GramMatrix::new(f.n(), r.witness.matrix().clone(), tol)?;
    let fam = FourierProjectorFamily::new(f.n())?;
    let above: f64 = fam.level_weights(n.matrix())[r.value + 1..].iter().sum();
    if above > tol.deg_threshold(f.n()) {
        return Ok(false);
    }
    let v = phase_validity_check(&n, f, r.eps, tol)?;
    Ok(v.verdict != Feasibility::Infeasible)
}

/// Which of the family conditions failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyCondition {
    /// Each member is a symmetric idempotent.
    Projector,
    /// `Σ_k Π′_k = I`.
    Completeness,
    /// `tr(Π′_0 J) = 2ⁿ`.
    Vacuum,
    /// `tr[(Π′_l∘D_i)Π′_k] = 0` for `|l - k| > 1`.
    Locality,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyViolation {
    pub condition: FamilyCondition,
    pub detail: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyReport {
    pub completeness_error: f64,
    pub vacuum_trace: f64,
    pub worst_locality: f64,
    pub violations: Vec<FamilyViolation>,
}

impl FamilyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, c: FamilyCondition) -> bool {
        self.violations.iter().any(|v| v.condition == c)
    }
}

const COMPLETENESS_TOL: f64 = 1e-9;
const VACUUM_TOL: f64 = 1e-6;
const LOCALITY_TOL: f64 = 1e-8;

pub fn validate_projector_family(family: &ProjectorFamily) -> FamilyReport {
    let dim = 1usize << family.n;
    let mut violations = Vec::new();
    if family.is_empty() {
        violations.push(FamilyViolation {
            condition: FamilyCondition::Completeness,
            detail: "family is empty".into(),
            value: 1.0,
        });
        return FamilyReport {
            completeness_error: 1.0,
            vacuum_trace: 0.0,
            worst_locality: 0.0,
            violations,
        };
    }
    for (k, p) in family.projectors.iter().enumerate() {
        if p.dim() != dim {
            violations.push(FamilyViolation {
                condition: FamilyCondition::Projector,
                detail: format!("member {k} has dimension {}", p.dim()),
                value: f64::INFINITY,
            });
            continue;
        }
        let sq = p.as_matrix() * p.as_matrix();
        let err = (sq - p.as_matrix()).amax();
        if err > COMPLETENESS_TOL {
            violations.push(FamilyViolation {
                condition: FamilyCondition::Projector,
                detail: format!("member {k} is not idempotent"),
                value: err,
            });
        }
    }
    if !violations.is_empty() {
        return FamilyReport {
            completeness_error: f64::NAN,
            vacuum_trace: f64::NAN,
            worst_locality: f64::NAN,
            violations,
        };
    }

    let mut sum = SymMatrix::zeros(dim);
    for p in &family.projectors {
        sum = sum.add(p);
    }
    let completeness_error = sum.sub(&SymMatrix::identity(dim)).max_abs();
    if completeness_error > COMPLETENESS_TOL {
        violations.push(FamilyViolation {
            condition: FamilyCondition::Completeness,
            detail: "members do not sum to the identity".into(),
            value: completeness_error,
        });
    }
    let vacuum_trace = family.projectors[0].trace_product(&SymMatrix::ones(dim));
    if (vacuum_trace - dim as f64).abs() > VACUUM_TOL {
        violations.push(FamilyViolation {
            condition: FamilyCondition::Vacuum,
            detail: format!("tr(Π′_0 J) = {vacuum_trace}, expected {dim}"),
            value: vacuum_trace,
        });
    }
    let mut worst_locality = 0.0f64;
    for i in 1..=family.n {
        let action = OracleAction::new(family.n, i).expect("index in range");
        let moved: Vec<SymMatrix> = family.projectors.iter().map(|p| action.apply(p)).collect();
        for (l, ml) in moved.iter().enumerate() {
            for (k, pk) in family.projectors.iter().enumerate() {
                if l.abs_diff(k) <= 1 {
                    continue;
                }
                let v = ml.trace_product(pk).abs();
                worst_locality = worst_locality.max(v);
                if v > LOCALITY_TOL {
                    violations.push(FamilyViolation {
                        condition: FamilyCondition::Locality,
                        detail: format!("tr[(Π′_{l}∘D_{i})Π′_{k}] = {v:.3e}"),
                        value: v,
                    });
                }
            }
        }
    }
    FamilyReport {
        completeness_error,
        vacuum_trace,
        worst_locality,
        violations,
    }
}

/// `max{k : tr(Π′_k M) > τ_deg}` for a family that passes validation.
pub fn projector_family_bound(
    m: &GramMatrix,
    family: &ProjectorFamily,
    tol: &Tolerances,
) -> Result<usize> {
    if family.n != m.n() {
        return Err(Error::Input("family and Gram matrix differ in n".into()));
    }
    let report = validate_projector_family(family);
    if let Some(v) = report.violations.first() {
        return Err(Error::Domain(format!(
            "invalid projector family ({:?}): {}",
            v.condition, v.detail
        )));
    }
    let threshold = tol.deg_threshold(m.n());
    Ok(family
        .projectors
        .iter()
        .enumerate()
        .filter(|(_, p)| p.trace_product(m.matrix()) > threshold)
        .map(|(k, _)| k)
        .max()
        .unwrap_or(0))
}

/// A random valid family grouping Fourier characters by a 1-Lipschitz
/// labeling `g(S) = min_j (h_j + d_H(S, C_j))` with a centre at `∅` of
/// height `0`, so that `g(∅) = 0` and neighbouring sets differ by at most 1.
pub fn random_lipschitz_family<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ProjectorFamily> {
    let size = 1usize << n;
    let centres = rng.random_range(1..=3);
    let mut anchors = vec![(0usize, 0usize)];
    for _ in 0..centres {
        anchors.push((rng.random_range(0..size), rng.random_range(0..=n)));
    }
    ProjectorFamily::from_fourier_labels(n, |s| {
        anchors
            .iter()
            .map(|&(c, h)| h + weight(s ^ c))
            .min()
            .expect("anchors are nonempty")
    })
}

/// Merges Fourier levels pairwise: `Π″_k = Π_{2k} + Π_{2k+1}`.
pub fn paired_levels_family(n: usize) -> Result<ProjectorFamily> {
    ProjectorFamily::from_fourier_labels(n, |s| weight(s) / 2)
}

/// Fourier diagonal-based dominance check: `tr[Π_{>k} M]` for each `k`.
pub fn weight_above(m: &GramMatrix, k: usize) -> f64 {
    fourier_diagonal(m.matrix())
        .iter()
        .enumerate()
        .filter(|(s, _)| weight(*s) > k)
        .map(|(_, d)| d)
        .sum()
}
