//! Operator-splitting solver for general conic programs.
//!
//! The iteration follows the OSQP/COSMO template with the constraint set
//! `C = b - K` and the splitting `Ax = z, z ∈ C`:
//!
//! ```text
//! (σI + AᵀRA) x̃ = σx - c + Aᵀ(Rz - y)
//! z_r = α A x̃ + (1-α) z,   x ← α x̃ + (1-α) x
//! z ← Π_C(z_r + R⁻¹y),     y ← y + R(z_r - z)
//! ```
//!
//! `R` is diagonal with a larger step on equality rows. The multiplier `y`
//! lands in `K*` by construction, so it is directly the dual `μ` of the
//! module convention. Infeasibility is read off the successive differences
//! of the iterates.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_point, project_onto_cone, Cone, ConeProgram, Solution, SolveReport, SolveStatus};
use crate::error::{Error, Result};

fn numeric(context: &str, detail: impl Into<String>) -> Error {
    Error::numeric(context, detail)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct AdmmSettings {
    pub rho: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub eps_infeasible: f64,
    pub max_iterations: usize,
    pub check_every: usize,
    pub adaptive_rho: bool,
    pub equality_rho_scale: f64,
}

impl Default for AdmmSettings {
    fn default() -> Self {
        AdmmSettings {
            rho: 0.1,
            sigma: 1e-6,
            alpha: 1.6,
            eps_abs: 1e-7,
            eps_rel: 1e-7,
            eps_infeasible: 1e-7,
            max_iterations: 50_000,
            check_every: 25,
            adaptive_rho: true,
            equality_rho_scale: 1e3,
        }
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Kkt {
    gram: DMatrix<f64>,
    sigma: f64,
}

impl Kkt {
    // AᵀSA with S the per-row step scales; R = ρS.
    fn new(program: &ConeProgram, scale: &[f64], sigma: f64) -> Self {
        let n = program.num_vars;
        let mut gram = DMatrix::zeros(n, n);
        for (row, &s) in program.rows.iter().zip(scale) {
            for &(i, vi) in row {
                for &(j, vj) in row {
                    gram[(i, j)] += s * vi * vj;
                }
            }
        }
        Kkt { gram, sigma }
    }

    fn factor(&self, rho: f64) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
        let mut m = &self.gram * rho;
        for i in 0..m.nrows() {
            m[(i, i)] += self.sigma;
        }
        m.cholesky()
            .ok_or_else(|| numeric("admm", "KKT matrix is not positive definite"))
    }
}

/// Distance of `v` from the dual cone `K*` (zero blocks impose nothing).
fn dual_cone_distance(cones: &[Cone], v: &[f64]) -> Result<f64> {
    let mut proj = v.to_vec();
    let mut off = 0;
    let mut free = vec![false; v.len()];
    for cone in cones {
        let m = cone.rows();
        if let Cone::Zero(_) = cone {
            free[off..off + m].iter_mut().for_each(|f| *f = true);
        }
        off += m;
    }
    // Self-dual cones: project onto K, then restore the free rows.
    project_onto_cone(cones, &mut proj)?;
    let mut d = 0.0f64;
    for i in 0..v.len() {
        if !free[i] {
            d = d.max((v[i] - proj[i]).abs());
        }
    }
    Ok(d)
}

/// Distance of `v` from `K` itself.
fn cone_distance(cones: &[Cone], v: &[f64]) -> Result<f64> {
    let mut proj = v.to_vec();
    project_onto_cone(cones, &mut proj)?;
    Ok(v.iter().zip(&proj).fold(0.0f64, |a, (x, p)| a.max((x - p).abs())))
}

/// Solves a conic program by ADMM, optionally from a warm primal point.
pub fn solve_conic(
    program: &ConeProgram,
    settings: &AdmmSettings,
    warm: Option<&[f64]>,
) -> Result<Solution> {
    program.check()?;
    let start = Instant::now();
    let n = program.num_vars;
    let m = program.num_rows();
    let b = &program.rhs;
    let c = &program.objective;

    let mut scale = vec![1.0; m];
    let mut off = 0;
    for cone in &program.cones {
        if let Cone::Zero(k) = cone {
            scale[off..off + k]
                .iter_mut()
                .for_each(|s| *s = settings.equality_rho_scale);
        }
        off += cone.rows();
    }

    let kkt = Kkt::new(program, &scale, settings.sigma);
    let mut rho = settings.rho;
    let mut chol = kkt.factor(rho)?;

    let project_c = |v: &mut Vec<f64>| -> Result<()> {
        // Π_C(v) = b - Π_K(b - v)
        let mut w: Vec<f64> = b.iter().zip(v.iter()).map(|(bi, vi)| bi - vi).collect();
        project_onto_cone(&program.cones, &mut w)?;
        for i in 0..v.len() {
            v[i] = b[i] - w[i];
        }
        Ok(())
    };

    let mut x = match warm {
        Some(w) if w.len() == n => w.to_vec(),
        Some(_) => return Err(Error::Input("warm start has the wrong length".into())),
        None => vec![0.0; n],
    };
    let mut z = program.apply(&x);
    project_c(&mut z)?;
    let mut y = vec![0.0; m];

    let c_norm = inf_norm(c);
    let alpha = settings.alpha;
    let mut status = SolveStatus::MaxIterations;
    let mut dual_out: Option<Vec<f64>> = None;
    let mut iterations = 0;
    let mut rp = f64::INFINITY;
    let mut rd = f64::INFINITY;
    let mut adapt_gap = 4 * settings.check_every;
    let mut next_adapt = adapt_gap;

    for k in 1..=settings.max_iterations {
        iterations = k;
        let rz: Vec<f64> = (0..m).map(|i| rho * scale[i] * z[i] - y[i]).collect();
        let at = program.apply_transpose(&rz);
        let rhs = DVector::from_iterator(n, (0..n).map(|j| settings.sigma * x[j] - c[j] + at[j]));
        let xt = chol.solve(&rhs);
        let zt = program.apply(xt.as_slice());

        let x_prev = std::mem::take(&mut x);
        x = (0..n).map(|j| alpha * xt[j] + (1.0 - alpha) * x_prev[j]).collect();
        let zr: Vec<f64> = (0..m).map(|i| alpha * zt[i] + (1.0 - alpha) * z[i]).collect();
        let mut z_new: Vec<f64> = (0..m).map(|i| zr[i] + y[i] / (rho * scale[i])).collect();
        project_c(&mut z_new)?;
        let y_prev = std::mem::take(&mut y);
        y = (0..m)
            .map(|i| y_prev[i] + rho * scale[i] * (zr[i] - z_new[i]))
            .collect();
        z = z_new;

        if k % settings.check_every != 0 && k != settings.max_iterations {
            continue;
        }

        let ax = program.apply(&x);
        let aty = program.apply_transpose(&y);
        rp = inf_norm(&ax.iter().zip(&z).map(|(a, zi)| a - zi).collect::<Vec<_>>());
        rd = inf_norm(&aty.iter().zip(c).map(|(a, ci)| a + ci).collect::<Vec<_>>());
        let p_scale = inf_norm(&ax).max(inf_norm(&z));
        let d_scale = inf_norm(&aty).max(c_norm);
        let pobj = dot(c, &x);
        let dobj = -dot(b, &y);
        let gap = (pobj - dobj).abs();
        let eps_p = settings.eps_abs + settings.eps_rel * p_scale;
        let eps_d = settings.eps_abs + settings.eps_rel * d_scale;
        let eps_g = settings.eps_abs + settings.eps_rel * pobj.abs().max(dobj.abs());
        if rp <= eps_p && rd <= eps_d && gap <= eps_g {
            status = SolveStatus::Optimal;
            break;
        }

        // Primal infeasibility: δy ∈ K*, Aᵀδy ≈ 0, bᵀδy < 0.
        let dy: Vec<f64> = y.iter().zip(&y_prev).map(|(a, p)| a - p).collect();
        let dy_norm = inf_norm(&dy);
        if dy_norm > 1e-12 {
            let eps = settings.eps_infeasible * dy_norm;
            if inf_norm(&program.apply_transpose(&dy)) <= eps
                && dot(b, &dy) < -eps
                && dual_cone_distance(&program.cones, &dy)? <= eps
            {
                status = SolveStatus::InfeasibleCertificate;
                dual_out = Some(dy);
                break;
            }
        }
        // Dual infeasibility: -Aδx ∈ K, cᵀδx < 0.
        let dx: Vec<f64> = x.iter().zip(&x_prev).map(|(a, p)| a - p).collect();
        let dx_norm = inf_norm(&dx);
        if dx_norm > 1e-12 {
            let eps = settings.eps_infeasible * dx_norm;
            let neg_adx: Vec<f64> = program.apply(&dx).iter().map(|v| -v).collect();
            if dot(c, &dx) < -eps && cone_distance(&program.cones, &neg_adx)? <= eps {
                status = SolveStatus::Unbounded;
                break;
            }
        }

        if settings.adaptive_rho && k >= next_adapt {
            next_adapt = k + adapt_gap;
            let num = rp / p_scale.max(1e-12);
            let den = rd / d_scale.max(1e-12);
            if num > 0.0 && den > 0.0 {
                let ratio = (num / den).sqrt();
                if !(0.2..=5.0).contains(&ratio) {
                    let new_rho = (rho * ratio).clamp(1e-6, 1e6);
                    if new_rho != rho {
                        rho = new_rho;
                        chol = kkt.factor(rho)?;
                        // Back off so that ρ cannot oscillate forever.
                        adapt_gap *= 2;
                        next_adapt = k + adapt_gap;
                    }
                }
            }
        }
    }

    let cone_violation = check_point(program, &x)?.worst();
    let (objective, dual_objective) = match status {
        SolveStatus::InfeasibleCertificate => {
            let d = dual_out.as_ref().expect("certificate recorded");
            (f64::NAN, -dot(b, d))
        }
        SolveStatus::Unbounded => (f64::NEG_INFINITY, f64::NAN),
        _ => (dot(c, &x), -dot(b, &y)),
    };
    Ok(Solution {
        report: SolveReport {
            status,
            objective,
            dual_objective,
            primal_residual: rp,
            dual_residual: rd,
            iterations,
            cone_violation,
            wall_time: start.elapsed(),
        },
        x,
        dual: dual_out.unwrap_or(y),
    })
}

/// [`solve_conic`] for programs with PSD blocks; the returned report
/// carries the independently recomputed cone violation.
pub fn solve_sdp(program: &ConeProgram, settings: &AdmmSettings) -> Result<Solution> {
    solve_conic(program, settings, None)
}

/// Verdict of [`solve_socp_feasibility`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feasibility {
    Feasible,
    /// The best uniform margin lies within the marginal band around zero.
    Marginal,
    Infeasible,
}

/// Decides feasibility of the constraint set of `program` (its objective is
/// ignored) by maximizing a uniform margin `τ ∈ [-1, 1]`: every cone
/// expression `e ∈ K` becomes `e - τ·e_K ∈ K`, where `e_K` is the cone's
/// central direction (`1`, `(1, 0, …)` or `I`). Margins beyond `±band`
/// decide; anything in between is marginal.
///
/// Returns the verdict, the margin and the solver output restricted to the
/// original variables.
pub fn solve_socp_feasibility(
    program: &ConeProgram,
    settings: &AdmmSettings,
    band: f64,
) -> Result<(Feasibility, f64, Solution)> {
    program.check()?;
    let n = program.num_vars;
    let tau = n;
    let mut p = ConeProgram::new(n + 1);
    let mut obj = vec![0.0; n + 1];
    obj[tau] = -1.0;
    p.set_objective(obj);

    // Copy the blocks with the margin column attached to every cone row.
    let mut off = 0;
    for cone in &program.cones {
        let rows = cone.rows();
        let centre: Vec<f64> = match *cone {
            Cone::Zero(k) => vec![0.0; k],
            Cone::NonNeg(k) => vec![1.0; k],
            Cone::Soc(k) => (0..k).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
            Cone::Psd(k) => {
                let mut v = vec![0.0; rows];
                for i in 0..k {
                    v[super::svec_index(k, i, i)] = 1.0;
                }
                v
            }
        };
        p.cones.push(*cone);
        for r in 0..rows {
            let mut row = program.rows[off + r].clone();
            // b - Ax - τe ∈ K  ⇔  A x + τe + s = b
            if centre[r] != 0.0 {
                row.push((tau, centre[r]));
            }
            p.rows.push(row);
            p.rhs.push(program.rhs[off + r]);
        }
        off += rows;
    }
    p.add_nonneg(vec![(tau, -1.0)], 1.0);
    p.add_nonneg(vec![(tau, 1.0)], 1.0);

    let sol = solve_conic(&p, settings, None)?;
    let margin = sol.x[tau];
    let verdict = match sol.report.status {
        SolveStatus::InfeasibleCertificate => Feasibility::Infeasible,
        SolveStatus::Optimal | SolveStatus::MaxIterations => {
            if sol.report.status == SolveStatus::MaxIterations
                && sol.report.primal_residual > band
            {
                return Err(numeric(
                    "socp feasibility",
                    format!(
                        "no convergence after {} iterations (primal residual {:.3e})",
                        sol.report.iterations, sol.report.primal_residual
                    ),
                ));
            }
            if margin > band {
                Feasibility::Feasible
            } else if margin < -band {
                Feasibility::Infeasible
            } else {
                Feasibility::Marginal
            }
        }
        SolveStatus::Unbounded => {
            return Err(Error::Logic("bounded margin program reported unbounded".into()))
        }
    };
    let mut x = sol.x.clone();
    x.truncate(n);
    let mut dual = sol.dual.clone();
    dual.truncate(program.num_rows());
    Ok((
        verdict,
        margin,
        Solution {
            report: sol.report,
            x,
            dual,
        },
    ))
}
