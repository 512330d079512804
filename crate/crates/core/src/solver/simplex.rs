//! Dense two-phase tableau simplex for programs with only zero and
//! nonnegative cones.
//!
//! Free variables are split as `x = x⁺ - x⁻`, nonnegative rows get a slack,
//! and rows whose slack cannot start in the basis get an artificial. The
//! entering rule is Dantzig's largest reduced cost, falling back to Bland's
//! rule after a run of degenerate pivots.

use std::time::Instant;

use super::{check_point, Cone, ConeProgram, Solution, SolveReport, SolveStatus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LpSettings {
    pub pivot_tol: f64,
    pub cost_tol: f64,
    /// Phase-one optimum above this (relative to `1 + ‖b‖∞`) means infeasible.
    pub feasibility_tol: f64,
    pub max_pivots: usize,
    pub degenerate_run: usize,
}

impl Default for LpSettings {
    fn default() -> Self {
        LpSettings {
            pivot_tol: 1e-9,
            cost_tol: 1e-10,
            feasibility_tol: 1e-9,
            max_pivots: 200_000,
            degenerate_run: 50,
        }
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    // rows × (cols + 1), rhs in the last column
    t: Vec<f64>,
    basis: Vec<usize>,
    // reduced costs, objective value in the last slot (negated)
    z: Vec<f64>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.t[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let piv = self.t[pr * w + pc];
        let inv = 1.0 / piv;
        for c in 0..w {
            self.t[pr * w + c] *= inv;
        }
        self.t[pr * w + pc] = 1.0;
        let pivot_row: Vec<f64> = self.t[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.t[r * w + pc];
            if f != 0.0 {
                let row = &mut self.t[r * w..(r + 1) * w];
                for (dst, &src) in row.iter_mut().zip(&pivot_row) {
                    *dst -= f * src;
                }
                row[pc] = 0.0;
            }
        }
        let f = self.z[pc];
        if f != 0.0 {
            for (dst, &src) in self.z.iter_mut().zip(&pivot_row) {
                *dst -= f * src;
            }
            self.z[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Resets the objective row to the reduced costs of `cost`.
    fn price(&mut self, cost: &[f64]) {
        let w = self.cols + 1;
        self.z = cost.to_vec();
        self.z.push(0.0);
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..w {
                    self.z[c] -= cb * self.t[r * w + c];
                }
            }
        }
    }

    fn objective(&self) -> f64 {
        -self.z[self.cols]
    }
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
    PivotLimit,
}

fn run_phase(
    tab: &mut Tableau,
    allowed: &dyn Fn(usize) -> bool,
    settings: &LpSettings,
    pivots: &mut usize,
) -> PhaseOutcome {
    let mut degenerate = 0usize;
    let mut bland = false;
    loop {
        if *pivots >= settings.max_pivots {
            return PhaseOutcome::PivotLimit;
        }
        let mut enter = None;
        let mut best = -settings.cost_tol;
        for c in 0..tab.cols {
            if !allowed(c) {
                continue;
            }
            let rc = tab.z[c];
            if rc < best {
                enter = Some(c);
                if bland {
                    break;
                }
                best = rc;
            }
        }
        let Some(pc) = enter else {
            return PhaseOutcome::Optimal;
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..tab.rows {
            let a = tab.at(r, pc);
            if a > settings.pivot_tol {
                let ratio = tab.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-12
                            || (ratio <= lratio + 1e-12 && tab.basis[r] < tab.basis[lr])
                        {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
        }
        let Some((pr, ratio)) = leave else {
            return PhaseOutcome::Unbounded;
        };
        if ratio <= 1e-12 {
            degenerate += 1;
            if degenerate > settings.degenerate_run {
                bland = true;
            }
        } else {
            degenerate = 0;
        }
        tab.pivot(pr, pc);
        *pivots += 1;
    }
}

/// Solves an LP stated as a [`ConeProgram`] whose cones are all
/// [`Cone::Zero`] or [`Cone::NonNeg`].
pub fn solve_lp(program: &ConeProgram, settings: &LpSettings) -> Result<Solution> {
    program.check()?;
    if !program.is_lp() {
        return Err(Error::Input("solve_lp: program has non-polyhedral cones".into()));
    }
    let start = Instant::now();
    let m = program.num_rows();
    let nv = program.num_vars;

    let mut nonneg_row = vec![false; m];
    let mut off = 0;
    for cone in &program.cones {
        if let Cone::NonNeg(k) = cone {
            nonneg_row[off..off + k].iter_mut().for_each(|b| *b = true);
        }
        off += cone.rows();
    }
    let sign: Vec<f64> = program
        .rhs
        .iter()
        .map(|&b| if b < 0.0 { -1.0 } else { 1.0 })
        .collect();

    // Column layout: x⁺ | x⁻ | slacks | artificials.
    let slack_of: Vec<Option<usize>> = {
        let mut next = 2 * nv;
        nonneg_row
            .iter()
            .map(|&nn| {
                nn.then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let first_art = 2 * nv + nonneg_row.iter().filter(|&&b| b).count();
    let mut init_col = vec![0usize; m];
    let mut n_art = 0;
    for r in 0..m {
        match slack_of[r] {
            Some(sc) if sign[r] > 0.0 => init_col[r] = sc,
            _ => {
                init_col[r] = first_art + n_art;
                n_art += 1;
            }
        }
    }
    let cols = first_art + n_art;
    let w = cols + 1;
    let mut t = vec![0.0; m * w];
    for r in 0..m {
        for &(c, v) in &program.rows[r] {
            t[r * w + c] += sign[r] * v;
            t[r * w + nv + c] -= sign[r] * v;
        }
        if let Some(sc) = slack_of[r] {
            t[r * w + sc] = sign[r];
        }
        if init_col[r] >= first_art {
            t[r * w + init_col[r]] = 1.0;
        }
        t[r * w + cols] = sign[r] * program.rhs[r];
    }
    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        basis: init_col.clone(),
        z: vec![0.0; w],
    };

    let is_art = |c: usize| c >= first_art;
    let mut pivots = 0usize;
    let b_scale = 1.0 + program.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let duals_for = |tab: &Tableau, cost: &[f64]| -> Vec<f64> {
        // π = c_Bᵀ B⁻¹, read off the columns that formed the initial identity;
        // returned as μ = -σ∘π in the program's sign convention.
        (0..m)
            .map(|r| {
                let pi: f64 = (0..m)
                    .map(|k| cost[tab.basis[k]] * tab.at(k, init_col[r]))
                    .sum();
                -sign[r] * pi
            })
            .collect()
    };

    if n_art > 0 {
        let mut c1 = vec![0.0; cols];
        c1[first_art..].iter_mut().for_each(|c| *c = 1.0);
        tab.price(&c1);
        match run_phase(&mut tab, &|_| true, settings, &mut pivots) {
            PhaseOutcome::Optimal => {}
            PhaseOutcome::Unbounded => {
                return Err(Error::Logic("phase one cannot be unbounded".into()))
            }
            PhaseOutcome::PivotLimit => {
                return Ok(limit_solution(program, start, pivots));
            }
        }
        if tab.objective() > settings.feasibility_tol * b_scale {
            let cert = duals_for(&tab, &c1);
            let aty = program.apply_transpose(&cert);
            let report = SolveReport {
                status: SolveStatus::InfeasibleCertificate,
                objective: f64::NAN,
                dual_objective: -program.rhs.iter().zip(&cert).map(|(b, y)| b * y).sum::<f64>(),
                primal_residual: tab.objective(),
                dual_residual: aty.iter().fold(0.0f64, |a, v| a.max(v.abs())),
                iterations: pivots,
                cone_violation: f64::NAN,
                wall_time: start.elapsed(),
            };
            return Ok(Solution {
                report,
                x: vec![0.0; nv],
                dual: cert,
            });
        }
        // Drive zero-level artificials out of the basis.
        for r in 0..m {
            if is_art(tab.basis[r]) {
                let col = (0..first_art)
                    .filter(|&c| tab.at(r, c).abs() > settings.pivot_tol)
                    .max_by(|&a, &b| tab.at(r, a).abs().total_cmp(&tab.at(r, b).abs()));
                if let Some(c) = col {
                    tab.pivot(r, c);
                    pivots += 1;
                }
            }
        }
    }

    let mut c2 = vec![0.0; cols];
    for j in 0..nv {
        c2[j] = program.objective[j];
        c2[nv + j] = -program.objective[j];
    }
    tab.price(&c2);
    let outcome = run_phase(&mut tab, &|c| !is_art(c), settings, &mut pivots);
    let mut std_x = vec![0.0; cols];
    for r in 0..m {
        std_x[tab.basis[r]] = tab.rhs(r);
    }
    let x: Vec<f64> = (0..nv).map(|j| std_x[j] - std_x[nv + j]).collect();
    match outcome {
        PhaseOutcome::Optimal => {}
        PhaseOutcome::Unbounded => {
            let report = SolveReport {
                status: SolveStatus::Unbounded,
                objective: f64::NEG_INFINITY,
                dual_objective: f64::NAN,
                primal_residual: 0.0,
                dual_residual: f64::INFINITY,
                iterations: pivots,
                cone_violation: f64::NAN,
                wall_time: start.elapsed(),
            };
            return Ok(Solution {
                report,
                x,
                dual: vec![0.0; m],
            });
        }
        PhaseOutcome::PivotLimit => return Ok(limit_solution(program, start, pivots)),
    }

    let dual = duals_for(&tab, &c2);
    let check = check_point(program, &x)?;
    let mut dual_res = program
        .apply_transpose(&dual)
        .iter()
        .zip(&program.objective)
        .fold(0.0f64, |a, (aty, c)| a.max((aty + c).abs()));
    for r in 0..m {
        if nonneg_row[r] {
            dual_res = dual_res.max(-dual[r]);
        }
    }
    let report = SolveReport {
        status: SolveStatus::Optimal,
        objective: program.objective_value(&x),
        dual_objective: -program.rhs.iter().zip(&dual).map(|(b, y)| b * y).sum::<f64>(),
        primal_residual: check.worst(),
        dual_residual: dual_res,
        iterations: pivots,
        cone_violation: check.worst(),
        wall_time: start.elapsed(),
    };
    Ok(Solution { report, x, dual })
}

fn limit_solution(program: &ConeProgram, start: Instant, pivots: usize) -> Solution {
    Solution {
        report: SolveReport {
            status: SolveStatus::MaxIterations,
            objective: f64::NAN,
            dual_objective: f64::NAN,
            primal_residual: f64::INFINITY,
            dual_residual: f64::INFINITY,
            iterations: pivots,
            cone_violation: f64::NAN,
            wall_time: start.elapsed(),
        },
        x: vec![0.0; program.num_vars],
        dual: vec![0.0; program.num_rows()],
    }
}
