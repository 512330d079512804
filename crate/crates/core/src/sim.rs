//! Simulation of real-orthogonal query algorithms.
//!
//! The state space is `|i, b, k⟩` with query index `i ∈ {0..n}` (`0` is the
//! idle slot), answer bit `b` and workspace `k < w`; the flat index is
//! `((i·2) + b)·w + k`. The oracle maps `|i, b, k⟩ ↦ (-1)^{b·x_i}|i, b, k⟩`
//! with `x_0 = 0`. Starting from `|0⟩`, the state after `t` queries is
//! `ψ_x^t = U_t O_x U_{t-1} ⋯ O_x U_0 |0⟩`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::linalg::SymMatrix;
use crate::madv::log2_explicit_trace;
use crate::xpoly::xpoly0;

/// Largest `n` accepted by the simulator.
pub const MAX_SIM_BITS: usize = 8;

#[derive(Debug, Clone)]
pub struct QueryAlgorithm {
    pub n: usize,
    /// Number of queries `T`.
    pub queries: usize,
    /// Workspace size `w`.
    pub workspace: usize,
    /// `U_0..U_T`, each of dimension `2(n+1)w`.
    pub unitaries: Vec<DMatrix<f64>>,
    pub seed: u64,
}

/// A Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal moved into `Q`.
pub fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

impl QueryAlgorithm {
    pub fn state_dim(n: usize, workspace: usize) -> usize {
        2 * (n + 1) * workspace
    }

    pub fn index(&self, i: usize, b: usize, k: usize) -> usize {
        ((i * 2) + b) * self.workspace + k
    }

    fn check_shape(n: usize, workspace: usize) -> Result<()> {
        if n == 0 || n > MAX_SIM_BITS {
            return Err(Error::Input(format!("simulator needs 1 ≤ n ≤ {MAX_SIM_BITS}, got {n}")));
        }
        if workspace == 0 {
            return Err(Error::Input("workspace must be at least 1".into()));
        }
        Ok(())
    }

    /// Checks shapes and orthogonality of the given unitaries.
    pub fn new(n: usize, workspace: usize, unitaries: Vec<DMatrix<f64>>, seed: u64) -> Result<Self> {
        Self::check_shape(n, workspace)?;
        if unitaries.is_empty() {
            return Err(Error::Input("need at least U_0".into()));
        }
        let dim = Self::state_dim(n, workspace);
        for (t, u) in unitaries.iter().enumerate() {
            if u.shape() != (dim, dim) {
                return Err(Error::Input(format!(
                    "U_{t} has shape {:?}, expected {dim}×{dim}",
                    u.shape()
                )));
            }
            let err = (u.transpose() * u - DMatrix::identity(dim, dim)).amax();
            if err > 1e-9 {
                return Err(Error::Input(format!("U_{t} is not orthogonal (error {err:.2e})")));
            }
        }
        Ok(QueryAlgorithm {
            n,
            queries: unitaries.len() - 1,
            workspace,
            unitaries,
            seed,
        })
    }

    /// `T + 1` independent Haar-random orthogonal layers from `seed`.
    pub fn random(n: usize, queries: usize, workspace: usize, seed: u64) -> Result<Self> {
        Self::check_shape(n, workspace)?;
        let dim = Self::state_dim(n, workspace);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let unitaries = (0..=queries).map(|_| random_orthogonal(dim, &mut rng)).collect();
        Ok(QueryAlgorithm {
            n,
            queries,
            workspace,
            unitaries,
            seed,
        })
    }

    /// Every layer is the identity; the state never leaves the idle slot.
    pub fn identity(n: usize, queries: usize, workspace: usize) -> Result<Self> {
        Self::check_shape(n, workspace)?;
        let dim = Self::state_dim(n, workspace);
        Self::new(n, workspace, vec![DMatrix::identity(dim, dim); queries + 1], 0)
    }

    /// One query of bit `i` (1-based) in the `|±⟩` basis of the answer
    /// register: `U_0` maps `|0⟩` to `(|i,0⟩ + |i,1⟩)/√2`.
    pub fn single_query(n: usize, i: usize) -> Result<Self> {
        Self::check_shape(n, 1)?;
        if i == 0 || i > n {
            return Err(Error::Input(format!("query index {i} outside 1..={n}")));
        }
        let dim = Self::state_dim(n, 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // A rotation taking e_0 to (e_{2i} + e_{2i+1})/√2, built as a
        // permutation followed by a Hadamard on the answer pair.
        let mut swap = DMatrix::identity(dim, dim);
        swap.swap_columns(0, 2 * i);
        let mut had = DMatrix::identity(dim, dim);
        had[(2 * i, 2 * i)] = h;
        had[(2 * i, 2 * i + 1)] = h;
        had[(2 * i + 1, 2 * i)] = h;
        had[(2 * i + 1, 2 * i + 1)] = -h;
        let u0 = &had * &swap.transpose();
        Self::new(n, 1, vec![u0, DMatrix::identity(dim, dim)], 0)
    }

    fn apply_oracle(&self, state: &mut DVector<f64>, x: usize) {
        for i in 1..=self.n {
            if (x >> (i - 1)) & 1 == 1 {
                for k in 0..self.workspace {
                    let j = self.index(i, 1, k);
                    state[j] = -state[j];
                }
            }
        }
    }

    /// `ψ_x^t` for `t = 0..=T`.
    pub fn states(&self, x: usize) -> Vec<DVector<f64>> {
        let dim = Self::state_dim(self.n, self.workspace);
        let mut psi = DVector::zeros(dim);
        psi[0] = 1.0;
        let mut out = Vec::with_capacity(self.queries + 1);
        psi = &self.unitaries[0] * psi;
        out.push(psi.clone());
        for u in &self.unitaries[1..] {
            self.apply_oracle(&mut psi, x);
            psi = u * psi;
            out.push(psi.clone());
        }
        out
    }
}

/// Gram matrices along a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub n: usize,
    pub queries: usize,
    pub workspace: usize,
    pub seed: u64,
    /// `M^t` for `t = 0..=T`.
    pub gram: Vec<GramMatrix>,
    /// `M_i^t[x, y] = ⟨P_{i,1}ψ_x^t | P_{i,1}ψ_y^t⟩` for `i = 1..=n`, the part
    /// of `M^t` that the next query multiplies by `D_i`.
    pub per_query: Vec<Vec<SymMatrix>>,
}

impl Trajectory {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trajectory serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Input(format!("bad trajectory JSON: {e}")))
    }
}

/// Runs the algorithm on all `2ⁿ` inputs.
pub fn run(alg: &QueryAlgorithm) -> Result<Trajectory> {
    let size = 1usize << alg.n;
    let states: Vec<Vec<DVector<f64>>> = (0..size).map(|x| alg.states(x)).collect();
    let mut gram = Vec::with_capacity(alg.queries + 1);
    let mut per_query = Vec::with_capacity(alg.queries + 1);
    for t in 0..=alg.queries {
        let m = SymMatrix::from_fn(size, |x, y| states[x][t].dot(&states[y][t]));
        gram.push(GramMatrix::new(alg.n, m, &Tolerances::default())?);
        let parts = (1..=alg.n)
            .map(|i| {
                let lo = alg.index(i, 1, 0);
                let hi = lo + alg.workspace;
                SymMatrix::from_fn(size, |x, y| {
                    states[x][t].rows(lo, hi - lo).dot(&states[y][t].rows(lo, hi - lo))
                })
            })
            .collect();
        per_query.push(parts);
    }
    Ok(Trajectory {
        n: alg.n,
        queries: alg.queries,
        workspace: alg.workspace,
        seed: alg.seed,
        gram,
        per_query,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepAudit {
    pub t: usize,
    pub xpoly0: usize,
    pub xpoly0_next: usize,
    /// `log₂ tr[W_c M^t]`.
    pub log2_trace: f64,
    pub log2_trace_next: f64,
    pub degree_ok: bool,
    pub trace_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProgressAudit {
    pub c: f64,
    pub steps: Vec<StepAudit>,
    pub violations: usize,
}

/// Per-step checks of `xpoly₀(M^{t+1}) ≤ xpoly₀(M^t) + 1` and
/// `tr[W_c M^{t+1}] ≤ c·tr[W_c M^t]·(1 + 1e-9)`.
pub fn progress_audit(traj: &Trajectory, c: f64, tol: &Tolerances) -> Result<ProgressAudit> {
    let log2c = c.log2();
    let slack = (1.0 + 1e-9f64).log2();
    let degs: Vec<usize> = traj.gram.iter().map(|m| xpoly0(m, tol)).collect();
    let traces = traj
        .gram
        .iter()
        .map(|m| log2_explicit_trace(m.matrix(), traj.n, c))
        .collect::<Result<Vec<_>>>()?;
    let steps: Vec<StepAudit> = (0..traj.gram.len().saturating_sub(1))
        .map(|t| StepAudit {
            t,
            xpoly0: degs[t],
            xpoly0_next: degs[t + 1],
            log2_trace: traces[t],
            log2_trace_next: traces[t + 1],
            degree_ok: degs[t + 1] <= degs[t] + 1,
            trace_ok: traces[t + 1] <= traces[t] + log2c + slack,
        })
        .collect();
    let violations = steps.iter().filter(|s| !(s.degree_ok && s.trace_ok)).count();
    Ok(ProgressAudit { c, steps, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::weight;
    use crate::gram::{fourier_diagonal, OracleAction};

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_orthogonal(12, &mut rng);
        assert!((q.transpose() * &q - DMatrix::identity(12, 12)).amax() < 1e-12);
    }

    #[test]
    fn start_is_all_ones() {
        let alg = QueryAlgorithm::random(3, 2, 2, 9).unwrap();
        let tr = run(&alg).unwrap();
        assert!(tr.gram[0].matrix().sub(&SymMatrix::ones(8)).max_abs() < 1e-12);
    }

    #[test]
    fn query_step_identity() {
        let alg = QueryAlgorithm::random(3, 3, 2, 11).unwrap();
        let tr = run(&alg).unwrap();
        for t in 0..3 {
            let mut next = tr.gram[t].matrix().clone();
            for (i, part) in tr.per_query[t].iter().enumerate() {
                let moved = OracleAction::new(3, i + 1).unwrap().apply(part);
                next = next.sub(part).add(&moved);
            }
            // Orthogonal layers preserve inner products.
            assert!(next.sub(tr.gram[t + 1].matrix()).max_abs() < 1e-10);
        }
    }

    #[test]
    fn fourier_support_grows_one_level_per_query() {
        let alg = QueryAlgorithm::random(3, 3, 2, 5).unwrap();
        let tr = run(&alg).unwrap();
        for (t, m) in tr.gram.iter().enumerate() {
            for (s, d) in fourier_diagonal(m.matrix()).iter().enumerate() {
                if weight(s) > t {
                    assert!(d.abs() < 1e-10, "t={t} S={s:b} weight {d}");
                }
            }
        }
    }

    #[test]
    fn single_query_learns_one_bit() {
        let alg = QueryAlgorithm::single_query(2, 2).unwrap();
        let tr = run(&alg).unwrap();
        // ⟨ψ_x|ψ_y⟩ = 1 if x_2 = y_2 else 0
        let m = tr.gram[1].matrix();
        for x in 0..4 {
            for y in 0..4 {
                let want = if (x >> 1) & 1 == (y >> 1) & 1 { 1.0 } else { 0.0 };
                assert!((m.get(x, y) - want).abs() < 1e-12);
            }
        }
        assert_eq!(xpoly0(&tr.gram[1], &Tolerances::default()), 1);
    }

    #[test]
    fn audit_is_clean_and_json_round_trips() {
        let alg = QueryAlgorithm::random(2, 3, 2, 1).unwrap();
        let tr = run(&alg).unwrap();
        let a = progress_audit(&tr, 10.0, &Tolerances::default()).unwrap();
        assert_eq!(a.violations, 0);
        let back = Trajectory::from_json(&tr.to_json()).unwrap();
        assert_eq!(back.gram.len(), tr.gram.len());
        assert!(back.gram[2].matrix().sub(tr.gram[2].matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_non_orthogonal() {
        let dim = QueryAlgorithm::state_dim(1, 1);
        let bad = DMatrix::from_element(dim, dim, 0.5);
        assert!(QueryAlgorithm::new(1, 1, vec![bad], 0).is_err());
    }
}
