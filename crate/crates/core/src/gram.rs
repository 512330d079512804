//! Gram matrices of state-generation problems and the phase-oracle action.
//!
//! A normalized Gram matrix `M` on `n` bits is a `2ⁿ×2ⁿ` PSD matrix with
//! unit diagonal, `M_{x,x'} = ⟨ψ_x|ψ_{x'}⟩`. One query to bit `i` maps
//! `M ↦ M∘D_i` with `(D_i)_{x,x'} = (-1)^{x_i + x'_i}`, which is the
//! congruence by the diagonal unitary `U_i = diag((-1)^{x_i})`.
//!
//! In the Fourier basis `|χ_S⟩ = 2^{-n/2} Σ_x (-1)^{S·x}|x⟩` the matrix `U_i`
//! is the permutation `χ_S ↔ χ_{S⊕{i}}`, so queries shift Fourier weight by
//! one level at a time.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::boolfn::{character, walsh_hadamard, weight, BooleanFunction};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{eigh, fidelity_unchecked, psd_rule, SymMatrix};
use crate::solver::{solve_socp_feasibility, ConeProgram, Feasibility};

/// Largest bit count for which dense `2ⁿ×2ⁿ` Gram matrices are built.
pub const MAX_GRAM_BITS: usize = 10;

/// A normalized Gram matrix. Serializes as `{"n": 2, "rows": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GramJson", into = "GramJson")]
pub struct GramMatrix {
    n: usize,
    mat: SymMatrix,
}

#[derive(Serialize, Deserialize)]
struct GramJson {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<GramJson> for GramMatrix {
    type Error = Error;
    fn try_from(g: GramJson) -> Result<Self> {
        GramMatrix::new(g.n, SymMatrix::from_rows(&g.rows)?, &Tolerances::default())
    }
}

impl From<GramMatrix> for GramJson {
    fn from(g: GramMatrix) -> Self {
        GramJson {
            n: g.n,
            rows: g.mat.rows(),
        }
    }
}

fn check_bits(n: usize) -> Result<usize> {
    if n == 0 || n > MAX_GRAM_BITS {
        return Err(Error::Input(format!(
            "Gram matrices need 1 ≤ n ≤ {MAX_GRAM_BITS}, got {n}"
        )));
    }
    Ok(1 << n)
}

impl GramMatrix {
    /// Validates dimension, unit diagonal (within `1e-9`) and PSD-ness.
    pub fn new(n: usize, mat: SymMatrix, tol: &Tolerances) -> Result<Self> {
        let dim = check_bits(n)?;
        if mat.dim() != dim {
            return Err(Error::Input(format!(
                "Gram matrix for n = {n} must be {dim}×{dim}, got {}",
                mat.dim()
            )));
        }
        if let Some(x) = (0..dim).find(|&x| (mat.get(x, x) - 1.0).abs() > 1e-9) {
            return Err(Error::Domain(format!(
                "diagonal entry {x} is {}, expected 1",
                mat.get(x, x)
            )));
        }
        let ev = crate::linalg::eigenvalues(&mat)?;
        if !psd_rule(&ev, tol.psd) {
            return Err(Error::Domain(format!(
                "Gram matrix is not PSD: λ_min = {:e}",
                ev.last().copied().unwrap_or(0.0)
            )));
        }
        Ok(GramMatrix { n, mat })
    }

    /// Skips validation; for matrices normalized and PSD by construction.
    pub(crate) fn from_parts(n: usize, mat: SymMatrix) -> Self {
        debug_assert_eq!(mat.dim(), 1 << n);
        GramMatrix { n, mat }
    }

    /// `J`, the Gram matrix of a state that does not depend on `x`.
    pub fn all_ones(n: usize) -> Result<Self> {
        let dim = check_bits(n)?;
        Ok(GramMatrix::from_parts(n, SymMatrix::ones(dim)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> SymMatrix {
        self.mat
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.mat.get(x, y)
    }

    /// `M∘D_i` for the 1-based oracle index `i`.
    pub fn query_conjugate(&self, i: usize) -> Result<GramMatrix> {
        let action = OracleAction::new(self.n, i)?;
        Ok(GramMatrix::from_parts(self.n, action.apply(&self.mat)))
    }

    pub fn fourier_diagonal(&self) -> Vec<f64> {
        fourier_diagonal(&self.mat)
    }

    /// Convex combination `(1-t)·self + t·other`.
    pub fn mix(&self, other: &GramMatrix, t: f64) -> Result<GramMatrix> {
        if self.n != other.n {
            return Err(Error::Input("mixing Gram matrices of different sizes".into()));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Input(format!("mixing weight {t} outside [0, 1]")));
        }
        Ok(GramMatrix::from_parts(
            self.n,
            self.mat.scale(1.0 - t).add(&other.mat.scale(t)),
        ))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("Gram matrices always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Input(format!("Gram JSON: {e}")))
    }
}

/// `Φ_{x,x'} = φ(x)φ(x')`.
pub fn phase_matrix(f: &BooleanFunction) -> Result<GramMatrix> {
    check_bits(f.n())?;
    let phi = f.sign_table();
    Ok(GramMatrix::from_parts(f.n(), SymMatrix::outer(&phi)))
}

/// `F_{x,x'} = 1` iff `f(x) = f(x')`; equals `(J + Φ)/2`.
pub fn delta_matrix(f: &BooleanFunction) -> Result<GramMatrix> {
    let dim = check_bits(f.n())?;
    let m = SymMatrix::from_fn(dim, |x, y| if f.value(x) == f.value(y) { 1.0 } else { 0.0 });
    Ok(GramMatrix::from_parts(f.n(), m))
}

/// One phase-oracle query on bit `i - 1` (the oracle index is 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleAction {
    n: usize,
    i: usize,
}

impl OracleAction {
    pub fn new(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::Input(format!("oracle index {i} outside 1..={n}")));
        }
        Ok(OracleAction { n, i })
    }

    pub fn index(&self) -> usize {
        self.i
    }

    pub fn bit(&self) -> usize {
        self.i - 1
    }

    /// Diagonal of `U_i`.
    pub fn unitary_diagonal(&self) -> Vec<f64> {
        (0..1usize << self.n)
            .map(|x| if (x >> self.bit()) & 1 == 1 { -1.0 } else { 1.0 })
            .collect()
    }

    /// The sign pattern `D_i`.
    pub fn sign_pattern(&self) -> SymMatrix {
        SymMatrix::outer(&self.unitary_diagonal())
    }

    /// `A∘D_i`.
    pub fn apply(&self, a: &SymMatrix) -> SymMatrix {
        let u = self.unitary_diagonal();
        SymMatrix::from_fn(a.dim(), |x, y| u[x] * u[y] * a.get(x, y))
    }
}

/// `A∘D_i` for a plain symmetric matrix on `n` bits, `i` 1-based.
pub fn query_conjugate(a: &SymMatrix, n: usize, i: usize) -> Result<SymMatrix> {
    if a.dim() != 1 << n {
        return Err(Error::Input(format!(
            "matrix of dimension {} is not indexed by {n}-bit inputs",
            a.dim()
        )));
    }
    Ok(OracleAction::new(n, i)?.apply(a))
}

/// Normalized Hadamard matrix, `H_{x,S} = 2^{-n/2}(-1)^{S·x}`; symmetric
/// and orthogonal, its columns are the `|χ_S⟩`.
pub fn hadamard_matrix(n: usize) -> DMatrix<f64> {
    let dim = 1usize << n;
    let s = 1.0 / (dim as f64).sqrt();
    DMatrix::from_fn(dim, dim, |x, t| s * character(t, x))
}

/// `H A H`: the matrix of `A` in the Fourier basis, via the fast transform
/// applied to rows and columns.
pub fn to_fourier_basis(a: &SymMatrix) -> SymMatrix {
    let dim = a.dim();
    let mut m = a.as_matrix().clone();
    let mut buf = vec![0.0; dim];
    for j in 0..dim {
        buf.copy_from_slice(m.column(j).as_slice());
        walsh_hadamard(&mut buf);
        m.column_mut(j).copy_from_slice(&buf);
    }
    for i in 0..dim {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = m[(i, j)];
        }
        walsh_hadamard(&mut buf);
        for (j, &b) in buf.iter().enumerate() {
            m[(i, j)] = b / dim as f64;
        }
    }
    SymMatrix::symmetrized(m)
}

/// Inverse of [`to_fourier_basis`] (the transform is an involution).
pub fn from_fourier_basis(a: &SymMatrix) -> SymMatrix {
    to_fourier_basis(a)
}

/// `⟨χ_S|M|χ_S⟩` for every `S`.
pub fn fourier_diagonal(m: &SymMatrix) -> Vec<f64> {
    to_fourier_basis(m).diagonal()
}

/// The Fourier level projectors `Π_k = Σ_{|S|=k} |χ_S⟩⟨χ_S|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierProjectorFamily {
    n: usize,
}

impl FourierProjectorFamily {
    pub fn new(n: usize) -> Result<Self> {
        check_bits(n)?;
        Ok(FourierProjectorFamily { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Projector onto the span of `|χ_S⟩` for the `S` selected by `keep`.
    pub fn span(&self, keep: impl Fn(usize) -> bool) -> SymMatrix {
        let h = hadamard_matrix(self.n);
        let w: Vec<f64> = (0..1usize << self.n)
            .map(|s| if keep(s) { 1.0 } else { 0.0 })
            .collect();
        SymMatrix::from_weighted_columns(&h, &w)
    }

    /// `Π_k`.
    pub fn level(&self, k: usize) -> SymMatrix {
        self.span(|s| weight(s) == k)
    }

    /// `Π_{≥t}`.
    pub fn at_or_above(&self, t: usize) -> SymMatrix {
        self.span(|s| weight(s) >= t)
    }

    /// `Π_{≤k}`.
    pub fn up_to(&self, k: usize) -> SymMatrix {
        self.span(|s| weight(s) <= k)
    }

    /// `tr[Π_k M]` for every level, read off the Fourier diagonal.
    pub fn level_weights(&self, m: &SymMatrix) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        for (s, d) in fourier_diagonal(m).into_iter().enumerate() {
            out[weight(s)] += d;
        }
        out
    }

    pub fn to_family(&self) -> ProjectorFamily {
        ProjectorFamily {
            n: self.n,
            projectors: (0..=self.n).map(|k| self.level(k)).collect(),
        }
    }
}

/// An ordered list of matrices `Π′_0, …, Π′_K` on `n`-bit inputs, meant to be
/// orthogonal projectors. Nothing is assumed; validation lives in `xpoly`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorFamily {
    pub n: usize,
    pub projectors: Vec<SymMatrix>,
}

impl ProjectorFamily {
    /// Groups Fourier characters by a label: `Π′_k = Σ_{label(S) = k} |χ_S⟩⟨χ_S|`.
    pub fn from_fourier_labels(n: usize, label: impl Fn(usize) -> usize) -> Result<Self> {
        let fam = FourierProjectorFamily::new(n)?;
        let labels: Vec<usize> = (0..1usize << n).map(&label).collect();
        let top = labels.iter().copied().max().unwrap_or(0);
        Ok(ProjectorFamily {
            n,
            projectors: (0..=top).map(|k| fam.span(|s| labels[s] == k)).collect(),
        })
    }

    /// Conjugates every projector by an orthogonal matrix.
    pub fn rotated(&self, q: &DMatrix<f64>) -> ProjectorFamily {
        ProjectorFamily {
            n: self.n,
            projectors: self.projectors.iter().map(|p| p.congruence(q)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

/// Outcome of [`fh_estimate`]: an upper bound on the Hadamard product
/// fidelity together with the unit vector attaining it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FhEstimate {
    pub value: f64,
    pub u: Vec<f64>,
    pub restarts: usize,
}

/// `F(A∘uuᵀ, B∘uuᵀ)` without normalizing `u`; homogeneous of degree 2.
pub fn hadamard_fidelity_at(a: &SymMatrix, b: &SymMatrix, u: &[f64]) -> Result<f64> {
    let dim = a.dim();
    if b.dim() != dim || u.len() != dim {
        return Err(Error::Input("fidelity arguments have mismatched sizes".into()));
    }
    let rho = SymMatrix::from_fn(dim, |x, y| u[x] * u[y] * a.get(x, y));
    let sigma = SymMatrix::from_fn(dim, |x, y| u[x] * u[y] * b.get(x, y));
    let root = eigh(&rho)?.map(|l| l.max(0.0).sqrt());
    let scale = u.iter().map(|v| v * v).sum::<f64>();
    if scale == 0.0 {
        return Ok(0.0);
    }
    // fidelity_unchecked clamps to [0, 1], so evaluate on the normalized pair.
    let root = root.scale(1.0 / scale.sqrt());
    Ok(scale * fidelity_unchecked(&root, &sigma.scale(1.0 / scale)))
}

/// Multi-start projected-gradient minimization of `u ↦ F(A∘uuᵀ, B∘uuᵀ)`
/// over unit vectors. Every `u` is feasible, so the result is an upper
/// bound on `F_H(A, B)`. The first start is the uniform vector, the rest
/// are Gaussian draws from `seed`.
pub fn fh_estimate(
    a: &GramMatrix,
    b: &GramMatrix,
    restarts: usize,
    seed: u64,
    step_tol: f64,
) -> Result<FhEstimate> {
    if a.n != b.n {
        return Err(Error::Input("F_H of Gram matrices on different inputs".into()));
    }
    let dim = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = FhEstimate {
        value: f64::INFINITY,
        u: vec![],
        restarts: restarts.max(1),
    };
    for r in 0..restarts.max(1) {
        let mut u: Vec<f64> = if r == 0 {
            vec![1.0; dim]
        } else {
            (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        normalize(&mut u);
        let (val, u) = local_descent(a.matrix(), b.matrix(), u, step_tol)?;
        if val < best.value {
            best.value = val;
            best.u = u;
        }
    }
    Ok(best)
}

fn normalize(u: &mut [f64]) {
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        u.iter_mut().for_each(|v| *v /= norm);
    }
}

fn local_descent(
    a: &SymMatrix,
    b: &SymMatrix,
    mut u: Vec<f64>,
    step_tol: f64,
) -> Result<(f64, Vec<f64>)> {
    const H: f64 = 1e-6;
    const MAX_STEPS: usize = 200;
    let dim = u.len();
    let mut val = hadamard_fidelity_at(a, b, &u)?;
    let mut step = 0.5;
    for _ in 0..MAX_STEPS {
        let mut grad = vec![0.0; dim];
        for j in 0..dim {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += H;
            dn[j] -= H;
            grad[j] = (hadamard_fidelity_at(a, b, &up)? - hadamard_fidelity_at(a, b, &dn)?) / (2.0 * H);
        }
        // Tangent component on the sphere.
        let radial: f64 = grad.iter().zip(&u).map(|(g, v)| g * v).sum();
        grad.iter_mut().zip(&u).for_each(|(g, v)| *g -= radial * v);
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if gnorm2.sqrt() < 1e-12 {
            break;
        }
        // Armijo backtracking along the retraction.
        let mut accepted = false;
        while step > step_tol {
            let mut cand: Vec<f64> = u.iter().zip(&grad).map(|(v, g)| v - step * g).collect();
            normalize(&mut cand);
            let cv = hadamard_fidelity_at(a, b, &cand)?;
            if cv <= val - 1e-4 * step * gnorm2 {
                u = cand;
                val = cv;
                accepted = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((val, u))
}

/// Gram matrix of `2ⁿ` independent Gaussian unit vectors in `ℝ^rank`.
pub fn random_gram<R: rand::Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<GramMatrix> {
    let dim = check_bits(n)?;
    if rank == 0 {
        return Err(Error::Input("rank must be at least 1".into()));
    }
    let mut v: DMatrix<f64> = DMatrix::from_fn(rank, dim, |_, _| StandardNormal.sample(rng));
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    let mut m = v.transpose() * v;
    for x in 0..dim {
        m[(x, x)] = 1.0;
    }
    Ok(GramMatrix::from_parts(n, SymMatrix::symmetrized(m)))
}

/// Gram vectors `ψ_x` (columns) with `N = ΨᵀΨ`, `Ψ = Λ^{1/2}Vᵀ`; eigen
/// directions with `λ ≤ 0` after clamping are dropped.
pub fn gram_vectors(n: &GramMatrix, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let sp = eigh(n.matrix())?;
    if !psd_rule(&sp.eigenvalues, tol.psd) {
        return Err(Error::numeric(
            "gram factorization",
            format!("λ_min = {:e} below PSD tolerance", sp.min()),
        ));
    }
    let keep: Vec<usize> = (0..sp.eigenvalues.len())
        .filter(|&k| sp.eigenvalues[k] > 0.0)
        .collect();
    let dim = n.dim();
    Ok(DMatrix::from_fn(keep.len(), dim, |r, x| {
        let k = keep[r];
        sp.eigenvalues[k].sqrt() * sp.eigenvectors[(x, k)]
    }))
}

/// Result of [`phase_validity_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseValidity {
    pub verdict: Feasibility,
    /// `√(1-ε)`.
    pub threshold: f64,
    /// `min_x φ(x)uᵀψ_x` at the returned `u` (normalized to `‖u‖ ≤ 1`).
    pub overlap: f64,
    /// Uniform slack found by the feasibility solver.
    pub margin: f64,
    /// Unit vector `u` in the Gram-vector coordinates.
    pub u: Vec<f64>,
}

impl PhaseValidity {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Feasibility::Feasible
    }
}

/// Decides whether `N` is an ε-valid output for `Φ_f`: whether some unit
/// `u` has `φ(x)·uᵀψ_x ≥ √(1-ε)` for every `x`, where `N = ΨᵀΨ`.
pub fn phase_validity_check(
    n_gram: &GramMatrix,
    f: &BooleanFunction,
    eps: f64,
    tol: &Tolerances,
) -> Result<PhaseValidity> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Input(format!("ε = {eps} outside [0, 1)")));
    }
    if f.n() != n_gram.n() {
        return Err(Error::Input("function and Gram matrix differ in n".into()));
    }
    let psi = gram_vectors(n_gram, tol)?;
    let r = psi.nrows();
    let threshold = (1.0 - eps).sqrt();
    let phi = f.sign_table();

    if eps == 0.0 {
        // Overlap 1 with unit vectors forces ψ_x = φ(x)u, i.e. N = Φ; the
        // conic problem would sit exactly on its boundary.
        let exact = phase_matrix(f)?;
        let dev = n_gram.matrix().sub(exact.matrix()).max_abs();
        let mut u: Vec<f64> = (0..r).map(|k| phi[0] * psi[(k, 0)]).collect();
        normalize(&mut u);
        let overlap = (0..phi.len())
            .map(|x| phi[x] * (0..r).map(|k| u[k] * psi[(k, x)]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        return Ok(PhaseValidity {
            verdict: if dev <= tol.lp_feasibility {
                Feasibility::Feasible
            } else {
                Feasibility::Infeasible
            },
            threshold,
            overlap,
            margin: overlap - threshold,
            u,
        });
    }

    let mut p = ConeProgram::new(r);
    let mut ball = vec![(vec![], 1.0)];
    ball.extend((0..r).map(|k| (vec![(k, 1.0)], 0.0)));
    p.add_soc(ball);
    for (x, &sx) in phi.iter().enumerate() {
        let row = (0..r).map(|k| (k, sx * psi[(k, x)])).collect();
        p.add_nonneg(row, -threshold);
    }
    let (verdict, margin, sol) = solve_socp_feasibility(&p, &tol.admm(), tol.marginal)?;
    let mut u = sol.x;
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 {
        u.iter_mut().for_each(|v| *v /= norm);
    }
    let overlap = (0..phi.len())
        .map(|x| phi[x] * (0..r).map(|k| u[k] * psi[(k, x)]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(PhaseValidity {
        verdict,
        threshold,
        overlap,
        margin,
        u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn parity_phase_matrix_is_scaled_character_projector() {
        for n in 1..=4 {
            let f = BooleanFunction::parity(n).unwrap();
            let phi = phase_matrix(&f).unwrap();
            let full = (1usize << n) - 1;
            let diag = phi.fourier_diagonal();
            for (s, d) in diag.iter().enumerate() {
                let want = if s == full { (1 << n) as f64 } else { 0.0 };
                assert!((d - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_function_gives_all_ones() {
        let f = BooleanFunction::constant(3, true).unwrap();
        assert_eq!(phase_matrix(&f).unwrap().matrix(), &SymMatrix::ones(8));
        assert_eq!(delta_matrix(&f).unwrap().matrix(), &SymMatrix::ones(8));
    }

    #[test]
    fn delta_is_average_of_ones_and_phase() {
        let f = BooleanFunction::parity(2).unwrap();
        let want = SymMatrix::ones(4).add(phase_matrix(&f).unwrap().matrix()).scale(0.5);
        assert_eq!(delta_matrix(&f).unwrap().matrix(), &want);
    }

    #[test]
    fn oracle_index_is_checked() {
        assert!(OracleAction::new(3, 0).is_err());
        assert!(OracleAction::new(3, 4).is_err());
        let j = GramMatrix::all_ones(2).unwrap();
        assert!(j.query_conjugate(3).is_err());
    }

    #[test]
    fn query_moves_character_up_one_level() {
        let n = 3;
        let h = hadamard_matrix(n);
        for s in 0..8usize {
            let chi: Vec<f64> = h.column(s).iter().copied().collect();
            let m = SymMatrix::outer(&chi);
            for i in 1..=n {
                let moved = query_conjugate(&m, n, i).unwrap();
                let t = s ^ (1 << (i - 1));
                let chi_t: Vec<f64> = h.column(t).iter().copied().collect();
                assert!(moved.sub(&SymMatrix::outer(&chi_t)).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn double_query_is_identity() {
        let j = GramMatrix::all_ones(2).unwrap();
        let once = j.query_conjugate(1).unwrap();
        assert_ne!(once, j);
        assert_eq!(once.query_conjugate(1).unwrap(), j);
    }

    #[test]
    fn fourier_projectors_partition_identity() {
        let fam = FourierProjectorFamily::new(3).unwrap();
        let mut sum = SymMatrix::zeros(8);
        for k in 0..=3 {
            let p = fam.level(k);
            assert!(p.hadamard(&SymMatrix::ones(8)).max_abs() <= 1.0 + 1e-12);
            sum = sum.add(&p);
            for l in 0..k {
                let prod = p.as_matrix() * fam.level(l).as_matrix();
                assert!(prod.amax() < 1e-12);
            }
        }
        assert!(sum.sub(&SymMatrix::identity(8)).max_abs() < 1e-12);
        assert!((fam.level(0).trace_product(&SymMatrix::ones(8)) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn gram_json_roundtrip_and_validation() {
        let f = BooleanFunction::or(2).unwrap();
        let phi = phase_matrix(&f).unwrap();
        let s = phi.to_json();
        assert!(s.starts_with("{\"n\":2,\"rows\":[["));
        assert_eq!(GramMatrix::from_json(&s).unwrap(), phi);
        assert!(GramMatrix::from_json("{\"n\":1,\"rows\":[[1,2],[2,1]]}").is_err());
        assert!(GramMatrix::from_json("{\"n\":1,\"rows\":[[2,0],[0,1]]}").is_err());
    }

    #[test]
    fn identical_arguments_have_unit_fidelity() {
        let f = BooleanFunction::majority(3).unwrap();
        let m = delta_matrix(&f).unwrap();
        let est = fh_estimate(&m, &m, 4, 7, 1e-8).unwrap();
        assert!((est.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn exact_output_is_valid() {
        let f = BooleanFunction::or(2).unwrap();
        let phi = phase_matrix(&f).unwrap();
        let v = phase_validity_check(&phi, &f, 0.0, &tol()).unwrap();
        assert!(v.is_feasible());
        assert!(v.overlap > 1.0 - 1e-12);
        let v = phase_validity_check(&phi, &f, 0.2, &tol()).unwrap();
        assert!(v.is_feasible());
    }

    #[test]
    fn contradictory_signs_are_invalid() {
        let f = BooleanFunction::parity(2).unwrap();
        let j = GramMatrix::all_ones(2).unwrap();
        let v = phase_validity_check(&j, &f, 0.0, &tol()).unwrap();
        assert_eq!(v.verdict, Feasibility::Infeasible);
    }
}
