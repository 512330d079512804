//! Dense real-symmetric spectral primitives.
//!
//! The eigensolver is Householder tridiagonalization followed by implicit QL
//! (the EISPACK `tred2`/`tql2` pair). Everything else in this module (PSD
//! margins, square roots, fidelity) is built on [`eigh`].

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension accepted by [`eigh`].
pub const MAX_DIM: usize = 1024;

/// Relative asymmetry accepted by [`SymMatrix::new`] before symmetrizing.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Checks `max|A - Aᵀ| ≤ 1e-12·max(1, max|A|)` and returns `(A + Aᵀ)/2`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Input(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.amax().max(1.0);
        let asym = (&m - m.transpose()).amax();
        if !asym.is_finite() || asym > SYMMETRY_TOL * scale {
            return Err(Error::Input(format!(
                "matrix asymmetry {asym:e} exceeds {:e}",
                SYMMETRY_TOL * scale
            )));
        }
        Ok(SymMatrix::symmetrized(m))
    }

    /// Symmetrizes without checking.
    pub fn symmetrized(m: DMatrix<f64>) -> Self {
        let t = m.transpose();
        SymMatrix((m + t) * 0.5)
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        SymMatrix::symmetrized(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Input("rows do not form a square matrix".into()));
        }
        Self::new(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix(DMatrix::zeros(dim, dim))
    }

    /// The all-ones matrix `J`.
    pub fn ones(dim: usize) -> Self {
        SymMatrix(DMatrix::from_element(dim, dim, 1.0))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = DMatrix::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        SymMatrix(m)
    }

    /// `Σ_k w_k v_k v_kᵀ` for the columns `v_k` of `vecs`.
    pub fn from_weighted_columns(vecs: &DMatrix<f64>, weights: &[f64]) -> Self {
        let scaled = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |i, k| vecs[(i, k)] * weights[k]);
        SymMatrix::symmetrized(scaled * vecs.transpose())
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        SymMatrix::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `tr(AB) = Σ_ij A_ij B_ij` for symmetric `A`, `B`.
    pub fn trace_product(&self, other: &SymMatrix) -> f64 {
        self.0.component_mul(&other.0).sum()
    }

    pub fn hadamard(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix(self.0.component_mul(&other.0))
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &other.0)
    }

    pub fn scale(&self, a: f64) -> SymMatrix {
        SymMatrix(&self.0 * a)
    }

    /// `Q A Qᵀ`.
    pub fn congruence(&self, q: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::symmetrized(q * &self.0 * q.transpose())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        let ev = eigenvalues(self)?;
        Ok(ev.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        SymMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues in descending order with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `V diag(g(λ)) Vᵀ`.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> SymMatrix {
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        SymMatrix::from_weighted_columns(&self.eigenvectors, &w)
    }
}

/// Full symmetric eigendecomposition.
pub fn eigh(a: &SymMatrix) -> Result<Spectrum> {
    let n = a.dim();
    if n > MAX_DIM {
        return Err(Error::Input(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: vec![],
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    if !a.0.iter().all(|v| v.is_finite()) {
        return Err(Error::numeric("eigh", "matrix has non-finite entries"));
    }
    // Row-major working copy.
    let mut v: Vec<f64> = (0..n * n).map(|k| a.0[(k / n, k % n)]).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let eigenvalues = order.iter().map(|&k| d[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, c| v[i * n + order[c]]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, descending.
pub fn eigenvalues(a: &SymMatrix) -> Result<Vec<f64>> {
    Ok(eigh(a)?.eigenvalues)
}

// Householder reduction to tridiagonal form (EISPACK tred2, JAMA layout).
#[allow(clippy::needless_range_loop)]
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    // Accumulate transformations.
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal (EISPACK tql2).
fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS {
                    return Err(Error::numeric(
                        "eigh",
                        format!("QL iteration did not converge for eigenvalue {l} after {MAX_SWEEPS} sweeps (|e| = {:e})", e[l].abs()),
                    ));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// `λ_min(A)`.
pub fn psd_margin(a: &SymMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.last().copied().unwrap_or(0.0))
}

/// The repo-wide PSD rule: `λ_min ≥ -τ·max(1, ‖A‖₂)`.
pub fn is_psd(a: &SymMatrix, tau: f64) -> Result<bool> {
    let ev = eigenvalues(a)?;
    Ok(psd_rule(&ev, tau))
}

pub(crate) fn psd_rule(descending: &[f64], tau: f64) -> bool {
    let (Some(&max), Some(&min)) = (descending.first(), descending.last()) else {
        return true;
    };
    let norm = max.abs().max(min.abs());
    min >= -tau * norm.max(1.0)
}

/// Principal square root of a PSD matrix; eigenvalues within the PSD
/// tolerance below zero are clamped, and so are eigenvalues at rounding
/// level (`≤ dim·ε_mach·λ_max`), whose square roots would be pure noise.
pub fn sqrt_psd(a: &SymMatrix, tau: f64) -> Result<SymMatrix> {
    let sp = eigh(a)?;
    if !psd_rule(&sp.eigenvalues, tau) {
        return Err(Error::Domain(format!(
            "sqrt_psd: λ_min = {:e} is below the PSD tolerance",
            sp.min()
        )));
    }
    let floor = a.dim() as f64 * f64::EPSILON * sp.max().max(0.0);
    Ok(sp.map(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// Uhlmann fidelity `tr √(√ρ σ √ρ)`, clamped to `[0, 1]`.
pub fn fidelity(rho: &SymMatrix, sigma: &SymMatrix, tau: f64) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Input(format!(
            "fidelity: dimensions {} and {} differ",
            rho.dim(),
            sigma.dim()
        )));
    }
    for (name, m) in [("rho", rho), ("sigma", sigma)] {
        let tr = m.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::Domain(format!(
                "fidelity: tr {name} = {tr}, expected 1"
            )));
        }
    }
    let root = sqrt_psd(rho, tau)?;
    if !is_psd(sigma, tau)? {
        return Err(Error::Domain("fidelity: sigma is not PSD".into()));
    }
    Ok(fidelity_unchecked(&root, sigma))
}

/// Fidelity given `√ρ` directly; no domain checks.
pub(crate) fn fidelity_unchecked(sqrt_rho: &SymMatrix, sigma: &SymMatrix) -> f64 {
    let inner = sigma.congruence(sqrt_rho.as_matrix());
    let ev = match eigenvalues(&inner) {
        Ok(ev) => ev,
        Err(_) => return f64::NAN,
    };
    // Round-off on zero eigenvalues would contribute √(1e-16) = 1e-8 each.
    let floor = 64.0 * f64::EPSILON * ev.first().copied().unwrap_or(0.0).abs();
    let total: f64 = ev
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .sum();
    total.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_sym(dim: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
        let m = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
        SymMatrix::symmetrized(m)
    }

    fn reconstruct(sp: &Spectrum) -> SymMatrix {
        sp.map(|l| l)
    }

    #[test]
    fn identity_and_diagonal() {
        let sp = eigh(&SymMatrix::identity(4)).unwrap();
        assert_eq!(sp.eigenvalues, vec![1.0; 4]);
        let sp = eigh(&SymMatrix::from_diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(sp.eigenvalues, vec![3.0, 1.0]);
        assert!((sp.eigenvectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((sp.eigenvectors[(0, 1)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &dim in &[1, 2, 5, 16, 33, 64] {
            let a = random_sym(dim, &mut rng);
            let sp = eigh(&a).unwrap();
            let err = reconstruct(&sp).sub(&a).frobenius_norm();
            assert!(err <= 1e-10 * a.frobenius_norm(), "dim {dim}: {err}");
            let vtv = sp.eigenvectors.transpose() * &sp.eigenvectors;
            let orth = (vtv - DMatrix::identity(dim, dim)).norm();
            assert!(orth <= 1e-10);
            assert!(sp.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 1.0]);
        assert!(SymMatrix::new(m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0 + 1e-14, 1.0]);
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
    }

    #[test]
    fn margins() {
        let j = SymMatrix::ones(4);
        assert!(psd_margin(&j).unwrap().abs() < 1e-14);
        assert_eq!(psd_margin(&SymMatrix::from_diagonal(&[1.0, -1.0])).unwrap(), -1.0);
        assert!(is_psd(&j, 1e-9).unwrap());
        assert!(!is_psd(&SymMatrix::from_diagonal(&[1.0, -1e-6]), 1e-9).unwrap());
    }

    #[test]
    fn square_roots() {
        let r = sqrt_psd(&SymMatrix::from_diagonal(&[4.0, 9.0]), 1e-9).unwrap();
        assert!((r.get(0, 0) - 2.0).abs() < 1e-14 && (r.get(1, 1) - 3.0).abs() < 1e-14);
        let p = SymMatrix::outer(&[0.6, 0.8]);
        let rp = sqrt_psd(&p, 1e-9).unwrap();
        assert!(rp.sub(&p).max_abs() < 1e-12);
        assert!(matches!(
            sqrt_psd(&SymMatrix::from_diagonal(&[1.0, -0.5]), 1e-9),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn pure_state_fidelities() {
        let zero = SymMatrix::outer(&[1.0, 0.0]);
        let one = SymMatrix::outer(&[0.0, 1.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = SymMatrix::outer(&[h, h]);
        assert!((fidelity(&zero, &zero, 1e-9).unwrap() - 1.0).abs() < 1e-9);
        assert!(fidelity(&zero, &one, 1e-9).unwrap().abs() < 1e-9);
        assert!((fidelity(&zero, &plus, 1e-9).unwrap() - h).abs() < 1e-9);
        assert!(fidelity(&zero, &SymMatrix::identity(2), 1e-9).is_err());
    }
}
