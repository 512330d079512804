//! Multiplicative adversary bounds.
//!
//! `MADV₀ᶜ(M) = max { log tr[WM] / log c : W ⪰ 0, tr[WJ] = 1, W∘D_i ⪯ cW }`.
//!
//! The SDP is solved in scaled Fourier coordinates. With `W̃ = HWH`,
//! `Λ = diag(c^{|S|/2})` and `W̃ = 2⁻ⁿ ΛXΛ`, the constraints become
//!
//! ```text
//! X ⪰ 0,   X_∅∅ = 1,   X - E_i P_i X P_i E_i ⪰ 0
//! ```
//!
//! where `P_i` swaps `S ↔ S⊕{i}` and `E_i = diag(1 if i ∉ S, 1/c if i ∈ S)`.
//! The explicit witness `W_c = 2⁻ⁿ Σ_S c^{|S|}|χ_S⟩⟨χ_S|` is `X = I`, and
//! every feasible `X` has `X_SS ≤ 1`. All entries stay of order one for any
//! `c`, so large rates never overflow.

use serde::{Deserialize, Serialize};

use crate::boolfn::{weight, BooleanFunction};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::gram::{
    fourier_diagonal, from_fourier_basis, phase_matrix, to_fourier_basis, GramMatrix, OracleAction,
};
use crate::linalg::{psd_margin, SymMatrix};
use crate::polybounds::adeg;
use crate::solver::{solve_conic, svec_index, svec_len, ConeProgram, SolveReport, SolveStatus};
use crate::xpoly::xpoly0;

/// Largest `2ⁿ` handled by the SDP.
pub const MAX_SDP_DIM: usize = 64;
/// `c^n` above this switches the reported values to log-domain only.
pub const LOG_DOMAIN_THRESHOLD: f64 = 1e300;

fn check_rate(c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 1.0) {
        return Err(Error::Input(format!("rate c = {c} must be a finite number > 1")));
    }
    Ok(c.log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    ExplicitFourier,
    SdpOptimal,
}

/// A feasible point of the `MADV₀ᶜ` program.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdversaryWitness {
    pub n: usize,
    pub c: f64,
    pub kind: WitnessKind,
    /// The scaled Fourier form `X` (`W̃ = 2⁻ⁿ ΛXΛ`).
    pub scaled: SymMatrix,
    /// `W` in the computational basis; absent in log-domain mode.
    pub matrix: Option<SymMatrix>,
    /// `λ_min(cW - W∘D_i)` per oracle index; absent in log-domain mode.
    pub margins: Option<Vec<f64>>,
    /// `λ_min(X)` followed by `λ_min(X - E_i P_i X P_i E_i)` per index.
    pub scaled_margins: Vec<f64>,
    /// `tr[WJ]`, equal to `X_∅∅`.
    pub trace_j: f64,
    pub log_domain: bool,
}

impl AdversaryWitness {
    fn from_scaled(n: usize, c: f64, kind: WitnessKind, x: SymMatrix) -> Result<Self> {
        let scaled_margins = scaled_margins(&x, n, c)?;
        let log_domain = n as f64 * c.log10() > LOG_DOMAIN_THRESHOLD.log10();
        let (matrix, margins) = if log_domain {
            (None, None)
        } else {
            let w = unscale(&x, n, c);
            let m = (1..=n)
                .map(|i| {
                    let a = OracleAction::new(n, i).expect("index in range");
                    psd_margin(&w.scale(c).sub(&a.apply(&w)))
                })
                .collect::<Result<Vec<_>>>()?;
            (Some(w), Some(m))
        };
        Ok(AdversaryWitness {
            n,
            c,
            kind,
            trace_j: x.get(0, 0),
            scaled: x,
            matrix,
            margins,
            scaled_margins,
            log_domain,
        })
    }

    /// Worst margin in the units of the definition, relative to
    /// `c·‖W‖₂`; `None` in log-domain mode.
    pub fn relative_margin(&self) -> Option<f64> {
        let w = self.matrix.as_ref()?;
        let norm = w.spectral_norm().ok()?;
        let worst = self.margins.as_ref()?.iter().copied().fold(f64::INFINITY, f64::min);
        Some(worst / (self.c * norm).max(f64::MIN_POSITIVE))
    }

    /// Feasible under the repo's PSD rule.
    pub fn is_feasible(&self, tol: &Tolerances) -> bool {
        let scaled_ok = self.scaled_margins.iter().all(|&m| m >= -tol.psd);
        let trace_ok = (self.trace_j - 1.0).abs() <= 1e-8;
        let unscaled_ok = match self.relative_margin() {
            Some(r) => r >= -tol.psd,
            None => true,
        };
        scaled_ok && trace_ok && unscaled_ok
    }

    /// `log₂ tr[WM]`.
    pub fn log2_trace(&self, m: &SymMatrix) -> f64 {
        let k = level_weights_top(m, self.n);
        let g = objective_matrix(m, self.n, self.c, k);
        k as f64 * self.c.log2() + self.scaled.trace_product(&g).log2()
    }

    /// `log tr[WM] / log c`.
    pub fn value(&self, m: &SymMatrix) -> f64 {
        self.log2_trace(m) / self.c.log2()
    }
}

/// `W` from its scaled form.
fn unscale(x: &SymMatrix, n: usize, c: f64) -> SymMatrix {
    let dim = 1usize << n;
    let lam: Vec<f64> = (0..dim).map(|s| c.powf(weight(s) as f64 / 2.0)).collect();
    let wt = SymMatrix::from_fn(dim, |s, t| lam[s] * lam[t] * x.get(s, t) / dim as f64);
    from_fourier_basis(&wt)
}

/// `X - E_i P_i X P_i E_i` for the 1-based index `i`.
pub fn scaled_block(x: &SymMatrix, c: f64, i: usize) -> SymMatrix {
    let bit = 1usize << (i - 1);
    let e = |s: usize| if s & bit == 0 { 1.0 } else { 1.0 / c };
    SymMatrix::from_fn(x.dim(), |s, t| x.get(s, t) - e(s) * e(t) * x.get(s ^ bit, t ^ bit))
}

fn scaled_margins(x: &SymMatrix, n: usize, c: f64) -> Result<Vec<f64>> {
    let mut out = vec![psd_margin(x)?];
    for i in 1..=n {
        out.push(psd_margin(&scaled_block(x, c, i))?);
    }
    Ok(out)
}

/// The explicit Fourier-diagonal witness `W_c`.
pub fn explicit_witness(n: usize, c: f64) -> Result<AdversaryWitness> {
    check_rate(c)?;
    if n == 0 || (1usize << n) > 1024 {
        return Err(Error::Input(format!("explicit witness needs 1 ≤ n ≤ 10, got {n}")));
    }
    if c.log2() > 900.0 / n as f64 {
        return Err(Error::Range(format!(
            "c = {c:e} exceeds 2^(900/n) for n = {n}; use the log-domain \
             functions (log2_explicit_trace) instead"
        )));
    }
    AdversaryWitness::from_scaled(
        n,
        c,
        WitnessKind::ExplicitFourier,
        SymMatrix::identity(1 << n),
    )
}

/// `log₂ tr[W_c M]`, by log-sum-exp over the Fourier diagonal; valid for
/// every `c > 1`.
pub fn log2_explicit_trace(m: &SymMatrix, n: usize, c: f64) -> Result<f64> {
    let log2c = check_rate(c)?;
    let diag = fourier_diagonal(m);
    let terms: Vec<f64> = diag
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0.0)
        .map(|(s, &d)| weight(s) as f64 * log2c + d.log2())
        .collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(Error::Domain("M has no positive Fourier weight".into()));
    }
    let sum: f64 = terms.iter().map(|t| (t - top).exp2()).sum();
    Ok(top + sum.log2() - n as f64)
}

/// `tr[W_c M]` in plain arithmetic.
pub fn explicit_trace(m: &SymMatrix, n: usize, c: f64) -> f64 {
    fourier_diagonal(m)
        .iter()
        .enumerate()
        .map(|(s, d)| c.powi(weight(s) as i32) * d)
        .sum::<f64>()
        / (1u64 << n) as f64
}

fn level_weights_top(m: &SymMatrix, n: usize) -> usize {
    let thr = Tolerances::default().deg_threshold(n);
    crate::xpoly::level_of_diagonal(&fourier_diagonal(m), thr)
}

/// `G` with `tr[WM] = c^k·tr[XG]`: `G_ST = c^{(|S|+|T|)/2 - k} M̃_ST / 2ⁿ`.
fn objective_matrix(m: &SymMatrix, n: usize, c: f64, k: usize) -> SymMatrix {
    let mt = to_fourier_basis(m);
    let dim = 1usize << n;
    let log2c = c.log2();
    SymMatrix::from_fn(dim, |s, t| {
        let e = (weight(s) + weight(t)) as f64 / 2.0 - k as f64;
        (e * log2c).exp2() * mt.get(s, t) / dim as f64
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    /// The splitting solver's point was feasible as returned.
    Solver,
    /// The solver's point was mixed with an interior point to restore
    /// feasibility.
    Repaired,
    /// The explicit witness scored at least as well.
    Explicit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MadvResult {
    pub c: f64,
    /// `log tr[WM] / log c` for the attached witness.
    pub value: f64,
    pub log2_objective: f64,
    pub witness: AdversaryWitness,
    pub source: WitnessSource,
    /// `log tr[W_c M] / log c`.
    pub explicit_value: f64,
    /// Solver dual objective converted to query units; an estimate of the
    /// optimum from above.
    pub dual_value: f64,
    pub solver: SolveReport,
}

/// Solves the `MADV₀ᶜ` SDP for `M`.
pub fn madv0_sdp(m: &GramMatrix, c: f64, tol: &Tolerances) -> Result<MadvResult> {
    let log2c = check_rate(c)?;
    let n = m.n();
    let dim = m.dim();
    if dim > MAX_SDP_DIM {
        return Err(Error::Input(format!(
            "MADV SDP supports 2ⁿ ≤ {MAX_SDP_DIM}, got {dim}"
        )));
    }
    let k = xpoly0(m, tol);
    let g = objective_matrix(m.matrix(), n, c, k);

    let var = |i: usize, j: usize| {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        svec_index(dim, i, j)
    };
    let nv = svec_len(dim);
    let mut p = ConeProgram::new(nv);
    let mut obj = vec![0.0; nv];
    for t in 0..dim {
        for s in t..dim {
            let w = if s == t { 1.0 } else { 2.0 };
            obj[var(s, t)] = -w * g.get(s, t);
        }
    }
    p.set_objective(obj);
    p.add_equality(vec![(var(0, 0), 1.0)], 1.0);
    p.add_psd(dim, |s, t| (vec![(var(s, t), 1.0)], 0.0));
    for i in 1..=n {
        let bit = 1usize << (i - 1);
        let e = |s: usize| if s & bit == 0 { 1.0 } else { 1.0 / c };
        p.add_psd(dim, |s, t| {
            let coef = e(s) * e(t);
            let (a, b) = (var(s, t), var(s ^ bit, t ^ bit));
            if a == b {
                (vec![(a, 1.0 - coef)], 0.0)
            } else {
                (vec![(a, 1.0), (b, -coef)], 0.0)
            }
        });
    }
    let mut warm = vec![0.0; nv];
    for s in 0..dim {
        warm[var(s, s)] = 1.0;
    }
    let sol = solve_conic(&p, &tol.admm(), Some(&warm))?;
    if !matches!(sol.report.status, SolveStatus::Optimal | SolveStatus::MaxIterations) {
        return Err(Error::numeric(
            "madv SDP",
            format!("unexpected status {:?}", sol.report.status),
        ));
    }
    let x_raw = SymMatrix::from_fn(dim, |s, t| sol.x[var(s, t)]);
    let explicit = SymMatrix::identity(dim);
    let explicit_score = explicit.trace_product(&g);

    let mut best = (explicit.clone(), WitnessSource::Explicit, explicit_score);
    if let Some((x, source)) = certify(x_raw, n, c, tol)? {
        let score = x.trace_product(&g);
        if score > explicit_score {
            best = (x, source, score);
        }
    }
    let (x, source, score) = best;
    let kind = match source {
        WitnessSource::Explicit => WitnessKind::ExplicitFourier,
        _ => WitnessKind::SdpOptimal,
    };
    let witness = AdversaryWitness::from_scaled(n, c, kind, x)?;
    let log2_objective = k as f64 * log2c + score.log2();
    let dual_score = -sol.report.dual_objective;
    Ok(MadvResult {
        c,
        value: log2_objective / log2c,
        log2_objective,
        witness,
        source,
        explicit_value: (k as f64 * log2c + explicit_score.log2()) / log2c,
        dual_value: if dual_score > 0.0 {
            (k as f64 * log2c + dual_score.log2()) / log2c
        } else {
            f64::NAN
        },
        solver: sol.report,
    })
}

/// Normalizes `X_∅∅ = 1` and, if needed, mixes with the strictly feasible
/// `diag(a^{|S|})` until every margin is nonnegative. Returns `None` when
/// the point is unusable.
fn certify(
    x: SymMatrix,
    n: usize,
    c: f64,
    tol: &Tolerances,
) -> Result<Option<(SymMatrix, WitnessSource)>> {
    let x00 = x.get(0, 0);
    if x00.is_nan() || x00 <= 0.5 {
        return Ok(None);
    }
    let x = x.scale(1.0 / x00);
    let worst = |m: &[f64]| m.iter().copied().fold(f64::INFINITY, f64::min);
    let m0 = worst(&scaled_margins(&x, n, c)?);
    let accept = |x: &SymMatrix| -> Result<bool> {
        Ok(worst(&scaled_margins(x, n, c)?) >= 0.0
            && AdversaryWitness::from_scaled(n, c, WitnessKind::SdpOptimal, x.clone())?
                .is_feasible(tol))
    };
    if m0 >= 0.0 && accept(&x)? {
        return Ok(Some((x, WitnessSource::Solver)));
    }
    let a: f64 = 1.0 - 1e-3;
    let interior =
        SymMatrix::from_diagonal(&(0..1usize << n).map(|s| a.powi(weight(s) as i32)).collect::<Vec<_>>());
    let mi = worst(&scaled_margins(&interior, n, c)?);
    if mi <= 0.0 {
        return Ok(None);
    }
    // λ_min is concave, so θ = -m0/(mi - m0) restores m ≥ 0 to first order.
    let mut theta = (-m0.min(0.0) / (mi - m0.min(0.0))) * 1.5 + 1e-12;
    while theta < 1.0 {
        let mixed = x.scale(1.0 - theta).add(&interior.scale(theta));
        if accept(&mixed)? {
            return Ok(Some((mixed, WitnessSource::Repaired)));
        }
        theta *= 2.0;
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `lhs ≤ rhs + tolerance`.
    pub fn le(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            lhs,
            rhs,
            tolerance,
            pass: lhs <= rhs + tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SandwichReport {
    pub n: usize,
    pub c: f64,
    /// `T = xpoly₀(M)`.
    pub xpoly0: usize,
    /// `δ̂ = tr[Π_{≥T} M]`.
    pub delta_hat: f64,
    /// `log tr[W_c M] / log c`.
    pub explicit_value: f64,
    pub madv: f64,
    /// `T - (n - log δ̂)/log c`.
    pub lower_envelope: f64,
    /// `T + n/log c`.
    pub upper_envelope: f64,
    pub checks: Vec<Check>,
}

impl SandwichReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Solves the SDP and checks both two-sided bounds around it.
pub fn verify_sandwich(m: &GramMatrix, c: f64, tol: &Tolerances, slack: f64) -> Result<SandwichReport> {
    let res = madv0_sdp(m, c, tol)?;
    sandwich_from(m, &res, tol, slack)
}

/// The sandwich checks for an already computed SDP result.
pub fn sandwich_from(
    m: &GramMatrix,
    res: &MadvResult,
    tol: &Tolerances,
    slack: f64,
) -> Result<SandwichReport> {
    let n = m.n();
    let c = res.c;
    let log2c = c.log2();
    let t = xpoly0(m, tol);
    let delta_hat: f64 = fourier_diagonal(m.matrix())
        .iter()
        .enumerate()
        .filter(|(s, _)| weight(*s) >= t)
        .map(|(_, d)| d)
        .sum();
    let explicit_value = log2_explicit_trace(m.matrix(), n, c)? / log2c;
    let lower_envelope = t as f64 - (n as f64 - delta_hat.log2()) / log2c;
    let upper_envelope = t as f64 + n as f64 / log2c;
    let checks = vec![
        Check::le("explicit ≤ madv", explicit_value, res.value, slack),
        Check::le(
            "madv ≤ explicit + n/log c",
            res.value,
            explicit_value + n as f64 / log2c,
            slack,
        ),
        Check::le("lower envelope ≤ madv", lower_envelope, res.value, slack),
        Check::le("madv ≤ upper envelope", res.value, upper_envelope, slack),
    ];
    Ok(SandwichReport {
        n,
        c,
        xpoly0: t,
        delta_hat,
        explicit_value,
        madv: res.value,
        lower_envelope,
        upper_envelope,
        checks,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MadvEpsLower {
    pub eps: f64,
    pub c: f64,
    pub adeg: usize,
    /// `adeg_ε(f) - 2(n - log₂ε)/log₂c`.
    pub closed_form: f64,
    /// `min_N log tr[W_c N] / log c` over ε-valid outputs `N`.
    pub sdp: f64,
    /// Primal value of the same SDP (the dual side is reported in `sdp`).
    pub sdp_primal: f64,
    pub value: f64,
    pub solver: SolveReport,
}

/// Two lower bounds on `MADV_εᶜ(Φ_f)`: the closed form and the exact minimum
/// of the explicit witness's progress over valid outputs.
pub fn madv_eps_lower(f: &BooleanFunction, eps: f64, c: f64, tol: &Tolerances) -> Result<MadvEpsLower> {
    let log2c = check_rate(c)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Input(format!("ε = {eps} outside (0, 1)")));
    }
    let n = f.n();
    let size = f.size();
    if size > MAX_SDP_DIM {
        return Err(Error::Input(format!("2ⁿ = {size} exceeds {MAX_SDP_DIM}")));
    }
    let a = adeg(f, eps, tol)?.degree;
    let closed_form = a as f64 - 2.0 * (n as f64 - eps.log2()) / log2c;

    // Z = [[1, sᵀ], [s, Y]] over the full Fourier basis, minimizing
    // Σ_S c^{|S|-n} Y_SS = 2ⁿ c^{-n} tr[W_c N].
    let k = size + 1;
    let var = |i: usize, j: usize| {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        svec_index(k, i, j)
    };
    let nv = svec_len(k);
    let mut p = ConeProgram::new(nv);
    let mut obj = vec![0.0; nv];
    for s in 0..size {
        obj[var(s + 1, s + 1)] = ((weight(s) as f64 - n as f64) * log2c).exp2();
    }
    p.set_objective(obj);
    p.add_psd(k, |i, j| (vec![(var(i, j), 1.0)], 0.0));
    p.add_equality(vec![(var(0, 0), 1.0)], 1.0);
    let norm = 1.0 / size as f64;
    for x in 0..size {
        // (H Y H)_xx = 2⁻ⁿ Σ_{S,T} χ_S(x)χ_T(x) Y_ST
        let mut row = Vec::new();
        for s in 0..size {
            for t in 0..=s {
                let w = if s == t { 1.0 } else { 2.0 };
                row.push((
                    var(s + 1, t + 1),
                    w * norm * crate::boolfn::character(s ^ t, x),
                ));
            }
        }
        p.add_equality(row, 1.0);
    }
    let thr = (1.0 - eps).sqrt();
    let hn = 1.0 / (size as f64).sqrt();
    for x in 0..size {
        let sx = f.sign(x);
        let row = (0..size)
            .map(|s| (var(s + 1, 0), sx * hn * crate::boolfn::character(s, x)))
            .collect();
        p.add_nonneg(row, -thr);
    }
    let mut settings = tol.admm();
    settings.eps_abs = settings.eps_abs.min(1e-10);
    // Warm start at N = Φ: Y = φ̂φ̂ᵀ·2ⁿ in normalized coordinates, s = Hφ.
    let spec = f.spectrum();
    let sv: Vec<f64> = (0..size).map(|s| spec.coeff(s) * (size as f64).sqrt()).collect();
    let mut warm = vec![0.0; nv];
    warm[var(0, 0)] = 1.0;
    for s in 0..size {
        warm[var(s + 1, 0)] = sv[s];
        for t in 0..=s {
            warm[var(s + 1, t + 1)] = sv[s] * sv[t];
        }
    }
    let sol = solve_conic(&p, &settings, Some(&warm))?;
    if sol.report.status != SolveStatus::Optimal {
        return Err(Error::numeric(
            "madv ε SDP",
            format!(
                "status {:?}, residuals {:.2e}/{:.2e} after {} iterations",
                sol.report.status,
                sol.report.primal_residual,
                sol.report.dual_residual,
                sol.report.iterations
            ),
        ));
    }
    let to_units = |v: f64| (n as f64 * log2c + v.log2() - n as f64) / log2c;
    let primal = sol.report.objective;
    let lower = primal.min(sol.report.dual_objective);
    let sdp = if lower > 0.0 { to_units(lower) } else { f64::NEG_INFINITY };
    Ok(MadvEpsLower {
        eps,
        c,
        adeg: a,
        closed_form,
        sdp,
        sdp_primal: to_units(primal),
        value: closed_form.max(sdp),
        solver: sol.report,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DominanceReport {
    /// `⟨χ_S|W|χ_S⟩ / (2⁻ⁿ c^{|S|})` per `S`; all must be `≤ 1`.
    pub ratios: Vec<f64>,
    pub worst_excess: f64,
    pub pass: bool,
}

/// Checks that the Fourier diagonal of a witness stays under the caps
/// `2⁻ⁿ c^{|S|}`.
pub fn witness_dominance_check(w: &AdversaryWitness, tol: f64) -> DominanceReport {
    let ratios = w.scaled.diagonal();
    dominance_from_ratios(ratios, tol)
}

/// The same check for a witness given in the computational basis.
pub fn matrix_dominance_check(w: &SymMatrix, n: usize, c: f64, tol: f64) -> DominanceReport {
    let diag = fourier_diagonal(w);
    let dim = (1u64 << n) as f64;
    let ratios = diag
        .iter()
        .enumerate()
        .map(|(s, d)| d * dim / c.powi(weight(s) as i32))
        .collect();
    dominance_from_ratios(ratios, tol)
}

fn dominance_from_ratios(ratios: Vec<f64>, tol: f64) -> DominanceReport {
    let worst_excess = ratios.iter().map(|r| r - 1.0).fold(f64::NEG_INFINITY, f64::max);
    DominanceReport {
        pass: worst_excess <= tol,
        ratios,
        worst_excess,
    }
}

/// `W_c` for the phase matrix of `f`, evaluated: `log tr[W_c Φ_f] / log c`.
pub fn explicit_value_for(f: &BooleanFunction, c: f64) -> Result<f64> {
    let phi = phase_matrix(f)?;
    Ok(log2_explicit_trace(phi.matrix(), f.n(), c)? / check_rate(c)?)
}

/// Wraps a scaled matrix as a witness, computing all margins.
pub fn witness_from_scaled(n: usize, c: f64, x: SymMatrix) -> Result<AdversaryWitness> {
    check_rate(c)?;
    AdversaryWitness::from_scaled(n, c, WitnessKind::SdpOptimal, x)
}

/// Dense `W∘D_i` for a plain matrix; used by the tests of the witness identity.
pub fn hadamard_with_sign(w: &SymMatrix, n: usize, i: usize) -> Result<SymMatrix> {
    Ok(OracleAction::new(n, i)?.apply(w))
}
