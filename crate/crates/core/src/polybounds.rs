//! Approximate degree by linear programming, dual polynomials, and the
//! lower bound on high-level Fourier mass of sign-approximating polynomials.
//!
//! Polynomials are multilinear and stored by their Fourier coefficients,
//! `p(x) = Σ_S (-1)^{S·x} p̂(S)`. The approximation LP at degree `d` is
//!
//! ```text
//! minimize t  subject to  |Σ_{|S|≤d} (-1)^{S·x} p̂(S) - f(x)| ≤ t  for all x
//! ```
//!
//! and its LP dual is the search for a dual polynomial.

use serde::{Deserialize, Serialize};

use crate::boolfn::{character, fourier_transform, walsh_hadamard, weight, BooleanFunction};
use crate::config::{Tolerances, TAU_ZERO};
use crate::error::{Error, Result};
use crate::solver::{solve_lp, ConeProgram, LpSettings, Solution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    n: usize,
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != 1 << n {
            return Err(Error::Input(format!(
                "polynomial on {n} bits needs {} coefficients, got {}",
                1usize << n,
                coeffs.len()
            )));
        }
        Ok(Polynomial { n, coeffs })
    }

    /// The unique multilinear polynomial taking the given values.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let sp = fourier_transform(values)?;
        Ok(Polynomial {
            n: sp.n(),
            coeffs: sp.coeffs().to_vec(),
        })
    }

    /// `f` itself as a 0/1-valued polynomial.
    pub fn of_function(f: &BooleanFunction) -> Self {
        let vals: Vec<f64> = f.table().iter().map(|&b| b as f64).collect();
        Polynomial::from_values(&vals).expect("truth tables have power-of-two length")
    }

    /// The sign form `(-1)^f` as a polynomial.
    pub fn sign_of(f: &BooleanFunction) -> Self {
        Polynomial {
            n: f.n(),
            coeffs: f.spectrum().coeffs().to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, s: usize) -> f64 {
        self.coeffs[s]
    }

    pub fn eval(&self, x: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| character(s, x) * c)
            .sum()
    }

    /// All values `p(x)`, by the fast transform.
    pub fn values(&self) -> Vec<f64> {
        let mut v = self.coeffs.clone();
        walsh_hadamard(&mut v);
        v
    }

    pub fn degree(&self) -> usize {
        self.degree_with(TAU_ZERO)
    }

    pub fn degree_with(&self, tau: f64) -> usize {
        (0..self.coeffs.len())
            .filter(|&s| self.coeffs[s].abs() > tau)
            .map(weight)
            .max()
            .unwrap_or(0)
    }

    /// Keeps only the coefficients with `|S| < t`.
    pub fn truncate_below(&self, t: usize) -> Polynomial {
        Polynomial {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(s, &c)| if weight(s) < t { c } else { 0.0 })
                .collect(),
        }
    }

    /// `max_x |p(x) - f(x)|`.
    pub fn sup_distance(&self, f: &BooleanFunction) -> f64 {
        self.values()
            .iter()
            .zip(f.table())
            .map(|(p, &b)| (p - b as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// `Σ_{|S|≥T} p̂(S)²`.
pub fn fourier_mass_above(p: &Polynomial, t: usize) -> f64 {
    p.coeffs
        .iter()
        .enumerate()
        .filter(|(s, _)| weight(*s) >= t)
        .map(|(_, c)| c * c)
        .sum()
}

/// One LP of the degree scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeStep {
    pub degree: usize,
    /// Optimal uniform error `t*` at this degree.
    pub error: f64,
    /// `|primal - dual|` objective gap reported by the simplex.
    pub gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeCertificate {
    pub degree: usize,
    pub eps: f64,
    /// Approximant of degree `≤ degree` with `|p - f| ≤ ε + 1e-8`.
    pub primal: Polynomial,
    /// `max_x |p(x) - f(x)|` for the primal.
    pub primal_error: f64,
    /// Dual polynomial certifying the degree, when requested.
    pub dual: Option<Polynomial>,
    pub scan: Vec<DegreeStep>,
}

fn lp_settings() -> LpSettings {
    LpSettings::default()
}

fn lp_failure(context: &str, sol: &Solution) -> Error {
    Error::numeric(
        context,
        format!(
            "status {:?} after {} pivots",
            sol.report.status, sol.report.iterations
        ),
    )
}

/// Best uniform approximation of `f` by polynomials of degree `≤ d`.
pub fn best_approximation(f: &BooleanFunction, d: usize) -> Result<(DegreeStep, Polynomial)> {
    let n = f.n();
    let size = f.size();
    let basis: Vec<usize> = (0..size).filter(|&s| weight(s) <= d).collect();
    let t = basis.len();
    let mut lp = ConeProgram::new(t + 1);
    let mut obj = vec![0.0; t + 1];
    obj[t] = 1.0;
    lp.set_objective(obj);
    for x in 0..size {
        let fx = f.value(x) as f64;
        let mut lo = vec![(t, 1.0)];
        let mut hi = vec![(t, 1.0)];
        for (k, &s) in basis.iter().enumerate() {
            let chi = character(s, x);
            lo.push((k, -chi));
            hi.push((k, chi));
        }
        // t - (p(x) - f(x)) ≥ 0 and t + (p(x) - f(x)) ≥ 0
        lp.add_nonneg(lo, fx);
        lp.add_nonneg(hi, -fx);
    }
    let sol = solve_lp(&lp, &lp_settings())?;
    if !sol.is_optimal() {
        return Err(lp_failure(&format!("approximation LP at degree {d}"), &sol));
    }
    let mut coeffs = vec![0.0; size];
    for (k, &s) in basis.iter().enumerate() {
        coeffs[s] = sol.x[k];
    }
    let step = DegreeStep {
        degree: d,
        error: sol.x[t],
        gap: (sol.report.objective - sol.report.dual_objective).abs(),
        iterations: sol.report.iterations,
    };
    Ok((step, Polynomial::new(n, coeffs)?))
}

/// `adeg_ε(f)` by a linear scan over degrees, with the approximant attached.
/// For `ε = 0` this is the exact degree; for `ε ≥ 1/2` the constant `1/2`
/// suffices.
pub fn adeg(f: &BooleanFunction, eps: f64, tol: &Tolerances) -> Result<DegreeCertificate> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Input(format!("ε = {eps} outside [0, 1)")));
    }
    if eps == 0.0 {
        let p = Polynomial::of_function(f);
        return Ok(DegreeCertificate {
            degree: f.degree(),
            eps,
            primal_error: p.sup_distance(f),
            primal: p,
            dual: None,
            scan: vec![],
        });
    }
    if eps >= 0.5 {
        let mut coeffs = vec![0.0; f.size()];
        coeffs[0] = 0.5;
        let p = Polynomial::new(f.n(), coeffs)?;
        return Ok(DegreeCertificate {
            degree: 0,
            eps,
            primal_error: p.sup_distance(f),
            primal: p,
            dual: None,
            scan: vec![],
        });
    }
    let mut scan = Vec::new();
    for d in 0..=f.n() {
        let (step, p) = best_approximation(f, d)?;
        let ok = step.error <= eps + tol.lp_feasibility;
        scan.push(step);
        if ok {
            return Ok(DegreeCertificate {
                degree: d,
                eps,
                primal_error: p.sup_distance(f),
                primal: p,
                dual: None,
                scan,
            });
        }
    }
    Err(Error::numeric(
        "adeg",
        format!("no degree reached error {eps}; scan {scan:?}"),
    ))
}

/// [`adeg`] followed by [`dual_polynomial`] at the found degree (when it is
/// positive).
pub fn adeg_certified(f: &BooleanFunction, eps: f64, tol: &Tolerances) -> Result<DegreeCertificate> {
    let mut cert = adeg(f, eps, tol)?;
    if cert.degree > 0 && eps > 0.0 {
        cert.dual = Some(dual_polynomial(f, eps, cert.degree, tol)?);
    }
    Ok(cert)
}

/// A polynomial `d` with `Σ|d(x)| = 1`, `Σ d(x)f(x) ≥ ε` and `d̂(S) = 0`
/// for `|S| < T`, maximizing the correlation `Σ d(x)f(x)`.
pub fn dual_polynomial(f: &BooleanFunction, eps: f64, t: usize, tol: &Tolerances) -> Result<Polynomial> {
    let size = f.size();
    // Variables: d_x (0..size), a_x ≥ |d_x| (size..2size).
    let mut lp = ConeProgram::new(2 * size);
    let mut obj = vec![0.0; 2 * size];
    for x in 0..size {
        obj[x] = -(f.value(x) as f64);
    }
    lp.set_objective(obj);
    for x in 0..size {
        lp.add_nonneg(vec![(size + x, 1.0), (x, -1.0)], 0.0);
        lp.add_nonneg(vec![(size + x, 1.0), (x, 1.0)], 0.0);
    }
    lp.add_nonneg((0..size).map(|x| (size + x, -1.0)).collect(), 1.0);
    for s in (0..size).filter(|&s| weight(s) < t) {
        lp.add_equality((0..size).map(|x| (x, character(s, x))).collect(), 0.0);
    }
    let sol = solve_lp(&lp, &lp_settings())?;
    if !sol.is_optimal() {
        return Err(lp_failure("dual polynomial LP", &sol));
    }
    let d: Vec<f64> = sol.x[..size].to_vec();
    let l1: f64 = d.iter().map(|v| v.abs()).sum();
    if l1 <= tol.lp_feasibility {
        return Err(Error::Logic(format!(
            "no dual polynomial: degree {t} is not tight at ε = {eps}"
        )));
    }
    let d: Vec<f64> = d.iter().map(|v| v / l1).collect();
    let corr: f64 = d.iter().zip(f.table()).map(|(v, &b)| v * b as f64).sum();
    if corr < eps - tol.lp_feasibility {
        return Err(Error::Logic(format!(
            "dual correlation {corr} below ε = {eps}: degree {t} is not tight"
        )));
    }
    Polynomial::from_values(&d)
}

/// The three dual-polynomial conditions, measured.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DualCheck {
    /// `Σ_x |d(x)|`.
    pub l1: f64,
    /// `Σ_x d(x) f(x)`.
    pub correlation: f64,
    /// `max_{|S|<T} |Σ_x d(x)(-1)^{S·x}|`.
    pub low_level: f64,
}

impl DualCheck {
    pub fn holds(&self, eps: f64, tol: f64) -> bool {
        (self.l1 - 1.0).abs() <= tol && self.correlation >= eps - tol && self.low_level <= tol
    }
}

pub fn check_dual(d: &Polynomial, f: &BooleanFunction, t: usize) -> DualCheck {
    let vals = d.values();
    let size = vals.len() as f64;
    DualCheck {
        l1: vals.iter().map(|v| v.abs()).sum(),
        correlation: vals.iter().zip(f.table()).map(|(v, &b)| v * b as f64).sum(),
        // d̂(S) is normalized by 2⁻ⁿ; the condition is on the raw sum.
        low_level: d
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(s, _)| weight(*s) < t)
            .map(|(_, c)| (c * size).abs())
            .fold(0.0, f64::max),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactReport {
    pub eps: f64,
    /// `T = adeg_ε(f)`.
    pub degree: usize,
    /// `Σ_{|S|≥T} p̂(S)²` for the adversarially chosen `p`.
    pub mass: f64,
    /// `ε²/2ⁿ`.
    pub bound: f64,
    pub holds: bool,
    /// `min_x min((-1)^{f(x)}p(x) - √(1-ε), 1 - (-1)^{f(x)}p(x))`.
    pub constraint_slack: f64,
    pub polynomial: Polynomial,
}

/// Finds `p` with `√(1-ε) ≤ (-1)^{f(x)}p(x) ≤ 1` minimizing the proxy
/// `Σ_{|S|≥T} |p̂(S)|`, and compares its mass above `T = adeg_ε(f)` with
/// `ε²/2ⁿ`.
pub fn check_fact(f: &BooleanFunction, eps: f64, tol: &Tolerances) -> Result<FactReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Input(format!("ε = {eps} outside (0, 1)")));
    }
    let t = adeg(f, eps, tol)?.degree;
    let p = sign_approximant(f, eps, t)?;
    let mass = fourier_mass_above(&p, t);
    let bound = eps * eps / f.size() as f64;
    let lo = (1.0 - eps).sqrt();
    let constraint_slack = p
        .values()
        .iter()
        .enumerate()
        .map(|(x, v)| {
            let s = f.sign(x) * v;
            (s - lo).min(1.0 - s)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(FactReport {
        eps,
        degree: t,
        mass,
        bound,
        holds: mass >= bound - 1e-10,
        constraint_slack,
        polynomial: p,
    })
}

/// The LP behind [`check_fact`]: minimize `Σ_{|S|≥T}|p̂(S)|` subject to
/// `√(1-ε) ≤ (-1)^{f(x)}p(x) ≤ 1`.
pub fn sign_approximant(f: &BooleanFunction, eps: f64, t: usize) -> Result<Polynomial> {
    let size = f.size();
    let high: Vec<usize> = (0..size).filter(|&s| weight(s) >= t).collect();
    let nv = size + high.len();
    let mut lp = ConeProgram::new(nv);
    let mut obj = vec![0.0; nv];
    obj[size..].iter_mut().for_each(|c| *c = 1.0);
    lp.set_objective(obj);
    let lo = (1.0 - eps).sqrt();
    for x in 0..size {
        let sx = f.sign(x);
        let row: Vec<(usize, f64)> = (0..size).map(|s| (s, sx * character(s, x))).collect();
        lp.add_nonneg(row.clone(), -lo);
        lp.add_nonneg(row.iter().map(|&(s, v)| (s, -v)).collect(), 1.0);
    }
    for (k, &s) in high.iter().enumerate() {
        lp.add_nonneg(vec![(size + k, 1.0), (s, -1.0)], 0.0);
        lp.add_nonneg(vec![(size + k, 1.0), (s, 1.0)], 0.0);
    }
    let sol = solve_lp(&lp, &lp_settings())?;
    if !sol.is_optimal() {
        return Err(lp_failure("sign-approximation LP", &sol));
    }
    Polynomial::new(f.n(), sol.x[..size].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn evaluation_matches_inverse_transform() {
        let f = BooleanFunction::majority(3).unwrap();
        let p = Polynomial::sign_of(&f);
        let inv = f.spectrum().inverse();
        for x in 0..8 {
            assert!((p.eval(x) - inv[x]).abs() < 1e-12);
            assert!((p.values()[x] - f.sign(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_of_full_character() {
        let mut c = vec![0.0; 8];
        c[7] = 1.0;
        let p = Polynomial::new(3, c).unwrap();
        assert_eq!(fourier_mass_above(&p, 3), 1.0);
        assert_eq!(fourier_mass_above(&p.truncate_below(3), 0), 0.0);
    }

    #[test]
    fn zero_error_gives_exact_degree() {
        for name in ["or", "and", "parity", "maj"] {
            let f = BooleanFunction::catalog(name, 3).unwrap();
            let cert = adeg(&f, 0.0, &tol()).unwrap();
            assert_eq!(cert.degree, f.degree());
            assert!(cert.primal_error < 1e-12);
        }
    }

    #[test]
    fn parity_needs_full_degree() {
        for n in 1..=4 {
            let f = BooleanFunction::parity(n).unwrap();
            let cert = adeg(&f, 1.0 / 3.0, &tol()).unwrap();
            assert_eq!(cert.degree, n);
            // Every lower degree is stuck at the trivial error 1/2.
            let (step, _) = best_approximation(&f, n - 1).unwrap();
            assert!((step.error - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn or2_best_linear_error_is_a_quarter() {
        let f = BooleanFunction::or(2).unwrap();
        let (step, p) = best_approximation(&f, 1).unwrap();
        assert!((step.error - 0.25).abs() < 1e-12);
        assert!(p.sup_distance(&f) <= 0.25 + 1e-12);
        assert_eq!(adeg(&f, 1.0 / 3.0, &tol()).unwrap().degree, 1);
        assert_eq!(adeg(&f, 1.0 / 6.0, &tol()).unwrap().degree, 2);
    }

    #[test]
    fn dual_for_parity_vanishes_below_top_level() {
        let f = BooleanFunction::parity(2).unwrap();
        let d = dual_polynomial(&f, 1.0 / 3.0, 2, &tol()).unwrap();
        let chk = check_dual(&d, &f, 2);
        assert!(chk.holds(1.0 / 3.0, 1e-8), "{chk:?}");
        assert!(d.coeff(0).abs() < 1e-12 && d.coeff(1).abs() < 1e-12 && d.coeff(2).abs() < 1e-12);
    }

    #[test]
    fn dual_for_constant_one_is_a_point_mass() {
        let f = BooleanFunction::constant(2, true).unwrap();
        let d = dual_polynomial(&f, 0.1, 0, &tol()).unwrap();
        let chk = check_dual(&d, &f, 0);
        assert!((chk.l1 - 1.0).abs() < 1e-12 && (chk.correlation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dual_for_constant_zero_is_a_logic_error() {
        let f = BooleanFunction::constant(2, false).unwrap();
        assert!(matches!(dual_polynomial(&f, 0.1, 0, &tol()), Err(Error::Logic(_))));
    }

    #[test]
    fn fact_holds_on_parity_and_or() {
        let r = check_fact(&BooleanFunction::parity(2).unwrap(), 1.0 / 3.0, &tol()).unwrap();
        assert!(r.holds && r.mass > r.bound);
        assert!(r.constraint_slack >= -1e-9);
        let r = check_fact(&BooleanFunction::or(3).unwrap(), 0.5, &tol()).unwrap();
        assert!(r.holds, "{r:?}");
    }
}
