//! `bounds` and `sweep-c`.

use serde::Serialize;
use sha2::{Digest, Sha256};

use qbounds::boolfn::BooleanFunction;
use qbounds::gram::phase_matrix;
use qbounds::madv::{
    madv0_sdp, madv_eps_lower, sandwich_from, witness_dominance_check, Check, WitnessSource,
};
use qbounds::polybounds::{adeg, adeg_certified, check_dual, Polynomial};
use qbounds::solver::SolveReport;
use qbounds::xpoly::{xpoly0, xpoly_eps_phase};
use qbounds::Tolerances;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
/// Slack on every inequality re-checked in a report.
pub const CHECK_SLACK: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct FunctionSpec {
    pub name: Option<String>,
    pub table: String,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdegEntry {
    pub degree: usize,
    pub eps: f64,
    pub primal_error: f64,
    /// SHA-256 of the approximant's coefficients printed to 12 digits.
    pub digest: String,
    pub dual_verified: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsLowerEntry {
    pub closed_form: f64,
    pub sdp: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MadvEntry {
    pub c: f64,
    pub madv0: f64,
    pub explicit: f64,
    pub dual_estimate: f64,
    pub source: WitnessSource,
    pub lower_envelope: f64,
    pub upper_envelope: f64,
    pub eps_lower: Option<EpsLowerEntry>,
    pub solver: SolveReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub function: FunctionSpec,
    pub eps: f64,
    pub deg: usize,
    pub adeg: AdegEntry,
    pub xpoly0: usize,
    pub xpoly_eps: Option<usize>,
    pub xpoly_eps_marginal: Option<bool>,
    pub madv: Vec<MadvEntry>,
    pub checks: Vec<Check>,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let name = self.function.name.as_deref().unwrap_or("table");
        out += &format!(
            "function  {name} (n = {}, table {})\n",
            self.function.n, self.function.table
        );
        out += &format!("eps       {}\n", self.eps);
        out += &format!("deg       {}\n", self.deg);
        out += &format!(
            "adeg      {} (error {:.3e}, digest {})\n",
            self.adeg.degree,
            self.adeg.primal_error,
            &self.adeg.digest[..16]
        );
        out += &format!("xpoly0    {}\n", self.xpoly0);
        if let Some(x) = self.xpoly_eps {
            out += &format!("xpoly_eps {x}\n");
        }
        for m in &self.madv {
            out += &format!(
                "madv0     c = {:e}: {:.6} in [{:.6}, {:.6}] (explicit {:.6})\n",
                m.c, m.madv0, m.lower_envelope, m.upper_envelope, m.explicit
            );
            if let Some(e) = &m.eps_lower {
                out += &format!(
                    "madv_eps  c = {:e}: ≥ {:.6} (closed form {:.6}, sdp {:.6})\n",
                    m.c, e.value, e.closed_form, e.sdp
                );
            }
        }
        for c in &self.checks {
            out += &format!(
                "[{}] {}: {:.6} ≤ {:.6} (tol {:e})\n",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.lhs,
                c.rhs,
                c.tolerance
            );
        }
        out
    }
}

fn digest(p: &Polynomial) -> String {
    let mut h = Sha256::new();
    for c in p.coeffs() {
        h.update(format!("{c:.12e};").as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Computes every bound that applies to `f` and re-checks the known
/// inequalities between them.
pub fn bounds(
    f: &BooleanFunction,
    name: Option<String>,
    eps: f64,
    rates: &[f64],
    tol: &Tolerances,
) -> Result<BoundReport, CliError> {
    let n = f.n();
    let phi = phase_matrix(f)?;
    let deg = f.degree();
    let x0 = xpoly0(&phi, tol);
    let cert = adeg_certified(f, eps, tol)?;
    let dual_verified = cert
        .dual
        .as_ref()
        .map(|d| check_dual(d, f, cert.degree).holds(eps, tol.lp_feasibility));
    let mut checks = vec![
        Check::le("xpoly0 ≤ deg", x0 as f64, deg as f64, 0.0),
        Check::le("deg ≤ xpoly0", deg as f64, x0 as f64, 0.0),
        Check::le("adeg ≤ deg", cert.degree as f64, deg as f64, 0.0),
    ];
    if dual_verified == Some(false) {
        checks.push(Check::le("dual polynomial conditions", 1.0, 0.0, tol.lp_feasibility));
    }
    let (xpoly_eps, xpoly_eps_marginal) = if eps > 0.0 {
        let r = xpoly_eps_phase(f, eps, tol)?;
        let half = adeg(f, eps / 2.0, tol)?.degree;
        checks.push(Check::le("adeg_{ε/2} ≤ xpoly_ε", half as f64, r.value as f64, 0.0));
        checks.push(Check::le("xpoly_ε ≤ xpoly0", r.value as f64, x0 as f64, 0.0));
        (Some(r.value), Some(r.marginal))
    } else {
        (None, None)
    };
    let mut madv = Vec::new();
    for &c in rates {
        let res = madv0_sdp(&phi, c, tol)?;
        let sw = sandwich_from(&phi, &res, tol, CHECK_SLACK)?;
        for mut chk in sw.checks {
            chk.name = format!("c = {c:e}: {}", chk.name);
            checks.push(chk);
        }
        let dom = witness_dominance_check(&res.witness, 1e-6);
        checks.push(Check::le(
            &format!("c = {c:e}: witness Fourier diagonal ≤ caps"),
            dom.worst_excess,
            0.0,
            1e-6,
        ));
        let eps_lower = if eps > 0.0 {
            let l = madv_eps_lower(f, eps, c, tol)?;
            if l.closed_form > 0.0 {
                checks.push(Check::le(
                    &format!("c = {c:e}: closed form ≤ sdp lower bound"),
                    l.closed_form,
                    l.sdp,
                    CHECK_SLACK,
                ));
            }
            checks.push(Check::le(
                &format!("c = {c:e}: sdp lower bound ≤ madv0"),
                l.sdp,
                res.value,
                CHECK_SLACK,
            ));
            Some(EpsLowerEntry {
                closed_form: l.closed_form,
                sdp: l.sdp,
                value: l.value,
            })
        } else {
            None
        };
        madv.push(MadvEntry {
            c,
            madv0: res.value,
            explicit: res.explicit_value,
            dual_estimate: res.dual_value,
            source: res.source,
            lower_envelope: sw.lower_envelope,
            upper_envelope: sw.upper_envelope,
            eps_lower,
            solver: res.solver,
        });
    }
    Ok(BoundReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        function: FunctionSpec {
            name,
            table: f.to_hex(),
            n,
        },
        eps,
        deg,
        adeg: AdegEntry {
            degree: cert.degree,
            eps,
            primal_error: cert.primal_error,
            digest: digest(&cert.primal),
            dual_verified,
        },
        xpoly0: x0,
        xpoly_eps,
        xpoly_eps_marginal,
        madv,
        checks,
        tolerances: *tol,
        timestamp: None,
    })
}

/// One row of `sweep-c`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub madv0_sdp: f64,
    pub lower: f64,
    pub upper: f64,
    pub xpoly0: usize,
}

pub const SWEEP_HEADER: &str = "c,madv0_sdp,lower,upper,xpoly0";

impl SweepRow {
    pub fn csv(&self) -> String {
        format!(
            "{:e},{:.9},{:.9},{:.9},{}",
            self.c, self.madv0_sdp, self.lower, self.upper, self.xpoly0
        )
    }
}

pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub checks: Vec<Check>,
}

/// `MADV₀ᶜ(Φ_f)` and its envelopes over a grid of rates. Checks that each
/// value sits inside its envelope and that the envelopes narrow as `c`
/// grows.
pub fn sweep(f: &BooleanFunction, grid: &[f64], tol: &Tolerances) -> Result<Sweep, CliError> {
    let phi = phase_matrix(f)?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &c in grid {
        let res = madv0_sdp(&phi, c, tol)?;
        let sw = sandwich_from(&phi, &res, tol, CHECK_SLACK)?;
        checks.push(Check::le(&format!("c = {c:e}: lower ≤ madv"), sw.lower_envelope, res.value, CHECK_SLACK));
        checks.push(Check::le(&format!("c = {c:e}: madv ≤ upper"), res.value, sw.upper_envelope, CHECK_SLACK));
        rows.push(SweepRow {
            c,
            madv0_sdp: res.value,
            lower: sw.lower_envelope,
            upper: sw.upper_envelope,
            xpoly0: sw.xpoly0,
        });
    }
    for w in rows.windows(2) {
        if w[1].c > w[0].c {
            let before = w[0].upper - w[0].lower;
            let after = w[1].upper - w[1].lower;
            checks.push(Check::le(
                &format!("envelope width narrows from c = {:e} to {:e}", w[0].c, w[1].c),
                after,
                before,
                1e-12,
            ));
        }
    }
    Ok(Sweep { rows, checks })
}

/// Parses `2^a..2^b` (every power of two in between), `2^a..2^b:k`
/// (exponent step `k`) or a comma-separated list of rates.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad --c-grid `{spec}`; expected 2^a..2^b[:step] or a list"));
    let spec = spec.trim();
    if let Some((lo, hi)) = spec.split_once("..") {
        let (hi, step) = match hi.split_once(':') {
            Some((h, s)) => (h, s.trim().parse::<usize>().map_err(|_| bad())?),
            None => (hi, 1),
        };
        let exp = |s: &str| -> Result<i32, CliError> {
            s.trim().strip_prefix("2^").ok_or_else(bad)?.parse().map_err(|_| bad())
        };
        let (a, b) = (exp(lo)?, exp(hi)?);
        if a < 1 || b < a || step == 0 {
            return Err(bad());
        }
        return Ok((a..=b).step_by(step).map(|e| 2f64.powi(e)).collect());
    }
    spec.split(',').map(parse_rate).collect()
}

/// A rate given as a number or as `2^k`.
pub fn parse_rate(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let c = match s.strip_prefix("2^") {
        Some(e) => e.parse::<i32>().ok().map(|e| 2f64.powi(e)),
        None => s.parse::<f64>().ok(),
    }
    .ok_or_else(|| CliError::Usage(format!("bad rate `{s}`")))?;
    if !(c.is_finite() && c > 1.0) {
        return Err(CliError::Usage(format!("rate {s} must exceed 1")));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("2^2..2^4").unwrap(), vec![4.0, 8.0, 16.0]);
        assert_eq!(parse_grid("2^2..2^6:2").unwrap(), vec![4.0, 16.0, 64.0]);
        assert_eq!(parse_grid("3, 2^3").unwrap(), vec![3.0, 8.0]);
        assert!(parse_grid("1").is_err());
        assert!(parse_grid("2^4..2^2").is_err());
    }
}
