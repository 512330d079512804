//! The end-to-end property suite behind `verify`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qbounds::boolfn::{fourier_transform, BooleanFunction};
use qbounds::gram::{phase_matrix, random_gram, FourierProjectorFamily};
use qbounds::linalg::{eigh, SymMatrix};
use qbounds::madv::{explicit_witness, madv0_sdp, sandwich_from, witness_dominance_check};
use qbounds::polybounds::{adeg_certified, check_dual, check_fact};
use qbounds::sim::{progress_audit, run, QueryAlgorithm};
use qbounds::xpoly::{projector_family_bound, xpoly0, xpoly_eps_phase};
use qbounds::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub module: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub schema_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub level: Level,
    pub injected_defect: bool,
    pub passed: usize,
    pub failed: usize,
    pub cases: Vec<CaseResult>,
}

impl SuiteSummary {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

struct Suite {
    seed: u64,
    level: Level,
    inject_defect: bool,
    tol: Tolerances,
    cases: Vec<CaseResult>,
}

impl Suite {
    fn record(&mut self, module: &'static str, name: &'static str, outcome: Result<String, String>) {
        let (pass, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.cases.push(CaseResult {
            module,
            name,
            pass,
            detail,
        });
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn scale(&self, quick: usize, full: usize) -> usize {
        match self.level {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

fn catalog() -> Vec<BooleanFunction> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for name in ["or", "and", "parity", "maj"] {
            if let Ok(f) = BooleanFunction::catalog(name, n) {
                out.push(f);
            }
        }
    }
    out
}

fn boolfn_cases(s: &mut Suite) {
    let mut rng = s.rng(1);
    let count = s.scale(50, 500);
    let outcome = (|| {
        for _ in 0..count {
            let f = BooleanFunction::random(4, &mut rng).map_err(|e| e.to_string())?;
            let spec = f.spectrum();
            let mass: f64 = spec.coeffs().iter().map(|c| c * c).sum();
            if (mass - 1.0).abs() > 1e-12 {
                return Err(format!("Parseval mass {mass} for {}", f.to_hex()));
            }
            let signs: Vec<f64> = (0..f.size()).map(|x| f.sign(x)).collect();
            let fl = fourier_transform(&signs).map_err(|e| e.to_string())?;
            if fl.degree() != f.degree() {
                return Err(format!("float and integer degrees differ for {}", f.to_hex()));
            }
        }
        Ok(format!("{count} random functions"))
    })();
    s.record("boolfn", "parseval and degree agreement", outcome);
}

fn linalg_cases(s: &mut Suite) {
    let mut rng = s.rng(2);
    let count = s.scale(20, 200);
    let outcome = (|| {
        let mut worst: f64 = 0.0;
        for k in 0..count {
            let g = random_gram(3, 1 + k % 8, &mut rng).map_err(|e| e.to_string())?;
            let sp = eigh(g.matrix()).map_err(|e| e.to_string())?;
            let back = SymMatrix::from_weighted_columns(&sp.eigenvectors, &sp.eigenvalues);
            worst = worst.max(back.sub(g.matrix()).max_abs());
        }
        if worst > 1e-10 {
            return Err(format!("reconstruction error {worst:e}"));
        }
        Ok(format!("{count} eigendecompositions, error {worst:.1e}"))
    })();
    s.record("linalg", "eigendecomposition reconstruction", outcome);
}

fn gram_cases(s: &mut Suite) {
    let tol = s.tol;
    let outcome = (|| {
        let max_n = s.scale(3, 4);
        let mut count = 0;
        for n in 1..=max_n {
            let tables = if n <= 3 { 1u64 << (1 << n) } else { 200 };
            for t in 0..tables {
                let f = BooleanFunction::parse_table(n, &format!("{t:#x}")).map_err(|e| e.to_string())?;
                let got = xpoly0(&phase_matrix(&f).map_err(|e| e.to_string())?, &tol);
                if got != f.degree() {
                    return Err(format!("xpoly0 {got} ≠ deg {} for {}", f.degree(), f.to_hex()));
                }
                count += 1;
            }
        }
        Ok(format!("{count} phase matrices"))
    })();
    s.record("gram", "xpoly0 of phase matrix equals degree", outcome);
}

fn polybounds_cases(s: &mut Suite) {
    let tol = s.tol;
    let outcome = (|| {
        for f in catalog() {
            for eps in [0.25, 1.0 / 3.0, 0.5] {
                let r = check_fact(&f, eps, &tol).map_err(|e| e.to_string())?;
                if !r.holds {
                    return Err(format!("{} ε={eps}: mass {} < {}", f.to_hex(), r.mass, r.bound));
                }
            }
            let cert = adeg_certified(&f, 1.0 / 3.0, &tol).map_err(|e| e.to_string())?;
            if let Some(d) = &cert.dual {
                let chk = check_dual(d, &f, cert.degree);
                if !chk.holds(1.0 / 3.0, 1e-8) {
                    return Err(format!("{}: dual {chk:?}", f.to_hex()));
                }
            }
        }
        Ok("catalog functions at n ≤ 3".into())
    })();
    s.record("polybounds", "fact and dual certificates", outcome);
}

fn xpoly_cases(s: &mut Suite) {
    let tol = s.tol;
    let outcome = (|| {
        let mut rng = s.rng(5);
        for n in 1..=3 {
            let fam = FourierProjectorFamily::new(n).map_err(|e| e.to_string())?.to_family();
            for k in 0..s.scale(10, 100) {
                let g = random_gram(n, 1 + k % (1 << n), &mut rng).map_err(|e| e.to_string())?;
                let b = projector_family_bound(&g, &fam, &tol).map_err(|e| e.to_string())?;
                if b != xpoly0(&g, &tol) {
                    return Err(format!("Fourier family bound {b} differs from xpoly0"));
                }
            }
        }
        if s.level == Level::Full {
            for f in catalog() {
                let x = xpoly_eps_phase(&f, 1.0 / 3.0, &tol).map_err(|e| e.to_string())?;
                if x.value > f.degree() {
                    return Err(format!("{}: xpoly_ε {} > deg", f.to_hex(), x.value));
                }
            }
        }
        Ok("Fourier family equality".into())
    })();
    s.record("xpoly", "projector family and phase scan", outcome);
}

fn madv_cases(s: &mut Suite) {
    let tol = s.tol;
    let outcome = (|| {
        for n in 2..=4 {
            for c in [2.0, 10.0, 1e3] {
                let w = explicit_witness(n, c).map_err(|e| e.to_string())?;
                if !w.is_feasible(&tol) {
                    return Err(format!("explicit witness infeasible at n={n} c={c}"));
                }
            }
        }
        Ok("explicit witness feasible".into())
    })();
    s.record("madv", "explicit witness feasibility", outcome);

    let targets: Vec<BooleanFunction> = match s.level {
        Level::Quick => vec![BooleanFunction::or(2).unwrap(), BooleanFunction::parity(2).unwrap()],
        Level::Full => vec![
            BooleanFunction::or(2).unwrap(),
            BooleanFunction::or(3).unwrap(),
            BooleanFunction::parity(2).unwrap(),
            BooleanFunction::parity(3).unwrap(),
            BooleanFunction::majority(3).unwrap(),
        ],
    };
    let rates: Vec<f64> = match s.level {
        Level::Quick => vec![2f64.powi(10)],
        Level::Full => vec![2f64.powi(4), 2f64.powi(10), 2f64.powi(20)],
    };
    let inject = s.inject_defect;
    let outcome = (|| {
        let mut worst_excess = f64::NEG_INFINITY;
        for f in &targets {
            let phi = phase_matrix(f).map_err(|e| e.to_string())?;
            for &c in &rates {
                let res = madv0_sdp(&phi, c, &tol).map_err(|e| e.to_string())?;
                let rep = sandwich_from(&phi, &res, &tol, 1e-4).map_err(|e| e.to_string())?;
                if !rep.pass() {
                    return Err(format!("sandwich fails for {} at c={c:e}", f.to_hex()));
                }
                let mut witness = res.witness.clone();
                if inject {
                    // Negative control: push one Fourier weight above its cap.
                    let top = witness.scaled.dim() - 1;
                    let bumped = SymMatrix::from_fn(witness.scaled.dim(), |i, j| {
                        let v = witness.scaled.get(i, j);
                        if i == top && j == top { 1.5 * v.max(1.0) } else { v }
                    });
                    witness.scaled = bumped;
                }
                let dom = witness_dominance_check(&witness, 1e-6);
                worst_excess = worst_excess.max(dom.worst_excess);
                if !dom.pass {
                    return Err(format!(
                        "Fourier diagonal exceeds cap by {:.3e} for {} at c={c:e}",
                        dom.worst_excess,
                        f.to_hex()
                    ));
                }
            }
        }
        Ok(format!("sandwich and caps, worst excess {worst_excess:.1e}"))
    })();
    s.record("madv", "sandwich and witness dominance", outcome);
}

fn sim_cases(s: &mut Suite) {
    let tol = s.tol;
    let count = s.scale(20, 200) as u64;
    let outcome = (|| {
        for k in 0..count {
            let seed = s.seed.wrapping_add(k);
            let alg = QueryAlgorithm::random(3, 1 + (k % 4) as usize, 1 + ((k / 4) % 4) as usize, seed)
                .map_err(|e| e.to_string())?;
            let traj = run(&alg).map_err(|e| e.to_string())?;
            for c in [2.0, 10.0, 100.0] {
                let audit = progress_audit(&traj, c, &tol).map_err(|e| e.to_string())?;
                if audit.violations > 0 {
                    return Err(format!("seed {seed}, c={c}: {} violations", audit.violations));
                }
            }
        }
        Ok(format!("{count} random algorithms"))
    })();
    s.record("sim", "progress audits", outcome);
}

/// Runs the suite. Output is a deterministic function of the arguments.
pub fn run_suite(seed: u64, level: Level, inject_defect: bool, tol: Tolerances) -> SuiteSummary {
    let mut s = Suite {
        seed,
        level,
        inject_defect,
        tol,
        cases: Vec::new(),
    };
    boolfn_cases(&mut s);
    linalg_cases(&mut s);
    gram_cases(&mut s);
    polybounds_cases(&mut s);
    xpoly_cases(&mut s);
    madv_cases(&mut s);
    sim_cases(&mut s);
    let failed = s.cases.iter().filter(|c| !c.pass).count();
    SuiteSummary {
        schema_version: crate::report::SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        level,
        injected_defect: inject_defect,
        passed: s.cases.len() - failed,
        failed,
        cases: s.cases,
    }
}
