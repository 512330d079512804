//! Acceptance gate: runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line each. Exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qbounds::boolfn::BooleanFunction;
use qbounds::gram::{phase_matrix, random_gram, FourierProjectorFamily, GramMatrix};
use qbounds::madv::{explicit_witness, log2_explicit_trace, madv0_sdp, madv_eps_lower, sandwich_from};
use qbounds::polybounds::{adeg, adeg_certified, check_dual, check_fact};
use qbounds::sim::{progress_audit, run, QueryAlgorithm};
use qbounds::xpoly::{
    paired_levels_family, projector_family_bound, random_lipschitz_family,
    validate_projector_family, xpoly0, xpoly_eps_phase,
};
use qbounds::Tolerances;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], summary: String) -> Outcome {
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            summary
        } else {
            format!("{summary}; first failures: {}", failures[..failures.len().min(3)].join(" | "))
        },
    }
}

/// OR, AND, PARITY and MAJ for every `n ≤ 3` where they are defined.
fn catalog() -> Vec<(String, BooleanFunction)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for name in ["or", "and", "parity", "maj"] {
            if let Ok(f) = BooleanFunction::catalog(name, n) {
                out.push((format!("{name}{n}"), f));
            }
        }
    }
    out
}

fn targets() -> Vec<(String, BooleanFunction)> {
    vec![
        ("or2".into(), BooleanFunction::or(2).unwrap()),
        ("or3".into(), BooleanFunction::or(3).unwrap()),
        ("parity2".into(), BooleanFunction::parity(2).unwrap()),
        ("parity3".into(), BooleanFunction::parity(3).unwrap()),
        ("maj3".into(), BooleanFunction::majority(3).unwrap()),
    ]
}

fn degree_identity(tol: &Tolerances) -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for table in 0u64..256 {
        let f = BooleanFunction::parse_table(3, &format!("{table:#x}")).unwrap();
        let got = xpoly0(&phase_matrix(&f).unwrap(), tol);
        if got != f.degree() {
            failures.push(format!("n=3 table {table:#x}: {got} vs {}", f.degree()));
        }
        count += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..500 {
        let f = BooleanFunction::random(4, &mut rng).unwrap();
        let got = xpoly0(&phase_matrix(&f).unwrap(), tol);
        if got != f.degree() {
            failures.push(format!("n=4 sample {k}: {got} vs {}", f.degree()));
        }
        count += 1;
    }
    outcome(&failures, format!("{count} functions, integer equality"))
}

fn witness_feasibility(_tol: &Tolerances) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for n in 2..=4 {
        for c in [2.0, 10.0, 1e3] {
            let w = explicit_witness(n, c).unwrap();
            let rel = w.relative_margin().unwrap();
            worst = worst.min(rel);
            if rel < -1e-9 {
                failures.push(format!("n={n} c={c}: relative margin {rel:e}"));
            }
        }
    }
    outcome(&failures, format!("worst relative margin {worst:.2e} ≥ -1e-9"))
}

fn sandwich(tol: &Tolerances) -> Outcome {
    let mut failures = Vec::new();
    let mut worst_slack = f64::INFINITY;
    for (name, f) in targets() {
        let phi = phase_matrix(&f).unwrap();
        let n = f.n() as f64;
        for e in [4, 10, 20] {
            let c = 2f64.powi(e);
            let log2c = e as f64;
            let res = match madv0_sdp(&phi, c, tol) {
                Ok(r) => r,
                Err(err) => {
                    failures.push(format!("{name} c=2^{e}: {err}"));
                    continue;
                }
            };
            let rep = sandwich_from(&phi, &res, tol, 1e-4).unwrap();
            let lo = rep.explicit_value;
            let hi = lo + n / log2c + 1e-4;
            let gap_cap = (2.0 * n - rep.delta_hat.log2()) / log2c + 1e-4;
            let gap = (res.value - rep.xpoly0 as f64).abs();
            worst_slack = worst_slack
                .min(res.value - lo)
                .min(hi - res.value)
                .min(gap_cap - gap);
            if !(lo <= res.value && res.value <= hi) {
                failures.push(format!("{name} c=2^{e}: {lo} ≤ {} ≤ {hi} fails", res.value));
            }
            if gap > gap_cap {
                failures.push(format!("{name} c=2^{e}: |madv - xpoly0| = {gap} > {gap_cap}"));
            }
        }
    }
    outcome(&failures, format!("15 instances, least slack {worst_slack:.3e}"))
}

fn convergence(tol: &Tolerances) -> Outcome {
    let f = BooleanFunction::parity(2).unwrap();
    let phi = phase_matrix(&f).unwrap();
    let mut failures = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for e in 2..=20 {
        let c = 2f64.powi(e);
        let res = match madv0_sdp(&phi, c, tol) {
            Ok(r) => r,
            Err(err) => {
                failures.push(format!("c=2^{e}: {err}"));
                continue;
            }
        };
        let gap = res.value - 2.0;
        worst_gap = worst_gap.max(gap);
        if gap > 2.0 / e as f64 {
            failures.push(format!("c=2^{e}: gap {gap} > {}", 2.0 / e as f64));
        }
        let envelope = log2_explicit_trace(phi.matrix(), 2, c).unwrap() / e as f64;
        if (envelope - 2.0).abs() > 1e-12 {
            failures.push(format!("c=2^{e}: explicit envelope {envelope} ≠ 2"));
        }
    }
    outcome(&failures, format!("c = 2^2..2^20, largest gap {worst_gap:.2e}"))
}

fn phase_dominance(tol: &Tolerances) -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for (name, f) in catalog() {
        for eps in [0.1, 1.0 / 3.0] {
            count += 1;
            let x = match xpoly_eps_phase(&f, eps, tol) {
                Ok(r) => r.value,
                Err(err) => {
                    failures.push(format!("{name} ε={eps:.3}: {err}"));
                    continue;
                }
            };
            let a = adeg(&f, eps / 2.0, tol).unwrap().degree;
            if x < a {
                failures.push(format!("{name} ε={eps:.3}: xpoly {x} < adeg {a}"));
            }
        }
    }
    outcome(&failures, format!("{count} pairs"))
}

fn fact(tol: &Tolerances) -> Outcome {
    let mut failures = Vec::new();
    let mut least = f64::INFINITY;
    for (name, f) in catalog() {
        for eps in [0.25, 1.0 / 3.0, 0.5] {
            let r = check_fact(&f, eps, tol).unwrap();
            least = least.min(r.mass - r.bound);
            if r.mass < r.bound - 1e-10 {
                failures.push(format!("{name} ε={eps:.3}: {} < {}", r.mass, r.bound));
            }
        }
    }
    outcome(&failures, format!("least excess mass {least:.3e}"))
}

fn dual_certificates(tol: &Tolerances) -> Outcome {
    let eps = 1.0 / 3.0;
    let mut failures = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for (name, f) in catalog() {
        let cert = match adeg_certified(&f, eps, tol) {
            Ok(c) => c,
            Err(err) => {
                failures.push(format!("{name}: {err}"));
                continue;
            }
        };
        let t = cert.degree;
        let Some(d) = cert.dual.as_ref() else {
            failures.push(format!("{name}: no dual polynomial at degree {t}"));
            continue;
        };
        let chk = check_dual(d, &f, t);
        if !chk.holds(eps, 1e-8) {
            failures.push(format!("{name}: {chk:?}"));
        }
        match cert.scan.iter().find(|s| s.degree + 1 == t) {
            Some(step) => {
                worst_gap = worst_gap.max(step.gap);
                if step.gap > 1e-6 {
                    failures.push(format!("{name}: gap {} at degree {}", step.gap, t - 1));
                }
            }
            None => failures.push(format!("{name}: no LP at degree {}", t - 1)),
        }
    }
    outcome(&failures, format!("largest duality gap {worst_gap:.2e}"))
}

fn progress(tol: &Tolerances) -> Outcome {
    let mut failures = Vec::new();
    let mut steps = 0;
    for seed in 0..200u64 {
        let queries = 1 + (seed % 4) as usize;
        let workspace = 1 + ((seed / 4) % 4) as usize;
        let alg = QueryAlgorithm::random(3, queries, workspace, seed).unwrap();
        let traj = run(&alg).unwrap();
        for c in [2.0, 10.0, 100.0] {
            let audit = progress_audit(&traj, c, tol).unwrap();
            steps += audit.steps.len();
            if audit.violations > 0 {
                failures.push(format!("seed {seed} c={c}: {} violations", audit.violations));
            }
        }
    }
    outcome(&failures, format!("200 algorithms, {steps} audited steps"))
}

fn family_dominance(tol: &Tolerances) -> Outcome {
    let mut failures = Vec::new();
    let mut families_checked = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in 1..=3 {
        let fourier = FourierProjectorFamily::new(n).unwrap().to_family();
        let mut families = vec![("fourier".to_string(), fourier), (
            "paired".to_string(),
            paired_levels_family(n).unwrap(),
        )];
        for k in 0..20 {
            families.push((format!("lipschitz{k}"), random_lipschitz_family(n, &mut rng).unwrap()));
        }
        families.retain(|(_, fam)| validate_projector_family(fam).is_valid());
        families_checked += families.len();
        let grams: Vec<GramMatrix> = (0..100)
            .map(|k| {
                if k % 2 == 0 {
                    random_gram(n, 1 + k % (1 << n), &mut rng).unwrap()
                } else {
                    let t = (k / 2) % (n + 1);
                    let alg = QueryAlgorithm::random(n, t, 2, k as u64).unwrap();
                    run(&alg).unwrap().gram[t].clone()
                }
            })
            .collect();
        for (k, m) in grams.iter().enumerate() {
            let x = xpoly0(m, tol);
            for (name, fam) in &families {
                let b = projector_family_bound(m, fam, tol).unwrap();
                if b > x {
                    failures.push(format!("n={n} gram {k} {name}: {b} > {x}"));
                }
                if name == "fourier" && b != x {
                    failures.push(format!("n={n} gram {k}: Fourier bound {b} ≠ {x}"));
                }
            }
        }
    }
    outcome(&failures, format!("{families_checked} valid families × 100 Gram matrices"))
}

fn eps_lemma(tol: &Tolerances) -> Outcome {
    let eps = 1.0 / 3.0;
    let mut failures = Vec::new();
    let mut count = 0;
    for (name, f) in catalog() {
        let phi = phase_matrix(&f).unwrap();
        for e in [10, 20] {
            let c = 2f64.powi(e);
            count += 1;
            let (low, sdp) = match (madv_eps_lower(&f, eps, c, tol), madv0_sdp(&phi, c, tol)) {
                (Ok(l), Ok(s)) => (l, s),
                (Err(err), _) | (_, Err(err)) => {
                    failures.push(format!("{name} c=2^{e}: {err}"));
                    continue;
                }
            };
            let (a, b) = (low.closed_form, low.sdp);
            if a > 0.0 && b < a - 1e-4 {
                failures.push(format!("{name} c=2^{e}: (b) {b} < (a) {a}"));
            }
            for (label, v) in [("(a)", a), ("(b)", b)] {
                if v > sdp.value + 1e-4 {
                    failures.push(format!("{name} c=2^{e}: {label} {v} > madv0 {}", sdp.value));
                }
            }
        }
    }
    outcome(&failures, format!("{count} instances"))
}

type Criterion = (usize, &'static str, Duration, fn(&Tolerances) -> Outcome);

fn main() {
    let tol = Tolerances::default();
    let criteria: [Criterion; 10] = [
        (1, "degree identity", Duration::from_secs(30), degree_identity),
        (2, "explicit witness feasibility", Duration::from_secs(10), witness_feasibility),
        (3, "sandwich", Duration::from_secs(300), sandwich),
        (4, "parity convergence", Duration::from_secs(300), convergence),
        (5, "phase dominance over adeg", Duration::from_secs(300), phase_dominance),
        (6, "high-level Fourier mass", Duration::from_secs(300), fact),
        (7, "dual polynomial certificates", Duration::from_secs(300), dual_certificates),
        (8, "progress audits", Duration::from_secs(120), progress),
        (9, "projector family dominance", Duration::from_secs(300), family_dominance),
        (10, "epsilon lower bounds", Duration::from_secs(300), eps_lemma),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let out = check(&tol);
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {id:>2} {name}: {} ({:.2}s, limit {}s{})",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
