//! Independent reference computations checked against the library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qbounds::boolfn::{weight, BooleanFunction};
use qbounds::gram::{fh_estimate, phase_matrix, phase_validity_check, GramMatrix};
use qbounds::madv::{explicit_trace, madv0_sdp};
use qbounds::polybounds::{adeg, best_approximation, check_fact, fourier_mass_above};
use qbounds::xpoly::{xpoly0, xpoly_eps_phase};
use qbounds::{SymMatrix, Tolerances};

/// Degree via the Möbius transform of the 0/1 table over monomials
/// `Π_{i∈S} x_i`; shares no code with the Fourier path.
fn mobius_degree(f: &BooleanFunction) -> usize {
    let mut a: Vec<i64> = f.table().iter().map(|&b| b as i64).collect();
    for i in 0..f.n() {
        for s in 0..a.len() {
            if s & (1 << i) != 0 {
                a[s] -= a[s ^ (1 << i)];
            }
        }
    }
    a.iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(s, _)| weight(s))
        .max()
        .unwrap_or(0)
}

#[test]
fn degree_matches_mobius_on_all_four_bit_functions() {
    for t in 0u32..(1 << 16) {
        let f = BooleanFunction::from_fn(4, |x| (t >> x) & 1 == 1).unwrap();
        let want = mobius_degree(&f);
        assert_eq!(f.degree(), want, "table {t:#x}");
    }
}

#[test]
fn xpoly0_matches_mobius_on_sampled_five_bit_functions() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let f = BooleanFunction::random(5, &mut rng).unwrap();
        assert_eq!(xpoly0(&phase_matrix(&f).unwrap(), &tol), mobius_degree(&f));
    }
}

/// Solves a dense square system by Gaussian elimination with partial
/// pivoting; `None` when singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..k {
            let m = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= m * a[col][c];
            }
            b[r] -= m * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[test]
fn or2_degree_one_error_by_vertex_enumeration() {
    // Variables (a, b, c, t): p(x) = a + bχ₁(x) + cχ₂(x); rows encode
    // ±(p(x) - f(x)) ≤ t as inequalities g·v ≤ h.
    let f = BooleanFunction::or(2).unwrap();
    let mut rows = Vec::new();
    for x in 0..4usize {
        let chi = [1.0, if x & 1 == 1 { -1.0 } else { 1.0 }, if x & 2 == 2 { -1.0 } else { 1.0 }];
        let fx = f.value(x) as f64;
        rows.push((vec![chi[0], chi[1], chi[2], -1.0], fx));
        rows.push((vec![-chi[0], -chi[1], -chi[2], -1.0], -fx));
    }
    let mut best = f64::INFINITY;
    let m = rows.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                for l in k + 1..m {
                    let pick = [i, j, k, l];
                    let a = pick.iter().map(|&r| rows[r].0.clone()).collect();
                    let b = pick.iter().map(|&r| rows[r].1).collect();
                    let Some(v) = solve(a, b) else { continue };
                    let feasible = rows.iter().all(|(g, h)| {
                        g.iter().zip(&v).map(|(p, q)| p * q).sum::<f64>() <= h + 1e-12
                    });
                    if feasible {
                        best = best.min(v[3]);
                    }
                }
            }
        }
    }
    assert!((best - 0.25).abs() < 1e-12, "{best}");
    let (step, _) = best_approximation(&f, 1).unwrap();
    assert!((step.error - best).abs() < 1e-9);
}

/// Best degree-`d` error of a symmetric function, by the discrete
/// equioscillation characterization over Hamming weights `0..=n`: the
/// minimax error is the largest levelled error over `(d+2)`-point subsets.
fn symmetric_chebyshev(values: &[f64], d: usize) -> f64 {
    let pts: Vec<usize> = (0..values.len()).collect();
    if d + 2 > pts.len() {
        return 0.0;
    }
    let mut best: f64 = 0.0;
    let mut subset: Vec<usize> = (0..d + 2).collect();
    loop {
        // p(k_j) + (-1)^j h = v_j with p of degree d in the weight.
        let a = subset
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                let mut row: Vec<f64> = (0..=d).map(|e| (k as f64).powi(e as i32)).collect();
                row.push(if j % 2 == 0 { 1.0 } else { -1.0 });
                row
            })
            .collect();
        let b = subset.iter().map(|&k| values[k]).collect();
        if let Some(sol) = solve(a, b) {
            best = best.max(sol[d + 1].abs());
        }
        // next combination
        let mut i = d + 1;
        loop {
            if subset[i] < pts.len() - (d + 2 - i) {
                subset[i] += 1;
                for j in i + 1..d + 2 {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return best;
            }
            i -= 1;
        }
    }
}

#[test]
fn symmetric_functions_match_univariate_chebyshev() {
    for n in 2..=5 {
        let mut fns = vec![
            BooleanFunction::or(n).unwrap(),
            BooleanFunction::and(n).unwrap(),
            BooleanFunction::parity(n).unwrap(),
        ];
        if n % 2 == 1 {
            fns.push(BooleanFunction::majority(n).unwrap());
        }
        for f in fns {
            let by_weight: Vec<f64> = (0..=n)
                .map(|k| f.value((1usize << k) - 1) as f64)
                .collect();
            for d in 0..n {
                let (step, _) = best_approximation(&f, d).unwrap();
                let want = symmetric_chebyshev(&by_weight, d);
                assert!(
                    (step.error - want).abs() < 1e-9,
                    "n={n} d={d} {}: lp {} vs chebyshev {want}",
                    f.to_hex(),
                    step.error
                );
            }
        }
    }
}

/// Rank-two Gram matrix of unit vectors at the given angles.
fn planar_gram(n: usize, angles: &[f64]) -> GramMatrix {
    let m = SymMatrix::from_fn(1 << n, |x, y| (angles[x] - angles[y]).cos());
    GramMatrix::new(n, m, &Tolerances::default()).unwrap()
}

/// `max_α min_x cos(θ_x + π f(x) - α)` by a fine grid and golden-section
/// refinement; independent of every conic solver.
fn planar_overlap(f: &BooleanFunction, angles: &[f64]) -> f64 {
    let shifted: Vec<f64> = angles
        .iter()
        .enumerate()
        .map(|(x, a)| a + if f.value(x) == 1 { std::f64::consts::PI } else { 0.0 })
        .collect();
    let g = |alpha: f64| shifted.iter().map(|t| (t - alpha).cos()).fold(f64::INFINITY, f64::min);
    let grid = 20_000;
    let step = std::f64::consts::TAU / grid as f64;
    let (mut best_a, mut best) = (0.0, f64::NEG_INFINITY);
    for k in 0..grid {
        let a = k as f64 * step;
        if g(a) > best {
            best = g(a);
            best_a = a;
        }
    }
    let (mut lo, mut hi) = (best_a - step, best_a + step);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if g(m1) < g(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    g((lo + hi) / 2.0).max(best)
}

#[test]
fn phase_threshold_by_bisection_and_fidelity() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = BooleanFunction::or(2).unwrap();
    let mut checked = 0;
    for _ in 0..40 {
        // Angles near the sign pattern so the threshold lands inside (0, 1).
        let angles: Vec<f64> = (0..4)
            .map(|x| {
                let base = if f.value(x) == 1 { std::f64::consts::PI } else { 0.0 };
                base + rng.random_range(-0.6..0.6)
            })
            .collect();
        let gamma = planar_overlap(&f, &angles);
        if gamma <= 0.05 {
            continue;
        }
        let eps_star = 1.0 - gamma * gamma;
        if !(0.01..0.99).contains(&eps_star) {
            continue;
        }
        let n_gram = planar_gram(2, &angles);
        let (mut lo, mut hi) = (0.0, 0.999);
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if phase_validity_check(&n_gram, &f, mid, &tol).unwrap().is_feasible() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((hi - eps_star).abs() < 1e-4, "bisection {hi} vs closed form {eps_star}");
        let phi = phase_matrix(&f).unwrap();
        let fh = fh_estimate(&n_gram, &phi, 16, 3, 1e-10).unwrap();
        assert!(fh.value >= gamma - 1e-9, "upper bound {} below {gamma}", fh.value);
        assert!(fh.value <= gamma + 1e-3, "estimate {} far above {gamma}", fh.value);
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} usable instances");
}

#[test]
fn high_level_mass_contrapositive() {
    // Removing the levels ≥ T from the sign approximant p moves it by at
    // most √(2ⁿ·mass), and the result has degree < T, so its 0/1 version
    // cannot beat the best degree-(T-1) error.
    let tol = Tolerances::default();
    for n in 1..=3 {
        for name in ["or", "and", "parity", "maj"] {
            let Ok(f) = BooleanFunction::catalog(name, n) else { continue };
            for eps in [0.25, 1.0 / 3.0] {
                let r = check_fact(&f, eps, &tol).unwrap();
                let t = r.degree;
                if t == 0 {
                    continue;
                }
                let p = &r.polynomial;
                let q = p.truncate_below(t);
                let mass = fourier_mass_above(p, t);
                let shift = p
                    .values()
                    .iter()
                    .zip(q.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(shift <= (f.size() as f64 * mass).sqrt() + 1e-12);
                let (step, _) = best_approximation(&f, t - 1).unwrap();
                let reachable = (1.0 - (1.0 - eps).sqrt()) / 2.0 + shift / 2.0;
                assert!(
                    step.error <= reachable + 1e-9,
                    "{name}{n} ε={eps}: best error {} above {reachable}",
                    step.error
                );
                assert!(step.error > eps);
            }
        }
    }
}

#[test]
fn closed_form_values() {
    let tol = Tolerances::default();
    // OR₂ at degree one has optimal error exactly 1/4.
    let or2 = BooleanFunction::or(2).unwrap();
    assert_eq!(adeg(&or2, 1.0 / 3.0, &tol).unwrap().degree, 1);
    assert_eq!(adeg(&or2, 1.0 / 6.0, &tol).unwrap().degree, 2);
    assert_eq!(xpoly_eps_phase(&or2, 1.0 / 3.0, &tol).unwrap().value, 2);
    // tr[W_c Φ] = c^n for parity, so its value is n at every rate.
    for n in 1..=3 {
        let phi = phase_matrix(&BooleanFunction::parity(n).unwrap()).unwrap();
        for c in [3.0, 50.0, 1e4] {
            let tr = explicit_trace(phi.matrix(), n, c);
            assert!((tr / c.powi(n as i32) - 1.0).abs() < 1e-12);
            let r = madv0_sdp(&phi, c, &tol).unwrap();
            assert!((r.value - n as f64).abs() < 1e-6, "n={n} c={c}: {}", r.value);
        }
    }
    // OR₃: tr[W_c Φ] = ((3/4)²·1 + (1/4)²·(3c + 3c² + c³))·8/8.
    let phi = phase_matrix(&BooleanFunction::or(3).unwrap()).unwrap();
    let c: f64 = 7.0;
    let want = 9.0 / 16.0 + (3.0 * c + 3.0 * c * c + c * c * c) / 16.0;
    assert!((explicit_trace(phi.matrix(), 3, c) - want).abs() < 1e-10);
}
