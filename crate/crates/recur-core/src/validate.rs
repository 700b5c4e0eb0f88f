//! Cross-validation battery: module invariants, identity oracles and the
//! acceptance checks comparing the independent computation routes
//! (quadrature, determinants, closed forms, saddle-point values, Monte
//! Carlo). Backs the `validate` CLI subcommand and the acceptance test
//! suite.

use std::f64::consts::PI;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::numerics::quad::adaptive_simpson;
use crate::numerics::special::dist_to_nearest_int;
use crate::{abia, asymptotics, montecarlo, toeplitz, windows};

/// Result of one named check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Human-readable measured quantity vs threshold.
    pub detail: String,
}

impl Check {
    fn bound(name: &str, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            passed: measured.is_finite() && measured <= threshold,
            detail: format!("measured {measured:.3e}, allowed {threshold:.1e}"),
        }
    }

    fn range(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.to_string(),
            passed: value.is_finite() && value >= lo && value <= hi,
            detail: format!("value {value:.6}, allowed [{lo}, {hi}]"),
        }
    }

    fn flag(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

// ---------------------------------------------------------------------------
// quadrature oracle
// ---------------------------------------------------------------------------

fn vandermonde_sq(thetas: &[f64]) -> f64 {
    let mut prod = 1.0;
    for i in 0..thetas.len() {
        for j in (i + 1)..thetas.len() {
            prod *= 2.0 - 2.0 * (thetas[i] - thetas[j]).cos();
        }
    }
    prod
}

fn integrate_dims(dims: &[(f64, f64)], point: &mut Vec<f64>, tols: &[f64]) -> f64 {
    if dims.is_empty() {
        return vandermonde_sq(point);
    }
    let (lo, hi) = dims[0];
    let rest = &dims[1..];
    let rest_tols = &tols[1..];
    let mut f = |x: f64| {
        point.push(x);
        let v = integrate_dims(rest, point, rest_tols);
        point.pop();
        v
    };
    adaptive_simpson(&mut f, lo, hi, tols[0])
}

/// Strong-return probability for `n <= 3` by deterministic adaptive
/// quadrature of the eigenangle integral over the return window, independent
/// of the determinant machinery.
pub fn quadrature_prob(n: usize, t: f64, eps: f64) -> f64 {
    assert!((1..=3).contains(&n), "quadrature oracle supports n <= 3");
    let w = windows::build_window(t, eps).expect("window");
    let m = w.intervals.len();
    let tols = [5e-11, 5e-12, 5e-13];
    let mut total = 0.0;
    for code in 0..m.pow(n as u32) {
        let mut c = code;
        let mut dims = Vec::with_capacity(n);
        for _ in 0..n {
            dims.push(w.intervals[c % m]);
            c /= m;
        }
        let mut point = Vec::with_capacity(n);
        total += integrate_dims(&dims, &mut point, &tols[..n]);
    }
    total / toeplitz::ln_normalization(n).exp()
}

// ---------------------------------------------------------------------------
// invariant checks
// ---------------------------------------------------------------------------

fn trig_sum_checks() -> Vec<Check> {
    let ln2 = 2f64.ln();
    let mut worst_odd = 0.0f64;
    let mut worst_even = 0.0f64;
    for k in 1..=10u32 {
        let kf = k as f64;
        let m = 2.0 * kf + 1.0;
        let lhs: f64 = (1..=2 * k)
            .map(|j| j as f64 * (j as f64 * PI / m).sin().powi(2).ln())
            .sum();
        let rhs = m * m.ln() - 2.0 * kf * m * ln2;
        worst_odd = worst_odd.max((lhs - rhs).abs());

        let m2 = 2.0 * kf;
        let lhs: f64 = (1..2 * k)
            .map(|j| j as f64 * (j as f64 * PI / m2).sin().powi(2).ln())
            .sum();
        let rhs = m2 * m2.ln() - m2 * (m2 - 1.0) * ln2;
        worst_even = worst_even.max((lhs - rhs).abs());
    }
    let spot = {
        let lhs: f64 = (1..=2u32)
            .map(|j| j as f64 * (j as f64 * PI / 3.0).sin().powi(2).ln())
            .sum();
        (lhs - (3.0 * 3f64.ln() - 6.0 * ln2)).abs()
    };
    let mut worst_prod = 0.0f64;
    for n in 2..=20u32 {
        let prod: f64 = (1..n).map(|j| (j as f64 * PI / n as f64).sin()).product();
        let rhs = n as f64 / 2f64.powi(n as i32 - 1);
        worst_prod = worst_prod.max((prod - rhs).abs() / rhs);
    }
    vec![
        Check::bound("trig-sum identity, odd arguments (k = 1..10)", worst_odd, 1e-10),
        Check::bound("trig-sum identity, even arguments (k = 1..10)", worst_even, 1e-10),
        Check::bound("trig-sum spot value 3 ln 3 - 6 ln 2", spot, 1e-12),
        Check::bound("sine product prod sin(j pi/n) = n/2^(n-1), n = 2..20", worst_prod, 1e-10),
    ]
}

fn window_checks() -> Vec<Check> {
    let mut out = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    while checked < 10_000 {
        let t: f64 = rng.random_range(0.01..20.0);
        let eps: f64 = rng.random_range(0.02..0.9);
        let theta: f64 = rng.random_range(-PI..PI);
        if (dist_to_nearest_int(t * theta / (2.0 * PI)) - eps / 2.0).abs() < 1e-9 {
            continue;
        }
        let w = windows::build_window(t, eps).unwrap();
        if windows::contains(&w, theta) != windows::in_window_direct(t, eps, theta) {
            mismatches += 1;
        }
        checked += 1;
    }
    out.push(Check::bound(
        "window membership vs direct oracle (10^4 pairs)",
        mismatches as f64,
        0.0,
    ));

    let mut worst_sym = 0.0f64;
    let mut worst_measure = 0.0f64;
    let mut t = 0.07;
    while t < 12.0 {
        let w = windows::build_window(t, 0.2).unwrap();
        let measure = windows::window_measure(&w);
        worst_measure = worst_measure.max(measure - 2.0 * PI);
        for &(lo, hi) in &w.intervals {
            let mirrored = w
                .intervals
                .iter()
                .any(|&(l2, h2)| (l2 + hi).abs() < 1e-12 && (h2 + lo).abs() < 1e-12);
            if !mirrored {
                worst_sym = 1.0;
            }
        }
        t += 0.03;
    }
    out.push(Check::bound("window measure <= 2 pi", worst_measure, 1e-12));
    out.push(Check::bound("window symmetry under negation", worst_sym, 0.0));

    let mut worst_jump = 0.0f64;
    for k in 1..=4u32 {
        for edge in [2.0 * k as f64 - 0.2, 2.0 * k as f64 + 0.2] {
            let lo = windows::window_measure(&windows::build_window(edge - 1e-10, 0.2).unwrap());
            let hi = windows::window_measure(&windows::build_window(edge + 1e-10, 0.2).unwrap());
            worst_jump = worst_jump.max((lo - hi).abs());
        }
    }
    out.push(Check::bound(
        "window measure continuity at regime edges",
        worst_jump,
        1e-9,
    ));
    out
}

fn toeplitz_invariant_checks() -> Vec<Check> {
    let mut out = Vec::new();

    // integer-time reduction at t = 3: entries vanish off the residue lattice
    let mut worst = 0.0f64;
    let spec = toeplitz::build_entries(12, 3.0, 0.2).unwrap();
    for (m, &c) in spec.first_row.iter().enumerate() {
        if m % 3 != 0 {
            worst = worst.max(c.abs());
        }
    }
    out.push(Check::bound(
        "integer-time entry reduction (t = 3, n = 12)",
        worst,
        1e-12,
    ));

    // eigenvalue range across regimes
    let mut worst_lo = 0.0f64;
    let mut worst_hi = 0.0f64;
    for &(n, t, eps) in &[
        (10usize, 0.7, 0.2),
        (10, 1.5, 0.35),
        (9, 2.0, 0.2),
        (12, 3.4, 0.15),
        (10, 5.8, 0.25),
    ] {
        let spec = toeplitz::build_entries(n, t, eps).unwrap();
        let m = crate::numerics::linalg::SquareMatrix::sym_toeplitz(&spec.first_row);
        let ev = crate::numerics::linalg::sym_eigenvalues(m).unwrap();
        worst_lo = worst_lo.max(-ev[0]);
        worst_hi = worst_hi.max(ev[n - 1] - 1.0);
    }
    out.push(Check::bound("Toeplitz eigenvalues >= -1e-10", worst_lo, 1e-10));
    out.push(Check::bound("Toeplitz eigenvalues <= 1 + 1e-10", worst_hi, 1e-10));

    // permutation-sum determinant for n <= 4
    let mut worst = 0.0f64;
    for &(n, t) in &[(2usize, 0.9), (3, 1.3), (4, 2.0), (4, 3.0)] {
        let spec = toeplitz::build_entries(n, t, 0.2).unwrap();
        let direct = permutation_det(&spec.first_row);
        let lp = toeplitz::log_det(&spec).unwrap();
        worst = worst.max((direct.ln() - lp.log_value).abs());
    }
    out.push(Check::bound(
        "determinant equals permutation sum (n <= 4)",
        worst,
        1e-10,
    ));

    // monotonicity in eps
    let mut worst = 0.0f64;
    for &t in &[0.9, 2.0, 3.1] {
        let mut prev = f64::NEG_INFINITY;
        for &eps in &[0.1, 0.2, 0.3, 0.45] {
            let v = toeplitz::log_prob_exact(6, t, eps).unwrap().log_value;
            worst = worst.max(prev - v);
            prev = v;
        }
    }
    out.push(Check::bound("log-probability nondecreasing in eps", worst, 1e-9));
    out
}

fn permutation_det(first_row: &[f64]) -> f64 {
    fn rec(perm: &mut Vec<usize>, k: usize, sign: f64, row: &[f64], total: &mut f64) {
        let n = perm.len();
        if k == n {
            let prod: f64 = (0..n).map(|i| row[perm[i].abs_diff(i)]).product();
            *total += sign * prod;
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            rec(perm, k + 1, if i == k { sign } else { -sign }, row, total);
            perm.swap(k, i);
        }
    }
    let mut perm: Vec<usize> = (0..first_row.len()).collect();
    let mut total = 0.0;
    rec(&mut perm, 0, 1.0, first_row, &mut total);
    total
}

fn abia_invariant_checks() -> Vec<Check> {
    let mut out = Vec::new();

    let mut worst_sym = 0.0f64;
    let mut worst_sum = 0.0f64;
    let mut t = 1.85;
    while t <= 8.0 {
        let sys = abia::build_system(t, 0.2).unwrap();
        worst_sym = worst_sym.max(sys.a_matrix.max_asymmetry());
        let sol = abia::solve(&sys).unwrap();
        let sum: f64 = sol.filling_fractions.iter().sum();
        worst_sum = worst_sum.max((sum - 1.0).abs());
        t += 0.05;
    }
    out.push(Check::bound("saddle matrix symmetric", worst_sym, 1e-12));
    out.push(Check::bound("filling fractions sum to 1", worst_sum, 1e-10));

    let mut worst_jump = 0.0f64;
    for &edge in &[2.2, 4.2, 6.2] {
        let lo = abia::abia_log_prob_over_n2(edge - 1e-8, 0.2).unwrap();
        let hi = abia::abia_log_prob_over_n2(edge + 1e-8, 0.2).unwrap();
        worst_jump = worst_jump.max((lo - hi).abs());
    }
    out.push(Check::bound(
        "saddle value continuous at upper regime edges",
        worst_jump,
        0.01,
    ));

    // at the lower edges the wrapped-arc fraction vanishes like 1/|ln delta|;
    // check the monotone logarithmic approach to the left limit
    let mut monotone = true;
    let mut final_gap = 0.0f64;
    for &edge in &[1.8f64, 3.8, 5.8] {
        let left = abia::abia_log_prob_over_n2(edge - 1e-12, 0.2).unwrap();
        let mut prev = f64::INFINITY;
        for &delta in &[1e-2, 1e-5, 1e-8, 1e-11] {
            let gap = (abia::abia_log_prob_over_n2(edge + delta, 0.2).unwrap() - left).abs();
            if gap >= prev {
                monotone = false;
            }
            prev = gap;
        }
        final_gap = final_gap.max(prev);
    }
    out.push(Check::flag(
        "saddle value approaches its limit at lower regime edges",
        monotone && final_gap < 0.5,
        format!("monotone = {monotone}, gap at delta = 1e-11: {final_gap:.3}"),
    ));

    // shrinking gap to the integer-time expansion
    let lead = (PI * 0.2 / 2.0).sin().ln();
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for t_int in 2..=10u32 {
        let gap = (abia::integer_time_closed_form(t_int, 0.2) - lead / t_int as f64).abs();
        if gap >= prev {
            monotone = false;
        }
        prev = gap;
    }
    out.push(Check::flag(
        "ABIA-to-integer-expansion gap decreases for t = 2..10",
        monotone,
        format!("final gap {prev:.3e}"),
    ));
    out
}

fn montecarlo_invariant_checks() -> Vec<Check> {
    let mut out = Vec::new();

    // determinism
    let cfg = montecarlo::ExperimentConfig {
        n: 3,
        eps: 0.25,
        samples: 32,
        model: montecarlo::Model::IidUniform,
        time: montecarlo::TimeKind::Continuous,
        seed: 99,
        horizon_mult: 1.0,
        mcmc: None,
    };
    let a = montecarlo::run_first_return(&cfg).unwrap();
    let b = montecarlo::run_first_return(&cfg).unwrap();
    let identical = a
        .iter()
        .zip(&b)
        .all(|(x, y)| x.tau == y.tau && x.normalized == y.normalized);
    out.push(Check::flag(
        "experiment determinism for fixed seed",
        identical,
        "two runs bitwise identical".to_string(),
    ));

    // continuous first-return lower bound tau >= 2 - eps
    let mut min_tau = f64::INFINITY;
    for r in &a {
        min_tau = min_tau.min(r.tau);
    }
    out.push(Check::flag(
        "continuous first return >= 2 - eps",
        min_tau >= 2.0 - 0.25 - 1e-12,
        format!("min tau {min_tau:.6}"),
    ));

    // empirical candidate spacing vs 4/n
    let mut acc = 0.0;
    let reps = 500;
    for i in 0..reps {
        let s = montecarlo::sample_iid_stream(6, 31, i);
        acc += montecarlo::empirical_candidate_gap(&s, 400);
    }
    let mean = acc / reps as f64;
    out.push(Check::bound(
        "empirical candidate gap within 10% of 4/n (n = 6)",
        (mean - montecarlo::mean_candidate_gap(6)).abs() / montecarlo::mean_candidate_gap(6),
        0.1,
    ));
    out
}

fn weak_real_invariant_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let mut ok = true;
    for &(n, t, delta) in &[(10usize, 4.0, 0.1), (50, 9.0, 0.2), (8, 2.0, 0.3)] {
        let w = asymptotics::weak_log_prob(n, t, delta).unwrap().log_value;
        let r = asymptotics::real_log_prob(n, t, delta).unwrap().log_value;
        if r >= w {
            ok = false;
        }
    }
    out.push(Check::flag(
        "real-part tail below weak tail when N(1-delta)/sqrt(t) > 1",
        ok,
        "prefactor < 1".to_string(),
    ));

    let c = asymptotics::one_cut_coeffs(1.0, 2.0 * PI).unwrap();
    out.push(Check::bound(
        "one-cut leading coefficient vanishes at t = eps",
        c.f_m2.abs(),
        0.0,
    ));
    out
}

/// Fast module invariants (under a minute).
pub fn invariant_checks() -> Vec<Check> {
    let mut out = Vec::new();
    out.extend(trig_sum_checks());
    out.extend(window_checks());
    out.extend(toeplitz_invariant_checks());
    out.extend(abia_invariant_checks());
    out.extend(montecarlo_invariant_checks());
    out.extend(weak_real_invariant_checks());
    out
}

// ---------------------------------------------------------------------------
// acceptance checks
// ---------------------------------------------------------------------------

/// Criterion 1: determinant vs quadrature for n <= 3, relative 1e-6.
pub fn acceptance_quadrature_oracle() -> Vec<Check> {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for n in 1..=3usize {
        for &t in &[0.5, 1.0, 1.5, 2.0, 3.0] {
            let p_quad = quadrature_prob(n, t, 0.2);
            let p_det = toeplitz::log_prob_exact(n, t, 0.2).unwrap().prob();
            let rel = (p_det - p_quad).abs() / p_quad;
            if rel > worst {
                worst = rel;
                at = format!("n={n}, t={t}");
            }
        }
    }
    vec![Check {
        name: "determinant matches adaptive quadrature (n <= 3)".to_string(),
        passed: worst <= 1e-6,
        detail: format!("worst relative error {worst:.3e} at {at}, allowed 1e-6"),
    }]
}

/// Criterion 2: trivial and integer-time closed forms.
pub fn acceptance_exact_closed_forms() -> Vec<Check> {
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for &(n, t) in &[(3usize, 0.05), (5, 0.2), (10, 0.15)] {
        worst = worst.max(toeplitz::log_prob_exact(n, t, 0.2).unwrap().log_value.abs());
    }
    out.push(Check::bound("P = 1 for t <= eps", worst, 1e-12));

    let mut worst = 0.0f64;
    for &(n, t) in &[(3usize, 5.0), (5, 7.0), (10, 11.0)] {
        let lp = toeplitz::log_prob_exact(n, t, 0.2).unwrap();
        worst = worst.max((lp.log_value - n as f64 * 0.2f64.ln()).abs());
    }
    out.push(Check::bound("integer t > n gives log = n ln eps", worst, 1e-10));
    out
}

/// Criterion 3: one-cut expansion residual scaling at t = 1, eps = 0.2.
pub fn acceptance_widom_convergence() -> Vec<Check> {
    let r = |n: usize| {
        let exact = toeplitz::log_prob_exact(n, 1.0, 0.2).unwrap().log_value;
        let asym = asymptotics::widom_log_prob(n, 1.0, 0.2).unwrap().log_value;
        (exact - asym) / (n * n) as f64
    };
    let r10 = r(10);
    let r20 = r(20);
    vec![
        Check::bound("|r(10)| below 1e-3", r10.abs(), 1e-3),
        Check {
            name: "|r(20)| < |r(10)| / 15".to_string(),
            passed: r20.abs() < r10.abs() / 15.0,
            detail: format!("r(10) = {r10:.3e}, r(20) = {r20:.3e}, ratio {:.1}", r10.abs() / r20.abs()),
        },
    ]
}

/// Criterion 4: saddle solver against integer-time closed forms. Every call
/// to `abia::solve` also verifies the determinant-ratio route against the
/// inverse-entry route to 1e-9 and errors on disagreement.
pub fn acceptance_abia_closed_forms() -> Vec<Check> {
    let mut worst_value = 0.0f64;
    let mut worst_frac = 0.0f64;
    let mut routes_agree = true;
    for t_int in 2..=6u32 {
        let sys = abia::build_system(t_int as f64, 0.2).unwrap();
        let sol = match abia::solve(&sys) {
            Ok(sol) => sol,
            Err(_) => {
                routes_agree = false;
                continue;
            }
        };
        worst_value = worst_value
            .max((sol.log_prob_over_n2 - abia::integer_time_closed_form(t_int, 0.2)).abs());
        for f in &sol.filling_fractions {
            worst_frac = worst_frac.max((f - 1.0 / t_int as f64).abs());
        }
    }
    vec![
        Check::bound("saddle value matches closed form at t = 2..6", worst_value, 1e-9),
        Check::bound("filling fractions equal 1/t at t = 2..6", worst_frac, 1e-9),
        Check::flag(
            "determinant-ratio and inverse-entry routes agree to 1e-9",
            routes_agree,
            "enforced inside every solve".to_string(),
        ),
    ]
}

/// Criterion 5: exact determinants vs saddle value at N = 35 over t in
/// [2.2, 3.8].
pub fn acceptance_abia_vs_exact() -> Vec<Check> {
    let n = 35usize;
    let mut worst = 0.0f64;
    let mut at = 0.0;
    for i in 0..=16 {
        let t = 2.2 + 0.1 * i as f64;
        let exact = toeplitz::log_prob_exact(n, t, 0.2).unwrap().log_value / (n * n) as f64;
        let approx = abia::abia_log_prob_over_n2(t, 0.2).unwrap();
        let err = (exact - approx).abs();
        if err > worst {
            worst = err;
            at = t;
        }
    }
    vec![Check {
        name: "saddle approximation tracks exact determinants (N = 35)".to_string(),
        passed: worst <= 0.05,
        detail: format!("worst |(1/N^2) ln P - value| = {worst:.4} at t = {at:.1}, allowed 0.05"),
    }]
}

/// Criterion 6: continuous first-return law for CUE samples (N = 6).
pub fn acceptance_continuous_cue_law() -> Vec<Check> {
    let cfg = montecarlo::ExperimentConfig {
        n: 6,
        eps: 0.2,
        samples: 1000,
        model: montecarlo::Model::CueMcmc,
        time: montecarlo::TimeKind::Continuous,
        seed: 2,
        horizon_mult: 1.0,
        mcmc: None,
    };
    let records = montecarlo::run_first_return(&cfg).unwrap();
    let fit = montecarlo::fit_exponential(&records).unwrap();
    vec![
        Check::range(
            "CUE continuous normalized first return: lambda in [0.9, 1.1]",
            fit.lambda_hat,
            0.9,
            1.1,
        ),
        Check {
            name: "CUE continuous first return: KS vs Exp(1) p > 0.01".to_string(),
            passed: fit.ks_p_value > 0.01,
            detail: format!(
                "D = {:.4}, p = {:.4}, censored = {}",
                fit.ks_statistic, fit.ks_p_value, fit.censored
            ),
        },
    ]
}

/// Criterion 7: discrete first-return law for i.i.d. samples (N = 8).
pub fn acceptance_discrete_iid_law() -> Vec<Check> {
    let cfg = montecarlo::ExperimentConfig {
        n: 8,
        eps: 0.2,
        samples: 10_000,
        model: montecarlo::Model::IidUniform,
        time: montecarlo::TimeKind::Discrete,
        seed: 20260809,
        horizon_mult: 1.0,
        mcmc: None,
    };
    let records = montecarlo::run_first_return(&cfg).unwrap();
    let fit = montecarlo::fit_exponential(&records).unwrap();
    vec![Check::range(
        "i.i.d. discrete normalized first return: lambda in [0.9, 1.05]",
        fit.lambda_hat,
        0.9,
        1.05,
    )]
}

/// Criterion 8: CUE sampler diagnostics at N = 6 (and spacing law at N = 2).
pub fn acceptance_sampler_diagnostics() -> Vec<Check> {
    let mut out = Vec::new();
    let samples =
        montecarlo::cue_chain_samples(6, 31337, montecarlo::McmcParams::for_size(6), 10_000);
    let m2 = montecarlo::mean_abs_trace_sq(&samples);
    out.push(Check::range(
        "CUE moment E|Tr U|^2 = 1 +- 0.05 (N = 6)",
        m2,
        0.95,
        1.05,
    ));
    let mut min_p = f64::INFINITY;
    for coord in 0..6 {
        let (_, p) = montecarlo::chi2_uniform_marginal(&samples, coord, 20);
        min_p = min_p.min(p);
    }
    out.push(Check::flag(
        "CUE marginals uniform (chi-square, 20 bins, each coordinate)",
        min_p > 0.01,
        format!("min p = {min_p:.4}"),
    ));

    let pairs = montecarlo::cue_chain_samples(2, 4242, montecarlo::McmcParams::for_size(2), 10_000);
    let (stat, p) = montecarlo::chi2_spacing_two(&pairs, 20);
    out.push(Check::flag(
        "CUE spacing density sin^2(delta/2)/pi at N = 2 (chi-square)",
        p > 0.01,
        format!("stat = {stat:.2}, p = {p:.4}"),
    ));
    out
}

/// Criterion 9: trigonometric identity oracles.
pub fn acceptance_trig_identities() -> Vec<Check> {
    trig_sum_checks()
}

/// Criterion 10: threshold root and weak/real tail arithmetic.
pub fn acceptance_threshold_estimates() -> Vec<Check> {
    let mut out = Vec::new();
    let tc = asymptotics::threshold_time(0.01).unwrap();
    out.push(Check::range("threshold time t_c(0.01)", tc, 0.077, 0.079));

    let mut worst = 0.0f64;
    let cases: [(usize, f64, f64, f64); 3] = [
        (10, 4.0, 0.1, -20.25),
        (10, 12.0, 0.1, -8.1),
        (4, 2.0, 0.25, -4.5),
    ];
    for &(n, t, delta, expect) in &cases {
        let w = asymptotics::weak_log_prob(n, t, delta).unwrap().log_value;
        worst = worst.max((w - expect).abs());
        // real = weak + prefactor, checked against independent arithmetic
        let r = asymptotics::real_log_prob(n, t, delta).unwrap().log_value;
        let pref = if t < n as f64 {
            (t.sqrt() / (2.0 * n as f64 * (1.0 - delta) * PI.sqrt())).ln()
        } else {
            (1.0 / (2.0 * (n as f64).sqrt() * (1.0 - delta) * PI.sqrt())).ln()
        };
        worst = worst.max((r - (expect + pref)).abs());
    }
    out.push(Check::bound(
        "weak/real tail arithmetic on hand-checked points",
        worst,
        1e-12,
    ));
    out
}

/// The full acceptance battery (minutes of runtime).
pub fn acceptance_checks() -> Vec<Check> {
    let mut out = Vec::new();
    out.extend(acceptance_quadrature_oracle());
    out.extend(acceptance_exact_closed_forms());
    out.extend(acceptance_widom_convergence());
    out.extend(acceptance_abia_closed_forms());
    out.extend(acceptance_abia_vs_exact());
    out.extend(acceptance_continuous_cue_law());
    out.extend(acceptance_discrete_iid_law());
    out.extend(acceptance_sampler_diagnostics());
    out.extend(acceptance_trig_identities());
    out.extend(acceptance_threshold_estimates());
    out
}
