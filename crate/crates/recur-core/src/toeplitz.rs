//! Exact strong-return probabilities as symmetric Toeplitz determinants.
//!
//! The probability that every eigenangle of the t-th power of an N x N
//! Haar-unitary matrix lies in the arc `[-pi eps, pi eps]` equals the
//! determinant of the N x N Toeplitz matrix whose symbol is the indicator of
//! the return window. Entries are Fourier coefficients with removable
//! singularities filled by their analytic limits.
//!
//! Determinants here decay like `exp(-c N^2)`, so for moderate N the smallest
//! eigenvalues of the matrix sink below double-precision roundoff. The
//! evaluation stays in f64 while the spectrum is resolvable and switches to a
//! software extended-precision LU factorization beyond that.

use std::f64::consts::PI;
use std::fmt;

use crate::error::Error;
use crate::mp_det;
use crate::numerics::linalg::{lu_factor, sym_eigenvalues, SquareMatrix};
use crate::numerics::special::ln_factorial;
use crate::windows::{check_params, classify, Regime};

/// Hard cap on the matrix dimension.
pub const DEFAULT_SIZE_CAP: usize = 200;

/// Below this value of `|sin(m pi / t)|` an entry denominator is treated as a
/// removable singularity and replaced by its analytic limit.
pub(crate) const SING_TOL: f64 = 1e-9;

/// Smallest f64 eigenvalue for which the double-precision eigensolve is
/// trusted for the log-determinant; below it the extended-precision path is
/// used instead.
const EIG_TRUST: f64 = 1e-8;

/// How a probability value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ExactDet,
    Asymptotic,
    Abia,
    ClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ExactDet => "exact-det",
            Method::Asymptotic => "asymptotic",
            Method::Abia => "abia",
            Method::ClosedForm => "closed-form",
        };
        f.write_str(s)
    }
}

/// A probability carried in log-domain together with how it was computed.
#[derive(Clone, Debug)]
pub struct LogProb {
    pub log_value: f64,
    pub method: Method,
    pub diagnostics: Vec<String>,
}

impl LogProb {
    pub(crate) fn new(log_value: f64, method: Method) -> Self {
        LogProb {
            log_value,
            method,
            diagnostics: Vec::new(),
        }
    }

    pub(crate) fn with_diag(mut self, msg: impl Into<String>) -> Self {
        self.diagnostics.push(msg.into());
        self
    }

    /// The probability itself (may underflow to zero).
    pub fn prob(&self) -> f64 {
        self.log_value.exp()
    }
}

/// First row of the symmetric Toeplitz matrix for parameters `(n, t, eps)`.
#[derive(Clone, Debug)]
pub struct ToeplitzSpec {
    pub n: usize,
    pub t: f64,
    pub eps: f64,
    pub regime: Regime,
    pub first_row: Vec<f64>,
}

/// Entry regime actually used for the Fourier coefficients. At the lower tie
/// times `t = 2k - eps` the two boundary pieces have zero width (and can
/// invert at the floating-point level, turning the boundary formula into a
/// signed measure); the window there is exactly the `2k - 1` complete
/// intervals, i.e. the bulk formula one index down.
pub(crate) fn entry_regime(regime: Regime, t: f64, eps: f64) -> Regime {
    if let Regime::Boundary(k) = regime {
        if (2.0 * PI * k as f64 - PI * eps) / t >= PI {
            return Regime::Bulk(k - 1);
        }
    }
    regime
}

/// Single Fourier coefficient `c_m` of the window indicator.
pub(crate) fn entry(m: usize, t: f64, eps: f64, regime: Regime) -> f64 {
    match regime {
        Regime::Initial => {
            if m == 0 {
                1.0
            } else {
                0.0
            }
        }
        Regime::Bulk(r) => {
            let rr = (2 * r + 1) as f64;
            if m == 0 {
                return rr * eps / t;
            }
            let mf = m as f64;
            let u = mf * PI / t;
            let den = u.sin();
            if den.abs() < SING_TOL {
                rr * (eps * u).sin() / (PI * mf)
            } else {
                (rr * u).sin() * (eps * u).sin() / (PI * mf * den)
            }
        }
        Regime::Boundary(r) => {
            let two_r = 2.0 * r as f64;
            if m == 0 {
                return two_r * eps / t + 1.0 - two_r / t;
            }
            let mf = m as f64;
            let u = mf * PI / t;
            let den = u.sin();
            if den.abs() < SING_TOL {
                let q = (mf / t).round() as i64;
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                -sign * two_r * ((1.0 - eps) * u).sin() / (PI * mf)
            } else {
                -(two_r * u).sin() * ((1.0 - eps) * u).sin() / (PI * mf * den)
            }
        }
    }
}

/// Builds the Toeplitz first row for a strong-return probability.
pub fn build_entries(n: usize, t: f64, eps: f64) -> Result<ToeplitzSpec, Error> {
    if n == 0 {
        return Err(Error::domain("matrix size n must be at least 1"));
    }
    let regime = classify(t, eps)?;
    let er = entry_regime(regime, t, eps);
    let first_row = (0..n).map(|m| entry(m, t, eps, er)).collect();
    Ok(ToeplitzSpec {
        n,
        t,
        eps,
        regime,
        first_row,
    })
}

/// Rough leading-order size of `ln P` used to seed the extended-precision
/// working precision; correctness does not depend on it.
fn estimate_log_prob(n: usize, t: f64, eps: f64) -> f64 {
    let n2 = (n * n) as f64;
    if t <= eps {
        0.0
    } else if t <= 2.0 - eps {
        n2 * (PI * eps / (2.0 * t)).sin().ln()
    } else {
        n2 / t * (t * (PI * eps / (2.0 * t)).sin()).ln()
    }
}

/// log det of the Toeplitz matrix, i.e. `ln P_{N,strong}(t)`.
pub fn log_det(spec: &ToeplitzSpec) -> Result<LogProb, Error> {
    let n = spec.n;
    if n > DEFAULT_SIZE_CAP {
        return Err(Error::DimensionTooLarge {
            n,
            cap: DEFAULT_SIZE_CAP,
        });
    }
    if spec.regime == Regime::Initial {
        return Ok(LogProb::new(0.0, Method::ExactDet));
    }

    let matrix = SquareMatrix::sym_toeplitz(&spec.first_row);
    let eig = sym_eigenvalues(matrix.clone())
        .map_err(|e| Error::NonPositiveDeterminant(format!("eigensolver failed: {e}")))?;
    let min_eig = eig[0];
    let max_eig = eig[n - 1];
    if min_eig < -1e-10 {
        return Err(Error::NonPositiveDeterminant(format!(
            "eigenvalue {min_eig:.3e} below -1e-10; entries are inconsistent"
        )));
    }
    if max_eig > 1.0 + 1e-10 {
        return Err(Error::NonPositiveDeterminant(format!(
            "eigenvalue {max_eig} above 1; entries are inconsistent"
        )));
    }

    if min_eig >= EIG_TRUST {
        let log: f64 = eig.iter().map(|l| l.ln()).sum();
        let mut out = LogProb::new(clamp_log(log), Method::ExactDet);
        // cross-check against the LU route
        let (sign, lu_log) = lu_factor(&matrix).log_abs_det();
        if sign <= 0.0 || (lu_log - log).abs() > 1e-8 * (1.0 + log.abs()) {
            out = out.with_diag(format!(
                "eigen/LU cross-check mismatch: {log} vs {lu_log} (sign {sign})"
            ));
        }
        return Ok(out);
    }

    let est = estimate_log_prob(n, spec.t, spec.eps);
    let (log, bits) = mp_det::toeplitz_log_det(n, spec.t, spec.eps, spec.regime, est)?;
    if !log.is_finite() {
        return Ok(
            LogProb::new(f64::NEG_INFINITY, Method::ExactDet)
                .with_diag("log-determinant underflowed the representable range"),
        );
    }
    Ok(
        LogProb::new(clamp_log(log), Method::ExactDet)
            .with_diag(format!("extended-precision LU at {bits} bits")),
    )
}

fn clamp_log(log: f64) -> f64 {
    // probabilities never exceed 1; absorb sub-1e-10 rounding overshoot
    if log > 0.0 && log < 1e-10 {
        0.0
    } else {
        log
    }
}

/// Exact `ln P_{N,strong}(t)`: trivial regimes short-circuit, everything else
/// goes through the determinant.
pub fn log_prob_exact(n: usize, t: f64, eps: f64) -> Result<LogProb, Error> {
    check_params(t, eps)?;
    if n == 0 {
        return Err(Error::domain("matrix size n must be at least 1"));
    }
    if t <= eps {
        return Ok(LogProb::new(0.0, Method::ClosedForm)
            .with_diag("t <= eps: every configuration is a strong return"));
    }
    let rounded = t.round();
    if (t - rounded).abs() < 1e-12 && rounded > n as f64 {
        return Ok(LogProb::new(n as f64 * eps.ln(), Method::ClosedForm)
            .with_diag("integer t > n: diagonal determinant eps^n"));
    }
    let spec = build_entries(n, t, eps)?;
    log_det(&spec)
}

/// Leading-order estimate `n (ln eps + ln((2/t) floor(t/2)))` for `t > n`,
/// capturing the damped period-2 oscillation of the tail.
pub fn large_t_estimate(n: usize, t: f64, eps: f64) -> Result<LogProb, Error> {
    check_params(t, eps)?;
    if t <= n as f64 {
        return Err(Error::domain(format!(
            "large-t estimate requires t > n (t = {t}, n = {n})"
        )));
    }
    let osc = 2.0 / t * (t / 2.0).floor();
    if osc <= 0.0 {
        return Ok(LogProb::new(f64::NEG_INFINITY, Method::ClosedForm)
            .with_diag("floor(t/2) = 0: estimate degenerates"));
    }
    let log = n as f64 * (eps.ln() + osc.ln());
    Ok(LogProb::new(log, Method::ClosedForm))
}

/// Normalization `ln((2 pi)^n n!)` shared by the asymptotic expansions.
pub fn ln_normalization(n: usize) -> f64 {
    n as f64 * (2.0 * PI).ln() + ln_factorial(n as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::sinc;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (diff {})", (a - b).abs());
    }

    /// Leibniz determinant over all permutations (n <= 8).
    fn permutation_det(first_row: &[f64]) -> f64 {
        let n = first_row.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = 0.0;
        permute(&mut perm, 0, 1.0, first_row, &mut total);
        total
    }

    fn permute(perm: &mut Vec<usize>, k: usize, sign: f64, row: &[f64], total: &mut f64) {
        let n = perm.len();
        if k == n {
            let prod: f64 = (0..n).map(|i| row[perm[i].abs_diff(i)]).product();
            *total += sign * prod;
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            let s = if i == k { sign } else { -sign };
            permute(perm, k + 1, s, row, total);
            perm.swap(k, i);
        }
    }

    #[test]
    fn one_by_one_is_eps_over_t() {
        let lp = log_prob_exact(1, 1.0, 0.2).unwrap();
        close(lp.log_value, 0.2f64.ln(), 1e-14);
        let lp = log_prob_exact(1, 1.5, 0.2).unwrap();
        close(lp.log_value, (0.2f64 / 1.5).ln(), 1e-14);
    }

    #[test]
    fn two_by_two_single_interval() {
        let spec = build_entries(2, 1.0, 0.2).unwrap();
        close(spec.first_row[0], 0.2, 1e-15);
        close(spec.first_row[1], 0.2 * sinc(0.2 * PI), 1e-15);
        let lp = log_det(&spec).unwrap();
        let s = sinc(0.2 * PI);
        close(lp.log_value, (0.04 * (1.0 - s * s)).ln(), 1e-12);
    }

    #[test]
    fn odd_integer_time_entries_vanish_off_lattice() {
        let spec = build_entries(12, 3.0, 0.2).unwrap();
        close(spec.first_row[0], 0.2, 1e-15);
        for m in 1..12 {
            if m % 3 == 0 {
                let q = m / 3;
                let expected = (q as f64 * PI * 0.2).sin() / (PI * q as f64);
                close(spec.first_row[m], expected, 1e-12);
            } else {
                close(spec.first_row[m], 0.0, 1e-12);
            }
        }
    }

    #[test]
    fn even_integer_time_entries() {
        let spec = build_entries(5, 2.0, 0.2).unwrap();
        // diagonal 2 R eps / t + 1 - 2 R / t with R = 1, t = 2
        close(spec.first_row[0], 0.2, 1e-15);
        close(spec.first_row[1], 0.0, 1e-12);
        close(spec.first_row[3], 0.0, 1e-12);
        // m = 2 (q = 1): + sin(pi eps) / pi
        close(spec.first_row[2], (PI * 0.2).sin() / PI, 1e-12);
        // m = 4 (q = 2): sin(2 pi eps) / (2 pi)
        close(spec.first_row[4], (2.0 * PI * 0.2).sin() / (2.0 * PI), 1e-12);
    }

    #[test]
    fn integer_time_above_n_is_diagonal() {
        let lp = log_prob_exact(5, 7.0, 0.2).unwrap();
        close(lp.log_value, 5.0 * 0.2f64.ln(), 1e-12);
        assert_eq!(lp.method, Method::ClosedForm);
        // determinant route agrees: entries vanish off the diagonal
        let spec = build_entries(5, 7.0, 0.2).unwrap();
        let lp2 = log_det(&spec).unwrap();
        close(lp2.log_value, 5.0 * 0.2f64.ln(), 1e-10);
    }

    #[test]
    fn initial_regime_probability_one() {
        let lp = log_prob_exact(3, 0.1, 0.2).unwrap();
        assert_eq!(lp.log_value, 0.0);
        let spec = build_entries(4, 0.15, 0.2).unwrap();
        assert_eq!(log_det(&spec).unwrap().log_value, 0.0);
    }

    #[test]
    fn permutation_sum_matches_determinant() {
        for &(n, t) in &[(2usize, 0.9), (3, 1.3), (4, 2.0), (4, 3.0), (4, 2.5)] {
            let spec = build_entries(n, t, 0.2).unwrap();
            let direct = permutation_det(&spec.first_row);
            let lp = log_det(&spec).unwrap();
            assert!(direct > 0.0, "n={n}, t={t}");
            close(lp.log_value, direct.ln(), 1e-10);
        }
    }

    #[test]
    fn eigenvalues_lie_in_unit_range() {
        for &(n, t, eps) in &[
            (8usize, 0.7, 0.2),
            (10, 1.5, 0.35),
            (9, 2.0, 0.2),
            (12, 3.4, 0.15),
            (10, 4.6, 0.25),
            (8, 6.0, 0.2),
        ] {
            let spec = build_entries(n, t, eps).unwrap();
            assert!(spec.first_row[0].abs() <= 1.0 + 1e-12);
            let ev = sym_eigenvalues(SquareMatrix::sym_toeplitz(&spec.first_row)).unwrap();
            assert!(ev[0] >= -1e-10, "min {} at n={n}, t={t}", ev[0]);
            assert!(ev[n - 1] <= 1.0 + 1e-10, "max {} at n={n}, t={t}", ev[n - 1]);
        }
    }

    #[test]
    fn log_prob_nonpositive_and_monotone_in_eps() {
        for &n in &[1usize, 2, 5, 8] {
            for &t in &[0.5, 1.0, 1.9, 2.0, 2.7, 4.2] {
                let mut prev = f64::NEG_INFINITY;
                for &eps in &[0.1, 0.2, 0.3, 0.45, 0.6] {
                    let lp = log_prob_exact(n, t, eps).unwrap();
                    assert!(lp.log_value <= 1e-10, "n={n}, t={t}, eps={eps}");
                    assert!(
                        lp.log_value >= prev - 1e-9,
                        "not monotone at n={n}, t={t}, eps={eps}: {prev} -> {}",
                        lp.log_value
                    );
                    prev = lp.log_value;
                }
            }
        }
    }

    #[test]
    fn equality_with_one_iff_initial() {
        assert_eq!(log_prob_exact(6, 0.2, 0.2).unwrap().log_value, 0.0);
        assert!(log_prob_exact(6, 0.2001, 0.2).unwrap().log_value < 0.0);
    }

    #[test]
    fn large_t_estimate_examples() {
        let lp = large_t_estimate(10, 20.0, 0.2).unwrap();
        close(lp.log_value, 10.0 * 0.2f64.ln(), 1e-12);
        assert_eq!(lp.method, Method::ClosedForm);
        let lp = large_t_estimate(10, 21.5, 0.2).unwrap();
        close(lp.log_value, 10.0 * (0.2f64.ln() + (20.0f64 / 21.5).ln()), 1e-12);
        let lp = large_t_estimate(10, 21.0, 0.2).unwrap();
        close(lp.log_value, 10.0 * (0.2f64.ln() + (20.0f64 / 21.0).ln()), 1e-12);
        assert!(large_t_estimate(10, 9.0, 0.2).is_err());
    }

    #[test]
    fn dimension_cap_enforced() {
        let spec = build_entries(DEFAULT_SIZE_CAP + 1, 1.0, 0.2).unwrap();
        match log_det(&spec) {
            Err(Error::DimensionTooLarge { n, cap }) => {
                assert_eq!(n, DEFAULT_SIZE_CAP + 1);
                assert_eq!(cap, DEFAULT_SIZE_CAP);
            }
            other => panic!("expected DimensionTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(build_entries(0, 1.0, 0.2).is_err());
        assert!(build_entries(3, -1.0, 0.2).is_err());
        assert!(build_entries(3, 1.0, 1.2).is_err());
        assert!(log_prob_exact(3, 1.0, 0.0).is_err());
    }
}
