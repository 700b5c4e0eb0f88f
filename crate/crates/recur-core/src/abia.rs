//! Average block interaction approximation (ABIA) for non-integer times.
//!
//! For `t > 2 - eps` the return window splits into several arcs and the
//! leading order of `(1/N^2) ln P_strong(t)` becomes a constrained quadratic
//! form in the filling fractions: each arc keeps its exact one-cut
//! self-energy while the interaction between different arcs is averaged to
//! an interaction between arc centers. The stationary point of the Lagrangian
//! solves a `(k+2) x (k+2)` symmetric saddle (KKT) system; the optimal value
//! is `-1/2 (A^{-1})_{k+2,k+2}`, also computable as a ratio of determinants.

use std::f64::consts::PI;

use crate::error::Error;
use crate::numerics::linalg::{lu_factor, SquareMatrix};
use crate::windows::{check_params, classify, Regime};

/// Which saddle system applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbiaRegime {
    /// `t` in `[2k + eps, 2(k+1) - eps]`: `2k + 1` complete arcs.
    Bulk,
    /// `t` in `[2k - eps, 2k + eps]`: `2k - 1` complete arcs plus the
    /// wrapped arc at `+- pi`.
    Boundary,
}

/// The assembled saddle-point system.
#[derive(Clone, Debug)]
pub struct AbiaSystem {
    pub k: u32,
    pub regime: AbiaRegime,
    pub t: f64,
    pub eps: f64,
    /// Symmetric `(k+2) x (k+2)` matrix; the last row/column carries the
    /// filling-fraction constraint gradient.
    pub a_matrix: SquareMatrix,
    /// Right-hand side `(0, ..., 0, -1)`.
    pub b_vector: Vec<f64>,
}

/// Solution of the saddle system.
#[derive(Clone, Debug)]
pub struct AbiaSolution {
    /// Full filling-fraction vector, reconstructed from the reduced symmetric
    /// unknowns. Bulk: `2k+1` fractions ordered by arc index `-k..k`.
    /// Boundary: `2k` fractions, the `2k-1` complete arcs ordered by index
    /// followed by the wrapped arc at `+- pi`.
    pub filling_fractions: Vec<f64>,
    pub lagrange: f64,
    /// The ABIA value of `(1/N^2) ln P_strong(t)`.
    pub log_prob_over_n2: f64,
    /// False when some solved fraction is negative.
    pub valid: bool,
}

fn ln_sin2(x: f64) -> f64 {
    2.0 * x.sin().abs().max(1e-300).ln()
}

fn ln_cos2(x: f64) -> f64 {
    2.0 * x.cos().abs().max(1e-300).ln()
}

/// Assembles the saddle system for `t > 2 - eps`.
pub fn build_system(t: f64, eps: f64) -> Result<AbiaSystem, Error> {
    check_params(t, eps)?;
    if t <= 2.0 - eps {
        return Err(Error::domain(format!(
            "single-interval regime (t = {t} <= 2 - eps); the one-cut expansion applies there"
        )));
    }
    let (k, regime) = match classify(t, eps)? {
        Regime::Bulk(k) => (k, AbiaRegime::Bulk),
        Regime::Boundary(k) => (k, AbiaRegime::Boundary),
        Regime::Initial => unreachable!("t > 2 - eps"),
    };
    let k_us = k as usize;
    let dim = k_us + 2;
    let last = dim - 1;
    let ln2 = 2f64.ln();
    let l_self = (PI * eps / (2.0 * t)).sin().ln();

    let mut a = SquareMatrix::zeros(dim);
    a[(0, 0)] = 2.0 * l_self;

    match regime {
        AbiaRegime::Bulk => {
            a[(0, last)] = -1.0;
            a[(last, 0)] = -1.0;
            for j in 1..=k_us {
                let jf = j as f64;
                a[(j, last)] = -2.0;
                a[(last, j)] = -2.0;
                let v = 4.0 * ln2 + 2.0 * ln_sin2(PI * jf / t);
                a[(0, j)] = v;
                a[(j, 0)] = v;
                a[(j, j)] = 4.0 * l_self + 4.0 * ln2 + 2.0 * ln_sin2(2.0 * PI * jf / t);
            }
            for i in 1..=k_us {
                for j in 1..=k_us {
                    if i == j {
                        continue;
                    }
                    let (fi, fj) = (i as f64, j as f64);
                    a[(i, j)] = 8.0 * ln2
                        + 2.0 * ln_sin2(PI * (fj - fi) / t)
                        + 2.0 * ln_sin2(PI * (fj + fi) / t);
                }
            }
        }
        AbiaRegime::Boundary => {
            a[(0, last)] = -1.0;
            a[(last, 0)] = -1.0;
            a[(k_us, last)] = -1.0;
            a[(last, k_us)] = -1.0;
            for i in 1..k_us {
                a[(i, last)] = -2.0;
                a[(last, i)] = -2.0;
            }
            for j in 1..k_us {
                let jf = j as f64;
                let v = 4.0 * ln2 + 2.0 * ln_sin2(PI * jf / t);
                a[(0, j)] = v;
                a[(j, 0)] = v;
                a[(j, j)] = 4.0 * l_self + 4.0 * ln2 + 2.0 * ln_sin2(2.0 * PI * jf / t);
                let w = 4.0 * ln2 + 2.0 * ln_cos2(PI * jf / t);
                a[(j, k_us)] = w;
                a[(k_us, j)] = w;
            }
            a[(0, k_us)] = 2.0 * ln2;
            a[(k_us, 0)] = 2.0 * ln2;
            a[(k_us, k_us)] =
                2.0 * (PI * k as f64 / t - PI * eps / (2.0 * t)).cos().max(1e-300).ln();
            for i in 1..k_us {
                for j in 1..k_us {
                    if i == j {
                        continue;
                    }
                    let (fi, fj) = (i as f64, j as f64);
                    a[(i, j)] = 8.0 * ln2
                        + 2.0 * ln_sin2(PI * (fj - fi) / t)
                        + 2.0 * ln_sin2(PI * (fj + fi) / t);
                }
            }
        }
    }

    let mut b = vec![0.0; dim];
    b[last] = -1.0;

    Ok(AbiaSystem {
        k,
        regime,
        t,
        eps,
        a_matrix: a,
        b_vector: b,
    })
}

/// Solves the saddle system by pivoted LU, cross-checking the optimal value
/// against the determinant-ratio form.
pub fn solve(sys: &AbiaSystem) -> Result<AbiaSolution, Error> {
    let dim = sys.a_matrix.n();
    let last = dim - 1;
    let lu = lu_factor(&sys.a_matrix);
    if lu.is_singular() {
        return Err(Error::SingularSystem(format!(
            "saddle matrix singular at t = {}, eps = {}",
            sys.t, sys.eps
        )));
    }
    let x = lu
        .solve(&sys.b_vector)
        .map_err(Error::SingularSystem)?;
    let lagrange = x[last];
    // b = -e_last, so (A^{-1})_{last,last} = -lambda and the optimum is
    // -1/2 (A^{-1})_{last,last} = lambda / 2.
    let value = 0.5 * lagrange;

    // determinant-ratio route: -1/2 det(A~) / det(A), in log space
    let (sign_a, log_a) = lu.log_abs_det();
    let minor = sys.a_matrix.minor(last, last);
    let (sign_m, log_m) = lu_factor(&minor).log_abs_det();
    let value_det = -0.5 * sign_m * sign_a * (log_m - log_a).exp();
    if (value_det - value).abs() > 1e-9 * (1.0 + value.abs()) {
        return Err(Error::SingularSystem(format!(
            "determinant-ratio and inverse-entry values disagree at t = {}: {} vs {}",
            sys.t, value_det, value
        )));
    }

    let reduced = &x[..last];
    let mut fractions = Vec::new();
    match sys.regime {
        AbiaRegime::Bulk => {
            // (eps_k, ..., eps_1, eps_0, eps_1, ..., eps_k)
            for j in (1..=sys.k as usize).rev() {
                fractions.push(reduced[j]);
            }
            fractions.push(reduced[0]);
            for j in 1..=sys.k as usize {
                fractions.push(reduced[j]);
            }
        }
        AbiaRegime::Boundary => {
            // complete arcs (eps_{k-1}, ..., eps_0, ..., eps_{k-1}), then the
            // wrapped arc
            for j in (1..sys.k as usize).rev() {
                fractions.push(reduced[j]);
            }
            fractions.push(reduced[0]);
            for j in 1..sys.k as usize {
                fractions.push(reduced[j]);
            }
            fractions.push(reduced[sys.k as usize]);
        }
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::SingularSystem(format!(
            "filling fractions sum to {sum} instead of 1 at t = {}",
            sys.t
        )));
    }
    let valid = fractions.iter().all(|&f| f >= -1e-9);

    Ok(AbiaSolution {
        filling_fractions: fractions,
        lagrange,
        log_prob_over_n2: value,
        valid,
    })
}

/// ABIA value of `(1/N^2) ln P_strong(t)` for any `t > eps`: the one-cut
/// leading term in the single-interval regime, the saddle solution beyond.
/// Continuous across the regime boundaries `t = 2k +- eps`.
pub fn abia_log_prob_over_n2(t: f64, eps: f64) -> Result<f64, Error> {
    check_params(t, eps)?;
    if t <= eps {
        return Err(Error::domain(format!(
            "ABIA needs t > eps (t = {t}, eps = {eps})"
        )));
    }
    if t <= 2.0 - eps {
        return Ok((PI * eps / (2.0 * t)).sin().ln());
    }
    let sys = build_system(t, eps)?;
    Ok(solve(&sys)?.log_prob_over_n2)
}

/// Closed form of the ABIA value at integer times: `(1/t) ln(t sin(pi eps / 2t))`.
pub fn integer_time_closed_form(t_int: u32, eps: f64) -> f64 {
    let t = t_int as f64;
    (t * (PI * eps / (2.0 * t)).sin()).ln() / t
}
