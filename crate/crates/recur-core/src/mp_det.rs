//! Extended-precision evaluation of the strong-return Toeplitz determinants.
//!
//! The determinants decay like `exp(-c N^2)` while the matrix norm stays of
//! order one, so eigenvalues below machine epsilon carry most of the result.
//! Double precision cannot resolve them: both the entries and the LU
//! factorization must run in wider arithmetic. Precision starts from a
//! leading-order size estimate and doubles until two consecutive runs of the
//! factorization agree.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

use crate::error::Error;
use crate::toeplitz::SING_TOL;
use crate::windows::Regime;

const RM: RoundingMode = RoundingMode::ToEven;
const MAX_BITS: usize = 1 << 17;
const AGREE_TOL: f64 = 1e-9;

struct Ctx {
    p: usize,
    cc: Consts,
    pi: BigFloat,
}

impl Ctx {
    fn new(p: usize) -> Self {
        let mut cc = Consts::new().expect("constants cache");
        let pi = cc.pi(p, RM);
        Ctx { p, cc, pi }
    }

    fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    fn sin(&mut self, x: &BigFloat) -> BigFloat {
        x.sin(self.p, RM, &mut self.cc)
    }

    fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(self.p, RM, &mut self.cc)
    }
}

/// Conversion used only for quantities of moderate size (log values).
fn to_f64(x: &BigFloat) -> f64 {
    format!("{x}").parse::<f64>().unwrap_or(f64::NAN)
}

/// Toeplitz first row in extended precision. Branch decisions (regime,
/// removable singularities) mirror the f64 entry construction exactly.
fn first_row(ctx: &mut Ctx, n: usize, t: f64, eps: f64, regime: Regime) -> Vec<BigFloat> {
    let regime = crate::toeplitz::entry_regime(regime, t, eps);
    let t_mp = ctx.num(t);
    let eps_mp = ctx.num(eps);
    let one = ctx.num(1.0);
    let mut row = Vec::with_capacity(n);
    for m in 0..n {
        let c = match regime {
            Regime::Initial => ctx.num(if m == 0 { 1.0 } else { 0.0 }),
            Regime::Bulk(r) => {
                let rr = ctx.num((2 * r + 1) as f64);
                if m == 0 {
                    ctx.div(&ctx.mul(&rr, &eps_mp), &t_mp)
                } else {
                    let mf = ctx.num(m as f64);
                    let u = ctx.div(&ctx.mul(&mf, &ctx.pi.clone()), &t_mp);
                    let pim = ctx.mul(&ctx.pi.clone(), &mf);
                    let s_eps = {
                        let arg = ctx.mul(&eps_mp, &u);
                        ctx.sin(&arg)
                    };
                    if (m as f64 * std::f64::consts::PI / t).sin().abs() < SING_TOL {
                        ctx.div(&ctx.mul(&rr, &s_eps), &pim)
                    } else {
                        let s_num = {
                            let arg = ctx.mul(&rr, &u);
                            ctx.sin(&arg)
                        };
                        let s_den = ctx.sin(&u);
                        let num = ctx.mul(&s_num, &s_eps);
                        let den = ctx.mul(&pim, &s_den);
                        ctx.div(&num, &den)
                    }
                }
            }
            Regime::Boundary(r) => {
                let two_r = ctx.num(2.0 * r as f64);
                if m == 0 {
                    // 2 R eps / t + 1 - 2 R / t
                    let a = ctx.div(&ctx.mul(&two_r, &eps_mp), &t_mp);
                    let b = ctx.div(&two_r, &t_mp);
                    let s = ctx.sub(&one, &b);
                    s.add(&a, ctx.p, RM)
                } else {
                    let mf = ctx.num(m as f64);
                    let u = ctx.div(&ctx.mul(&mf, &ctx.pi.clone()), &t_mp);
                    let pim = ctx.mul(&ctx.pi.clone(), &mf);
                    let one_m_eps = ctx.sub(&one, &eps_mp);
                    let s_ome = {
                        let arg = ctx.mul(&one_m_eps, &u);
                        ctx.sin(&arg)
                    };
                    if (m as f64 * std::f64::consts::PI / t).sin().abs() < SING_TOL {
                        let q = (m as f64 / t).round() as i64;
                        let v = ctx.div(&ctx.mul(&two_r, &s_ome), &pim);
                        if q % 2 == 0 {
                            v.neg()
                        } else {
                            v
                        }
                    } else {
                        let s_num = {
                            let arg = ctx.mul(&two_r, &u);
                            ctx.sin(&arg)
                        };
                        let s_den = ctx.sin(&u);
                        let num = ctx.mul(&s_num, &s_ome);
                        let den = ctx.mul(&pim, &s_den);
                        ctx.div(&num, &den).neg()
                    }
                }
            }
        };
        row.push(c);
    }
    row
}

/// One LU factorization with partial pivoting; returns `(positive, ln|det|)`.
fn lu_log_det(ctx: &mut Ctx, row: &[BigFloat]) -> (bool, f64) {
    let n = row.len();
    let mut m: Vec<BigFloat> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            m.push(row[i.abs_diff(j)].clone());
        }
    }

    let mut positive = true;
    let mut log = 0.0f64;
    for k in 0..n {
        // partial pivot
        let mut p = k;
        for i in (k + 1)..n {
            if m[i * n + k].abs_cmp(&m[p * n + k]).unwrap_or(0) > 0 {
                p = i;
            }
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            positive = !positive;
        }
        let pivot = m[k * n + k].clone();
        if pivot.is_zero() {
            return (false, f64::NEG_INFINITY);
        }
        if pivot.is_negative() {
            positive = !positive;
        }
        let mut abs_pivot = pivot.clone();
        abs_pivot.set_sign(Sign::Pos);
        log += to_f64(&ctx.ln(&abs_pivot));
        for i in (k + 1)..n {
            let factor = ctx.div(&m[i * n + k], &pivot);
            for j in (k + 1)..n {
                let delta = ctx.mul(&factor, &m[k * n + j]);
                m[i * n + j] = ctx.sub(&m[i * n + j], &delta);
            }
        }
    }
    (positive, log)
}

/// `ln det` for the strong-return Toeplitz matrix, escalating precision until
/// two consecutive evaluations agree to `1e-9`.
pub(crate) fn toeplitz_log_det(
    n: usize,
    t: f64,
    eps: f64,
    regime: Regime,
    est_log: f64,
) -> Result<(f64, usize), Error> {
    // heuristic: smallest eigenvalue ~ exp(2 ln P / n); add generous guard bits
    let guess = 96.0 + 2.5 * est_log.abs() / n as f64 / std::f64::consts::LN_2;
    let mut p = (guess as usize).next_multiple_of(64).clamp(192, MAX_BITS);
    let mut prev: Option<f64> = None;
    while p <= MAX_BITS {
        let mut ctx = Ctx::new(p);
        let row = first_row(&mut ctx, n, t, eps, regime);
        let (positive, log) = lu_log_det(&mut ctx, &row);
        if positive && log.is_finite() {
            if let Some(q) = prev {
                if (q - log).abs() <= AGREE_TOL {
                    return Ok((log, p));
                }
            }
            prev = Some(log);
        } else {
            prev = None;
        }
        p *= 2;
    }
    Err(Error::NonPositiveDeterminant(format!(
        "determinant did not stabilize to a positive value up to {MAX_BITS}-bit precision \
         (n={n}, t={t}, eps={eps})"
    )))
}
