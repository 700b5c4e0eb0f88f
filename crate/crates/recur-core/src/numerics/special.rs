//! Scalar special functions shared across the crate.

use std::f64::consts::PI;

/// Cardinal sine, `sin(x)/x`, with a Taylor branch near the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Wraps an angle into `[-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta - 2.0 * PI * (theta / (2.0 * PI)).round();
    w.clamp(-PI, PI)
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_nearest_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// ln(n!). Exact summation up to n = 20, Stirling with the 1/(12n)
/// correction above.
pub fn ln_factorial(n: u32) -> f64 {
    if n <= 20 {
        (2..=n).map(|k| (k as f64).ln()).sum()
    } else {
        let x = n as f64;
        x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + 1.0 / (12.0 * x)
    }
}

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, 9 coefficients).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    debug_assert!(x > 0.0);
    let z = x - 1.0;
    let mut a = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// Regularized upper incomplete gamma function Q(a, x) = Gamma(a,x)/Gamma(a),
/// series for x < a + 1 and a continued fraction otherwise.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut term = sum;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Complementary error function, evaluated through the incomplete gamma
/// function (series/continued-fraction), accurate near machine precision.
pub fn erfc(x: f64) -> f64 {
    if x >= 0.0 {
        gamma_q(0.5, x * x)
    } else {
        2.0 - gamma_q(0.5, x * x)
    }
}

/// Survival function of the Kolmogorov distribution,
/// Q(z) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 z^2),
/// with the Jacobi-theta form for small z.
pub fn kolmogorov_sf(z: f64) -> f64 {
    if z <= 1e-8 {
        return 1.0;
    }
    if z < 1.18 {
        let v = PI * PI / (8.0 * z * z);
        let cdf = (2.0 * PI).sqrt() / z
            * ((-v).exp() + (-9.0 * v).exp() + (-25.0 * v).exp() + (-49.0 * v).exp());
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..120 {
        let term = (-2.0 * (k * k) as f64 * z * z).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
pub fn chi2_sf(stat: f64, dof: u32) -> f64 {
    gamma_q(dof as f64 / 2.0, stat / 2.0)
}
