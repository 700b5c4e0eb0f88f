//! Deterministic adaptive Simpson quadrature.

/// Integrates `f` over `[a, b]` to the requested absolute tolerance.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, m, b, fa, fm, fb, whole, tol, 48)
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        recurse(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}
