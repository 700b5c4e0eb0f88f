//! Time-dependent return windows.
//!
//! At time `t` the eigenangle `theta` of a unitary matrix has strongly
//! returned when `t * theta` lies within `pi * eps` of a multiple of `2 pi`.
//! The admissible set of angles is a union of arc intervals of `[-pi, pi]`
//! whose shape depends on where `t` falls relative to the grid `2k +- eps`.

use std::f64::consts::PI;

use crate::error::Error;
use crate::numerics::special::dist_to_nearest_int;

/// Comparison fuzz used when classifying `t` against the regime grid.
const GRID_FUZZ: f64 = 1e-12;

/// Which part of the `2k +- eps` grid the time `t` falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `t <= eps`: every angle configuration is inside the target arc.
    Initial,
    /// `t` in `[2k + eps, 2(k+1) - eps]`: `2k + 1` complete arc intervals.
    Bulk(u32),
    /// `t` in `[2k - eps, 2k + eps]`, `k >= 1`: `2k - 1` complete intervals
    /// plus two pieces ending exactly at `-pi` and `pi`.
    Boundary(u32),
}

/// The admissible angle set `I(t)` for window parameter `eps`.
#[derive(Clone, Debug)]
pub struct ReturnWindow {
    pub t: f64,
    pub eps: f64,
    pub regime: Regime,
    /// Sorted, pairwise disjoint `[lo, hi]` intervals inside `[-pi, pi]`,
    /// symmetric under `theta -> -theta`.
    pub intervals: Vec<(f64, f64)>,
}

pub(crate) fn check_params(t: f64, eps: f64) -> Result<(), Error> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    if !eps.is_finite() || eps <= 0.0 || eps >= 1.0 {
        return Err(Error::domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// Classifies `t` against the grid `{2k +- eps}`. Boundary times are assigned
/// to the closed `Boundary` regime; ties within `1e-12` break toward it.
pub fn classify(t: f64, eps: f64) -> Result<Regime, Error> {
    check_params(t, eps)?;
    if t <= eps {
        return Ok(Regime::Initial);
    }
    let guess = ((t + eps) / 2.0).floor() as i64;
    for kk in [guess - 1, guess, guess + 1] {
        if kk < 1 {
            continue;
        }
        let center = 2.0 * kk as f64;
        if t >= center - eps - GRID_FUZZ && t <= center + eps + GRID_FUZZ {
            let k = u32::try_from(kk).map_err(|_| Error::domain("t too large".to_string()))?;
            return Ok(Regime::Boundary(k));
        }
    }
    let kb = ((t - eps) / 2.0).floor().max(0.0) as i64;
    let k = u32::try_from(kb).map_err(|_| Error::domain("t too large".to_string()))?;
    Ok(Regime::Bulk(k))
}

/// Builds the return window `I(t)`.
pub fn build_window(t: f64, eps: f64) -> Result<ReturnWindow, Error> {
    let regime = classify(t, eps)?;
    let intervals = match regime {
        Regime::Initial => vec![(-PI, PI)],
        Regime::Bulk(k) => {
            let k = k as i64;
            let half = PI * eps / t;
            (-k..=k)
                .map(|j| {
                    let c = 2.0 * PI * j as f64 / t;
                    (c - half, c + half)
                })
                .collect()
        }
        Regime::Boundary(k) => {
            let ki = k as i64;
            let half = PI * eps / t;
            let edge = (2.0 * PI * k as f64 - PI * eps) / t;
            let mut v = Vec::with_capacity(2 * k as usize + 1);
            if edge < PI {
                v.push((-PI, -edge));
            }
            for j in -(ki - 1)..=(ki - 1) {
                let c = 2.0 * PI * j as f64 / t;
                v.push((c - half, c + half));
            }
            if edge < PI {
                v.push((edge, PI));
            }
            v
        }
    };
    Ok(ReturnWindow {
        t,
        eps,
        regime,
        intervals,
    })
}

/// Total length of the window, `sum (hi - lo)`.
pub fn window_measure(w: &ReturnWindow) -> f64 {
    w.intervals.iter().map(|(lo, hi)| hi - lo).sum()
}

/// Whether `theta` lies in the window (closed endpoints).
pub fn contains(w: &ReturnWindow, theta: f64) -> bool {
    w.intervals
        .iter()
        .any(|&(lo, hi)| theta >= lo && theta <= hi)
}

/// Direct membership test: `theta` is admissible at time `t` iff the distance
/// from `t * theta` to the nearest multiple of `2 pi` is at most `pi * eps`.
pub fn in_window_direct(t: f64, eps: f64, theta: f64) -> bool {
    dist_to_nearest_int(t * theta / (2.0 * PI)) <= eps / 2.0
}
