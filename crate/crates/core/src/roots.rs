//! Scan-then-bisect helpers shared by the extremum, band-edge and dispersion
//! searches.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Scan density for every search over `eps`.
pub const POINTS_PER_PI: usize = 2000;

/// Uniform grid over `[lo, hi]` with spacing at most `pi / POINTS_PER_PI`,
/// with every multiple of `pi` in range inserted exactly.
pub fn scan_grid(lo: f64, hi: f64) -> Result<Vec<f64>> {
    check_range(lo, hi)?;
    let steps = (((hi - lo) / PI) * POINTS_PER_PI as f64).ceil().max(1.0) as usize;
    let dx = (hi - lo) / steps as f64;
    let mut grid: Vec<f64> = (0..=steps).map(|i| lo + dx * i as f64).collect();
    *grid.last_mut().unwrap() = hi;

    let first = (lo / PI).ceil() as i64;
    let last = (hi / PI).floor() as i64;
    for n in first.max(1)..=last {
        grid.push(n as f64 * PI);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 4.0 * f64::EPSILON * a.abs().max(1.0));
    Ok(grid)
}

pub fn check_range(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo {
        Ok(())
    } else {
        Err(Error::InvalidRange { lo, hi })
    }
}

/// Bisects a sign change of `f` on `[a, b]` down to adjacent floats and
/// returns whichever end has the smaller `|f|`.
pub fn bisect_sign<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    let mut fb = f(b);
    debug_assert!(fa * fb <= 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        if fa == 0.0 {
            return a;
        }
        if fb == 0.0 {
            return b;
        }
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        let fm = f(mid);
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    if fa.abs() <= fb.abs() {
        a
    } else {
        b
    }
}

/// Bisects the boundary of a set given one point inside and one outside;
/// returns the innermost point known to satisfy `inside`.
pub fn bisect_boundary<P: Fn(f64) -> bool>(inside: P, mut a: f64, mut b: f64) -> f64 {
    debug_assert!(inside(a) && !inside(b));
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        if inside(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
