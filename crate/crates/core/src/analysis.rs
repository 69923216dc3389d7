//! Closed-form results for the two- and three-site PT cells, plus a numeric
//! extremum finder for any `N`.
//!
//! For `N = 2` the band condition `2 |h_1|^2 - 1` splits into its value at
//! `s_1 = 0` plus a non-negative lift `2 s_1^2 sin^2(eps) / eps^2`, and its
//! maxima and minima sit on the curves `C_+` and `C_-`. For `N = 3` only the
//! split is available in closed form; the extremal curves are tracked
//! numerically.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::condition::{b_derivative, b_real, sinc};
use crate::error::{Error, Result};
use crate::lattice::{make_pt_cell, Coupling, Epsilon, UnitCell};
use crate::roots::{bisect_sign, scan_grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// `B = base + lift`, with `base` the band condition at zero imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub base: f64,
    pub lift: f64,
    pub total: f64,
}

pub fn n2_cell(r1: f64, s1: f64) -> Result<UnitCell> {
    make_pt_cell(&[Coupling::new(r1, s1)?], None)
}

pub fn n3_cell(r1: f64, r2: f64, s1: f64) -> Result<UnitCell> {
    make_pt_cell(&[Coupling::new(r1, s1)?], Some(r2))
}

pub fn n2_decompose(r1: f64, s1: f64, eps: Epsilon) -> Result<Decomposition> {
    let e = eps.get();
    let base = b_real(&n2_cell(r1, 0.0)?, e);
    let sc = sinc(e);
    let lift = 2.0 * s1 * s1 * sc * sc;
    Ok(Decomposition {
        base,
        lift,
        total: base + lift,
    })
}

pub fn n3_decompose(r1: f64, r2: f64, s1: f64, eps: Epsilon) -> Result<Decomposition> {
    let e = eps.get();
    let base = b_real(&n3_cell(r1, r2, 0.0)?, e);
    // 4 s^2 sin^2 (e cos e + r2 sin e) / e^3, written with sinc so e = 0 is finite
    let sc = sinc(e);
    let lift = 4.0 * s1 * s1 * sc * sc * (e.cos() + r2 * sc);
    Ok(Decomposition {
        base,
        lift,
        total: base + lift,
    })
}

/// `F_+-` of the two-site envelope, evaluated with principal square roots.
fn envelope_f(r1: f64, s1: f64, e: f64, sign: f64) -> Complex64 {
    let r2 = r1 * r1;
    let s2 = s1 * s1;
    let e2 = e * e;
    let e4 = e2 * e2;
    let g = (r1 + r2 + s2).powi(2) + 2.0 * (r1 + r2 - s2) * e2 + e4;
    let base = r2 + (r2 + s2).powi(2) + 2.0 * (r1 + r2 - s2) * e2 + e4;
    Complex64::new(base, 0.0) + sign * (r1 - r2 - s2 + e2) * Complex64::new(g, 0.0).sqrt()
}

/// The extremal curve `C_+` (through the maxima) or `C_-` (through the minima)
/// of the two-site band condition.
pub fn n2_envelope(r1: f64, s1: f64, eps: Epsilon, branch: Branch) -> Result<f64> {
    let e = eps.get();
    let sign = branch.sign();
    let f_big = envelope_f(r1, s1, e, sign);
    if f_big == Complex64::new(0.0, 0.0) {
        return Err(Error::EnvelopeDomain { eps: e });
    }
    let inner = (f_big - 2.0 * r1 * r1 * e * e).sqrt();
    let f = (std::f64::consts::SQRT_2 * r1 * Complex64::new(r1, -s1) + sign * inner) / f_big.sqrt();
    let c = 2.0 * f.norm_sqr() - 1.0;
    if !c.is_finite() {
        return Err(Error::EnvelopeDomain { eps: e });
    }
    Ok(c)
}

/// `lim_{s1 -> 0} C_+-`: the maxima curve for real couplings, and `-1`.
pub fn n2_envelope_real_limit(r1: f64, eps: Epsilon, branch: Branch) -> f64 {
    match branch {
        Branch::Minus => -1.0,
        Branch::Plus => {
            let e = eps.get();
            let e2 = e * e;
            let a = r1 * (2.0 + r1) + e2;
            1.0 + 2.0 * r1 * r1 / e2 * a / (a + r1 * r1 / e2)
        }
    }
}

/// `lim_{r1 -> 0} C_+-`. `C_+` follows the lifted curve for `eps <= s1` and
/// sits at 1 above; `C_-` swaps the two intervals.
pub fn n2_envelope_imaginary_limit(s1: f64, eps: Epsilon, branch: Branch) -> f64 {
    let e = eps.get();
    let below = e <= s1.abs();
    if below != (branch == Branch::Plus) {
        return 1.0;
    }
    let s2 = s1 * s1;
    let e2 = e * e;
    let num = s2 * s2 + e2 * e2 + s2 * (1.0 - 2.0 * e2);
    let den = s2 * s2 + e2 * e2 + s2 * (s2 / e2 - 2.0 * e2);
    -1.0 + 2.0 * s2 / e2 * num / den
}

/// Approximate two-site band condition for `s1 >> r1`.
pub fn n2_large_s_value(s1: f64, eps: Epsilon) -> f64 {
    let e = eps.get();
    let ratio = s1 * s1 / (e * e);
    let c = e.cos();
    -1.0 + 2.0 * ratio + 2.0 * c * c * (1.0 - ratio)
}

/// Boundaries `(lower, upper)` of the `s1 >> r1` approximation: `[1, -1 + 2 s1^2/eps^2]`
/// below `eps = s1`, interchanged above.
pub fn n2_large_s_approx(s1: f64, eps: Epsilon) -> (f64, f64) {
    let e = eps.get();
    let lifted = -1.0 + 2.0 * s1 * s1 / (e * e);
    if e <= s1.abs() {
        (1.0, lifted)
    } else {
        (lifted, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub eps: f64,
    pub b_value: f64,
    pub kind: ExtremumKind,
    /// Position index modulo the number of extremum types per repeating piece
    /// (`N` for odd `N`, `N/2` for even). Heuristic; 0 without grouping.
    pub group_label: usize,
}

/// Extremum types per repeating piece of the band condition.
pub fn extrema_per_piece(n: usize) -> usize {
    if n % 2 == 1 {
        n
    } else {
        (n / 2).max(1)
    }
}

/// Every sign change of `dB/d eps` on the scan grid over `[lo, hi]`, polished
/// by bisection.
pub fn find_extrema(cell: &UnitCell, lo: f64, hi: f64, grouping: bool) -> Result<Vec<Extremum>> {
    cell.require_pt()?;
    if lo <= 0.0 {
        return Err(Error::InvalidRange { lo, hi });
    }
    let grid = scan_grid(lo, hi)?;
    let d: Vec<f64> = grid.par_iter().map(|&e| b_derivative(cell, e)).collect();

    let mut found: Vec<(f64, ExtremumKind)> = Vec::new();
    for i in 0..grid.len() - 1 {
        let (d0, d1) = (d[i], d[i + 1]);
        if d0 == 0.0 {
            if i > 0 && d[i - 1] * d1 < 0.0 {
                found.push((grid[i], kind_from_slopes(d[i - 1])));
            }
            continue;
        }
        if d0 * d1 < 0.0 {
            let e = bisect_sign(|x| b_derivative(cell, x), grid[i], grid[i + 1]);
            found.push((e, kind_from_slopes(d0)));
        }
    }

    let step = grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    for w in found.windows(2) {
        if w[1].0 - w[0].0 < step {
            log::warn!(
                "extrema at {} and {} are closer than the scan step {step}; one may be missing",
                w[0].0,
                w[1].0
            );
        }
    }

    let per_piece = extrema_per_piece(cell.len());
    Ok(found
        .into_iter()
        .enumerate()
        .map(|(i, (e, kind))| Extremum {
            eps: e,
            b_value: b_real(cell, e),
            kind,
            group_label: if grouping { i % per_piece } else { 0 },
        })
        .collect())
}

fn kind_from_slopes(slope_before: f64) -> ExtremumKind {
    if slope_before > 0.0 {
        ExtremumKind::Max
    } else {
        ExtremumKind::Min
    }
}
