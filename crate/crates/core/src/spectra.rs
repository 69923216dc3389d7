//! Allowed bands, dispersion relations and density of states extracted from
//! the band condition.
//!
//! Every search runs on the grid from [`roots::scan_grid`], which always
//! contains the multiples of `pi` where `B` is pinned to `+-1`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::condition::{b_derivative, b_real};
use crate::error::{Error, Result};
use crate::lattice::{Epsilon, UnitCell};
use crate::roots::{bisect_boundary, bisect_sign, golden_min, scan_grid};

/// `|B|` may exceed 1 by this much and still count as allowed.
pub const INSIDE_TOLERANCE: f64 = 1e-12;

/// Two roots closer than this are the same root.
const ROOT_MERGE: f64 = 1e-9;

/// Branch steps larger than this multiple of the branch's median step are
/// flagged as discontinuities.
pub const DISCONTINUITY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// `B` crosses `+-1`.
    Crossing,
    /// `B` touches `+-1` from outside; the band has zero width.
    Tangency,
    /// The band runs into the end of the searched range.
    RangeBoundary,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Crossing => "crossing",
            EdgeKind::Tangency => "tangency",
            EdgeKind::RangeBoundary => "range-boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandInterval {
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub edge_lo_kind: EdgeKind,
    pub edge_hi_kind: EdgeKind,
}

impl BandInterval {
    pub fn width(&self) -> f64 {
        self.eps_hi - self.eps_lo
    }

    pub fn contains(&self, eps: f64, slack: f64) -> bool {
        eps >= self.eps_lo - slack && eps <= self.eps_hi + slack
    }

    /// Both edges are genuine crossings, so `B` sweeps the whole of `[-1, 1]`.
    pub fn is_complete(&self) -> bool {
        self.edge_lo_kind == EdgeKind::Crossing && self.edge_hi_kind == EdgeKind::Crossing
    }
}

fn inside(cell: &UnitCell, eps: f64) -> bool {
    b_real(cell, eps).abs() <= 1.0 + INSIDE_TOLERANCE
}

/// Maximal intervals of `[lo, hi]` where the band condition lies in `[-1, 1]`.
pub fn allowed_bands(cell: &UnitCell, lo: f64, hi: f64) -> Result<Vec<BandInterval>> {
    cell.require_pt()?;
    let grid = scan_grid(lo, hi)?;
    let excess: Vec<f64> = grid
        .par_iter()
        .map(|&e| b_real(cell, e).abs() - 1.0)
        .collect();
    let is_in = |i: usize| excess[i] <= INSIDE_TOLERANCE;
    let last = grid.len() - 1;

    let mut bands = Vec::new();
    let mut i = 0;
    while i <= last {
        if !is_in(i) {
            // gap: look for allowed points the grid stepped over
            let start = i;
            while i <= last && !is_in(i) {
                i += 1;
            }
            bands.extend(hidden_bands(cell, &grid, &excess, start, i - 1));
            continue;
        }
        let start = i;
        while i <= last && is_in(i) {
            i += 1;
        }
        let end = i - 1;

        let (eps_lo, edge_lo_kind) = if start == 0 {
            (grid[0], EdgeKind::RangeBoundary)
        } else {
            let e = bisect_boundary(|x| inside(cell, x), grid[start], grid[start - 1]);
            (e, EdgeKind::Crossing)
        };
        let (eps_hi, edge_hi_kind) = if end == last {
            (grid[last], EdgeKind::RangeBoundary)
        } else {
            let e = bisect_boundary(|x| inside(cell, x), grid[end], grid[end + 1]);
            (e, EdgeKind::Crossing)
        };
        if start == end
            && edge_lo_kind == EdgeKind::Crossing
            && edge_hi_kind == EdgeKind::Crossing
            && eps_hi - eps_lo < ROOT_MERGE
        {
            bands.push(BandInterval {
                eps_lo: grid[start],
                eps_hi: grid[start],
                edge_lo_kind: EdgeKind::Tangency,
                edge_hi_kind: EdgeKind::Tangency,
            });
        } else {
            bands.push(BandInterval {
                eps_lo,
                eps_hi,
                edge_lo_kind,
                edge_hi_kind,
            });
        }
    }
    bands.sort_by(|a, b| a.eps_lo.total_cmp(&b.eps_lo));

    let step = (grid[1] - grid[0]).max(f64::EPSILON);
    for w in bands.windows(2) {
        if w[1].eps_lo - w[0].eps_hi < step {
            log::warn!(
                "bands ending at {} and starting at {} are closer than the scan step",
                w[0].eps_hi,
                w[1].eps_lo
            );
        }
    }
    Ok(bands)
}

/// Bands between outside grid points `start..=end`, found by minimising the
/// excess `|B| - 1` around each local minimum on the grid.
fn hidden_bands(
    cell: &UnitCell,
    grid: &[f64],
    excess: &[f64],
    start: usize,
    end: usize,
) -> Vec<BandInterval> {
    let mut out = Vec::new();
    for j in start..=end {
        if j == 0 || j + 1 >= grid.len() {
            continue;
        }
        if !(excess[j] <= excess[j - 1] && excess[j] <= excess[j + 1]) {
            continue;
        }
        let (x, fx) = golden_min(|e| b_real(cell, e).abs() - 1.0, grid[j - 1], grid[j + 1]);
        if fx > INSIDE_TOLERANCE {
            continue;
        }
        let lo = bisect_boundary(|e| inside(cell, e), x, grid[j - 1]);
        let hi = bisect_boundary(|e| inside(cell, e), x, grid[j + 1]);
        if hi - lo < ROOT_MERGE {
            out.push(BandInterval {
                eps_lo: x,
                eps_hi: x,
                edge_lo_kind: EdgeKind::Tangency,
                edge_hi_kind: EdgeKind::Tangency,
            });
        } else {
            log::warn!("band [{lo}, {hi}] fits between two scan points");
            out.push(BandInterval {
                eps_lo: lo,
                eps_hi: hi,
                edge_lo_kind: EdgeKind::Crossing,
                edge_hi_kind: EdgeKind::Crossing,
            });
        }
    }
    out
}

/// Band containing `eps`, or the one closest to it.
pub fn nearest_band(bands: &[BandInterval], eps: f64) -> Option<BandInterval> {
    bands.iter().copied().min_by(|a, b| {
        let da = distance_to(a, eps);
        let db = distance_to(b, eps);
        da.total_cmp(&db)
    })
}

fn distance_to(band: &BandInterval, eps: f64) -> f64 {
    if band.contains(eps, 0.0) {
        0.0
    } else {
        (band.eps_lo - eps).abs().min((band.eps_hi - eps).abs())
    }
}

/// Energies solving `cos(N Q a) = B(eps)` at one `Q`, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionPoint {
    pub q_a: f64,
    pub energies: Vec<f64>,
    /// Set by [`band_table`] where a branch jumps between neighbouring `Q`.
    pub discontinuity_flags: Vec<bool>,
}

/// Band condition and its monotone pieces over a range, reusable across `Q`.
struct Scan {
    points: Vec<f64>,
    values: Vec<f64>,
    /// `points[i]` is a polished extremum of `B`.
    is_extremum: Vec<bool>,
}

impl Scan {
    fn new(cell: &UnitCell, lo: f64, hi: f64) -> Result<Self> {
        let grid = scan_grid(lo, hi)?;
        let slopes: Vec<f64> = grid.par_iter().map(|&e| b_derivative(cell, e)).collect();
        let extrema: Vec<f64> = (0..grid.len() - 1)
            .into_par_iter()
            .filter(|&i| slopes[i] * slopes[i + 1] < 0.0)
            .map(|i| bisect_sign(|x| b_derivative(cell, x), grid[i], grid[i + 1]))
            .collect();

        let mut tagged: Vec<(f64, bool)> = grid
            .iter()
            .zip(&slopes)
            .map(|(&e, &s)| (e, s == 0.0))
            .collect();
        tagged.extend(extrema.into_iter().map(|e| (e, true)));
        tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
        tagged.dedup_by(|a, b| {
            if a.0 == b.0 {
                b.1 |= a.1;
                true
            } else {
                false
            }
        });
        let points: Vec<f64> = tagged.iter().map(|t| t.0).collect();
        let is_extremum = tagged.iter().map(|t| t.1).collect();
        let values = points.par_iter().map(|&e| b_real(cell, e)).collect();
        Ok(Self {
            points,
            values,
            is_extremum,
        })
    }

    fn roots(&self, cell: &UnitCell, target: f64) -> Vec<f64> {
        let g: Vec<f64> = self.values.iter().map(|v| v - target).collect();
        let mut roots = Vec::new();
        for i in 0..self.points.len() {
            if g[i] == 0.0 {
                roots.push(self.points[i]);
                continue;
            }
            if self.is_extremum[i] && g[i].abs() <= INSIDE_TOLERANCE {
                let left = i == 0 || g[i - 1] * g[i] > 0.0;
                let right = i + 1 == g.len() || g[i + 1] * g[i] > 0.0;
                if left && right {
                    roots.push(self.points[i]);
                }
            }
            if i + 1 < g.len() && g[i] * g[i + 1] < 0.0 {
                let e = bisect_sign(
                    |x| b_real(cell, x) - target,
                    self.points[i],
                    self.points[i + 1],
                );
                roots.push(e);
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() < ROOT_MERGE);
        roots
    }
}

fn check_wavevector(n: usize, q_a: f64) -> Result<()> {
    let nqa = n as f64 * q_a;
    if nqa.is_finite() && (-1e-12..=PI + 1e-12).contains(&nqa) {
        Ok(())
    } else {
        Err(Error::InvalidWavevector(nqa))
    }
}

pub fn dispersion(cell: &UnitCell, q_a: f64, lo: f64, hi: f64) -> Result<DispersionPoint> {
    cell.require_pt()?;
    check_wavevector(cell.len(), q_a)?;
    let scan = Scan::new(cell, lo, hi)?;
    let energies = scan.roots(cell, (cell.len() as f64 * q_a).cos());
    let flags = vec![false; energies.len()];
    Ok(DispersionPoint {
        q_a,
        energies,
        discontinuity_flags: flags,
    })
}

/// `Q a` values sampled by [`band_table`]: midpoints of `q_samples` equal
/// slices of `[0, pi / N]`, so the zone edges where branches merge are never
/// sampled exactly.
pub fn q_grid(n: usize, q_samples: usize) -> Vec<f64> {
    let width = PI / n as f64;
    (0..q_samples)
        .map(|k| (k as f64 + 0.5) * width / q_samples as f64)
        .collect()
}

/// Per-`Q` ascending energies over the irreducible zone, with jumps flagged.
pub fn band_table(
    cell: &UnitCell,
    q_samples: usize,
    lo: f64,
    hi: f64,
) -> Result<Vec<DispersionPoint>> {
    cell.require_pt()?;
    if q_samples < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: q_samples,
        });
    }
    let scan = Scan::new(cell, lo, hi)?;
    let n = cell.len() as f64;
    let mut table: Vec<DispersionPoint> = q_grid(cell.len(), q_samples)
        .into_par_iter()
        .map(|q_a| {
            let energies = scan.roots(cell, (n * q_a).cos());
            DispersionPoint {
                q_a,
                discontinuity_flags: vec![false; energies.len()],
                energies,
            }
        })
        .collect();
    mark_discontinuities(&mut table);
    Ok(table)
}

fn mark_discontinuities(table: &mut [DispersionPoint]) {
    let branches = table.iter().map(|p| p.energies.len()).max().unwrap_or(0);
    for b in 0..branches {
        let steps: Vec<(usize, f64)> = (1..table.len())
            .filter_map(|k| {
                let prev = table[k - 1].energies.get(b)?;
                let cur = table[k].energies.get(b)?;
                Some((k, (cur - prev).abs()))
            })
            .collect();
        if steps.is_empty() {
            continue;
        }
        let mut sorted: Vec<f64> = steps.iter().map(|s| s.1).collect();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        let threshold = (DISCONTINUITY_FACTOR * median).max(ROOT_MERGE);
        for (k, step) in steps {
            if step > threshold {
                table[k].discontinuity_flags[b] = true;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DosPoint {
    pub eps: f64,
    /// States per unit `eps` per lattice site.
    pub density: f64,
    /// `dB/d eps` vanishes here inside the band, so the density drops to zero.
    pub interior_extremum: bool,
}

/// `rho = |B'| / (N pi sqrt(1 - B^2))`, from differentiating `cos(N Q a) = B`.
/// One complete band integrates to `1 / N` per site, one state per cell.
pub fn dos(cell: &UnitCell, eps: Epsilon) -> Result<DosPoint> {
    cell.require_pt()?;
    let e = eps.get();
    let b = b_real(cell, e);
    if b.abs() >= 1.0 - INSIDE_TOLERANCE {
        return Err(Error::OutOfBand { eps: e, b });
    }
    let slope = b_derivative(cell, e);
    Ok(DosPoint {
        eps: e,
        density: density_at(cell.len(), b, slope),
        interior_extremum: slope.abs() <= 1e-9,
    })
}

fn density_at(n: usize, b: f64, slope: f64) -> f64 {
    slope.abs() / (n as f64 * PI * (1.0 - b * b).sqrt())
}

/// Number of states per site in `band`, by the substitution
/// `eps = mid - half cos t` which cancels the inverse-square-root edges,
/// followed by the midpoint rule in `t`.
pub fn integrated_states(cell: &UnitCell, band: &BandInterval, nodes: usize) -> f64 {
    let half = 0.5 * band.width();
    if half <= 0.0 || nodes == 0 {
        return 0.0;
    }
    let mid = 0.5 * (band.eps_lo + band.eps_hi);
    let dt = PI / nodes as f64;
    (0..nodes)
        .into_par_iter()
        .map(|k| {
            let t = (k as f64 + 0.5) * dt;
            let e = mid - half * t.cos();
            let b = b_real(cell, e);
            if b.abs() >= 1.0 {
                return 0.0;
            }
            density_at(cell.len(), b, b_derivative(cell, e)) * half * t.sin() * dt
        })
        .sum()
}
