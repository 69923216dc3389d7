//! Bloch eigenstates of the cell transfer matrix, expanded into plane waves on
//! each segment between neighbouring deltas.
//!
//! Lengths are in units of the spacing `a`. Site `j` (1-based) sits at
//! `x = j - 1`, and segment `j` covers `[j - 1, j]` with local coordinate
//! `t = x - (j - 1)`. On it `psi = A e^{i eps t} + B e^{-i eps t}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::condition::{b_real, sinc};
use crate::error::{Error, Result};
use crate::lattice::{Epsilon, UnitCell};
use crate::transfer::{apply, cell_matrix, jump, propagation};

/// `|B|` this close to 1 leaves the two Bloch eigenvectors degenerate.
pub const EDGE_TOLERANCE: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QSign {
    Plus,
    Minus,
}

impl QSign {
    pub fn value(self) -> f64 {
        match self {
            QSign::Plus => 1.0,
            QSign::Minus => -1.0,
        }
    }
}

/// Plane-wave amplitudes on one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCoeffs {
    pub forward: Complex64,
    pub backward: Complex64,
}

impl SegmentCoeffs {
    fn from_state(u: [Complex64; 2]) -> Self {
        Self {
            forward: (u[0] - I * u[1]) * 0.5,
            backward: (u[0] + I * u[1]) * 0.5,
        }
    }

    /// `(psi, psi' / k)` at local coordinate `t`.
    pub fn state_at(&self, eps: f64, t: f64) -> [Complex64; 2] {
        let f = self.forward * Complex64::cis(eps * t);
        let b = self.backward * Complex64::cis(-eps * t);
        [f + b, I * (f - b)]
    }

    pub fn density_at(&self, eps: f64, t: f64) -> f64 {
        self.state_at(eps, t)[0].norm_sqr()
    }

    /// `|psi|^2 = mean + Re(ripple e^{2 i eps t})`.
    fn density_parts(&self) -> (f64, Complex64) {
        (
            self.forward.norm_sqr() + self.backward.norm_sqr(),
            self.forward * self.backward.conj() * 2.0,
        )
    }

    fn integral_sq(&self, eps: f64) -> f64 {
        let (mean, ripple) = self.density_parts();
        mean + (ripple * phase_mean(2.0 * eps)).re
    }

    fn integral_quartic(&self, eps: f64) -> f64 {
        let (mean, ripple) = self.density_parts();
        mean * mean
            + 2.0 * mean * (ripple * phase_mean(2.0 * eps)).re
            + 0.5 * ripple.norm_sqr()
            + 0.5 * (ripple * ripple * phase_mean(4.0 * eps)).re
    }

    fn max_density(&self, eps: f64) -> f64 {
        let (mean, ripple) = self.density_parts();
        let mut best = self.density_at(eps, 0.0).max(self.density_at(eps, 1.0));
        if ripple.norm() > 0.0 && eps > 0.0 {
            // crest where 2 eps t + arg(ripple) is a multiple of 2 pi
            let phase = ripple.arg();
            let first = (phase / (2.0 * PI)).ceil();
            let last = ((2.0 * eps + phase) / (2.0 * PI)).floor();
            if first <= last {
                best = best.max(mean + ripple.norm());
            }
        }
        best
    }
}

/// `int_0^1 e^{i w t} dt`.
fn phase_mean(w: f64) -> Complex64 {
    Complex64::cis(0.5 * w) * sinc(0.5 * w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochState {
    pub eps: f64,
    /// Signed `Q a`; `N Q a` lies in `[-pi, pi]`.
    pub q_a: f64,
    pub q_sign: QSign,
    /// Eigenvalue `e^{i N Q a}` of the cell matrix.
    pub lambda: Complex64,
    /// `(psi, psi' / k)` just left of site 1.
    pub entry: [Complex64; 2],
    pub segment_coeffs: Vec<SegmentCoeffs>,
    /// Cell integral of `|psi|^2` before normalisation.
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// Largest mismatch of the jump condition over the cell's deltas.
    pub matching: f64,
    /// Mismatch of `state(N) = lambda state(0)`.
    pub bloch: f64,
    /// `|int |psi|^2 - 1|`.
    pub normalization: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.matching.max(self.bloch).max(self.normalization)
    }
}

fn mismatch(got: [Complex64; 2], want: [Complex64; 2]) -> f64 {
    let scale = 1f64.max(want[0].norm()).max(want[1].norm());
    (got[0] - want[0]).norm().max((got[1] - want[1]).norm()) / scale
}

/// Bloch eigenstate at an in-band `eps` for the `+Q` or `-Q` branch,
/// normalised to one over the cell. The phase makes `psi(0)` real positive,
/// or `psi'(0)` when `psi(0)` vanishes.
pub fn bloch_state(cell: &UnitCell, eps: Epsilon, q_sign: QSign) -> Result<BlochState> {
    let e = eps.get();
    if e <= 0.0 {
        return Err(Error::InvalidEpsilon(e));
    }
    let b = b_real(cell, e);
    if (b.abs() - 1.0).abs() <= EDGE_TOLERANCE {
        return Err(Error::BandEdge { eps: e, b });
    }
    if b.abs() > 1.0 {
        return Err(Error::OutOfBand { eps: e, b });
    }

    let m = cell_matrix(cell, e);
    let half = m.half_trace();
    let lambda = half + I * q_sign.value() * (Complex64::new(1.0, 0.0) - half * half).sqrt();
    let m = m.entries;
    let from_top = [m[0][1], lambda - m[0][0]];
    let from_bottom = [lambda - m[1][1], m[1][0]];
    let size = |v: &[Complex64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
    let mut entry = if size(&from_top) >= size(&from_bottom) {
        from_top
    } else {
        from_bottom
    };
    let length = size(&entry).sqrt();
    let pivot = if entry[0].norm() > 1e-12 * length {
        entry[0]
    } else {
        entry[1]
    };
    let phase = pivot.conj() / pivot.norm();
    entry = [entry[0] * phase, entry[1] * phase];

    let p = propagation(e, 1.0);
    let mut segments = Vec::with_capacity(cell.len());
    let mut u = entry;
    for c in cell.couplings() {
        u = apply(&jump(c.as_complex(), e), u);
        segments.push(SegmentCoeffs::from_state(u));
        u = apply(&p, u);
    }

    let norm: f64 = segments.iter().map(|s| s.integral_sq(e)).sum();
    let scale = 1.0 / norm.sqrt();
    for s in &mut segments {
        s.forward *= scale;
        s.backward *= scale;
    }
    entry = [entry[0] * scale, entry[1] * scale];

    Ok(BlochState {
        eps: e,
        q_a: q_sign.value() * b.acos() / cell.len() as f64,
        q_sign,
        lambda,
        entry,
        segment_coeffs: segments,
        norm,
    })
}

impl BlochState {
    pub fn cell_len(&self) -> usize {
        self.segment_coeffs.len()
    }

    /// Re-checks the state against the cell it was built from, using only the
    /// stored plane-wave amplitudes.
    pub fn residuals(&self, cell: &UnitCell) -> Residuals {
        let e = self.eps;
        let segs = &self.segment_coeffs;
        let mut matching = 0f64;
        let mut left = self.entry;
        for (seg, c) in segs.iter().zip(cell.couplings()) {
            let right = seg.state_at(e, 0.0);
            let want = apply(&jump(c.as_complex(), e), left);
            matching = matching.max(mismatch(right, want));
            left = seg.state_at(e, 1.0);
        }
        let want = [self.entry[0] * self.lambda, self.entry[1] * self.lambda];
        let bloch = mismatch(left, want);
        let total: f64 = segs.iter().map(|s| s.integral_sq(e)).sum();
        Residuals {
            matching,
            bloch,
            normalization: (total - 1.0).abs(),
        }
    }

    /// `psi(x)` for `x` in `[0, N]`.
    pub fn psi(&self, x: f64) -> Complex64 {
        let n = self.cell_len();
        let j = (x.floor().max(0.0) as usize).min(n - 1);
        self.segment_coeffs[j].state_at(self.eps, x - j as f64)[0]
    }

    pub fn density(&self, x: f64) -> f64 {
        self.psi(x).norm_sqr()
    }
}

/// `|psi|^2` on `samples` evenly spaced points from `0` to `N`.
pub fn psi_profile(state: &BlochState, samples: usize) -> Result<Vec<(f64, f64)>> {
    if samples < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: samples,
        });
    }
    let n = state.cell_len() as f64;
    let step = n / (samples - 1) as f64;
    Ok((0..samples)
        .into_par_iter()
        .map(|k| {
            let x = if k + 1 == samples { n } else { k as f64 * step };
            (x, state.density(x))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Localization {
    /// `1 / (N int |psi|^4)`; one for a flat density, small when it is spiky.
    pub participation_ratio: f64,
    /// Largest density times the cell length.
    pub peak_to_mean: f64,
}

pub fn localization_metrics(state: &BlochState) -> Localization {
    let e = state.eps;
    let n = state.cell_len() as f64;
    let quartic: f64 = state
        .segment_coeffs
        .iter()
        .map(|s| s.integral_quartic(e))
        .sum();
    let peak = state
        .segment_coeffs
        .iter()
        .map(|s| s.max_density(e))
        .fold(0.0, f64::max);
    Localization {
        participation_ratio: 1.0 / (n * quartic),
        peak_to_mean: peak * n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_pt_cell, Coupling};

    fn three_site(s1: f64) -> UnitCell {
        make_pt_cell(&[Coupling::new(5.0, s1).unwrap()], Some(3.0)).unwrap()
    }

    fn four_site() -> UnitCell {
        make_pt_cell(
            &[
                Coupling::new(3.0, 5.0).unwrap(),
                Coupling::new(4.0, 8.1).unwrap(),
            ],
            None,
        )
        .unwrap()
    }

    fn eps(e: f64) -> Epsilon {
        Epsilon::new(e).unwrap()
    }

    fn trapezoid(profile: &[(f64, f64)]) -> f64 {
        profile
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum()
    }

    #[test]
    fn free_particle_density_is_flat() {
        for n in 1..=4 {
            let cell = UnitCell::from_pairs(&vec![(0.0, 0.0); n]).unwrap();
            let state = bloch_state(&cell, eps(1.3), QSign::Plus).unwrap();
            for (_, d) in psi_profile(&state, 101).unwrap() {
                assert!((d - 1.0 / n as f64).abs() < 1e-12);
            }
            let loc = localization_metrics(&state);
            assert!((loc.participation_ratio - 1.0).abs() < 1e-12);
            assert!((loc.peak_to_mean - 1.0).abs() < 1e-12);
            // a single travelling wave; forward carries +Q while N eps folds
            // into the upper half of the zone
            let seg = state.segment_coeffs[0];
            let (kept, dropped) = if (n as f64 * 1.3).sin() > 0.0 {
                (seg.forward, seg.backward)
            } else {
                (seg.backward, seg.forward)
            };
            assert!(dropped.norm() < 1e-12 && kept.norm() > 0.1);
        }
    }

    #[test]
    fn reference_states_satisfy_all_conditions() {
        let cases = [
            (three_site(0.0), 5.2),
            (three_site(19.0), 5.2),
            (four_site(), 2.95),
            (four_site(), 3.13),
        ];
        for (cell, e) in &cases {
            for sign in [QSign::Plus, QSign::Minus] {
                let state = bloch_state(cell, eps(*e), sign).unwrap();
                let res = state.residuals(cell);
                assert!(res.max() < 1e-10, "{e} {res:?}");
                assert!((state.lambda.norm() - 1.0).abs() < 1e-10);
                let n = cell.len() as f64;
                assert!((state.lambda - Complex64::cis(n * state.q_a)).norm() < 1e-9);
                let profile = psi_profile(&state, 20001).unwrap();
                assert!((trapezoid(&profile) - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn closed_form_integrals_match_quadrature() {
        let cell = four_site();
        let state = bloch_state(&cell, eps(3.13), QSign::Plus).unwrap();
        let profile = psi_profile(&state, 40001).unwrap();
        let squares: Vec<(f64, f64)> = profile.iter().map(|&(x, d)| (x, d * d)).collect();
        let loc = localization_metrics(&state);
        let pr = 1.0 / (cell.len() as f64 * trapezoid(&squares));
        assert!((pr - loc.participation_ratio).abs() < 1e-7);
        let peak = profile.iter().map(|p| p.1).fold(0.0, f64::max);
        assert!(loc.peak_to_mean >= peak * cell.len() as f64 - 1e-12);
        assert!(loc.peak_to_mean - peak * (cell.len() as f64) < 1e-6);
    }

    #[test]
    fn density_is_continuous_at_deltas() {
        let cell = three_site(19.0);
        let state = bloch_state(&cell, eps(5.2), QSign::Minus).unwrap();
        for j in 1..cell.len() {
            let left = state.segment_coeffs[j - 1].density_at(state.eps, 1.0);
            let right = state.segment_coeffs[j].density_at(state.eps, 0.0);
            assert!((left - right).abs() < 1e-9);
        }
    }

    #[test]
    fn pt_cell_density_is_reflection_symmetric() {
        // PT maps each Bloch state to itself, so the density mirrors about the
        // cell's PT centre at x = (N - 1) / 2, taken modulo N
        for (cell, e) in [
            (three_site(19.0), 5.2),
            (four_site(), 2.95),
            (four_site(), 3.13),
        ] {
            let n = cell.len() as f64;
            for sign in [QSign::Plus, QSign::Minus] {
                let state = bloch_state(&cell, eps(e), sign).unwrap();
                for k in 0..200 {
                    let x = n * k as f64 / 200.0;
                    let mirror = (n - 1.0 - x).rem_euclid(n);
                    assert!((state.density(x) - state.density(mirror)).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn real_cell_branches_share_density() {
        let cell = three_site(0.0);
        let plus = bloch_state(&cell, eps(5.2), QSign::Plus).unwrap();
        let minus = bloch_state(&cell, eps(5.2), QSign::Minus).unwrap();
        for k in 0..=300 {
            let x = 3.0 * k as f64 / 300.0;
            assert!((plus.density(x) - minus.density(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn reference_pairs_change_localization() {
        let a =
            localization_metrics(&bloch_state(&three_site(0.0), eps(5.2), QSign::Plus).unwrap());
        let b =
            localization_metrics(&bloch_state(&three_site(19.0), eps(5.2), QSign::Plus).unwrap());
        assert!((a.participation_ratio - b.participation_ratio).abs() > 1e-3);
        let c = localization_metrics(&bloch_state(&four_site(), eps(2.95), QSign::Plus).unwrap());
        let d = localization_metrics(&bloch_state(&four_site(), eps(3.13), QSign::Plus).unwrap());
        assert!((c.participation_ratio - d.participation_ratio).abs() > 1e-3);
        for l in [a, b, c, d] {
            assert!(l.participation_ratio > 0.0 && l.participation_ratio <= 1.0 + 1e-12);
            assert!(l.peak_to_mean >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn gap_and_edge_are_rejected() {
        let cell = UnitCell::from_pairs(&[(5.0, 0.0)]).unwrap();
        assert!(matches!(
            bloch_state(&cell, eps(3.5), QSign::Plus),
            Err(Error::OutOfBand { .. })
        ));
        assert!(matches!(
            bloch_state(&cell, eps(PI), QSign::Plus),
            Err(Error::BandEdge { .. })
        ));
        assert!(bloch_state(&cell, eps(0.0), QSign::Plus).is_err());
        let free = UnitCell::from_pairs(&[(0.0, 0.0)]).unwrap();
        let state = bloch_state(&free, eps(1.0), QSign::Plus).unwrap();
        assert!(psi_profile(&state, 1).is_err());
    }
}
