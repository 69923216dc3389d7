//! Transfer matrices over the `(psi, psi' / k)` basis.
//!
//! Free propagation across one spacing is a rotation by `eps`, and crossing a
//! delta of coupling `c` adds `2 c / eps` times `psi` to `psi' / k`. Both
//! factors have unit determinant.

use num_complex::Complex64;

use crate::lattice::UnitCell;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn apply(m: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Free propagation over a length `t` (in units of `a`) at reduced energy `eps`.
pub fn propagation(eps: f64, t: f64) -> Mat2 {
    let (s, c) = (eps * t).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// Jump across a delta of strength `c`.
pub fn jump(c: Complex64, eps: f64) -> Mat2 {
    [[ONE, ZERO], [c * (2.0 / eps), ONE]]
}

/// Transfer matrix of one full cell, mapping the state just left of site 1 to
/// the state just left of site 1 in the next cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMatrix {
    pub entries: Mat2,
}

impl CellMatrix {
    pub fn det(&self) -> Complex64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn half_trace(&self) -> Complex64 {
        (self.entries[0][0] + self.entries[1][1]) * 0.5
    }
}

/// Ordered product `P J_N ... P J_1` over the cell. Requires `eps > 0`.
pub fn cell_matrix(cell: &UnitCell, eps: f64) -> CellMatrix {
    let p = propagation(eps, 1.0);
    let mut m = identity();
    for c in cell.couplings() {
        m = mul(&jump(c.as_complex(), eps), &m);
        m = mul(&p, &m);
    }
    CellMatrix { entries: m }
}
