//! The band condition `cos(N Q a) = B(eps)` for an `N`-site cell.
//!
//! `B` is a signed sum over products of the site functions
//! `h_j(eps) = cos eps + c_j sin(eps) / eps`. The products of size `M` run over
//! strictly increasing index tuples whose consecutive entries alternate in
//! parity; `M` steps down by two from `N`, the coefficient is `2^(M-1)` and
//! the sign alternates starting with `+`. Even `N` ends with the constant
//! `(-1)^(N/2)`, odd `N` with `(-1)^((N-1)/2) (h_1 + ... + h_N)`, which is just
//! the `M = 1` term of the same pattern.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Coupling, Epsilon, UnitCell};
use crate::transfer;

/// Below this, `sin(eps) / eps` comes from its Taylor series.
pub const SINC_SERIES_THRESHOLD: f64 = 1e-4;

/// Largest `imag_residue` accepted as real for a PT-ordered cell.
pub const REALITY_TOLERANCE: f64 = 1e-10;

/// Stand-in for `eps = 0` in the transfer-matrix path, which divides by `eps`.
pub const ORACLE_ZERO_EPS: f64 = 1e-6;

pub fn sinc(eps: f64) -> f64 {
    if eps.abs() < SINC_SERIES_THRESHOLD {
        let e2 = eps * eps;
        1.0 - e2 / 6.0 + e2 * e2 / 120.0
    } else {
        eps.sin() / eps
    }
}

/// `d/d eps (sin eps / eps)`.
pub fn sinc_derivative(eps: f64) -> f64 {
    // the direct form loses digits to cancellation well above the sinc threshold
    if eps.abs() < 1e-2 {
        let e2 = eps * eps;
        eps * (-1.0 / 3.0 + e2 * (1.0 / 30.0 - e2 / 840.0))
    } else {
        (eps * eps.cos() - eps.sin()) / (eps * eps)
    }
}

/// `h_j(eps)` for one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HValue {
    pub value: Complex64,
}

pub fn h_eval(c: Coupling, eps: Epsilon) -> HValue {
    HValue {
        value: h_at(c.as_complex(), eps.get()),
    }
}

pub(crate) fn h_at(c: Complex64, eps: f64) -> Complex64 {
    c * sinc(eps) + eps.cos()
}

fn h_prime_at(c: Complex64, eps: f64) -> Complex64 {
    c * sinc_derivative(eps) - eps.sin()
}

/// Strictly increasing tuple of 1-based site indices with alternating parity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexProduct {
    pub indices: Vec<usize>,
}

/// Every alternating-parity `M`-subset of `{1..N}`, in lexicographic order.
pub fn alternating_subsets(n: usize, m: usize) -> Result<Vec<IndexProduct>> {
    if m < 1 || m > n {
        return Err(Error::InvalidSubsetSize { n, m });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    extend_subsets(n, m, 1, &mut current, &mut out);
    Ok(out)
}

fn extend_subsets(
    n: usize,
    m: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<IndexProduct>,
) {
    if current.len() == m {
        out.push(IndexProduct {
            indices: current.clone(),
        });
        return;
    }
    let remaining = m - current.len();
    // the next index must flip parity, so it runs start, start+2, ...
    let mut next = start;
    while next + remaining - 1 <= n {
        current.push(next);
        extend_subsets(n, m, next + 1, current, out);
        current.pop();
        if current.is_empty() {
            next += 1;
        } else {
            next += 2;
        }
    }
}

/// Signed expansion terms for one `N`, with 0-based indices.
struct Expansion {
    /// (coefficient, index tuples) for M = N, N-2, ...
    groups: Vec<(f64, Vec<Vec<usize>>)>,
    constant: f64,
}

fn expansion(n: usize) -> Arc<Expansion> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<Expansion>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(e) = cache.read().unwrap().get(&n) {
        return Arc::clone(e);
    }
    let mut groups = Vec::new();
    let mut sign = 1.0;
    let mut m = n;
    while m >= 1 {
        let tuples = alternating_subsets(n, m)
            .expect("1 <= m <= n")
            .into_iter()
            .map(|p| p.indices.into_iter().map(|i| i - 1).collect())
            .collect();
        groups.push((sign * 2f64.powi(m as i32 - 1), tuples));
        sign = -sign;
        if m < 2 {
            break;
        }
        m -= 2;
    }
    // even N stops at M = 2 and `sign` has already advanced to (-1)^(N/2)
    let constant = if n % 2 == 0 { sign } else { 0.0 };
    let e = Arc::new(Expansion { groups, constant });
    cache
        .write()
        .unwrap()
        .entry(n)
        .or_insert_with(|| Arc::clone(&e));
    e
}

/// Neumaier-compensated sum over complex terms.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl CompensatedSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (sum, comp) = acc;
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

/// Complex value of `B` together with its real projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandConditionValue {
    pub complex_value: Complex64,
    pub real_value: f64,
    /// `|Im B| / max(1, |Re B|)`.
    pub imag_residue: f64,
}

impl BandConditionValue {
    pub fn from_complex(z: Complex64) -> Self {
        Self {
            complex_value: z,
            real_value: z.re,
            imag_residue: z.im.abs() / z.re.abs().max(1.0),
        }
    }

    pub fn is_real(&self) -> bool {
        self.imag_residue <= REALITY_TOLERANCE
    }
}

fn site_values(cell: &UnitCell, eps: f64) -> Vec<Complex64> {
    cell.couplings()
        .iter()
        .map(|c| h_at(c.as_complex(), eps))
        .collect()
}

/// `B(eps)` from the alternating-parity expansion.
pub fn big_b(cell: &UnitCell, eps: Epsilon) -> BandConditionValue {
    BandConditionValue::from_complex(b_complex(cell, eps.get()))
}

pub(crate) fn b_complex(cell: &UnitCell, eps: f64) -> Complex64 {
    let h = site_values(cell, eps);
    let exp = expansion(h.len());
    let mut total = CompensatedSum::default();
    for (coef, tuples) in &exp.groups {
        for t in tuples {
            let prod = t
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &i| acc * h[i]);
            total.add(prod * *coef);
        }
    }
    total.add(Complex64::new(exp.constant, 0.0));
    total.total()
}

/// Real projection of `B` at a raw `eps`; the workhorse for scans.
pub fn b_real(cell: &UnitCell, eps: f64) -> f64 {
    b_complex(cell, eps).re
}

/// Sum of the magnitudes of every expansion term, the natural scale for
/// rounding error in `B`.
pub fn term_scale(cell: &UnitCell, eps: Epsilon) -> f64 {
    let h: Vec<f64> = site_values(cell, eps.get())
        .iter()
        .map(|z| z.norm())
        .collect();
    let exp = expansion(h.len());
    let mut total = exp.constant.abs();
    for (coef, tuples) in &exp.groups {
        for t in tuples {
            total += coef.abs() * t.iter().map(|&i| h[i]).product::<f64>();
        }
    }
    total
}

/// Hand-written closed forms for N = 2, 3, 4.
pub fn big_b_explicit(cell: &UnitCell, eps: Epsilon) -> Result<BandConditionValue> {
    let h = site_values(cell, eps.get());
    let z = match h.as_slice() {
        [h1, h2] => 2.0 * h1 * h2 - 1.0,
        [h1, h2, h3] => 4.0 * h1 * h2 * h3 - (h1 + h2 + h3),
        [h1, h2, h3, h4] => {
            8.0 * h1 * h2 * h3 * h4 - 2.0 * (h1 * h2 + h1 * h4 + h2 * h3 + h3 * h4) + 1.0
        }
        _ => return Err(Error::UnsupportedCellSize(h.len())),
    };
    Ok(BandConditionValue::from_complex(z))
}

/// Half the trace of the cell transfer matrix, an independent route to `B`.
pub fn big_b_oracle(cell: &UnitCell, eps: Epsilon) -> BandConditionValue {
    let e = if eps.get() > 0.0 {
        eps.get()
    } else {
        ORACLE_ZERO_EPS
    };
    BandConditionValue::from_complex(transfer::cell_matrix(cell, e).half_trace())
}

/// `dB/d eps` of the real projection, by the product rule over the expansion.
pub fn big_b_derivative(cell: &UnitCell, eps: Epsilon) -> f64 {
    b_derivative(cell, eps.get())
}

pub(crate) fn b_derivative(cell: &UnitCell, eps: f64) -> f64 {
    let h = site_values(cell, eps);
    let dh: Vec<Complex64> = cell
        .couplings()
        .iter()
        .map(|c| h_prime_at(c.as_complex(), eps))
        .collect();
    let exp = expansion(h.len());
    let mut total = CompensatedSum::default();
    let mut prefix = Vec::new();
    for (coef, tuples) in &exp.groups {
        for t in tuples {
            // prefix[k] = h[t0] ... h[t(k-1)]
            prefix.clear();
            prefix.push(Complex64::new(1.0, 0.0));
            for &i in t {
                let last = *prefix.last().unwrap();
                prefix.push(last * h[i]);
            }
            let mut suffix = Complex64::new(1.0, 0.0);
            let mut d = Complex64::new(0.0, 0.0);
            for (k, &i) in t.iter().enumerate().rev() {
                d += prefix[k] * dh[i] * suffix;
                suffix *= h[i];
            }
            total.add(d * *coef);
        }
    }
    total.total().re
}
