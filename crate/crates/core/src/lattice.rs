//! Cell data model for the periodic delta comb.
//!
//! Everything is dimensionless. A site carries the coupling `c = a / a_j`
//! (spacing over the coupling length of that delta) and energies are
//! measured by the reduced wavenumber `eps = k a`. The deltas are equally
//! spaced by `a`, so a cell of `N` sites has length `N a`.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex delta strength `r + i s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Coupling {
    pub r: f64,
    pub s: f64,
}

impl Coupling {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        finite("r", r)?;
        finite("s", s)?;
        Ok(Self { r, s })
    }

    pub fn real(r: f64) -> Result<Self> {
        Self::new(r, 0.0)
    }

    pub fn conj(self) -> Self {
        Self {
            r: self.r,
            s: -self.s,
        }
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.r, self.s)
    }
}

impl From<[f64; 2]> for Coupling {
    fn from([r, s]: [f64; 2]) -> Self {
        Self { r, s }
    }
}

impl From<Coupling> for [f64; 2] {
    fn from(c: Coupling) -> Self {
        [c.r, c.s]
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.s)
    }
}

/// Reduced energy `eps = k a`, finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidEpsilon(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Ordered list of site couplings. Site `j` (1-based) sits at `x = (j - 1) a`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCell {
    couplings: Vec<Coupling>,
    pt_ordered: bool,
}

impl UnitCell {
    /// Builds a cell from an explicit coupling list; the PT flag is detected.
    pub fn new(couplings: Vec<Coupling>) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::EmptyCell);
        }
        for c in &couplings {
            finite("r", c.r)?;
            finite("s", c.s)?;
        }
        let pt_ordered = is_conjugate_reversed(&couplings);
        Ok(Self {
            couplings,
            pt_ordered,
        })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let couplings = pairs
            .iter()
            .map(|&(r, s)| Coupling::new(r, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(couplings)
    }

    pub fn len(&self) -> usize {
        self.couplings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.couplings.is_empty()
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn pt_ordered(&self) -> bool {
        self.pt_ordered
    }

    /// Same cell with every coupling conjugated and the site order reversed.
    pub fn conjugate_reversed(&self) -> Self {
        let couplings: Vec<_> = self.couplings.iter().rev().map(|c| c.conj()).collect();
        let pt_ordered = is_conjugate_reversed(&couplings);
        Self {
            couplings,
            pt_ordered,
        }
    }

    /// Same cell with every imaginary part set to zero.
    pub fn real_part(&self) -> Self {
        let couplings: Vec<_> = self
            .couplings
            .iter()
            .map(|c| Coupling { r: c.r, s: 0.0 })
            .collect();
        let pt_ordered = is_conjugate_reversed(&couplings);
        Self {
            couplings,
            pt_ordered,
        }
    }

    /// Rejects cells that are not PT-ordered.
    pub fn require_pt(&self) -> Result<()> {
        if self.pt_ordered {
            Ok(())
        } else {
            Err(Error::NotPtOrdered)
        }
    }
}

impl fmt::Display for UnitCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.couplings.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Builds a PT-ordered cell: `half` followed by the optional real middle
/// site, followed by `half` reversed and conjugated.
pub fn make_pt_cell(half: &[Coupling], middle: Option<f64>) -> Result<UnitCell> {
    if half.is_empty() {
        return Err(Error::EmptyCell);
    }
    for c in half {
        finite("r", c.r)?;
        finite("s", c.s)?;
    }
    if let Some(m) = middle {
        finite("middle", m)?;
    }
    let mut couplings = Vec::with_capacity(2 * half.len() + 1);
    couplings.extend_from_slice(half);
    if let Some(m) = middle {
        couplings.push(Coupling { r: m, s: 0.0 });
    }
    couplings.extend(half.iter().rev().map(|c| c.conj()));
    Ok(UnitCell {
        couplings,
        pt_ordered: true,
    })
}

/// Exact test of `c[N + 1 - j] == conj(c[j])` for every site.
pub fn check_pt(cell: &UnitCell) -> bool {
    is_conjugate_reversed(&cell.couplings)
}

fn is_conjugate_reversed(couplings: &[Coupling]) -> bool {
    couplings
        .iter()
        .zip(couplings.iter().rev())
        .all(|(a, b)| a.r == b.r && a.s == -b.s)
}

fn finite(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { what, value })
    }
}

/// On-disk cell description, either the full coupling list or a PT half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellSpec {
    Full {
        couplings: Vec<Coupling>,
    },
    Half {
        half: Vec<Coupling>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        middle: Option<f64>,
    },
}

impl CellSpec {
    pub fn build(&self) -> Result<UnitCell> {
        match self {
            CellSpec::Full { couplings } => UnitCell::new(couplings.clone()),
            CellSpec::Half { half, middle } => make_pt_cell(half, *middle),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidCellSpec(format!("cell file: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

impl From<&UnitCell> for CellSpec {
    fn from(cell: &UnitCell) -> Self {
        CellSpec::Full {
            couplings: cell.couplings.clone(),
        }
    }
}
