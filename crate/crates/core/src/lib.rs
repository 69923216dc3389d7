//! Band structure of periodic delta-comb lattices whose complex couplings are
//! arranged PT-symmetrically inside the cell.

pub mod analysis;
pub mod bloch;
pub mod cli;
pub mod condition;
pub mod error;
pub mod lattice;
pub mod roots;
pub mod spectra;
pub mod transfer;

pub use condition::{
    alternating_subsets, big_b, big_b_derivative, big_b_explicit, big_b_oracle, h_eval,
    BandConditionValue, HValue, IndexProduct,
};
pub use error::{Error, Result};
pub use lattice::{check_pt, make_pt_cell, CellSpec, Coupling, Epsilon, UnitCell};
pub use transfer::{cell_matrix, CellMatrix};
