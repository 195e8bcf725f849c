//! Exact spectral analysis of weighted elements in finite left regular bands.
//!
//! Tables come from [`semigroup`] (or the generators in [`families`]),
//! [`lattice`] builds the support lattice, and [`spectra`] computes the
//! eigenvalues, minimal polynomial and the accompanying checks over the
//! rationals. [`walks`] specializes to probability measures.

pub mod cli;
pub mod families;
pub mod io;
pub mod lattice;
pub mod linalg;
mod par;
pub mod semigroup;
pub mod spectra;
pub mod walks;

pub use families::{braid_faces, free_lrb, move_to_front_measure, FamilyKind, FamilySpec};
pub use lattice::{build_support_lattice, IdealId, SupportLattice};
pub use linalg::{Rational, RationalMatrix, RationalPoly};
pub use semigroup::{
    adjoin_identity, close_generators, validate_semigroup, verify_left_regular_band, ElementId,
    MultiplicationTable, SemigroupTable,
};
pub use spectra::{lambda_table, spectrum_report, ActionSide, LambdaTable, SpectrumReport, WeightedElement};
pub use walks::{validate_probability, walk_transition_matrix, ProbabilityMeasure, StateSpace, WalkReport};

/// True when the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    par::is_parallel()
}
