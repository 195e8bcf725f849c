//! Random walks driven by probability measures on a left regular band.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{build_support_lattice, IdealId, LatticeError, SupportLattice};
use crate::linalg::{apply_linear_factors, LinalgError, Rational, RationalMatrix};
use crate::semigroup::{close_generators_with_elements, ElementId, MultiplicationTable, SemigroupError};
use crate::spectra::{kernel_dims, lambda_table, LambdaTable, SpectraError, WeightedElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("negative weight {weight} on element {element}")]
    NegativeCoefficient { element: usize, weight: String },
    #[error("weights sum to {total}, not 1")]
    TotalNotOne { total: String },
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A weighted element with nonnegative coefficients summing to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityMeasure(WeightedElement);

impl ProbabilityMeasure {
    pub fn element(&self) -> &WeightedElement {
        &self.0
    }

    pub fn into_element(self) -> WeightedElement {
        self.0
    }
}

pub fn validate_probability(w: WeightedElement) -> Result<ProbabilityMeasure, WalkError> {
    if let Some((s, c)) = w.terms().find(|(_, c)| c.is_negative()) {
        return Err(WalkError::NegativeCoefficient { element: s.0, weight: c.to_string() });
    }
    let total = w.total_mass();
    if !total.is_one() {
        return Err(WalkError::TotalNotOne { total: total.to_string() });
    }
    Ok(ProbabilityMeasure(w))
}

/// The submonoid generated by the support of a weighted element.
#[derive(Clone, Debug)]
pub struct SupportSubmonoid {
    /// Induced table; labels are those of the ambient monoid.
    pub table: MultiplicationTable,
    /// `embedding[i]` is the ambient element behind sub-element `i`.
    pub embedding: Vec<ElementId>,
    pub generates_all: bool,
}

impl SupportSubmonoid {
    /// `w` rewritten over the submonoid's indices. Terms outside it are dropped.
    pub fn restrict(&self, w: &WeightedElement) -> WeightedElement {
        WeightedElement::from_terms(
            self.embedding.iter().enumerate().map(|(i, &s)| (ElementId(i), w.coefficient(s))),
        )
    }
}

/// Closes `{t : w_t ≠ 0} ∪ {1}` under the product of `table`.
pub fn support_submonoid(w: &WeightedElement, table: &MultiplicationTable) -> Result<SupportSubmonoid, WalkError> {
    w.check_against(table).map_err(WalkError::Spectra)?;
    let seeds: Vec<ElementId> = w.support().filter(|&s| s != table.identity()).collect();
    let labels: Vec<String> = seeds.iter().map(|&s| table.label(s).to_string()).collect();
    let closure = close_generators_with_elements(&labels, &seeds, |&a, &b| table.product(a, b), table.len())?;
    // the adjoined identity is the ambient one
    let embedding: Vec<ElementId> = closure.elements.iter().map(|e| e.unwrap_or(table.identity())).collect();
    let sub = closure.table.with_labels(embedding.iter().map(|&s| table.label(s).to_string()).collect())?;
    let generates_all = embedding.len() == table.len();
    Ok(SupportSubmonoid { table: sub, embedding, generates_all })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityCheck {
    /// Lowest-index pair `(X, Y)` with `X > Y` but `λ_X ≥ λ_Y`.
    pub witness: Option<(IdealId, IdealId)>,
}

impl MonotonicityCheck {
    pub fn ok(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks that `λ` strictly increases going down the lattice:
/// `X > Y ⇒ λ_X < λ_Y`.
pub fn check_strict_monotonicity(lt: &LambdaTable, lattice: &SupportLattice) -> MonotonicityCheck {
    let witness = lattice.ideals().find_map(|x| {
        lattice.ideals().find(|&y| lattice.lt(y, x) && lt.lambda(x) >= lt.lambda(y)).map(|y| (x, y))
    });
    MonotonicityCheck { witness }
}

/// Spectral facts recomputed from scratch inside the support submonoid.
#[derive(Clone, Debug)]
pub struct RestrictedCheck {
    pub submonoid: SupportSubmonoid,
    pub lattice: SupportLattice,
    pub lambda_table: LambdaTable,
    pub monotonicity: MonotonicityCheck,
}

/// Generation, monotonicity on the full lattice, and the restricted
/// recomputation when the support does not generate.
#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub generates_all: bool,
    pub lambda_table: LambdaTable,
    pub monotonicity: MonotonicityCheck,
    pub restricted: Option<RestrictedCheck>,
}

pub fn measure_report(
    p: &ProbabilityMeasure,
    table: &MultiplicationTable,
    lattice: &SupportLattice,
) -> Result<MeasureReport, WalkError> {
    let lt = lambda_table(p.element(), lattice)?;
    let monotonicity = check_strict_monotonicity(&lt, lattice);
    let submonoid = support_submonoid(p.element(), table)?;
    let generates_all = submonoid.generates_all;
    let restricted = if generates_all {
        None
    } else {
        let sub_lattice = build_support_lattice(&submonoid.table)?;
        let sub_lt = lambda_table(&submonoid.restrict(p.element()), &sub_lattice)?;
        let sub_mono = check_strict_monotonicity(&sub_lt, &sub_lattice);
        Some(RestrictedCheck { submonoid, lattice: sub_lattice, lambda_table: sub_lt, monotonicity: sub_mono })
    };
    Ok(MeasureReport { generates_all, lambda_table: lt, monotonicity, restricted })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateSpace {
    All,
    /// Elements supported on the bottom ideal, closed under left multiplication.
    MinimalIdeal,
}

/// Where the annihilating values for a walk came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSource {
    Full,
    Restricted,
}

#[derive(Clone, Debug)]
pub struct WalkReport {
    pub states: StateSpace,
    pub state_elements: Vec<ElementId>,
    /// Row-stochastic: `matrix[x][tx] += w_t`.
    pub matrix: RationalMatrix,
    pub rows_stochastic: bool,
    pub lambda_source: Option<LambdaSource>,
    pub annihilating_values: Vec<Rational>,
    /// `None` when no distinct-valued lambda table is available.
    pub annihilation_ok: Option<bool>,
    /// Kernel dimensions of `P - λI` for the values that occur.
    pub kernel_dims: Vec<(Rational, usize)>,
}

/// Transition matrix of the walk `x ↦ tx` (probability `w_t`) on the chosen
/// states, checked against `∏ (P - λ_i I)`.
pub fn walk_transition_matrix(
    p: &ProbabilityMeasure,
    table: &MultiplicationTable,
    lattice: &SupportLattice,
    states: StateSpace,
) -> Result<WalkReport, WalkError> {
    let w = p.element();
    w.check_against(table).map_err(WalkError::Spectra)?;
    let state_elements: Vec<ElementId> = match states {
        StateSpace::All => table.elements().collect(),
        StateSpace::MinimalIdeal => lattice.minimal_ideal(),
    };
    let mut position = vec![usize::MAX; table.len()];
    for (i, s) in state_elements.iter().enumerate() {
        position[s.0] = i;
    }
    let k = state_elements.len();
    let mut matrix = RationalMatrix::zeros(k, k);
    for (i, &x) in state_elements.iter().enumerate() {
        for (t, c) in w.terms() {
            let j = position[table.product(t, x).0];
            debug_assert!(j != usize::MAX, "state space closed under left multiplication");
            matrix.add_to(i, j, c);
        }
    }
    let rows_stochastic = matrix.row_sums().iter().all(One::is_one)
        && (0..k).all(|i| matrix.row(i).iter().all(|x| !x.is_negative()));

    let full = lambda_table(w, lattice)?;
    let (lambda_source, values) = if full.hypothesis_ok() {
        (Some(LambdaSource::Full), full.distinct().to_vec())
    } else {
        let sub = support_submonoid(w, table)?;
        let sub_lattice = build_support_lattice(&sub.table)?;
        let sub_lt = lambda_table(&sub.restrict(w), &sub_lattice)?;
        if sub_lt.hypothesis_ok() {
            (Some(LambdaSource::Restricted), sub_lt.distinct().to_vec())
        } else {
            (None, Vec::new())
        }
    };
    let annihilation_ok = match lambda_source {
        Some(_) => Some(apply_linear_factors(&matrix, &values)?.is_zero()),
        None => None,
    };
    let kernel_dims = kernel_dims(&matrix, full.distinct())?.into_iter().filter(|(_, d)| !d.is_zero()).collect();
    Ok(WalkReport {
        states,
        state_elements,
        matrix,
        rows_stochastic,
        lambda_source,
        annihilating_values: values,
        annihilation_ok,
        kernel_dims,
    })
}
