//! Spectra of weighted elements `w = Σ w_t t` of a left regular band algebra.
//!
//! Each principal left ideal `X` carries the value
//! `λ_X = Σ_{σ(t) ≥ X} w_t`. When no two strictly comparable ideals share a
//! value, `∏ (w - λ_i)` over the distinct values vanishes in the algebra, so
//! the minimal polynomial of `w` has simple rational roots. This module
//! computes the values, builds the per-ideal polynomials
//! `p_X = ∏_{λ ∈ {λ_Y : Y ≤ X}} (z - λ)` and `q_X = p_X / (z - λ_X)`, and
//! checks every step of that argument exactly.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{IdealId, SupportLattice};
use crate::linalg::{
    apply_linear_factors, kernel_dimension, minimal_polynomial, poly_product_of_linear_factors, squarefree_check,
    LinalgError, Rational, RationalMatrix, RationalPoly,
};
use crate::par;
use crate::semigroup::{ElementId, MultiplicationTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectraError {
    #[error("weighted element uses element {element} but the table has {n} elements")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("lattice has {lattice} support entries but the table has {table} elements")]
    LatticeMismatch { lattice: usize, table: usize },
    #[error("distinctness hypothesis fails: ideals {greater} > {lesser} share a value")]
    HypothesisFailed { greater: usize, lesser: usize },
    #[error("support of {s}*{t} does not drop strictly below that of {s}")]
    NoStrictDrop { s: usize, t: usize },
    #[error("scalar and residual do not reconstruct {s}*w")]
    ReconstructionMismatch { s: usize },
    #[error("p of ideal {lesser} does not divide q of ideal {greater}")]
    Divisibility { greater: usize, lesser: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Element of the semigroup algebra in canonical sparse form (no zero
/// coefficients stored).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeightedElement {
    coeffs: BTreeMap<ElementId, Rational>,
}

impl WeightedElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis element `s` with coefficient 1.
    pub fn unit(s: ElementId) -> Self {
        Self::term(s, Rational::one())
    }

    pub fn term(s: ElementId, c: Rational) -> Self {
        Self::from_terms([(s, c)])
    }

    /// Sums the given terms; repeated elements accumulate.
    pub fn from_terms<I: IntoIterator<Item = (ElementId, Rational)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (s, c) in terms {
            out.add_term(s, &c);
        }
        out
    }

    pub fn add_term(&mut self, s: ElementId, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(s).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&s);
        }
    }

    pub fn coefficient(&self, s: ElementId) -> Rational {
        self.coeffs.get(&s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (ElementId, &Rational)> {
        self.coeffs.iter().map(|(&s, c)| (s, c))
    }

    pub fn support(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn total_mass(&self) -> Rational {
        self.coeffs.values().sum()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::from_terms(self.terms().map(|(s, c)| (s, c * k)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in other.terms() {
            out.add_term(s, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in other.terms() {
            out.add_term(s, &-c);
        }
        out
    }

    /// Fails if a stored element is not an index of `table`.
    pub fn check_against(&self, table: &MultiplicationTable) -> Result<(), SpectraError> {
        match self.coeffs.keys().next_back() {
            Some(&s) if s.0 >= table.len() => Err(SpectraError::ElementOutOfRange { element: s.0, n: table.len() }),
            _ => Ok(()),
        }
    }

    /// Dense coefficient vector over the element basis.
    pub fn to_dense(&self, n: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); n];
        for (s, c) in self.terms() {
            out[s.0] = c.clone();
        }
        out
    }
}

/// `Σ a_s b_t (st)` in the semigroup algebra.
pub fn algebra_multiply(a: &WeightedElement, b: &WeightedElement, table: &MultiplicationTable) -> WeightedElement {
    let mut out = WeightedElement::zero();
    for (s, x) in a.terms() {
        for (t, y) in b.terms() {
            out.add_term(table.product(s, t), &(x * y));
        }
    }
    out
}

/// `x · ∏ (w - root·1)`, multiplying factor by factor in the order given.
pub fn multiply_by_linear_factors(
    x: &WeightedElement,
    w: &WeightedElement,
    roots: &[Rational],
    table: &MultiplicationTable,
) -> WeightedElement {
    roots.iter().fold(x.clone(), |acc, root| algebra_multiply(&acc, w, table).sub(&acc.scale(root)))
}

/// Values `λ_X` with the distinctness verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaTable {
    lambda: Vec<Rational>,
    distinct: Vec<Rational>,
    violation: Option<(IdealId, IdealId)>,
}

impl LambdaTable {
    pub fn lambda(&self, x: IdealId) -> &Rational {
        &self.lambda[x.0]
    }

    pub fn values(&self) -> &[Rational] {
        &self.lambda
    }

    /// Distinct values, ascending.
    pub fn distinct(&self) -> &[Rational] {
        &self.distinct
    }

    pub fn hypothesis_ok(&self) -> bool {
        self.violation.is_none()
    }

    /// Lowest-index pair `(X, Y)` with `X > Y` and `λ_X = λ_Y`.
    pub fn violation(&self) -> Option<(IdealId, IdealId)> {
        self.violation
    }
}

fn check_inputs(
    w: &WeightedElement,
    table: Option<&MultiplicationTable>,
    lattice: &SupportLattice,
) -> Result<(), SpectraError> {
    let n = lattice.sigma_table().len();
    if let Some(t) = table {
        if t.len() != n {
            return Err(SpectraError::LatticeMismatch { lattice: n, table: t.len() });
        }
        w.check_against(t)?;
    } else if let Some(s) = w.support().last() {
        if s.0 >= n {
            return Err(SpectraError::ElementOutOfRange { element: s.0, n });
        }
    }
    Ok(())
}

/// `λ_X = Σ_{σ(t) ≥ X} w_t` for every ideal, plus the distinctness scan over
/// strictly comparable pairs.
pub fn lambda_table(w: &WeightedElement, lattice: &SupportLattice) -> Result<LambdaTable, SpectraError> {
    check_inputs(w, None, lattice)?;
    let lambda: Vec<Rational> = lattice
        .ideals()
        .map(|x| w.terms().filter(|(t, _)| lattice.leq(x, lattice.sigma(*t))).map(|(_, c)| c).sum())
        .collect();
    let mut distinct = lambda.clone();
    distinct.sort();
    distinct.dedup();
    let violation = lattice.ideals().find_map(|x| {
        lattice
            .ideals()
            .find(|&y| lattice.lt(y, x) && lambda[x.0] == lambda[y.0])
            .map(|y| (x, y))
    });
    Ok(LambdaTable { lambda, distinct, violation })
}

/// `s·w` split as `λ_{σ(s)} s + residual`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportDecomposition {
    pub scalar: Rational,
    pub residual: WeightedElement,
}

/// Splits `s·w` into the part fixing `s` and the part whose supports drop
/// strictly below `σ(s)`, checking both the drop and the reconstruction.
pub fn support_decompose(
    s: ElementId,
    w: &WeightedElement,
    table: &MultiplicationTable,
    lattice: &SupportLattice,
) -> Result<SupportDecomposition, SpectraError> {
    check_inputs(w, Some(table), lattice)?;
    let support = lattice.sigma(s);
    let mut scalar = Rational::zero();
    let mut residual = WeightedElement::zero();
    for (t, c) in w.terms() {
        if lattice.leq(support, lattice.sigma(t)) {
            scalar += c;
        } else {
            let st = table.product(s, t);
            if !lattice.lt(lattice.sigma(st), support) {
                return Err(SpectraError::NoStrictDrop { s: s.0, t: t.0 });
            }
            residual.add_term(st, c);
        }
    }
    let direct = algebra_multiply(&WeightedElement::unit(s), w, table);
    if residual.add(&WeightedElement::term(s, scalar.clone())) != direct {
        return Err(SpectraError::ReconstructionMismatch { s: s.0 });
    }
    Ok(SupportDecomposition { scalar, residual })
}

/// Decomposes `s·w` for every `s`, reporting the lowest failing element.
pub fn verify_support_decomposition(w: &WeightedElement, table: &MultiplicationTable, lattice: &SupportLattice) -> Result<(), SpectraError> {
    check_inputs(w, Some(table), lattice)?;
    match par::find_map_first(table.len(), |i| support_decompose(ElementId(i), w, table, lattice).err()) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Per-ideal polynomials `p_X` and `q_X = p_X / (z - λ_X)`, with their roots
/// ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPolys {
    p: Vec<RationalPoly>,
    q: Vec<RationalPoly>,
    p_roots: Vec<Vec<Rational>>,
    q_roots: Vec<Vec<Rational>>,
}

impl EigenPolys {
    pub fn p(&self, x: IdealId) -> &RationalPoly {
        &self.p[x.0]
    }

    pub fn q(&self, x: IdealId) -> &RationalPoly {
        &self.q[x.0]
    }

    pub fn p_roots(&self, x: IdealId) -> &[Rational] {
        &self.p_roots[x.0]
    }

    pub fn q_roots(&self, x: IdealId) -> &[Rational] {
        &self.q_roots[x.0]
    }
}

/// Builds `p_X` over the distinct values on the down-set of `X` and divides
/// out `z - λ_X`; then checks `p_Y | q_X` whenever `X > Y`.
pub fn build_eigen_polys(lt: &LambdaTable, lattice: &SupportLattice) -> Result<EigenPolys, SpectraError> {
    if let Some((x, y)) = lt.violation() {
        return Err(SpectraError::HypothesisFailed { greater: x.0, lesser: y.0 });
    }
    let mut p = Vec::with_capacity(lattice.len());
    let mut q = Vec::with_capacity(lattice.len());
    let mut p_roots = Vec::with_capacity(lattice.len());
    let mut q_roots = Vec::with_capacity(lattice.len());
    for x in lattice.ideals() {
        let mut roots: Vec<Rational> =
            lattice.ideals().filter(|&y| lattice.leq(y, x)).map(|y| lt.lambda(y).clone()).collect();
        roots.sort();
        roots.dedup();
        let px = poly_product_of_linear_factors(&roots);
        let (qx, rem) = px.div_rem(&RationalPoly::linear(lt.lambda(x)))?;
        debug_assert!(rem.is_zero(), "λ_X is a root of p_X");
        let strict: Vec<Rational> = roots.iter().filter(|r| *r != lt.lambda(x)).cloned().collect();
        p.push(px);
        q.push(qx);
        p_roots.push(roots);
        q_roots.push(strict);
    }
    let polys = EigenPolys { p, q, p_roots, q_roots };
    for x in lattice.ideals() {
        for y in lattice.ideals().filter(|&y| lattice.lt(y, x)) {
            if !polys.p(y).divides(polys.q(x))? {
                return Err(SpectraError::Divisibility { greater: x.0, lesser: y.0 });
            }
        }
    }
    Ok(polys)
}

/// Outcome of checking `s · p_{σ(s)}(w) = 0` for every `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalAnnihilationCheck {
    /// First element, in induction order, left nonzero.
    pub first_failure: Option<ElementId>,
}

impl LocalAnnihilationCheck {
    pub fn ok(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Evaluates `s · p_{σ(s)}(w)` in the algebra for each `s`, visiting elements
/// bottom ideal first.
pub fn verify_local_annihilation(
    w: &WeightedElement,
    table: &MultiplicationTable,
    lattice: &SupportLattice,
) -> Result<LocalAnnihilationCheck, SpectraError> {
    check_inputs(w, Some(table), lattice)?;
    let lt = lambda_table(w, lattice)?;
    let polys = build_eigen_polys(&lt, lattice)?;
    let order: Vec<ElementId> =
        lattice.descending_order().iter().flat_map(|&x| table.elements().filter(move |&s| lattice.sigma(s) == x)).collect();
    let first_failure = par::find_map_first(order.len(), |i| {
        let s = order[i];
        let roots = polys.p_roots(lattice.sigma(s));
        (!multiply_by_linear_factors(&WeightedElement::unit(s), w, roots, table).is_zero()).then_some(s)
    });
    Ok(LocalAnnihilationCheck { first_failure })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSide {
    /// Column `s` holds `w·s`.
    Left,
    /// Column `s` holds `s·w`.
    Right,
}

/// Matrix of `s ↦ s·w` (right) or `s ↦ w·s` (left) on the element basis.
pub fn regular_representation(
    w: &WeightedElement,
    table: &MultiplicationTable,
    side: ActionSide,
) -> Result<RationalMatrix, SpectraError> {
    w.check_against(table)?;
    let n = table.len();
    let mut m = RationalMatrix::zeros(n, n);
    for s in table.elements() {
        for (t, c) in w.terms() {
            let image = match side {
                ActionSide::Right => table.product(s, t),
                ActionSide::Left => table.product(t, s),
            };
            m.add_to(image.0, s.0, c);
        }
    }
    Ok(m)
}

/// Whether `∏ (w - root·1)` is zero in the algebra.
pub fn annihilates(w: &WeightedElement, roots: &[Rational], table: &MultiplicationTable) -> bool {
    multiply_by_linear_factors(&WeightedElement::unit(table.identity()), w, roots, table).is_zero()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AnnihilationCheck {
    pub in_algebra: bool,
    pub on_right_representation: bool,
}

impl AnnihilationCheck {
    pub fn ok(&self) -> bool {
        self.in_algebra && self.on_right_representation
    }
}

/// Checks `∏ (w - λ_i) = 0` over the distinct values, in the algebra and
/// independently on the right regular representation.
pub fn verify_annihilation(
    w: &WeightedElement,
    table: &MultiplicationTable,
    lattice: &SupportLattice,
) -> Result<AnnihilationCheck, SpectraError> {
    check_inputs(w, Some(table), lattice)?;
    let lt = lambda_table(w, lattice)?;
    if let Some((x, y)) = lt.violation() {
        return Err(SpectraError::HypothesisFailed { greater: x.0, lesser: y.0 });
    }
    let in_algebra = annihilates(w, lt.distinct(), table);
    let m = regular_representation(w, table, ActionSide::Right)?;
    let on_right_representation = apply_linear_factors(&m, lt.distinct())?.is_zero();
    Ok(AnnihilationCheck { in_algebra, on_right_representation })
}

/// `dim ker(M - λI)` for each `λ`, in the order given.
pub fn kernel_dims(m: &RationalMatrix, lambdas: &[Rational]) -> Result<Vec<(Rational, usize)>, SpectraError> {
    let dims = par::map_slice(lambdas, |l| m.shifted(l).and_then(|shifted| kernel_dimension(&shifted)));
    lambdas.iter().cloned().zip(dims).map(|(l, d)| Ok((l, d?))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumReport {
    pub side: ActionSide,
    pub lambda_table: LambdaTable,
    pub minimal_poly: RationalPoly,
    pub decomposition_ok: bool,
    /// `None` when the hypothesis fails and the check does not apply.
    pub local_annihilation_ok: Option<bool>,
    pub annihilation_ok: Option<bool>,
    pub minimal_poly_divides_product: Option<bool>,
    pub squarefree: bool,
    pub diagonalizable: bool,
    pub kernel_dims: Vec<(Rational, usize)>,
    pub notes: Vec<String>,
}

impl SpectrumReport {
    pub fn hypothesis_ok(&self) -> bool {
        self.lambda_table.hypothesis_ok()
    }

    /// Every check that applies came out true. False here on a hypothesis-
    /// satisfying input means a bug.
    pub fn all_checks_pass(&self) -> bool {
        let applicable = [self.local_annihilation_ok, self.annihilation_ok, self.minimal_poly_divides_product];
        self.decomposition_ok
            && applicable.iter().all(|c| c.unwrap_or(true))
            && (!self.hypothesis_ok() || self.diagonalizable)
    }
}

/// Runs the full pipeline on `w`.
///
/// Without the hypothesis the minimal polynomial and its squarefree verdict
/// are still computed and reported as empirical facts.
pub fn spectrum_report(
    w: &WeightedElement,
    table: &MultiplicationTable,
    lattice: &SupportLattice,
    side: ActionSide,
) -> Result<SpectrumReport, SpectraError> {
    check_inputs(w, Some(table), lattice)?;
    let lt = lambda_table(w, lattice)?;
    let mut notes = Vec::new();

    let decomposition_ok = match verify_support_decomposition(w, table, lattice) {
        Ok(()) => true,
        Err(e) => {
            notes.push(format!("support decomposition failed: {e}"));
            false
        }
    };

    let m = regular_representation(w, table, side)?;
    let minimal_poly = minimal_polynomial(&m)?;
    let squarefree = squarefree_check(&minimal_poly)?;
    let kernel_dims = kernel_dims(&m, lt.distinct())?;

    let (local_annihilation_ok, annihilation_ok, minimal_poly_divides_product) = if lt.hypothesis_ok() {
        let local = verify_local_annihilation(w, table, lattice)?.ok();
        let annihilation = verify_annihilation(w, table, lattice)?;
        let on_side = side == ActionSide::Right || apply_linear_factors(&m, lt.distinct())?.is_zero();
        let divides = minimal_poly.divides(&poly_product_of_linear_factors(lt.distinct()))?;
        (Some(local), Some(annihilation.ok() && on_side), Some(divides))
    } else {
        let (x, y) = lt.violation().expect("hypothesis failed");
        notes.push(format!(
            "ideals {} > {} share the value {}; the distinct-values criterion gives no information",
            x.0,
            y.0,
            lt.lambda(x)
        ));
        notes.push("diagonalizability below is read off the exact minimal polynomial".to_string());
        (None, None, None)
    };

    let total: usize = kernel_dims.iter().map(|(_, d)| d).sum();
    if squarefree && total != table.len() {
        notes.push(format!("kernel dimensions sum to {total}, expected {}", table.len()));
    }

    Ok(SpectrumReport {
        side,
        lambda_table: lt,
        minimal_poly,
        decomposition_ok,
        local_annihilation_ok,
        annihilation_ok,
        minimal_poly_divides_product,
        squarefree,
        diagonalizable: squarefree,
        kernel_dims,
        notes,
    })
}
