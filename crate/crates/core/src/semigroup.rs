//! Finite semigroups and monoids stored as complete multiplication tables.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par;

/// Default bound on the number of elements a closure may produce.
pub const DEFAULT_ELEMENT_CAP: usize = 100_000;

/// Default bound on the number of counterexamples listed per law.
pub const DEFAULT_COUNTEREXAMPLE_CAP: usize = 32;

/// Index of an element in a multiplication table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub usize);

impl ElementId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemigroupError {
    #[error("table has {rows} rows but {n} labels")]
    RowCount { rows: usize, n: usize },
    #[error("row {row} has {len} entries, expected {n}")]
    RowLength { row: usize, len: usize, n: usize },
    #[error("entry product({left}, {right}) = {value} is not an element index (n = {n})")]
    EntryOutOfRange {
        left: usize,
        right: usize,
        value: usize,
        n: usize,
    },
    #[error("identity index {identity} out of range (n = {n})")]
    IdentityOutOfRange { identity: usize, n: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("{labels} generator labels given for {seeds} seed elements")]
    GeneratorCount { labels: usize, seeds: usize },
    #[error("closure exceeds the element cap of {cap}")]
    CapExceeded { cap: usize },
    #[error("{identity:?} is not an identity: fails against {witness:?}")]
    NotIdentity { identity: String, witness: String },
    #[error("product oracle returned an element outside the closure for {left:?} * {right:?}")]
    InconsistentOracle { left: String, right: String },
}

/// A finite semigroup given by its product table. It may carry a designated
/// identity; an element that merely happens to act neutrally is not one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupTable {
    labels: Vec<String>,
    product: Vec<usize>,
    identity: Option<ElementId>,
}

/// A finite monoid: product table, element labels and a designated identity.
///
/// Construction checks the shape and that every entry names an element.
/// Associativity and the identity laws are checked by [`validate_semigroup`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicationTable {
    labels: Vec<String>,
    product: Vec<usize>,
    identity: ElementId,
}

fn check_structure(labels: &[String], rows: &[Vec<usize>]) -> Result<Vec<usize>, SemigroupError> {
    let n = labels.len();
    if rows.len() != n {
        return Err(SemigroupError::RowCount { rows: rows.len(), n });
    }
    let mut seen = HashSet::with_capacity(n);
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(SemigroupError::DuplicateLabel(label.clone()));
        }
    }
    let mut product = Vec::with_capacity(n * n);
    for (row, entries) in rows.iter().enumerate() {
        if entries.len() != n {
            return Err(SemigroupError::RowLength { row, len: entries.len(), n });
        }
        for (col, &value) in entries.iter().enumerate() {
            if value >= n {
                return Err(SemigroupError::EntryOutOfRange { left: row, right: col, value, n });
            }
            product.push(value);
        }
    }
    Ok(product)
}

impl SemigroupTable {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<usize>>) -> Result<Self, SemigroupError> {
        let product = check_structure(&labels, &rows)?;
        Ok(Self { labels, product, identity: None })
    }

    /// Designates `e` as the identity after checking both identity laws.
    pub fn with_identity(mut self, e: ElementId) -> Result<Self, SemigroupError> {
        let n = self.len();
        if e.0 >= n {
            return Err(SemigroupError::IdentityOutOfRange { identity: e.0, n });
        }
        if let Some(x) = (0..n).map(ElementId).find(|&x| self.product(e, x) != x || self.product(x, e) != x) {
            return Err(SemigroupError::NotIdentity { identity: self.labels[e.0].clone(), witness: self.labels[x.0].clone() });
        }
        self.identity = Some(e);
        Ok(self)
    }

    pub fn identity(&self) -> Option<ElementId> {
        self.identity
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn product(&self, a: ElementId, b: ElementId) -> ElementId {
        ElementId(self.product[a.0 * self.len() + b.0])
    }

    /// Lowest-index element acting as a two-sided identity, if any.
    pub fn find_identity(&self) -> Option<ElementId> {
        let n = self.len();
        (0..n).map(ElementId).find(|&e| {
            (0..n).map(ElementId).all(|x| self.product(e, x) == x && self.product(x, e) == x)
        })
    }

    /// First triple `(a, b, c)` with `(ab)c != a(bc)`.
    pub fn first_non_associative(&self) -> Option<(ElementId, ElementId, ElementId)> {
        first_non_associative(self.len(), |a, b| self.product[a * self.len() + b])
    }
}

impl MultiplicationTable {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<usize>>, identity: usize) -> Result<Self, SemigroupError> {
        let n = labels.len();
        if identity >= n {
            return Err(SemigroupError::IdentityOutOfRange { identity, n });
        }
        let product = check_structure(&labels, &rows)?;
        Ok(Self { labels, product, identity: ElementId(identity) })
    }

    /// The one-element monoid with identity labelled `label`.
    pub fn trivial(label: &str) -> Self {
        Self { labels: vec![label.to_string()], product: vec![0], identity: ElementId(0) }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false: a monoid has at least its identity.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn identity(&self) -> ElementId {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, e: ElementId) -> &str {
        &self.labels[e.0]
    }

    pub fn find_label(&self, label: &str) -> Option<ElementId> {
        self.labels.iter().position(|l| l == label).map(ElementId)
    }

    #[inline]
    pub fn product(&self, a: ElementId, b: ElementId) -> ElementId {
        ElementId(self.product[a.0 * self.len() + b.0])
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.len()).map(ElementId)
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.product.chunks(self.len().max(1)).map(<[usize]>::to_vec).collect()
    }

    pub fn to_semigroup(&self) -> SemigroupTable {
        SemigroupTable { labels: self.labels.clone(), product: self.product.clone(), identity: Some(self.identity) }
    }

    /// The same monoid with elements relabelled.
    pub fn with_labels(&self, labels: Vec<String>) -> Result<Self, SemigroupError> {
        Self::new(labels, self.rows(), self.identity.0)
    }
}

fn first_non_associative<P>(n: usize, product: P) -> Option<(ElementId, ElementId, ElementId)>
where
    P: Fn(usize, usize) -> usize + Sync + Send,
{
    par::find_map_first(n, |a| {
        for b in 0..n {
            let ab = product(a, b);
            for c in 0..n {
                if product(ab, c) != product(a, product(b, c)) {
                    return Some((ElementId(a), ElementId(b), ElementId(c)));
                }
            }
        }
        None
    })
}

/// Which side of the identity law failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Outcome of [`validate_semigroup`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemigroupDiagnostic {
    Ok,
    NotAssociative { a: ElementId, b: ElementId, c: ElementId },
    /// `identity * element != element` (side left) or `element * identity != element` (side right).
    IdentityLaw { element: ElementId, side: Side },
}

impl SemigroupDiagnostic {
    pub fn is_ok(&self) -> bool {
        matches!(self, Self::Ok)
    }
}

impl fmt::Display for SemigroupDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ok => write!(f, "ok"),
            Self::NotAssociative { a, b, c } => {
                write!(f, "associativity fails for ({}, {}, {})", a.0, b.0, c.0)
            }
            Self::IdentityLaw { element, side: Side::Left } => {
                write!(f, "identity * {} != {}", element.0, element.0)
            }
            Self::IdentityLaw { element, side: Side::Right } => {
                write!(f, "{} * identity != {}", element.0, element.0)
            }
        }
    }
}

/// Checks the identity laws and associativity, reporting the first violation.
///
/// Closure is guaranteed by construction of [`MultiplicationTable`].
pub fn validate_semigroup(table: &MultiplicationTable) -> SemigroupDiagnostic {
    let e = table.identity();
    for x in table.elements() {
        if table.product(e, x) != x {
            return SemigroupDiagnostic::IdentityLaw { element: x, side: Side::Left };
        }
        if table.product(x, e) != x {
            return SemigroupDiagnostic::IdentityLaw { element: x, side: Side::Right };
        }
    }
    let n = table.len();
    match first_non_associative(n, |a, b| table.product[a * n + b]) {
        Some((a, b, c)) => SemigroupDiagnostic::NotAssociative { a, b, c },
        None => SemigroupDiagnostic::Ok,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    /// `x * x = x`
    Band,
    /// `x * y * x = x * y`
    LeftRegular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LawViolation {
    pub law: Law,
    pub x: ElementId,
    pub y: ElementId,
}

/// Result of checking the left regular band identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub is_band: bool,
    pub is_left_regular: bool,
    /// Lowest-index violations first, at most the cap per law.
    pub counterexamples: Vec<LawViolation>,
}

impl LawReport {
    pub fn is_lrb(&self) -> bool {
        self.is_band && self.is_left_regular
    }
}

pub fn verify_left_regular_band(table: &MultiplicationTable) -> LawReport {
    verify_left_regular_band_capped(table, DEFAULT_COUNTEREXAMPLE_CAP)
}

/// Checks `x² = x` and `xyx = xy` exhaustively, listing up to `cap`
/// counterexamples per law.
pub fn verify_left_regular_band_capped(table: &MultiplicationTable, cap: usize) -> LawReport {
    let band: Vec<LawViolation> = table
        .elements()
        .filter(|&x| table.product(x, x) != x)
        .take(cap)
        .map(|x| LawViolation { law: Law::Band, x, y: x })
        .collect();

    let is_band = table.elements().all(|x| table.product(x, x) == x);

    // each row keeps at least one failure so the verdict survives a zero cap
    let per_row = cap.max(1);
    let rows = par::map_indices(table.len(), |i| {
        let x = ElementId(i);
        let mut out = Vec::new();
        for y in table.elements() {
            let xy = table.product(x, y);
            if table.product(xy, x) != xy {
                out.push(LawViolation { law: Law::LeftRegular, x, y });
                if out.len() == per_row {
                    break;
                }
            }
        }
        out
    });
    let is_left_regular = rows.iter().all(Vec::is_empty);

    let mut counterexamples = band;
    counterexamples.extend(rows.into_iter().flatten().take(cap));
    LawReport { is_band, is_left_regular, counterexamples }
}

fn fresh_label(taken: &[String]) -> String {
    let used: HashSet<&str> = taken.iter().map(String::as_str).collect();
    ["", "e", "1"]
        .iter()
        .map(|s| s.to_string())
        .chain((0..).map(|i| format!("e{i}")))
        .find(|c| !used.contains(c.as_str()))
        .expect("infinitely many candidates")
}

/// Returns a monoid for `table`: unchanged if it has a designated identity,
/// otherwise with a fresh identity at index 0 and old element `i` moved to
/// `i + 1`.
pub fn adjoin_identity(table: SemigroupTable) -> MultiplicationTable {
    if let Some(e) = table.identity {
        return MultiplicationTable { labels: table.labels, product: table.product, identity: e };
    }
    let n = table.len();
    let mut labels = Vec::with_capacity(n + 1);
    labels.push(fresh_label(&table.labels));
    labels.extend(table.labels.iter().cloned());
    let m = n + 1;
    let mut product = vec![0; m * m];
    for x in 0..m {
        product[x] = x;
        product[x * m] = x;
    }
    for a in 0..n {
        for b in 0..n {
            product[(a + 1) * m + b + 1] = table.product[a * n + b] + 1;
        }
    }
    MultiplicationTable { labels, product, identity: ElementId(0) }
}

/// A closed monoid together with the abstract element behind each index
/// (`None` for an adjoined identity).
#[derive(Clone, Debug)]
pub struct Closure<E> {
    pub table: MultiplicationTable,
    pub elements: Vec<Option<E>>,
}

/// Table of the monoid generated by `seeds` under `oracle`.
///
/// Elements are identified by equality of the oracle's canonical values.
/// Index 0 is the identity (adjoined when the closure has none), the rest
/// follow breadth-first discovery order, right-multiplying by generators in
/// the order given. Labels of non-generators concatenate generator labels
/// along the discovery path.
pub fn close_generators<E, F>(
    generator_labels: &[String],
    seeds: &[E],
    oracle: F,
    cap: usize,
) -> Result<MultiplicationTable, SemigroupError>
where
    E: Clone + Eq + Hash,
    F: Fn(&E, &E) -> E,
{
    close_generators_with_elements(generator_labels, seeds, oracle, cap).map(|c| c.table)
}

pub fn close_generators_with_elements<E, F>(
    generator_labels: &[String],
    seeds: &[E],
    oracle: F,
    cap: usize,
) -> Result<Closure<E>, SemigroupError>
where
    E: Clone + Eq + Hash,
    F: Fn(&E, &E) -> E,
{
    if generator_labels.len() != seeds.len() {
        return Err(SemigroupError::GeneratorCount { labels: generator_labels.len(), seeds: seeds.len() });
    }
    let separator = if generator_labels.iter().all(|l| l.chars().count() == 1) { "" } else { "." };

    let mut elements: Vec<E> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<E, usize> = HashMap::new();
    for (seed, label) in seeds.iter().zip(generator_labels) {
        if !index.contains_key(seed) {
            index.insert(seed.clone(), elements.len());
            elements.push(seed.clone());
            labels.push(label.clone());
        }
    }
    if elements.len() > cap {
        return Err(SemigroupError::CapExceeded { cap });
    }

    let mut next = 0;
    while next < elements.len() {
        for (g, gen_label) in seeds.iter().zip(generator_labels) {
            let y = oracle(&elements[next], g);
            if !index.contains_key(&y) {
                // the adjoined identity may still need a slot
                if elements.len() + 1 > cap {
                    return Err(SemigroupError::CapExceeded { cap });
                }
                index.insert(y.clone(), elements.len());
                labels.push(format!("{}{separator}{gen_label}", labels[next]));
                elements.push(y);
            }
        }
        next += 1;
    }

    let n = elements.len();
    let mut rows = vec![Vec::with_capacity(n); n];
    for (a, row) in rows.iter_mut().enumerate() {
        for b in 0..n {
            let y = oracle(&elements[a], &elements[b]);
            match index.get(&y) {
                Some(&i) => row.push(i),
                None => {
                    return Err(SemigroupError::InconsistentOracle {
                        left: labels[a].clone(),
                        right: labels[b].clone(),
                    })
                }
            }
        }
    }

    let semigroup = SemigroupTable::new(labels, rows)?;
    // An idempotent acting neutrally on its own closure (say a single
    // generator `a` with `aa = a`) is not the monoid identity unless some
    // other product lands on it.
    let produced = semigroup.find_identity().filter(|&u| {
        (0..n).any(|a| (0..n).any(|b| (a, b) != (u.0, u.0) && semigroup.product[a * n + b] == u.0))
    });
    match produced {
        Some(e) => {
            // move the identity to index 0, keep discovery order for the rest
            let order: Vec<usize> =
                std::iter::once(e.0).chain((0..n).filter(|&i| i != e.0)).collect();
            let mut position = vec![0; n];
            for (new, &old) in order.iter().enumerate() {
                position[old] = new;
            }
            let labels = order.iter().map(|&i| semigroup.labels[i].clone()).collect();
            let rows = order
                .iter()
                .map(|&a| order.iter().map(|&b| position[semigroup.product[a * n + b]]).collect())
                .collect();
            let table = MultiplicationTable::new(labels, rows, 0)?;
            let elements = order.iter().map(|&i| Some(elements[i].clone())).collect();
            Ok(Closure { table, elements })
        }
        None => {
            if n + 1 > cap {
                return Err(SemigroupError::CapExceeded { cap });
            }
            let table = adjoin_identity(semigroup);
            let elements = std::iter::once(None).chain(elements.into_iter().map(Some)).collect();
            Ok(Closure { table, elements })
        }
    }
}
