//! Standard left regular bands and measures on them.
//!
//! * The free LRB on `n` letters: words without repeated letters, where the
//!   product appends the letters of the right factor not already present.
//! * The face semigroup of the braid arrangement: ordered set partitions of
//!   `{1..n}`, multiplied by intersecting blocks in lexicographic order.
//!
//! Both are generated directly rather than through [`close_generators`]
//! (the tests cross-check the two constructions).
//!
//! [`close_generators`]: crate::semigroup::close_generators

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::Rational;
use crate::semigroup::{ElementId, MultiplicationTable, DEFAULT_ELEMENT_CAP};
use crate::spectra::WeightedElement;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("size parameter must be at least 1")]
    ZeroSize,
    #[error("{kind} with n = {n} has {count} elements, over the cap of {cap}")]
    CapExceeded { kind: FamilyKind, n: usize, count: String, cap: usize },
    #[error("letter weights must be nonnegative and sum to 1 (total {total})")]
    InvalidProbability { total: String },
    #[error("support must be nonempty")]
    EmptySupport,
    #[error("element {0} is not in the table")]
    UnknownElement(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    FreeLrb,
    BraidFaces,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FreeLrb => "free-lrb",
            Self::BraidFaces => "braid-faces",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "free" | "free-lrb" => Ok(Self::FreeLrb),
            "braid" | "braid-faces" => Ok(Self::BraidFaces),
            other => Err(format!("unknown family {other:?} (expected free or braid)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: usize) -> Self {
        Self { kind, n }
    }

    /// Number of elements, saturating at `u128::MAX`.
    pub fn element_count(&self) -> u128 {
        match self.kind {
            FamilyKind::FreeLrb => free_lrb_count(self.n),
            FamilyKind::BraidFaces => ordered_set_partition_count(self.n),
        }
    }

    pub fn build(&self, cap: usize) -> Result<MultiplicationTable, FamilyError> {
        if self.n == 0 {
            return Err(FamilyError::ZeroSize);
        }
        let count = self.element_count();
        if count > cap as u128 {
            return Err(FamilyError::CapExceeded { kind: self.kind, n: self.n, count: count.to_string(), cap });
        }
        Ok(match self.kind {
            FamilyKind::FreeLrb => build_free_lrb(self.n),
            FamilyKind::BraidFaces => build_braid_faces(self.n),
        })
    }
}

/// `Σ_{k=0..n} n!/(n-k)!`
pub fn free_lrb_count(n: usize) -> u128 {
    let mut total: u128 = 1;
    let mut falling: u128 = 1;
    for k in 0..n {
        falling = falling.saturating_mul((n - k) as u128);
        total = total.saturating_add(falling);
    }
    total
}

/// Ordered set partitions of an `n`-set (Fubini numbers).
pub fn ordered_set_partition_count(n: usize) -> u128 {
    let mut a = vec![1u128];
    for m in 1..=n {
        let mut binom: u128 = 1;
        let mut total: u128 = 0;
        for k in 1..=m {
            binom = binom.saturating_mul((m - k + 1) as u128) / k as u128;
            total = total.saturating_add(binom.saturating_mul(a[m - k]));
        }
        a.push(total);
    }
    a[n]
}

/// Label of letter `i` (1-based): a digit up to 9, parenthesized beyond.
pub fn letter_label(i: usize) -> String {
    if i <= 9 {
        i.to_string()
    } else {
        format!("({i})")
    }
}

pub fn free_lrb(n: usize) -> Result<MultiplicationTable, FamilyError> {
    FamilySpec::new(FamilyKind::FreeLrb, n).build(DEFAULT_ELEMENT_CAP)
}

pub fn braid_faces(n: usize) -> Result<MultiplicationTable, FamilyError> {
    FamilySpec::new(FamilyKind::BraidFaces, n).build(DEFAULT_ELEMENT_CAP)
}

/// The free LRB word product on letter sequences.
pub fn free_word_product(u: &[u16], v: &[u16]) -> Vec<u16> {
    let mut out = u.to_vec();
    for &c in v {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn build_free_lrb(n: usize) -> MultiplicationTable {
    // words by length, lexicographic within a length
    let mut words: Vec<Vec<u16>> = vec![Vec::new()];
    let mut start = 0;
    for _ in 0..n {
        let end = words.len();
        for w in start..end {
            for c in 1..=n as u16 {
                if !words[w].contains(&c) {
                    let mut next = words[w].clone();
                    next.push(c);
                    words.push(next);
                }
            }
        }
        start = end;
    }
    let index: HashMap<&[u16], usize> = words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let rows = words
        .iter()
        .map(|u| words.iter().map(|v| index[free_word_product(u, v).as_slice()]).collect())
        .collect();
    let labels = words.iter().map(|w| w.iter().map(|&c| letter_label(c as usize)).collect()).collect();
    MultiplicationTable::new(labels, rows, 0).expect("free LRB table is well formed")
}

/// Product of ordered set partitions given as sequences of blocks.
pub fn face_product(a: &[BTreeSet<u16>], b: &[BTreeSet<u16>]) -> Vec<BTreeSet<u16>> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let both: BTreeSet<u16> = x.intersection(y).copied().collect();
            if !both.is_empty() {
                out.push(both);
            }
        }
    }
    out
}

fn ordered_set_partitions(remaining: &BTreeSet<u16>) -> Vec<Vec<BTreeSet<u16>>> {
    if remaining.is_empty() {
        return vec![Vec::new()];
    }
    let items: Vec<u16> = remaining.iter().copied().collect();
    let mut out = Vec::new();
    for mask in 1u64..(1 << items.len()) {
        let block: BTreeSet<u16> =
            items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect();
        let rest: BTreeSet<u16> = remaining.difference(&block).copied().collect();
        for tail in ordered_set_partitions(&rest) {
            let mut p = vec![block.clone()];
            p.extend(tail);
            out.push(p);
        }
    }
    out
}

pub fn face_label(blocks: &[BTreeSet<u16>]) -> String {
    blocks
        .iter()
        .map(|b| b.iter().map(|&c| letter_label(c as usize)).collect::<String>())
        .collect::<Vec<_>>()
        .join("|")
}

fn build_braid_faces(n: usize) -> MultiplicationTable {
    let ground: BTreeSet<u16> = (1..=n as u16).collect();
    let mut faces = ordered_set_partitions(&ground);
    let key = |p: &Vec<BTreeSet<u16>>| (p.len(), p.iter().map(|b| b.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>());
    faces.sort_by_key(key);
    let index: HashMap<&Vec<BTreeSet<u16>>, usize> = faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let rows = faces
        .iter()
        .map(|a| faces.iter().map(|b| index[&face_product(a, b)]).collect())
        .collect();
    let labels = faces.iter().map(|f| face_label(f)).collect();
    MultiplicationTable::new(labels, rows, 0).expect("face semigroup table is well formed")
}

/// Weight `w_i` on the one-letter word `i` of `free_lrb(n)`.
///
/// The one-letter words occupy indices `1..=n` of [`free_lrb`].
pub fn move_to_front_measure(letter_weights: &[Rational]) -> Result<WeightedElement, FamilyError> {
    if letter_weights.is_empty() {
        return Err(FamilyError::ZeroSize);
    }
    let total: Rational = letter_weights.iter().sum();
    if letter_weights.iter().any(Signed::is_negative) || !total.is_one() {
        return Err(FamilyError::InvalidProbability { total: total.to_string() });
    }
    Ok(WeightedElement::from_terms(
        letter_weights.iter().enumerate().map(|(i, w)| (ElementId(i + 1), w.clone())),
    ))
}

/// Weight `1/|support|` on each listed element.
pub fn uniform_measure(table: &MultiplicationTable, support: &[ElementId]) -> Result<WeightedElement, FamilyError> {
    let distinct: BTreeSet<ElementId> = support.iter().copied().collect();
    if distinct.is_empty() {
        return Err(FamilyError::EmptySupport);
    }
    if let Some(bad) = distinct.iter().find(|e| e.0 >= table.len()) {
        return Err(FamilyError::UnknownElement(bad.0));
    }
    let weight = Rational::new(One::one(), distinct.len().into());
    Ok(WeightedElement::from_terms(distinct.into_iter().map(|e| (e, weight.clone()))))
}
