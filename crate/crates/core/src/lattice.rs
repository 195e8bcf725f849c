//! The lattice of principal left ideals and the support map `s ↦ Ss`.

use std::collections::HashMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::par;
use crate::semigroup::{ElementId, MultiplicationTable};

/// Index of a principal left ideal in a [`SupportLattice`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct IdealId(pub usize);

impl IdealId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("intersection of ideals {0} and {1} is not a principal left ideal")]
    NotClosedUnderMeet(usize, usize),
    #[error("principal left ideals have no unique minimum")]
    NoMinimum,
}

/// A pair of elements on which a checked identity fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairViolation {
    pub s: ElementId,
    pub t: ElementId,
}

#[derive(Clone, Debug)]
pub struct SupportLattice {
    sets: Vec<FixedBitSet>,
    members: Vec<Vec<ElementId>>,
    leq: Vec<bool>,
    meet: Vec<IdealId>,
    sigma: Vec<IdealId>,
    top: IdealId,
    bottom: IdealId,
    descending: Vec<IdealId>,
}

/// `Ss = { xs : x ∈ S }`, sorted by index.
pub fn principal_left_ideal(table: &MultiplicationTable, s: ElementId) -> Vec<ElementId> {
    let mut out: Vec<ElementId> = table.elements().map(|x| table.product(x, s)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn ideal_bits(table: &MultiplicationTable, s: ElementId) -> FixedBitSet {
    let mut bits = FixedBitSet::with_capacity(table.len());
    for x in table.elements() {
        bits.insert(table.product(x, s).0);
    }
    bits
}

/// Groups elements by principal left ideal and precomputes order and meet.
///
/// Ideals are numbered in order of first occurrence when scanning elements by
/// index. Closure under intersection is re-checked rather than assumed.
pub fn build_support_lattice(table: &MultiplicationTable) -> Result<SupportLattice, LatticeError> {
    let mut index: HashMap<FixedBitSet, IdealId> = HashMap::new();
    let mut sets: Vec<FixedBitSet> = Vec::new();
    let mut sigma = Vec::with_capacity(table.len());
    for s in table.elements() {
        let bits = ideal_bits(table, s);
        let id = *index.entry(bits.clone()).or_insert_with(|| {
            sets.push(bits);
            IdealId(sets.len() - 1)
        });
        sigma.push(id);
    }
    let m = sets.len();

    let leq: Vec<bool> = par::map_indices(m * m, |k| sets[k / m].is_subset(&sets[k % m]));

    let mut meet = Vec::with_capacity(m * m);
    for x in 0..m {
        for y in 0..m {
            let mut both = sets[x].clone();
            both.intersect_with(&sets[y]);
            match index.get(&both) {
                Some(&id) => meet.push(id),
                None => return Err(LatticeError::NotClosedUnderMeet(x, y)),
            }
        }
    }

    let bottom = (0..m)
        .find(|&x| (0..m).all(|y| leq[x * m + y]))
        .map(IdealId)
        .ok_or(LatticeError::NoMinimum)?;
    let top = sigma[table.identity().0];

    let members = sets.iter().map(|b| b.ones().map(ElementId).collect()).collect();

    let mut descending: Vec<IdealId> = (0..m).map(IdealId).collect();
    descending.sort_by_key(|&x| (sets[x.0].count_ones(..), x.0));

    Ok(SupportLattice { sets, members, leq, meet, sigma, top, bottom, descending })
}

impl SupportLattice {
    /// Number of distinct principal left ideals.
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn ideals(&self) -> impl Iterator<Item = IdealId> {
        (0..self.len()).map(IdealId)
    }

    pub fn members(&self, x: IdealId) -> &[ElementId] {
        &self.members[x.0]
    }

    pub fn contains(&self, x: IdealId, s: ElementId) -> bool {
        self.sets[x.0].contains(s.0)
    }

    pub fn sigma(&self, s: ElementId) -> IdealId {
        self.sigma[s.0]
    }

    pub fn sigma_table(&self) -> &[IdealId] {
        &self.sigma
    }

    /// Inclusion `X ⊆ Y`.
    #[inline]
    pub fn leq(&self, x: IdealId, y: IdealId) -> bool {
        self.leq[x.0 * self.len() + y.0]
    }

    /// Strict inclusion `X ⊂ Y`.
    #[inline]
    pub fn lt(&self, x: IdealId, y: IdealId) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn meet(&self, x: IdealId, y: IdealId) -> IdealId {
        self.meet[x.0 * self.len() + y.0]
    }

    pub fn top(&self) -> IdealId {
        self.top
    }

    pub fn bottom(&self) -> IdealId {
        self.bottom
    }

    /// Ideals bottom first, each after every ideal strictly below it; ties
    /// broken by size then index.
    pub fn descending_order(&self) -> &[IdealId] {
        &self.descending
    }

    /// Covering pairs `(upper, lower)` of the Hasse diagram, sorted.
    pub fn covers(&self) -> Vec<(IdealId, IdealId)> {
        let mut out = Vec::new();
        for upper in self.ideals() {
            for lower in self.ideals() {
                if self.lt(lower, upper)
                    && !self.ideals().any(|mid| self.lt(lower, mid) && self.lt(mid, upper))
                {
                    out.push((upper, lower));
                }
            }
        }
        out
    }

    /// Elements whose support is the bottom ideal (the minimal ideal).
    pub fn minimal_ideal(&self) -> Vec<ElementId> {
        self.sigma.iter().enumerate().filter(|(_, &x)| x == self.bottom).map(|(s, _)| ElementId(s)).collect()
    }
}

pub fn descending_order(lattice: &SupportLattice) -> Vec<IdealId> {
    lattice.descending_order().to_vec()
}

/// Checks `σ(s) ≤ σ(t) ⇔ st = s` for all pairs; lowest pair on failure.
pub fn verify_key_fact(table: &MultiplicationTable, lattice: &SupportLattice) -> Result<(), PairViolation> {
    first_pair_failure(table, |s, t| {
        lattice.leq(lattice.sigma(s), lattice.sigma(t)) == (table.product(s, t) == s)
    })
}

/// Checks `σ(st) = σ(s) ∧ σ(t)` for all pairs; lowest pair on failure.
pub fn verify_sigma_homomorphism(table: &MultiplicationTable, lattice: &SupportLattice) -> Result<(), PairViolation> {
    first_pair_failure(table, |s, t| {
        lattice.sigma(table.product(s, t)) == lattice.meet(lattice.sigma(s), lattice.sigma(t))
    })
}

fn first_pair_failure<F>(table: &MultiplicationTable, holds: F) -> Result<(), PairViolation>
where
    F: Fn(ElementId, ElementId) -> bool + Sync + Send,
{
    let found = par::find_map_first(table.len(), |i| {
        let s = ElementId(i);
        table.elements().find(|&t| !holds(s, t)).map(|t| PairViolation { s, t })
    });
    match found {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

fn ideal_caption(table: &MultiplicationTable, lattice: &SupportLattice, x: IdealId) -> String {
    let names: Vec<&str> = lattice
        .members(x)
        .iter()
        .map(|&s| match table.label(s) {
            "" => "e",
            l => l,
        })
        .collect();
    format!("{{{}}}", names.join(", "))
}

/// Hasse diagram of the lattice in Graphviz DOT, edges pointing upward.
pub fn to_dot(table: &MultiplicationTable, lattice: &SupportLattice) -> String {
    let mut out = String::from("digraph support_lattice {\n  rankdir=BT;\n  node [shape=box];\n");
    for x in lattice.ideals() {
        let caption = ideal_caption(table, lattice, x);
        let _ = writeln!(out, "  i{} [label={}];", x.0, serde_json::to_string(&caption).expect("string"));
    }
    for (upper, lower) in lattice.covers() {
        let _ = writeln!(out, "  i{} -> i{};", lower.0, upper.0);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{braid_faces, free_lrb};
    use crate::semigroup::{adjoin_identity, SemigroupTable};

    fn el(t: &MultiplicationTable, label: &str) -> ElementId {
        t.find_label(label).unwrap()
    }

    #[test]
    fn principal_ideals_in_free_lrb_2() {
        let t = free_lrb(2).unwrap();
        let ids = |xs: &[&str]| {
            let mut v: Vec<ElementId> = xs.iter().map(|l| el(&t, l)).collect();
            v.sort();
            v
        };
        assert_eq!(principal_left_ideal(&t, el(&t, "12")), ids(&["12", "21"]));
        assert_eq!(principal_left_ideal(&t, el(&t, "1")), ids(&["1", "12", "21"]));
        assert_eq!(principal_left_ideal(&t, t.identity()), t.elements().collect::<Vec<_>>());
    }

    #[test]
    fn free_lrb_2_lattice_is_a_diamond() {
        let t = free_lrb(2).unwrap();
        let l = build_support_lattice(&t).unwrap();
        assert_eq!(l.len(), 4);
        let (top, sa, sb, bot) = (l.top(), l.sigma(el(&t, "1")), l.sigma(el(&t, "2")), l.bottom());
        assert_eq!(l.sigma(el(&t, "12")), bot);
        assert_eq!(l.sigma(el(&t, "21")), bot);
        assert!(l.lt(sa, top) && l.lt(sb, top) && l.lt(bot, sa) && l.lt(bot, sb));
        assert!(!l.leq(sa, sb) && !l.leq(sb, sa));
        assert_eq!(l.meet(sa, sb), bot);
        assert_eq!(l.members(bot), &[el(&t, "12"), el(&t, "21")]);
        assert_eq!(l.covers().len(), 4);
        let order = l.descending_order();
        assert_eq!(order[0], bot);
        assert_eq!(order[3], top);
    }

    #[test]
    fn trivial_monoid_lattice() {
        let t = MultiplicationTable::trivial("e");
        let l = build_support_lattice(&t).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l.top(), l.bottom());
        assert_eq!(l.descending_order(), &[IdealId(0)]);
    }

    #[test]
    fn free_lrb_3_lattice_is_boolean() {
        let t = free_lrb(3).unwrap();
        let l = build_support_lattice(&t).unwrap();
        assert_eq!(l.len(), 8);
        // content determines support, smaller ideals for larger content
        for u in t.elements() {
            for v in t.elements() {
                let cu: std::collections::BTreeSet<char> = t.label(u).chars().collect();
                let cv: std::collections::BTreeSet<char> = t.label(v).chars().collect();
                assert_eq!(l.leq(l.sigma(u), l.sigma(v)), cv.is_subset(&cu));
            }
        }
        // Boolean lattice on 3 points has 12 covering edges
        assert_eq!(l.covers().len(), 12);
    }

    #[test]
    fn chain_lattice_order_is_unique() {
        // e > a > z with az = za = z
        let t = MultiplicationTable::new(
            vec!["e".into(), "a".into(), "z".into()],
            vec![vec![0, 1, 2], vec![1, 1, 2], vec![2, 2, 2]],
            0,
        )
        .unwrap();
        let l = build_support_lattice(&t).unwrap();
        assert_eq!(l.len(), t.len());
        let order: Vec<usize> = l.descending_order().iter().map(|x| l.members(*x).len()).collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn key_fact_and_homomorphism_on_free_lrb_2() {
        let t = free_lrb(2).unwrap();
        let l = build_support_lattice(&t).unwrap();
        assert_eq!(verify_key_fact(&t, &l), Ok(()));
        assert_eq!(verify_sigma_homomorphism(&t, &l), Ok(()));
        let (a, b, ab) = (el(&t, "1"), el(&t, "2"), el(&t, "12"));
        assert_eq!(t.product(ab, a), ab);
        assert!(l.leq(l.sigma(ab), l.sigma(a)));
        assert_ne!(t.product(a, b), a);
        assert!(!l.leq(l.sigma(a), l.sigma(b)));
    }

    #[test]
    fn lattice_invariants_on_braid_faces() {
        let t = braid_faces(3).unwrap();
        let l = build_support_lattice(&t).unwrap();
        let m = l.len();
        assert_eq!(m, 5); // set partitions of {1,2,3}
        for x in l.ideals() {
            assert!(l.leq(x, x));
            for y in l.ideals() {
                let both = l.meet(x, y);
                assert_eq!(both, l.meet(y, x));
                assert_eq!(l.meet(x, x), x);
                assert!(l.leq(both, x) && l.leq(both, y));
                if l.leq(x, y) && l.leq(y, x) {
                    assert_eq!(x, y);
                }
                for z in l.ideals() {
                    assert_eq!(l.meet(l.meet(x, y), z), l.meet(x, l.meet(y, z)));
                    if l.leq(z, x) && l.leq(z, y) {
                        assert!(l.leq(z, both));
                    }
                    if l.leq(x, y) && l.leq(y, z) {
                        assert!(l.leq(x, z));
                    }
                }
            }
        }
        for s in t.elements() {
            assert!(l.contains(l.sigma(s), s));
        }
        for &s in l.members(l.bottom()) {
            for x in t.elements() {
                assert!(l.contains(l.bottom(), t.product(x, s)));
            }
        }
        let pos: HashMap<IdealId, usize> = l.descending_order().iter().enumerate().map(|(i, &x)| (x, i)).collect();
        for x in l.ideals() {
            for y in l.ideals() {
                if l.lt(y, x) {
                    assert!(pos[&y] < pos[&x]);
                }
            }
        }
        assert_eq!(l.sigma(t.identity()), l.top());
    }

    #[test]
    fn rejects_non_lrb_without_minimum() {
        // right-zero band {a, b} (xy = y) with identity: a band, not left regular
        let s = SemigroupTable::new(vec!["a".into(), "b".into()], vec![vec![0, 1], vec![0, 1]]).unwrap();
        let t = adjoin_identity(s);
        // Sa = {a}, Sb = {b}: disjoint, so the empty intersection is not an ideal
        assert!(matches!(build_support_lattice(&t), Err(LatticeError::NotClosedUnderMeet(..))));
    }

    #[test]
    fn dot_export_lists_covers() {
        let t = free_lrb(2).unwrap();
        let l = build_support_lattice(&t).unwrap();
        let dot = to_dot(&t, &l);
        assert!(dot.starts_with("digraph support_lattice {"));
        assert_eq!(dot.matches("->").count(), 4);
        assert!(dot.contains("\"{12, 21}\""));
        assert!(dot.contains("\"{e, 1, 2, 12, 21}\""));
    }
}
