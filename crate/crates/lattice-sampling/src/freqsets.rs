//! Integer frequency sets: rectangles, hyperbolic crosses, dyadic blocks and
//! step hyperbolic crosses.
//!
//! All sets enumerate their members in lexicographic coordinate order, so
//! iteration order (and everything derived from it, e.g. coefficient
//! assignment in random polynomials) is deterministic.

use crate::{Error, Result};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// A frequency vector `k` in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreqIndex(Vec<i64>);

impl FreqIndex {
    pub fn new(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "frequency vector must have dimension >= 1");
        FreqIndex(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// The reflection `-k`.
    pub fn neg(&self) -> Self {
        FreqIndex(self.0.iter().map(|&c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        FreqIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for FreqIndex {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl From<Vec<i64>> for FreqIndex {
    fn from(v: Vec<i64>) -> Self {
        FreqIndex::new(v)
    }
}

impl Serialize for FreqIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// The dyadic level of a single coordinate: the unique `s` with
/// `[2^(s-1)] <= |k| < 2^s`. Level 0 holds only `k = 0`, level 1 holds
/// `k = ±1`, level `s >= 2` holds `2^(s-1) <= |k| < 2^s`.
pub fn dyadic_level(k: i64) -> u32 {
    let a = k.unsigned_abs();
    match a {
        0 => 0,
        1 => 1,
        _ => 64 - a.leading_zeros(), // floor(log2 a) + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FreqSetKind {
    /// `R(j) = {k : |k_i| < j_i}`.
    Rectangle(Vec<u64>),
    /// `Γ(N, d) = {k : prod_i max(|k_i|, 1) <= N}`.
    HyperbolicCross(u64),
    /// `ρ(s) = {k : [2^(s_j - 1)] <= |k_j| < 2^(s_j)}`.
    DyadicBlock(Vec<u32>),
    /// `Q_r`, the union of `ρ(s)` over `|s|_1 <= r`.
    StepHyperbolicCross(u32),
    Explicit,
}

/// A finite, centrally symmetric set of integer frequency vectors.
///
/// Members are materialized in lexicographic order; membership for the
/// built-in kinds is answered by the defining predicate.
#[derive(Clone, Debug)]
pub struct FreqSet {
    dim: usize,
    kind: FreqSetKind,
    members: Vec<FreqIndex>,
}

impl FreqSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &FreqSetKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FreqIndex> {
        self.members.iter()
    }

    pub fn members(&self) -> &[FreqIndex] {
        &self.members
    }

    pub fn contains(&self, k: &FreqIndex) -> bool {
        if k.dim() != self.dim {
            return false;
        }
        match &self.kind {
            FreqSetKind::Rectangle(j) => k
                .coords()
                .iter()
                .zip(j)
                .all(|(&c, &ji)| c.unsigned_abs() < ji),
            FreqSetKind::HyperbolicCross(n) => hc_product(k.coords()).is_some_and(|p| p <= *n),
            FreqSetKind::DyadicBlock(s) => k
                .coords()
                .iter()
                .zip(s)
                .all(|(&c, &sj)| dyadic_level(c) == sj),
            FreqSetKind::StepHyperbolicCross(r) => {
                k.coords().iter().map(|&c| dyadic_level(c) as u64).sum::<u64>() <= *r as u64
            }
            FreqSetKind::Explicit => self.members.binary_search(k).is_ok(),
        }
    }
}

impl Serialize for FreqSet {
    /// Serializes as a JSON array of integer vectors, in iteration order.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.members.len()))?;
        for k in &self.members {
            seq.serialize_element(k)?;
        }
        seq.end()
    }
}

/// `prod_i max(|k_i|, 1)`, or `None` on overflow.
fn hc_product(coords: &[i64]) -> Option<u64> {
    let mut p: u64 = 1;
    for &c in coords {
        p = p.checked_mul(c.unsigned_abs().max(1))?;
    }
    Some(p)
}

/// Builds the rectangle `R(j) = {k : |k_i| < j_i for all i}`.
pub fn build_rectangle(j: &[u64]) -> Result<FreqSet> {
    if j.is_empty() || j.contains(&0) {
        return Err(Error::InvalidParameter(format!(
            "rectangle sides must be positive, got {j:?}"
        )));
    }
    let mut members = Vec::new();
    let mut cur = vec![0i64; j.len()];
    rect_rec(j, 0, &mut cur, &mut members);
    Ok(FreqSet {
        dim: j.len(),
        kind: FreqSetKind::Rectangle(j.to_vec()),
        members,
    })
}

fn rect_rec(j: &[u64], axis: usize, cur: &mut Vec<i64>, out: &mut Vec<FreqIndex>) {
    if axis == j.len() {
        out.push(FreqIndex::new(cur.clone()));
        return;
    }
    let hi = j[axis] as i64 - 1;
    for c in -hi..=hi {
        cur[axis] = c;
        rect_rec(j, axis + 1, cur, out);
    }
}

/// Builds the hyperbolic cross `Γ(N, d) = {k : prod_i max(|k_i|, 1) <= N}`.
///
/// Enumeration is recursive per coordinate with pruning by the remaining
/// product budget, so the cost is proportional to `|Γ|` rather than to the
/// enclosing box `[-N, N]^d`.
pub fn build_hyperbolic_cross(n: u64, dim: usize) -> Result<FreqSet> {
    if n < 1 || dim < 1 {
        return Err(Error::InvalidParameter(format!(
            "hyperbolic cross needs N >= 1 and d >= 1, got N={n}, d={dim}"
        )));
    }
    let mut members = Vec::new();
    let mut cur = vec![0i64; dim];
    hc_rec(n, dim, 0, &mut cur, &mut members);
    Ok(FreqSet {
        dim,
        kind: FreqSetKind::HyperbolicCross(n),
        members,
    })
}

fn hc_rec(budget: u64, dim: usize, axis: usize, cur: &mut Vec<i64>, out: &mut Vec<FreqIndex>) {
    if axis == dim {
        out.push(FreqIndex::new(cur.clone()));
        return;
    }
    let b = budget as i64;
    for c in -b..=b {
        cur[axis] = c;
        hc_rec(budget / c.unsigned_abs().max(1), dim, axis + 1, cur, out);
    }
}

/// Builds the dyadic block `ρ(s)`; the factor for `s_j = 0` is `{0}` and for
/// `s_j = 1` it is `{-1, 1}`.
pub fn build_dyadic_block(s: &[u32]) -> Result<FreqSet> {
    if s.is_empty() {
        return Err(Error::InvalidParameter("empty dyadic index".into()));
    }
    if s.iter().any(|&sj| sj >= 62) {
        return Err(Error::Overflow(format!("dyadic block 2^{s:?}")));
    }
    let factors: Vec<Vec<i64>> = s.iter().map(|&sj| dyadic_factor(sj)).collect();
    let mut members = Vec::new();
    let mut cur = vec![0i64; s.len()];
    product_rec(&factors, 0, &mut cur, &mut members);
    Ok(FreqSet {
        dim: s.len(),
        kind: FreqSetKind::DyadicBlock(s.to_vec()),
        members,
    })
}

/// The one-dimensional slice `[2^(s-1)] <= |k| < 2^s`, in ascending order.
fn dyadic_factor(s: u32) -> Vec<i64> {
    if s == 0 {
        return vec![0];
    }
    let lo = 1i64 << (s - 1);
    let hi = 1i64 << s;
    let mut v: Vec<i64> = (-(hi - 1)..=-lo).collect();
    v.extend(lo..hi);
    v
}

fn product_rec(factors: &[Vec<i64>], axis: usize, cur: &mut Vec<i64>, out: &mut Vec<FreqIndex>) {
    if axis == factors.len() {
        out.push(FreqIndex::new(cur.clone()));
        return;
    }
    for &c in &factors[axis] {
        cur[axis] = c;
        product_rec(factors, axis + 1, cur, out);
    }
}

/// Builds the step hyperbolic cross `Q_r`, the disjoint union of `ρ(s)` over
/// `|s|_1 <= r`.
pub fn build_step_hyperbolic_cross(r: u32, dim: usize) -> Result<FreqSet> {
    if dim < 1 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if r >= 62 {
        return Err(Error::Overflow(format!("step hyperbolic cross 2^{r}")));
    }
    let mut members = Vec::new();
    let mut cur = vec![0i64; dim];
    step_rec(r, dim, 0, &mut cur, &mut members);
    Ok(FreqSet {
        dim,
        kind: FreqSetKind::StepHyperbolicCross(r),
        members,
    })
}

fn step_rec(budget: u32, dim: usize, axis: usize, cur: &mut Vec<i64>, out: &mut Vec<FreqIndex>) {
    if axis == dim {
        out.push(FreqIndex::new(cur.clone()));
        return;
    }
    let hi = 1i64 << budget; // |k| < 2^budget keeps the level sum within budget
    for c in -(hi - 1)..hi {
        cur[axis] = c;
        step_rec(budget - dyadic_level(c), dim, axis + 1, cur, out);
    }
}

/// Builds an explicit set from a list of vectors (deduplicated, sorted).
pub fn build_explicit(mut members: Vec<FreqIndex>, dim: usize) -> Result<FreqSet> {
    if members.iter().any(|k| k.dim() != dim) {
        return Err(Error::InvalidParameter(
            "explicit set contains vectors of mixed dimension".into(),
        ));
    }
    members.sort();
    members.dedup();
    Ok(FreqSet {
        dim,
        kind: FreqSetKind::Explicit,
        members,
    })
}

/// The difference set `{k - l : k, l in Q}` as an explicit set.
pub fn difference_set(q: &FreqSet) -> FreqSet {
    let mut members: Vec<FreqIndex> = Vec::with_capacity(q.len());
    for k in q.iter() {
        for l in q.iter() {
            members.push(k.sub(l));
        }
    }
    members.sort();
    members.dedup();
    FreqSet {
        dim: q.dim(),
        kind: FreqSetKind::Explicit,
        members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fi(coords: &[i64]) -> FreqIndex {
        FreqIndex::new(coords.to_vec())
    }

    /// Brute-force box oracle for the hyperbolic cross cardinality.
    fn hc_card_oracle(n: u64, dim: usize) -> usize {
        let b = n as i64;
        let mut count = 0usize;
        let mut cur = vec![0i64; dim];
        fn rec(b: i64, n: u64, axis: usize, cur: &mut Vec<i64>, count: &mut usize) {
            if axis == cur.len() {
                let p: u64 = cur.iter().map(|&c| c.unsigned_abs().max(1)).product();
                if p <= n {
                    *count += 1;
                }
                return;
            }
            for c in -b..=b {
                cur[axis] = c;
                rec(b, n, axis + 1, cur, count);
            }
        }
        rec(b, n, 0, &mut cur, &mut count);
        count
    }

    #[test]
    fn rectangle_cardinalities() {
        assert_eq!(build_rectangle(&[2, 2]).unwrap().len(), 9);
        assert_eq!(build_rectangle(&[1, 1]).unwrap().members(), &[fi(&[0, 0])]);
        let r = build_rectangle(&[3, 2]).unwrap();
        assert!(r.contains(&fi(&[2, 1])));
        assert!(!r.contains(&fi(&[3, 1])));
    }

    #[test]
    fn rectangle_rejects_zero_side() {
        assert!(build_rectangle(&[2, 0]).is_err());
        assert!(build_rectangle(&[]).is_err());
    }

    #[test]
    fn hyperbolic_cross_cardinalities_match_box_oracle() {
        // Frozen values computed with the box-enumeration oracle.
        assert_eq!(hc_card_oracle(1, 2), 9);
        assert_eq!(hc_card_oracle(2, 3), 81);
        assert_eq!(build_hyperbolic_cross(1, 2).unwrap().len(), 9);
        assert_eq!(build_hyperbolic_cross(2, 3).unwrap().len(), 81);
        assert_eq!(build_hyperbolic_cross(5, 1).unwrap().len(), 11);
        for n in 1..=12 {
            for d in 1..=3 {
                assert_eq!(
                    build_hyperbolic_cross(n, d).unwrap().len(),
                    hc_card_oracle(n, d),
                    "N={n}, d={d}"
                );
            }
        }
    }

    #[test]
    fn hyperbolic_cross_rejects_bad_parameters() {
        assert!(build_hyperbolic_cross(0, 2).is_err());
        assert!(build_hyperbolic_cross(3, 0).is_err());
    }

    #[test]
    fn dyadic_block_small_cases() {
        assert_eq!(build_dyadic_block(&[0]).unwrap().members(), &[fi(&[0])]);
        let b2 = build_dyadic_block(&[2]).unwrap();
        assert_eq!(
            b2.members(),
            &[fi(&[-3]), fi(&[-2]), fi(&[2]), fi(&[3])]
        );
        let b11 = build_dyadic_block(&[1, 1]).unwrap();
        assert_eq!(b11.len(), 4);
        for k in b11.iter() {
            assert!(k.coords().iter().all(|&c| c.abs() == 1));
        }
    }

    #[test]
    fn step_hyperbolic_cross_examples() {
        let q3 = build_step_hyperbolic_cross(3, 1).unwrap();
        assert_eq!(q3.len(), 15);
        assert!(q3.iter().all(|k| k[0].abs() < 8));

        let q0 = build_step_hyperbolic_cross(0, 2).unwrap();
        assert_eq!(q0.members(), &[fi(&[0, 0])]);

        let q2 = build_step_hyperbolic_cross(2, 2).unwrap();
        assert!(q2.contains(&fi(&[1, 1])));
        assert!(q2.contains(&fi(&[3, 0])));
        assert!(!q2.contains(&fi(&[2, 2])));
    }

    #[test]
    fn step_cross_is_disjoint_union_of_blocks() {
        // Sum of block cardinalities over |s|_1 <= r must equal |Q_r|, and
        // the blocks must be pairwise disjoint.
        for d in 1..=3usize {
            for r in 0..=8u32 {
                let q = build_step_hyperbolic_cross(r, d).unwrap();
                let mut total = 0usize;
                let mut seen = std::collections::HashSet::new();
                let mut s = vec![0u32; d];
                loop {
                    if s.iter().sum::<u32>() <= r {
                        let block = build_dyadic_block(&s).unwrap();
                        total += block.len();
                        for k in block.iter() {
                            assert!(seen.insert(k.clone()), "blocks overlap at {k:?}");
                            assert!(q.contains(k));
                        }
                    }
                    // odometer over s in [0, r]^d
                    let mut axis = 0;
                    loop {
                        if axis == d {
                            break;
                        }
                        s[axis] += 1;
                        if s[axis] > r {
                            s[axis] = 0;
                            axis += 1;
                        } else {
                            break;
                        }
                    }
                    if axis == d {
                        break;
                    }
                }
                assert_eq!(total, q.len(), "d={d}, r={r}");
            }
        }
    }

    #[test]
    fn nesting_in_hyperbolic_cross() {
        for r in 0..=6u32 {
            let q = build_step_hyperbolic_cross(r, 2).unwrap();
            let gamma = build_hyperbolic_cross(1 << r, 2).unwrap();
            for k in q.iter() {
                assert!(gamma.contains(k));
            }
        }
        let r = build_rectangle(&[3, 4]).unwrap();
        let gamma = build_hyperbolic_cross(12, 2).unwrap();
        for k in r.iter() {
            assert!(gamma.contains(k));
        }
    }

    #[test]
    fn difference_set_examples() {
        let zero = build_explicit(vec![fi(&[0])], 1).unwrap();
        assert_eq!(difference_set(&zero).members(), &[fi(&[0])]);

        let interval = build_rectangle(&[2]).unwrap(); // {-1, 0, 1}
        let diff = difference_set(&interval);
        assert_eq!(diff.len(), 5);
        assert!(diff.contains(&fi(&[2])) && diff.contains(&fi(&[-2])));

        let r22 = build_rectangle(&[2, 2]).unwrap();
        let diff = difference_set(&r22);
        assert_eq!(diff.len(), 25);
        for k in diff.iter() {
            assert!(k.coords().iter().all(|&c| c.abs() <= 2));
        }
    }

    #[test]
    fn serializes_to_array_of_vectors() {
        let s = build_dyadic_block(&[1]).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[[-1],[1]]");
    }

    proptest! {
        #[test]
        fn membership_matches_iteration(n in 1u64..12, dim in 1usize..3, r in 0u32..6) {
            for set in [
                build_hyperbolic_cross(n, dim).unwrap(),
                build_step_hyperbolic_cross(r, dim).unwrap(),
            ] {
                // every enumerated member is contained and unique
                let mut seen = std::collections::HashSet::new();
                for k in set.iter() {
                    prop_assert!(set.contains(k));
                    prop_assert!(seen.insert(k.clone()));
                }
                // every contained vector in the enclosing box is enumerated
                let bound = (n as i64).max(1 << r);
                let mut cur = vec![0i64; dim];
                let mut stack = vec![];
                fn rec(
                    bound: i64,
                    axis: usize,
                    cur: &mut Vec<i64>,
                    set: &FreqSet,
                    seen: &std::collections::HashSet<FreqIndex>,
                    _stack: &mut Vec<()>,
                ) -> std::result::Result<(), TestCaseError> {
                    if axis == cur.len() {
                        let k = FreqIndex::new(cur.clone());
                        prop_assert_eq!(set.contains(&k), seen.contains(&k));
                        return Ok(());
                    }
                    for c in -bound..=bound {
                        cur[axis] = c;
                        rec(bound, axis + 1, cur, set, seen, _stack)?;
                    }
                    Ok(())
                }
                if bound <= 16 {
                    rec(bound, 0, &mut cur, &set, &seen, &mut stack)?;
                }
            }
        }

        #[test]
        fn built_in_sets_are_centrally_symmetric(n in 1u64..20, r in 0u32..7, j1 in 1u64..6, j2 in 1u64..6) {
            for set in [
                build_hyperbolic_cross(n, 2).unwrap(),
                build_step_hyperbolic_cross(r, 2).unwrap(),
                build_rectangle(&[j1, j2]).unwrap(),
            ] {
                for k in set.iter() {
                    prop_assert!(set.contains(&k.neg()));
                }
            }
        }

        #[test]
        fn rectangle_difference_bound(j1 in 1u64..6, j2 in 1u64..6) {
            let r = build_rectangle(&[j1, j2]).unwrap();
            let diff = difference_set(&r);
            for k in diff.iter() {
                prop_assert!(k[0].unsigned_abs() <= 2 * j1 - 2);
                prop_assert!(k[1].unsigned_abs() <= 2 * j2 - 2);
            }
        }
    }
}
