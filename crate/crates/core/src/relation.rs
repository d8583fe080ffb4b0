//! Dense binary relations `R ⊆ A x B` and quaternary relations
//! `T ⊆ A x A x B x B`.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::congruence::Congruence;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinRel {
    nl: usize,
    nr: usize,
    bits: FixedBitSet,
}

impl BinRel {
    pub fn empty(nl: usize, nr: usize) -> Self {
        BinRel { nl, nr, bits: FixedBitSet::with_capacity(nl * nr) }
    }

    pub fn full(nl: usize, nr: usize) -> Self {
        let mut r = Self::empty(nl, nr);
        r.bits.insert_range(..);
        r
    }

    pub fn diagonal(n: usize) -> Self {
        let mut r = Self::empty(n, n);
        for a in 0..n {
            r.insert(a, a);
        }
        r
    }

    pub fn from_pairs(nl: usize, nr: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut r = Self::empty(nl, nr);
        for (a, b) in pairs {
            if a >= nl {
                return Err(Error::OutOfRange { value: a, size: nl });
            }
            if b >= nr {
                return Err(Error::OutOfRange { value: b, size: nr });
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    pub fn from_congruence(theta: &Congruence) -> Self {
        let n = theta.size();
        let mut r = Self::empty(n, n);
        for a in 0..n {
            for b in 0..n {
                if theta.related(a, b) {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    /// Builds a relation from a bit set over pair indices `a * nr + b`.
    pub fn from_bits(nl: usize, nr: usize, bits: FixedBitSet) -> Self {
        let mut bits = bits;
        bits.grow(nl * nr);
        BinRel { nl, nr, bits }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nl, self.nr)
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.nr + b
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits.contains(a * self.nr + b)
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.bits.insert(a * self.nr + b);
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.ones().map(move |i| (i / self.nr, i % self.nr))
    }

    pub fn is_subset(&self, other: &BinRel) -> bool {
        self.dims() == other.dims() && self.bits.is_subset(&other.bits)
    }

    pub fn union(&self, other: &BinRel) -> BinRel {
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn intersection(&self, other: &BinRel) -> BinRel {
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn difference(&self, other: &BinRel) -> BinRel {
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    pub fn inverse(&self) -> BinRel {
        let mut out = BinRel::empty(self.nr, self.nl);
        for (a, b) in self.pairs() {
            out.insert(b, a);
        }
        out
    }

    /// Relational product `self ∘ other = {(a,c) : ∃b (a,b) ∈ self, (b,c) ∈ other}`.
    pub fn compose(&self, other: &BinRel) -> Result<BinRel> {
        if self.nr != other.nl {
            return Err(Error::Invalid("relations do not compose".into()));
        }
        let mut out = BinRel::empty(self.nl, other.nr);
        for (a, b) in self.pairs() {
            let row = b * other.nr;
            for c in 0..other.nr {
                if other.bits.contains(row + c) {
                    out.insert(a, c);
                }
            }
        }
        Ok(out)
    }

    pub fn is_reflexive(&self) -> bool {
        self.nl == self.nr && (0..self.nl).all(|a| self.contains(a, a))
    }

    pub fn is_symmetric(&self) -> bool {
        self.nl == self.nr && self.pairs().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        self.nl == self.nr && self.compose(self).map(|c| c.is_subset(self)).unwrap_or(false)
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    pub fn transitive_closure(&self) -> BinRel {
        let mut cur = self.clone();
        loop {
            let next = cur.union(&cur.compose(&cur).expect("square relation"));
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// The partition of an equivalence relation.
    pub fn to_congruence(&self) -> Option<Congruence> {
        if !self.is_equivalence() {
            return None;
        }
        let repr = (0..self.nl).map(|a| (0..=a).find(|&b| self.contains(a, b)).expect("reflexive")).collect();
        Congruence::from_repr(repr).ok()
    }

    pub fn parse(text: &str, nl: usize, nr: usize) -> Result<BinRel> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pairs = Vec::new();
        if !cleaned.is_empty() {
            let inner = cleaned
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("relation `{text}` must look like (a,b),(c,d)")))?;
            for item in inner.split("),(") {
                let (a, b) = item
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bad pair `{item}`")))?;
                let a: usize = a.parse().map_err(|_| Error::Parse(format!("bad element `{a}`")))?;
                let b: usize = b.parse().map_err(|_| Error::Parse(format!("bad element `{b}`")))?;
                pairs.push((a, b));
            }
        }
        BinRel::from_pairs(nl, nr, pairs)
    }
}

impl fmt::Display for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().map(|(a, b)| format!("({a},{b})")).collect();
        f.write_str(&parts.join(","))
    }
}

impl fmt::Debug for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinRel[{}x{}]{{{}}}", self.nl, self.nr, self)
    }
}

pub type Quad = [usize; 4];

/// A subset of `A x A x B x B`, indexed by `((a1*na + a2)*nb + b1)*nb + b2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadRel {
    na: usize,
    nb: usize,
    bits: FixedBitSet,
}

impl QuadRel {
    pub fn empty(na: usize, nb: usize) -> Self {
        QuadRel { na, nb, bits: FixedBitSet::with_capacity(na * na * nb * nb) }
    }

    pub fn full(na: usize, nb: usize) -> Self {
        let mut t = Self::empty(na, nb);
        t.bits.insert_range(..);
        t
    }

    pub fn from_bits(na: usize, nb: usize, bits: FixedBitSet) -> Self {
        let mut bits = bits;
        bits.grow(na * na * nb * nb);
        QuadRel { na, nb, bits }
    }

    pub fn from_quads(na: usize, nb: usize, quads: impl IntoIterator<Item = Quad>) -> Result<Self> {
        let mut t = Self::empty(na, nb);
        for q in quads {
            for (i, &v) in q.iter().enumerate() {
                let n = if i < 2 { na } else { nb };
                if v >= n {
                    return Err(Error::OutOfRange { value: v, size: n });
                }
            }
            t.insert(q);
        }
        Ok(t)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.na, self.nb)
    }

    #[inline]
    pub fn index(&self, q: Quad) -> usize {
        ((q[0] * self.na + q[1]) * self.nb + q[2]) * self.nb + q[3]
    }

    #[inline]
    pub fn decode(&self, i: usize) -> Quad {
        let b2 = i % self.nb;
        let r = i / self.nb;
        let b1 = r % self.nb;
        let r = r / self.nb;
        [r / self.na, r % self.na, b1, b2]
    }

    #[inline]
    pub fn contains(&self, q: Quad) -> bool {
        self.bits.contains(self.index(q))
    }

    pub fn insert(&mut self, q: Quad) {
        let i = self.index(q);
        self.bits.insert(i);
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Quadruples in lexicographic order.
    pub fn quads(&self) -> impl Iterator<Item = Quad> + '_ {
        self.bits.ones().map(move |i| self.decode(i))
    }

    pub fn is_subset(&self, other: &QuadRel) -> bool {
        self.dims() == other.dims() && self.bits.is_subset(&other.bits)
    }

    pub fn union(&self, other: &QuadRel) -> QuadRel {
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn intersection(&self, other: &QuadRel) -> QuadRel {
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn pr12(&self) -> BinRel {
        let mut r = BinRel::empty(self.na, self.na);
        for q in self.quads() {
            r.insert(q[0], q[1]);
        }
        r
    }

    pub fn pr34(&self) -> BinRel {
        let mut r = BinRel::empty(self.nb, self.nb);
        for q in self.quads() {
            r.insert(q[2], q[3]);
        }
        r
    }

    /// `{(a,b) : (a,a,b,b) ∈ T}`.
    pub fn trace(&self) -> BinRel {
        let mut r = BinRel::empty(self.na, self.nb);
        for a in 0..self.na {
            for b in 0..self.nb {
                if self.contains([a, a, b, b]) {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    pub fn converse(&self) -> QuadRel {
        let mut out = QuadRel::empty(self.nb, self.na);
        for [a1, a2, b1, b2] in self.quads() {
            out.insert([b1, b2, a1, a2]);
        }
        out
    }

    /// `{(a1,a2,c1,c2) : ∃ b1,b2. (a1,a2,b1,b2) ∈ self, (b1,b2,c1,c2) ∈ other}`.
    pub fn compose(&self, other: &QuadRel) -> Result<QuadRel> {
        if self.nb != other.na {
            return Err(Error::Invalid("bridges do not share a middle algebra".into()));
        }
        let nb2 = self.nb * self.nb;
        let nc2 = other.nb * other.nb;
        // Left pair -> set of middle pairs; middle pair -> bits of right pairs.
        let mut right_of_mid = vec![FixedBitSet::with_capacity(nc2); nb2];
        for i in other.bits.ones() {
            right_of_mid[i / nc2].insert(i % nc2);
        }
        let mut out = QuadRel::empty(self.na, other.nb);
        for i in self.bits.ones() {
            let left = i / nb2;
            let mid = i % nb2;
            for r in right_of_mid[mid].ones() {
                out.bits.insert(left * nc2 + r);
            }
        }
        Ok(out)
    }

    /// First quadruple outside `other`, if any.
    pub fn first_not_in(&self, other: &QuadRel) -> Option<Quad> {
        self.bits.ones().find(|&i| !other.bits.contains(i)).map(|i| self.decode(i))
    }
}

impl fmt::Debug for QuadRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.quads().map(|q| format!("{q:?}")).collect();
        write!(f, "QuadRel[{}x{}]{{{}}}", self.na, self.nb, qs.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_and_parse() {
        let r = BinRel::from_pairs(4, 4, [(2, 3), (0, 1)]).unwrap();
        assert_eq!(r.to_string(), "(0,1),(2,3)");
        assert_eq!(BinRel::parse("(0,1), (2,3)", 4, 4).unwrap(), r);
        assert_eq!(BinRel::parse("", 2, 2).unwrap(), BinRel::empty(2, 2));
        assert!(BinRel::parse("(0,5)", 4, 4).is_err());
        assert!(BinRel::parse("0,1", 4, 4).is_err());
    }

    #[test]
    fn quad_index_is_lexicographic() {
        let t = QuadRel::full(2, 3);
        let qs: Vec<Quad> = t.quads().collect();
        let mut sorted = qs.clone();
        sorted.sort();
        assert_eq!(qs, sorted);
        assert_eq!(qs.len(), 36);
        for (i, q) in qs.iter().enumerate() {
            assert_eq!(t.index(*q), i);
        }
    }

    fn rel(n: usize) -> impl Strategy<Value = BinRel> {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |v| {
            BinRel::from_pairs(n, n, v.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| (i / n, i % n))).unwrap()
        })
    }

    fn quad(na: usize, nb: usize) -> impl Strategy<Value = QuadRel> {
        proptest::collection::vec(proptest::bool::weighted(0.2), na * na * nb * nb).prop_map(move |v| {
            let mut bits = FixedBitSet::with_capacity(v.len());
            for (i, &b) in v.iter().enumerate() {
                bits.set(i, b);
            }
            QuadRel::from_bits(na, nb, bits)
        })
    }

    proptest! {
        #[test]
        fn composition_is_associative(a in rel(3), b in rel(3), c in rel(3)) {
            prop_assert_eq!(a.compose(&b).unwrap().compose(&c).unwrap(), a.compose(&b.compose(&c).unwrap()).unwrap());
        }

        #[test]
        fn inverse_reverses_composition(a in rel(3), b in rel(3)) {
            prop_assert_eq!(a.compose(&b).unwrap().inverse(), b.inverse().compose(&a.inverse()).unwrap());
        }

        #[test]
        fn transitive_closure_is_transitive(a in rel(4)) {
            let t = a.transitive_closure();
            prop_assert!(a.is_subset(&t));
            prop_assert!(t.is_transitive());
        }

        #[test]
        fn quad_converse_is_involution(t in quad(2, 3)) {
            prop_assert_eq!(t.converse().converse(), t);
        }

        #[test]
        fn quad_compose_matches_definition(t in quad(2, 2), u in quad(2, 2)) {
            let c = t.compose(&u).unwrap();
            for a1 in 0..2 { for a2 in 0..2 { for c1 in 0..2 { for c2 in 0..2 {
                let expect = (0..2).any(|b1| (0..2).any(|b2| t.contains([a1, a2, b1, b2]) && u.contains([b1, b2, c1, c2])));
                prop_assert_eq!(c.contains([a1, a2, c1, c2]), expect);
            }}}}
        }

        #[test]
        fn quad_converse_swaps_projections(t in quad(2, 3)) {
            prop_assert_eq!(t.converse().pr12(), t.pr34());
            prop_assert_eq!(t.converse().trace(), t.trace().inverse());
        }
    }
}
