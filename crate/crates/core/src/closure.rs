//! Subpower closure engine.
//!
//! A [`PowerSpace`] is a product `A_1 x .. x A_m` of algebras in a common
//! signature, optionally with a congruence per coordinate under which closed
//! sets must be stable. Closures are semi-naive: the member at list position
//! `i` is combined only with argument tuples over positions `0..=i` that use
//! position `i` at least once, so every tuple is evaluated exactly once and
//! a closed set can be extended incrementally.

use fixedbitset::FixedBitSet;

use crate::algebra::{FiniteAlgebra, ProductCodec};
use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Class index of each element, and the members of each class.
type Classes = (Vec<usize>, Vec<Vec<usize>>);

#[derive(Clone, Debug)]
pub struct PowerSpace<'a> {
    factors: Vec<&'a FiniteAlgebra>,
    codec: ProductCodec,
    /// For each coordinate, the elements of each class (None: no stability).
    stability: Vec<Option<Classes>>,
    /// Constant tuples contributed by 0-ary operations.
    constants: Vec<usize>,
}

/// A closed subset of a [`PowerSpace`], with members in discovery order.
#[derive(Clone, Debug)]
pub struct ClosedSet {
    bits: FixedBitSet,
    order: Vec<usize>,
    coords: Vec<usize>,
    width: usize,
}

impl ClosedSet {
    pub fn contains(&self, index: usize) -> bool {
        self.bits.contains(index)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Members in discovery order.
    pub fn indices(&self) -> &[usize] {
        &self.order
    }

    pub fn sorted(&self) -> Vec<usize> {
        self.bits.ones().collect()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn coords_of(&self, position: usize) -> &[usize] {
        &self.coords[position * self.width..(position + 1) * self.width]
    }
}

impl<'a> PowerSpace<'a> {
    pub fn new(factors: Vec<&'a FiniteAlgebra>) -> Result<Self> {
        Self::new_with(factors, &Limits::DEFAULT)
    }

    pub fn new_with(factors: Vec<&'a FiniteAlgebra>, limits: &Limits) -> Result<Self> {
        let first = *factors.first().ok_or_else(|| Error::Invalid("empty power space".into()))?;
        for f in &factors[1..] {
            first.require_same_signature(f)?;
        }
        let mut total: usize = 1;
        for f in &factors {
            total = total
                .checked_mul(f.size())
                .filter(|&t| t <= limits.max_power_space)
                .ok_or_else(|| Error::ResourceCap { what: "product space".into(), cap: limits.max_power_space })?;
        }
        let codec = ProductCodec::new(factors.iter().map(|f| f.size()).collect());
        let mut constants = Vec::new();
        for (oi, op) in first.ops().iter().enumerate() {
            if op.arity == 0 {
                let tuple: Vec<usize> = factors.iter().map(|f| f.ops()[oi].table[0]).collect();
                constants.push(codec.encode(&tuple));
            }
        }
        let width = factors.len();
        Ok(PowerSpace { factors, codec, stability: vec![None; width], constants })
    }

    /// Requires closed sets to be stable under `theta` in coordinate `coord`.
    pub fn with_stability(mut self, coord: usize, theta: &Congruence) -> Result<Self> {
        let f = self
            .factors
            .get(coord)
            .ok_or_else(|| Error::Invalid(format!("coordinate {coord} out of range")))?;
        if theta.size() != f.size() {
            return Err(Error::Invalid(format!("congruence size {} for coordinate of size {}", theta.size(), f.size())));
        }
        let classes = theta.class_lists();
        self.stability[coord] = if classes.len() == theta.size() {
            None
        } else {
            let mut class_of = vec![0; theta.size()];
            for (ci, cl) in classes.iter().enumerate() {
                for &a in cl {
                    class_of[a] = ci;
                }
            }
            Some((class_of, classes))
        };
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.factors.len()
    }

    pub fn codec(&self) -> &ProductCodec {
        &self.codec
    }

    pub fn total(&self) -> usize {
        self.codec.total()
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        self.codec.encode(coords)
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        self.codec.decode(index)
    }

    pub fn empty(&self) -> ClosedSet {
        ClosedSet { bits: FixedBitSet::with_capacity(self.total()), order: Vec::new(), coords: Vec::new(), width: self.width() }
    }

    pub fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> ClosedSet {
        self.closure_guarded(seeds, |_| true).expect("unguarded closure")
    }

    /// Closure that calls `guard` on each new member and aborts, returning
    /// the offending coordinates, as soon as it answers false.
    pub fn closure_guarded(
        &self,
        seeds: impl IntoIterator<Item = usize>,
        guard: impl FnMut(&[usize]) -> bool,
    ) -> std::result::Result<ClosedSet, Vec<usize>> {
        let mut set = self.empty();
        let consts = self.constants.clone();
        self.extend_guarded(&mut set, consts.into_iter().chain(seeds), guard)?;
        Ok(set)
    }

    /// Adds `seeds` to an already closed set and recloses it.
    pub fn extend(&self, set: &ClosedSet, seeds: impl IntoIterator<Item = usize>) -> ClosedSet {
        let mut out = set.clone();
        self.extend_guarded(&mut out, seeds, |_| true).expect("unguarded closure");
        out
    }

    /// In-place guarded extension. On abort the set is left partially
    /// closed and must be discarded.
    pub fn extend_guarded(
        &self,
        set: &mut ClosedSet,
        seeds: impl IntoIterator<Item = usize>,
        mut guard: impl FnMut(&[usize]) -> bool,
    ) -> std::result::Result<(), Vec<usize>> {
        let mut processed = set.order.len();
        let mut scratch = vec![0usize; self.width()];
        for s in seeds {
            self.push(set, s, &mut scratch, &mut guard)?;
        }
        let first = self.factors[0];
        let width = self.width();
        let mut positions: Vec<usize> = Vec::new();
        let mut out = vec![0usize; width];
        while processed < set.order.len() {
            let i = processed;
            processed += 1;
            for (oi, op) in first.ops().iter().enumerate() {
                let k = op.arity;
                if k == 0 {
                    continue;
                }
                positions.resize(k, 0);
                // j = first argument slot holding position i.
                for j in 0..k {
                    if j > 0 && i == 0 {
                        break;
                    }
                    for (q, slot) in positions.iter_mut().enumerate() {
                        *slot = if q == j { i } else { 0 };
                    }
                    loop {
                        for (c, o) in out.iter_mut().enumerate() {
                            let fac = self.factors[c];
                            let n = fac.size();
                            let mut idx = 0;
                            for &p in positions.iter() {
                                idx = idx * n + set.coords[p * width + c];
                            }
                            *o = fac.ops()[oi].table[idx];
                        }
                        let enc = self.codec.encode(&out);
                        if !set.bits.contains(enc) {
                            self.push(set, enc, &mut scratch, &mut guard)?;
                        }
                        // Odometer: slots before j range over 0..i, after j over 0..=i.
                        let mut q = k;
                        let done = loop {
                            if q == 0 {
                                break true;
                            }
                            q -= 1;
                            if q == j {
                                continue;
                            }
                            positions[q] += 1;
                            if positions[q] < if q < j { i } else { i + 1 } {
                                break false;
                            }
                            positions[q] = 0;
                        };
                        if done {
                            break;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn push(
        &self,
        set: &mut ClosedSet,
        enc: usize,
        scratch: &mut [usize],
        guard: &mut impl FnMut(&[usize]) -> bool,
    ) -> std::result::Result<(), Vec<usize>> {
        let mut pending = vec![enc];
        while let Some(e) = pending.pop() {
            if set.bits.contains(e) {
                continue;
            }
            self.codec.decode_into(e, scratch);
            if !guard(scratch) {
                return Err(scratch.to_vec());
            }
            set.bits.insert(e);
            set.order.push(e);
            set.coords.extend_from_slice(scratch);
            // Stability: every coordinate may move inside its class.
            for c in 0..self.width() {
                if let Some((class_of, classes)) = &self.stability[c] {
                    let here = scratch[c];
                    for &other in &classes[class_of[here]] {
                        if other != here {
                            let saved = scratch[c];
                            scratch[c] = other;
                            let m = self.codec.encode(scratch);
                            scratch[c] = saved;
                            if !set.bits.contains(m) {
                                pending.push(m);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
