//! Finite algebras on the universe `{0, .., n-1}`.
//!
//! Operation tables are row-major: the entry for `(a_1, .., a_k)` lives at
//! index `a_1 * n^(k-1) + .. + a_k`. Products use the same mixed-radix
//! convention for their universes (first factor most significant), see
//! [`ProductCodec`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::closure::PowerSpace;
use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl Operation {
    /// Table index of an argument tuple for a universe of size `n`.
    #[inline]
    pub fn index_of(n: usize, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * n + a)
    }

    #[inline]
    pub(crate) fn apply(&self, n: usize, args: &[usize]) -> usize {
        self.table[Self::index_of(n, args)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    ops: Vec<Operation>,
    /// Factor sizes when the algebra was built as a product.
    factors: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    name: String,
    size: usize,
    operations: Vec<Operation>,
}

impl FiniteAlgebra {
    pub fn new(name: impl Into<String>, size: usize, ops: Vec<Operation>) -> Result<Self> {
        if size == 0 {
            return Err(Error::Invalid("algebra universe must be non-empty".into()));
        }
        for op in &ops {
            let expected = size
                .checked_pow(op.arity as u32)
                .ok_or_else(|| Error::ResourceCap { what: format!("table of `{}`", op.name), cap: usize::MAX })?;
            if op.table.len() != expected {
                return Err(Error::Invalid(format!(
                    "operation `{}` of arity {} needs {} table entries, found {}",
                    op.name,
                    op.arity,
                    expected,
                    op.table.len()
                )));
            }
            if let Some(&bad) = op.table.iter().find(|&&v| v >= size) {
                return Err(Error::OutOfRange { value: bad, size });
            }
        }
        Ok(FiniteAlgebra { name: name.into(), size, ops, factors: Vec::new() })
    }

    /// Builds an operation table from a function of the argument tuple.
    pub fn op_from_fn(name: &str, size: usize, arity: usize, mut f: impl FnMut(&[usize]) -> usize) -> Operation {
        let mut table = Vec::with_capacity(size.pow(arity as u32));
        let mut args = vec![0; arity];
        for idx in 0..size.pow(arity as u32) {
            let mut rest = idx;
            for slot in args.iter_mut().rev() {
                *slot = rest % size;
                rest /= size;
            }
            table.push(f(&args));
        }
        Operation { name: name.to_string(), arity, table }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn factor_sizes(&self) -> &[usize] {
        &self.factors
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    /// Same operation names, order and arities.
    pub fn same_signature(&self, other: &FiniteAlgebra) -> bool {
        self.ops.len() == other.ops.len()
            && self.ops.iter().zip(&other.ops).all(|(x, y)| x.name == y.name && x.arity == y.arity)
    }

    pub(crate) fn require_same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.same_signature(other) {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!("`{}` and `{}`", self.name, other.name)))
        }
    }

    pub fn signature(&self) -> Vec<(String, usize)> {
        self.ops.iter().map(|o| (o.name.clone(), o.arity)).collect()
    }

    pub fn eval_op(&self, op_index: usize, args: &[usize]) -> Result<usize> {
        let op = self
            .ops
            .get(op_index)
            .ok_or_else(|| Error::Invalid(format!("no operation with index {op_index}")))?;
        if args.len() != op.arity {
            return Err(Error::ArityMismatch { op: op.name.clone(), expected: op.arity, got: args.len() });
        }
        if let Some(&bad) = args.iter().find(|&&a| a >= self.size) {
            return Err(Error::OutOfRange { value: bad, size: self.size });
        }
        Ok(op.apply(self.size, args))
    }

    pub(crate) fn check_elements(&self, elems: &[usize]) -> Result<()> {
        match elems.iter().find(|&&a| a >= self.size) {
            Some(&bad) => Err(Error::OutOfRange { value: bad, size: self.size }),
            None => Ok(()),
        }
    }

    /// Least subuniverse containing `seed`, sorted ascending.
    pub fn sg(&self, seed: &[usize]) -> Result<Vec<usize>> {
        self.check_elements(seed)?;
        let space = PowerSpace::new(vec![self])?;
        let closed = space.closure(seed.iter().copied());
        let mut out = closed.indices().to_vec();
        out.sort_unstable();
        Ok(out)
    }

    pub fn is_subuniverse(&self, set: &[usize]) -> Result<bool> {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Ok(self.sg(&sorted)? == sorted)
    }

    /// Direct product with componentwise operations.
    pub fn product(algs: &[&FiniteAlgebra]) -> Result<FiniteAlgebra> {
        Self::product_with(algs, &Limits::DEFAULT)
    }

    pub fn product_with(algs: &[&FiniteAlgebra], limits: &Limits) -> Result<FiniteAlgebra> {
        let first = algs.first().ok_or_else(|| Error::Invalid("empty product".into()))?;
        for a in &algs[1..] {
            first.require_same_signature(a)?;
        }
        let codec = ProductCodec::new(algs.iter().map(|a| a.size).collect());
        let size = codec.total();
        let mut ops = Vec::with_capacity(first.ops.len());
        for (oi, op) in first.ops.iter().enumerate() {
            let entries = size.checked_pow(op.arity as u32).filter(|&e| e <= limits.max_table_entries);
            let Some(_) = entries else {
                return Err(Error::ResourceCap {
                    what: format!("product table for `{}`", op.name),
                    cap: limits.max_table_entries,
                });
            };
            let k = op.arity;
            let mut coords = vec![vec![0usize; algs.len()]; k];
            let built = Self::op_from_fn(&op.name, size, k, |args| {
                for (slot, &a) in coords.iter_mut().zip(args) {
                    codec.decode_into(a, slot);
                }
                let mut out = vec![0usize; algs.len()];
                let mut factor_args = vec![0usize; k];
                for (f, alg) in algs.iter().enumerate() {
                    for q in 0..k {
                        factor_args[q] = coords[q][f];
                    }
                    out[f] = alg.ops[oi].apply(alg.size, &factor_args);
                }
                codec.encode(&out)
            });
            ops.push(built);
        }
        let name = algs.iter().map(|a| a.name.as_str()).collect::<Vec<_>>().join("x");
        let mut alg = FiniteAlgebra::new(name, size, ops)?;
        alg.factors = codec.radix.clone();
        Ok(alg)
    }

    /// Quotient by a congruence; classes are ordered by least element.
    pub fn quotient(&self, theta: &Congruence) -> Result<(FiniteAlgebra, ElementMap)> {
        if theta.size() != self.size {
            return Err(Error::NotCongruence(format!(
                "partition on {} elements for algebra of size {}",
                theta.size(),
                self.size
            )));
        }
        if let Some(w) = theta.compatibility_witness(self) {
            return Err(Error::NotCongruence(w));
        }
        let reps = theta.representatives();
        let mut class_index = vec![0usize; self.size];
        for a in 0..self.size {
            class_index[a] = reps.binary_search(&theta.repr(a)).expect("representative");
        }
        let m = reps.len();
        let ops = self
            .ops
            .iter()
            .map(|op| {
                Self::op_from_fn(&op.name, m, op.arity, |args| {
                    let lifted: Vec<usize> = args.iter().map(|&c| reps[c]).collect();
                    class_index[op.apply(self.size, &lifted)]
                })
            })
            .collect();
        let q = FiniteAlgebra::new(format!("{}/{}", self.name, theta), m, ops)?;
        let map = ElementMap::new(self.size, m, class_index)?;
        Ok((q, map))
    }

    /// Induced subalgebra on a closed set, with its embedding. Elements keep
    /// their natural order.
    pub fn subalgebra(&self, closed: &[usize]) -> Result<(FiniteAlgebra, ElementMap)> {
        let mut set = closed.to_vec();
        set.sort_unstable();
        set.dedup();
        if set.is_empty() {
            return Err(Error::Invalid("subalgebra of the empty set".into()));
        }
        self.check_elements(&set)?;
        if self.sg(&set)? != set {
            return Err(Error::NotClosed(format!("{set:?} in `{}`", self.name)));
        }
        let mut pos = vec![usize::MAX; self.size];
        for (i, &a) in set.iter().enumerate() {
            pos[a] = i;
        }
        let m = set.len();
        let ops = self
            .ops
            .iter()
            .map(|op| {
                Self::op_from_fn(&op.name, m, op.arity, |args| {
                    let lifted: Vec<usize> = args.iter().map(|&i| set[i]).collect();
                    pos[op.apply(self.size, &lifted)]
                })
            })
            .collect();
        let sub = FiniteAlgebra::new(format!("sub({})", self.name), m, ops)?;
        let emb = ElementMap::new(m, self.size, set)?;
        Ok((sub, emb))
    }

    /// All unary polynomial operations, each as its value vector.
    ///
    /// Computed as the subuniverse of `A^A` generated by the identity and the
    /// constant maps; sorted lexicographically.
    pub fn pol1(&self) -> Result<Vec<Vec<usize>>> {
        self.pol1_with(&Limits::DEFAULT)
    }

    pub fn pol1_with(&self, limits: &Limits) -> Result<Vec<Vec<usize>>> {
        let n = self.size;
        let factors = vec![self; n];
        let space = PowerSpace::new_with(factors, limits)?;
        let mut seeds = vec![space.encode(&(0..n).collect::<Vec<_>>())];
        for c in 0..n {
            seeds.push(space.encode(&vec![c; n]));
        }
        let cap = limits.pol1_cap;
        let mut count = 0usize;
        let closed = space
            .closure_guarded(seeds, |_| {
                count += 1;
                count <= cap
            })
            .map_err(|_| Error::ResourceCap { what: "unary polynomials".into(), cap })?;
        let mut maps: Vec<Vec<usize>> = closed.indices().iter().map(|&i| space.decode(i)).collect();
        maps.sort();
        Ok(maps)
    }

    /// A small generating set, built greedily from the least element not yet
    /// generated.
    pub fn generating_set(&self) -> Vec<usize> {
        let space = PowerSpace::new(vec![self]).expect("single factor space");
        let mut gens = Vec::new();
        let mut closed = space.closure(std::iter::empty());
        while closed.len() < self.size {
            let next = (0..self.size).find(|&a| !closed.contains(a)).expect("missing element");
            gens.push(next);
            closed = space.closure(gens.iter().copied());
        }
        gens
    }

    /// An isomorphism `self -> other`, if one exists.
    ///
    /// Backtracks over images of a generating set of `self`, trying the
    /// smallest image first; each partial assignment is extended through the
    /// subalgebra it generates in `self x other` and rejected as soon as that
    /// graph stops being an injective function.
    pub fn find_isomorphism(&self, other: &FiniteAlgebra) -> Result<Option<ElementMap>> {
        self.require_same_signature(other)?;
        if self.size != other.size {
            return Ok(None);
        }
        let gens = self.generating_set();
        let space = PowerSpace::new(vec![self, other])?;
        let mut images = Vec::with_capacity(gens.len());
        Ok(self.iso_search(&space, &gens, &mut images))
    }

    fn iso_search(
        &self,
        space: &PowerSpace<'_>,
        gens: &[usize],
        images: &mut Vec<usize>,
    ) -> Option<ElementMap> {
        let n = self.size;
        // Generated graph must stay a partial injective function.
        let mut fwd = vec![usize::MAX; n];
        let mut bwd = vec![usize::MAX; n];
        let seeds: Vec<usize> = gens.iter().zip(images.iter()).map(|(&g, &h)| space.encode(&[g, h])).collect();
        let graph = space.closure_guarded(seeds, |c| {
            let (a, b) = (c[0], c[1]);
            if fwd[a] == usize::MAX && bwd[b] == usize::MAX {
                fwd[a] = b;
                bwd[b] = a;
                true
            } else {
                fwd[a] == b && bwd[b] == a
            }
        });
        let graph = graph.ok()?;
        if images.len() == gens.len() {
            if graph.len() == n {
                return ElementMap::new(n, n, fwd).ok();
            }
            return None;
        }
        for cand in 0..n {
            images.push(cand);
            if let Some(found) = self.iso_search(space, gens, images) {
                return Some(found);
            }
            images.pop();
        }
        None
    }

    pub fn to_json(&self) -> String {
        let file = AlgebraFile { name: self.name.clone(), size: self.size, operations: self.ops.clone() };
        serde_json::to_string(&file).expect("algebra serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        FiniteAlgebra::new(file.name, file.size, file.operations)
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (size {}; ", self.name, self.size)?;
        let sig: Vec<String> = self.ops.iter().map(|o| format!("{}/{}", o.name, o.arity)).collect();
        write!(f, "{})", sig.join(", "))
    }
}

/// Mixed-radix codec for tuples; the first coordinate is most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductCodec {
    radix: Vec<usize>,
}

impl ProductCodec {
    pub fn new(radix: Vec<usize>) -> Self {
        ProductCodec { radix }
    }

    pub fn radix(&self) -> &[usize] {
        &self.radix
    }

    pub fn total(&self) -> usize {
        self.radix.iter().product()
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.radix).fold(0, |acc, (&c, &r)| acc * r + c)
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [usize]) {
        for (slot, &r) in out.iter_mut().zip(&self.radix).rev() {
            *slot = index % r;
            index /= r;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.radix.len()];
        self.decode_into(index, &mut out);
        out
    }
}

/// A total map between two finite universes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ElementMap {
    dom_size: usize,
    cod_size: usize,
    values: Vec<usize>,
}

impl ElementMap {
    pub fn new(dom_size: usize, cod_size: usize, values: Vec<usize>) -> Result<Self> {
        if values.len() != dom_size {
            return Err(Error::Invalid(format!("map needs {dom_size} values, got {}", values.len())));
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= cod_size) {
            return Err(Error::OutOfRange { value: bad, size: cod_size });
        }
        Ok(ElementMap { dom_size, cod_size, values })
    }

    pub fn identity(n: usize) -> Self {
        ElementMap { dom_size: n, cod_size: n, values: (0..n).collect() }
    }

    pub fn dom_size(&self) -> usize {
        self.dom_size
    }

    pub fn cod_size(&self) -> usize {
        self.cod_size
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.values[a]
    }

    pub fn is_bijective(&self) -> bool {
        if self.dom_size != self.cod_size {
            return false;
        }
        let mut seen = vec![false; self.cod_size];
        self.values.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod_size];
        for &v in &self.values {
            seen[v] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn inverse(&self) -> Option<ElementMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.dom_size];
        for (a, &b) in self.values.iter().enumerate() {
            inv[b] = a;
        }
        Some(ElementMap { dom_size: self.cod_size, cod_size: self.dom_size, values: inv })
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &ElementMap) -> Result<ElementMap> {
        if self.cod_size != other.dom_size {
            return Err(Error::Invalid("maps do not compose".into()));
        }
        Ok(ElementMap {
            dom_size: self.dom_size,
            cod_size: other.cod_size,
            values: self.values.iter().map(|&v| other.values[v]).collect(),
        })
    }

    /// True iff the map commutes with every operation of `dom` and `cod`.
    pub fn is_homomorphism(&self, dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> bool {
        if !dom.same_signature(cod) || dom.size() != self.dom_size || cod.size() != self.cod_size {
            return false;
        }
        let n = dom.size();
        dom.ops.iter().zip(&cod.ops).all(|(f, g)| {
            let mut args = vec![0; f.arity];
            (0..f.table.len()).all(|idx| {
                let mut rest = idx;
                for slot in args.iter_mut().rev() {
                    *slot = rest % n;
                    rest /= n;
                }
                let image: Vec<usize> = args.iter().map(|&a| self.values[a]).collect();
                self.values[f.table[idx]] == g.apply(cod.size(), &image)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn eval_op_examples() {
        let z2 = builtin::z2aff();
        let z4 = builtin::z4aff();
        let s2 = builtin::s2();
        let p = z2.op_index("p").unwrap();
        assert_eq!(z2.eval_op(p, &[1, 1, 1]).unwrap(), 1);
        // 3 - 1 + 2 mod 4
        assert_eq!(z4.eval_op(p, &[3, 1, 2]).unwrap(), (3 + 4 - 1 + 2) % 4);
        let meet = s2.op_index("m").unwrap();
        assert_eq!(s2.eval_op(meet, &[0, 1]).unwrap(), 0);
    }

    #[test]
    fn eval_op_errors() {
        let z2 = builtin::z2aff();
        assert!(matches!(z2.eval_op(0, &[0, 1]), Err(Error::ArityMismatch { .. })));
        assert!(matches!(z2.eval_op(0, &[0, 1, 2]), Err(Error::OutOfRange { value: 2, size: 2 })));
        assert!(z2.eval_op(9, &[0]).is_err());
    }

    #[test]
    fn sg_examples() {
        let z3 = builtin::z3aff();
        assert_eq!(z3.sg(&[1]).unwrap(), vec![1]);

        let s2 = builtin::s2();
        let s2sq = FiniteAlgebra::product(&[&s2, &s2]).unwrap();
        let codec = ProductCodec::new(vec![2, 2]);
        let seed = [codec.encode(&[0, 1]), codec.encode(&[1, 0])];
        let mut expect = vec![codec.encode(&[0, 1]), codec.encode(&[1, 0]), codec.encode(&[0, 0])];
        expect.sort();
        assert_eq!(s2sq.sg(&seed).unwrap(), expect);

        let z2 = builtin::z2aff();
        let z2sq = FiniteAlgebra::product(&[&z2, &z2]).unwrap();
        let seed = [codec.encode(&[0, 0]), codec.encode(&[1, 1]), codec.encode(&[0, 1])];
        assert_eq!(z2sq.sg(&seed).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn sg_of_empty_seed_is_constants() {
        let c = FiniteAlgebra::new(
            "pointed",
            3,
            vec![Operation { name: "c".into(), arity: 0, table: vec![2] }, FiniteAlgebra::op_from_fn("s", 3, 2, |a| a[0].max(a[1]))],
        )
        .unwrap();
        assert_eq!(c.sg(&[]).unwrap(), vec![2]);
        assert_eq!(builtin::z2aff().sg(&[]).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn product_sizes() {
        let z2 = builtin::z2aff();
        assert_eq!(FiniteAlgebra::product(&[&z2, &z2]).unwrap().size(), 4);
        let s2 = builtin::s2();
        let single = FiniteAlgebra::product(&[&s2]).unwrap();
        assert_eq!(single.ops(), s2.ops());
        let four = FiniteAlgebra::product(&[&z2, &z2, &z2, &z2]).unwrap();
        assert_eq!(four.size(), 16);
        assert_eq!(four.factor_sizes(), &[2, 2, 2, 2]);
        assert!(FiniteAlgebra::product(&[&z2, &builtin::semilattice_groupoid(2)]).is_err());
    }

    #[test]
    fn quotient_examples() {
        let z4 = builtin::z4aff();
        let eta = Congruence::parse("|0 2|1 3|").unwrap();
        let (q, map) = z4.quotient(&eta).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(map.values(), &[0, 1, 0, 1]);
        // classes {0,2} -> 0, {1,3} -> 1; induced p is x - y + z mod 2
        let p = q.op_index("p").unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    assert_eq!(q.eval_op(p, &[x, y, z]).unwrap(), (x + y + z) % 2);
                }
            }
        }
        assert!(z4.quotient(&Congruence::zero(4)).unwrap().0.find_isomorphism(&z4).unwrap().is_some());
        assert_eq!(z4.quotient(&Congruence::one(4)).unwrap().0.size(), 1);
        let bad = Congruence::parse("|0 1|2|3|").unwrap();
        assert!(matches!(z4.quotient(&bad), Err(Error::NotCongruence(_))));
    }

    #[test]
    fn subalgebra_examples() {
        let codec = ProductCodec::new(vec![2, 2]);
        let z2 = builtin::z2aff();
        let z2sq = FiniteAlgebra::product(&[&z2, &z2]).unwrap();
        let diag = [codec.encode(&[0, 0]), codec.encode(&[1, 1])];
        let (d, emb) = z2sq.subalgebra(&diag).unwrap();
        assert_eq!(d.size(), 2);
        assert_eq!(emb.values(), &[0, 3]);
        assert!(d.find_isomorphism(&z2).unwrap().is_some());

        let s2 = builtin::s2();
        let s2sq = FiniteAlgebra::product(&[&s2, &s2]).unwrap();
        let order = [codec.encode(&[0, 0]), codec.encode(&[0, 1]), codec.encode(&[1, 1])];
        assert_eq!(s2sq.subalgebra(&order).unwrap().0.size(), 3);
        let (whole, _) = s2.subalgebra(&[0, 1]).unwrap();
        assert_eq!(whole.ops(), s2.ops());
        assert!(matches!(z2sq.subalgebra(&[0, 3, 1]), Err(Error::NotClosed(_))));
    }

    #[test]
    fn pol1_examples() {
        assert_eq!(builtin::s2().pol1().unwrap(), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(
            builtin::z2aff().pol1().unwrap(),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(builtin::trivial().pol1().unwrap(), vec![vec![0]]);
    }

    #[test]
    fn pol1_cap_is_an_error() {
        let limits = Limits { pol1_cap: 3, ..Limits::DEFAULT };
        assert!(matches!(builtin::z2aff().pol1_with(&limits), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn isomorphism_examples() {
        let z2 = builtin::z2aff();
        assert_eq!(z2.find_isomorphism(&z2).unwrap(), Some(ElementMap::identity(2)));
        assert_eq!(z2.find_isomorphism(&builtin::s2()).unwrap(), None);

        let z4 = builtin::z4aff();
        let shifted = relabel(&z4, &[1, 2, 3, 0]);
        let iso = z4.find_isomorphism(&shifted).unwrap().expect("relabeled copy");
        assert!(iso.is_bijective());
        assert!(iso.is_homomorphism(&z4, &shifted));
    }

    /// Transports the operations of `alg` along the bijection `perm`.
    pub(crate) fn relabel(alg: &FiniteAlgebra, perm: &[usize]) -> FiniteAlgebra {
        let n = alg.size();
        let mut inv = vec![0; n];
        for (a, &b) in perm.iter().enumerate() {
            inv[b] = a;
        }
        let ops = alg
            .ops()
            .iter()
            .map(|op| {
                FiniteAlgebra::op_from_fn(&op.name, n, op.arity, |args| {
                    let pre: Vec<usize> = args.iter().map(|&b| inv[b]).collect();
                    perm[op.apply(n, &pre)]
                })
            })
            .collect();
        FiniteAlgebra::new(format!("{}'", alg.name()), n, ops).unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        for alg in builtin::all() {
            let text = alg.to_json();
            let back = FiniteAlgebra::from_json(&text).unwrap();
            assert_eq!(back.to_json(), text);
            assert_eq!(back.ops(), alg.ops());
        }
        assert!(FiniteAlgebra::from_json(r#"{"name":"x","size":2,"operations":[{"name":"f","arity":1,"table":[0,2]}]}"#).is_err());
    }
}
