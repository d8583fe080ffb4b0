//! The term-condition centralizer relation.
//!
//! Matrices are stored as quadruples through the fixed encoding
//!
//! ```text
//!   [ a1  a3 ]
//!   [ a2  a4 ]   <->   (a1, a2, a3, a4)
//! ```
//!
//! so the rows are `(a1,a3)` and `(a2,a4)` and the columns are `(a1,a2)` and
//! `(a3,a4)`. `M(θ,φ)` is generated by `(c,d,c,d)` for `(c,d) ∈ θ` (both
//! columns equal to `(c,d)`) and `(a,a,b,b)` for `(a,b) ∈ φ` (both rows equal
//! to `(a,b)`).
//!
//! `C(φ,θ;δ)` is evaluated twice: through the rows of `M(φ,θ)` and through
//! the columns of `M(θ,φ)`. The two must agree.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::algebra::FiniteAlgebra;
use crate::closure::PowerSpace;
use crate::congruence::{cg, Congruence};
use crate::error::{Error, Result};
use crate::relation::{Quad, QuadRel};
use crate::terms::{eval_term, WeakDifferenceWitness};

/// Centrality computations on one algebra, caching matrix sets.
pub struct Commutator<'a> {
    alg: &'a FiniteAlgebra,
    cross_check: bool,
    cache: Mutex<HashMap<(Congruence, Congruence), Arc<QuadRel>>>,
}

impl<'a> Commutator<'a> {
    pub fn new(alg: &'a FiniteAlgebra) -> Self {
        Commutator { alg, cross_check: true, cache: Mutex::new(HashMap::new()) }
    }

    pub fn with_cross_check(mut self, on: bool) -> Self {
        self.cross_check = on;
        self
    }

    pub fn algebra(&self) -> &'a FiniteAlgebra {
        self.alg
    }

    /// `M(θ,φ)` as a subset of `A⁴`.
    pub fn matrices(&self, theta: &Congruence, phi: &Congruence) -> Result<Arc<QuadRel>> {
        let key = (theta.clone(), phi.clone());
        if let Some(m) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(m));
        }
        theta.verify(self.alg)?;
        phi.verify(self.alg)?;
        let m = Arc::new(generate_matrices(self.alg, theta, phi)?);
        self.cache.lock().expect("cache lock").insert(key, Arc::clone(&m));
        Ok(m)
    }

    /// A matrix of `M(φ,θ)` with exactly one row in δ, if any.
    pub fn row_witness(&self, phi: &Congruence, theta: &Congruence, delta: &Congruence) -> Result<Option<Quad>> {
        delta.verify(self.alg)?;
        let m = self.matrices(phi, theta)?;
        let found = m.quads().find(|&[a1, a2, a3, a4]| delta.related(a1, a3) != delta.related(a2, a4));
        Ok(found)
    }

    /// A matrix of `M(θ,φ)` with exactly one column in δ, if any.
    pub fn column_witness(&self, phi: &Congruence, theta: &Congruence, delta: &Congruence) -> Result<Option<Quad>> {
        delta.verify(self.alg)?;
        let m = self.matrices(theta, phi)?;
        let found = m.quads().find(|&[a1, a2, a3, a4]| delta.related(a1, a2) != delta.related(a3, a4));
        Ok(found)
    }

    /// `C(φ,θ;δ)`.
    pub fn centralizes(&self, phi: &Congruence, theta: &Congruence, delta: &Congruence) -> Result<bool> {
        let rows = self.row_witness(phi, theta, delta)?.is_none();
        if self.cross_check {
            let cols = self.column_witness(phi, theta, delta)?.is_none();
            if rows != cols {
                return Err(Error::Internal(format!(
                    "C({phi},{theta};{delta}) in `{}`: rows of M(φ,θ) say {rows}, columns of M(θ,φ) say {cols}",
                    self.alg.name()
                )));
            }
        }
        Ok(rows)
    }

    /// `(δ:θ)`, the largest φ with `C(φ,θ;δ)`.
    pub fn centralizer(&self, theta: &Congruence, delta: &Congruence) -> Result<Congruence> {
        let n = self.alg.size();
        let mut acc = Congruence::zero(n);
        let mut tried: Vec<Congruence> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if acc.related(a, b) {
                    continue;
                }
                let p = cg(self.alg, &[(a, b)])?;
                if tried.contains(&p) {
                    continue;
                }
                if self.centralizes(&p, theta, delta)? {
                    acc = acc.join(&p);
                }
                tried.push(p);
            }
        }
        if !self.centralizes(&acc, theta, delta)? {
            return Err(Error::Internal(format!(
                "join {acc} of centralizing principal congruences fails C(-,{theta};{delta}) in `{}`",
                self.alg.name()
            )));
        }
        Ok(acc)
    }

    pub fn is_abelian(&self, theta: &Congruence) -> Result<bool> {
        self.centralizes(theta, theta, &Congruence::zero(self.alg.size()))
    }

    pub fn is_abelian_modulo(&self, theta: &Congruence, delta: &Congruence) -> Result<bool> {
        if !delta.is_below(theta) {
            return Err(Error::precondition(format!("{delta} is not below {theta}")));
        }
        self.centralizes(theta, theta, delta)
    }
}

fn generate_matrices(alg: &FiniteAlgebra, theta: &Congruence, phi: &Congruence) -> Result<QuadRel> {
    let n = alg.size();
    let space = PowerSpace::new(vec![alg, alg, alg, alg])?;
    let mut seeds = Vec::new();
    for (c, d) in theta.pairs() {
        seeds.push(space.encode(&[c, d, c, d]));
    }
    for (a, b) in phi.pairs() {
        seeds.push(space.encode(&[a, a, b, b]));
    }
    let set = space.closure(seeds);
    Ok(QuadRel::from_bits(n, n, set.bits().clone()))
}

pub fn matrix_set(alg: &FiniteAlgebra, theta: &Congruence, phi: &Congruence) -> Result<QuadRel> {
    theta.verify(alg)?;
    phi.verify(alg)?;
    generate_matrices(alg, theta, phi)
}

pub fn centralizes(alg: &FiniteAlgebra, phi: &Congruence, theta: &Congruence, delta: &Congruence) -> Result<bool> {
    Commutator::new(alg).centralizes(phi, theta, delta)
}

pub fn centralizer(alg: &FiniteAlgebra, theta: &Congruence, delta: &Congruence) -> Result<Congruence> {
    Commutator::new(alg).centralizer(theta, delta)
}

pub fn is_abelian(alg: &FiniteAlgebra, theta: &Congruence) -> Result<bool> {
    Commutator::new(alg).is_abelian(theta)
}

pub fn is_abelian_modulo(alg: &FiniteAlgebra, theta: &Congruence, delta: &Congruence) -> Result<bool> {
    Commutator::new(alg).is_abelian_modulo(theta, delta)
}

/// The group `(e/θ, +, e)` with `x + y = d(x,e,y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroup {
    pub carrier: Vec<usize>,
    pub zero: usize,
    /// `add[i][j]` is the carrier position of `carrier[i] + carrier[j]`.
    pub add: Vec<Vec<usize>>,
    pub neg: Vec<usize>,
}

impl ClassGroup {
    pub fn position(&self, a: usize) -> Option<usize> {
        self.carrier.binary_search(&a).ok()
    }

    pub fn sum(&self, a: usize, b: usize) -> usize {
        let (i, j) = (self.position(a).expect("in class"), self.position(b).expect("in class"));
        self.carrier[self.add[i][j]]
    }
}

/// Builds and certifies the abelian group induced on the θ-class of `e` by a
/// weak difference term. Any failed group law is a theorem violation.
pub fn class_group(alg: &FiniteAlgebra, theta: &Congruence, d: &WeakDifferenceWitness, e: usize) -> Result<ClassGroup> {
    alg.check_elements(&[e])?;
    if !is_abelian(alg, theta)? {
        return Err(Error::precondition(format!("{theta} is not abelian")));
    }
    let term = d.term();
    let carrier = theta.class_of(e);
    let pos = |a: usize| carrier.binary_search(&a).ok();
    let dd = |x: usize, y: usize, z: usize| eval_term(alg, term, &[x, y, z]);
    let m = carrier.len();
    let mut add = vec![vec![0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let s = dd(carrier[i], e, carrier[j])?;
            add[i][j] = pos(s).ok_or_else(|| {
                Error::violation("class group closure", format!("d({},{e},{}) = {s} leaves the class", carrier[i], carrier[j]))
            })?;
        }
    }
    let mut neg = vec![0; m];
    for i in 0..m {
        let v = dd(e, carrier[i], e)?;
        neg[i] = pos(v).ok_or_else(|| Error::violation("class group negation", format!("d({e},{},{e}) = {v}", carrier[i])))?;
    }
    let z = pos(e).expect("e in its class");
    let fail = |law: &str, w: String| Err(Error::violation(&format!("class group {law}"), w));
    for i in 0..m {
        if add[z][i] != i || add[i][z] != i {
            return fail("identity", format!("zero {e}, element {}", carrier[i]));
        }
        if add[i][neg[i]] != z {
            return fail("inverse", format!("{} + d(e,x,e) != e", carrier[i]));
        }
        for j in 0..m {
            if add[i][j] != add[j][i] {
                return fail("commutativity", format!("{}, {}", carrier[i], carrier[j]));
            }
            for k in 0..m {
                if add[add[i][j]][k] != add[i][add[j][k]] {
                    return fail("associativity", format!("{}, {}, {}", carrier[i], carrier[j], carrier[k]));
                }
                // d(x,y,z) = x - y + z
                let lhs = dd(carrier[i], carrier[j], carrier[k])?;
                let rhs = carrier[add[add[i][neg[j]]][k]];
                if lhs != rhs {
                    return fail("difference identity", format!("d({},{},{}) = {lhs}, x-y+z = {rhs}", carrier[i], carrier[j], carrier[k]));
                }
            }
        }
    }
    Ok(ClassGroup { carrier, zero: e, add, neg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::congruence::con_lattice;
    use crate::terms::Term;

    fn eta() -> Congruence {
        Congruence::parse("|0 2|1 3|").unwrap()
    }

    #[test]
    fn matrix_examples() {
        let z2 = builtin::z2aff();
        let one = Congruence::one(2);
        let m = matrix_set(&z2, &one, &one).unwrap();
        // Oracle: even-weight quadruples.
        let even: Vec<Quad> = (0..16)
            .map(|i| [i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1])
            .filter(|q| q.iter().sum::<usize>() % 2 == 0)
            .collect();
        assert_eq!(m.quads().collect::<Vec<_>>(), even);
        let s2 = builtin::s2();
        let zero = Congruence::zero(2);
        let consts: Vec<Quad> = vec![[0, 0, 0, 0], [1, 1, 1, 1]];
        assert_eq!(matrix_set(&s2, &zero, &zero).unwrap().quads().collect::<Vec<_>>(), consts);
        assert!(matrix_set(&s2, &Congruence::one(2), &Congruence::one(2)).unwrap().contains([0, 0, 0, 1]));
    }

    #[test]
    fn centralizes_examples() {
        let (z, o) = (Congruence::zero(2), Congruence::one(2));
        assert!(!centralizes(&builtin::s2(), &o, &o, &z).unwrap());
        assert!(centralizes(&builtin::z2aff(), &o, &o, &z).unwrap());
        for alg in builtin::all() {
            let n = alg.size();
            for theta in con_lattice(&alg).unwrap().congruences {
                assert!(centralizes(&alg, &Congruence::zero(n), &theta, &Congruence::zero(n)).unwrap());
            }
        }
    }

    #[test]
    fn centralizer_examples() {
        let (z, o) = (Congruence::zero(2), Congruence::one(2));
        assert_eq!(centralizer(&builtin::s2(), &o, &z).unwrap(), z);
        let z4 = builtin::z4aff();
        assert_eq!(centralizer(&z4, &eta(), &Congruence::zero(4)).unwrap(), Congruence::one(4));
        assert_eq!(centralizer(&z4, &Congruence::one(4), &eta()).unwrap(), Congruence::one(4));
    }

    #[test]
    fn abelian_examples() {
        assert!(is_abelian(&builtin::z2aff(), &Congruence::one(2)).unwrap());
        assert!(!is_abelian(&builtin::s2(), &Congruence::one(2)).unwrap());
        let z4 = builtin::z4aff();
        assert!(is_abelian_modulo(&z4, &Congruence::one(4), &eta()).unwrap());
        assert!(is_abelian_modulo(&z4, &eta(), &Congruence::one(4)).is_err());
    }

    #[test]
    fn class_group_examples() {
        let z4 = builtin::z4aff();
        let d = WeakDifferenceWitness::new(&z4, Term::basic(&z4, 0)).unwrap();
        let g = class_group(&z4, &Congruence::one(4), &d, 0).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(g.sum(a, b), (a + b) % 4);
            }
        }
        let h = class_group(&z4, &eta(), &d, 1).unwrap();
        assert_eq!(h.carrier, vec![1, 3]);
        assert_eq!(h.sum(1, 3), 3);
        assert_eq!(h.sum(3, 3), 1);
        let t = class_group(&z4, &Congruence::zero(4), &d, 2).unwrap();
        assert_eq!(t.carrier, vec![2]);
        let s2 = builtin::s2();
        let ds = WeakDifferenceWitness::new(&s2, Term::basic(&s2, 0)).unwrap();
        assert!(class_group(&s2, &Congruence::one(2), &ds, 0).is_err());
    }

    #[test]
    fn centralizer_is_largest() {
        for alg in builtin::all() {
            let lat = con_lattice(&alg).unwrap();
            let c = Commutator::new(&alg);
            for theta in &lat.congruences {
                for delta in &lat.congruences {
                    let cz = c.centralizer(theta, delta).unwrap();
                    for phi in &lat.congruences {
                        assert_eq!(c.centralizes(phi, theta, delta).unwrap(), phi.is_below(&cz), "{} {phi} {theta} {delta}", alg.name());
                    }
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn alg_and_pair() -> impl Strategy<Value = (FiniteAlgebra, Congruence, Congruence)> {
            let mut algs = builtin::all();
            algs.extend(builtin::commutative_idempotent_groupoids(3));
            (proptest::sample::select(algs), any::<prop::sample::Index>(), any::<prop::sample::Index>()).prop_map(|(alg, i, j)| {
                let lat = con_lattice(&alg).unwrap().congruences;
                let (x, y) = (lat[i.index(lat.len())].clone(), lat[j.index(lat.len())].clone());
                (alg, x, y)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            /// The centralizer is the largest congruence satisfying the term
            /// condition, found here by sweeping the whole lattice.
            #[test]
            fn centralizer_is_the_largest_centralizing_congruence((alg, theta, delta) in alg_and_pair()) {
                let c = centralizer(&alg, &theta, &delta).unwrap();
                prop_assert!(centralizes(&alg, &c, &theta, &delta).unwrap());
                for phi in con_lattice(&alg).unwrap().congruences {
                    if centralizes(&alg, &phi, &theta, &delta).unwrap() {
                        prop_assert!(phi.is_below(&c), "{} centralizes but is not below {}", phi, c);
                    }
                }
                prop_assert!(delta.is_below(&c) || !centralizes(&alg, &delta, &theta, &delta).unwrap());
            }

            #[test]
            fn abelian_means_self_centralizing((alg, theta, _d) in alg_and_pair()) {
                let zero = Congruence::zero(alg.size());
                prop_assert_eq!(is_abelian(&alg, &theta).unwrap(), theta.is_below(&centralizer(&alg, &theta, &zero).unwrap()));
            }
        }
    }
}
