//! The algebras `A(θ)` and `D(A,θ)`, similarity of subdirectly irreducible
//! algebras, similarity bridges and the `ζ` relation.

use crate::algebra::{ElementMap, FiniteAlgebra};
use crate::bridges::subuniverse_witness;
use crate::commutator::Commutator;
use crate::congruence::{cg, con_lattice, is_irreducible, monolith, upper_cover, Congruence};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relation::{BinRel, Quad, QuadRel};
use crate::terms::{search_term, SearchOutcome, Term, TermPredicate, WeakDifferenceWitness};

/// `θ` as a subalgebra of `A²`. Pairs are listed lexicographically.
#[derive(Clone, Debug)]
pub struct ThetaAlgebra {
    pub base: FiniteAlgebra,
    pub theta: Congruence,
    pub alg: FiniteAlgebra,
    pairs: Vec<(usize, usize)>,
    index: Vec<usize>,
}

impl ThetaAlgebra {
    pub fn new(base: &FiniteAlgebra, theta: &Congruence) -> Result<Self> {
        theta.verify(base)?;
        let n = base.size();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| theta.related(a, b)).map(move |b| (a, b)))
            .collect();
        let mut index = vec![usize::MAX; n * n];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            index[a * n + b] = i;
        }
        let m = pairs.len();
        let mut ops = Vec::with_capacity(base.ops().len());
        for op in base.ops() {
            let entries = m.checked_pow(op.arity as u32).unwrap_or(usize::MAX);
            if entries > Limits::DEFAULT.max_table_entries {
                return Err(Error::ResourceCap {
                    what: format!("A(θ) table for `{}`", op.name),
                    cap: Limits::DEFAULT.max_table_entries,
                });
            }
            let mut left = vec![0usize; op.arity];
            let mut right = vec![0usize; op.arity];
            ops.push(FiniteAlgebra::op_from_fn(&op.name, m, op.arity, |args| {
                for (q, &i) in args.iter().enumerate() {
                    left[q] = pairs[i].0;
                    right[q] = pairs[i].1;
                }
                index[op.apply(n, &left) * n + op.apply(n, &right)]
            }));
        }
        let alg = FiniteAlgebra::new(format!("{}({})", base.name(), theta), m, ops)?;
        Ok(ThetaAlgebra { base: base.clone(), theta: theta.clone(), alg, pairs, index })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, i: usize) -> (usize, usize) {
        self.pairs[i]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn index_of(&self, a: usize, b: usize) -> Option<usize> {
        let n = self.base.size();
        if a >= n || b >= n {
            return None;
        }
        Some(self.index[a * n + b]).filter(|&i| i != usize::MAX)
    }

    /// Indices of the pairs `(a,a)`, by `a`.
    pub fn diagonal(&self) -> Vec<usize> {
        (0..self.base.size()).map(|a| self.index_of(a, a).expect("reflexive")).collect()
    }

    /// `Δ_{θ,α}`: generated by `((a,a),(b,b))` for `(a,b) ∈ α`.
    pub fn delta(&self, alpha: &Congruence) -> Result<Congruence> {
        alpha.verify(&self.base)?;
        if !self.theta.is_below(alpha) {
            return Err(Error::precondition(format!("θ = {} is not below α = {alpha}", self.theta)));
        }
        let gens: Vec<(usize, usize)> = alpha
            .pairs()
            .filter(|&(a, b)| a < b)
            .map(|(a, b)| (self.index_of(a, a).expect("reflexive"), self.index_of(b, b).expect("reflexive")))
            .collect();
        cg(&self.alg, &gens)
    }

    /// `ᾱ`: pairs of `θ`-pairs whose first entries are `α`-related.
    pub fn alpha_bar(&self, alpha: &Congruence) -> Result<Congruence> {
        alpha.verify(&self.base)?;
        let repr = (0..self.len())
            .map(|i| (0..=i).find(|&j| alpha.related(self.pairs[i].0, self.pairs[j].0)).expect("reflexive"))
            .collect();
        Congruence::from_repr(repr)
    }
}

pub fn build_theta_algebra(alg: &FiniteAlgebra, theta: &Congruence) -> Result<ThetaAlgebra> {
    ThetaAlgebra::new(alg, theta)
}

pub fn delta(alg: &FiniteAlgebra, theta: &Congruence, alpha: &Congruence) -> Result<Congruence> {
    ThetaAlgebra::new(alg, theta)?.delta(alpha)
}

/// `D(A,θ)` together with the maps and congruences certified for it.
#[derive(Clone, Debug)]
pub struct DResult {
    pub theta_alg: ThetaAlgebra,
    /// `(0:θ)`.
    pub alpha: Congruence,
    pub delta: Congruence,
    pub alpha_bar: Congruence,
    pub d: FiniteAlgebra,
    /// `A(θ) ↠ D`.
    pub h: ElementMap,
    pub dmon: Congruence,
    /// `A/α ≅ D/Dmon`.
    pub h_star: ElementMap,
    pub d_o: Vec<usize>,
    /// Natural map `A → A/α`.
    pub a_to_quotient: ElementMap,
    /// Natural map `D → D/Dmon`.
    pub d_to_quotient: ElementMap,
    a_quotient: FiniteAlgebra,
    d_quotient: FiniteAlgebra,
}

fn is_minimal(alg: &FiniteAlgebra, theta: &Congruence) -> Result<bool> {
    if theta.is_zero() {
        return Ok(false);
    }
    for (a, b) in theta.pairs().filter(|&(a, b)| a < b) {
        if cg(alg, &[(a, b)])? != *theta {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds `D(A,θ) = A(θ)/Δ_{θ,α}`, `α = (0:θ)`, and certifies it.
///
/// Requires `θ` to be an abelian atom of `Con(A)`. Any failed invariant is
/// a [`Error::TheoremViolation`].
pub fn build_d(alg: &FiniteAlgebra, theta: &Congruence, wd: &WeakDifferenceWitness) -> Result<DResult> {
    theta.verify(alg)?;
    wd.transfer(alg)?;
    if !is_minimal(alg, theta)? {
        return Err(Error::precondition(format!("{theta} is not a minimal congruence of `{}`", alg.name())));
    }
    let comm = Commutator::new(alg);
    if !comm.is_abelian(theta)? {
        return Err(Error::precondition(format!("{theta} is not abelian in `{}`", alg.name())));
    }
    let n = alg.size();
    let alpha = comm.centralizer(theta, &Congruence::zero(n))?;
    let ta = ThetaAlgebra::new(alg, theta)?;
    let delta = ta.delta(&alpha)?;
    let alpha_bar = ta.alpha_bar(&alpha)?;
    if let Some(w) = alpha_bar.compatibility_witness(&ta.alg) {
        return Err(Error::violation("corDA", format!("ᾱ is not a congruence of A(θ): {w}")));
    }
    if !delta.is_below(&alpha_bar) {
        return Err(Error::violation("corDA", format!("Δ = {delta} is not below ᾱ = {alpha_bar}")));
    }
    let (d, h) = ta.alg.quotient(&delta)?;
    let d = d.with_name(format!("D({},{})", alg.name(), theta));
    let dmon = alpha_bar.push_forward(&h);
    if let Some(w) = dmon.compatibility_witness(&d) {
        return Err(Error::violation("corDA", format!("ᾱ/Δ is not a congruence of D: {w}")));
    }
    let (a_quotient, a_to_quotient) = alg.quotient(&alpha)?;
    let (d_quotient, d_to_quotient) = d.quotient(&dmon)?;
    let h_star_values = alpha
        .representatives()
        .into_iter()
        .map(|a| d_to_quotient.apply(h.apply(ta.index_of(a, a).expect("reflexive"))))
        .collect();
    let h_star = ElementMap::new(a_quotient.size(), d_quotient.size(), h_star_values)?;
    let mut d_o: Vec<usize> = ta.diagonal().into_iter().map(|i| h.apply(i)).collect();
    d_o.sort_unstable();
    d_o.dedup();
    let result = DResult {
        theta_alg: ta,
        alpha,
        delta,
        alpha_bar,
        d,
        h,
        dmon,
        h_star,
        d_o,
        a_to_quotient,
        d_to_quotient,
        a_quotient,
        d_quotient,
    };
    result.certify(wd)?;
    Ok(result)
}

impl DResult {
    pub fn h_of(&self, a: usize, b: usize) -> Option<usize> {
        self.theta_alg.index_of(a, b).map(|i| self.h.apply(i))
    }

    /// Re-checks every certified property exhaustively.
    pub fn certify(&self, wd: &WeakDifferenceWitness) -> Result<()> {
        let d = &self.d;
        let m = d.size();
        let fail = |what: String| Err(Error::violation("corDA", format!("D = `{}`: {what}", d.name())));
        if !self.h.is_surjective() || !self.h.is_homomorphism(&self.theta_alg.alg, d) {
            return fail("h is not a surjective homomorphism".into());
        }
        match monolith(d)? {
            Some(mu) if mu == self.dmon => {}
            Some(mu) => return fail(format!("monolith is {mu}, expected Dmon = {}", self.dmon)),
            None => return fail("not subdirectly irreducible".into()),
        }
        let comm = Commutator::new(d);
        if !comm.is_abelian(&self.dmon)? {
            return fail(format!("Dmon = {} is not abelian", self.dmon));
        }
        let cent = comm.centralizer(&self.dmon, &Congruence::zero(m))?;
        if cent != self.dmon {
            return fail(format!("(0:Dmon) = {cent}, expected {}", self.dmon));
        }
        if !d.is_subuniverse(&self.d_o)? {
            return fail(format!("D_o = {:?} is not a subuniverse", self.d_o));
        }
        for class in self.dmon.class_lists() {
            let hits = class.iter().filter(|x| self.d_o.binary_search(x).is_ok()).count();
            if hits != 1 {
                return fail(format!("Dmon-class {class:?} meets D_o in {hits} elements"));
            }
        }
        for (i, &(a, b)) in self.theta_alg.pairs().iter().enumerate() {
            let in_d_o = self.d_o.binary_search(&self.h.apply(i)).is_ok();
            if in_d_o != (a == b) {
                return fail(format!("h⁻¹(D_o) ≠ 0: pair ({a},{b})"));
            }
        }
        if !self.h_star.is_bijective() || !self.h_star.is_homomorphism(&self.a_quotient, &self.d_quotient) {
            return fail("h* is not an isomorphism A/α → D/Dmon".into());
        }
        for (i, &(a, _)) in self.theta_alg.pairs().iter().enumerate() {
            let lhs = self.d_to_quotient.apply(self.h.apply(i));
            let rhs = self.h_star.apply(self.a_to_quotient.apply(a));
            if lhs != rhs {
                let (a, b) = self.theta_alg.pair(i);
                return fail(format!("h({a},{b})/Dmon ≠ h*({a}/α)"));
            }
        }
        wd.transfer(d)?;
        if !self.d_o_is_maximal()? {
            return Err(Error::violation("poly", format!("D_o = {:?} is not a maximal proper subuniverse of `{}`", self.d_o, d.name())));
        }
        Ok(())
    }

    /// `D_o` is a maximal proper subuniverse of `D`.
    pub fn d_o_is_maximal(&self) -> Result<bool> {
        let m = self.d.size();
        if self.d_o.len() == m {
            return Ok(false);
        }
        for x in (0..m).filter(|x| self.d_o.binary_search(x).is_err()) {
            let mut seed = self.d_o.clone();
            seed.push(x);
            if self.d.sg(&seed)?.len() != m {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The single element of `D_o` when `D_o` has size one.
    pub fn zero(&self) -> Option<usize> {
        match self.d_o.as_slice() {
            [z] => Some(*z),
            _ => None,
        }
    }
}

/// `D(A)` of a subdirectly irreducible algebra.
#[derive(Clone, Debug)]
pub struct SiD {
    pub monolith: Congruence,
    pub abelian: bool,
    pub d: FiniteAlgebra,
    /// Present when the monolith is abelian.
    pub construction: Option<DResult>,
}

pub fn si_monolith(alg: &FiniteAlgebra) -> Result<Congruence> {
    monolith(alg)?.ok_or_else(|| Error::precondition(format!("`{}` is not subdirectly irreducible", alg.name())))
}

pub fn build_d_of_si(alg: &FiniteAlgebra, wd: &WeakDifferenceWitness) -> Result<SiD> {
    let mu = si_monolith(alg)?;
    if Commutator::new(alg).is_abelian(&mu)? {
        let r = build_d(alg, &mu, wd)?;
        Ok(SiD { monolith: mu, abelian: true, d: r.d.clone(), construction: Some(r) })
    } else {
        Ok(SiD { monolith: mu, abelian: false, d: alg.clone(), construction: None })
    }
}

/// An isomorphism `D(A) ≅ D(B)` when `A ∼ B`.
pub fn similarity_iso(
    a: &FiniteAlgebra,
    wa: &WeakDifferenceWitness,
    b: &FiniteAlgebra,
    wb: &WeakDifferenceWitness,
) -> Result<Option<ElementMap>> {
    a.require_same_signature(b)?;
    let da = build_d_of_si(a, wa)?;
    let db = build_d_of_si(b, wb)?;
    da.d.find_isomorphism(&db.d)
}

pub fn is_similar(a: &FiniteAlgebra, wa: &WeakDifferenceWitness, b: &FiniteAlgebra, wb: &WeakDifferenceWitness) -> Result<bool> {
    Ok(similarity_iso(a, wa, b, wb)?.is_some())
}

/// A failed bridge condition with the first offending quadruple, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionFailure {
    pub condition: String,
    pub quad: Option<Quad>,
    pub detail: String,
}

impl ConditionFailure {
    pub(crate) fn new(condition: &str, quad: Option<Quad>, detail: impl Into<String>) -> Self {
        ConditionFailure { condition: condition.to_string(), quad, detail: detail.into() }
    }
}

impl std::fmt::Display for ConditionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.condition, self.detail)?;
        if let Some(q) = self.quad {
            write!(f, " at {q:?}")?;
        }
        Ok(())
    }
}

fn first_difference(x: &BinRel, y: &BinRel) -> Option<(usize, usize)> {
    x.difference(y).pairs().next().or_else(|| y.difference(x).pairs().next())
}

/// Checks `T ≤ A×A×B×B` and the three similarity-bridge conditions;
/// `Ok(None)` means `T` is a similarity bridge.
pub fn check_similarity_bridge(a: &FiniteAlgebra, b: &FiniteAlgebra, t: &QuadRel) -> Result<Option<ConditionFailure>> {
    a.require_same_signature(b)?;
    if t.dims() != (a.size(), b.size()) {
        return Err(Error::Invalid(format!("relation dimensions {:?} for algebras of sizes {}, {}", t.dims(), a.size(), b.size())));
    }
    let mu = si_monolith(a)?;
    let nu = si_monolith(b)?;
    if let Some(q) = subuniverse_witness(a, b, t)? {
        return Err(Error::NotClosed(format!("{q:?} is generated but not in T")));
    }
    if let Some(p) = first_difference(&t.pr12(), &mu.to_rel()) {
        return Ok(Some(ConditionFailure::new("B1", None, format!("pr12(T) and μ differ at {p:?}"))));
    }
    if let Some(p) = first_difference(&t.pr34(), &nu.to_rel()) {
        return Ok(Some(ConditionFailure::new("B1", None, format!("pr34(T) and ν differ at {p:?}"))));
    }
    for q in t.quads() {
        if (q[0] == q[1]) != (q[2] == q[3]) {
            return Ok(Some(ConditionFailure::new("B2", Some(q), "a1 = a2 and b1 = b2 disagree")));
        }
    }
    for q in t.quads() {
        for (x, y) in [(q[0], q[2]), (q[1], q[3])] {
            if !t.contains([x, x, y, y]) {
                return Ok(Some(ConditionFailure::new("B3", Some(q), format!("({x},{x},{y},{y}) missing"))));
            }
        }
    }
    Ok(None)
}

/// `T_{D(A)}` with the `D(A)` construction it was built from.
#[derive(Clone, Debug)]
pub struct TDa {
    pub d: DResult,
    /// Over `A` and `D(A)`.
    pub t: QuadRel,
}

/// `{(a, b, h(a,e), h(b,e)) : a μ b μ e}` for an SI algebra with abelian
/// monolith `μ`, certified as a similarity bridge from `A` to `D(A)`.
pub fn build_t_da(alg: &FiniteAlgebra, wd: &WeakDifferenceWitness) -> Result<TDa> {
    t_da_from(alg, &build_d_of_si(alg, wd)?)
}

/// [`build_t_da`] from an already built `D(A)`.
pub fn t_da_from(alg: &FiniteAlgebra, si: &SiD) -> Result<TDa> {
    let Some(d) = si.construction.clone() else {
        return Err(Error::precondition(format!("the monolith of `{}` is not abelian", alg.name())));
    };
    let mu = &si.monolith;
    let mut t = QuadRel::empty(alg.size(), d.d.size());
    for (a, b) in mu.pairs() {
        for e in mu.class_of(a) {
            t.insert([a, b, d.h_of(a, e).expect("μ-pair"), d.h_of(b, e).expect("μ-pair")]);
        }
    }
    if let Some(f) = check_similarity_bridge(alg, &d.d, &t)? {
        return Err(Error::violation("simprop", format!("T_D(A) for `{}`: {f}", alg.name())));
    }
    Ok(TDa { d, t })
}

/// The simple affine algebra `Z`, its zero and `ζ ≤ A×A×Z`.
#[derive(Clone, Debug)]
pub struct Zeta {
    pub z: FiniteAlgebra,
    pub zero: usize,
    pub maltsev: Term,
    pub rho_plus: Congruence,
    /// Sorted triples `(a, a', b)`.
    pub triples: Vec<[usize; 3]>,
}

/// For irreducible `ρ` with `(ρ:ρ⁺) = 1`, builds `Z = D(A/ρ)` and `ζ`, and
/// verifies every stated property.
pub fn build_zeta(alg: &FiniteAlgebra, rho: &Congruence, wd: &WeakDifferenceWitness) -> Result<Zeta> {
    wd.transfer(alg)?;
    let rho_plus = upper_cover(alg, rho)?;
    let opt = Commutator::new(alg).centralizer(&rho_plus, rho)?;
    if !opt.is_one() {
        return Err(Error::precondition(format!("Opt({rho}) = {opt} is not the full congruence")));
    }
    let irr = is_irreducible(alg, rho, true)?;
    let Some(star) = irr.star else {
        return Err(Error::precondition(format!("{rho} is not irreducible in `{}`", alg.name())));
    };
    let (abar, q) = alg.quotient(rho)?;
    let mu = rho_plus.push_forward(&q);
    let d = build_d(&abar, &mu, &wd.transfer(&abar)?)?;
    let z = d.d.clone().with_name(format!("Z({},{})", alg.name(), rho));
    let fail = |what: String| Err(Error::violation("zeta", format!("`{}`, ρ = {rho}: {what}", alg.name())));
    if con_lattice(&z)?.len() != 2 {
        return fail("Z is not simple".into());
    }
    if !Commutator::new(&z).is_abelian(&Congruence::one(z.size()))? {
        return fail("Z is not abelian".into());
    }
    let maltsev = match search_term(&z, TermPredicate::Maltsev, 3)? {
        SearchOutcome::Found { term, .. } => term,
        SearchOutcome::NotFoundWithinBound => return fail("no Maltsev term of Z within depth 3".into()),
    };
    let Some(zero) = d.zero() else {
        return fail(format!("D_o = {:?} is not a singleton", d.d_o));
    };
    if !z.is_subuniverse(&[zero])? {
        return fail(format!("{{{zero}}} is not a subuniverse"));
    }
    let mut triples = Vec::with_capacity(rho_plus.num_pairs());
    for (a, a2) in rho_plus.pairs() {
        let b = d.h_of(q.apply(a), q.apply(a2)).expect("ρ⁺-pair maps into μ");
        triples.push([a, a2, b]);
    }
    triples.sort_unstable();
    let pr12 = BinRel::from_pairs(alg.size(), alg.size(), triples.iter().map(|t| (t[0], t[1])))?;
    if pr12 != star {
        return fail(format!("pr12(ζ) = {pr12}, expected ρ* = {star}"));
    }
    if let Some(t) = triples.iter().find(|t| rho.related(t[0], t[1]) != (t[2] == zero)) {
        return fail(format!("(a,a') ∈ ρ ⟺ b = 0 fails at {t:?}"));
    }
    let mut third = vec![false; z.size()];
    for t in &triples {
        third[t[2]] = true;
    }
    if third.contains(&false) {
        return fail("ζ is not subdirect".into());
    }
    let space = crate::closure::PowerSpace::new(vec![alg, alg, &z])?;
    let seeds: Vec<usize> = triples.iter().map(|t| space.encode(t)).collect();
    if space.closure(seeds.iter().copied()).len() != seeds.len() {
        return fail("ζ is not a subuniverse".into());
    }
    Ok(Zeta { z, zero, maltsev, rho_plus, triples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::congruence::tests::all_partitions;

    fn wd(alg: &FiniteAlgebra) -> WeakDifferenceWitness {
        WeakDifferenceWitness::new(alg, Term::basic(alg, 0)).unwrap()
    }

    fn eta4() -> Congruence {
        Congruence::parse("|0 2|1 3|").unwrap()
    }

    /// Least congruence of `alg` containing `gens`, by sweeping all partitions.
    fn cg_oracle(alg: &FiniteAlgebra, gens: &[(usize, usize)]) -> Congruence {
        all_partitions(alg.size())
            .into_iter()
            .filter(|c| c.compatibility_witness(alg).is_none() && gens.iter().all(|&(x, y)| c.related(x, y)))
            .min_by_key(|c| c.num_pairs())
            .unwrap()
    }

    #[test]
    fn theta_algebra_examples() {
        let z2 = builtin::z2aff();
        let full = ThetaAlgebra::new(&z2, &Congruence::one(2)).unwrap();
        assert!(full.alg.find_isomorphism(&builtin::z2aff_sq()).unwrap().is_some());
        for alg in builtin::all() {
            let diag = ThetaAlgebra::new(&alg, &Congruence::zero(alg.size())).unwrap();
            assert!(diag.alg.find_isomorphism(&alg).unwrap().is_some());
        }
        let z4 = builtin::z4aff();
        let ta = ThetaAlgebra::new(&z4, &eta4()).unwrap();
        assert_eq!(ta.len(), 8);
        for (oi, op) in z4.ops().iter().enumerate() {
            let k = op.arity;
            for code in 0..8usize.pow(k as u32) {
                let args: Vec<usize> = (0..k).map(|q| code / 8usize.pow(q as u32) % 8).collect();
                let l: Vec<usize> = args.iter().map(|&i| ta.pair(i).0).collect();
                let r: Vec<usize> = args.iter().map(|&i| ta.pair(i).1).collect();
                let expect = (z4.eval_op(oi, &l).unwrap(), z4.eval_op(oi, &r).unwrap());
                assert_eq!(ta.pair(ta.alg.eval_op(oi, &args).unwrap()), expect);
            }
        }
    }

    #[test]
    fn delta_examples() {
        let z2 = builtin::z2aff();
        let one = Congruence::one(2);
        let ta = ThetaAlgebra::new(&z2, &one).unwrap();
        let d = ta.delta(&one).unwrap();
        let gens = [(ta.index_of(0, 0).unwrap(), ta.index_of(1, 1).unwrap())];
        assert_eq!(d, cg_oracle(&ta.alg, &gens));
        let blocks: Vec<Vec<(usize, usize)>> =
            d.class_lists().into_iter().map(|c| c.into_iter().map(|i| ta.pair(i)).collect()).collect();
        assert_eq!(blocks, vec![vec![(0, 0), (1, 1)], vec![(0, 1), (1, 0)]]);

        for alg in builtin::all() {
            let n = alg.size();
            let zero = Congruence::zero(n);
            let ta = ThetaAlgebra::new(&alg, &zero).unwrap();
            for alpha in crate::congruence::con_lattice(&alg).unwrap().congruences {
                let d = ta.delta(&alpha).unwrap();
                for a in 0..n {
                    for b in 0..n {
                        let (i, j) = (ta.index_of(a, a).unwrap(), ta.index_of(b, b).unwrap());
                        assert_eq!(d.related(i, j), alpha.related(a, b));
                    }
                }
            }
        }

        let z4 = builtin::z4aff();
        let ta = ThetaAlgebra::new(&z4, &eta4()).unwrap();
        let d = ta.delta(&Congruence::one(4)).unwrap();
        let gens: Vec<(usize, usize)> = (1..4).map(|b| (ta.index_of(0, 0).unwrap(), ta.index_of(b, b).unwrap())).collect();
        assert_eq!(d, cg_oracle(&ta.alg, &gens));
        assert_eq!(d.num_blocks(), 2);
        for i in 0..8 {
            for j in 0..8 {
                let ((a, b), (c, e)) = (ta.pair(i), ta.pair(j));
                let par = |x: usize, y: usize| ((y + 4 - x) % 4) / 2;
                assert_eq!(d.related(i, j), par(a, b) == par(c, e));
            }
        }
        assert!(matches!(ta.delta(&Congruence::zero(4)), Err(Error::Precondition(_))));
    }

    #[test]
    fn d_examples() {
        let z2 = builtin::z2aff();
        let r = build_d(&z2, &Congruence::one(2), &wd(&z2)).unwrap();
        assert_eq!(r.d.size(), 2);
        assert!(r.d.find_isomorphism(&z2).unwrap().is_some());
        assert_eq!(r.d_o, vec![0]);
        assert!(r.dmon.is_one());

        let z4 = builtin::z4aff();
        let r = build_d(&z4, &eta4(), &wd(&z4)).unwrap();
        assert_eq!(r.d.size(), 2);
        assert!(r.d.find_isomorphism(&z2).unwrap().is_some());
        assert!(r.delta.class_lists().iter().all(|c| c.len() == 4));
        assert!(r.alpha.is_one());

        let sq = builtin::z2aff_sq();
        let atom = Congruence::parse("|0 1|2 3|").unwrap();
        let r = build_d(&sq, &atom, &wd(&sq)).unwrap();
        assert_eq!(r.d.size(), 2);

        // ᾱ strictly above Δ.
        let r = build_d(&z2, &Congruence::one(2), &wd(&z2)).unwrap();
        assert!(r.delta.is_strictly_below(&r.alpha_bar));
    }

    #[test]
    fn d_preconditions() {
        let z4 = builtin::z4aff();
        assert!(matches!(build_d(&z4, &Congruence::one(4), &wd(&z4)), Err(Error::Precondition(_))));
        let s2 = builtin::s2();
        assert!(matches!(build_d(&s2, &Congruence::one(2), &wd(&s2)), Err(Error::Precondition(_))));
    }

    #[test]
    fn d_of_si_and_similarity() {
        let (z2, z4, s2) = (builtin::z2aff(), builtin::z4aff(), builtin::s2());
        let ds2 = build_d_of_si(&s2, &wd(&s2)).unwrap();
        assert!(!ds2.abelian);
        assert_eq!(ds2.d, s2);
        assert_eq!(build_d_of_si(&z4, &wd(&z4)).unwrap().d.size(), 2);
        assert!(is_similar(&z2, &wd(&z2), &z4, &wd(&z4)).unwrap());
        assert!(!is_similar(&z2, &wd(&z2), &s2, &wd(&s2)).unwrap());
        assert!(is_similar(&s2, &wd(&s2), &s2, &wd(&s2)).unwrap());
        let sq = builtin::z2aff_sq();
        assert!(matches!(build_d_of_si(&sq, &wd(&sq)), Err(Error::Precondition(_))));
    }

    #[test]
    fn similarity_bridge_checks() {
        let z2 = builtin::z2aff();
        let t = build_t_da(&z2, &wd(&z2)).unwrap();
        let oracle =
            QuadRel::from_quads(2, 2, (0..8).map(|c| (c & 1, c >> 1 & 1, c >> 2)).map(|(a, b, e)| [a, b, a ^ e, b ^ e])).unwrap();
        assert_eq!(t.t, oracle);
        assert_eq!(t.t.len(), 8);

        let full = QuadRel::full(2, 2);
        let f = check_similarity_bridge(&z2, &z2, &full).unwrap().unwrap();
        assert_eq!((f.condition.as_str(), f.quad), ("B2", Some([0, 0, 0, 1])));
        let diag = QuadRel::from_quads(2, 2, (0..4).map(|c| [c & 1, c & 1, c >> 1, c >> 1])).unwrap();
        assert_eq!(check_similarity_bridge(&z2, &z2, &diag).unwrap().unwrap().condition, "B1");
        let empty = QuadRel::empty(2, 2);
        assert_eq!(check_similarity_bridge(&z2, &z2, &empty).unwrap().unwrap().condition, "B1");
        let not_closed = QuadRel::from_quads(2, 2, [[0, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1]]).unwrap();
        assert!(matches!(check_similarity_bridge(&z2, &z2, &not_closed), Err(Error::NotClosed(_))));
    }

    #[test]
    fn t_da_z4() {
        let z4 = builtin::z4aff();
        let t = build_t_da(&z4, &wd(&z4)).unwrap();
        let h = |a: usize, e: usize| ((e + 4 - a) % 4) / 2;
        let mut quads = Vec::new();
        for a in 0..4 {
            for b in (0..4).filter(|b| (a + b) % 2 == 0) {
                for e in (0..4).filter(|e| (a + e) % 2 == 0) {
                    quads.push([a, b, h(a, e), h(b, e)]);
                }
            }
        }
        assert_eq!(t.t, QuadRel::from_quads(4, 2, quads).unwrap());
        assert_eq!(t.t.len(), 16);
        let s2 = builtin::s2();
        assert!(matches!(build_t_da(&s2, &wd(&s2)), Err(Error::Precondition(_))));
    }

    #[test]
    fn zeta_examples() {
        let z4 = builtin::z4aff();
        let zt = build_zeta(&z4, &Congruence::zero(4), &wd(&z4)).unwrap();
        assert_eq!(zt.z.size(), 2);
        let expect: Vec<[usize; 3]> = (0..4)
            .flat_map(|a| (0..4).filter(move |b| (a + b) % 2 == 0).map(move |b| [a, b, ((a + 4 - b) % 4) / 2]))
            .collect();
        assert_eq!(zt.triples, expect);
        assert_eq!(zt.zero, 0);

        let z2 = builtin::z2aff();
        let zt = build_zeta(&z2, &Congruence::zero(2), &wd(&z2)).unwrap();
        let expect: Vec<[usize; 3]> = (0..4).map(|c| [c >> 1, c & 1, (c >> 1) ^ (c & 1)]).collect();
        assert_eq!(zt.triples, expect);

        let s2 = builtin::s2();
        assert!(matches!(build_zeta(&s2, &Congruence::zero(2), &wd(&s2)), Err(Error::Precondition(_))));
    }
}
