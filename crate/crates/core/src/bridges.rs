//! Bridges between congruences.
//!
//! A bridge from `(A,ρ)` to `(B,σ)` is a subuniverse `T ≤ A×A×B×B` that is
//! stable under `ρ` in coordinates 1-2 and under `σ` in coordinates 3-4
//! (B0*), whose anchors `pr12(T)`, `pr34(T)` properly contain `ρ`, `σ` (B1*),
//! and where `(a1,a2) ∈ ρ ⟺ (b1,b2) ∈ σ` for every member (B2*).
//!
//! Every generated relation here comes from one routine,
//! [`saturated_closure`]: closure under the operations together with
//! `ρ`-stability in the first two coordinates and `σ`-stability in the
//! last two.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::algebra::{ElementMap, FiniteAlgebra};
use crate::closure::{ClosedSet, PowerSpace};
use crate::commutator::Commutator;
use crate::congruence::{cov, cov_plus, is_meet_irreducible, is_saturated_subuniverse, upper_cover, Congruence};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relation::{BinRel, Quad, QuadRel};
use crate::similarity::{build_d_of_si, t_da_from, ConditionFailure, SiD, ThetaAlgebra};
use crate::terms::{TaylorWitness, WeakDifferenceWitness};

fn quad_space<'a>(a: &'a FiniteAlgebra, rho: &Congruence, b: &'a FiniteAlgebra, sigma: &Congruence) -> Result<PowerSpace<'a>> {
    PowerSpace::new(vec![a, a, b, b])?
        .with_stability(0, rho)?
        .with_stability(1, rho)?
        .with_stability(2, sigma)?
        .with_stability(3, sigma)
}

fn as_quad(c: &[usize]) -> Quad {
    [c[0], c[1], c[2], c[3]]
}

fn to_quadrel(a: &FiniteAlgebra, b: &FiniteAlgebra, set: &ClosedSet) -> QuadRel {
    QuadRel::from_bits(a.size(), b.size(), set.bits().clone())
}

/// Least relation containing `seeds` that is closed under the operations,
/// `ρ`-stable in coordinates 1-2 and `σ`-stable in coordinates 3-4.
pub fn saturated_closure(
    a: &FiniteAlgebra,
    rho: &Congruence,
    b: &FiniteAlgebra,
    sigma: &Congruence,
    seeds: impl IntoIterator<Item = Quad>,
) -> Result<QuadRel> {
    let space = quad_space(a, rho, b, sigma)?;
    let seeds: Vec<usize> = seeds.into_iter().map(|q| space.encode(&q)).collect();
    Ok(to_quadrel(a, b, &space.closure(seeds)))
}

/// [`saturated_closure`] that gives up (returning `None`) as soon as a
/// member is rejected by `guard`.
pub fn saturated_closure_guarded(
    a: &FiniteAlgebra,
    rho: &Congruence,
    b: &FiniteAlgebra,
    sigma: &Congruence,
    seeds: impl IntoIterator<Item = Quad>,
    mut guard: impl FnMut(Quad) -> bool,
) -> Result<Option<QuadRel>> {
    let space = quad_space(a, rho, b, sigma)?;
    let seeds: Vec<usize> = seeds.into_iter().map(|q| space.encode(&q)).collect();
    Ok(space.closure_guarded(seeds, |c| guard(as_quad(c))).ok().map(|set| to_quadrel(a, b, &set)))
}

/// A member of the subuniverse generated by `t` that is missing from `t`:
/// the image of some tuple of members under an operation.
pub fn subuniverse_witness(a: &FiniteAlgebra, b: &FiniteAlgebra, t: &QuadRel) -> Result<Option<Quad>> {
    a.require_same_signature(b)?;
    if t.dims() != (a.size(), b.size()) {
        return Err(Error::Invalid("relation does not match the algebras".into()));
    }
    let members: Vec<Quad> = t.quads().collect();
    let radix = [a.size(), a.size(), b.size(), b.size()];
    for (oa, ob) in a.ops().iter().zip(b.ops()) {
        let tables = [&oa.table, &oa.table, &ob.table, &ob.table];
        let k = oa.arity;
        if k == 0 {
            let q = [tables[0][0], tables[1][0], tables[2][0], tables[3][0]];
            if !t.contains(q) {
                return Ok(Some(q));
            }
            continue;
        }
        if members.is_empty() {
            continue;
        }
        // partial[l][c]: table offset in coordinate c once l arguments are
        // fixed; the last argument runs in the inner loop.
        let mut partial = vec![[0usize; 4]; k];
        let mut idx = vec![0usize; k - 1];
        let mut from = 0;
        let bits = t.bits();
        'tuples: loop {
            for l in from..k - 1 {
                let m = members[idx[l]];
                for c in 0..4 {
                    partial[l + 1][c] = partial[l][c] * radix[c] + m[c];
                }
            }
            let base = partial[k - 1].map(|p| p * radix[0]);
            let base = [base[0], base[1], partial[k - 1][2] * radix[2], partial[k - 1][3] * radix[3]];
            for m in &members {
                let q = [tables[0][base[0] + m[0]], tables[1][base[1] + m[1]], tables[2][base[2] + m[2]], tables[3][base[3] + m[3]]];
                if !bits.contains(((q[0] * radix[1] + q[1]) * radix[2] + q[2]) * radix[3] + q[3]) {
                    return Ok(Some(q));
                }
            }
            let mut l = k - 1;
            loop {
                if l == 0 {
                    break 'tuples;
                }
                l -= 1;
                idx[l] += 1;
                if idx[l] < members.len() {
                    break;
                }
                idx[l] = 0;
            }
            from = l;
        }
    }
    Ok(None)
}

fn check_context(a: &FiniteAlgebra, rho: &Congruence, b: &FiniteAlgebra, sigma: &Congruence) -> Result<()> {
    a.require_same_signature(b)?;
    rho.verify(a)?;
    sigma.verify(b)?;
    if rho.is_one() || sigma.is_one() {
        return Err(Error::precondition("bridges need congruences other than the full one"));
    }
    Ok(())
}

/// Anchors, trace and recomputable flags of a verified bridge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeCert {
    pub left: BinRel,
    pub right: BinRel,
    pub trace: BinRel,
    /// `A = B` and `0_A ⊆ tr(T)`.
    pub reflexive: bool,
    /// Both anchors are minimal in `Cov`.
    pub compact: bool,
    /// `None` unless both congruences are meet-irreducible.
    pub good: Option<bool>,
    /// `(a_i, b_i) ∈ tr(T)` for every member.
    pub b3: bool,
}

pub type Verdict = std::result::Result<BridgeCert, ConditionFailure>;

/// Checks every bridge condition and, if all hold, computes the certificate.
pub fn is_bridge(a: &FiniteAlgebra, rho: &Congruence, b: &FiniteAlgebra, sigma: &Congruence, t: &QuadRel) -> Result<Verdict> {
    check_context(a, rho, b, sigma)?;
    if t.dims() != (a.size(), b.size()) {
        return Err(Error::Invalid(format!("relation dimensions {:?} for algebras of sizes {}, {}", t.dims(), a.size(), b.size())));
    }
    if let Some(q) = subuniverse_witness(a, b, t)? {
        return Ok(Err(ConditionFailure::new("subuniverse", Some(q), "generated but missing")));
    }
    if let Some(f) = stability_failure(rho, sigma, t) {
        return Ok(Err(f));
    }
    let left = t.pr12();
    let right = t.pr34();
    let rho_rel = rho.to_rel();
    let sigma_rel = sigma.to_rel();
    if !rho_rel.is_subset(&left) || rho_rel == left {
        return Ok(Err(ConditionFailure::new("B1*", None, format!("ρ = {rho} is not properly inside pr12(T) = {left}"))));
    }
    if !sigma_rel.is_subset(&right) || sigma_rel == right {
        return Ok(Err(ConditionFailure::new("B1*", None, format!("σ = {sigma} is not properly inside pr34(T) = {right}"))));
    }
    if let Some(q) = t.quads().find(|q| rho.related(q[0], q[1]) != sigma.related(q[2], q[3])) {
        return Ok(Err(ConditionFailure::new("B2*", Some(q), "(a1,a2) ∈ ρ and (b1,b2) ∈ σ disagree")));
    }
    let trace = t.trace();
    let reflexive = a == b && (0..a.size()).all(|x| trace.contains(x, x));
    let compact = cov(a, rho)?.contains(&left) && cov(b, sigma)?.contains(&right);
    let good = if is_meet_irreducible(a, rho)? && is_meet_irreducible(b, sigma)? {
        Some(is_good(a, rho, b, sigma, t)?)
    } else {
        None
    };
    let b3 = b3_witness(t).is_none();
    Ok(Ok(BridgeCert { left, right, trace, reflexive, compact, good, b3 }))
}

/// [`is_bridge`] with failures turned into errors.
pub fn certify(a: &FiniteAlgebra, rho: &Congruence, b: &FiniteAlgebra, sigma: &Congruence, t: &QuadRel) -> Result<BridgeCert> {
    is_bridge(a, rho, b, sigma, t)?.map_err(|f| Error::Invalid(format!("not a bridge: {f}")))
}

fn stability_failure(rho: &Congruence, sigma: &Congruence, t: &QuadRel) -> Option<ConditionFailure> {
    for q in t.quads() {
        for i in 0..4 {
            let cong = if i < 2 { rho } else { sigma };
            for x in cong.class_of(q[i]) {
                let mut moved = q;
                moved[i] = x;
                if !t.contains(moved) {
                    return Some(ConditionFailure::new("B0*", Some(moved), format!("coordinate {} moved from {q:?}", i + 1)));
                }
            }
        }
    }
    None
}

/// A member `(a1,a2,b1,b2)` with `(a_i,a_i,b_i,b_i) ∉ T` for some `i`.
pub fn b3_witness(t: &QuadRel) -> Option<Quad> {
    t.quads().find(|q| !t.contains([q[0], q[0], q[2], q[2]]) || !t.contains([q[1], q[1], q[3], q[3]]))
}

/// `I_{(A,ρ,L)} = {(a1,a2,b1,b2) : (a1,a2),(b1,b2) ∈ L, (a1,b1),(a2,b2) ∈ ρ}`.
pub fn identity_bridge(alg: &FiniteAlgebra, rho: &Congruence, l: &BinRel) -> Result<QuadRel> {
    let n = alg.size();
    rho.verify(alg)?;
    if l.dims() != (n, n) {
        return Err(Error::Invalid("anchor has the wrong dimensions".into()));
    }
    if !is_saturated_subuniverse(alg, rho, l)? {
        return Err(Error::precondition(format!("{l} is not a ρ-saturated subuniverse")));
    }
    let rho_rel = rho.to_rel();
    if !rho_rel.is_subset(l) || rho_rel == *l {
        return Err(Error::precondition(format!("{l} does not properly contain ρ = {rho}")));
    }
    let mut t = QuadRel::empty(n, n);
    for (a1, a2) in l.pairs() {
        for b1 in rho.class_of(a1) {
            for b2 in rho.class_of(a2) {
                if l.contains(b1, b2) {
                    t.insert([a1, a2, b1, b2]);
                }
            }
        }
    }
    Ok(t)
}

pub fn converse(t: &QuadRel) -> QuadRel {
    t.converse()
}

/// Literal composition; the result is not certified.
pub fn compose(t: &QuadRel, t2: &QuadRel) -> Result<QuadRel> {
    t.compose(t2)
}

/// A reflexive bridge from `(A,ρ,τ)` to `(A,ρ,τ')` for `τ, τ' ∈ Cov⁺(ρ)`.
pub fn cross_cover_bridge(alg: &FiniteAlgebra, rho: &Congruence, tau: &BinRel, tau2: &BinRel) -> Result<QuadRel> {
    let covers = cov_plus(alg, rho)?;
    if !covers.contains(tau) || !covers.contains(tau2) {
        return Err(Error::precondition("anchors must belong to Cov⁺(ρ)"));
    }
    let id = identity_bridge(alg, rho, tau)?;
    if tau == tau2 {
        return Ok(id);
    }
    if *tau2 != tau.inverse() {
        return Err(Error::Internal(format!("Cov⁺({rho}) has members {tau} and {tau2} that are not mutually inverse")));
    }
    let n = alg.size();
    QuadRel::from_quads(n, n, id.quads().map(|[a1, a2, b1, b2]| [a1, a2, b2, b1]))
}

/// A bridge on the quotients together with the natural maps.
#[derive(Clone, Debug)]
pub struct Projected {
    pub a_bar: FiniteAlgebra,
    pub b_bar: FiniteAlgebra,
    pub qa: ElementMap,
    pub qb: ElementMap,
    pub t: QuadRel,
}

/// Image of a `(ρ,σ)`-stable relation in `A/ρ × A/ρ × B/σ × B/σ`.
pub fn project_bridge(a: &FiniteAlgebra, rho: &Congruence, b: &FiniteAlgebra, sigma: &Congruence, t: &QuadRel) -> Result<Projected> {
    check_context(a, rho, b, sigma)?;
    if let Some(f) = stability_failure(rho, sigma, t) {
        return Err(Error::precondition(format!("relation is not stable: {f}")));
    }
    let (a_bar, qa) = a.quotient(rho)?;
    let (b_bar, qb) = b.quotient(sigma)?;
    let tb = QuadRel::from_quads(
        a_bar.size(),
        b_bar.size(),
        t.quads().map(|q| [qa.apply(q[0]), qa.apply(q[1]), qb.apply(q[2]), qb.apply(q[3])]),
    )?;
    Ok(Projected { a_bar, b_bar, qa, qb, t: tb })
}

/// Full preimage of a relation on quotients.
pub fn lift_bridge(qa: &ElementMap, qb: &ElementMap, t_bar: &QuadRel) -> Result<QuadRel> {
    if t_bar.dims() != (qa.cod_size(), qb.cod_size()) {
        return Err(Error::Invalid("quotient maps do not match the relation".into()));
    }
    let (na, nb) = (qa.dom_size(), qb.dom_size());
    let mut t = QuadRel::empty(na, nb);
    for a1 in 0..na {
        for a2 in 0..na {
            for b1 in 0..nb {
                for b2 in 0..nb {
                    if t_bar.contains([qa.apply(a1), qa.apply(a2), qb.apply(b1), qb.apply(b2)]) {
                        t.insert([a1, a2, b1, b2]);
                    }
                }
            }
        }
    }
    Ok(t)
}

fn restrict_left(t: &QuadRel, l: &BinRel) -> QuadRel {
    let (na, nb) = t.dims();
    QuadRel::from_quads(na, nb, t.quads().filter(|q| l.contains(q[0], q[1]))).expect("in range")
}

fn restrict_right(t: &QuadRel, r: &BinRel) -> QuadRel {
    let (na, nb) = t.dims();
    QuadRel::from_quads(na, nb, t.quads().filter(|q| r.contains(q[2], q[3]))).expect("in range")
}

/// Restricts a bridge to left anchor `L' ∈ Cov(ρ)` and then to the first
/// right anchor in `Cov(σ)` that fits, keeping the trace.
pub fn compact_restrict(
    a: &FiniteAlgebra,
    rho: &Congruence,
    b: &FiniteAlgebra,
    sigma: &Congruence,
    t: &QuadRel,
    l_prime: &BinRel,
) -> Result<QuadRel> {
    let cert = certify(a, rho, b, sigma, t)?;
    if !cov(a, rho)?.contains(l_prime) {
        return Err(Error::precondition(format!("{l_prime} is not in Cov(ρ)")));
    }
    if !l_prime.is_subset(&cert.left) {
        return Err(Error::precondition(format!("{l_prime} is not inside the left anchor")));
    }
    let t1 = restrict_left(t, l_prime);
    let right1 = t1.pr34();
    let Some(r_prime) = cov(b, sigma)?.into_iter().find(|r| r.is_subset(&right1)) else {
        return Err(Error::violation("goodbridge", format!("no member of Cov(σ) inside {right1}")));
    };
    let t2 = restrict_right(&t1, &r_prime);
    let c2 = is_bridge(a, rho, b, sigma, &t2)?
        .map_err(|f| Error::violation("goodbridge", format!("restriction is not a bridge: {f}")))?;
    if !c2.compact || c2.left != *l_prime || c2.trace != cert.trace {
        return Err(Error::violation("goodbridge", "restriction is not compact with the original trace"));
    }
    Ok(t2)
}

/// `pr12(T ∩ (ρ⁺ × σ⁺)) ≠ ρ`.
pub fn is_good(a: &FiniteAlgebra, rho: &Congruence, b: &FiniteAlgebra, sigma: &Congruence, t: &QuadRel) -> Result<bool> {
    let rp = upper_cover(a, rho)?;
    let sp = upper_cover(b, sigma)?;
    let mut left = BinRel::empty(a.size(), a.size());
    for q in t.quads().filter(|q| rp.related(q[0], q[1]) && sp.related(q[2], q[3])) {
        left.insert(q[0], q[1]);
    }
    Ok(left != rho.to_rel())
}

/// `ρ⁺/ρ` is abelian.
pub fn cover_is_abelian(alg: &FiniteAlgebra, rho: &Congruence) -> Result<bool> {
    let plus = upper_cover(alg, rho)?;
    Commutator::new(alg).is_abelian_modulo(&plus, rho)
}

/// `Opt(ρ)` for meet-irreducible `ρ`, as the centralizer `(ρ:ρ⁺)`.
pub fn opt(alg: &FiniteAlgebra, rho: &Congruence, taylor: &TaylorWitness) -> Result<Congruence> {
    taylor.transfer(alg)?;
    let plus = upper_cover(alg, rho)?;
    Commutator::new(alg).centralizer(&plus, rho)
}

/// `Δ♭_{θ,α} = {(a1,a2,b1,b2) : ((a1,a2),(b1,b2)) ∈ Δ_{θ,α}}`.
pub fn delta_flat(alg: &FiniteAlgebra, theta: &Congruence, alpha: &Congruence) -> Result<QuadRel> {
    let ta = ThetaAlgebra::new(alg, theta)?;
    let d = ta.delta(alpha)?;
    let n = alg.size();
    let mut t = QuadRel::empty(n, n);
    for (i, j) in d.pairs() {
        let ((a1, a2), (b1, b2)) = (ta.pair(i), ta.pair(j));
        t.insert([a1, a2, b1, b2]);
    }
    Ok(t)
}

/// An optimal self-bridge of `(A,ρ)`.
#[derive(Clone, Debug)]
pub struct OptBridge {
    pub t: QuadRel,
    pub trace: Congruence,
    /// `ρ⁺/ρ` abelian; otherwise `t` is an identity bridge with trace `ρ`.
    pub abelian: bool,
    pub anchor: BinRel,
}

/// `I ∘ Δ♭_{ρ⁺,α} ∘ I` with `α = (ρ:ρ⁺)` when `ρ⁺/ρ` is abelian, else the
/// identity bridge on the first member of `Cov⁺(ρ)`. Certified either way.
pub fn opt_bridge(alg: &FiniteAlgebra, rho: &Congruence, taylor: &TaylorWitness) -> Result<OptBridge> {
    let alpha = opt(alg, rho, taylor)?;
    let plus = upper_cover(alg, rho)?;
    let abelian = Commutator::new(alg).is_abelian_modulo(&plus, rho)?;
    let (t, anchor, trace) = if abelian {
        let anchor = plus.to_rel();
        let id = identity_bridge(alg, rho, &anchor)?;
        let flat = delta_flat(alg, &plus, &alpha)?;
        (id.compose(&flat)?.compose(&id)?, anchor, alpha)
    } else {
        let anchor = cov_plus(alg, rho)?.into_iter().next().ok_or_else(|| Error::Internal(format!("Cov⁺({rho}) is empty")))?;
        (identity_bridge(alg, rho, &anchor)?, anchor, rho.clone())
    };
    let cert = is_bridge(alg, rho, alg, rho, &t)?
        .map_err(|f| Error::violation("opt2", format!("optimal bridge at {rho} in `{}`: {f}", alg.name())))?;
    if cert.good != Some(true) || !cert.reflexive || cert.trace != trace.to_rel() || cert.left != anchor {
        return Err(Error::violation("opt2", format!("optimal bridge at {rho} in `{}` has trace {}", alg.name(), cert.trace)));
    }
    Ok(OptBridge { t, trace, abelian, anchor })
}

/// Largest trace found by the brute-force `Opt(ρ,L)` search.
#[derive(Clone, Debug)]
pub struct BruteForce {
    pub trace: BinRel,
    pub witness: QuadRel,
    /// Distinct closed relations visited.
    pub visited: usize,
    /// True when extending by more generators cannot reach anything new.
    pub exhaustive: bool,
}

/// Lower bound for `Opt(ρ,L)`: closes `I_{(A,ρ,L)}` plus up to `budget`
/// extra quadruples (all of them when `budget` is `None`), keeps the
/// reflexive bridges with both anchors `L`, and closes their traces under
/// composition and inverse.
pub fn opt_bruteforce(alg: &FiniteAlgebra, rho: &Congruence, l: &BinRel, budget: Option<usize>, limits: &Limits) -> Result<BruteForce> {
    let n = alg.size();
    let base_rel = identity_bridge(alg, rho, l)?;
    let space = quad_space(alg, rho, alg, rho)?;
    let allowed = |c: &[usize]| l.contains(c[0], c[1]) && l.contains(c[2], c[3]) && rho.related(c[0], c[1]) == rho.related(c[2], c[3]);
    let base = space
        .closure_guarded(base_rel.bits().ones(), allowed)
        .map_err(|c| Error::Internal(format!("identity bridge generates {c:?}")))?;
    let candidates: Vec<usize> = (0..space.total()).filter(|&i| allowed(&space.decode(i)) && !base.contains(i)).collect();
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    seen.insert(base.bits().clone());
    let mut found: Vec<QuadRel> = vec![to_quadrel(alg, alg, &base)];
    let mut frontier = vec![base];
    let mut level = 0usize;
    let mut exhaustive = false;
    while budget.is_none_or(|k| level < k) {
        level += 1;
        let next: Vec<Vec<ClosedSet>> = frontier
            .par_iter()
            .map(|set| {
                candidates
                    .iter()
                    .filter(|&&q| !set.contains(q))
                    .filter_map(|&q| {
                        let mut ext = set.clone();
                        space.extend_guarded(&mut ext, [q], allowed).ok().map(|_| ext)
                    })
                    .collect()
            })
            .collect();
        let mut fresh = Vec::new();
        for set in next.into_iter().flatten() {
            if seen.insert(set.bits().clone()) {
                if seen.len() > limits.bridge_search_cap {
                    return Err(Error::ResourceCap { what: "brute-force bridge search".into(), cap: limits.bridge_search_cap });
                }
                found.push(to_quadrel(alg, alg, &set));
                fresh.push(set);
            }
        }
        if fresh.is_empty() {
            exhaustive = true;
            break;
        }
        frontier = fresh;
    }
    let visited = seen.len();
    let (trace, witness) = maximal_trace(found)?;
    let cert = is_bridge(alg, rho, alg, rho, &witness)?
        .map_err(|f| Error::Internal(format!("brute-force witness is not a bridge: {f}")))?;
    if !cert.reflexive || cert.left != *l || cert.right != *l || cert.trace != trace || trace.dims() != (n, n) {
        return Err(Error::Internal("brute-force witness does not match its trace".into()));
    }
    Ok(BruteForce { trace, witness, visited, exhaustive })
}

/// Closes traces of reflexive bridges under composition and inverse and
/// returns the largest, which must contain all others.
fn maximal_trace(bridges: Vec<QuadRel>) -> Result<(BinRel, QuadRel)> {
    let mut by_trace: HashMap<BinRel, QuadRel> = HashMap::new();
    let mut order: Vec<BinRel> = Vec::new();
    for t in bridges {
        let tr = t.trace();
        if let std::collections::hash_map::Entry::Vacant(e) = by_trace.entry(tr) {
            order.push(e.key().clone());
            e.insert(t);
        }
    }
    let mut i = 0;
    while i < order.len() {
        let ti = by_trace[&order[i]].clone();
        let mut new: Vec<(BinRel, QuadRel)> = vec![(order[i].inverse(), ti.converse())];
        for j in 0..=i {
            let tj = &by_trace[&order[j]];
            new.push((order[i].compose(&order[j])?, ti.compose(tj)?));
            new.push((order[j].compose(&order[i])?, tj.compose(&ti)?));
        }
        for (tr, t) in new {
            if let std::collections::hash_map::Entry::Vacant(e) = by_trace.entry(tr) {
                order.push(e.key().clone());
                e.insert(t);
            }
        }
        i += 1;
    }
    let top = order
        .iter()
        .find(|r| order.iter().all(|s| s.is_subset(r)))
        .cloned()
        .ok_or_else(|| Error::Internal("traces of reflexive bridges have no largest member".into()))?;
    let w = by_trace.remove(&top).expect("present");
    Ok((top, w))
}

/// `γ : A/α ≅ B/β` induced by a compact bridge with anchors in `Cov⁺`,
/// where `α = Opt(ρ)` and `β = Opt(σ)`.
#[allow(clippy::too_many_arguments)]
pub fn induced_iso(
    a: &FiniteAlgebra,
    rho: &Congruence,
    b: &FiniteAlgebra,
    sigma: &Congruence,
    t: &QuadRel,
    ta: &TaylorWitness,
    tb: &TaylorWitness,
) -> Result<ElementMap> {
    let cert = certify(a, rho, b, sigma, t)?;
    if !cert.compact {
        return Err(Error::precondition("bridge is not compact"));
    }
    let rp = upper_cover(a, rho)?.to_rel();
    let sp = upper_cover(b, sigma)?.to_rel();
    if !cert.left.is_subset(&rp) || !cert.right.is_subset(&sp) {
        return Err(Error::precondition("anchors are not in Cov⁺"));
    }
    let alpha = opt(a, rho, ta)?;
    let beta = opt(b, sigma, tb)?;
    let (aq, qa) = a.quotient(&alpha)?;
    let (bq, qb) = b.quotient(&beta)?;
    let mut image: Vec<Option<usize>> = vec![None; aq.size()];
    for (x, y) in cert.trace.pairs() {
        let (cx, cy) = (qa.apply(x), qb.apply(y));
        match image[cx] {
            None => image[cx] = Some(cy),
            Some(c) if c == cy => {}
            Some(c) => {
                return Err(Error::violation("modiso", format!("{x}/α maps to both classes {c} and {cy}")));
            }
        }
    }
    let values: Option<Vec<usize>> = image.into_iter().collect();
    let values = values.ok_or_else(|| Error::violation("modiso", "tr(T) does not reach every α-class"))?;
    let gamma = ElementMap::new(aq.size(), bq.size(), values)?;
    if !gamma.is_bijective() || !gamma.is_homomorphism(&aq, &bq) {
        return Err(Error::violation("modiso", "induced map is not an isomorphism"));
    }
    Ok(gamma)
}

/// Three-valued search result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search<T> {
    Found(T),
    /// A complete search found nothing.
    Absent,
    /// Stopped at the budget; says nothing about existence.
    BudgetExhausted,
}

impl<T> Search<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }
}

/// A reflexive good bridge from `(A,ρ)` to `(A,σ)`.
///
/// Tries the identity bridge when `ρ = σ`, then the similarity route, then
/// (with `budget ≥ 1`) every closure of the diagonal plus one quadruple
/// from `(ρ⁺∖ρ) × (σ⁺∖σ)`. The last sweep is complete: a reflexive good
/// bridge restricts to one with anchors inside the covers, and that one
/// contains such a closure.
pub fn adjacency_search(
    alg: &FiniteAlgebra,
    rho: &Congruence,
    sigma: &Congruence,
    wd: &WeakDifferenceWitness,
    budget: usize,
) -> Result<Search<QuadRel>> {
    let accept = |t: QuadRel| -> Result<Search<QuadRel>> {
        let cert = certify(alg, rho, alg, sigma, &t)?;
        if !cert.reflexive || cert.good != Some(true) {
            return Err(Error::Internal("adjacency witness is not a reflexive good bridge".into()));
        }
        Ok(Search::Found(t))
    };
    let rp = upper_cover(alg, rho)?;
    let sp = upper_cover(alg, sigma)?;
    if rho == sigma {
        let tau = cov_plus(alg, rho)?.into_iter().next().ok_or_else(|| Error::Internal("empty Cov⁺".into()))?;
        return accept(identity_bridge(alg, rho, &tau)?);
    }
    if let Some(g) = good_bridge_between(alg, rho, wd, alg, sigma, wd)? {
        if g.cert.reflexive {
            return accept(g.t);
        }
    }
    if budget == 0 {
        return Ok(Search::BudgetExhausted);
    }
    let n = alg.size();
    let space = quad_space(alg, rho, alg, sigma)?;
    let diag: Vec<usize> = (0..n).map(|x| space.encode(&[x, x, x, x])).collect();
    let b2 = |c: &[usize]| rho.related(c[0], c[1]) == sigma.related(c[2], c[3]);
    let base = space
        .closure_guarded(diag, b2)
        .map_err(|c| Error::Internal(format!("diagonal generates {c:?}")))?;
    for (a1, a2) in rp.pairs().filter(|&(x, y)| !rho.related(x, y)) {
        for (b1, b2_) in sp.pairs().filter(|&(x, y)| !sigma.related(x, y)) {
            let mut ext = base.clone();
            if space.extend_guarded(&mut ext, [space.encode(&[a1, a2, b1, b2_])], b2).is_ok() {
                return accept(to_quadrel(alg, alg, &ext));
            }
        }
    }
    Ok(Search::Absent)
}

/// Graph bridge of an isomorphism `γ : A/ρ ≅ B/σ`.
pub fn iso_graph_bridge(
    a: &FiniteAlgebra,
    rho: &Congruence,
    b: &FiniteAlgebra,
    sigma: &Congruence,
    gamma: &ElementMap,
) -> Result<QuadRel> {
    let (_, qa) = a.quotient(rho)?;
    let (_, qb) = b.quotient(sigma)?;
    if gamma.dom_size() != qa.cod_size() || gamma.cod_size() != qb.cod_size() {
        return Err(Error::Invalid("isomorphism does not match the quotients".into()));
    }
    let mut t = QuadRel::empty(a.size(), b.size());
    for a1 in 0..a.size() {
        for a2 in 0..a.size() {
            for b1 in 0..b.size() {
                for b2 in 0..b.size() {
                    if gamma.apply(qa.apply(a1)) == qb.apply(b1) && gamma.apply(qa.apply(a2)) == qb.apply(b2) {
                        t.insert([a1, a2, b1, b2]);
                    }
                }
            }
        }
    }
    Ok(t)
}

/// A certified good bridge with (B3) and anchors `ρ⁺`, `σ⁺`.
#[derive(Clone, Debug)]
pub struct GoodBridge {
    pub t: QuadRel,
    pub cert: BridgeCert,
    pub abelian: bool,
}

/// Builds a good bridge from `(A,ρ)` to `(B,σ)` exactly when `A/ρ ∼ B/σ`.
///
/// Nonabelian covers: the graph of `A/ρ ≅ B/σ` restricted to `ρ⁺`-pairs.
/// Abelian covers: `T_D(A/ρ) ∘ Γ_φ ∘ T_D(B/σ)^∪` on the quotients, lifted.
pub fn good_bridge_between(
    a: &FiniteAlgebra,
    rho: &Congruence,
    wa: &WeakDifferenceWitness,
    b: &FiniteAlgebra,
    sigma: &Congruence,
    wb: &WeakDifferenceWitness,
) -> Result<Option<GoodBridge>> {
    check_context(a, rho, b, sigma)?;
    let (a_bar, _) = a.quotient(rho)?;
    let (b_bar, _) = b.quotient(sigma)?;
    let da = build_d_of_si(&a_bar, &wa.transfer(&a_bar)?)?;
    let db = build_d_of_si(&b_bar, &wb.transfer(&b_bar)?)?;
    good_bridge_between_d(a, rho, &da, b, sigma, &db)
}

/// [`good_bridge_between`] given `D(A/ρ)` and `D(B/σ)`.
pub fn good_bridge_between_d(
    a: &FiniteAlgebra,
    rho: &Congruence,
    da: &SiD,
    b: &FiniteAlgebra,
    sigma: &Congruence,
    db: &SiD,
) -> Result<Option<GoodBridge>> {
    check_context(a, rho, b, sigma)?;
    let rp = upper_cover(a, rho)?;
    let sp = upper_cover(b, sigma)?;
    let (a_bar, qa) = a.quotient(rho)?;
    let (b_bar, qb) = b.quotient(sigma)?;
    let Some(phi) = da.d.find_isomorphism(&db.d)? else {
        return Ok(None);
    };
    if da.abelian != db.abelian {
        return Err(Error::Internal("similar quotients with abelian and nonabelian monoliths".into()));
    }
    let abelian = da.abelian;
    let t = if !abelian {
        let graph = iso_graph_bridge(a, rho, b, sigma, &phi)?;
        restrict_left(&graph, &rp.to_rel())
    } else {
        let ta = t_da_from(&a_bar, da)?;
        let tb = t_da_from(&b_bar, db)?;
        let (m1, m2) = (ta.d.d.size(), tb.d.d.size());
        let mut gamma = QuadRel::empty(m1, m2);
        for (d1, d2) in ta.d.dmon.pairs() {
            gamma.insert([d1, d2, phi.apply(d1), phi.apply(d2)]);
        }
        let t_bar = ta.t.compose(&gamma)?.compose(&tb.t.converse())?;
        lift_bridge(&qa, &qb, &t_bar)?
    };
    let cert = is_bridge(a, rho, b, sigma, &t)?
        .map_err(|f| Error::violation("zhukequiv", format!("constructed relation is not a bridge: {f}")))?;
    if cert.good != Some(true) || !cert.b3 || cert.left != rp.to_rel() || cert.right != sp.to_rel() {
        return Err(Error::violation("zhukequiv", "constructed bridge is not good with (B3) and cover anchors"));
    }
    Ok(Some(GoodBridge { t, cert, abelian }))
}

/// Minimal subdirect subuniverses of `A × B`.
fn minimal_subdirect(a: &FiniteAlgebra, b: &FiniteAlgebra, limits: &Limits) -> Result<Option<Vec<BinRel>>> {
    let space = PowerSpace::new(vec![a, b])?;
    let (na, nb) = (a.size(), b.size());
    let subdirect = |s: &ClosedSet| {
        let mut left = vec![false; na];
        let mut right = vec![false; nb];
        for &i in s.indices() {
            left[i / nb] = true;
            right[i % nb] = true;
        }
        !left.contains(&false) && !right.contains(&false)
    };
    let start = space.closure(std::iter::empty());
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    seen.insert(start.bits().clone());
    let mut hits: Vec<BinRel> = Vec::new();
    let mut frontier = vec![start];
    while let Some(set) = frontier.pop() {
        if subdirect(&set) {
            hits.push(BinRel::from_bits(na, nb, set.bits().clone()));
            continue;
        }
        for p in 0..na * nb {
            if set.contains(p) {
                continue;
            }
            let ext = space.extend(&set, [p]);
            if seen.insert(ext.bits().clone()) {
                if seen.len() > limits.bridge_search_cap {
                    return Ok(None);
                }
                frontier.push(ext);
            }
        }
    }
    let minimal: Vec<BinRel> = hits.iter().filter(|r| !hits.iter().any(|s| s != *r && s.is_subset(r))).cloned().collect();
    Ok(Some(minimal))
}

/// Complete search for a good bridge from `(A,ρ)` to `(B,σ)`, independent
/// of similarity.
///
/// On the quotients, a good bridge contains the closure of
/// `{(x,x,y,y) : (x,y) ∈ R} ∪ {q}` for some minimal subdirect `R ≤ A/ρ × B/σ`
/// and some `q` with `q₁ ≠ q₂` in the monoliths; conversely any such
/// closure satisfying (B2*) is a good bridge. All pairs `(R, q)` are tried.
pub fn search_good_bridge(
    a: &FiniteAlgebra,
    rho: &Congruence,
    b: &FiniteAlgebra,
    sigma: &Congruence,
    limits: &Limits,
) -> Result<Search<QuadRel>> {
    check_context(a, rho, b, sigma)?;
    let rp = upper_cover(a, rho)?;
    let sp = upper_cover(b, sigma)?;
    let (a_bar, qa) = a.quotient(rho)?;
    let (b_bar, qb) = b.quotient(sigma)?;
    let mu = rp.push_forward(&qa);
    let nu = sp.push_forward(&qb);
    let Some(traces) = minimal_subdirect(&a_bar, &b_bar, limits)? else {
        return Ok(Search::BudgetExhausted);
    };
    let (z_a, z_b) = (Congruence::zero(a_bar.size()), Congruence::zero(b_bar.size()));
    let space = quad_space(&a_bar, &z_a, &b_bar, &z_b)?;
    let b2 = |c: &[usize]| (c[0] == c[1]) == (c[2] == c[3]);
    for r in &traces {
        let seeds: Vec<usize> = r.pairs().map(|(x, y)| space.encode(&[x, x, y, y])).collect();
        let Ok(base) = space.closure_guarded(seeds, b2) else {
            continue;
        };
        for (x1, x2) in mu.pairs().filter(|&(x, y)| x != y) {
            for (y1, y2) in nu.pairs().filter(|&(x, y)| x != y) {
                let mut ext = base.clone();
                if space.extend_guarded(&mut ext, [space.encode(&[x1, x2, y1, y2])], b2).is_ok() {
                    let t = lift_bridge(&qa, &qb, &to_quadrel(&a_bar, &b_bar, &ext))?;
                    let cert = certify(a, rho, b, sigma, &t)?;
                    if cert.good != Some(true) {
                        return Err(Error::Internal("search produced a bridge that is not good".into()));
                    }
                    return Ok(Search::Found(t));
                }
            }
        }
    }
    Ok(Search::Absent)
}

/// Result of extracting a (B3) bridge.
#[derive(Clone, Debug)]
pub struct B3Extraction {
    /// `T^opt_(A,ρ) ∘ T ∘ T^opt_(B,σ)`.
    pub t_prime: QuadRel,
    pub t1: QuadRel,
    pub generator: Quad,
}

/// From a bridge `T` from `(A,ρ,ρ⁺)` to `(B,σ,σ⁺)` with abelian covers,
/// finds `T₁ ⊆ T'` with anchors `ρ⁺`, `σ⁺`, trace `tr(T')` and (B3).
#[allow(clippy::too_many_arguments)]
pub fn extract_b3(
    a: &FiniteAlgebra,
    rho: &Congruence,
    b: &FiniteAlgebra,
    sigma: &Congruence,
    t: &QuadRel,
    ta: &TaylorWitness,
    tb: &TaylorWitness,
) -> Result<B3Extraction> {
    let cert = certify(a, rho, b, sigma, t)?;
    let rp = upper_cover(a, rho)?;
    let sp = upper_cover(b, sigma)?;
    if cert.left != rp.to_rel() || cert.right != sp.to_rel() {
        return Err(Error::precondition("anchors must be the upper covers"));
    }
    let oa = opt_bridge(a, rho, ta)?;
    let ob = opt_bridge(b, sigma, tb)?;
    if !oa.abelian || !ob.abelian {
        return Err(Error::precondition("both covers must be abelian"));
    }
    let t_prime = oa.t.compose(t)?.compose(&ob.t)?;
    let tr = t_prime.trace();
    let fail = |what: String| Err(Error::violation("samebridge", format!("`{}` {rho} to `{}` {sigma}: {what}", a.name(), b.name())));
    let Some(generator) = t_prime.quads().find(|q| !rho.related(q[0], q[1]) && tr.contains(q[0], q[2])) else {
        return fail("no quadruple with (a1,a2) ∉ ρ and (a1,b1) ∈ tr(T')".into());
    };
    let seeds = tr.pairs().map(|(x, y)| [x, x, y, y]).chain([generator]);
    let t1 = saturated_closure(a, rho, b, sigma, seeds)?;
    if !t1.is_subset(&t_prime) {
        return fail("T1 is not inside T'".into());
    }
    match is_bridge(a, rho, b, sigma, &t1)? {
        Err(f) => return fail(format!("T1 is not a bridge: {f}")),
        Ok(c) => {
            if c.left != rp.to_rel() || c.right != sp.to_rel() {
                return fail("T1 anchors are not the covers".into());
            }
            if c.trace != tr {
                return fail("T1 trace differs from tr(T')".into());
            }
            if !c.b3 {
                return fail("T1 violates (B3)".into());
            }
        }
    }
    Ok(B3Extraction { t_prime, t1, generator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::terms::Term;

    fn taylor(alg: &FiniteAlgebra) -> TaylorWitness {
        // p is Maltsev on the affine algebras and a ternary WNU elsewhere.
        let p = Term::basic(alg, 0);
        TaylorWitness::from_maltsev(alg, p.clone()).or_else(|_| TaylorWitness::from_wnu(alg, Term::basic(alg, 1), 2)).unwrap()
    }

    fn wd(alg: &FiniteAlgebra) -> WeakDifferenceWitness {
        WeakDifferenceWitness::new(alg, Term::basic(alg, 0)).unwrap()
    }

    fn zero(n: usize) -> Congruence {
        Congruence::zero(n)
    }

    fn eta4() -> Congruence {
        Congruence::parse("|0 2|1 3|").unwrap()
    }

    /// Every quadruple over `A⁴`, filtered by a predicate.
    fn enumerate(n: usize, m: usize, keep: impl Fn(Quad) -> bool) -> QuadRel {
        let mut t = QuadRel::empty(n, m);
        for a1 in 0..n {
            for a2 in 0..n {
                for b1 in 0..m {
                    for b2 in 0..m {
                        if keep([a1, a2, b1, b2]) {
                            t.insert([a1, a2, b1, b2]);
                        }
                    }
                }
            }
        }
        t
    }

    #[test]
    fn identity_and_parity_bridges() {
        let z2 = builtin::z2aff();
        let full = BinRel::full(2, 2);
        let id = identity_bridge(&z2, &zero(2), &full).unwrap();
        assert_eq!(id, enumerate(2, 2, |q| q[0] == q[2] && q[1] == q[3]));
        let c = certify(&z2, &zero(2), &z2, &zero(2), &id).unwrap();
        assert_eq!((c.left.clone(), c.trace.clone()), (full.clone(), BinRel::diagonal(2)));

        let flat = delta_flat(&z2, &Congruence::one(2), &Congruence::one(2)).unwrap();
        assert_eq!(flat, enumerate(2, 2, |q| q[0] ^ q[1] == q[2] ^ q[3]));
        let c = certify(&z2, &zero(2), &z2, &zero(2), &flat).unwrap();
        assert_eq!(c.trace, full);
        assert_eq!(c.good, Some(true));

        let f = is_bridge(&z2, &zero(2), &z2, &zero(2), &QuadRel::full(2, 2)).unwrap().unwrap_err();
        assert_eq!((f.condition.as_str(), f.quad), ("B2*", Some([0, 0, 0, 1])));
    }

    #[test]
    fn converse_and_compose_laws() {
        let z4 = builtin::z4aff();
        let t = opt_bridge(&z4, &zero(4), &taylor(&z4)).unwrap().t;
        assert_eq!(converse(&converse(&t)), t);
        let id = identity_bridge(&z4, &zero(4), &eta4().to_rel()).unwrap();
        assert_eq!(compose(&id, &t).unwrap(), t);
        let tc = t.compose(&t).unwrap();
        assert_eq!(tc.trace(), t.trace().compose(&t.trace()).unwrap());
    }

    #[test]
    fn project_and_lift() {
        let z4 = builtin::z4aff();
        let t = opt_bridge(&z4, &eta4(), &taylor(&z4)).unwrap().t;
        let p = project_bridge(&z4, &eta4(), &z4, &eta4(), &t).unwrap();
        assert_eq!(p.a_bar.size(), 2);
        let z2 = builtin::z2aff();
        assert!(p.a_bar.find_isomorphism(&z2).unwrap().is_some());
        assert!(certify(&p.a_bar, &zero(2), &p.b_bar, &zero(2), &p.t).is_ok());
        assert_eq!(lift_bridge(&p.qa, &p.qb, &p.t).unwrap(), t);

        let flat = opt_bridge(&z4, &zero(4), &taylor(&z4)).unwrap().t;
        let p0 = project_bridge(&z4, &zero(4), &z4, &zero(4), &flat).unwrap();
        assert_eq!(p0.t, flat);

        // Identity bridge on (A, ρ, ρ⁺) projects to the one on (A/ρ, 0, ρ⁺/ρ).
        let sq = builtin::z2aff_sq();
        let rho = Congruence::parse("|0 1|2 3|").unwrap();
        let id = identity_bridge(&sq, &rho, &Congruence::one(4).to_rel()).unwrap();
        let p = project_bridge(&sq, &rho, &sq, &rho, &id).unwrap();
        assert_eq!(p.t, identity_bridge(&p.a_bar, &zero(2), &BinRel::full(2, 2)).unwrap());
    }

    #[test]
    fn opt_examples() {
        let (s2, z2, z4) = (builtin::s2(), builtin::z2aff(), builtin::z4aff());
        assert_eq!(opt(&s2, &zero(2), &taylor(&s2)).unwrap(), zero(2));
        assert!(opt(&z2, &zero(2), &taylor(&z2)).unwrap().is_one());
        assert!(opt(&z4, &eta4(), &taylor(&z4)).unwrap().is_one());

        let ob = opt_bridge(&z2, &zero(2), &taylor(&z2)).unwrap();
        assert_eq!(ob.t, enumerate(2, 2, |q| q[0] ^ q[1] == q[2] ^ q[3]));
        let ob = opt_bridge(&z4, &zero(4), &taylor(&z4)).unwrap();
        let half = |x: usize, y: usize| ((y + 4 - x) % 4) / 2;
        assert_eq!(
            ob.t,
            enumerate(4, 4, |q| (q[0] + q[1]) % 2 == 0 && (q[2] + q[3]) % 2 == 0 && half(q[0], q[1]) == half(q[2], q[3]))
        );
        let ob = opt_bridge(&s2, &zero(2), &taylor(&s2)).unwrap();
        assert!(!ob.abelian);
        assert_eq!(ob.trace, zero(2));
    }

    #[test]
    fn bruteforce_examples() {
        let (s2, z2, z4) = (builtin::s2(), builtin::z2aff(), builtin::z4aff());
        let bf = opt_bruteforce(&z2, &zero(2), &BinRel::full(2, 2), None, &Limits::DEFAULT).unwrap();
        assert!(bf.exhaustive);
        assert_eq!(bf.trace, BinRel::full(2, 2));
        let le = cov_plus(&s2, &zero(2)).unwrap();
        for l in &le {
            let bf = opt_bruteforce(&s2, &zero(2), l, None, &Limits::DEFAULT).unwrap();
            assert!(bf.exhaustive);
            assert_eq!(bf.trace, BinRel::diagonal(2));
        }
        let bf = opt_bruteforce(&z4, &zero(4), &eta4().to_rel(), Some(2), &Limits::DEFAULT).unwrap();
        assert_eq!(bf.trace, BinRel::full(4, 4));
    }

    #[test]
    fn cross_cover() {
        let s2 = builtin::s2();
        let covers = cov_plus(&s2, &zero(2)).unwrap();
        assert_eq!(covers.len(), 2);
        let t = cross_cover_bridge(&s2, &zero(2), &covers[0], &covers[1]).unwrap();
        let c = certify(&s2, &zero(2), &s2, &zero(2), &t).unwrap();
        assert!(c.reflexive);
        assert_eq!((c.left.clone(), c.right.clone()), (covers[0].clone(), covers[1].clone()));
        let same = cross_cover_bridge(&s2, &zero(2), &covers[0], &covers[0]).unwrap();
        assert_eq!(same, identity_bridge(&s2, &zero(2), &covers[0]).unwrap());
    }

    #[test]
    fn compact_restriction() {
        let z2 = builtin::z2aff();
        let flat = opt_bridge(&z2, &zero(2), &taylor(&z2)).unwrap().t;
        assert_eq!(compact_restrict(&z2, &zero(2), &z2, &zero(2), &flat, &BinRel::full(2, 2)).unwrap(), flat);

        // Z4aff: a bridge whose anchors exceed η, restricted to η.
        let z4 = builtin::z4aff();
        let t = opt_bridge(&z4, &zero(4), &taylor(&z4)).unwrap().t;
        let padded = saturated_closure(&z4, &zero(4), &z4, &zero(4), t.quads().chain([[0, 1, 0, 1]])).unwrap();
        let cert = certify(&z4, &zero(4), &z4, &zero(4), &padded).unwrap();
        assert!(!cert.compact);
        let r = compact_restrict(&z4, &zero(4), &z4, &zero(4), &padded, &eta4().to_rel()).unwrap();
        assert!(r.len() < padded.len());
        assert_eq!(r.trace(), cert.trace);
    }

    #[test]
    fn induced_isomorphisms() {
        let z4 = builtin::z4aff();
        let shift = ElementMap::new(4, 4, vec![1, 2, 3, 0]).unwrap();
        let graph = iso_graph_bridge(&z4, &zero(4), &z4, &zero(4), &shift).unwrap();
        assert!(is_good(&z4, &zero(4), &z4, &zero(4), &graph).unwrap());
        let r = compact_restrict(&z4, &zero(4), &z4, &zero(4), &graph, &eta4().to_rel()).unwrap();
        let gamma = induced_iso(&z4, &zero(4), &z4, &zero(4), &r, &taylor(&z4), &taylor(&z4)).unwrap();
        // Opt(0) = 1, so both quotients are trivial.
        assert_eq!(gamma.values(), &[0]);
    }

    #[test]
    fn good_bridges_between_examples() {
        let (s2, z2, z4) = (builtin::s2(), builtin::z2aff(), builtin::z4aff());
        let g = good_bridge_between(&z2, &zero(2), &wd(&z2), &z4, &zero(4), &wd(&z4)).unwrap().unwrap();
        assert!(g.abelian && g.cert.b3);
        assert!(good_bridge_between(&s2, &zero(2), &wd(&s2), &z2, &zero(2), &wd(&z2)).unwrap().is_none());
        let g = good_bridge_between(&s2, &zero(2), &wd(&s2), &s2, &zero(2), &wd(&s2)).unwrap().unwrap();
        assert!(!g.abelian);
        assert!(matches!(search_good_bridge(&z2, &zero(2), &z4, &zero(4), &Limits::DEFAULT).unwrap(), Search::Found(_)));
        assert_eq!(search_good_bridge(&s2, &zero(2), &z2, &zero(2), &Limits::DEFAULT).unwrap(), Search::Absent);
    }

    #[test]
    fn adjacency() {
        let z4 = builtin::z4aff();
        let t = adjacency_search(&z4, &zero(4), &zero(4), &wd(&z4), 0).unwrap();
        assert!(matches!(t, Search::Found(_)));
        let r = adjacency_search(&z4, &zero(4), &eta4(), &wd(&z4), 1).unwrap();
        // Both Opts are 1; any witness is consistent.
        assert_ne!(r, Search::BudgetExhausted);
    }

    #[test]
    fn b3_extraction() {
        let z2 = builtin::z2aff();
        let flat = opt_bridge(&z2, &zero(2), &taylor(&z2)).unwrap().t;
        let x = extract_b3(&z2, &zero(2), &z2, &zero(2), &flat, &taylor(&z2), &taylor(&z2)).unwrap();
        assert_eq!(x.t1.trace(), BinRel::full(2, 2));

        // a2 - a1 = b2 - b1 = 2(b1 - a1): a bridge at (Z4aff, 0) violating (B3).
        let z4 = builtin::z4aff();
        let twisted = enumerate(4, 4, |q| {
            let k = (q[1] + 4 - q[0]) % 4;
            k == (q[3] + 4 - q[2]) % 4 && k == (2 * (q[2] + 4 - q[0])) % 4
        });
        let c = certify(&z4, &zero(4), &z4, &zero(4), &twisted).unwrap();
        assert!(!c.b3);
        let x = extract_b3(&z4, &zero(4), &z4, &zero(4), &twisted, &taylor(&z4), &taylor(&z4)).unwrap();
        assert!(x.t1.is_subset(&x.t_prime));
        assert!(b3_witness(&x.t1).is_none());
    }

    mod props {
        use super::*;
        use crate::congruence::meet_irreducibles;
        use proptest::prelude::*;

        /// Identity bridge on `ρ⁺` of a builtin algebra plus a few random
        /// quadruples with `a₁ ρ a₂ ⇔ b₁ σ b₂`, closed up.
        fn random_self_bridge() -> impl Strategy<Value = (FiniteAlgebra, Congruence, QuadRel)> {
            let algs = vec![builtin::z2aff(), builtin::z3aff(), builtin::z4aff(), builtin::s2(), builtin::z2aff_x_s2()];
            (proptest::sample::select(algs), any::<prop::sample::Index>(), prop::collection::vec(any::<[u8; 4]>(), 0..3)).prop_map(
                |(alg, pick, raw)| {
                    let mis = meet_irreducibles(&alg).unwrap();
                    let (rho, plus) = mis[pick.index(mis.len())].clone();
                    let n = alg.size();
                    let mut seeds: Vec<Quad> = identity_bridge(&alg, &rho, &plus.to_rel()).unwrap().quads().collect();
                    for r in raw {
                        let q = r.map(|x| x as usize % n);
                        if rho.related(q[0], q[1]) == rho.related(q[2], q[3]) {
                            seeds.push(q);
                        }
                    }
                    let t = saturated_closure(&alg, &rho, &alg, &rho, seeds).unwrap();
                    (alg, rho, t)
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn closure_is_idempotent((alg, rho, t) in random_self_bridge()) {
                let again = saturated_closure(&alg, &rho, &alg, &rho, t.quads()).unwrap();
                prop_assert_eq!(&again, &t);
                prop_assert!(subuniverse_witness(&alg, &alg, &t).unwrap().is_none());
            }

            #[test]
            fn converse_and_composition_laws((alg, rho, t) in random_self_bridge()) {
                let Ok(cert) = is_bridge(&alg, &rho, &alg, &rho, &t).unwrap() else {
                    return Ok(());
                };
                let c = converse(&t);
                let cc = is_bridge(&alg, &rho, &alg, &rho, &c).unwrap();
                prop_assert!(cc.is_ok());
                let cc = cc.unwrap();
                prop_assert_eq!(&cc.trace, &cert.trace.inverse());
                prop_assert_eq!(&cc.left, &cert.right);
                prop_assert_eq!(&converse(&c), &t);
                let tt = compose(&t, &c).unwrap();
                prop_assert_eq!(tt.trace(), cert.trace.compose(&cert.trace.inverse()).unwrap());
            }

            #[test]
            fn projection_round_trips((alg, rho, t) in random_self_bridge()) {
                let p = project_bridge(&alg, &rho, &alg, &rho, &t).unwrap();
                prop_assert!(p.qa.is_homomorphism(&alg, &p.a_bar));
                prop_assert_eq!(lift_bridge(&p.qa, &p.qb, &p.t).unwrap(), t);
            }
        }
    }
}
