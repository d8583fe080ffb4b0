//! Partitions, congruence generation, congruence lattices, and the
//! saturated-relation machinery built on top of them (covers, irreducibility,
//! minimal sets and traces).

use std::fmt;

use crate::algebra::FiniteAlgebra;
use crate::closure::PowerSpace;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relation::BinRel;

/// A partition stored as the least element of each element's block.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    repr: Vec<usize>,
}

impl Congruence {
    pub fn zero(n: usize) -> Self {
        Congruence { repr: (0..n).collect() }
    }

    pub fn one(n: usize) -> Self {
        Congruence { repr: vec![0; n] }
    }

    pub fn from_repr(repr: Vec<usize>) -> Result<Self> {
        for (i, &r) in repr.iter().enumerate() {
            if r > i || repr[r] != r {
                return Err(Error::Invalid(format!("not a canonical block map at {i}")));
            }
        }
        Ok(Congruence { repr })
    }

    /// Partition whose blocks are the given sets; unlisted elements are singletons.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut uf = UnionFind::new(n);
        for b in blocks {
            for &a in b {
                if a >= n {
                    return Err(Error::OutOfRange { value: a, size: n });
                }
                uf.union(b[0], a);
            }
        }
        Ok(uf.into_congruence())
    }

    /// Least equivalence relation containing the pairs (no compatibility).
    pub fn equivalence_generated(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut uf = UnionFind::new(n);
        for (a, b) in pairs {
            uf.union(a, b);
        }
        uf.into_congruence()
    }

    /// Parses `|0 2|1 3|`. The universe size is the number of listed elements.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let inner = t
            .strip_prefix('|')
            .and_then(|s| s.strip_suffix('|'))
            .ok_or_else(|| Error::Parse(format!("partition `{text}` must look like |0 2|1 3|")))?;
        let mut blocks = Vec::new();
        let mut seen = Vec::new();
        for part in inner.split('|') {
            let mut block = Vec::new();
            for tok in part.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| Error::Parse(format!("bad element `{tok}`")))?;
                block.push(v);
                seen.push(v);
            }
            if block.is_empty() {
                return Err(Error::Parse(format!("empty block in `{text}`")));
            }
            blocks.push(block);
        }
        let n = seen.len();
        seen.sort_unstable();
        if seen.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::Parse(format!("`{text}` must list each of 0..{n} exactly once")));
        }
        Congruence::from_blocks(n, &blocks)
    }

    /// Parses a partition and checks it is a congruence of `alg`.
    pub fn parse_for(alg: &FiniteAlgebra, text: &str) -> Result<Self> {
        let c = Congruence::parse(text)?;
        c.verify(alg)?;
        Ok(c)
    }

    pub fn verify(&self, alg: &FiniteAlgebra) -> Result<()> {
        if self.size() != alg.size() {
            return Err(Error::NotCongruence(format!(
                "partition of {} elements for algebra of size {}",
                self.size(),
                alg.size()
            )));
        }
        match self.compatibility_witness(alg) {
            Some(w) => Err(Error::NotCongruence(w)),
            None => Ok(()),
        }
    }

    /// Describes a failure of compatibility, if any.
    pub fn compatibility_witness(&self, alg: &FiniteAlgebra) -> Option<String> {
        let n = alg.size();
        if self.size() != n {
            return Some("size mismatch".into());
        }
        for op in alg.ops() {
            let k = op.arity;
            let mut args = vec![0; k];
            for idx in 0..op.table.len() {
                let mut rest = idx;
                for slot in args.iter_mut().rev() {
                    *slot = rest % n;
                    rest /= n;
                }
                let v = op.table[idx];
                for i in 0..k {
                    let saved = args[i];
                    args[i] = self.repr[saved];
                    let w = op.table[FiniteAlgebra::index_of_args(n, &args)];
                    args[i] = saved;
                    if self.repr[v] != self.repr[w] {
                        let mut moved = args.clone();
                        moved[i] = self.repr[saved];
                        return Some(format!("{}{:?} = {} but {}{:?} = {}", op.name, args, v, op.name, moved, w));
                    }
                }
            }
        }
        None
    }

    pub fn size(&self) -> usize {
        self.repr.len()
    }

    #[inline]
    pub fn repr(&self, a: usize) -> usize {
        self.repr[a]
    }

    pub fn repr_array(&self) -> &[usize] {
        &self.repr
    }

    #[inline]
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.repr[a] == self.repr[b]
    }

    /// Least elements of the blocks, ascending.
    pub fn representatives(&self) -> Vec<usize> {
        (0..self.size()).filter(|&a| self.repr[a] == a).collect()
    }

    pub fn num_blocks(&self) -> usize {
        (0..self.size()).filter(|&a| self.repr[a] == a).count()
    }

    /// Blocks ordered by least element, elements ascending.
    pub fn class_lists(&self) -> Vec<Vec<usize>> {
        let reps = self.representatives();
        let mut out = vec![Vec::new(); reps.len()];
        for a in 0..self.size() {
            let ci = reps.binary_search(&self.repr[a]).expect("representative");
            out[ci].push(a);
        }
        out
    }

    pub fn class_of(&self, a: usize) -> Vec<usize> {
        (0..self.size()).filter(|&b| self.related(a, b)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.repr.iter().enumerate().all(|(i, &r)| i == r)
    }

    pub fn is_one(&self) -> bool {
        self.repr.iter().all(|&r| r == 0)
    }

    /// Refinement order.
    pub fn is_below(&self, other: &Congruence) -> bool {
        self.size() == other.size() && (0..self.size()).all(|a| other.related(a, self.repr[a]))
    }

    pub fn is_strictly_below(&self, other: &Congruence) -> bool {
        self.is_below(other) && self != other
    }

    pub fn join(&self, other: &Congruence) -> Congruence {
        let mut uf = UnionFind::new(self.size());
        for a in 0..self.size() {
            uf.union(a, self.repr[a]);
            uf.union(a, other.repr[a]);
        }
        uf.into_congruence()
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let n = self.size();
        let repr = (0..n)
            .map(|a| (0..=a).find(|&b| self.related(a, b) && other.related(a, b)).expect("reflexive"))
            .collect();
        Congruence { repr }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.size();
        (0..n * n).map(move |i| (i / n, i % n)).filter(move |&(a, b)| self.related(a, b))
    }

    pub fn num_pairs(&self) -> usize {
        self.class_lists().iter().map(|c| c.len() * c.len()).sum()
    }

    pub fn to_rel(&self) -> BinRel {
        BinRel::from_congruence(self)
    }

    /// Image of this partition along a map (the blocks of `map(a) ~ map(b)`
    /// for related `a, b`), as an equivalence on the codomain.
    pub fn push_forward(&self, map: &crate::algebra::ElementMap) -> Congruence {
        Congruence::equivalence_generated(map.cod_size(), (0..self.size()).map(|a| (map.apply(a), map.apply(self.repr[a]))))
    }

    /// Preimage along a map.
    pub fn pull_back(&self, map: &crate::algebra::ElementMap) -> Congruence {
        let n = map.dom_size();
        let repr = (0..n)
            .map(|a| (0..=a).find(|&b| self.related(map.apply(a), map.apply(b))).expect("reflexive"))
            .collect();
        Congruence { repr }
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for block in self.class_lists() {
            let items: Vec<String> = block.iter().map(|a| a.to_string()).collect();
            write!(f, "{}|", items.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Merges the classes; the root is always the smaller element. Returns
    /// whether anything changed.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn into_congruence(mut self) -> Congruence {
        let n = self.parent.len();
        let repr = (0..n).map(|a| self.find(a)).collect();
        Congruence { repr }
    }
}

impl FiniteAlgebra {
    #[inline]
    pub(crate) fn index_of_args(n: usize, args: &[usize]) -> usize {
        crate::algebra::Operation::index_of(n, args)
    }
}

/// Least congruence containing the given pairs.
///
/// Every merged pair is pushed through all basic translations
/// `x -> f(c_1, .., x, .., c_k)`, merging the images; terminates after at
/// most `n - 1` merges.
pub fn cg(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Result<Congruence> {
    let n = alg.size();
    for &(a, b) in pairs {
        alg.check_elements(&[a, b])?;
    }
    let mut uf = UnionFind::new(n);
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a, b) {
            queue.push((a, b));
        }
    }
    let mut args = Vec::new();
    while let Some((a, b)) = queue.pop() {
        for op in alg.ops() {
            let k = op.arity;
            if k == 0 {
                continue;
            }
            args.resize(k, 0);
            let others = n.pow(k as u32 - 1);
            for i in 0..k {
                for idx in 0..others {
                    let mut rest = idx;
                    for q in (0..k).rev() {
                        if q == i {
                            continue;
                        }
                        args[q] = rest % n;
                        rest /= n;
                    }
                    args[i] = a;
                    let x = op.table[FiniteAlgebra::index_of_args(n, &args)];
                    args[i] = b;
                    let y = op.table[FiniteAlgebra::index_of_args(n, &args)];
                    if uf.union(x, y) {
                        queue.push((x, y));
                    }
                }
            }
        }
    }
    Ok(uf.into_congruence())
}

/// The congruence lattice with its covering relation.
#[derive(Clone, Debug)]
pub struct ConLattice {
    /// Sorted by number of blocks descending, then block map.
    pub congruences: Vec<Congruence>,
    /// Pairs `(lower, upper)` of indices with `lower ≺ upper`.
    pub covers: Vec<(usize, usize)>,
}

impl ConLattice {
    pub fn len(&self) -> usize {
        self.congruences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.congruences.is_empty()
    }

    pub fn index_of(&self, c: &Congruence) -> Option<usize> {
        self.congruences.iter().position(|x| x == c)
    }

    pub fn upper_covers(&self, i: usize) -> Vec<usize> {
        self.covers.iter().filter(|&&(lo, _)| lo == i).map(|&(_, hi)| hi).collect()
    }

    pub fn lower_covers(&self, i: usize) -> Vec<usize> {
        self.covers.iter().filter(|&&(_, hi)| hi == i).map(|&(lo, _)| lo).collect()
    }

    /// Indices `(ρ, ρ⁺)` of meet-irreducible congruences.
    pub fn meet_irreducible_indices(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter_map(|i| match self.upper_covers(i).as_slice() {
                [up] => Some((i, *up)),
                _ => None,
            })
            .collect()
    }

    pub fn is_chain(&self) -> bool {
        (0..self.len()).all(|i| self.upper_covers(i).len() <= 1)
    }

    /// Graphviz rendering; meet-irreducibles are filled.
    pub fn to_dot(&self) -> String {
        let mi: Vec<usize> = self.meet_irreducible_indices().into_iter().map(|(i, _)| i).collect();
        let mut out = String::from("digraph con {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, c) in self.congruences.iter().enumerate() {
            let style = if mi.contains(&i) { ", style=filled, fillcolor=lightblue" } else { "" };
            out.push_str(&format!("  c{i} [label=\"{c}\"{style}];\n"));
        }
        for &(lo, hi) in &self.covers {
            out.push_str(&format!("  c{lo} -> c{hi};\n"));
        }
        out.push_str("}\n");
        out
    }
}

fn principal_congruences(alg: &FiniteAlgebra) -> Vec<Congruence> {
    let n = alg.size();
    let mut out: Vec<Congruence> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let c = cg(alg, &[(a, b)]).expect("in range");
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

pub fn con_lattice(alg: &FiniteAlgebra) -> Result<ConLattice> {
    con_lattice_with(alg, &Limits::DEFAULT)
}

pub fn con_lattice_with(alg: &FiniteAlgebra, limits: &Limits) -> Result<ConLattice> {
    let n = alg.size();
    let principals = principal_congruences(alg);
    let mut all = vec![Congruence::zero(n)];
    let mut seen: std::collections::HashSet<Congruence> = all.iter().cloned().collect();
    let mut i = 0;
    while i < all.len() {
        for p in &principals {
            let j = all[i].join(p);
            if seen.insert(j.clone()) {
                if all.len() >= limits.lattice_cap {
                    return Err(Error::ResourceCap { what: "congruence lattice".into(), cap: limits.lattice_cap });
                }
                all.push(j);
            }
        }
        i += 1;
    }
    all.sort_by(|x, y| y.num_blocks().cmp(&x.num_blocks()).then_with(|| x.repr.cmp(&y.repr)));
    let mut covers = Vec::new();
    for (li, lo) in all.iter().enumerate() {
        for hi in upper_covers_of(lo, &principals) {
            let hi_index = all.iter().position(|c| *c == hi).expect("join-closed");
            covers.push((li, hi_index));
        }
    }
    covers.sort_unstable();
    Ok(ConLattice { congruences: all, covers })
}

/// Upper covers of `alpha`: the minimal members of `{alpha ∨ Cg(a,b)}`.
fn upper_covers_of(alpha: &Congruence, principals: &[Congruence]) -> Vec<Congruence> {
    let mut ups: Vec<Congruence> = Vec::new();
    for p in principals {
        let j = alpha.join(p);
        if j != *alpha && !ups.contains(&j) {
            ups.push(j);
        }
    }
    let mut minimal: Vec<Congruence> = ups.iter().filter(|u| !ups.iter().any(|v| v.is_strictly_below(u))).cloned().collect();
    minimal.sort();
    minimal
}

/// The unique upper cover of a meet-irreducible congruence.
pub fn upper_cover(alg: &FiniteAlgebra, rho: &Congruence) -> Result<Congruence> {
    rho.verify(alg)?;
    let ups = upper_covers_of(rho, &principal_congruences(alg));
    match ups.as_slice() {
        [up] => Ok(up.clone()),
        [] => Err(Error::precondition(format!("{rho} is the full congruence"))),
        _ => Err(Error::precondition(format!("{rho} is not meet-irreducible ({} upper covers)", ups.len()))),
    }
}

pub fn is_meet_irreducible(alg: &FiniteAlgebra, rho: &Congruence) -> Result<bool> {
    rho.verify(alg)?;
    Ok(upper_covers_of(rho, &principal_congruences(alg)).len() == 1)
}

/// All meet-irreducible congruences with their upper covers.
pub fn meet_irreducibles(alg: &FiniteAlgebra) -> Result<Vec<(Congruence, Congruence)>> {
    let lat = con_lattice(alg)?;
    Ok(lat
        .meet_irreducible_indices()
        .into_iter()
        .map(|(i, j)| (lat.congruences[i].clone(), lat.congruences[j].clone()))
        .collect())
}

/// Subdirectly irreducible: `0` is meet-irreducible. Returns the monolith.
pub fn monolith(alg: &FiniteAlgebra) -> Result<Option<Congruence>> {
    let zero = Congruence::zero(alg.size());
    if alg.size() == 1 {
        return Ok(None);
    }
    let ups = upper_covers_of(&zero, &principal_congruences(alg));
    Ok(if ups.len() == 1 { ups.into_iter().next() } else { None })
}

fn square_space<'a>(alg: &'a FiniteAlgebra, rho: &Congruence) -> Result<PowerSpace<'a>> {
    PowerSpace::new(vec![alg, alg])?.with_stability(0, rho)?.with_stability(1, rho)
}

fn closed_to_rel(alg: &FiniteAlgebra, set: &crate::closure::ClosedSet) -> BinRel {
    let n = alg.size();
    BinRel::from_bits(n, n, set.bits().clone())
}

/// Least ρ-saturated subuniverse of `A²` containing `seed`.
pub fn saturate_generate(alg: &FiniteAlgebra, rho: &Congruence, seed: &BinRel) -> Result<BinRel> {
    rho.verify(alg)?;
    let n = alg.size();
    if seed.dims() != (n, n) {
        return Err(Error::Invalid("seed relation has the wrong dimensions".into()));
    }
    let space = square_space(alg, rho)?;
    let set = space.closure(seed.bits().ones());
    Ok(closed_to_rel(alg, &set))
}

/// True iff `rel` is a subuniverse of `A²` with `ρ∘rel∘ρ = rel`.
pub fn is_saturated_subuniverse(alg: &FiniteAlgebra, rho: &Congruence, rel: &BinRel) -> Result<bool> {
    Ok(saturate_generate(alg, rho, rel)? == *rel)
}

fn sort_rels(rels: &mut [BinRel]) {
    rels.sort_by_cached_key(|r| r.pairs().collect::<Vec<_>>());
}

/// The minimal ρ-saturated subuniverses properly containing ρ.
///
/// Each such relation contains some pair `(a,b) ∉ ρ` and therefore the
/// relation it generates together with ρ, so it suffices to compare the
/// singly generated ones.
pub fn cov(alg: &FiniteAlgebra, rho: &Congruence) -> Result<Vec<BinRel>> {
    rho.verify(alg)?;
    if rho.is_one() {
        return Err(Error::precondition("Cov is undefined for the full congruence"));
    }
    let n = alg.size();
    let space = square_space(alg, rho)?;
    let base = space.closure(rho.pairs().map(|(a, b)| a * n + b));
    let mut candidates: Vec<BinRel> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rho.related(a, b) {
                continue;
            }
            let rel = closed_to_rel(alg, &space.extend(&base, [a * n + b]));
            if !candidates.contains(&rel) {
                candidates.push(rel);
            }
        }
    }
    let mut minimal: Vec<BinRel> = candidates
        .iter()
        .filter(|c| !candidates.iter().any(|d| d.is_subset(c) && d != *c))
        .cloned()
        .collect();
    sort_rels(&mut minimal);
    Ok(minimal)
}

/// Members of `Cov(ρ)` inside `ρ⁺`.
pub fn cov_plus(alg: &FiniteAlgebra, rho: &Congruence) -> Result<Vec<BinRel>> {
    let plus = upper_cover(alg, rho)?.to_rel();
    Ok(cov(alg, rho)?.into_iter().filter(|t| t.is_subset(&plus)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Irreducibility {
    pub irreducible: bool,
    /// The unique cover, when irreducible.
    pub star: Option<BinRel>,
}

/// Decides `|Cov(ρ)| = 1`.
///
/// With `taylor` set (the caller holds a verified Taylor witness) the answer
/// is cross-checked against the unary-polynomial characterization: for
/// meet-irreducible ρ, irreducible iff `|Cov⁺(ρ)| = 1` and every pair outside
/// ρ⁺ is moved into `ρ⁺ \ ρ` by some unary polynomial.
pub fn is_irreducible(alg: &FiniteAlgebra, rho: &Congruence, taylor: bool) -> Result<Irreducibility> {
    let covers = cov(alg, rho)?;
    let result = if covers.len() == 1 {
        Irreducibility { irreducible: true, star: covers.into_iter().next() }
    } else {
        Irreducibility { irreducible: false, star: None }
    };
    if taylor && is_meet_irreducible(alg, rho)? {
        let alt = irreducible_via_polynomials(alg, rho)?;
        if alt != result.irreducible {
            return Err(Error::Internal(format!(
                "irreducibility of {rho} in `{}`: covers say {}, polynomials say {}",
                alg.name(),
                result.irreducible,
                alt
            )));
        }
    }
    Ok(result)
}

fn irreducible_via_polynomials(alg: &FiniteAlgebra, rho: &Congruence) -> Result<bool> {
    if cov_plus(alg, rho)?.len() != 1 {
        return Ok(false);
    }
    let plus = upper_cover(alg, rho)?;
    let polys = alg.pol1()?;
    let n = alg.size();
    for a in 0..n {
        for b in 0..n {
            if plus.related(a, b) {
                continue;
            }
            let moved = polys.iter().any(|f| plus.related(f[a], f[b]) && !rho.related(f[a], f[b]));
            if !moved {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_cover(alg: &FiniteAlgebra, alpha: &Congruence, beta: &Congruence) -> Result<()> {
    alpha.verify(alg)?;
    beta.verify(alg)?;
    if !alpha.is_strictly_below(beta) {
        return Err(Error::precondition(format!("{alpha} is not below {beta}")));
    }
    if !upper_covers_of(alpha, &principal_congruences(alg)).contains(beta) {
        return Err(Error::precondition(format!("{beta} does not cover {alpha}")));
    }
    Ok(())
}

/// `(α,β)`-minimal sets: inclusion-minimal `f(A)` over unary polynomials
/// with `f(β) ⊄ α`. Sorted.
pub fn minimal_sets(alg: &FiniteAlgebra, alpha: &Congruence, beta: &Congruence) -> Result<Vec<Vec<usize>>> {
    check_cover(alg, alpha, beta)?;
    let n = alg.size();
    let beta_pairs: Vec<(usize, usize)> = beta.pairs().filter(|&(a, b)| !alpha.related(a, b)).collect();
    let mut images: Vec<Vec<usize>> = Vec::new();
    for f in alg.pol1()? {
        if beta_pairs.iter().any(|&(a, b)| !alpha.related(f[a], f[b])) {
            let mut img: Vec<usize> = f.clone();
            img.sort_unstable();
            img.dedup();
            if !images.contains(&img) {
                images.push(img);
            }
        }
    }
    let subset = |x: &Vec<usize>, y: &Vec<usize>| x.iter().all(|a| y.binary_search(a).is_ok());
    let mut minimal: Vec<Vec<usize>> =
        images.iter().filter(|u| !images.iter().any(|v| v.len() < u.len() && subset(v, u))).cloned().collect();
    minimal.sort();
    debug_assert!(minimal.iter().all(|u| u.iter().all(|&a| a < n)));
    Ok(minimal)
}

/// `(α,β)`-traces: sets `U ∩ C` with `U` minimal, `C` a β-class and
/// `(U ∩ C)² ⊄ α`. Sorted and deduplicated.
pub fn traces(alg: &FiniteAlgebra, alpha: &Congruence, beta: &Congruence) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for u in minimal_sets(alg, alpha, beta)? {
        for class in beta.class_lists() {
            let n_set: Vec<usize> = u.iter().copied().filter(|a| class.contains(a)).collect();
            let spans = n_set.iter().any(|&x| n_set.iter().any(|&y| !alpha.related(x, y)));
            if spans && !out.contains(&n_set) {
                out.push(n_set);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `ρ ∘ (0_A ∪ ⋃ N²) ∘ ρ` over all `(ρ,ρ⁺)`-traces `N`.
pub fn bar_rho(alg: &FiniteAlgebra, rho: &Congruence) -> Result<BinRel> {
    let plus = upper_cover(alg, rho)?;
    let n = alg.size();
    let mut middle = BinRel::diagonal(n);
    for t in traces(alg, rho, &plus)? {
        for &a in &t {
            for &b in &t {
                middle.insert(a, b);
            }
        }
    }
    let r = rho.to_rel();
    r.compose(&middle)?.compose(&r)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::builtin;
    use proptest::prelude::*;

    /// All partitions of `{0..n-1}` (restricted growth strings).
    pub(crate) fn all_partitions(n: usize) -> Vec<Congruence> {
        fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Congruence>) {
            if i == n {
                let blocks: Vec<Vec<usize>> =
                    (0..=max).map(|b| (0..n).filter(|&a| cur[a] == b).collect::<Vec<_>>()).filter(|b| !b.is_empty()).collect();
                out.push(Congruence::from_blocks(n, &blocks).unwrap());
                return;
            }
            for b in 0..=max + 1 {
                if i == 0 && b > 0 {
                    break;
                }
                cur.push(b);
                go(i + 1, n, cur, max.max(b), out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(0, n, &mut Vec::new(), 0, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Congruences by filtering all partitions for compatibility.
    pub(crate) fn oracle_congruences(alg: &FiniteAlgebra) -> Vec<Congruence> {
        all_partitions(alg.size()).into_iter().filter(|p| p.compatibility_witness(alg).is_none()).collect()
    }

    /// All subuniverses of `A²` that contain `0_A`, by subset sweep.
    pub(crate) fn oracle_reflexive_subuniverses(alg: &FiniteAlgebra) -> Vec<BinRel> {
        let n = alg.size();
        let off: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
        let mut out = Vec::new();
        for mask in 0u32..(1 << off.len()) {
            let mut r = BinRel::diagonal(n);
            for (i, &(a, b)) in off.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    r.insert(a, b);
                }
            }
            if is_closed_pairwise(alg, &r) {
                out.push(r);
            }
        }
        out
    }

    fn is_closed_pairwise(alg: &FiniteAlgebra, r: &BinRel) -> bool {
        let pairs: Vec<(usize, usize)> = r.pairs().collect();
        for (oi, op) in alg.ops().iter().enumerate() {
            let k = op.arity;
            let total = pairs.len().pow(k as u32);
            for t in 0..total {
                let mut rest = t;
                let mut left = vec![0; k];
                let mut right = vec![0; k];
                for q in (0..k).rev() {
                    let (a, b) = pairs[rest % pairs.len()];
                    left[q] = a;
                    right[q] = b;
                    rest /= pairs.len();
                }
                if !r.contains(alg.eval_op(oi, &left).unwrap(), alg.eval_op(oi, &right).unwrap()) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn parse_and_display() {
        let c = Congruence::parse("|1 3|0 2|").unwrap();
        assert_eq!(c.to_string(), "|0 2|1 3|");
        assert_eq!(c.repr_array(), &[0, 1, 0, 1]);
        assert!(Congruence::parse("|0 1|1|").is_err());
        assert!(Congruence::parse("0 1").is_err());
        assert!(Congruence::parse("|0|2|").is_err());
        assert_eq!(Congruence::parse("|0|").unwrap(), Congruence::zero(1));
    }

    #[test]
    fn cg_examples() {
        let z4 = builtin::z4aff();
        assert_eq!(cg(&z4, &[(0, 2)]).unwrap().to_string(), "|0 2|1 3|");
        assert_eq!(cg(&z4, &[]).unwrap(), Congruence::zero(4));
        assert_eq!(cg(&builtin::s2(), &[(0, 1)]).unwrap(), Congruence::one(2));
    }

    #[test]
    fn cg_matches_partition_filter() {
        for alg in builtin::all().into_iter().chain(builtin::commutative_idempotent_groupoids(3)) {
            let cons = oracle_congruences(&alg);
            let n = alg.size();
            for a in 0..n {
                for b in 0..n {
                    let least = cons
                        .iter()
                        .filter(|c| c.related(a, b))
                        .find(|c| cons.iter().filter(|d| d.related(a, b)).all(|d| c.is_below(d)))
                        .unwrap();
                    assert_eq!(&cg(&alg, &[(a, b)]).unwrap(), least, "{} ({a},{b})", alg.name());
                }
            }
        }
    }

    #[test]
    fn lattice_examples() {
        let z4 = con_lattice(&builtin::z4aff()).unwrap();
        let names: Vec<String> = z4.congruences.iter().map(|c| c.to_string()).collect();
        assert_eq!(names, vec!["|0|1|2|3|", "|0 2|1 3|", "|0 1 2 3|"]);
        assert!(z4.is_chain());
        assert_eq!(con_lattice(&builtin::s2()).unwrap().len(), 2);
        let m3 = con_lattice(&builtin::z2aff_sq()).unwrap();
        assert_eq!(m3.len(), 5);
        assert_eq!(m3.upper_covers(0).len(), 3);
        assert_eq!(m3.lower_covers(4).len(), 3);
    }

    #[test]
    fn lattice_matches_oracle() {
        for alg in builtin::all().into_iter().chain(builtin::commutative_idempotent_groupoids(3)) {
            let lat = con_lattice(&alg).unwrap();
            let mut got = lat.congruences.clone();
            got.sort();
            assert_eq!(got, oracle_congruences(&alg), "{}", alg.name());
            // covers by interval emptiness
            for (i, x) in lat.congruences.iter().enumerate() {
                for (j, y) in lat.congruences.iter().enumerate() {
                    let covering = x.is_strictly_below(y) && !lat.congruences.iter().any(|z| x.is_strictly_below(z) && z.is_strictly_below(y));
                    assert_eq!(lat.covers.contains(&(i, j)), covering);
                }
            }
        }
    }

    #[test]
    fn meet_irreducible_examples() {
        let z4 = meet_irreducibles(&builtin::z4aff()).unwrap();
        let eta = Congruence::parse("|0 2|1 3|").unwrap();
        assert_eq!(z4, vec![(Congruence::zero(4), eta.clone()), (eta, Congruence::one(4))]);
        assert_eq!(meet_irreducibles(&builtin::s2()).unwrap(), vec![(Congruence::zero(2), Congruence::one(2))]);
        let m3 = meet_irreducibles(&builtin::z2aff_sq()).unwrap();
        assert_eq!(m3.len(), 3);
        assert!(m3.iter().all(|(r, p)| r.num_blocks() == 2 && p.is_one()));
    }

    #[test]
    fn saturate_examples() {
        let z2 = builtin::z2aff();
        let seed = BinRel::diagonal(2).union(&BinRel::from_pairs(2, 2, [(0, 1)]).unwrap());
        assert_eq!(saturate_generate(&z2, &Congruence::zero(2), &seed).unwrap(), BinRel::full(2, 2));
        let s2 = builtin::s2();
        let le = BinRel::from_pairs(2, 2, [(0, 0), (0, 1), (1, 1)]).unwrap();
        assert_eq!(saturate_generate(&s2, &Congruence::zero(2), &seed).unwrap(), le);
        let z4 = builtin::z4aff();
        let eta = Congruence::parse("|0 2|1 3|").unwrap();
        assert_eq!(saturate_generate(&z4, &eta, &eta.to_rel()).unwrap(), eta.to_rel());
    }

    #[test]
    fn cov_examples() {
        let s2 = builtin::s2();
        let z = Congruence::zero(2);
        let le = BinRel::from_pairs(2, 2, [(0, 0), (0, 1), (1, 1)]).unwrap();
        let covers = cov(&s2, &z).unwrap();
        assert_eq!(covers.len(), 2);
        assert!(covers.contains(&le) && covers.contains(&le.inverse()));
        assert_eq!(cov_plus(&s2, &z).unwrap(), covers);
        assert_eq!(cov(&builtin::z2aff(), &z).unwrap(), vec![BinRel::full(2, 2)]);
        let z4 = builtin::z4aff();
        let eta = Congruence::parse("|0 2|1 3|").unwrap();
        assert_eq!(cov(&z4, &Congruence::zero(4)).unwrap(), vec![eta.to_rel()]);
        assert_eq!(cov_plus(&z4, &eta).unwrap(), vec![BinRel::full(4, 4)]);
        assert!(cov(&z4, &Congruence::one(4)).is_err());
        assert!(cov_plus(&builtin::z2aff_sq(), &Congruence::zero(4)).is_err());
    }

    #[test]
    fn cov_at_zero_matches_subset_sweep() {
        for alg in builtin::all().into_iter().filter(|a| a.size() <= 4) {
            let n = alg.size();
            if n == 1 {
                continue;
            }
            let refl = oracle_reflexive_subuniverses(&alg);
            let diag = BinRel::diagonal(n);
            let proper: Vec<&BinRel> = refl.iter().filter(|r| **r != diag).collect();
            let mut expect: Vec<BinRel> =
                proper.iter().filter(|r| !proper.iter().any(|s| s.is_subset(r) && s != *r)).map(|r| (*r).clone()).collect();
            sort_rels(&mut expect);
            assert_eq!(cov(&alg, &Congruence::zero(n)).unwrap(), expect, "{}", alg.name());
        }
    }

    #[test]
    fn irreducible_examples() {
        let z = Congruence::zero(2);
        let r = is_irreducible(&builtin::z2aff(), &z, true).unwrap();
        assert!(r.irreducible);
        assert_eq!(r.star, Some(BinRel::full(2, 2)));
        assert_eq!(is_irreducible(&builtin::s2(), &z, true).unwrap(), Irreducibility { irreducible: false, star: None });
        let z4 = is_irreducible(&builtin::z4aff(), &Congruence::zero(4), true).unwrap();
        let eta = Congruence::parse("|0 2|1 3|").unwrap();
        assert_eq!(z4.star, Some(eta.to_rel()));
    }

    #[test]
    fn minimal_sets_and_traces() {
        let s2 = builtin::s2();
        let (z, o) = (Congruence::zero(2), Congruence::one(2));
        assert_eq!(minimal_sets(&s2, &z, &o).unwrap(), vec![vec![0, 1]]);
        assert_eq!(traces(&s2, &z, &o).unwrap(), vec![vec![0, 1]]);
        assert_eq!(minimal_sets(&builtin::z2aff(), &z, &o).unwrap(), vec![vec![0, 1]]);
        let z4 = builtin::z4aff();
        let eta = Congruence::parse("|0 2|1 3|").unwrap();
        // Unary polynomials are x -> ax + b; only odd a separate an η-pair, so
        // the whole universe is the unique minimal set and the η-classes are the traces.
        assert_eq!(minimal_sets(&z4, &Congruence::zero(4), &eta).unwrap(), vec![vec![0, 1, 2, 3]]);
        assert_eq!(traces(&z4, &Congruence::zero(4), &eta).unwrap(), vec![vec![0, 2], vec![1, 3]]);
        assert!(minimal_sets(&z4, &Congruence::zero(4), &Congruence::one(4)).is_err());
    }

    #[test]
    fn bar_rho_examples() {
        let z = Congruence::zero(2);
        assert_eq!(bar_rho(&builtin::s2(), &z).unwrap(), BinRel::full(2, 2));
        assert_eq!(bar_rho(&builtin::z2aff(), &z).unwrap(), BinRel::full(2, 2));
        let eta = Congruence::parse("|0 2|1 3|").unwrap();
        assert_eq!(bar_rho(&builtin::z4aff(), &eta).unwrap(), BinRel::full(4, 4));
    }

    fn corpus_alg() -> impl Strategy<Value = FiniteAlgebra> {
        let mut algs = builtin::all();
        algs.extend(builtin::commutative_idempotent_groupoids(3));
        proptest::sample::select(algs)
    }

    proptest! {
        #[test]
        fn cg_is_a_closure(alg in corpus_alg(), seed in proptest::collection::vec((0usize..4, 0usize..4), 0..4)) {
            let n = alg.size();
            let pairs: Vec<(usize, usize)> = seed.into_iter().map(|(a, b)| (a % n, b % n)).collect();
            let c = cg(&alg, &pairs).unwrap();
            prop_assert!(c.compatibility_witness(&alg).is_none());
            prop_assert!(pairs.iter().all(|&(a, b)| c.related(a, b)));
            let again: Vec<(usize, usize)> = c.pairs().collect();
            prop_assert_eq!(cg(&alg, &again).unwrap(), c);
        }

        #[test]
        fn join_and_meet_are_lattice_operations(alg in corpus_alg()) {
            let lat = con_lattice(&alg).unwrap();
            for x in &lat.congruences {
                for y in &lat.congruences {
                    let j = x.join(y);
                    let m = x.meet(y);
                    prop_assert!(lat.index_of(&j).is_some());
                    prop_assert!(lat.index_of(&m).is_some());
                    prop_assert!(x.is_below(&j) && y.is_below(&j) && m.is_below(x) && m.is_below(y));
                }
            }
        }

        #[test]
        fn cov_members_are_minimal_saturated(alg in corpus_alg()) {
            for rho in con_lattice(&alg).unwrap().congruences.iter().filter(|c| !c.is_one()) {
                let covers = cov(&alg, rho).unwrap();
                prop_assert!(!covers.is_empty());
                let r = rho.to_rel();
                for c in &covers {
                    prop_assert!(r.is_subset(c) && *c != r);
                    prop_assert!(is_saturated_subuniverse(&alg, rho, c).unwrap());
                    prop_assert!(covers.iter().all(|d| d == c || !d.is_subset(c)));
                }
            }
        }
    }
}
