//! Verification suites, one per theorem-level check.
//!
//! Every suite expands into independent instances that run in parallel;
//! records come back in instance order, so reports do not depend on the
//! thread count.

use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::corpus::{Corpus, CorpusEntry};
use super::report::{fingerprint, CheckRecord, Status, VerificationReport};
use crate::algebra::FiniteAlgebra;
use crate::bridges::{
    adjacency_search, compact_restrict, cover_is_abelian, cross_cover_bridge, delta_flat, extract_b3,
    good_bridge_between_d, identity_bridge, induced_iso, is_bridge, iso_graph_bridge, opt, opt_bridge, opt_bruteforce,
    saturated_closure, saturated_closure_guarded, search_good_bridge, BridgeCert, Search,
};
use crate::commutator::{centralizer, class_group, is_abelian, Commutator};
use crate::congruence::{bar_rho, con_lattice, cov, cov_plus, is_irreducible, meet_irreducibles, monolith, Congruence};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relation::{BinRel, Quad, QuadRel};
use crate::similarity::{build_d_of_si, build_t_da, build_zeta, check_similarity_bridge, delta, SiD};
use crate::terms::{TaylorWitness, WeakDifferenceWitness};

pub const SUITES: &[&str] = &[
    "opt2",
    "basictol",
    "corDA",
    "simprop",
    "goodbridge",
    "modiso",
    "sameopt",
    "type45",
    "newsametype",
    "adjacent",
    "sametype",
    "tdtdinv",
    "samebridge",
    "zhukequiv",
    "zeta",
    "gumm",
    "deltaprop",
    "cent",
    "tracelaws",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Random bridge attempts per ordered pair of abelian-cover congruences.
    pub random_attempts: usize,
    /// Extra generators for the brute-force Opt search above two elements.
    pub brute_budget: usize,
    /// Cap on the number of compositions checked by `tracelaws`.
    pub max_compositions: usize,
    pub limits: Limits,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0x5eed_0001, random_attempts: 3, brute_budget: 2, max_compositions: 400, limits: Limits::DEFAULT }
    }
}

/// Outcome of a single instance that did not fail.
pub enum Check {
    Pass(String),
    Skip(String),
}

type Job<'s> = (String, Box<dyn Fn() -> Result<Check> + Send + Sync + 's>);

fn job<'s>(instance: String, f: impl Fn() -> Result<Check> + Send + Sync + 's) -> Job<'s> {
    (instance, Box::new(f))
}

fn violation<T>(check: &str, witness: impl Into<String>) -> Result<T> {
    Err(Error::violation(check, witness))
}

/// A meet-irreducible congruence of a corpus algebra.
#[derive(Clone, Debug)]
pub struct MeetIrreducible<'c> {
    pub entry: &'c CorpusEntry,
    pub rho: Congruence,
    pub plus: Congruence,
    /// `A/ρ`, subdirectly irreducible.
    pub bar: FiniteAlgebra,
    pub abelian: bool,
    d_bar: OnceLock<std::result::Result<SiD, Error>>,
}

impl MeetIrreducible<'_> {
    pub fn label(&self) -> String {
        format!("({}, {})", self.entry.name(), self.rho)
    }

    fn alg(&self) -> &FiniteAlgebra {
        &self.entry.alg
    }

    fn taylor(&self) -> Result<&TaylorWitness> {
        self.entry.taylor.as_ref().ok_or_else(|| Error::precondition(format!("`{}` has no Taylor witness", self.entry.name())))
    }

    fn wd(&self) -> Result<&WeakDifferenceWitness> {
        self.entry
            .weak_difference
            .as_ref()
            .ok_or_else(|| Error::precondition(format!("`{}` has no weak difference witness", self.entry.name())))
    }

    fn bar_taylor(&self) -> Result<TaylorWitness> {
        self.taylor()?.transfer(&self.bar)
    }

    fn bar_wd(&self) -> Result<WeakDifferenceWitness> {
        self.wd()?.transfer(&self.bar)
    }

    /// `D(A/ρ)`, built once.
    fn d_bar(&self) -> Result<&SiD> {
        self.d_bar.get_or_init(|| build_d_of_si(&self.bar, &self.bar_wd()?)).as_ref().map_err(Clone::clone)
    }
}

/// A certified bridge together with its context.
#[derive(Clone, Debug)]
pub struct BridgeInstance {
    pub label: String,
    pub a: FiniteAlgebra,
    pub rho: Congruence,
    pub ta: Option<TaylorWitness>,
    pub b: FiniteAlgebra,
    pub sigma: Congruence,
    pub tb: Option<TaylorWitness>,
    pub t: QuadRel,
    pub cert: BridgeCert,
}

impl BridgeInstance {
    #[allow(clippy::too_many_arguments)]
    fn new(
        label: String,
        a: &FiniteAlgebra,
        rho: &Congruence,
        ta: Option<TaylorWitness>,
        b: &FiniteAlgebra,
        sigma: &Congruence,
        tb: Option<TaylorWitness>,
        t: QuadRel,
    ) -> Result<Self> {
        let cert = is_bridge(a, rho, b, sigma, &t)?
            .map_err(|f| Error::Internal(format!("builder for {label} produced a non-bridge: {f}")))?;
        Ok(BridgeInstance { label, a: a.clone(), rho: rho.clone(), ta, b: b.clone(), sigma: sigma.clone(), tb, t, cert })
    }

    fn witnesses(&self) -> Result<(&TaylorWitness, &TaylorWitness)> {
        match (&self.ta, &self.tb) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::precondition("missing Taylor witness")),
        }
    }
}

type Built = std::result::Result<BridgeInstance, (String, Error)>;

/// A corpus plus lazily computed shared instances.
pub struct Suites<'c> {
    corpus: &'c Corpus,
    opts: SuiteOptions,
    mis: OnceLock<std::result::Result<Vec<MeetIrreducible<'c>>, Error>>,
    bridges: OnceLock<Vec<Built>>,
}

impl<'c> Suites<'c> {
    pub fn new(corpus: &'c Corpus, opts: SuiteOptions) -> Self {
        Suites { corpus, opts, mis: OnceLock::new(), bridges: OnceLock::new() }
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn meet_irreducibles(&self) -> Result<&[MeetIrreducible<'c>]> {
        let r = self.mis.get_or_init(|| {
            let per_entry: Vec<Result<Vec<MeetIrreducible<'c>>>> = self
                .corpus
                .entries
                .par_iter()
                .map(|entry| {
                    let mut out = Vec::new();
                    for (rho, plus) in meet_irreducibles(&entry.alg)? {
                        let (bar, _) = entry.alg.quotient(&rho)?;
                        let abelian = cover_is_abelian(&entry.alg, &rho)?;
                        out.push(MeetIrreducible { entry, rho, plus, bar, abelian, d_bar: OnceLock::new() });
                    }
                    Ok(out)
                })
                .collect();
            per_entry.into_iter().collect::<Result<Vec<_>>>().map(|v| v.into_iter().flatten().collect())
        });
        r.as_deref().map_err(Clone::clone)
    }

    /// Ordered pairs of meet-irreducibles over algebras of one signature.
    fn pairs(&self) -> Result<Vec<(&MeetIrreducible<'c>, &MeetIrreducible<'c>)>> {
        let mis = self.meet_irreducibles()?;
        Ok(mis
            .iter()
            .flat_map(|x| mis.iter().map(move |y| (x, y)))
            .filter(|(x, y)| x.alg().same_signature(y.alg()))
            .collect())
    }

    /// Canonical and seeded-random certified bridges.
    pub fn bridges(&self) -> &[Built] {
        self.bridges.get_or_init(|| match self.meet_irreducibles() {
            Err(e) => vec![Err(("bridge corpus".into(), e))],
            Ok(mis) => self.build_bridges(mis),
        })
    }

    fn build_bridges(&self, mis: &[MeetIrreducible<'c>]) -> Vec<Built> {
        let mut out: Vec<Built> = Vec::new();
        let tag = |label: String| move |e: Error| (label, e);
        for m in mis {
            let (alg, ta) = (m.alg(), m.entry.taylor.clone());
            if let Some(t) = &ta {
                let label = format!("opt bridge at {}", m.label());
                out.push(
                    opt_bridge(alg, &m.rho, t)
                        .and_then(|ob| BridgeInstance::new(label.clone(), alg, &m.rho, ta.clone(), alg, &m.rho, ta.clone(), ob.t))
                        .map_err(tag(label)),
                );
            }
            let covers = cov(alg, &m.rho);
            let covers_plus = cov_plus(alg, &m.rho);
            match (covers, covers_plus) {
                (Ok(cs), Ok(cps)) => {
                    for l in &cs {
                        let label = format!("identity bridge at {} on {l}", m.label());
                        let r = identity_bridge(alg, &m.rho, l)
                            .and_then(|t| BridgeInstance::new(label.clone(), alg, &m.rho, ta.clone(), alg, &m.rho, ta.clone(), t));
                        out.push(r.map_err(tag(label)));
                    }
                    let lp = m.plus.to_rel();
                    if !cs.contains(&lp) {
                        let label = format!("identity bridge at {} on ρ⁺", m.label());
                        let r = identity_bridge(alg, &m.rho, &lp)
                            .and_then(|t| BridgeInstance::new(label.clone(), alg, &m.rho, ta.clone(), alg, &m.rho, ta.clone(), t));
                        out.push(r.map_err(tag(label)));
                    }
                    if let [t0, t1] = cps.as_slice() {
                        let label = format!("cross-cover bridge at {}", m.label());
                        let r = cross_cover_bridge(alg, &m.rho, t0, t1)
                            .and_then(|t| BridgeInstance::new(label.clone(), alg, &m.rho, ta.clone(), alg, &m.rho, ta.clone(), t));
                        out.push(r.map_err(tag(label)));
                    }
                }
                (Err(e), _) | (_, Err(e)) => out.push(Err((format!("covers at {}", m.label()), e))),
            }
            if let (Some(t), Some(wd)) = (&ta, &m.entry.weak_difference) {
                out.extend(t_da_bridge(m, t, wd));
            }
        }
        let pairs = self.pairs().unwrap_or_default();
        let between: Vec<Vec<Built>> = pairs
            .par_iter()
            .map(|(x, y)| {
                let mut v = Vec::new();
                if x.entry.weak_difference.is_some() && y.entry.weak_difference.is_some() {
                    let label = format!("good bridge {} → {}", x.label(), y.label());
                    let built = x.d_bar().and_then(|da| good_bridge_between_d(x.alg(), &x.rho, da, y.alg(), &y.rho, y.d_bar()?));
                    match built {
                        Ok(Some(g)) => v.push(bridge_between(label, x, y, g.t)),
                        Ok(None) => {}
                        Err(e) => v.push(Err((label, e))),
                    }
                }
                if x.bar.size() == y.bar.size() {
                    let label = format!("isomorphism graph {} → {}", x.label(), y.label());
                    match x.bar.find_isomorphism(&y.bar) {
                        Ok(Some(g)) => v.push(
                            iso_graph_bridge(x.alg(), &x.rho, y.alg(), &y.rho, &g)
                                .and_then(|t| bridge_between(label.clone(), x, y, t).map_err(|(_, e)| e))
                                .map_err(tag(label)),
                        ),
                        Ok(None) => {}
                        Err(e) => v.push(Err((label, e))),
                    }
                }
                v
            })
            .collect();
        out.extend(between.into_iter().flatten());
        out.extend(special_bridges(mis));
        out.extend(self.random_bridges(&pairs));
        out
    }

    fn random_bridges(&self, pairs: &[(&MeetIrreducible<'c>, &MeetIrreducible<'c>)]) -> Vec<Built> {
        let abelian: Vec<_> = pairs.iter().filter(|(x, y)| x.abelian && y.abelian).collect();
        let per_pair: Vec<Vec<Built>> = abelian
            .par_iter()
            .enumerate()
            .map(|(i, (x, y))| {
                let seed = self.opts.seed.wrapping_add((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut v = Vec::new();
                for attempt in 0..self.opts.random_attempts {
                    let label = format!("random bridge {} → {} (seed {seed:#x}, attempt {attempt})", x.label(), y.label());
                    match random_bridge(x, y, &mut rng) {
                        Ok(Some(t)) => v.push(bridge_between(label, x, y, t)),
                        Ok(None) => {}
                        Err(e) => v.push(Err((label, e))),
                    }
                }
                v
            })
            .collect();
        per_pair.into_iter().flatten().collect()
    }

    fn certified(&self) -> (Vec<&BridgeInstance>, Vec<Job<'_>>) {
        let mut ok = Vec::new();
        let mut failed = Vec::new();
        for b in self.bridges() {
            match b {
                Ok(b) => ok.push(b),
                Err((label, e)) => {
                    let e = e.clone();
                    failed.push(job(label.clone(), move || Err(e.clone())));
                }
            }
        }
        (ok, failed)
    }

    pub fn run(&self, suite: &str) -> Result<VerificationReport> {
        let start = Instant::now();
        let jobs = match suite {
            "opt2" => self.opt2(),
            "basictol" => self.basictol(),
            "corDA" => self.cor_da(),
            "simprop" => self.simprop(),
            "goodbridge" => Ok(self.goodbridge()),
            "modiso" => Ok(self.modiso()),
            "sameopt" => self.sameopt(),
            "type45" => self.type45(),
            "newsametype" => Ok(self.newsametype()),
            "adjacent" => self.adjacent(),
            "sametype" => self.sametype(),
            "tdtdinv" => self.tdtdinv(),
            "samebridge" => Ok(self.samebridge()),
            "zhukequiv" => self.zhukequiv(),
            "zeta" => self.zeta(),
            "gumm" => Ok(self.gumm()),
            "deltaprop" => Ok(self.deltaprop()),
            "cent" => Ok(self.cent()),
            "tracelaws" => Ok(self.tracelaws()),
            other => return Err(Error::Invalid(format!("unknown suite `{other}`; known: {}", SUITES.join(", ")))),
        };
        let jobs = jobs.unwrap_or_else(|e| vec![job("corpus setup".into(), move || Err(e.clone()))]);
        let mut checks = run_jobs(suite, jobs);
        if !checks.iter().any(|c| c.status == Status::Pass) {
            checks.push(CheckRecord {
                suite: suite.to_string(),
                instance: "corpus".into(),
                status: Status::Fail,
                witness: "vacuous: no instance of this suite passed on the corpus".into(),
                millis: 0,
            });
        }
        Ok(VerificationReport {
            suite: suite.to_string(),
            checks,
            seed: self.opts.seed,
            fingerprint: fingerprint(),
            millis: start.elapsed().as_millis() as u64,
        })
    }

    pub fn run_all(&self) -> Vec<VerificationReport> {
        SUITES.iter().map(|s| self.run(s).expect("known suite")).collect()
    }

    fn opt2(&self) -> Result<Vec<Job<'_>>> {
        let budget = self.opts.brute_budget;
        let limits = self.opts.limits;
        Ok(self
            .meet_irreducibles()?
            .iter()
            .map(|m| {
                job(m.label(), move || {
                    let (alg, ta) = (m.alg(), m.taylor()?);
                    let o = opt(alg, &m.rho, ta)?;
                    let ob = opt_bridge(alg, &m.rho, ta)?;
                    if ob.abelian != m.rho.is_strictly_below(&o) {
                        return violation("opt2", format!("cover abelian = {}, but Opt = {o}", ob.abelian));
                    }
                    if ob.trace != o {
                        return violation("opt2", format!("optimal bridge has trace {}, centralizer is {o}", ob.trace));
                    }
                    let mut notes = Vec::new();
                    for tau in cov_plus(alg, &m.rho)? {
                        let k = if alg.size() <= 2 { None } else { Some(budget) };
                        let bf = opt_bruteforce(alg, &m.rho, &tau, k, &limits)?;
                        if !bf.trace.is_subset(&o.to_rel()) {
                            return violation("opt2", format!("brute force on {tau} reaches {} outside {o}", bf.trace));
                        }
                        let equal = bf.trace == o.to_rel();
                        if bf.exhaustive && !equal {
                            return violation("opt2", format!("exhaustive brute force on {tau} stops at {}", bf.trace));
                        }
                        notes.push(format!("L = {tau}: {} closures, exhaustive {}, attains {}", bf.visited, bf.exhaustive, equal));
                    }
                    Ok(Check::Pass(format!("Opt = {o}; {}", notes.join("; "))))
                })
            })
            .collect())
    }

    fn basictol(&self) -> Result<Vec<Job<'_>>> {
        Ok(self
            .meet_irreducibles()?
            .iter()
            .map(|m| {
                job(m.label(), move || {
                    let alg = m.alg();
                    let cp = cov_plus(alg, &m.rho)?;
                    let bar = bar_rho(alg, &m.rho)?;
                    let rho = m.rho.to_rel();
                    match cp.as_slice() {
                        [t] if *t == bar => Ok(Check::Pass(format!("Cov⁺ = {{{t}}}"))),
                        [t0, t1] if *t1 == t0.inverse() && t0.intersection(t1) == rho && t0.union(t1) == bar => {
                            Ok(Check::Pass(format!("Cov⁺ = {{{t0}, its inverse}}")))
                        }
                        _ => violation("basictol", format!("Cov⁺ = {cp:?}, ρ̄ = {bar}")),
                    }
                })
            })
            .collect())
    }

    fn cor_da(&self) -> Result<Vec<Job<'_>>> {
        Ok(self
            .meet_irreducibles()?
            .iter()
            .map(|m| {
                job(format!("{}/{}", m.entry.name(), m.rho), move || {
                    let wd = m.bar_wd()?;
                    let si = build_d_of_si(&m.bar, &wd)?;
                    let Some(d) = si.construction else {
                        return Ok(Check::Skip("monolith is nonabelian".into()));
                    };
                    d.certify(&wd)?;
                    Ok(Check::Pass(format!("|D| = {}, D_o = {:?}", d.d.size(), d.d_o)))
                })
            })
            .collect())
    }

    fn simprop(&self) -> Result<Vec<Job<'_>>> {
        Ok(self
            .meet_irreducibles()?
            .iter()
            .map(|m| {
                job(format!("{}/{}", m.entry.name(), m.rho), move || {
                    let wd = m.bar_wd()?;
                    let tda = build_t_da(&m.bar, &wd)?;
                    if let Some(f) = check_similarity_bridge(&m.bar, &tda.d.d, &tda.t)? {
                        return violation("simprop", f.to_string());
                    }
                    Ok(Check::Pass(format!("{} quadruples", tda.t.len())))
                })
            })
            .collect())
    }

    fn tdtdinv(&self) -> Result<Vec<Job<'_>>> {
        Ok(self
            .meet_irreducibles()?
            .iter()
            .map(|m| {
                job(format!("{}/{}", m.entry.name(), m.rho), move || {
                    let (a, wd) = (&m.bar, m.bar_wd()?);
                    let mu = monolith(a)?.ok_or_else(|| Error::Internal("quotient by a meet-irreducible is not SI".into()))?;
                    let tda = build_t_da(a, &wd)?;
                    let zero = Congruence::zero(a.size());
                    let ob = opt_bridge(a, &zero, &m.bar_taylor()?)?;
                    let flat = delta_flat(a, &mu, &centralizer(a, &mu, &zero)?)?;
                    let comp = tda.t.compose(&tda.t.converse())?;
                    for (name, other) in [("Δ♭", &flat), ("T_D ∘ T_D^∪", &comp)] {
                        if ob.t != *other {
                            let w = ob.t.first_not_in(other).or_else(|| other.first_not_in(&ob.t));
                            return violation("tdtdinv", format!("optimal bridge differs from {name} at {w:?}"));
                        }
                    }
                    Ok(Check::Pass(format!("{} quadruples", ob.t.len())))
                })
            })
            .collect())
    }

    fn zeta(&self) -> Result<Vec<Job<'_>>> {
        Ok(self
            .meet_irreducibles()?
            .iter()
            .map(|m| {
                job(m.label(), move || {
                    let (alg, ta, wd) = (m.alg(), m.taylor()?, m.wd()?);
                    let o = opt(alg, &m.rho, ta)?;
                    if !o.is_one() {
                        return Ok(Check::Skip(format!("hypothesis Opt(ρ) = 1 unmet: Opt(ρ) = {o}")));
                    }
                    if !is_irreducible(alg, &m.rho, true)?.irreducible {
                        return Ok(Check::Skip("ρ is not irreducible".into()));
                    }
                    let z = build_zeta(alg, &m.rho, wd)?;
                    Ok(Check::Pass(format!("|Z| = {}, zero {}, Maltsev {}", z.z.size(), z.zero, z.maltsev.to_sexpr(&z.z))))
                })
            })
            .collect())
    }

    fn type45(&self) -> Result<Vec<Job<'_>>> {
        Ok(self
            .meet_irreducibles()?
            .iter()
            .map(|m| {
                job(m.label(), move || {
                    let alg = m.alg();
                    let cp = cov_plus(alg, &m.rho)?;
                    for t0 in &cp {
                        for t1 in &cp {
                            let t = cross_cover_bridge(alg, &m.rho, t0, t1)?;
                            let c = is_bridge(alg, &m.rho, alg, &m.rho, &t)?.or_else(|f| violation("type45", f.to_string()))?;
                            if !c.reflexive || c.left != *t0 || c.right != *t1 {
                                return violation("type45", format!("bridge {t0} → {t1} is not reflexive with these anchors"));
                            }
                        }
                    }
                    Ok(Check::Pass(format!("{} anchor pairs", cp.len() * cp.len())))
                })
            })
            .collect())
    }

    fn goodbridge(&self) -> Vec<Job<'_>> {
        let (ok, mut jobs) = self.certified();
        for b in ok.into_iter().filter(|b| b.cert.good.is_some()) {
            jobs.push(job(b.label.clone(), move || {
                let mut n = 0;
                for l in cov(&b.a, &b.rho)?.iter().filter(|l| l.is_subset(&b.cert.left)) {
                    compact_restrict(&b.a, &b.rho, &b.b, &b.sigma, &b.t, l)?;
                    n += 1;
                }
                if n == 0 {
                    return violation("goodbridge", "left anchor contains no member of Cov(ρ)");
                }
                Ok(Check::Pass(format!("{n} compact restrictions")))
            }));
        }
        jobs
    }

    fn modiso(&self) -> Vec<Job<'_>> {
        let (ok, mut jobs) = self.certified();
        for b in ok.into_iter().filter(|b| b.cert.good.is_some()) {
            jobs.push(job(b.label.clone(), move || {
                let (ta, tb) = b.witnesses()?;
                let sp = crate::congruence::upper_cover(&b.b, &b.sigma)?.to_rel();
                let mut sizes = Vec::new();
                for l in cov_plus(&b.a, &b.rho)?.iter().filter(|l| l.is_subset(&b.cert.left)) {
                    let r = compact_restrict(&b.a, &b.rho, &b.b, &b.sigma, &b.t, l)?;
                    if !r.pr34().is_subset(&sp) {
                        continue;
                    }
                    let g = induced_iso(&b.a, &b.rho, &b.b, &b.sigma, &r, ta, tb)?;
                    sizes.push(g.dom_size());
                }
                if sizes.is_empty() {
                    return Ok(Check::Skip("no compact restriction with anchors in Cov⁺".into()));
                }
                Ok(Check::Pass(format!("isomorphisms of quotients of sizes {sizes:?}")))
            }));
        }
        jobs
    }

    fn newsametype(&self) -> Vec<Job<'_>> {
        let (ok, mut jobs) = self.certified();
        for b in ok.into_iter().filter(|b| b.cert.good == Some(true)) {
            jobs.push(job(b.label.clone(), move || {
                let (x, y) = (cover_is_abelian(&b.a, &b.rho)?, cover_is_abelian(&b.b, &b.sigma)?);
                if x != y {
                    return violation("newsametype", format!("good bridge joins abelian = {x} with abelian = {y}"));
                }
                Ok(Check::Pass(format!("both covers abelian = {x}")))
            }));
        }
        jobs
    }

    fn adjacency_jobs(&self, suite: &'static str) -> Result<Vec<Job<'_>>> {
        let pairs = self.pairs()?;
        Ok(pairs
            .into_iter()
            .filter(|(x, y)| std::ptr::eq(x.entry, y.entry))
            .map(|(x, y)| {
                job(format!("{} ~ {}", x.label(), y.rho), move || {
                    let alg = x.alg();
                    let found = match adjacency_search(alg, &x.rho, &y.rho, x.wd()?, 1)? {
                        Search::Found(t) => t,
                        Search::Absent => return Ok(Check::Skip("not adjacent (complete search)".into())),
                        Search::BudgetExhausted => {
                            return Err(Error::ResourceCap { what: "adjacency search".into(), cap: 1 });
                        }
                    };
                    let ta = x.taylor()?;
                    let (ox, oy) = (opt(alg, &x.rho, ta)?, opt(alg, &y.rho, ta)?);
                    match suite {
                        "sameopt" if ox != oy => violation("sameopt", format!("adjacent with Opt {ox} and {oy}")),
                        "adjacent" if x.rho != y.rho && !y.rho.is_strictly_below(&oy) => {
                            violation("adjacent", format!("adjacent distinct congruences but Opt(σ) = σ = {}", y.rho))
                        }
                        _ => Ok(Check::Pass(format!("witness of {} quadruples; Opt {ox}, {oy}", found.len()))),
                    }
                })
            })
            .collect())
    }

    fn sameopt(&self) -> Result<Vec<Job<'_>>> {
        let mut jobs = self.adjacency_jobs("sameopt")?;
        let (ok, failed) = self.certified();
        jobs.extend(failed);
        for b in ok.into_iter().filter(|b| b.cert.reflexive) {
            jobs.push(job(b.label.clone(), move || {
                let (ta, _) = b.witnesses()?;
                let in_plus = |alg: &FiniteAlgebra, r: &Congruence, l: &BinRel| -> Result<bool> { Ok(cov_plus(alg, r)?.contains(l)) };
                if !in_plus(&b.a, &b.rho, &b.cert.left)? || !in_plus(&b.b, &b.sigma, &b.cert.right)? {
                    return Ok(Check::Skip("anchors outside Cov⁺; Opt(ρ,L) not computed".into()));
                }
                let (ox, oy) = (opt(&b.a, &b.rho, ta)?, opt(&b.b, &b.sigma, ta)?);
                if ox != oy {
                    return violation("sameopt", format!("reflexive bridge with Opt {ox} and {oy}"));
                }
                Ok(Check::Pass(format!("Opt = {ox}")))
            }));
        }
        Ok(jobs)
    }

    fn adjacent(&self) -> Result<Vec<Job<'_>>> {
        self.adjacency_jobs("adjacent")
    }

    fn sametype(&self) -> Result<Vec<Job<'_>>> {
        let mut jobs: Vec<Job<'_>> = self
            .pairs()?
            .into_iter()
            .filter(|(x, y)| x.bar.size() == y.bar.size())
            .map(|(x, y)| {
                job(format!("{} → {}", x.label(), y.label()), move || {
                    let Some(g) = x.bar.find_isomorphism(&y.bar)? else {
                        return Ok(Check::Skip("quotients are not isomorphic".into()));
                    };
                    let t = iso_graph_bridge(x.alg(), &x.rho, y.alg(), &y.rho, &g)?;
                    let c = is_bridge(x.alg(), &x.rho, y.alg(), &y.rho, &t)?.or_else(|f| violation("sametype", f.to_string()))?;
                    if c.good != Some(true) {
                        return violation("sametype", "isomorphism graph bridge is not good");
                    }
                    Ok(Check::Pass("isomorphism graph bridge is good".into()))
                })
            })
            .collect();
        let (ok, failed) = self.certified();
        jobs.extend(failed);
        for b in ok.into_iter().filter(|b| b.cert.good == Some(true)) {
            jobs.push(job(b.label.clone(), move || {
                if cover_is_abelian(&b.a, &b.rho)? || cover_is_abelian(&b.b, &b.sigma)? {
                    return Ok(Check::Skip("abelian cover".into()));
                }
                let (qa, _) = b.a.quotient(&b.rho)?;
                let (qb, _) = b.b.quotient(&b.sigma)?;
                if qa.find_isomorphism(&qb)?.is_none() {
                    return violation("sametype", "good bridge between nonabelian covers with non-isomorphic quotients");
                }
                Ok(Check::Pass("quotients isomorphic".into()))
            }));
        }
        Ok(jobs)
    }

    fn samebridge(&self) -> Vec<Job<'_>> {
        let (ok, mut jobs) = self.certified();
        for b in ok {
            jobs.push(job(b.label.clone(), move || {
                let (ta, tb) = b.witnesses()?;
                if b.cert.good.is_none() || !cover_is_abelian(&b.a, &b.rho)? || !cover_is_abelian(&b.b, &b.sigma)? {
                    return Ok(Check::Skip("needs meet-irreducible congruences with abelian covers".into()));
                }
                let rp = crate::congruence::upper_cover(&b.a, &b.rho)?.to_rel();
                let sp = crate::congruence::upper_cover(&b.b, &b.sigma)?.to_rel();
                if b.cert.left != rp || b.cert.right != sp {
                    return Ok(Check::Skip("anchors are not the upper covers".into()));
                }
                let x = extract_b3(&b.a, &b.rho, &b.b, &b.sigma, &b.t, ta, tb)?;
                Ok(Check::Pass(format!(
                    "generator {:?}; |T'| = {}, |T1| = {}, input B3 {}",
                    x.generator,
                    x.t_prime.len(),
                    x.t1.len(),
                    b.cert.b3
                )))
            }));
        }
        jobs
    }

    fn zhukequiv(&self) -> Result<Vec<Job<'_>>> {
        let limits = self.opts.limits;
        Ok(self
            .pairs()?
            .into_iter()
            .map(|(x, y)| {
                job(format!("{} → {}", x.label(), y.label()), move || {
                    let (da, db) = (x.d_bar()?, y.d_bar()?);
                    let similar = da.d.find_isomorphism(&db.d)?.is_some();
                    let built = good_bridge_between_d(x.alg(), &x.rho, da, y.alg(), &y.rho, db)?;
                    if built.is_some() != similar {
                        return violation("zhukequiv", format!("similar = {similar}, bridge built = {}", built.is_some()));
                    }
                    let exact = match search_good_bridge(x.alg(), &x.rho, y.alg(), &y.rho, &limits)? {
                        Search::Found(_) => true,
                        Search::Absent => false,
                        Search::BudgetExhausted => {
                            return Err(Error::ResourceCap { what: "good bridge search".into(), cap: limits.bridge_search_cap });
                        }
                    };
                    if exact != similar {
                        return violation("zhukequiv", format!("similar = {similar}, exhaustive search finds a good bridge = {exact}"));
                    }
                    Ok(Check::Pass(match built {
                        Some(g) => format!("similar; good B3 bridge of {} quadruples", g.t.len()),
                        None => "not similar; no good bridge".into(),
                    }))
                })
            })
            .collect())
    }

    fn gumm(&self) -> Vec<Job<'_>> {
        let mut jobs = Vec::new();
        for e in &self.corpus.entries {
            jobs.push(job(e.name().to_string(), move || {
                let wd = e
                    .weak_difference
                    .as_ref()
                    .ok_or_else(|| Error::precondition("no weak difference witness"))?;
                let mut groups = 0;
                for theta in con_lattice(&e.alg)?.congruences {
                    if !is_abelian(&e.alg, &theta)? {
                        continue;
                    }
                    for x in 0..e.alg.size() {
                        class_group(&e.alg, &theta, wd, x)?;
                        groups += 1;
                    }
                }
                Ok(Check::Pass(format!("{groups} class groups")))
            }));
        }
        jobs
    }

    fn deltaprop(&self) -> Vec<Job<'_>> {
        let mut jobs = Vec::new();
        for e in &self.corpus.entries {
            jobs.push(job(e.name().to_string(), move || {
                let alg = &e.alg;
                let lat = con_lattice(alg)?;
                let comm = Commutator::new(alg);
                let mut checked = 0;
                for theta in &lat.congruences {
                    for alpha in lat.congruences.iter().filter(|a| theta.is_below(a)) {
                        let big = delta(alg, theta, alpha)?;
                        let ta = crate::similarity::ThetaAlgebra::new(alg, theta)?;
                        for d in &lat.congruences {
                            if !comm.centralizes(alpha, theta, d)? {
                                continue;
                            }
                            for (i, j) in big.pairs() {
                                let ((a, a2), (b, b2)) = (ta.pair(i), ta.pair(j));
                                if d.related(a, a2) != d.related(b, b2) {
                                    return violation(
                                        "deltaprop",
                                        format!("θ = {theta}, α = {alpha}, δ = {d}: (({a},{a2}),({b},{b2})) ∈ Δ"),
                                    );
                                }
                            }
                            checked += 1;
                        }
                    }
                }
                Ok(Check::Pass(format!("{checked} triples")))
            }));
        }
        jobs
    }

    fn cent(&self) -> Vec<Job<'_>> {
        let mut jobs = Vec::new();
        for e in &self.corpus.entries {
            jobs.push(job(e.name().to_string(), move || {
                let alg = &e.alg;
                let lat = con_lattice(alg)?;
                // Cross-checking makes every call compare rows of M(φ,θ) with columns of M(θ,φ).
                let comm = Commutator::new(alg).with_cross_check(true);
                let cs = &lat.congruences;
                let mut triples = 0;
                for phi in cs {
                    for theta in cs {
                        for d in cs {
                            if comm.centralizes(phi, theta, d)? {
                                for smaller in cs.iter().filter(|p| p.is_below(phi)) {
                                    if !comm.centralizes(smaller, theta, d)? {
                                        return violation("cent", format!("C({phi},{theta};{d}) but not C({smaller},{theta};{d})"));
                                    }
                                }
                            }
                            triples += 1;
                        }
                    }
                }
                for theta in cs {
                    for d in cs {
                        let c = comm.centralizer(theta, d)?;
                        if let Some(bigger) = cs.iter().find(|p| c.is_strictly_below(p) && comm.centralizes(p, theta, d).unwrap_or(false)) {
                            return violation("cent", format!("({d}:{theta}) = {c} but {bigger} also centralizes"));
                        }
                    }
                }
                Ok(Check::Pass(format!("{triples} triples agree under both conditions")))
            }));
        }
        jobs
    }

    fn tracelaws(&self) -> Vec<Job<'_>> {
        let (ok, mut jobs) = self.certified();
        for b in &ok {
            let b = *b;
            jobs.push(job(format!("single: {}", b.label), move || {
                let tr = b.cert.trace.clone();
                if b.t.converse().trace() != tr.inverse() {
                    return violation("tracelaws", "tr(T^∪) ≠ tr(T)⁻¹");
                }
                let id = identity_bridge(&b.a, &b.rho, &b.cert.left)?;
                if id.trace() != b.rho.to_rel() {
                    return violation("tracelaws", format!("tr(I) = {} ≠ ρ", id.trace()));
                }
                if id.compose(&b.t)? != b.t {
                    return violation("tracelaws", "I ∘ T ≠ T for the left anchor of T");
                }
                Ok(Check::Pass("converse, identity and unit laws".into()))
            }));
        }
        let mut count = 0;
        'outer: for x in &ok {
            for y in &ok {
                if count >= self.opts.max_compositions {
                    break 'outer;
                }
                if x.b != y.a || x.sigma != y.rho {
                    continue;
                }
                count += 1;
                let (x, y) = (*x, *y);
                jobs.push(job(format!("{} ∘ {}", x.label, y.label), move || {
                    let c = x.t.compose(&y.t)?;
                    let want = x.cert.trace.compose(&y.cert.trace)?;
                    if c.trace() != want {
                        return violation("tracelaws", format!("tr(T∘T') = {} but tr(T)∘tr(T') = {want}", c.trace()));
                    }
                    let is_b = is_bridge(&x.a, &x.rho, &y.b, &y.sigma, &c)?.is_ok();
                    Ok(Check::Pass(format!("composite is a bridge: {is_b}")))
                }));
            }
        }
        jobs
    }
}

fn run_jobs(suite: &str, jobs: Vec<Job<'_>>) -> Vec<CheckRecord> {
    jobs.into_par_iter()
        .map(|(instance, f)| {
            let start = Instant::now();
            let outcome = f();
            let millis = start.elapsed().as_millis() as u64;
            let (status, witness) = match outcome {
                Ok(Check::Pass(w)) => (Status::Pass, w),
                Ok(Check::Skip(w)) => (Status::Skipped, w),
                Err(Error::Precondition(w)) => (Status::Skipped, w),
                Err(e @ Error::ResourceCap { .. }) => (Status::BudgetExhausted, e.to_string()),
                Err(e) => (Status::Fail, e.to_string()),
            };
            CheckRecord { suite: suite.to_string(), instance, status, witness, millis }
        })
        .collect()
}

fn bridge_between(label: String, x: &MeetIrreducible<'_>, y: &MeetIrreducible<'_>, t: QuadRel) -> Built {
    BridgeInstance::new(label.clone(), x.alg(), &x.rho, x.entry.taylor.clone(), y.alg(), &y.rho, y.entry.taylor.clone(), t)
        .map_err(|e| (label, e))
}

/// `T_D(A/ρ)` as a bridge from `(A/ρ, 0)` to `(D, 0)`.
fn t_da_bridge(m: &MeetIrreducible<'_>, ta: &TaylorWitness, wd: &WeakDifferenceWitness) -> Option<Built> {
    let label = format!("T_D of {}/{}", m.entry.name(), m.rho);
    let run = || -> Result<Option<BridgeInstance>> {
        let wd = wd.transfer(&m.bar)?;
        let tda = match build_t_da(&m.bar, &wd) {
            Ok(t) => t,
            Err(Error::Precondition(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let d = &tda.d.d;
        let (ta_bar, ta_d) = (ta.transfer(&m.bar)?, ta.transfer(d)?);
        let (z1, z2) = (Congruence::zero(m.bar.size()), Congruence::zero(d.size()));
        BridgeInstance::new(label.clone(), &m.bar, &z1, Some(ta_bar), d, &z2, Some(ta_d), tda.t).map(Some)
    };
    run().map_err(|e| (label.clone(), e)).transpose()
}

/// Hand-built instances on `Z4aff`, when present.
fn special_bridges(mis: &[MeetIrreducible<'_>]) -> Vec<Built> {
    let Some(m) = mis.iter().find(|m| m.entry.name() == "Z4aff" && m.rho.is_zero()) else {
        return Vec::new();
    };
    let (alg, z, ta) = (m.alg(), &m.rho, m.entry.taylor.clone());
    let mut out = Vec::new();
    let label = "twisted Z4aff bridge (violates B3)".to_string();
    out.push(BridgeInstance::new(label.clone(), alg, z, ta.clone(), alg, z, ta.clone(), twisted_z4()).map_err(|e| (label, e)));
    let label = "padded Z4aff bridge".to_string();
    let padded = ta
        .as_ref()
        .ok_or_else(|| Error::precondition("no Taylor witness"))
        .and_then(|t| opt_bridge(alg, z, t))
        .and_then(|ob| saturated_closure(alg, z, alg, z, ob.t.quads().chain([[0, 1, 0, 1]])))
        .and_then(|t| BridgeInstance::new(label.clone(), alg, z, ta.clone(), alg, z, ta.clone(), t));
    out.push(padded.map_err(|e| (label, e)));
    out
}

/// `{(a1,a2,b1,b2) : a2 − a1 = b2 − b1 = 2(b1 − a1)}` over `Z4`: a bridge from
/// `(Z4aff, 0)` to itself with anchors `η` whose member `(0,2,1,3)` has
/// `(0,0,1,1)` missing.
pub fn twisted_z4() -> QuadRel {
    let mut t = QuadRel::empty(4, 4);
    for a1 in 0..4 {
        for b1 in 0..4 {
            let k = (2 * (b1 + 4 - a1)) % 4;
            t.insert([a1, (a1 + k) % 4, b1, (b1 + k) % 4]);
        }
    }
    t
}

fn random_bridge(x: &MeetIrreducible<'_>, y: &MeetIrreducible<'_>, rng: &mut ChaCha8Rng) -> Result<Option<QuadRel>> {
    let (a, b) = (x.alg(), y.alg());
    let b2 = |q: Quad| x.rho.related(q[0], q[1]) == y.rho.related(q[2], q[3]);
    let inside = |q: Quad| x.plus.related(q[0], q[1]) && y.plus.related(q[2], q[3]);
    let candidates: Vec<Quad> = x
        .plus
        .pairs()
        .filter(|&(p, q)| !x.rho.related(p, q))
        .flat_map(|(p, q)| y.plus.pairs().filter(|&(r, s)| !y.rho.related(r, s)).map(move |(r, s)| [p, q, r, s]))
        .collect();
    if candidates.is_empty() {
        return Ok(None);
    }
    let mut seeds = Vec::new();
    for _ in 0..rng.random_range(1..=2usize) {
        seeds.push(candidates[rng.random_range(0..candidates.len())]);
    }
    for _ in 0..rng.random_range(0..=2usize) {
        let (p, r) = (rng.random_range(0..a.size()), rng.random_range(0..b.size()));
        seeds.push([p, p, r, r]);
    }
    let Some(t) = saturated_closure_guarded(a, &x.rho, b, &y.rho, seeds, |q| b2(q) && inside(q))? else {
        return Ok(None);
    };
    let full = t.pr12() == x.plus.to_rel() && t.pr34() == y.plus.to_rel();
    Ok(full.then_some(t))
}
