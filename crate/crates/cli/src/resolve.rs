//! Turning command-line strings into algebras, congruences, bridges and witnesses.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use unialg::builtin;
use unialg::harness::{build_corpus, CorpusSpec};
use unialg::io::BridgeFile;
use unialg::terms::{search_term, SearchOutcome, TaylorWitness, Term, TermPredicate, WeakDifferenceWitness};
use unialg::{BinRel, Congruence, FiniteAlgebra, QuadRel};

use crate::Failure;

/// A path to an algebra JSON file, or the name of a builtin (`z4aff`,
/// also accepted as `z4aff.json` when no such file exists).
pub fn algebra(spec: &str) -> Result<FiniteAlgebra> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Failure::Env(format!("{spec}: {e}")))?;
        return FiniteAlgebra::from_json(&text).with_context(|| format!("reading {spec}"));
    }
    let name = spec.strip_suffix(".json").unwrap_or(spec);
    let name = Path::new(name).file_name().and_then(|s| s.to_str()).unwrap_or(name);
    builtin::by_name(name).ok_or_else(|| Failure::Usage(format!("`{spec}` is neither a readable file nor a builtin algebra")).into())
}

pub fn congruence(alg: &FiniteAlgebra, text: &str) -> Result<Congruence> {
    Congruence::parse_for(alg, text).with_context(|| format!("congruence `{text}` of `{}`", alg.name()))
}

pub fn relation(alg: &FiniteAlgebra, text: &str) -> Result<BinRel> {
    Ok(BinRel::parse(text, alg.size(), alg.size())?)
}

pub fn pair(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text.split_once(',').ok_or_else(|| Failure::Usage(format!("pair `{text}` must look like 0,1")))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| Failure::Usage(format!("bad element `{s}`")));
    Ok((parse(a)?, parse(b)?))
}

pub struct LoadedBridge {
    pub a: FiniteAlgebra,
    pub rho: Congruence,
    pub b: FiniteAlgebra,
    pub sigma: Congruence,
    pub t: QuadRel,
}

/// Reads a bridge file; the algebras come from the overrides or else from
/// the names recorded in the file.
pub fn bridge(path: &str, alg_a: Option<&str>, alg_b: Option<&str>) -> Result<LoadedBridge> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Env(format!("{path}: {e}")))?;
    let file = BridgeFile::parse(&text)?;
    let a = algebra(alg_a.unwrap_or(&file.alg_a))?;
    let b = algebra(alg_b.unwrap_or(&file.alg_b))?;
    let (rho, sigma) = file.congruences()?;
    rho.verify(&a)?;
    sigma.verify(&b)?;
    let t = file.relation(a.size(), b.size())?;
    Ok(LoadedBridge { a, rho, b, sigma, t })
}

pub fn write_bridge(out: &str, a: &FiniteAlgebra, rho: &Congruence, b: &FiniteAlgebra, sigma: &Congruence, t: &QuadRel) -> Result<()> {
    let file = BridgeFile::new(a.name(), rho, b.name(), sigma, t);
    fs::write(out, file.to_json()).map_err(|e| Failure::Env(format!("{out}: {e}")).into())
}

fn declared<W>(alg: &FiniteAlgebra, pick: impl Fn(&unialg::harness::CorpusEntry) -> Option<W>, transfer: impl Fn(&W) -> unialg::Result<W>) -> Result<Option<W>> {
    for e in build_corpus(CorpusSpec::BUILTIN)?.entries {
        if e.alg.same_signature(alg) && e.alg.size() == alg.size() && e.alg.find_isomorphism(alg)?.is_some() {
            if let Some(w) = pick(&e) {
                return Ok(Some(transfer(&w)?));
            }
        }
    }
    Ok(None)
}

/// An explicit term, else the one declared for an isomorphic builtin, else
/// a bounded search (Maltsev first, then WNU).
pub fn taylor(alg: &FiniteAlgebra, explicit: Option<&str>) -> Result<TaylorWitness> {
    if let Some(s) = explicit {
        let t = Term::parse(s, alg)?;
        return Ok(match TaylorWitness::from_maltsev(alg, t.clone()) {
            Ok(w) => w,
            Err(_) => TaylorWitness::from_wnu(alg, t.clone(), t.var_bound())?,
        });
    }
    if let Some(w) = declared(alg, |e| e.taylor.clone(), |w| w.transfer(alg))? {
        return Ok(w);
    }
    for p in [TermPredicate::Maltsev, TermPredicate::Wnu] {
        if let SearchOutcome::Found { term, arity } = search_term(alg, p, 2)? {
            return Ok(match p {
                TermPredicate::Maltsev => TaylorWitness::from_maltsev(alg, term)?,
                _ => TaylorWitness::from_wnu(alg, term, arity)?,
            });
        }
    }
    bail!(Failure::Usage(format!("no Taylor term found for `{}`; pass one with --taylor", alg.name())))
}

pub fn weak_difference(alg: &FiniteAlgebra, explicit: Option<&str>) -> Result<WeakDifferenceWitness> {
    if let Some(s) = explicit {
        return Ok(WeakDifferenceWitness::new(alg, Term::parse(s, alg)?)?);
    }
    if let Some(w) = declared(alg, |e| e.weak_difference.clone(), |w| w.transfer(alg))? {
        return Ok(w);
    }
    match search_term(alg, TermPredicate::WeakDifference, 2)? {
        SearchOutcome::Found { term, .. } => Ok(WeakDifferenceWitness::new(alg, term)?),
        SearchOutcome::NotFoundWithinBound => {
            bail!(Failure::Usage(format!("no weak difference term found for `{}`; pass one with --wd", alg.name())))
        }
    }
}
