//! Algebras under test together with verified term witnesses.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::builtin;
use crate::error::{Error, Result};
use crate::terms::{is_maltsev, search_term, SearchOutcome, TaylorWitness, Term, TermPredicate, WeakDifferenceWitness};

/// Witness terms as written in `witnesses.json`, as s-expressions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maltsev: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wnu: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak_difference: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub alg: FiniteAlgebra,
    pub declared: WitnessDecl,
    /// Verified Maltsev term if one was declared, else verified WNU.
    pub taylor: Option<TaylorWitness>,
    pub weak_difference: Option<WeakDifferenceWitness>,
    pub note: String,
}

impl CorpusEntry {
    pub fn name(&self) -> &str {
        self.alg.name()
    }

    pub fn has_maltsev(&self) -> bool {
        matches!(&self.taylor, Some(t) if is_maltsev(&self.alg, t.term()).unwrap_or(false))
    }
}

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    /// Algebras dropped before any suite runs, with the reason.
    pub excluded: Vec<(String, String)>,
}

/// Which algebras to put in a corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusSpec {
    pub builtin: bool,
    /// Enumerate commutative idempotent groupoids of size `1..=n`; 0 for none.
    pub enumerate_up_to: usize,
}

impl CorpusSpec {
    pub const BUILTIN: CorpusSpec = CorpusSpec { builtin: true, enumerate_up_to: 0 };
}

fn builtin_decls() -> Vec<(FiniteAlgebra, WitnessDecl, &'static str)> {
    let p = "(p x0 x1 x2)".to_string();
    let affine = WitnessDecl { maltsev: Some(p.clone()), wnu: None, weak_difference: Some(p.clone()) };
    let sym = WitnessDecl { maltsev: None, wnu: Some(p.clone()), weak_difference: Some(p.clone()) };
    let lattice = WitnessDecl { maltsev: None, wnu: Some("(m x0 x1)".into()), weak_difference: Some(p) };
    vec![
        (builtin::z2aff(), affine.clone(), "affine Z2"),
        (builtin::z3aff(), affine.clone(), "affine Z3"),
        (builtin::z4aff(), affine.clone(), "affine Z4"),
        (builtin::s2(), sym.clone(), "two-element semilattice"),
        (builtin::l2(), lattice, "two-element lattice"),
        (builtin::z2aff_sq(), affine, "square of affine Z2"),
        (builtin::z2aff_x_s2(), sym, "affine Z2 times semilattice"),
    ]
}

/// Verifies declared witnesses; returns the entry or the reason to exclude it.
pub fn verify_entry(alg: FiniteAlgebra, declared: WitnessDecl, note: &str) -> std::result::Result<CorpusEntry, String> {
    let parse = |s: &str| Term::parse(s, &alg).map_err(|e| format!("{}: {e}", alg.name()));
    let taylor = match (&declared.maltsev, &declared.wnu) {
        (Some(m), _) => Some(TaylorWitness::from_maltsev(&alg, parse(m)?).map_err(|e| e.to_string())?),
        (None, Some(w)) => {
            let t = parse(w)?;
            let arity = t.var_bound();
            Some(TaylorWitness::from_wnu(&alg, t, arity).map_err(|e| e.to_string())?)
        }
        (None, None) => None,
    };
    let weak_difference = match &declared.weak_difference {
        Some(d) => Some(WeakDifferenceWitness::new(&alg, parse(d)?).map_err(|e| e.to_string())?),
        None => None,
    };
    Ok(CorpusEntry { alg, declared, taylor, weak_difference, note: note.to_string() })
}

/// Adds to an enumerated groupoid its WNU `m` and, if a search of depth 2
/// finds one, a weak difference term.
fn enumerated_decl(alg: &FiniteAlgebra) -> Result<WitnessDecl> {
    let weak_difference = match search_term(alg, TermPredicate::WeakDifference, 2)? {
        SearchOutcome::Found { term, .. } => Some(term.to_sexpr(alg)),
        SearchOutcome::NotFoundWithinBound => None,
    };
    Ok(WitnessDecl { maltsev: None, wnu: Some("(m x0 x1)".into()), weak_difference })
}

pub fn build_corpus(spec: CorpusSpec) -> Result<Corpus> {
    let mut candidates: Vec<(FiniteAlgebra, WitnessDecl, String)> = Vec::new();
    if spec.builtin {
        candidates.extend(builtin_decls().into_iter().map(|(a, d, n)| (a, d, n.to_string())));
    }
    if spec.enumerate_up_to >= 1 {
        for alg in builtin::commutative_idempotent_groupoids(spec.enumerate_up_to) {
            let decl = enumerated_decl(&alg)?;
            candidates.push((alg, decl, "enumerated commutative idempotent groupoid".into()));
        }
    }
    let mut corpus = Corpus::default();
    for (alg, decl, note) in candidates {
        if let Some(dup) = find_isomorphic(&corpus, &alg)? {
            corpus.excluded.push((alg.name().to_string(), format!("isomorphic to {dup}")));
            continue;
        }
        match verify_entry(alg.clone(), decl, &note) {
            Ok(e) => corpus.entries.push(e),
            Err(reason) => corpus.excluded.push((alg.name().to_string(), reason)),
        }
    }
    Ok(corpus)
}

fn find_isomorphic(corpus: &Corpus, alg: &FiniteAlgebra) -> Result<Option<String>> {
    for e in &corpus.entries {
        if e.alg.same_signature(alg) && e.alg.size() == alg.size() && e.alg.find_isomorphism(alg)?.is_some() {
            return Ok(Some(e.name().to_string()));
        }
    }
    Ok(None)
}

/// Reads a corpus directory: `*.json` algebra files plus `witnesses.json`
/// mapping algebra names to witness declarations.
pub fn load_corpus_dir(dir: &Path) -> Result<Corpus> {
    let io = |e: std::io::Error| Error::Invalid(format!("{}: {e}", dir.display()));
    let wpath = dir.join("witnesses.json");
    let decls: BTreeMap<String, WitnessDecl> = match fs::read_to_string(&wpath) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", wpath.display())))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
        Err(e) => return Err(io(e)),
    };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().is_some_and(|f| f != "witnesses.json"))
        .collect();
    paths.sort();
    let mut corpus = Corpus::default();
    for p in paths {
        let text = fs::read_to_string(&p).map_err(io)?;
        let alg = FiniteAlgebra::from_json(&text)?;
        let decl = decls.get(alg.name()).cloned().unwrap_or_default();
        if let Some(dup) = find_isomorphic(&corpus, &alg)? {
            corpus.excluded.push((alg.name().to_string(), format!("isomorphic to {dup}")));
            continue;
        }
        match verify_entry(alg.clone(), decl, &format!("loaded from {}", p.display())) {
            Ok(e) => corpus.entries.push(e),
            Err(reason) => corpus.excluded.push((alg.name().to_string(), reason)),
        }
    }
    Ok(corpus)
}

/// Writes algebra files and `witnesses.json`; the inverse of [`load_corpus_dir`].
pub fn write_corpus_dir(corpus: &Corpus, dir: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Invalid(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut decls = BTreeMap::new();
    for e in &corpus.entries {
        fs::write(dir.join(format!("{}.json", e.name())), e.alg.to_json()).map_err(io)?;
        decls.insert(e.name().to_string(), e.declared.clone());
    }
    let text = serde_json::to_string_pretty(&decls).expect("declarations serialize");
    fs::write(dir.join("witnesses.json"), text).map_err(io)
}
