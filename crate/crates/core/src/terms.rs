//! Terms over an algebra's signature, identity checks, and bounded search.

use std::collections::HashMap;
use std::fmt;

use crate::algebra::FiniteAlgebra;
use crate::commutator;
use crate::congruence::{con_lattice, Congruence};
use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(usize, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(op: usize, children: Vec<Term>) -> Term {
        Term::App(op, children)
    }

    /// The basic operation `op` applied to `x0 .. x(k-1)`.
    pub fn basic(alg: &FiniteAlgebra, op: usize) -> Term {
        let k = alg.ops()[op].arity;
        Term::App(op, (0..k).map(Term::Var).collect())
    }

    /// One more than the largest variable index, or 0 for ground terms.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::App(_, ch) => ch.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, ch) => 1 + ch.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Checks arities against the signature.
    pub fn check(&self, alg: &FiniteAlgebra) -> Result<()> {
        match self {
            Term::Var(_) => Ok(()),
            Term::App(op, ch) => {
                let o = alg
                    .ops()
                    .get(*op)
                    .ok_or_else(|| Error::Invalid(format!("no operation with index {op}")))?;
                if o.arity != ch.len() {
                    return Err(Error::ArityMismatch { op: o.name.clone(), expected: o.arity, got: ch.len() });
                }
                ch.iter().try_for_each(|c| c.check(alg))
            }
        }
    }

    pub fn parse(text: &str, alg: &FiniteAlgebra) -> Result<Term> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let t = parse_tokens(&tokens, &mut pos, alg)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!("trailing input in term `{text}`")));
        }
        t.check(alg)?;
        Ok(t)
    }

    pub fn display<'a>(&'a self, alg: &'a FiniteAlgebra) -> TermDisplay<'a> {
        TermDisplay { term: self, alg }
    }

    pub fn to_sexpr(&self, alg: &FiniteAlgebra) -> String {
        self.display(alg).to_string()
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    alg: &'a FiniteAlgebra,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(op, ch) => {
                let name = &self.alg.ops()[*op].name;
                if ch.is_empty() {
                    return write!(f, "{name}");
                }
                write!(f, "({name}")?;
                for c in ch {
                    write!(f, " {}", c.display(self.alg))?;
                }
                write!(f, ")")
            }
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !ch.is_whitespace() {
                out.push(ch.to_string());
            }
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn atom(tok: &str, alg: &FiniteAlgebra) -> Result<Term> {
    if let Some(rest) = tok.strip_prefix('x') {
        if let Ok(i) = rest.parse::<usize>() {
            return Ok(Term::Var(i));
        }
    }
    match alg.op_index(tok) {
        Some(op) => Ok(Term::App(op, Vec::new())),
        None => Err(Error::Parse(format!("unknown symbol `{tok}`"))),
    }
}

fn parse_tokens(tokens: &[String], pos: &mut usize, alg: &FiniteAlgebra) -> Result<Term> {
    let tok = tokens.get(*pos).ok_or_else(|| Error::Parse("unexpected end of term".into()))?;
    *pos += 1;
    if tok == ")" {
        return Err(Error::Parse("unexpected `)`".into()));
    }
    if tok != "(" {
        return atom(tok, alg);
    }
    let head = tokens.get(*pos).ok_or_else(|| Error::Parse("unexpected end of term".into()))?;
    *pos += 1;
    let op = alg.op_index(head).ok_or_else(|| Error::Parse(format!("unknown operation `{head}`")))?;
    let mut children = Vec::new();
    loop {
        match tokens.get(*pos).map(String::as_str) {
            Some(")") => {
                *pos += 1;
                return Ok(Term::App(op, children));
            }
            Some(_) => children.push(parse_tokens(tokens, pos, alg)?),
            None => return Err(Error::Parse("missing `)`".into())),
        }
    }
}

pub fn eval_term(alg: &FiniteAlgebra, term: &Term, env: &[usize]) -> Result<usize> {
    match term {
        Term::Var(i) => {
            let v = *env
                .get(*i)
                .ok_or_else(|| Error::Invalid(format!("variable x{i} not bound by an environment of length {}", env.len())))?;
            alg.check_elements(&[v])?;
            Ok(v)
        }
        Term::App(op, ch) => {
            let args = ch.iter().map(|c| eval_term(alg, c, env)).collect::<Result<Vec<_>>>()?;
            alg.eval_op(*op, &args)
        }
    }
}

/// The operation table of `term` as a `k`-ary operation.
pub fn term_table(alg: &FiniteAlgebra, term: &Term, k: usize) -> Result<Vec<usize>> {
    if term.var_bound() > k {
        return Err(Error::Invalid(format!("term uses x{} but arity is {k}", term.var_bound() - 1)));
    }
    term.check(alg)?;
    Ok(table_rec(alg, term, k))
}

fn table_rec(alg: &FiniteAlgebra, term: &Term, k: usize) -> Vec<usize> {
    let n = alg.size();
    let len = n.pow(k as u32);
    match term {
        Term::Var(i) => (0..len).map(|idx| idx / n.pow((k - 1 - i) as u32) % n).collect(),
        Term::App(op, ch) => {
            let kids: Vec<Vec<usize>> = ch.iter().map(|c| table_rec(alg, c, k)).collect();
            apply_tables(alg, *op, &kids.iter().map(Vec::as_slice).collect::<Vec<_>>(), len)
        }
    }
}

fn apply_tables(alg: &FiniteAlgebra, op: usize, kids: &[&[usize]], len: usize) -> Vec<usize> {
    let n = alg.size();
    let table = &alg.ops()[op].table;
    (0..len)
        .map(|idx| table[kids.iter().fold(0, |acc, kid| acc * n + kid[idx])])
        .collect()
}

/// Index in a `k`-ary table of the tuple whose entries are `x` where
/// `word[i]` is false and `y` where it is true.
fn word_index(n: usize, word: &[bool], x: usize, y: usize) -> usize {
    word.iter().fold(0, |acc, &w| acc * n + if w { y } else { x })
}

fn table_idempotent(n: usize, k: usize, table: &[usize]) -> bool {
    (0..n).all(|x| table[word_index(n, &vec![false; k], x, x)] == x)
}

pub fn is_idempotent(alg: &FiniteAlgebra, term: &Term) -> Result<bool> {
    let k = term.var_bound().max(1);
    let table = term_table(alg, term, k)?;
    Ok(table_idempotent(alg.size(), k, &table))
}

/// Rows of Taylor identities `t(u) ≈ t(v)` over the letters x (false), y (true).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityScheme {
    rows: Vec<(Vec<bool>, Vec<bool>)>,
}

impl IdentityScheme {
    /// Rows given as word pairs like `("xxy", "yyy")`. Row `i` must have
    /// different letters in position `i`.
    pub fn new(rows: &[(&str, &str)]) -> Result<Self> {
        let word = |w: &str| -> Result<Vec<bool>> {
            w.chars()
                .map(|c| match c {
                    'x' => Ok(false),
                    'y' => Ok(true),
                    _ => Err(Error::Parse(format!("letter `{c}` in identity word `{w}`"))),
                })
                .collect()
        };
        let rows: Vec<(Vec<bool>, Vec<bool>)> =
            rows.iter().map(|(u, v)| Ok((word(u)?, word(v)?))).collect::<Result<_>>()?;
        let k = rows.len();
        for (i, (u, v)) in rows.iter().enumerate() {
            if u.len() != k || v.len() != k {
                return Err(Error::Invalid(format!("identity row {i} must have words of length {k}")));
            }
            if u[i] == v[i] {
                return Err(Error::Invalid(format!("identity row {i} has the same letter in position {i}")));
            }
        }
        Ok(IdentityScheme { rows })
    }

    pub fn arity(&self) -> usize {
        self.rows.len()
    }

    /// `t(x,x,y) ≈ t(y,y,y)` twice and `t(y,x,x) ≈ t(y,y,y)`: the Taylor
    /// scheme satisfied by Maltsev terms.
    pub fn maltsev() -> Self {
        IdentityScheme::new(&[("xxy", "yyy"), ("xxy", "yyy"), ("yxx", "yyy")]).expect("well formed")
    }

    /// Row `i` compares `y` in position `i` with `y` in position `i+1`.
    pub fn wnu_rotation(k: usize) -> Self {
        let rows: Vec<(String, String)> = (0..k)
            .map(|i| {
                let w = |p: usize| (0..k).map(|q| if q == p { 'y' } else { 'x' }).collect::<String>();
                (w(i), w((i + 1) % k))
            })
            .collect();
        let refs: Vec<(&str, &str)> = rows.iter().map(|(u, v)| (u.as_str(), v.as_str())).collect();
        IdentityScheme::new(&refs).expect("well formed")
    }

    /// `t(x,y) ≈ t(y,x)` in both rows.
    pub fn commutative() -> Self {
        IdentityScheme::new(&[("xy", "yx"), ("xy", "yx")]).expect("well formed")
    }
}

fn table_taylor(n: usize, scheme: &IdentityScheme, table: &[usize]) -> bool {
    let k = scheme.arity();
    table_idempotent(n, k, table)
        && scheme.rows.iter().all(|(u, v)| {
            (0..n).all(|x| (0..n).all(|y| table[word_index(n, u, x, y)] == table[word_index(n, v, x, y)]))
        })
}

pub fn is_taylor(alg: &FiniteAlgebra, term: &Term, scheme: &IdentityScheme) -> Result<bool> {
    let table = term_table(alg, term, scheme.arity())?;
    Ok(table_taylor(alg.size(), scheme, &table))
}

fn table_wnu(n: usize, k: usize, table: &[usize]) -> bool {
    table_idempotent(n, k, table)
        && (0..n).all(|x| {
            (0..n).all(|y| {
                let first = table[word_index(n, &one_y(k, 0), x, y)];
                (1..k).all(|p| table[word_index(n, &one_y(k, p), x, y)] == first)
            })
        })
}

fn one_y(k: usize, p: usize) -> Vec<bool> {
    (0..k).map(|q| q == p).collect()
}

pub fn is_wnu(alg: &FiniteAlgebra, term: &Term, arity: usize) -> Result<bool> {
    if arity < 2 {
        return Err(Error::Invalid("a weak near-unanimity term needs arity at least 2".into()));
    }
    let table = term_table(alg, term, arity)?;
    Ok(table_wnu(alg.size(), arity, &table))
}

fn table_maltsev(n: usize, table: &[usize]) -> bool {
    (0..n).all(|x| (0..n).all(|y| table[(x * n + x) * n + y] == y && table[(y * n + x) * n + x] == y))
}

pub fn is_maltsev(alg: &FiniteAlgebra, term: &Term) -> Result<bool> {
    let table = term_table(alg, term, 3)?;
    Ok(table_maltsev(alg.size(), &table))
}

/// Pairs `(δ, θ)` with `δ ≤ θ` and `θ/δ` abelian.
pub fn abelian_intervals(alg: &FiniteAlgebra) -> Result<Vec<(Congruence, Congruence)>> {
    let lat = con_lattice(alg)?;
    let mut out = Vec::new();
    for theta in &lat.congruences {
        for delta in lat.congruences.iter().filter(|d| d.is_below(theta)) {
            if commutator::is_abelian_modulo(alg, theta, delta)? {
                out.push((delta.clone(), theta.clone()));
            }
        }
    }
    Ok(out)
}

fn table_weak_difference(n: usize, table: &[usize], intervals: &[(Congruence, Congruence)]) -> bool {
    table_idempotent(n, 3, table)
        && intervals.iter().all(|(delta, theta)| {
            theta.pairs().all(|(a, b)| {
                delta.related(table[(a * n + a) * n + b], b) && delta.related(table[(b * n + a) * n + a], b)
            })
        })
}

pub fn is_weak_difference_term(alg: &FiniteAlgebra, term: &Term) -> Result<bool> {
    let table = term_table(alg, term, 3)?;
    let intervals = abelian_intervals(alg)?;
    Ok(table_weak_difference(alg.size(), &table, &intervals))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermPredicate {
    Wnu,
    Maltsev,
    WeakDifference,
}

impl TermPredicate {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "wnu" => Ok(TermPredicate::Wnu),
            "maltsev" => Ok(TermPredicate::Maltsev),
            "weak_difference" | "wdt" | "weak-difference" => Ok(TermPredicate::WeakDifference),
            _ => Err(Error::Parse(format!("unknown term predicate `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { term: Term, arity: usize },
    /// Nothing qualifies among terms of the searched depth; says nothing
    /// about deeper terms.
    NotFoundWithinBound,
}

/// Breadth-first search over terms of depth at most `max_depth`, keeping one
/// term per induced operation table. WNU searches try arity 2, then 3.
pub fn search_term(alg: &FiniteAlgebra, predicate: TermPredicate, max_depth: usize) -> Result<SearchOutcome> {
    search_term_with(alg, predicate, max_depth, &Limits::DEFAULT)
}

pub fn search_term_with(
    alg: &FiniteAlgebra,
    predicate: TermPredicate,
    max_depth: usize,
    limits: &Limits,
) -> Result<SearchOutcome> {
    if max_depth == 0 {
        return Err(Error::Invalid("search depth must be at least 1".into()));
    }
    let n = alg.size();
    let intervals = match predicate {
        TermPredicate::WeakDifference => abelian_intervals(alg)?,
        _ => Vec::new(),
    };
    let arities: &[usize] = match predicate {
        TermPredicate::Wnu => &[2, 3],
        _ => &[3],
    };
    for &k in arities {
        let accept = |t: &[usize]| match predicate {
            TermPredicate::Wnu => table_wnu(n, k, t),
            TermPredicate::Maltsev => table_maltsev(n, t),
            TermPredicate::WeakDifference => table_weak_difference(n, t, &intervals),
        };
        if let Some(term) = bfs(alg, k, max_depth, limits, accept)? {
            return Ok(SearchOutcome::Found { term, arity: k });
        }
    }
    Ok(SearchOutcome::NotFoundWithinBound)
}

fn bfs(
    alg: &FiniteAlgebra,
    k: usize,
    max_depth: usize,
    limits: &Limits,
    accept: impl Fn(&[usize]) -> bool,
) -> Result<Option<Term>> {
    let len = alg.size().pow(k as u32);
    let cap = limits.term_cap;
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut terms: Vec<(Vec<usize>, Term)> = Vec::new();
    // Level boundaries: terms[level_start[d]..level_start[d+1]] have depth d.
    let mut level_start = vec![0usize];
    for i in 0..k {
        let t = Term::Var(i);
        let table = table_rec(alg, &t, k);
        if seen.insert(table.clone(), terms.len()).is_none() {
            terms.push((table, t));
        }
    }
    if let Some((_, t)) = terms.iter().find(|(tb, _)| accept(tb)) {
        return Ok(Some(t.clone()));
    }
    let mut evaluations: usize = 0;
    let eval_cap = cap.saturating_mul(64);
    for depth in 1..=max_depth {
        level_start.push(terms.len());
        let prev_start = level_start[depth - 1];
        let prev_end = level_start[depth];
        for (op, o) in alg.ops().iter().enumerate() {
            let a = o.arity;
            if a == 0 {
                if depth == 1 {
                    let t = Term::App(op, Vec::new());
                    let table = vec![o.table[0]; len];
                    if seen.insert(table.clone(), terms.len()).is_none() {
                        if accept(&table) {
                            return Ok(Some(t));
                        }
                        terms.push((table, t));
                    }
                }
                continue;
            }
            // Children from terms[0..prev_end], at least one from the previous level.
            let mut idx = vec![0usize; a];
            let count = prev_end.pow(a as u32);
            let mut code = 0usize;
            while code < count {
                let mut rest = code;
                for slot in idx.iter_mut().rev() {
                    *slot = rest % prev_end;
                    rest /= prev_end;
                }
                code += 1;
                if !idx.iter().any(|&i| i >= prev_start) {
                    continue;
                }
                evaluations += 1;
                if evaluations > eval_cap {
                    return Err(Error::ResourceCap { what: "term evaluations".into(), cap: eval_cap });
                }
                let kids: Vec<&[usize]> = idx.iter().map(|&i| terms[i].0.as_slice()).collect();
                let table = apply_tables(alg, op, &kids, len);
                if seen.contains_key(&table) {
                    continue;
                }
                let t = Term::App(op, idx.iter().map(|&i| terms[i].1.clone()).collect());
                if accept(&table) {
                    return Ok(Some(t));
                }
                if terms.len() >= cap {
                    return Err(Error::ResourceCap { what: "distinct term operations".into(), cap });
                }
                seen.insert(table.clone(), terms.len());
                terms.push((table, t));
            }
        }
    }
    Ok(None)
}

/// A term verified to satisfy a Taylor scheme on a given algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorWitness {
    term: Term,
    scheme: IdentityScheme,
}

impl TaylorWitness {
    pub fn new(alg: &FiniteAlgebra, term: Term, scheme: IdentityScheme) -> Result<Self> {
        if is_taylor(alg, &term, &scheme)? {
            Ok(TaylorWitness { term, scheme })
        } else {
            Err(Error::precondition(format!("`{}` is not a Taylor term of `{}`", term.to_sexpr(alg), alg.name())))
        }
    }

    pub fn from_wnu(alg: &FiniteAlgebra, term: Term, arity: usize) -> Result<Self> {
        Self::new(alg, term, IdentityScheme::wnu_rotation(arity))
    }

    pub fn from_maltsev(alg: &FiniteAlgebra, term: Term) -> Result<Self> {
        Self::new(alg, term, IdentityScheme::maltsev())
    }

    /// Re-verifies the witness on another algebra of the same signature
    /// (quotients, subalgebras, products keep the identities).
    pub fn transfer(&self, other: &FiniteAlgebra) -> Result<Self> {
        Self::new(other, self.term.clone(), self.scheme.clone())
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn scheme(&self) -> &IdentityScheme {
        &self.scheme
    }
}

/// A term verified to be a weak difference term of a given algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakDifferenceWitness {
    term: Term,
}

impl WeakDifferenceWitness {
    pub fn new(alg: &FiniteAlgebra, term: Term) -> Result<Self> {
        if is_weak_difference_term(alg, &term)? {
            Ok(WeakDifferenceWitness { term })
        } else {
            Err(Error::precondition(format!(
                "`{}` is not a weak difference term of `{}`",
                term.to_sexpr(alg),
                alg.name()
            )))
        }
    }

    pub fn transfer(&self, other: &FiniteAlgebra) -> Result<Self> {
        Self::new(other, self.term.clone())
    }

    pub fn term(&self) -> &Term {
        &self.term
    }
}
