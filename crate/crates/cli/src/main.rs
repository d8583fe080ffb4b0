//! `unialg` command-line tool.
//!
//! Exit status: 0 on success, 1 when a check fails or a theorem violation is
//! found, 2 on usage or input errors, 3 on I/O and resource errors.

mod resolve;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use unialg::bridges::{self, Search};
use unialg::commutator::Commutator;
use unialg::congruence as con;
use unialg::harness::{self, build_corpus, load_corpus_dir, Corpus, CorpusSpec, Status, SuiteOptions};
use unialg::similarity;
use unialg::terms::{self, search_term, SearchOutcome, Term, TermPredicate};
use unialg::{ElementMap, Error, FiniteAlgebra, Limits};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Env(String),
    Check(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(s) | Failure::Env(s) | Failure::Check(s) => f.write_str(s),
        }
    }
}

impl std::error::Error for Failure {}

#[derive(Parser)]
#[command(name = "unialg", version, about = "Congruences, centralizers and bridges of small finite algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect and build algebras.
    #[command(subcommand)]
    Alg(AlgCmd),
    /// Congruences and relations derived from them.
    #[command(subcommand)]
    Con(ConCmd),
    /// The centralizer (δ:θ).
    Centralizer {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        theta: String,
        /// Defaults to the zero congruence.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Whether θ is abelian over δ.
    Abelian {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        delta: Option<String>,
    },
    /// Check or search for terms.
    #[command(subcommand)]
    Term(TermCmd),
    /// D(A,θ), or D(A) of a subdirectly irreducible algebra when θ is omitted.
    Dalg {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        theta: Option<String>,
        #[command(flatten)]
        wit: WitnessArgs,
        /// Write D as an algebra file.
        #[arg(long)]
        out: Option<String>,
    },
    /// Similarity of two subdirectly irreducible algebras.
    Similar {
        #[arg(long)]
        alg: String,
        #[arg(long)]
        alg2: String,
        #[arg(long)]
        wd: Option<String>,
        #[arg(long)]
        wd2: Option<String>,
    },
    /// The simple affine algebra Z and the relation ζ at an irreducible ρ.
    Zeta {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        rho: String,
        #[command(flatten)]
        wit: WitnessArgs,
    },
    /// Bridges between meet-irreducible congruences.
    #[command(subcommand)]
    Bridge(BridgeCmd),
    /// Run verification suites over a corpus and write a JSON report.
    VerifyPaper {
        /// A suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// `builtin`, `enumerated`, `builtin+enumerated`, or a corpus directory.
        #[arg(long, default_value = "builtin")]
        corpus: String,
        #[arg(long)]
        report: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Enumeration size bound for enumerated corpora.
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
}

#[derive(Args)]
struct AlgArg {
    /// Algebra file or builtin name.
    #[arg(long)]
    alg: String,
}

#[derive(Args)]
struct WitnessArgs {
    /// Taylor term (Maltsev or WNU) as an s-expression.
    #[arg(long)]
    taylor: Option<String>,
    /// Weak difference term as an s-expression.
    #[arg(long)]
    wd: Option<String>,
}

#[derive(Subcommand)]
enum AlgCmd {
    Info {
        #[command(flatten)]
        alg: AlgArg,
    },
    Product {
        /// Factors, in order.
        #[arg(long = "alg", required = true)]
        algs: Vec<String>,
        #[arg(long)]
        out: Option<String>,
    },
    Quotient {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum ConCmd {
    /// All congruences, one partition per line.
    Lattice {
        #[command(flatten)]
        alg: AlgArg,
        /// Print the covering graph in DOT instead.
        #[arg(long)]
        dot: bool,
    },
    /// Congruence generated by pairs.
    Cg {
        #[command(flatten)]
        alg: AlgArg,
        /// A pair `a,b`; repeatable.
        #[arg(long = "pair", required = true)]
        pairs: Vec<String>,
    },
    Cov {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        rho: String,
    },
    Covplus {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        rho: String,
    },
    Irreducible {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        rho: String,
    },
}

#[derive(Subcommand)]
enum TermCmd {
    /// Decide whether a term is a Maltsev, WNU or weak difference term.
    Check {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        term: String,
        /// `maltsev`, `wnu` or `weak-difference`.
        #[arg(long)]
        predicate: String,
    },
    /// Breadth-first term search up to a depth.
    Search {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        predicate: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

#[derive(Args)]
struct BridgeFileArgs {
    /// Bridge file.
    #[arg(long)]
    file: String,
    /// Override the first algebra named in the file.
    #[arg(long)]
    alg_a: Option<String>,
    /// Override the second algebra named in the file.
    #[arg(long)]
    alg_b: Option<String>,
}

#[derive(Subcommand)]
enum BridgeCmd {
    /// Check the bridge conditions and print the certificate.
    Verify {
        #[command(flatten)]
        src: BridgeFileArgs,
    },
    /// Relational composition of two bridges.
    Compose {
        #[command(flatten)]
        src: BridgeFileArgs,
        #[arg(long)]
        file2: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Opt(ρ) and the optimal self-bridge.
    Opt {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        rho: String,
        #[command(flatten)]
        wit: WitnessArgs,
        #[arg(long)]
        out: Option<String>,
    },
    /// Brute-force lower bound for Opt(ρ,L).
    Brute {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        rho: String,
        /// Anchor L as `(a,b),(c,d)`; defaults to ρ⁺.
        #[arg(long)]
        anchor: Option<String>,
        /// Extra generators beyond the identity bridge; unbounded if omitted.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Extract a bridge with (B3) from a bridge between abelian covers.
    ExtractB3 {
        #[command(flatten)]
        src: BridgeFileArgs,
        #[arg(long)]
        out: Option<String>,
    },
    /// A good bridge from (A,ρ) to (B,σ), if the quotients are similar.
    Between {
        #[arg(long)]
        alg: String,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        alg2: String,
        #[arg(long)]
        sigma: String,
        /// Use the exhaustive search instead of the similarity construction.
        #[arg(long)]
        search: bool,
        #[arg(long)]
        out: Option<String>,
    },
}

fn show_map(m: &ElementMap) -> String {
    let v: Vec<String> = m.values().iter().map(|x| x.to_string()).collect();
    format!("[{}]", v.join(" "))
}

fn emit(out: Option<&str>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Env(format!("{p}: {e}")).into()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Alg(c) => alg_cmd(c),
        Cmd::Con(c) => con_cmd(c),
        Cmd::Centralizer { alg, theta, delta } => {
            let a = resolve::algebra(&alg.alg)?;
            let th = resolve::congruence(&a, &theta)?;
            let de = match delta {
                Some(d) => resolve::congruence(&a, &d)?,
                None => unialg::Congruence::zero(a.size()),
            };
            println!("{}", Commutator::new(&a).centralizer(&th, &de)?);
            Ok(())
        }
        Cmd::Abelian { alg, theta, delta } => {
            let a = resolve::algebra(&alg.alg)?;
            let th = resolve::congruence(&a, &theta)?;
            let de = match delta {
                Some(d) => resolve::congruence(&a, &d)?,
                None => unialg::Congruence::zero(a.size()),
            };
            println!("{}", yes_no(Commutator::new(&a).is_abelian_modulo(&th, &de)?));
            Ok(())
        }
        Cmd::Term(c) => term_cmd(c),
        Cmd::Dalg { alg, theta, wit, out } => {
            let a = resolve::algebra(&alg.alg)?;
            let wd = resolve::weak_difference(&a, wit.wd.as_deref())?;
            let d = match theta {
                Some(t) => {
                    let th = resolve::congruence(&a, &t)?;
                    let r = similarity::build_d(&a, &th, &wd)?;
                    println!("alpha {}", r.alpha);
                    println!("Dmon {}", r.dmon);
                    r.d
                }
                None => {
                    let si = similarity::build_d_of_si(&a, &wd)?;
                    println!("monolith {}", si.monolith);
                    println!("abelian {}", yes_no(si.abelian));
                    si.d
                }
            };
            println!("D {d}");
            if let Some(p) = out {
                emit(Some(&p), &d.to_json())?;
            }
            Ok(())
        }
        Cmd::Similar { alg, alg2, wd, wd2 } => {
            let a = resolve::algebra(&alg)?;
            let b = resolve::algebra(&alg2)?;
            let wa = resolve::weak_difference(&a, wd.as_deref())?;
            let wb = resolve::weak_difference(&b, wd2.as_deref())?;
            match similarity::similarity_iso(&a, &wa, &b, &wb)? {
                Some(iso) => println!("similar; D(A) ≅ D(B) via {}", show_map(&iso)),
                None => println!("not similar"),
            }
            Ok(())
        }
        Cmd::Zeta { alg, rho, wit } => {
            let a = resolve::algebra(&alg.alg)?;
            let r = resolve::congruence(&a, &rho)?;
            let wd = resolve::weak_difference(&a, wit.wd.as_deref())?;
            let z = similarity::build_zeta(&a, &r, &wd)?;
            println!("Z {} with zero {}", z.z, z.zero);
            println!("rho+ {}", z.rho_plus);
            for [x, y, w] in &z.triples {
                println!("{x} {y} {w}");
            }
            Ok(())
        }
        Cmd::Bridge(c) => bridge_cmd(c),
        Cmd::VerifyPaper { suite, corpus, report, seed, max_size } => verify_paper(&suite, &corpus, report.as_deref(), seed, max_size),
    }
}

fn alg_cmd(c: AlgCmd) -> Result<()> {
    match c {
        AlgCmd::Info { alg } => {
            let a = resolve::algebra(&alg.alg)?;
            println!("{a}");
            let lat = con::con_lattice(&a)?;
            println!("congruences {}", lat.len());
            println!("meet-irreducible {}", lat.meet_irreducible_indices().len());
            match con::monolith(&a)? {
                Some(m) => println!("subdirectly irreducible; monolith {m}"),
                None => println!("not subdirectly irreducible"),
            }
            println!("generated by {:?}", a.generating_set());
            Ok(())
        }
        AlgCmd::Product { algs, out } => {
            let loaded = algs.iter().map(|s| resolve::algebra(s)).collect::<Result<Vec<_>>>()?;
            let refs: Vec<&FiniteAlgebra> = loaded.iter().collect();
            emit(out.as_deref(), &FiniteAlgebra::product(&refs)?.to_json())
        }
        AlgCmd::Quotient { alg, theta, out } => {
            let a = resolve::algebra(&alg.alg)?;
            let th = resolve::congruence(&a, &theta)?;
            let (q, map) = a.quotient(&th)?;
            eprintln!("natural map {}", show_map(&map));
            emit(out.as_deref(), &q.to_json())
        }
    }
}

fn con_cmd(c: ConCmd) -> Result<()> {
    match c {
        ConCmd::Lattice { alg, dot } => {
            let a = resolve::algebra(&alg.alg)?;
            let lat = con::con_lattice(&a)?;
            if dot {
                print!("{}", lat.to_dot());
            } else {
                for c in &lat.congruences {
                    println!("{c}");
                }
            }
        }
        ConCmd::Cg { alg, pairs } => {
            let a = resolve::algebra(&alg.alg)?;
            let ps = pairs.iter().map(|p| resolve::pair(p)).collect::<Result<Vec<_>>>()?;
            println!("{}", con::cg(&a, &ps)?);
        }
        ConCmd::Cov { alg, rho } => {
            let a = resolve::algebra(&alg.alg)?;
            let r = resolve::congruence(&a, &rho)?;
            for l in con::cov(&a, &r)? {
                println!("{l}");
            }
        }
        ConCmd::Covplus { alg, rho } => {
            let a = resolve::algebra(&alg.alg)?;
            let r = resolve::congruence(&a, &rho)?;
            for l in con::cov_plus(&a, &r)? {
                println!("{l}");
            }
        }
        ConCmd::Irreducible { alg, rho } => {
            let a = resolve::algebra(&alg.alg)?;
            let r = resolve::congruence(&a, &rho)?;
            let taylor = resolve::taylor(&a, None).is_ok();
            let irr = con::is_irreducible(&a, &r, taylor)?;
            match irr.star {
                Some(s) if irr.irreducible => println!("irreducible; unique cover {s}"),
                _ => println!("not irreducible"),
            }
        }
    }
    Ok(())
}

fn term_cmd(c: TermCmd) -> Result<()> {
    match c {
        TermCmd::Check { alg, term, predicate } => {
            let a = resolve::algebra(&alg.alg)?;
            let t = Term::parse(&term, &a)?;
            let ok = match TermPredicate::parse(&predicate)? {
                TermPredicate::Maltsev => terms::is_maltsev(&a, &t)?,
                TermPredicate::Wnu => terms::is_wnu(&a, &t, t.var_bound())?,
                TermPredicate::WeakDifference => terms::is_weak_difference_term(&a, &t)?,
            };
            println!("{}", yes_no(ok));
        }
        TermCmd::Search { alg, predicate, depth } => {
            let a = resolve::algebra(&alg.alg)?;
            match search_term(&a, TermPredicate::parse(&predicate)?, depth)? {
                SearchOutcome::Found { term, arity } => println!("{} (arity {arity})", term.to_sexpr(&a)),
                SearchOutcome::NotFoundWithinBound => println!("none up to depth {depth}"),
            }
        }
    }
    Ok(())
}

fn bridge_cmd(c: BridgeCmd) -> Result<()> {
    match c {
        BridgeCmd::Verify { src } => {
            let br = resolve::bridge(&src.file, src.alg_a.as_deref(), src.alg_b.as_deref())?;
            match bridges::is_bridge(&br.a, &br.rho, &br.b, &br.sigma, &br.t)? {
                Ok(cert) => {
                    println!("bridge");
                    println!("left {}", cert.left);
                    println!("right {}", cert.right);
                    println!("trace {}", cert.trace);
                    println!("reflexive {}", yes_no(cert.reflexive));
                    println!("compact {}", yes_no(cert.compact));
                    println!("good {}", cert.good.map_or("n/a", yes_no));
                    println!("b3 {}", yes_no(cert.b3));
                }
                Err(f) => return Err(Failure::Check(format!("not a bridge: {f}")).into()),
            }
        }
        BridgeCmd::Compose { src, file2, out } => {
            let b1 = resolve::bridge(&src.file, src.alg_a.as_deref(), src.alg_b.as_deref())?;
            let b2 = resolve::bridge(&file2, None, None)?;
            if b1.b.find_isomorphism(&b2.a)?.is_none() || b1.b.ops() != b2.a.ops() || b1.sigma != b2.rho {
                return Err(Failure::Usage("the middle algebras or congruences differ".into()).into());
            }
            let t = bridges::compose(&b1.t, &b2.t)?;
            let cert = bridges::certify(&b1.a, &b1.rho, &b2.b, &b2.sigma, &t)?;
            eprintln!("trace {}", cert.trace);
            match out {
                Some(p) => resolve::write_bridge(&p, &b1.a, &b1.rho, &b2.b, &b2.sigma, &t)?,
                None => println!("{}", unialg::io::BridgeFile::new(b1.a.name(), &b1.rho, b2.b.name(), &b2.sigma, &t).to_json()),
            }
        }
        BridgeCmd::Opt { alg, rho, wit, out } => {
            let a = resolve::algebra(&alg.alg)?;
            let r = resolve::congruence(&a, &rho)?;
            let taylor = resolve::taylor(&a, wit.taylor.as_deref())?;
            let ob = bridges::opt_bridge(&a, &r, &taylor)?;
            println!("{}", ob.trace);
            if let Some(p) = out {
                resolve::write_bridge(&p, &a, &r, &a, &r, &ob.t)?;
            }
        }
        BridgeCmd::Brute { alg, rho, anchor, budget } => {
            let a = resolve::algebra(&alg.alg)?;
            let r = resolve::congruence(&a, &rho)?;
            let l = match anchor {
                Some(s) => resolve::relation(&a, &s)?,
                None => con::upper_cover(&a, &r)?.to_rel(),
            };
            let bf = bridges::opt_bruteforce(&a, &r, &l, budget, &Limits::DEFAULT)?;
            println!("{}", bf.trace);
            eprintln!("visited {}; {}", bf.visited, if bf.exhaustive { "exhaustive" } else { "lower bound" });
        }
        BridgeCmd::ExtractB3 { src, out } => {
            let br = resolve::bridge(&src.file, src.alg_a.as_deref(), src.alg_b.as_deref())?;
            let ta = resolve::taylor(&br.a, None)?;
            let tb = resolve::taylor(&br.b, None)?;
            let x = bridges::extract_b3(&br.a, &br.rho, &br.b, &br.sigma, &br.t, &ta, &tb)?;
            eprintln!("generator {:?}", x.generator);
            match out {
                Some(p) => resolve::write_bridge(&p, &br.a, &br.rho, &br.b, &br.sigma, &x.t1)?,
                None => println!("{}", unialg::io::BridgeFile::new(br.a.name(), &br.rho, br.b.name(), &br.sigma, &x.t1).to_json()),
            }
        }
        BridgeCmd::Between { alg, rho, alg2, sigma, search, out } => {
            let a = resolve::algebra(&alg)?;
            let b = resolve::algebra(&alg2)?;
            let r = resolve::congruence(&a, &rho)?;
            let s = resolve::congruence(&b, &sigma)?;
            let t = if search {
                match bridges::search_good_bridge(&a, &r, &b, &s, &Limits::DEFAULT)? {
                    Search::Found(t) => Some(t),
                    Search::Absent => None,
                    Search::BudgetExhausted => {
                        return Err(Failure::Env("search stopped at the budget".into()).into());
                    }
                }
            } else {
                let wa = resolve::weak_difference(&a, None)?;
                let wb = resolve::weak_difference(&b, None)?;
                bridges::good_bridge_between(&a, &r, &wa, &b, &s, &wb)?.map(|g| g.t)
            };
            match t {
                Some(t) => {
                    let file = unialg::io::BridgeFile::new(a.name(), &r, b.name(), &s, &t).to_json();
                    emit(out.as_deref(), &file)?;
                }
                None => println!("no good bridge: the quotients are not similar"),
            }
        }
    }
    Ok(())
}

fn load_corpus(spec: &str, max_size: usize) -> Result<Corpus> {
    let c = match spec {
        "builtin" => build_corpus(CorpusSpec::BUILTIN)?,
        "enumerated" => build_corpus(CorpusSpec { builtin: false, enumerate_up_to: max_size })?,
        "builtin+enumerated" | "all" => build_corpus(CorpusSpec { builtin: true, enumerate_up_to: max_size })?,
        dir if Path::new(dir).is_dir() => load_corpus_dir(Path::new(dir))?,
        other => return Err(Failure::Usage(format!("corpus `{other}` is not builtin, enumerated or a directory")).into()),
    };
    for (name, why) in &c.excluded {
        eprintln!("excluded {name}: {why}");
    }
    Ok(c)
}

fn verify_paper(suite: &str, corpus: &str, report: Option<&str>, seed: Option<u64>, max_size: usize) -> Result<()> {
    let corpus = load_corpus(corpus, max_size)?;
    let mut opts = SuiteOptions::default();
    if let Some(s) = seed {
        opts.seed = s;
    }
    let reports = match harness::verify_suite(suite, &corpus, opts) {
        Err(Error::Invalid(msg)) => return Err(Failure::Usage(msg).into()),
        r => r?,
    };
    eprintln!("{}", harness::report::fingerprint());
    for r in &reports {
        println!("{}", r.summary());
        for f in r.failures() {
            println!("  FAIL {}: {}", f.instance, f.witness);
        }
    }
    if let Some(p) = report {
        emit(Some(p), &harness::report::to_json(&reports))?;
    }
    let failed: usize = reports.iter().map(|r| r.count(Status::Fail)).sum();
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} checks failed")).into());
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(f) = e.downcast_ref::<Failure>() {
        return match f {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Env(_) => 3,
        };
    }
    match e.downcast_ref::<Error>() {
        Some(Error::TheoremViolation { .. }) => 1,
        Some(Error::ResourceCap { .. }) | Some(Error::Internal(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
