//! Corpus management and theorem-verification suites.

pub mod corpus;
pub mod report;
pub mod suites;

pub use corpus::{build_corpus, load_corpus_dir, write_corpus_dir, Corpus, CorpusEntry, CorpusSpec, WitnessDecl};
pub use report::{CheckRecord, Status, VerificationReport};
pub use suites::{SuiteOptions, Suites, SUITES};

/// Runs one suite, or every suite for `"all"`.
pub fn verify_suite(name: &str, corpus: &Corpus, opts: SuiteOptions) -> crate::error::Result<Vec<VerificationReport>> {
    let s = Suites::new(corpus, opts);
    if name == "all" {
        Ok(s.run_all())
    } else {
        Ok(vec![s.run(name)?])
    }
}
