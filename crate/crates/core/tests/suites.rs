use unialg::harness::report::to_json;
use unialg::harness::{build_corpus, verify_suite, CheckRecord, Corpus, CorpusSpec, Status, SuiteOptions, Suites};

fn failures(reports: &[unialg::harness::VerificationReport]) -> Vec<String> {
    reports
        .iter()
        .flat_map(|r| r.failures())
        .map(|c| format!("{} / {}: {}", c.suite, c.instance, c.witness))
        .collect()
}

#[test]
fn every_suite_passes_on_enumerated_corpus() {
    let corpus = build_corpus(CorpusSpec { builtin: false, enumerate_up_to: 3 }).unwrap();
    assert_eq!(corpus.entries.len(), 9);
    let reports = Suites::new(&corpus, SuiteOptions::default()).run_all();
    for r in &reports {
        println!("{}", r.summary());
    }
    let f = failures(&reports);
    assert!(f.is_empty(), "{f:#?}");
}

#[test]
fn zeta_on_semilattice_is_skipped_and_flagged_vacuous() {
    let full = build_corpus(CorpusSpec::BUILTIN).unwrap();
    let corpus = Corpus { entries: full.entries.into_iter().filter(|e| e.name() == "S2").collect(), excluded: vec![] };
    let r = &verify_suite("zeta", &corpus, SuiteOptions::default()).unwrap()[0];
    assert_eq!(r.count(Status::Pass), 0);
    assert!(r.count(Status::Skipped) >= 1);
    assert!(r.checks.iter().any(|c| c.status == Status::Skipped && c.witness.contains("Opt")), "{:#?}", r.checks);
    let vac: Vec<_> = r.failures().collect();
    assert_eq!(vac.len(), 1);
    assert!(vac[0].witness.starts_with("vacuous"));
}

fn run_in_pool(threads: usize, corpus: &Corpus, suite: &str, opts: SuiteOptions) -> Vec<CheckRecord> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| verify_suite(suite, corpus, opts).unwrap()).iter().flat_map(|r| r.normalized()).collect()
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let corpus = build_corpus(CorpusSpec::BUILTIN).unwrap();
    let opts = SuiteOptions::default();
    let one = run_in_pool(1, &corpus, "goodbridge", opts);
    let many = run_in_pool(4, &corpus, "goodbridge", opts);
    assert!(one.len() > 100);
    assert_eq!(one, many);
}

#[test]
fn seed_changes_only_random_instances() {
    let corpus = build_corpus(CorpusSpec::BUILTIN).unwrap();
    let a = run_in_pool(1, &corpus, "goodbridge", SuiteOptions::default());
    let b = run_in_pool(1, &corpus, "goodbridge", SuiteOptions { seed: 7, ..SuiteOptions::default() });
    let fixed = |v: &[CheckRecord]| v.iter().filter(|c| !c.instance.contains("seed")).cloned().collect::<Vec<_>>();
    assert_eq!(fixed(&a), fixed(&b));
    assert!(a.iter().any(|c| c.instance.contains("seed")));
    assert!(b.iter().all(|c| c.status != Status::Fail));
}

#[test]
fn report_is_a_json_array_of_records() {
    let corpus = build_corpus(CorpusSpec::BUILTIN).unwrap();
    let reports = verify_suite("basictol", &corpus, SuiteOptions::default()).unwrap();
    let back: Vec<CheckRecord> = serde_json::from_str(&to_json(&reports)).unwrap();
    assert_eq!(back, reports[0].checks);
    let v: serde_json::Value = serde_json::from_str(&to_json(&reports)).unwrap();
    let keys: Vec<&str> = v[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys.len(), 5);
    for k in ["suite", "instance", "status", "witness", "millis"] {
        assert!(keys.contains(&k));
    }
    assert_eq!(v[0]["status"], "pass");
}

#[test]
fn unknown_suite_is_rejected() {
    let corpus = build_corpus(CorpusSpec::BUILTIN).unwrap();
    assert!(verify_suite("nosuch", &corpus, SuiteOptions::default()).is_err());
}
