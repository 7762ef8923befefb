use brnr::corpus::default_corpus;
use brnr::group::DEFAULT_ELEMENT_CAP;
use brnr::oracle::{differential_suite, Fault};

#[test]
fn default_corpus_agrees() {
    let corpus = default_corpus(DEFAULT_ELEMENT_CAP).unwrap();
    let reports = differential_suite(&corpus, None);
    let bad: Vec<_> = reports.iter().filter(|r| !r.agreement).collect();
    for r in &bad {
        eprintln!("{} [{}]: {:?}", r.case, r.check, r.divergence);
    }
    assert!(bad.is_empty(), "{} of {} checks disagree", bad.len(), reports.len());
    let relevable = reports.iter().filter(|r| r.check == "relevable").count();
    assert!(relevable >= 36);
}

#[test]
fn truncated_norms_break_demarche() {
    let corpus: Vec<_> = default_corpus(DEFAULT_ELEMENT_CAP)
        .unwrap()
        .into_iter()
        .filter(|c| c.name.starts_with("demarche"))
        .collect();
    let reports = differential_suite(&corpus, Some(Fault::TruncateNorms));
    assert!(reports
        .iter()
        .any(|r| r.check == "relevable" && !r.agreement && r.case.contains("q=4")));
}
