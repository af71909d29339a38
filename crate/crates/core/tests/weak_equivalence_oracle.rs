//! The weak-equivalence decision against brute-force bibundle search.

#[path = "common/oracle.rs"]
mod oracle;

use grpd_core::bibundle::{decide_weak_equivalence, is_equivalence, validate_bibundle};
use grpd_core::catalog::small_groupoid_corpus;

#[test]
fn decision_matches_brute_force_on_all_small_pairs() {
    let corpus = small_groupoid_corpus();
    let mut pairs = 0usize;
    let mut equivalent = 0usize;
    for (name_g, g) in &corpus {
        for (name_h, h) in &corpus {
            let decided = decide_weak_equivalence(g, h);
            let brute = oracle::equivalence_bundle_exists(g, h);
            assert_eq!(
                decided.equivalent, brute,
                "decision disagrees with brute force on {name_g} vs {name_h}"
            );
            if decided.equivalent {
                equivalent += 1;
                let bundle = decided.bibundle.expect("witness bundle");
                assert!(validate_bibundle(&bundle).is_valid());
                assert!(is_equivalence(&bundle).is_equivalence());
            }
            pairs += 1;
        }
    }
    assert!(pairs >= 50, "only {pairs} pairs checked");
    // Sanity on the mix: both verdicts occur.
    assert!(equivalent > corpus.len());
    assert!(equivalent < pairs);
}

#[test]
fn oracle_is_reflexive_and_symmetric_on_the_corpus() {
    let corpus = small_groupoid_corpus();
    for (_, g) in &corpus {
        assert!(oracle::equivalence_bundle_exists(g, g));
    }
    let a = &corpus[5].1; // B(Z2)
    let b = &corpus[0].1; // point
    assert_eq!(
        oracle::equivalence_bundle_exists(a, b),
        oracle::equivalence_bundle_exists(b, a)
    );
}
