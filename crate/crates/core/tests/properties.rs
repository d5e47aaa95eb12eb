mod support;

use support::props::SUITES;

fn check(name: &str) {
    let (_, suite) = SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .expect("known suite");
    if let Err(e) = suite() {
        panic!("{name}: {e}");
    }
}

#[test]
fn distributions_are_normalized() {
    check("distributions_are_normalized");
}

#[test]
fn permutation_invariance() {
    check("permutation_invariance");
}

#[test]
fn block_statistic_permutation_invariance() {
    check("block_statistic_permutation_invariance");
}

#[test]
fn edge_list_round_trip() {
    check("edge_list_round_trip");
}

#[test]
fn handshake_and_counting_identities() {
    check("handshake_and_counting_identities");
}

#[test]
fn directed_degree_identities() {
    check("directed_degree_identities");
}

#[test]
fn estimates_ignore_thread_count() {
    check("estimates_ignore_thread_count");
}

#[test]
fn exact_law_is_normalized() {
    check("exact_law_is_normalized");
}

#[test]
fn dependence_profile_invariants() {
    check("dependence_profile_invariants");
}

#[test]
fn study_csv_ignores_thread_count() {
    check("study_csv_ignores_thread_count");
}

#[test]
fn respondent_subsets_stay_normalized() {
    check("respondent_subsets_stay_normalized");
}

#[test]
fn every_suite_has_a_test() {
    assert_eq!(SUITES.len(), 11);
}
