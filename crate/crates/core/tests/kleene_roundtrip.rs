mod common;

use common::suites::{gamma_suite, kleene_automata_suite, omega_automata_suite, rational_terms_suite};

#[test]
fn automata_fold_back_to_their_behaviour() {
    assert!(kleene_automata_suite(100, 31).unwrap() >= 100);
}

#[test]
fn folded_and_normal_form_evaluation_agree() {
    rational_terms_suite(100, 32, 4).unwrap();
}

#[test]
fn gamma_construction_matches_omega_row() {
    gamma_suite(100, 33, 2).unwrap();
}

#[test]
fn omega_row_of_automaton_is_its_omega_behaviour() {
    assert!(omega_automata_suite(60, 34).unwrap() >= 60);
}
