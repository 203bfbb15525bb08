mod common;

use common::suites::matrix_omega_suite;

#[test]
fn omega_of_matrix_matches_lasso_factorization_search() {
    let stats = matrix_omega_suite(120, 21).unwrap();
    assert_eq!(stats.matrices, 120);
    assert!(stats.with_tail > 0, "no ε-cycle case among the samples");
}
