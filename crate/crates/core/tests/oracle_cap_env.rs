use polarq::su2::ORACLE_CAP_ENV;
use polarq::{kernel_matrix, rotation_matrix_oracle, Error};

// Only test in this binary, so changing the environment is safe.
#[test]
fn environment_overrides_cap() {
    assert!(matches!(
        rotation_matrix_oracle(31, 0.3, 0.0),
        Err(Error::OracleCap { n: 31, cap: 30 })
    ));
    std::env::set_var(ORACLE_CAP_ENV, "4");
    assert!(matches!(
        kernel_matrix(0.0, 0.3, 0.0, 5),
        Err(Error::OracleCap { n: 5, cap: 4 })
    ));
    assert!(kernel_matrix(0.0, 0.3, 0.0, 4).is_ok());
    std::env::set_var(ORACLE_CAP_ENV, "40");
    assert!(rotation_matrix_oracle(36, 0.3, 0.0).is_ok());
    std::env::remove_var(ORACLE_CAP_ENV);
}
