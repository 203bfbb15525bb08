use omega_kleisli::kernel::{check_theory_laws, LawConfig};
use omega_kleisli::prob::{ProbSampler, ProbTheory};

mod common;

#[test]
fn probabilistic_instance_satisfies_the_laws() {
    let t = ProbTheory::new(common::binary());
    let config = LawConfig {
        samples: 200,
        seed: 12,
        omega: true,
        ..LawConfig::default()
    };
    let report = check_theory_laws(&t, &ProbSampler::default(), &config);
    println!("{report}");
    assert!(report.passed(), "{report}");
}
