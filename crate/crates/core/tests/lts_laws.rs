use std::sync::Arc;

use omega_kleisli::kernel::{check_theory_laws, LawConfig};
use omega_kleisli::lts::{LtsSampler, LtsTheory, DEFAULT_BOUND};
use omega_kleisli::word::Alphabet;

fn theory() -> LtsTheory {
    LtsTheory::new(Arc::new(Alphabet::new(["a", "b"]).unwrap()), DEFAULT_BOUND)
}

#[test]
fn lts_laws_hold() {
    let t = theory();
    let start = std::time::Instant::now();
    let config = LawConfig {
        samples: 200,
        seed: 7,
        jobs: 1,
        omega: true,
    };
    let report = check_theory_laws(&t, &LtsSampler::default(), &config);
    eprintln!("{report}elapsed {:?}", start.elapsed());
    assert!(report.passed(), "{report}");
}
