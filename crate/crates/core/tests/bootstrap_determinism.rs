mod common;

use common::random_panel;
use gdid_core::estimators::{EstimatorSpec, IpwOptions};
use gdid_core::inference::{bootstrap, BootstrapConfig, InferenceResult};
use gdid_core::panel::PanelDataset;
use gdid_core::DesignKind;
use proptest::prelude::*;

fn run_on(threads: usize, d: &PanelDataset<f64>, est: &EstimatorSpec<f64>, cfg: &BootstrapConfig) -> InferenceResult<f64> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| bootstrap(d, est, cfg).unwrap())
}

fn bits(r: &InferenceResult<f64>) -> [u64; 6] {
    [
        r.point.to_bits(),
        r.se.to_bits(),
        r.ci_percentile.lower.to_bits(),
        r.ci_percentile.upper.to_bits(),
        r.ci_normal.lower.to_bits(),
        r.ci_normal.upper.to_bits(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn identical_bits_across_thread_counts(seed in any::<u64>(), n in 20usize..200) {
        let d = random_panel(seed, n);
        let cfg = BootstrapConfig { replicates: 199, seed, ..Default::default() };
        for est in [
            EstimatorSpec::Simple { design: DesignKind::PrePost },
            EstimatorSpec::Ipw {
                design: DesignKind::PrePost,
                options: IpwOptions { covariates: vec!["z".into()], ..Default::default() },
            },
        ] {
            let reference = bits(&run_on(1, &d, &est, &cfg));
            for threads in [2, 3, 8] {
                prop_assert_eq!(bits(&run_on(threads, &d, &est, &cfg)), reference);
            }
        }
    }
}

#[test]
fn different_seeds_give_different_replicates() {
    let d = random_panel(1, 100);
    let est = EstimatorSpec::Simple { design: DesignKind::PrePost };
    let a = run_on(2, &d, &est, &BootstrapConfig { replicates: 99, seed: 1, ..Default::default() });
    let b = run_on(2, &d, &est, &BootstrapConfig { replicates: 99, seed: 2, ..Default::default() });
    assert_eq!(a.point, b.point);
    assert_ne!(a.se, b.se);
}
