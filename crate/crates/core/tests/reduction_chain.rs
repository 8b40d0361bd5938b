mod common;

use common::random_panel;
use gdid_core::estimators::{gdid_continuous, gdid_ipw, gdid_simple, ContinuousOptions, IpwOptions};
use gdid_core::DesignKind;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ipw_and_continuous_reduce_to_simple(seed in any::<u64>(), n in 50usize..=500) {
        let d = random_panel(seed, n);
        for design in [DesignKind::PrePost, DesignKind::Canonical] {
            let simple = gdid_simple(&d, design).unwrap().value;
            let ipw = gdid_ipw(&d, design, &IpwOptions::default()).unwrap();
            let cont = gdid_continuous(&d, design, &ContinuousOptions::new(1.0, 0.0)).unwrap();
            prop_assert_eq!(ipw.trimmed, 0);
            prop_assert!((ipw.value - simple).abs() <= 1e-10, "ipw {} vs {}", ipw.value, simple);
            prop_assert!((cont.value - simple).abs() <= 1e-10, "continuous {} vs {}", cont.value, simple);
        }
    }

    #[test]
    fn higher_degree_basis_on_binary_group_is_rank_deficient(seed in any::<u64>(), n in 50usize..100) {
        let d = random_panel(seed, n);
        let opts = ContinuousOptions { degree: 2, ..ContinuousOptions::new(1.0, 0.0) };
        prop_assert!(gdid_continuous(&d, DesignKind::PrePost, &opts).is_err());
    }
}
