mod common;

use common::{close, map_outcomes, random_panel, random_triple_panel, swap_groups};
use gdid_core::diagnostics::pretrend_gaps;
use gdid_core::estimators::{
    gdid_continuous, gdid_ipw, gdid_simple, triple_differences, ContinuousOptions, IpwOptions,
};
use gdid_core::panel::PanelDataset;
use gdid_core::DesignKind::PrePost;
use proptest::prelude::*;

const TOL: f64 = 1e-10;

fn simple(d: &PanelDataset<f64>) -> f64 {
    gdid_simple(d, PrePost).unwrap().value
}

fn ipw_plain(d: &PanelDataset<f64>) -> f64 {
    gdid_ipw(d, PrePost, &IpwOptions::default()).unwrap().value
}

fn ipw_z(d: &PanelDataset<f64>) -> f64 {
    let opts = IpwOptions {
        covariates: vec!["z".into()],
        trim_epsilon: 0.0,
        ..Default::default()
    };
    gdid_ipw(d, PrePost, &opts).unwrap().value
}

fn continuous(d: &PanelDataset<f64>) -> f64 {
    gdid_continuous(d, PrePost, &ContinuousOptions::new(1.0, 0.0)).unwrap().value
}

fn triple(d: &PanelDataset<f64>) -> f64 {
    triple_differences(d).unwrap().value
}

type Est = fn(&PanelDataset<f64>) -> f64;

const TRANSLATION_INVARIANT: [(&str, Est); 3] =
    [("simple", simple), ("ipw", ipw_plain), ("continuous", continuous)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn location_invariance(seed in any::<u64>(), n in 8usize..300, c in -1e3f64..1e3) {
        let d = random_panel(seed, n);
        let shifted = map_outcomes(&d, |_, y| y + c);
        for (name, f) in TRANSLATION_INVARIANT {
            prop_assert!(close(f(&d), f(&shifted), TOL), "{name}");
        }
        let t = random_triple_panel(seed, n);
        prop_assert!(close(triple(&t), triple(&map_outcomes(&t, |_, y| y + c)), TOL));
    }

    #[test]
    fn group_level_shift_invariance(
        seed in any::<u64>(),
        n in 8usize..300,
        c1 in -1e3f64..1e3,
        c0 in -1e3f64..1e3,
    ) {
        let d = random_panel(seed, n);
        let shifted = map_outcomes(&d, |g, y| y + if g == 1.0 { c1 } else { c0 });
        prop_assert!(close(simple(&d), simple(&shifted), TOL));
        let gaps = pretrend_gaps(&d).unwrap();
        let shifted_gaps = pretrend_gaps(&shifted).unwrap();
        for (a, b) in gaps.iter().zip(&shifted_gaps) {
            prop_assert!(close(*a, *b, TOL));
        }
    }

    #[test]
    fn scale_equivariance(seed in any::<u64>(), n in 8usize..300, a in 0.1f64..10.0) {
        let d = random_panel(seed, n);
        let scaled = map_outcomes(&d, |_, y| a * y);
        for (name, f) in TRANSLATION_INVARIANT.into_iter().chain([("ipw_z", ipw_z as Est)]) {
            prop_assert!(close(a * f(&d), f(&scaled), TOL), "{name}");
        }
        let t = random_triple_panel(seed, n);
        prop_assert!(close(a * triple(&t), triple(&map_outcomes(&t, |_, y| a * y)), TOL));
    }

    #[test]
    fn group_swap_antisymmetry(seed in any::<u64>(), n in 8usize..300) {
        let d = random_panel(seed, n);
        let swapped = swap_groups(&d);
        prop_assert_eq!(simple(&d), -simple(&swapped));
        for (name, f) in TRANSLATION_INVARIANT {
            prop_assert!(close(f(&d), -f(&swapped), TOL), "{name}");
        }
        let t = random_triple_panel(seed, n);
        prop_assert_eq!(triple(&t), -triple(&swap_groups(&t)));
    }
}
