#![allow(dead_code)]

use gdid_core::panel::{PanelDataset, PanelUnit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Random two-group pre-post panel with one covariate `z` and two
/// pre-baseline columns. Both groups always get at least two units.
pub fn random_panel(seed: u64, n: usize) -> PanelDataset<f64> {
    random_panel_with(seed, n, |_, _| 1.0)
}

/// Like [`random_panel`] but with A1 drawn per unit, for triple differences.
pub fn random_triple_panel(seed: u64, n: usize) -> PanelDataset<f64> {
    random_panel_with(seed, n, |rng, i| if i % 4 < 2 { (i % 2) as f64 } else { rng.gen_range(0..2) as f64 })
}

fn random_panel_with(
    seed: u64,
    n: usize,
    mut a1: impl FnMut(&mut ChaCha8Rng, usize) -> f64,
) -> PanelDataset<f64> {
    assert!(n >= 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 10f64.powf(rng.gen_range(-1.0..2.0));
    let share = rng.gen_range(0.2..0.8);
    let units = (0..n)
        .map(|i| {
            // indices 0..4 pin down both groups and, for triples, all cells
            let g = if i < 4 { (i / 2) as f64 } else { (rng.gen::<f64>() < share) as u8 as f64 };
            let mut nrm = || -> f64 { StandardNormal.sample(&mut rng) };
            let z = 0.5 * g + nrm();
            let y0 = scale * nrm();
            let y1 = y0 + scale * (0.3 * g + 0.2 * z + nrm());
            let pre = vec![y0 - scale * nrm(), y0 - scale * nrm()];
            let a = a1(&mut rng, i);
            PanelUnit {
                covariates: vec![z],
                pre_outcomes: pre,
                ..PanelUnit::new(format!("u{i}"), g, 0.0, a, y0, y1)
            }
        })
        .collect();
    PanelDataset::new(units, vec!["z".into()], vec!["y_m2".into(), "y_m1".into()]).unwrap()
}

/// Applies `f(group, outcome)` to every outcome, pre-baseline ones included.
pub fn map_outcomes(d: &PanelDataset<f64>, f: impl Fn(f64, f64) -> f64) -> PanelDataset<f64> {
    let units = d
        .units()
        .iter()
        .map(|u| PanelUnit {
            y0: f(u.group, u.y0),
            y1: f(u.group, u.y1),
            pre_outcomes: u.pre_outcomes.iter().map(|&y| f(u.group, y)).collect(),
            ..u.clone()
        })
        .collect();
    rebuild(d, units)
}

pub fn swap_groups(d: &PanelDataset<f64>) -> PanelDataset<f64> {
    let units = d
        .units()
        .iter()
        .map(|u| PanelUnit {
            group: 1.0 - u.group,
            ..u.clone()
        })
        .collect();
    rebuild(d, units)
}

fn rebuild(d: &PanelDataset<f64>, units: Vec<PanelUnit<f64>>) -> PanelDataset<f64> {
    PanelDataset::new(
        units,
        d.covariate_names().to_vec(),
        d.pre_period_names().to_vec(),
    )
    .unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
