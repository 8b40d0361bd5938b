use gdid_core::numerics::{fit_logistic, fit_ols, predict_prob, Matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `n x k` covariates (intercept added by the caller) and a response.
fn draw(seed: u64, n: usize, k: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..k).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|r| {
            let e: f64 = StandardNormal.sample(&mut rng);
            r.iter().sum::<f64>() + 3.0 * e
        })
        .collect();
    let labels: Vec<f64> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if i < 2 {
                return i as f64;
            }
            let p = 1.0 / (1.0 + (-0.5 * r.iter().sum::<f64>()).exp());
            (rng.gen::<f64>() < p) as u8 as f64
        })
        .collect();
    (rows, y, labels)
}

fn rescale_first(rows: &[Vec<f64>], a: f64, b: f64) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| {
            let mut r = r.clone();
            r[0] = a * r[0] + b;
            r
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ols_residuals_orthogonal_to_columns(seed in any::<u64>(), n in 10usize..300, k in 0usize..4) {
        let (rows, y, _) = draw(seed, n, k);
        let x = Matrix::with_intercept(&rows).unwrap();
        let fit = fit_ols(&x, &y).unwrap();
        let fitted = x.mul_vec(&fit.coefficients).unwrap();
        let resid: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        let rnorm = resid.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((rnorm * rnorm - fit.residual_sum_squares).abs() <= 1e-8 * rnorm * rnorm.max(1.0));
        for j in 0..x.cols() {
            let col = x.column(j);
            let cnorm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ip: f64 = col.iter().zip(&resid).map(|(a, b)| a * b).sum();
            prop_assert!(ip.abs() <= 1e-8 * cnorm * rnorm.max(1.0), "column {j}: {ip}");
        }
    }

    #[test]
    fn logistic_score_equations_hold(seed in any::<u64>(), n in 40usize..400, k in 0usize..3) {
        let (rows, _, labels) = draw(seed, n, k);
        let x = Matrix::with_intercept(&rows).unwrap();
        let fit = fit_logistic(&x, &labels).unwrap();
        let p = predict_prob(&fit, &x).unwrap();
        let resid: Vec<f64> = labels.iter().zip(&p).map(|(a, b)| a - b).collect();
        for s in x.tr_mul_vec(&resid) {
            prop_assert!(s.abs() <= 1e-8, "score {s}");
        }
    }

    #[test]
    fn affine_rescaling_keeps_fits(
        seed in any::<u64>(),
        n in 40usize..300,
        a in prop_oneof![0.01f64..100.0, -100.0f64..-0.01],
        b in -50.0f64..50.0,
    ) {
        let (rows, y, labels) = draw(seed, n, 2);
        let moved = rescale_first(&rows, a, b);
        let (x, x2) = (Matrix::with_intercept(&rows).unwrap(), Matrix::with_intercept(&moved).unwrap());

        let (f, f2) = (fit_ols(&x, &y).unwrap(), fit_ols(&x2, &y).unwrap());
        prop_assert!((f2.coefficients[1] * a - f.coefficients[1]).abs() <= 1e-8 * f.coefficients[1].abs().max(1.0));
        let (v, v2) = (x.mul_vec(&f.coefficients).unwrap(), x2.mul_vec(&f2.coefficients).unwrap());
        for (p, q) in v.iter().zip(&v2) {
            prop_assert!((p - q).abs() <= 1e-8 * p.abs().max(1.0));
        }

        let (l, l2) = (fit_logistic(&x, &labels).unwrap(), fit_logistic(&x2, &labels).unwrap());
        prop_assert!((l2.coefficients[1] * a - l.coefficients[1]).abs() <= 1e-8 * l.coefficients[1].abs().max(1.0));
        let (p, p2) = (predict_prob(&l, &x).unwrap(), predict_prob(&l2, &x2).unwrap());
        for (s, t) in p.iter().zip(&p2) {
            prop_assert!((s - t).abs() <= 1e-8);
        }
    }
}
