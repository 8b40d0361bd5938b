//! Flat `key = value` text format for [`DgpSpec`].
//!
//! One entry per line; `#` starts a comment. `design` is required, every
//! other key falls back to [`DgpSpec::new`]. Unknown or repeated keys are
//! errors.
//!
//! | key | meaning |
//! |-----|---------|
//! | `design` | `canonical`, `prepost`, `nopre` or `triple` |
//! | `n1`, `n0` | group sizes |
//! | `alpha0`, `alpha1` | baseline means |
//! | `delta`, `gamma` | common trend, group 1 trend violation |
//! | `tau00`, `tau01`, `tau10`, `tau11` | effects `tau[g][t]` |
//! | `sigma` | noise standard deviation |
//! | `noise_correlation` | within-unit noise correlation |
//! | `effect_sd` | effect heterogeneity |
//! | `n_pre_periods`, `gamma_pre` | pre-baseline periods and their trend gap |
//! | `z_shift`, `z_lambda` | covariate mechanism, both or neither |
//! | `treated_share`, `arm_trend` | triple worlds only |

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{CovariateSpec, DgpDesign, DgpSpec};
use crate::error::{GdidError, Result};
use crate::scalar::Scalar;

const KEYS: &[&str] = &[
    "design",
    "n1",
    "n0",
    "alpha0",
    "alpha1",
    "delta",
    "gamma",
    "tau00",
    "tau01",
    "tau10",
    "tau11",
    "sigma",
    "noise_correlation",
    "effect_sd",
    "n_pre_periods",
    "gamma_pre",
    "z_shift",
    "z_lambda",
    "treated_share",
    "arm_trend",
];

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(GdidError::InvalidSpec(msg.into()))
}

/// Parses and validates a spec.
pub fn parse_config<T: Scalar>(text: &str) -> Result<DgpSpec<T>> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return invalid(format!("line {}: expected key = value", i + 1));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return invalid(format!("line {}: unknown key '{key}'", i + 1));
        }
        if entries.insert(key, (i + 1, value)).is_some() {
            return invalid(format!("line {}: duplicate key '{key}'", i + 1));
        }
    }

    let real = |key: &str| -> Result<Option<T>> {
        entries
            .get(key)
            .map(|&(line, v)| match v.parse::<T>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => invalid(format!("line {line}: '{key}' expects a finite number, got '{v}'")),
            })
            .transpose()
    };
    let count = |key: &str| -> Result<Option<usize>> {
        entries
            .get(key)
            .map(|&(line, v)| {
                v.parse::<usize>().or_else(|_| {
                    invalid(format!("line {line}: '{key}' expects a non-negative integer, got '{v}'"))
                })
            })
            .transpose()
    };

    let design = match entries.get("design").map(|e| e.1) {
        None => return invalid("missing required key 'design'"),
        Some("canonical") => DgpDesign::Canonical,
        Some("prepost") => DgpDesign::PrePost,
        Some("nopre") => DgpDesign::NoPrePeriod,
        Some("triple") => DgpDesign::Triple {
            treated_share: real("treated_share")?.unwrap_or(T::lit(0.5)),
            arm_trend: real("arm_trend")?.unwrap_or(T::zero()),
        },
        Some(other) => return invalid(format!("unknown design '{other}'")),
    };
    if !matches!(design, DgpDesign::Triple { .. })
        && (entries.contains_key("treated_share") || entries.contains_key("arm_trend"))
    {
        return invalid("treated_share and arm_trend apply only to design = triple");
    }

    let mut spec = DgpSpec::new(design);
    let set = |slot: &mut T, key: &str| -> Result<()> {
        if let Some(v) = real(key)? {
            *slot = v;
        }
        Ok(())
    };
    if let Some(n) = count("n1")? {
        spec.n1 = n;
    }
    if let Some(n) = count("n0")? {
        spec.n0 = n;
    }
    if let Some(n) = count("n_pre_periods")? {
        spec.n_pre_periods = n;
    }
    set(&mut spec.alpha[0], "alpha0")?;
    set(&mut spec.alpha[1], "alpha1")?;
    set(&mut spec.delta, "delta")?;
    set(&mut spec.gamma, "gamma")?;
    set(&mut spec.tau[0][0], "tau00")?;
    set(&mut spec.tau[0][1], "tau01")?;
    set(&mut spec.tau[1][0], "tau10")?;
    set(&mut spec.tau[1][1], "tau11")?;
    set(&mut spec.sigma, "sigma")?;
    set(&mut spec.noise_correlation, "noise_correlation")?;
    set(&mut spec.effect_sd, "effect_sd")?;
    set(&mut spec.gamma_pre, "gamma_pre")?;
    spec.covariate = match (real("z_shift")?, real("z_lambda")?) {
        (Some(shift), Some(lambda)) => Some(CovariateSpec { shift, lambda }),
        (None, None) => None,
        _ => return invalid("z_shift and z_lambda must be given together"),
    };
    spec.validate()?;
    Ok(spec)
}

/// Writes every key, so `parse_config(&to_config(s)) == s`.
pub fn to_config<T: Scalar>(spec: &DgpSpec<T>) -> String {
    let mut out = String::new();
    let design = match spec.design {
        DgpDesign::Canonical => "canonical",
        DgpDesign::PrePost => "prepost",
        DgpDesign::NoPrePeriod => "nopre",
        DgpDesign::Triple { .. } => "triple",
    };
    let mut line = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(out, "{k} = {v}");
    };
    line("design", &design);
    line("n1", &spec.n1);
    line("n0", &spec.n0);
    line("alpha0", &spec.alpha[0]);
    line("alpha1", &spec.alpha[1]);
    line("delta", &spec.delta);
    line("gamma", &spec.gamma);
    line("tau00", &spec.tau[0][0]);
    line("tau01", &spec.tau[0][1]);
    line("tau10", &spec.tau[1][0]);
    line("tau11", &spec.tau[1][1]);
    line("sigma", &spec.sigma);
    line("noise_correlation", &spec.noise_correlation);
    line("effect_sd", &spec.effect_sd);
    line("n_pre_periods", &spec.n_pre_periods);
    line("gamma_pre", &spec.gamma_pre);
    if let Some(c) = spec.covariate {
        line("z_shift", &c.shift);
        line("z_lambda", &c.lambda);
    }
    if let DgpDesign::Triple {
        treated_share,
        arm_trend,
    } = spec.design
    {
        line("treated_share", &treated_share);
        line("arm_trend", &arm_trend);
    }
    out
}
