use std::fs;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use gdid_core::diagnostics::pretrends;
use gdid_core::dgp::{monte_carlo, parse_config, true_estimand, DgpDesign};
use gdid_core::estimators::{
    apply_bounds, BoundsSpec, ContinuousOptions, EstimatorSpec, IpwOptions, TrimPolicy,
};
use gdid_core::inference::{analytic_se_simple, bootstrap, BootstrapConfig};
use gdid_core::panel::{detect_design, load_csv, validate, ColumnMapping, LoadOptions};
use gdid_core::{DesignKind, EstimandKind, Estimator, GdidError, Interval, Method, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{
    BootArgs, Cli, Command, DesignArg, EstimateArgs, InputArgs, MethodArg, PretrendsArgs,
    SimEstimator, SimulateArgs,
};
use crate::interpret::render_interpretation;
use crate::report::{
    BoundsReport, Contrast, ErrorReport, EstimateReport, PreTrendsReport, Provenance, Report,
    SimulationReport, PRETRENDS_SCHEMA, REPORT_SCHEMA, SIMULATION_SCHEMA,
};

type Dataset = gdid_core::Dataset;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Runs the command line `argv` (program name first), writing JSON to `out`
/// and human-readable text to `err`. Returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return EXIT_INVALID;
        }
    };
    let mut notes = Vec::new();
    let result = pool.install(|| match &cli.command {
        Command::Estimate(a) => estimate(a, &mut notes).and_then(|r| to_json(&r)),
        Command::Pretrends(a) => pretrends_cmd(a, &mut notes).and_then(|r| to_json(&r)),
        Command::Simulate(a) => simulate(a, &mut notes).and_then(|r| to_json(&r)),
    });
    let _ = err.write_all(&notes);
    match result {
        Ok(json) => {
            let _ = out.write_all(json.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            if let Ok(json) = to_json(&ErrorReport::new(&e)) {
                let _ = out.write_all(json.as_bytes());
            }
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INVALID
            }
        }
    }
}

/// Entry point of the binary.
pub fn main_with_args() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| GdidError::NonFinite(format!("report serialization: {e}")))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path)
        .map_err(|e| GdidError::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn provenance<C: Serialize + Clone>(bytes: &[u8], seed: u64, config: &C) -> Provenance<C> {
    Provenance {
        input_sha256: sha256_hex(bytes),
        tool_version: env!("CARGO_PKG_VERSION"),
        seed,
        config: config.clone(),
    }
}

fn load(a: &InputArgs, bytes: &[u8]) -> Result<Dataset> {
    let mapping = ColumnMapping {
        unit_id: (!a.unit_col.is_empty()).then(|| a.unit_col.clone()),
        group: a.group_col.clone(),
        a0: a.a0_col.clone(),
        a1: a.a1_col.clone(),
        y0: a.y0_col.clone(),
        y1: a.y1_col.clone(),
        covariates: a.covariates.clone(),
        pre_periods: a.pre_columns.clone(),
    };
    let opts = LoadOptions {
        drop_incomplete: a.drop_incomplete,
    };
    load_csv(bytes, &mapping, opts)
}

fn boot_config(b: &BootArgs) -> BootstrapConfig {
    BootstrapConfig {
        replicates: b.boot,
        seed: b.seed,
        level: b.level,
        stratified: !b.unstratified,
    }
}

fn pair(text: &str, flag: &str) -> Result<(String, String)> {
    match text.split_once(',') {
        Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
            Ok((a.trim().to_string(), b.trim().to_string()))
        }
        _ => Err(GdidError::InvalidArgument(format!(
            "--{flag} expects two comma-separated values, got `{text}`"
        ))),
    }
}

fn number(text: &str, flag: &str) -> Result<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| GdidError::InvalidArgument(format!("--{flag}: `{text}` is not a finite number")))
}

/// Two-level datasets coded `G = 1` (focal) / `G = 0` (reference), with
/// their labels.
fn binary_pairs(
    d: &Dataset,
    contrast: Option<&str>,
    reference: Option<&str>,
) -> Result<Vec<(String, String, Dataset)>> {
    let labelled = |x: Dataset| -> (String, String, Dataset) {
        (x.group_label(1.0), x.group_label(0.0), x)
    };
    if let Some(c) = contrast {
        let (focal, refr) = pair(c, "contrast")?;
        if reference.is_some_and(|r| r != refr) {
            return Err(GdidError::InvalidArgument(
                "--reference disagrees with the reference level of --contrast".into(),
            ));
        }
        return Ok(vec![labelled(d.contrast_subset(&focal, &refr)?)]);
    }
    let levels: Vec<String> = d.distinct_groups().into_iter().map(|g| d.group_label(g)).collect();
    match levels.len() {
        0 | 1 => Err(GdidError::DegenerateGroup(format!(
            "only {} group value present; two are needed",
            levels.len()
        ))),
        2 => Ok(vec![labelled(d.recode_binary(reference)?)]),
        _ => {
            let Some(refr) = reference else {
                return Err(GdidError::NonBinaryGroup(format!(
                    "{} group levels; choose a pair with --contrast or a reference with --reference",
                    levels.len()
                )));
            };
            if !levels.iter().any(|l| l == refr) {
                return Err(GdidError::InvalidArgument(format!(
                    "reference level `{refr}` not present"
                )));
            }
            levels
                .iter()
                .filter(|l| *l != refr)
                .map(|focal| Ok(labelled(d.contrast_subset(focal, refr)?)))
                .collect()
        }
    }
}

fn resolve_design(d: &Dataset, arg: DesignArg) -> Result<(DesignKind, &'static str)> {
    let declared = match arg {
        DesignArg::Auto => {
            let detected = detect_design(d);
            return match detected {
                DesignKind::Unclassified => Err(GdidError::UnclassifiedDesign),
                k => validate(d, k).map(|v| (v.design, "detected")),
            };
        }
        DesignArg::Canonical => DesignKind::Canonical,
        DesignArg::Prepost => DesignKind::PrePost,
        DesignArg::Nopre => DesignKind::NoPrePeriod,
        DesignArg::Triple => {
            return Err(GdidError::InvalidArgument(
                "--design triple applies to --method triple only".into(),
            ))
        }
    };
    validate(d, declared).map(|v| (v.design, "declared"))
}

fn estimate(a: &EstimateArgs, err: &mut Vec<u8>) -> Result<Report<EstimateArgs>> {
    let method = match (a.method, a.design) {
        (None, DesignArg::Triple) | (Some(MethodArg::Triple), _) => Method::Triple,
        (Some(m), DesignArg::Triple) => {
            return Err(GdidError::InvalidArgument(format!(
                "--design triple cannot be combined with --method {}",
                method_name(m)
            )))
        }
        (None, _) | (Some(MethodArg::Simple), _) => Method::Simple,
        (Some(MethodArg::Ipw), _) => Method::Ipw,
        (Some(MethodArg::Continuous), _) => Method::Continuous,
    };
    if method == Method::Triple && !matches!(a.design, DesignArg::Auto | DesignArg::Triple) {
        return Err(GdidError::InvalidArgument(
            "--method triple needs --design auto or triple".into(),
        ));
    }
    let bytes = read(&a.input.input)?;
    let data = load(&a.input, &bytes)?;
    let cfg = boot_config(&a.boot);
    cfg.validate()?;
    let bounds = a
        .bounds
        .as_deref()
        .map(|b| {
            let (l, u) = pair(b, "bounds")?;
            BoundsSpec::new(number(&l, "bounds")?, number(&u, "bounds")?)
        })
        .transpose()?;

    // (focal label, reference label, dataset, optional contrast points)
    let pairs: Vec<(String, String, Dataset, Option<(f64, f64)>)> = if method == Method::Continuous {
        if data.group_levels().is_some() {
            return Err(GdidError::InvalidArgument(
                "the continuous method needs a numeric group column".into(),
            ));
        }
        let (g, gp) = match a.contrast.as_deref() {
            Some(c) => {
                let (g, gp) = pair(c, "contrast")?;
                (number(&g, "contrast")?, number(&gp, "contrast")?)
            }
            None if data.has_binary_group() => (1.0, 0.0),
            None => {
                return Err(GdidError::InvalidArgument(
                    "--method continuous needs --contrast g,g' for a non-binary group".into(),
                ))
            }
        };
        vec![(g.to_string(), gp.to_string(), data, Some((g, gp)))]
    } else {
        binary_pairs(&data, a.contrast.as_deref(), a.input.reference.as_deref())?
            .into_iter()
            .map(|(f, r, d)| (f, r, d, None))
            .collect()
    };

    let (design, design_source) = if method == Method::Triple {
        (detect_design(&pairs[0].2), "detected")
    } else {
        resolve_design(&pairs[0].2, a.design)?
    };
    for (_, _, d, _) in &pairs[1..] {
        if method != Method::Triple {
            validate(d, design)?;
        }
    }

    let mut reports = Vec::with_capacity(pairs.len());
    for (focal, refr, d, contrast) in &pairs {
        let spec = match (method, contrast) {
            (Method::Simple, _) => EstimatorSpec::Simple { design },
            (Method::Ipw, _) => EstimatorSpec::Ipw {
                design,
                options: IpwOptions {
                    covariates: a.input.covariates.clone(),
                    trim_epsilon: a.trim,
                    trim_policy: if a.reject_overlap {
                        TrimPolicy::Reject
                    } else {
                        TrimPolicy::Drop
                    },
                },
            },
            (Method::Continuous, Some((g, gp))) => EstimatorSpec::Continuous {
                design,
                options: ContinuousOptions {
                    degree: a.degree,
                    allow_extrapolation: a.allow_extrapolation,
                    ..ContinuousOptions::new(*g, *gp)
                },
            },
            (Method::Continuous, None) => unreachable!("continuous pairs carry contrast points"),
            (Method::Triple, _) => EstimatorSpec::Triple,
        };
        let est = spec.estimate(d)?;
        let inference = bootstrap(d, &spec, &cfg)?;
        let analytic_se = (method == Method::Simple)
            .then(|| analytic_se_simple(d))
            .transpose()?;
        let labels = a.labels.labels(focal, refr);
        let ci = inference.ci_percentile;
        let bounds = bounds
            .map(|b| -> Result<BoundsReport> {
                Ok(BoundsReport {
                    estimand: EstimandKind::BoundedAtt,
                    tau_l: b.tau_l,
                    tau_u: b.tau_u,
                    interval: apply_bounds(&est, &b)?,
                    interval_with_ci: Interval::new(ci.lower + b.tau_l, ci.upper + b.tau_u)?,
                })
            })
            .transpose()?;
        let interpretation =
            render_interpretation(design, est.estimand, est.value, ci, cfg.level, &labels);
        let _ = writeln!(
            err,
            "{} ({}): {} = {:.6} [{:.6}, {:.6}]\n{interpretation}",
            focal, refr, est.estimand.as_str(), est.value, ci.lower, ci.upper
        );
        reports.push(EstimateReport {
            focal: focal.clone(),
            reference: refr.clone(),
            estimand: est.estimand,
            estimand_formula: est.estimand.formula(),
            value: est.value,
            n_by_group: est.n_by_group,
            trimmed: est.trimmed,
            contrast: est.contrast.map(|(g, g_prime)| Contrast { g, g_prime }),
            analytic_se,
            inference,
            bounds,
            interpretation,
        });
    }

    let diagnostics = if !a.input.pre_columns.is_empty() && method != Method::Triple {
        let r = pretrends(&pairs[0].2, design, &cfg)?;
        let _ = writeln!(err, "pre-trends: {}", r.verdict_note);
        Some(r)
    } else {
        None
    };

    let primary = reports.remove(0);
    Ok(Report {
        schema: REPORT_SCHEMA,
        design,
        design_source,
        method: method.as_str(),
        primary,
        pairwise: reports,
        diagnostics,
        provenance: provenance(&bytes, cfg.seed, a),
    })
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Simple => "simple",
        MethodArg::Ipw => "ipw",
        MethodArg::Continuous => "continuous",
        MethodArg::Triple => "triple",
    }
}

fn pretrends_cmd(a: &PretrendsArgs, err: &mut Vec<u8>) -> Result<PreTrendsReport<PretrendsArgs>> {
    let bytes = read(&a.input.input)?;
    let data = load(&a.input, &bytes)?;
    let cfg = boot_config(&a.boot);
    cfg.validate()?;
    let pairs = binary_pairs(&data, a.contrast.as_deref(), a.input.reference.as_deref())?;
    if pairs.len() > 1 {
        return Err(GdidError::InvalidArgument(
            "pre-trends compare two groups; pick them with --contrast focal,reference".into(),
        ));
    }
    let d = &pairs[0].2;
    let (design, _) = resolve_design(d, a.design)?;
    let result = pretrends(d, design, &cfg)?;
    let _ = writeln!(err, "{}", result.verdict_note);
    if let (Some(g), Some(ci)) = (result.pooled_gap, result.ci) {
        let _ = writeln!(err, "pooled gap {g:.6} [{:.6}, {:.6}]", ci.lower, ci.upper);
    }
    Ok(PreTrendsReport {
        schema: PRETRENDS_SCHEMA,
        design,
        result,
        provenance: provenance(&bytes, cfg.seed, a),
    })
}

fn simulate(a: &SimulateArgs, err: &mut Vec<u8>) -> Result<SimulationReport<SimulateArgs>> {
    let bytes = read(&a.spec)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| GdidError::InvalidSpec("spec file is not UTF-8".into()))?;
    let spec = parse_config::<f64>(&text)?;
    let truth = true_estimand(&spec)?;
    let design = spec.design.design_kind();
    let is_triple = matches!(spec.design, DgpDesign::Triple { .. });
    let estimator = match a.estimator {
        SimEstimator::Auto if is_triple => EstimatorSpec::Triple,
        SimEstimator::Auto | SimEstimator::Simple => EstimatorSpec::Simple { design },
        SimEstimator::Ipw => EstimatorSpec::Ipw {
            design,
            options: IpwOptions {
                covariates: spec.covariate.map(|_| vec!["z".to_string()]).unwrap_or_default(),
                ..IpwOptions::default()
            },
        },
        SimEstimator::Triple => EstimatorSpec::Triple,
    };
    let boot = (a.boot > 0).then(|| BootstrapConfig {
        replicates: a.boot,
        level: a.level,
        ..BootstrapConfig::default()
    });
    let summary = monte_carlo(&spec, &estimator, a.reps, boot.as_ref(), a.seed)?;
    let _ = writeln!(
        err,
        "truth {} ({}); mean estimate {:.6}, mean bias {:.6}, sd {:.6}, mc_se {:.6}",
        truth.true_estimand,
        truth.estimand_kind.as_str(),
        summary.mean_estimate,
        summary.mean_bias,
        summary.sd,
        summary.mc_se
    );
    Ok(SimulationReport {
        schema: SIMULATION_SCHEMA,
        spec,
        truth,
        summary,
        provenance: provenance(&bytes, a.seed, a),
    })
}
