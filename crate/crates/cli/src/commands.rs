//! The five experiment commands.

use std::path::{Path, PathBuf};

use combsync_core::clockmodel::{comb_mode_freq, comb_time_params};
use combsync_core::fit::log_log_slope;
use combsync_core::noisegen::generate_noise;
use combsync_core::quantum::{monte_carlo_sigma, EstimatorModel, Method};
use combsync_core::rng::derive_seed;
use combsync_core::stability::{
    classify_noise, fit_slope, max_trusted_tau, octave_factors, stability_curve,
};
use combsync_core::synclink::{advantage_report, run_sync_campaign, CampaignConfig};
use combsync_core::{Error, NoiseSpec, TimeSeriesY, Variant};
use serde::Serialize;

use crate::config::{
    AdvantageSection, Command, ExperimentConfig, NoiseSection, QuantumScalingSection,
    StabilitySection, SyncSection,
};
use crate::output::{emit_sigma_tau, emit_summary, emit_table};
use crate::{CliError, RunContext};

const MAX_COMB_ROWS: u64 = 1_000_000;

pub fn dispatch(config: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    fn section<'a, T>(s: &'a Option<T>, ctx: &RunContext) -> Result<&'a T, CliError> {
        s.as_ref().ok_or_else(|| {
            CliError::Config(format!("missing [{}] section", ctx.command.section()))
        })
    }
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| CliError::io(&ctx.out_dir, e))?;
    match ctx.command {
        Command::Noise => run_noise(section(&config.noise, ctx)?, ctx),
        Command::Stability => run_stability(section(&config.stability, ctx)?, ctx),
        Command::Sync => run_sync(section(&config.sync, ctx)?, ctx),
        Command::QuantumScaling => run_quantum_scaling(section(&config.quantum_scaling, ctx)?, ctx),
        Command::Advantage => run_advantage(section(&config.advantage, ctx)?, ctx),
    }
}

fn config_check(result: combsync_core::Result<()>, what: &str) -> Result<(), CliError> {
    result.map_err(|e| CliError::Config(format!("{what}: {e}")))
}

fn config_ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "unattainable".to_string(), |x| format!("{x:e}"))
}

/// Sum of independently seeded noise processes.
fn synthesize(components: &[NoiseSpec], count: usize, tau0: f64, seed: u64) -> Result<TimeSeriesY, CliError> {
    let mut total = vec![0.0; count];
    for (i, spec) in components.iter().enumerate() {
        let spec = NoiseSpec { seed: derive_seed(derive_seed(seed, i as u64), spec.seed), ..*spec };
        let y = generate_noise(&spec, count, tau0)?;
        for (t, v) in total.iter_mut().zip(y.samples()) {
            *t += v;
        }
    }
    Ok(TimeSeriesY::new(tau0, total)?)
}

fn check_components(components: &[NoiseSpec], section: &str) -> Result<(), CliError> {
    config_ensure(!components.is_empty(), || format!("[{section}] needs at least one noise component"))?;
    for spec in components {
        config_check(spec.validate(), section)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct NoiseSummary {
    count: usize,
    tau0_s: f64,
    components: Vec<String>,
    rms: f64,
}

fn run_noise(sec: &NoiseSection, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    config_ensure(sec.count >= 2, || "[noise] count must be at least 2".into())?;
    config_ensure(sec.tau0.is_finite() && sec.tau0 > 0.0, || "[noise] tau0 must be positive".into())?;
    check_components(&sec.components, "noise")?;
    let seed = ctx.require_seed()?;

    let y = synthesize(&sec.components, sec.count, sec.tau0, seed)?;
    let comments = [ctx.provenance()];
    let data = ctx.out_dir.join("noise.csv");
    emit_table(
        &data,
        &comments,
        "index,t_s,y",
        y.samples()
            .iter()
            .enumerate()
            .map(|(k, v)| format!("{k},{:e},{v:e}", k as f64 * sec.tau0)),
    )?;
    let rms = (y.samples().iter().map(|v| v * v).sum::<f64>() / y.len() as f64).sqrt();
    let summary = ctx.out_dir.join("summary.toml");
    emit_summary(
        &summary,
        &comments,
        &NoiseSummary {
            count: sec.count,
            tau0_s: sec.tau0,
            components: sec.components.iter().map(|c| c.kind.label().to_string()).collect(),
            rms,
        },
    )?;
    Ok(vec![data, summary])
}

/// Reads a ȳ series: one value per line, or the last field of a CSV row.
/// Blank lines, `#` comments and a non-numeric header row are skipped.
fn read_series(path: &Path, tau0: f64) -> Result<TimeSeriesY, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut values = Vec::new();
    let mut header_allowed = true;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if header_allowed => {}
            Err(_) => {
                return Err(CliError::Config(format!(
                    "{}:{}: cannot parse `{field}` as a number",
                    path.display(),
                    lineno + 1
                )))
            }
        }
        header_allowed = false;
    }
    TimeSeriesY::new(tau0, values).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct StabilitySummary {
    variant: Variant,
    source_length: usize,
    points: usize,
    slope: f64,
    classification: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_trusted_tau_s: Option<f64>,
    warnings: Vec<String>,
}

fn run_stability(sec: &StabilitySection, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    let tau0 = sec.tau0.unwrap_or(1.0);
    config_ensure(tau0.is_finite() && tau0 > 0.0, || "[stability] tau0 must be positive".into())?;
    let series = match (&sec.input, sec.noise.is_empty()) {
        (Some(input), true) => read_series(&ctx.base_dir.join(input), tau0)?,
        (None, false) => {
            check_components(&sec.noise, "stability")?;
            let count = sec
                .count
                .ok_or_else(|| CliError::Config("[stability] count is required with noise".into()))?;
            config_ensure(sec.tau0.is_some(), || "[stability] tau0 is required with noise".into())?;
            config_ensure(count >= 2, || "[stability] count must be at least 2".into())?;
            synthesize(&sec.noise, count, tau0, ctx.require_seed()?)?
        }
        _ => {
            return Err(CliError::Config(
                "[stability] needs exactly one of `input` or `noise`".into(),
            ))
        }
    };

    let m_values = sec
        .m_values
        .clone()
        .unwrap_or_else(|| octave_factors(series.len(), sec.variant));
    let curve = stability_curve(&series, &m_values, sec.variant)?;
    for w in &curve.warnings {
        log::warn!("{w}");
    }
    let range = match (sec.fit_tau_min, sec.fit_tau_max) {
        (None, None) => None,
        (lo, hi) => Some((lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))),
    };
    let slope = fit_slope(&curve, range)?;
    let classification = classify_noise(slope, sec.variant)
        .into_iter()
        .map(|k| k.label().to_string())
        .collect();
    let max_trusted_tau_s = match sec.variant {
        Variant::Ffi2 => max_trusted_tau(&curve)?,
        _ => None,
    };

    let comments = [ctx.provenance()];
    let data = ctx.out_dir.join("sigma_tau.csv");
    emit_sigma_tau(&curve, &data, &comments)?;
    let summary = ctx.out_dir.join("summary.toml");
    emit_summary(
        &summary,
        &comments,
        &StabilitySummary {
            variant: sec.variant,
            source_length: curve.source_length,
            points: curve.points.len(),
            slope,
            classification,
            max_trusted_tau_s,
            warnings: curve.warnings.clone(),
        },
    )?;
    Ok(vec![data, summary])
}

#[derive(Serialize)]
struct CombSummary {
    period_s: f64,
    ceo_phase_slip_rad: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    advisory: Option<String>,
}

#[derive(Serialize)]
struct SyncSummary {
    trials: usize,
    mean_offset_s: f64,
    residual_std_s: f64,
    tdev_at_interval_s: f64,
    sigma_excess_s: f64,
    sigma_dt_s: f64,
    measurement_sigma_s: f64,
    mean_link_efficiency: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tdev_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comb: Option<CombSummary>,
}

fn run_sync(sec: &SyncSection, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    let link = sec.link.build();
    config_check(link.validate(), "[sync.link]")?;
    config_check(sec.clock_a.validate(), "[sync.clock_a]")?;
    config_check(sec.clock_b.validate(), "[sync.clock_b]")?;
    if let Some(est) = &sec.estimator {
        config_check(est.validate(), "[sync.estimator]")?;
    }
    if let Some(comb) = &sec.comb {
        config_check(comb.validate(), "[sync.comb]")?;
        config_ensure(comb.n_max - comb.n_min < MAX_COMB_ROWS, || {
            format!("[sync.comb] mode range exceeds {MAX_COMB_ROWS} rows")
        })?;
    }
    let seed = ctx.require_seed()?;

    let campaign = CampaignConfig {
        clock_a: sec.clock_a.clone(),
        clock_b: sec.clock_b.clone(),
        link,
        true_offset: sec.true_offset,
        interval: sec.interval,
        turnaround: sec.turnaround,
        estimator: sec.estimator,
        sigma_scale: sec.sigma_scale,
        tdev_factors: sec.tdev_factors.clone(),
    };
    let result = run_sync_campaign(&campaign, sec.trials, seed)?;
    for w in &result.tdev.warnings {
        log::warn!("{w}");
    }

    let comments = [ctx.provenance()];
    let mut files = Vec::new();
    let data = ctx.out_dir.join("campaign.csv");
    emit_table(
        &data,
        &comments,
        "trial,estimate_s,truth_s,residual_s",
        result
            .trials
            .iter()
            .map(|t| format!("{},{:e},{:e},{:e}", t.trial, t.estimate, t.truth, t.residual)),
    )?;
    files.push(data);

    let tdev_slope = if result.tdev.points.iter().filter(|p| p.value > 0.0).count() >= 3
        && result.tdev.points.iter().all(|p| p.value > 0.0)
    {
        Some(fit_slope(&result.tdev, None)?)
    } else {
        None
    };
    if !result.tdev.is_empty() {
        let path = ctx.out_dir.join("tdev.csv");
        emit_sigma_tau(&result.tdev, &path, &comments)?;
        files.push(path);
    }

    let comb = match &sec.comb {
        None => None,
        Some(params) => {
            let path = ctx.out_dir.join("comb_modes.csv");
            let rows = (params.n_min..=params.n_max)
                .map(|n| comb_mode_freq(params, n).map(|f| format!("{n},{f:e}")))
                .collect::<Result<Vec<_>, Error>>()?;
            emit_table(&path, &comments, "n,freq_hz", rows)?;
            files.push(path);
            let timing = comb_time_params(params);
            let advisory = params.advisory();
            if let Some(a) = &advisory {
                log::warn!("{a}");
            }
            Some(CombSummary {
                period_s: timing.period,
                ceo_phase_slip_rad: timing.ceo_phase_slip,
                advisory,
            })
        }
    };

    let summary = ctx.out_dir.join("summary.toml");
    emit_summary(
        &summary,
        &comments,
        &SyncSummary {
            trials: sec.trials,
            mean_offset_s: result.mean_offset,
            residual_std_s: result.residual_std,
            tdev_at_interval_s: result.tdev_at_interval,
            sigma_excess_s: result.sigma_excess,
            sigma_dt_s: result.sigma_dt,
            measurement_sigma_s: result.measurement_sigma,
            mean_link_efficiency: campaign.link.mean_efficiency()?,
            tdev_slope,
            comb,
        },
    )?;
    files.push(summary);
    Ok(files)
}

#[derive(Serialize)]
struct ScalingSummary {
    trials_per_point: usize,
    sql_exponent_closed_form: f64,
    sql_exponent_mc: f64,
    hl_exponent_closed_form: f64,
    hl_exponent_mc: f64,
}

struct ScalingRow {
    regime: &'static str,
    r: f64,
    n: f64,
    closed: f64,
    mc_mean: f64,
    mc_std: f64,
}

fn run_quantum_scaling(sec: &QuantumScalingSection, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    config_ensure(sec.n_min > 0.0 && sec.n_max > sec.n_min, || {
        "[quantum_scaling] needs 0 < n_min < n_max".into()
    })?;
    config_ensure(sec.points_per_decade >= 1, || "[quantum_scaling] points_per_decade must be positive".into())?;
    config_ensure(sec.r_min > 0.0 && sec.r_max > sec.r_min && sec.r_points >= 3, || {
        "[quantum_scaling] needs 0 < r_min < r_max and r_points >= 3".into()
    })?;
    config_ensure(sec.trials >= 100, || "[quantum_scaling] trials must be at least 100".into())?;
    let probe = EstimatorModel { method: Method::TemporalMode, n: 1.0, nu0: sec.nu0, t0: sec.t0, r: 0.0 };
    config_check(probe.validate(), "[quantum_scaling]")?;
    let seed = ctx.require_seed()?;

    let decades = (sec.n_max / sec.n_min).log10();
    let n_points = (decades * sec.points_per_decade as f64).round() as usize + 1;
    let mut rows = Vec::new();
    let mut point = |regime, r: f64, n: f64, stream: u64| -> Result<(), CliError> {
        let model = EstimatorModel { n, r, ..probe };
        let mc = monte_carlo_sigma(&model, sec.trials, stream)?;
        rows.push(ScalingRow { regime, r, n, closed: mc.sigma_model, mc_mean: mc.mean, mc_std: mc.std });
        Ok(())
    };
    let sql_seed = derive_seed(seed, 0);
    for i in 0..n_points {
        let n = sec.n_min * 10f64.powf(decades * i as f64 / (n_points - 1) as f64);
        point("sql", 0.0, n, derive_seed(sql_seed, i as u64))?;
    }
    let hl_seed = derive_seed(seed, 1);
    for j in 0..sec.r_points {
        let r = sec.r_min + (sec.r_max - sec.r_min) * j as f64 / (sec.r_points - 1) as f64;
        point("hl", r, r.sinh().powi(2), derive_seed(hl_seed, j as u64))?;
    }

    let exponent = |regime: &str, pick: fn(&ScalingRow) -> f64| {
        log_log_slope(rows.iter().filter(|r| r.regime == regime).map(|r| (r.n, pick(r))))
    };
    let summary_body = ScalingSummary {
        trials_per_point: sec.trials,
        sql_exponent_closed_form: exponent("sql", |r| r.closed)?,
        sql_exponent_mc: exponent("sql", |r| r.mc_std)?,
        hl_exponent_closed_form: exponent("hl", |r| r.closed)?,
        hl_exponent_mc: exponent("hl", |r| r.mc_std)?,
    };

    let comments = [ctx.provenance()];
    let data = ctx.out_dir.join("scaling.csv");
    emit_table(
        &data,
        &comments,
        "regime,r,n,sigma_closed_form,mc_mean,mc_std",
        rows.iter().map(|r| {
            format!("{},{:e},{:e},{:e},{:e},{:e}", r.regime, r.r, r.n, r.closed, r.mc_mean, r.mc_std)
        }),
    )?;
    let summary = ctx.out_dir.join("summary.toml");
    emit_summary(&summary, &comments, &summary_body)?;
    Ok(vec![data, summary])
}

#[derive(Serialize)]
struct AdvantageSummary {
    distance_km: f64,
    eta_total: f64,
    sigma_classical_s: f64,
    sigma_quantum_s: f64,
    advantage_ratio: f64,
    unattainable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    required_db_for_2x: Option<f64>,
}

fn run_advantage(sec: &AdvantageSection, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    let link = sec.link.build();
    config_check(link.validate(), "[advantage.link]")?;
    config_check(sec.estimator.validate(), "[advantage.estimator]")?;
    for &km in &sec.sweep_km {
        config_ensure(km.is_finite() && km > 0.0, || format!("[advantage] sweep distance {km} must be positive"))?;
    }

    let report = advantage_report(&link, &sec.estimator)?;
    let mut distances = sec.sweep_km.clone();
    if distances.is_empty() {
        distances.push(sec.link.distance_km);
    }
    let rows = distances
        .iter()
        .map(|&km| {
            let r = advantage_report(&sec.link.at_distance(km), &sec.estimator)?;
            Ok(format!(
                "{km:e},{:e},{:e},{:e},{:e},{}",
                r.eta_total,
                r.sigma_classical,
                r.sigma_quantum,
                r.advantage_ratio,
                fmt_opt(r.required_for_2x.db())
            ))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let comments = [ctx.provenance()];
    let data = ctx.out_dir.join("advantage.csv");
    emit_table(
        &data,
        &comments,
        "distance_km,eta_total,sigma_classical_s,sigma_quantum_s,advantage_ratio,required_db_for_2x",
        rows,
    )?;
    let summary = ctx.out_dir.join("summary.toml");
    emit_summary(
        &summary,
        &comments,
        &AdvantageSummary {
            distance_km: sec.link.distance_km,
            eta_total: report.eta_total,
            sigma_classical_s: report.sigma_classical,
            sigma_quantum_s: report.sigma_quantum,
            advantage_ratio: report.advantage_ratio,
            unattainable: report.unattainable(),
            required_db_for_2x: report.required_for_2x.db(),
        },
    )?;
    Ok(vec![data, summary])
}
