//! One-way and two-way time transfer over a free-space link.
//!
//! Clock B runs `true_offset` seconds ahead of clock A. One exchange is the
//! timestamp quartet
//!
//! ```text
//!   A: t1 ──── d_ab ────▶ B: t2
//!                          │ turnaround
//!   A: t4 ◀─── d_ba ──── B: t3
//! ```
//!
//! with each timestamp read in its own clock's timescale, relative to the
//! nominal start of the exchange. The two-way estimate
//! `((t2 − t1) − (t4 − t3))/2` cancels any delay common to both directions
//! and is biased by half the asymmetry `d_ab − d_ba`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clockmodel::{sample_clock, ClockModel};
use crate::error::{ensure, invalid, Result};
use crate::quantum::{mean_std, required_squeezing, EstimatorModel, SqueezingRequirement};
use crate::rng;
use crate::series::TimeSeriesX;
use crate::stability::{octave_factors, stability_curve, tdev, y_from_x, StabilityCurve, Variant};

/// Extra path delay from the troposphere, seconds per km.
pub const TROPOSPHERE_DELAY_PER_KM: f64 = 1e-9;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Gaussian beam launched from a waist at the transmitter and collected by a
/// circular aperture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamGeometry {
    /// m
    pub wavelength: f64,
    /// 1/e² intensity radius at the transmitter, m.
    pub waist: f64,
    /// Receiver aperture radius, m.
    pub aperture_radius: f64,
}

impl BeamGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("waist", self.waist),
            ("aperture radius", self.aperture_radius),
        ] {
            ensure(v.is_finite() && v > 0.0, || format!("{name} must be positive, got {v}"))?;
        }
        Ok(())
    }

    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist * self.waist / self.wavelength
    }

    /// Far-field half-angle divergence λ/(πw₀), rad.
    pub fn divergence(&self) -> f64 {
        self.wavelength / (PI * self.waist)
    }

    /// Beam radius after `distance` metres.
    pub fn beam_radius(&self, distance: f64) -> f64 {
        self.waist * (1.0 + (distance / self.rayleigh_range()).powi(2)).sqrt()
    }

    /// Fraction of an on-axis beam collected by the aperture,
    /// 1 − exp(−2a²/w(L)²).
    pub fn collection_efficiency(&self, distance: f64) -> f64 {
        let w = self.beam_radius(distance);
        -(-2.0 * self.aperture_radius.powi(2) / (w * w)).exp_m1()
    }

    /// Factor exp(−2θ²/θ_div²) for a pointing error θ.
    pub fn pointing_factor(&self, theta: f64) -> f64 {
        (-2.0 * (theta / self.divergence()).powi(2)).exp()
    }
}

fn default_eta_detector() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkModel {
    pub distance_km: f64,
    /// A → B propagation delay, s.
    pub delay_ab: f64,
    /// B → A propagation delay, s.
    pub delay_ba: f64,
    /// Adds [`TROPOSPHERE_DELAY_PER_KM`] × distance to both directions.
    #[serde(default)]
    pub troposphere: bool,
    #[serde(default)]
    pub geometric: Option<BeamGeometry>,
    /// Standard deviation of the pointing error, rad.
    #[serde(default)]
    pub pointing_sigma: f64,
    #[serde(default = "default_eta_detector")]
    pub eta_detector: f64,
    /// Additive synchronization bias folded into σ_Δt, s.
    #[serde(default)]
    pub sigma_excess: f64,
}

impl LinkModel {
    /// Reciprocal vacuum link with light-time delays and no losses modelled.
    pub fn symmetric(distance_km: f64) -> Self {
        let delay = distance_km * 1e3 / SPEED_OF_LIGHT;
        Self {
            distance_km,
            delay_ab: delay,
            delay_ba: delay,
            troposphere: false,
            geometric: None,
            pointing_sigma: 0.0,
            eta_detector: 1.0,
            sigma_excess: 0.0,
        }
    }

    /// Low-Earth-orbit inter-satellite scenario: 1560 nm carrier, 0.3 m
    /// aperture radius, 90 % detectors and 1 µrad pointing jitter. The waist
    /// is fixed so the far-field cone θ_div·L fills the aperture at 100 km,
    /// and is kept for every `distance_km`.
    pub fn leo_inter_satellite(distance_km: f64) -> Self {
        let wavelength = 1560e-9;
        let aperture_radius = 0.3;
        let waist = wavelength * 100e3 / (PI * aperture_radius);
        Self {
            geometric: Some(BeamGeometry { wavelength, waist, aperture_radius }),
            pointing_sigma: 1e-6,
            eta_detector: 0.9,
            ..Self::symmetric(distance_km)
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.distance_km.is_finite() && self.distance_km > 0.0, || {
            format!("distance must be positive, got {}", self.distance_km)
        })?;
        ensure(self.delay_ab >= 0.0 && self.delay_ba >= 0.0, || "delays must be non-negative".into())?;
        ensure(self.delay_ab.is_finite() && self.delay_ba.is_finite(), || "delays must be finite".into())?;
        ensure(self.pointing_sigma.is_finite() && self.pointing_sigma >= 0.0, || {
            "pointing sigma must be non-negative".into()
        })?;
        ensure((0.0..=1.0).contains(&self.eta_detector), || {
            format!("detector efficiency must lie in [0, 1], got {}", self.eta_detector)
        })?;
        ensure(self.sigma_excess.is_finite() && self.sigma_excess >= 0.0, || {
            "sigma_excess must be non-negative".into()
        })?;
        if let Some(g) = &self.geometric {
            g.validate()?;
        }
        Ok(())
    }

    pub fn troposphere_delay(&self) -> f64 {
        if self.troposphere {
            TROPOSPHERE_DELAY_PER_KM * self.distance_km
        } else {
            0.0
        }
    }

    /// Effective (A → B, B → A) delays including the troposphere.
    pub fn effective_delays(&self) -> (f64, f64) {
        let extra = self.troposphere_delay();
        (self.delay_ab + extra, self.delay_ba + extra)
    }

    /// Expected η over pointing jitter: η_geo·(1 + 4σ²/θ_div²)^(−½)·η_det.
    /// Without a geometric block this is η_det.
    pub fn mean_efficiency(&self) -> Result<f64> {
        self.validate()?;
        Ok(match &self.geometric {
            None => self.eta_detector,
            Some(g) => {
                let pointing = (1.0 + 4.0 * (self.pointing_sigma / g.divergence()).powi(2)).sqrt().recip();
                g.collection_efficiency(self.distance_km * 1e3) * pointing * self.eta_detector
            }
        })
    }
}

/// Four timestamps of one two-way exchange, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeRecord {
    /// A transmits (A timescale).
    pub t1: f64,
    /// B receives (B timescale).
    pub t2: f64,
    /// B transmits (B timescale).
    pub t3: f64,
    /// A receives (A timescale).
    pub t4: f64,
}

/// Conditions of a single exchange beyond the clock and link models.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExchangeOptions {
    /// Time since the clocks' common start at which the exchange happens;
    /// each clock contributes its sampled time deviation at this instant.
    pub epoch: f64,
    /// Hold time at B between reception and retransmission, s.
    pub turnaround: f64,
    /// Standard deviation of the timing estimate at each receiver, s.
    pub measurement_sigma: f64,
}

fn quartet(
    delays: (f64, f64),
    true_offset: f64,
    x_a: f64,
    x_b: f64,
    turnaround: f64,
    noise_b: f64,
    noise_a: f64,
) -> ExchangeRecord {
    let (d_ab, d_ba) = delays;
    ExchangeRecord {
        t1: x_a,
        t2: d_ab + true_offset + x_b + noise_b,
        t3: d_ab + turnaround + true_offset + x_b,
        t4: d_ab + turnaround + d_ba + x_a + noise_a,
    }
}

/// One exchange at epoch 0 with noiseless receivers.
pub fn simulate_exchange(
    clock_a: &ClockModel,
    clock_b: &ClockModel,
    link: &LinkModel,
    true_offset: f64,
    seed: u64,
) -> Result<ExchangeRecord> {
    simulate_exchange_with(clock_a, clock_b, link, true_offset, &ExchangeOptions::default(), seed)
}

pub fn simulate_exchange_with(
    clock_a: &ClockModel,
    clock_b: &ClockModel,
    link: &LinkModel,
    true_offset: f64,
    options: &ExchangeOptions,
    seed: u64,
) -> Result<ExchangeRecord> {
    link.validate()?;
    ensure(true_offset.is_finite(), || "true offset must be finite".into())?;
    ensure(options.epoch.is_finite() && options.epoch >= 0.0, || "epoch must be non-negative".into())?;
    ensure(options.turnaround.is_finite() && options.turnaround >= 0.0, || {
        "turnaround must be non-negative".into()
    })?;
    ensure(options.measurement_sigma.is_finite() && options.measurement_sigma >= 0.0, || {
        "measurement sigma must be non-negative".into()
    })?;
    let clock_at = |clock: &ClockModel, stream: u64| -> Result<f64> {
        clock.validate()?;
        if options.epoch == 0.0 {
            return Ok(0.0);
        }
        Ok(sample_clock(clock, 2, options.epoch, rng::derive_seed(seed, stream))?.samples()[1])
    };
    let x_a = clock_at(clock_a, 0)?;
    let x_b = clock_at(clock_b, 1)?;
    let mut noise = rng::stream(seed, 2);
    let noise_b = options.measurement_sigma * noise.sample::<f64, _>(StandardNormal);
    let noise_a = options.measurement_sigma * noise.sample::<f64, _>(StandardNormal);
    Ok(quartet(
        link.effective_delays(),
        true_offset,
        x_a,
        x_b,
        options.turnaround,
        noise_b,
        noise_a,
    ))
}

/// ((t2 − t1) − (t4 − t3)) / 2.
pub fn two_way_offset(rec: &ExchangeRecord) -> f64 {
    ((rec.t2 - rec.t1) - (rec.t4 - rec.t3)) / 2.0
}

/// (t2 − t1) − assumed one-way delay.
pub fn one_way_offset(rec: &ExchangeRecord, assumed_delay: f64) -> f64 {
    (rec.t2 - rec.t1) - assumed_delay
}

/// One draw of the link efficiency with a Gaussian pointing error.
pub fn link_efficiency(link: &LinkModel, seed: u64) -> Result<f64> {
    link.validate()?;
    let geometry = link
        .geometric
        .ok_or_else(|| invalid("link efficiency needs a geometric block"))?;
    let theta = if link.pointing_sigma > 0.0 {
        link.pointing_sigma * rng::seeded(seed).sample::<f64, _>(StandardNormal)
    } else {
        0.0
    };
    let eta = geometry.collection_efficiency(link.distance_km * 1e3)
        * geometry.pointing_factor(theta)
        * link.eta_detector;
    Ok(eta.clamp(0.0, 1.0))
}

fn default_sigma_scale() -> f64 {
    1.0
}

/// Repeated two-way exchanges at a fixed cadence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub clock_a: ClockModel,
    pub clock_b: ClockModel,
    pub link: LinkModel,
    /// Offset of clock B relative to clock A, s.
    #[serde(default)]
    pub true_offset: f64,
    /// Time between exchanges, s. Also the τ0 of the residual analysis.
    pub interval: f64,
    #[serde(default)]
    pub turnaround: f64,
    /// Timing estimator whose scaling law sets the receiver noise.
    #[serde(default)]
    pub estimator: Option<EstimatorModel>,
    /// Seconds per unit of the estimator's scaling law.
    #[serde(default = "default_sigma_scale")]
    pub sigma_scale: f64,
    /// Averaging factors for the residual TDEV curve; octaves when absent.
    #[serde(default)]
    pub tdev_factors: Option<Vec<usize>>,
}

impl CampaignConfig {
    pub fn new(clock_a: ClockModel, clock_b: ClockModel, link: LinkModel, interval: f64) -> Self {
        Self {
            clock_a,
            clock_b,
            link,
            true_offset: 0.0,
            interval,
            turnaround: 0.0,
            estimator: None,
            sigma_scale: 1.0,
            tdev_factors: None,
        }
    }

    /// Receiver timing noise from the estimator, after link loss.
    pub fn measurement_sigma(&self) -> Result<f64> {
        match &self.estimator {
            None => Ok(0.0),
            Some(model) => Ok(self.sigma_scale * model.sigma_through(self.link.mean_efficiency()?)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignTrial {
    pub trial: usize,
    pub estimate: f64,
    pub truth: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub trials: Vec<CampaignTrial>,
    pub mean_offset: f64,
    pub residual_std: f64,
    /// TDEV of the residual phase at τ = interval.
    pub tdev_at_interval: f64,
    pub sigma_excess: f64,
    /// σ_excess + TDEV(interval).
    pub sigma_dt: f64,
    pub measurement_sigma: f64,
    pub tdev: StabilityCurve,
}

/// Runs `trials` exchanges spaced by `config.interval`. Residuals
/// (estimate − truth) form a phase series whose TDEV curve is reported;
/// σ_Δt = σ_excess + TDEV at the exchange interval.
pub fn run_sync_campaign(config: &CampaignConfig, trials: usize, seed: u64) -> Result<CampaignResult> {
    ensure(trials >= 100, || format!("a campaign needs at least 100 exchanges, got {trials}"))?;
    config.link.validate()?;
    ensure(config.interval.is_finite() && config.interval > 0.0, || "interval must be positive".into())?;
    ensure(config.turnaround.is_finite() && config.turnaround >= 0.0, || {
        "turnaround must be non-negative".into()
    })?;
    ensure(config.true_offset.is_finite(), || "true offset must be finite".into())?;
    ensure(config.sigma_scale.is_finite() && config.sigma_scale >= 0.0, || {
        "sigma_scale must be non-negative".into()
    })?;

    let x_a = sample_clock(&config.clock_a, trials, config.interval, rng::derive_seed(seed, 0))?;
    let x_b = sample_clock(&config.clock_b, trials, config.interval, rng::derive_seed(seed, 1))?;
    let sigma_meas = config.measurement_sigma()?;
    let delays = config.link.effective_delays();
    let noise_seed = rng::derive_seed(seed, 2);
    let truth = config.true_offset;

    let rows: Vec<CampaignTrial> = x_a
        .samples()
        .iter()
        .zip(x_b.samples())
        .enumerate()
        .map(|(k, (&xa, &xb))| {
            let (noise_b, noise_a) = if sigma_meas > 0.0 {
                let mut r = rng::stream(noise_seed, k as u64);
                (
                    sigma_meas * r.sample::<f64, _>(StandardNormal),
                    sigma_meas * r.sample::<f64, _>(StandardNormal),
                )
            } else {
                (0.0, 0.0)
            };
            let rec = quartet(delays, truth, xa, xb, config.turnaround, noise_b, noise_a);
            let estimate = two_way_offset(&rec);
            CampaignTrial { trial: k, estimate, truth, residual: estimate - truth }
        })
        .collect();

    let estimates: Vec<f64> = rows.iter().map(|r| r.estimate).collect();
    let residuals: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    let (mean_offset, _) = mean_std(&estimates);
    let (_, residual_std) = mean_std(&residuals);

    let y = y_from_x(&TimeSeriesX::new(config.interval, residuals)?)?;
    let factors = config
        .tdev_factors
        .clone()
        .unwrap_or_else(|| octave_factors(y.len(), Variant::Tdev));
    let curve = stability_curve(&y, &factors, Variant::Tdev)?;
    let tdev_at_interval = tdev(&y, 1)?;

    Ok(CampaignResult {
        trials: rows,
        mean_offset,
        residual_std,
        tdev_at_interval,
        sigma_excess: config.link.sigma_excess,
        sigma_dt: config.link.sigma_excess + tdev_at_interval,
        measurement_sigma: sigma_meas,
        tdev: curve,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub eta_total: f64,
    pub sigma_classical: f64,
    pub sigma_quantum: f64,
    /// σ_classical / σ_quantum.
    pub advantage_ratio: f64,
    pub required_for_2x: SqueezingRequirement,
}

impl AdvantageReport {
    pub fn unattainable(&self) -> bool {
        self.required_for_2x == SqueezingRequirement::Unattainable
    }
}

/// Compares the estimator with and without its squeezing after the link's
/// expected efficiency, and the squeezing needed for a twofold gain.
pub fn advantage_report(link: &LinkModel, model: &EstimatorModel) -> Result<AdvantageReport> {
    let eta_total = link.mean_efficiency()?;
    let sigma_classical = EstimatorModel { r: 0.0, ..*model }.sigma()?;
    let sigma_quantum = model.sigma_through(eta_total)?;
    Ok(AdvantageReport {
        eta_total,
        sigma_classical,
        sigma_quantum,
        advantage_ratio: sigma_classical / sigma_quantum,
        required_for_2x: if eta_total > 0.0 {
            required_squeezing(eta_total, 2.0)?
        } else {
            SqueezingRequirement::Unattainable
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noisegen::NoiseSpec;
    use crate::quantum::{r_from_db, Method};
    use approx::assert_relative_eq;

    fn quiet() -> ClockModel {
        ClockModel::new(1.94e14).unwrap()
    }

    fn link(delay: f64) -> LinkModel {
        LinkModel { delay_ab: delay, delay_ba: delay, ..LinkModel::symmetric(100.0) }
    }

    #[test]
    fn symmetric_bookkeeping() {
        let (d, off) = (3.3e-4, 2.5e-7);
        let rec = simulate_exchange(&quiet(), &quiet(), &link(d), off, 1).unwrap();
        assert!((rec.t2 - rec.t1 - (d + off)).abs() < 1e-18);
        assert!((rec.t4 - rec.t3 - (d - off)).abs() < 1e-18);
        assert!((two_way_offset(&rec) - off).abs() < 1e-15);
        assert!(rec.t4 >= rec.t1 && rec.t3 >= rec.t2);
    }

    #[test]
    fn zero_delay_zero_offset() {
        let rec = simulate_exchange(&quiet(), &quiet(), &link(0.0), 0.0, 1).unwrap();
        assert_eq!(rec.t1, rec.t2);
        assert_eq!(rec.t3, rec.t4);
        assert_eq!(two_way_offset(&rec), 0.0);
    }

    #[test]
    fn troposphere_adds_one_ns_per_km() {
        let base = link(3.3e-4);
        let wet = LinkModel { troposphere: true, ..base };
        let a = simulate_exchange(&quiet(), &quiet(), &base, 0.0, 1).unwrap();
        let b = simulate_exchange(&quiet(), &quiet(), &wet, 0.0, 1).unwrap();
        assert!(((b.t2 - b.t1) - (a.t2 - a.t1) - 100e-9).abs() < 1e-18);
        assert!(((b.t4 - b.t3) - (a.t4 - a.t3) - 100e-9).abs() < 1e-18);
        assert!((one_way_offset(&b, base.delay_ab) - 100e-9).abs() < 1e-18);
        // Common to both directions, so the two-way estimate is unaffected.
        assert!((two_way_offset(&b) - two_way_offset(&a)).abs() < 1e-18);
    }

    #[test]
    fn asymmetry_bias_is_half() {
        let l = LinkModel { delay_ab: 1e-3 + 1e-9, delay_ba: 1e-3, ..LinkModel::symmetric(300.0) };
        let rec = simulate_exchange(&quiet(), &quiet(), &l, 4e-6, 0).unwrap();
        assert!((two_way_offset(&rec) - 4e-6 - 0.5e-9).abs() < 1e-18);
    }

    #[test]
    fn one_way_cases() {
        let d = 3.3e-4;
        let rec = simulate_exchange(&quiet(), &quiet(), &link(d), 1e-6, 0).unwrap();
        assert!((one_way_offset(&rec, d) - 1e-6).abs() < 1e-18);
        assert!((one_way_offset(&rec, d) - two_way_offset(&rec)).abs() < 1e-18);
        let rec = simulate_exchange(&quiet(), &quiet(), &link(0.0), 1e-6, 0).unwrap();
        assert_eq!(one_way_offset(&rec, 0.0), 1e-6);
    }

    #[test]
    fn exchange_noise_is_deterministic() {
        let noisy = quiet().with_noise(NoiseSpec::white_pm_with_rms(1e-12, 1.0, 3));
        let opts = ExchangeOptions { epoch: 10.0, turnaround: 1e-6, measurement_sigma: 1e-13 };
        let a = simulate_exchange_with(&noisy, &noisy, &link(1e-4), 0.0, &opts, 5).unwrap();
        let b = simulate_exchange_with(&noisy, &noisy, &link(1e-4), 0.0, &opts, 5).unwrap();
        let c = simulate_exchange_with(&noisy, &noisy, &link(1e-4), 0.0, &opts, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(two_way_offset(&a) != 0.0);
    }

    #[test]
    fn efficiency_model() {
        let wide = LinkModel {
            geometric: Some(BeamGeometry { wavelength: 1.55e-6, waist: 0.05, aperture_radius: 10.0 }),
            ..LinkModel::symmetric(1.0)
        };
        assert!((link_efficiency(&wide, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(link_efficiency(&LinkModel::symmetric(1.0), 0).is_err());

        let leo = LinkModel { pointing_sigma: 0.0, ..LinkModel::leo_inter_satellite(100.0) };
        assert_eq!(link_efficiency(&leo, 1).unwrap(), link_efficiency(&leo, 2).unwrap());
        assert_relative_eq!(leo.mean_efficiency().unwrap(), link_efficiency(&leo, 3).unwrap(), max_relative = 1e-15);

        let mut prev = 1.0;
        for km in [10.0, 50.0, 100.0, 200.0, 400.0, 1000.0] {
            let eta = link_efficiency(&LinkModel { pointing_sigma: 0.0, ..LinkModel::leo_inter_satellite(km) }, 0).unwrap();
            assert!((0.0..=1.0).contains(&eta));
            assert!(eta <= prev);
            prev = eta;
        }
    }

    #[test]
    fn mean_efficiency_matches_pointing_average() {
        let l = LinkModel { pointing_sigma: 2e-6, ..LinkModel::leo_inter_satellite(100.0) };
        let n = 20_000;
        let mc: f64 = (0..n).map(|i| link_efficiency(&l, i).unwrap()).sum::<f64>() / n as f64;
        assert_relative_eq!(mc, l.mean_efficiency().unwrap(), max_relative = 0.01);
    }

    #[test]
    fn advantage_cases() {
        let r6 = r_from_db(10.0 * 4f64.log10()).unwrap();
        let model = EstimatorModel { method: Method::TemporalMode, n: 1e4, nu0: 1.92e14, t0: 1e-13, r: r6 };
        let ideal = LinkModel::symmetric(10.0);
        let rep = advantage_report(&ideal, &model).unwrap();
        assert_eq!(rep.eta_total, 1.0);
        assert_relative_eq!(rep.advantage_ratio, 2.0, max_relative = 1e-12);
        assert!(!rep.unattainable());

        let lossy = LinkModel { eta_detector: 0.5, ..ideal };
        let strong = EstimatorModel { r: 20.0, ..model };
        let rep = advantage_report(&lossy, &strong).unwrap();
        assert_relative_eq!(rep.advantage_ratio, 2f64.sqrt(), max_relative = 1e-9);
        assert!(rep.unattainable());

        let classical = EstimatorModel { r: 0.0, ..model };
        assert_eq!(advantage_report(&lossy, &classical).unwrap().advantage_ratio, 1.0);
    }

    #[test]
    fn noiseless_campaign_reports_sigma_excess() {
        let l = LinkModel { sigma_excess: 2e-12, ..link(3.3e-4) };
        let mut cfg = CampaignConfig::new(quiet(), quiet(), l, 1.0);
        cfg.true_offset = 1.5e-7;
        let res = run_sync_campaign(&cfg, 256, 4).unwrap();
        assert_eq!(res.sigma_dt, 2e-12);
        assert_eq!(res.trials.len(), 256);
        assert!(res.trials.iter().all(|t| t.residual.abs() < 1e-15));
        assert!(run_sync_campaign(&cfg, 99, 4).is_err());
    }

    #[test]
    fn squeezing_never_hurts_campaign() {
        let model = EstimatorModel { method: Method::TemporalMode, n: 1e3, nu0: 1.92e14, t0: 1e-13, r: 0.0 };
        let mut cfg = CampaignConfig::new(quiet(), quiet(), LinkModel::leo_inter_satellite(100.0), 1.0);
        cfg.estimator = Some(model);
        let classical = run_sync_campaign(&cfg, 512, 11).unwrap();
        cfg.estimator = Some(EstimatorModel { r: 1.0, ..model });
        let squeezed = run_sync_campaign(&cfg, 512, 11).unwrap();
        assert!(squeezed.sigma_dt <= classical.sigma_dt);
        assert!(squeezed.measurement_sigma < classical.measurement_sigma);
    }
}
