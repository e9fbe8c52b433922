//! Oscillator and frequency-comb models.
//!
//! A [`ClockModel`] describes a clock signal `S(t) = S₀ cos(2πν₀t + φ(t))`
//! through its fractional frequency `y(t) = offset + drift·t + noise` and the
//! derived time deviation `x(t) = (φ(t) − φ₀)/(2πν₀)`. Only x and y are
//! simulated; the optical carrier itself is never sampled.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, invalid, Result};
use crate::noisegen::{generate_phase_noise, NoiseSpec};
use crate::rng;
use crate::series::TimeSeriesX;

fn default_amplitude() -> f64 {
    1.0
}

fn default_oversample() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClockModel {
    /// Nominal frequency ν₀, Hz.
    pub nu0: f64,
    /// Nominal phase φ₀, radians.
    #[serde(default)]
    pub phi0: f64,
    /// Constant fractional-frequency offset.
    #[serde(default)]
    pub frac_freq_offset: f64,
    /// Linear fractional-frequency drift, 1/s.
    #[serde(default)]
    pub drift: f64,
    #[serde(default)]
    pub noise: Vec<NoiseSpec>,
    /// Peak signal amplitude S₀. Carried for completeness only.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Integration sub-steps per output sample.
    #[serde(default = "default_oversample")]
    pub oversample: usize,
}

impl ClockModel {
    pub fn new(nu0: f64) -> Result<Self> {
        let clock = Self {
            nu0,
            phi0: 0.0,
            frac_freq_offset: 0.0,
            drift: 0.0,
            noise: Vec::new(),
            amplitude: 1.0,
            oversample: 1,
        };
        clock.validate()?;
        Ok(clock)
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.frac_freq_offset = offset;
        self
    }

    pub fn with_drift(mut self, drift: f64) -> Self {
        self.drift = drift;
        self
    }

    pub fn with_noise(mut self, spec: NoiseSpec) -> Self {
        self.noise.push(spec);
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.nu0.is_finite() && self.nu0 > 0.0, || {
            format!("nominal frequency must be positive, got {}", self.nu0)
        })?;
        ensure(self.phi0.is_finite(), || "nominal phase must be finite".into())?;
        ensure(self.frac_freq_offset.is_finite(), || "frequency offset must be finite".into())?;
        ensure(self.drift.is_finite(), || "drift must be finite".into())?;
        ensure(self.oversample >= 1, || "oversample factor must be at least 1".into())?;
        self.noise.iter().try_for_each(NoiseSpec::validate)
    }

    /// Instantaneous phase φ = φ₀ + 2πν₀·x for a time deviation `x`.
    pub fn phase_radians(&self, x: f64) -> f64 {
        self.phi0 + 2.0 * PI * self.nu0 * x
    }

    /// Instantaneous frequency ν = ν₀(1 + y).
    pub fn frequency(&self, y: f64) -> f64 {
        self.nu0 * (1.0 + y)
    }

    /// Deterministic part of x(t): ∫₀ᵗ (offset + drift·s) ds.
    pub fn deterministic_phase(&self, t: f64) -> f64 {
        self.frac_freq_offset * t + 0.5 * self.drift * t * t
    }
}

/// Samples the clock's time deviation at t_k = k·τ0, k = 0..count, with
/// x̄₀ = 0.
///
/// The offset and drift ramps are integrated in closed form. Each noise
/// component is synthesized on a grid of `tau0 / oversample` and decimated,
/// with its own stream derived from `seed` and the component's seed.
pub fn sample_clock(clock: &ClockModel, count: usize, tau0: f64, seed: u64) -> Result<TimeSeriesX> {
    clock.validate()?;
    ensure(count >= 2, || format!("clock sampling needs at least 2 samples, got {count}"))?;
    ensure(tau0.is_finite() && tau0 > 0.0, || format!("tau0 must be positive, got {tau0}"))?;

    let mut x: Vec<f64> = (0..count)
        .map(|k| clock.deterministic_phase(k as f64 * tau0))
        .collect();

    let step = clock.oversample;
    let fine_tau = tau0 / step as f64;
    let fine_count = (count - 1) * step + 1;
    for (i, spec) in clock.noise.iter().enumerate() {
        let component = NoiseSpec {
            seed: rng::derive_seed(rng::derive_seed(seed, i as u64), spec.seed),
            ..*spec
        };
        let noise = generate_phase_noise(&component, fine_count, fine_tau)?;
        for (xk, n) in x.iter_mut().zip(noise.samples().iter().step_by(step)) {
            *xk += n;
        }
    }
    TimeSeriesX::new(tau0, x)
}

/// Mode-locked laser frequency comb.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombParams {
    /// Repetition rate f_r, Hz.
    pub f_r: f64,
    /// Carrier-envelope offset frequency f_0, Hz, in [0, f_r).
    pub f_0: f64,
    /// Pulse duration T₀, s.
    pub t0: f64,
    /// Lowest valid mode index.
    pub n_min: u64,
    /// Highest valid mode index.
    pub n_max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombTiming {
    /// Pulse-to-pulse period T_r = 1/f_r, s.
    pub period: f64,
    /// Pulse-to-pulse carrier-envelope phase slip Δφ_ceo = 2πf_0/f_r, rad.
    pub ceo_phase_slip: f64,
}

impl CombParams {
    pub fn new(f_r: f64, f_0: f64, t0: f64, n_min: u64, n_max: u64) -> Result<Self> {
        let comb = Self { f_r, f_0, t0, n_min, n_max };
        comb.validate()?;
        Ok(comb)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.f_r.is_finite() && self.f_r > 0.0, || {
            format!("repetition rate must be positive, got {}", self.f_r)
        })?;
        ensure(self.f_0 >= 0.0 && self.f_0 < self.f_r, || {
            format!("offset frequency must lie in [0, f_r), got {}", self.f_0)
        })?;
        ensure(self.t0.is_finite() && self.t0 > 0.0, || {
            format!("pulse duration must be positive, got {}", self.t0)
        })?;
        ensure(self.n_min <= self.n_max, || "empty mode index range".into())
    }

    /// Advisory note when f_r lies outside the usual 10 MHz – 1 GHz range.
    pub fn advisory(&self) -> Option<String> {
        (!(1e7..=1e9).contains(&self.f_r)).then(|| {
            format!(
                "repetition rate {} Hz is outside the typical 10 MHz - 1 GHz range",
                self.f_r
            )
        })
    }
}

/// ν_N = N·f_r + f_0.
pub fn comb_mode_freq(comb: &CombParams, n: u64) -> Result<f64> {
    if n < comb.n_min || n > comb.n_max {
        return Err(invalid(format!(
            "mode index {n} outside [{}, {}]",
            comb.n_min, comb.n_max
        )));
    }
    Ok(n as f64 * comb.f_r + comb.f_0)
}

pub fn comb_time_params(comb: &CombParams) -> CombTiming {
    CombTiming {
        period: 1.0 / comb.f_r,
        ceo_phase_slip: 2.0 * PI * comb.f_0 / comb.f_r,
    }
}

/// Pulse emission times k·T_r plus the phase deviation of an optional
/// jitter process sampled at T_r.
pub fn pulse_train_times(
    comb: &CombParams,
    count: usize,
    jitter: Option<&NoiseSpec>,
    seed: u64,
) -> Result<Vec<f64>> {
    comb.validate()?;
    ensure(count >= 1, || "pulse train needs at least one pulse".into())?;
    let period = comb_time_params(comb).period;
    let mut times: Vec<f64> = (0..count).map(|k| k as f64 * period).collect();
    if let Some(spec) = jitter {
        let spec = NoiseSpec { seed: rng::derive_seed(seed, spec.seed), ..*spec };
        let x = generate_phase_noise(&spec, count.max(2), period)?;
        for (t, dx) in times.iter_mut().zip(x.samples()) {
            *t += dx;
        }
    }
    Ok(times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noisegen::NoiseKind;
    use crate::stability::{tdev, y_from_x};

    #[test]
    fn noiseless_clock_is_flat() {
        let c = ClockModel::new(1e9).unwrap();
        let x = sample_clock(&c, 16, 1.0, 0).unwrap();
        assert!(x.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn offset_ramp() {
        let c = ClockModel::new(1e9).unwrap().with_offset(1e-9);
        let x = sample_clock(&c, 4, 1.0, 0).unwrap();
        for (k, v) in x.samples().iter().enumerate() {
            assert!((v - 1e-9 * k as f64).abs() < 1e-24);
        }
        let y = y_from_x(&x).unwrap();
        assert!(y.samples().iter().all(|&v| (v - 1e-9).abs() < 1e-24));
    }

    #[test]
    fn drift_is_quadratic() {
        let d = 1e-6;
        let tau0 = 0.5;
        let c = ClockModel::new(1e9).unwrap().with_drift(d);
        let x = sample_clock(&c, 100, tau0, 0).unwrap();
        for (k, v) in x.samples().iter().enumerate() {
            let t = k as f64 * tau0;
            assert!((v - d * t * t / 2.0).abs() <= d * tau0 * tau0);
        }
    }

    #[test]
    fn offset_is_invisible_to_tdev() {
        let c = ClockModel::new(1e9).unwrap().with_offset(3e-10);
        let x = sample_clock(&c, 200, 1.0, 0).unwrap();
        let y = y_from_x(&x).unwrap();
        for m in 1..=20 {
            let t = tdev(&y, m).unwrap();
            assert!(t < 1e-12 * 3e-10, "m={m} tdev={t:e}");
        }
    }

    #[test]
    fn sampling_is_deterministic_and_validated() {
        let c = ClockModel::new(1e9)
            .unwrap()
            .with_noise(NoiseSpec::new(NoiseKind::FlickerFm, 1e-24, 1))
            .with_noise(NoiseSpec::new(NoiseKind::WhitePm, 1e-20, 2));
        let a = sample_clock(&c, 512, 1.0, 9).unwrap();
        assert_eq!(a, sample_clock(&c, 512, 1.0, 9).unwrap());
        assert_ne!(a, sample_clock(&c, 512, 1.0, 10).unwrap());
        assert!(sample_clock(&c, 1, 1.0, 9).is_err());
        assert!(ClockModel::new(0.0).is_err());
    }

    #[test]
    fn oversampled_noise_keeps_amplitude_convention() {
        let mut c = ClockModel::new(1e9)
            .unwrap()
            .with_noise(NoiseSpec::white_fm_with_rms(1e-12, 1.0, 4));
        c.oversample = 4;
        let x = sample_clock(&c, 1 << 14, 1.0, 1).unwrap();
        let y = y_from_x(&x).unwrap();
        // Averaging four sub-steps of white FM keeps S_y, so the 1 s samples
        // have standard deviation 1e-12 · √(1/1) (PSD is rate-independent).
        let n = y.len() as f64;
        let rms = (y.samples().iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        assert!((rms / 1e-12 - 1.0).abs() < 0.05, "{rms}");
    }

    #[test]
    fn comb_frequencies() {
        let comb = CombParams::new(100e6, 20e6, 1e-13, 1, 3_000_000).unwrap();
        let nu = comb_mode_freq(&comb, 1_920_000).unwrap();
        assert_eq!(nu, 192.00002e12);
        let a = comb_mode_freq(&comb, 1000).unwrap();
        let b = comb_mode_freq(&comb, 1001).unwrap();
        assert_eq!(b - a, comb.f_r);
        assert!(comb_mode_freq(&comb, 0).is_err());
        assert!(comb_mode_freq(&comb, 3_000_001).is_err());

        let zero = CombParams::new(250e6, 0.0, 1e-13, 1, 10).unwrap();
        assert_eq!(comb_mode_freq(&zero, 7).unwrap(), 7.0 * 250e6);
    }

    #[test]
    fn comb_timing() {
        let comb = CombParams::new(25e6, 0.0, 1e-13, 0, 1).unwrap();
        let t = comb_time_params(&comb);
        assert!((t.period - 40e-9).abs() < 1e-22);
        assert_eq!(t.ceo_phase_slip, 0.0);
        let quarter = CombParams::new(100e6, 25e6, 1e-13, 0, 1).unwrap();
        assert!((comb_time_params(&quarter).ceo_phase_slip - PI / 2.0).abs() < 1e-15);
        assert!(CombParams::new(100e6, 100e6, 1e-13, 0, 1).is_err());
        assert!(CombParams::new(100e6, 0.0, 1e-13, 2, 1).is_err());
        assert!(comb.advisory().is_none());
        assert!(CombParams::new(5e9, 0.0, 1e-13, 0, 1).unwrap().advisory().is_some());
    }

    #[test]
    fn pulse_train() {
        let comb = CombParams::new(100e6, 0.0, 1e-13, 0, 1).unwrap();
        let t = pulse_train_times(&comb, 3, None, 0).unwrap();
        assert_eq!(t, vec![0.0, 10e-9, 20e-9]);
        let zero = NoiseSpec::new(NoiseKind::WhitePm, 0.0, 1);
        assert_eq!(pulse_train_times(&comb, 3, Some(&zero), 5).unwrap(), t);

        let sigma = 1e-15;
        let spec = NoiseSpec::white_pm_with_rms(sigma, 10e-9, 3);
        let n = 10_000;
        let times = pulse_train_times(&comb, n, Some(&spec), 8).unwrap();
        let dev: Vec<f64> = times.iter().enumerate().map(|(k, t)| t - k as f64 * 10e-9).collect();
        let mean = dev.iter().sum::<f64>() / n as f64;
        let sd = (dev.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((sd / sigma - 1.0).abs() < 0.1, "{sd}");
        assert!(pulse_train_times(&comb, 0, None, 0).is_err());
    }
}
