//! Power-law clock noise synthesis.
//!
//! Each [`NoiseKind`] has a one-sided fractional-frequency spectrum
//! `S_y(f) = h · f^β` with β ∈ {+2, +1, 0, −1, −2}. The `amplitude` of a
//! [`NoiseSpec`] is `h`, the value of `S_y` at 1 Hz.
//!
//! Phase-modulation kinds are synthesized as phase data x̄ with
//! `S_x(f) = S_y(f) / (2πf)²` and differenced to ȳ; frequency-modulation
//! kinds are synthesized directly as ȳ. Coloured kinds pass white Gaussian
//! innovations through the fractional-difference filter of
//! [`fractional_filter_coeffs`], with an equal-length burn-in discarded.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::fit::log_log_slope;
use crate::rng;
use crate::series::{TimeSeriesX, TimeSeriesY};
use crate::stability::y_from_x;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    WhitePm,
    FlickerPm,
    WhiteFm,
    FlickerFm,
    RandomWalkFm,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 5] = [
        NoiseKind::WhitePm,
        NoiseKind::FlickerPm,
        NoiseKind::WhiteFm,
        NoiseKind::FlickerFm,
        NoiseKind::RandomWalkFm,
    ];

    /// Exponent β of the fractional-frequency PSD, `S_y ∝ f^β`.
    pub fn psd_exponent(self) -> i32 {
        match self {
            NoiseKind::WhitePm => 2,
            NoiseKind::FlickerPm => 1,
            NoiseKind::WhiteFm => 0,
            NoiseKind::FlickerFm => -1,
            NoiseKind::RandomWalkFm => -2,
        }
    }

    pub fn is_phase_modulation(self) -> bool {
        matches!(self, NoiseKind::WhitePm | NoiseKind::FlickerPm)
    }

    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::WhitePm => "white PM",
            NoiseKind::FlickerPm => "flicker PM",
            NoiseKind::WhiteFm => "white FM",
            NoiseKind::FlickerFm => "flicker FM",
            NoiseKind::RandomWalkFm => "random-walk FM",
        }
    }
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One power-law noise component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// `S_y` coefficient at 1 Hz, 1/Hz.
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, amplitude: f64, seed: u64) -> Self {
        Self { kind, amplitude, seed }
    }

    /// White PM whose phase samples have standard deviation `rms` seconds
    /// when sampled at `tau0`.
    pub fn white_pm_with_rms(rms: f64, tau0: f64, seed: u64) -> Self {
        Self::new(NoiseKind::WhitePm, 8.0 * PI * PI * tau0 * rms * rms, seed)
    }

    /// White FM whose ȳ samples have standard deviation `rms` at `tau0`.
    pub fn white_fm_with_rms(rms: f64, tau0: f64, seed: u64) -> Self {
        Self::new(NoiseKind::WhiteFm, 2.0 * tau0 * rms * rms, seed)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.amplitude.is_finite() && self.amplitude >= 0.0, || {
            format!("noise amplitude must be finite and non-negative, got {}", self.amplitude)
        })
    }
}

/// Impulse response of the fractional-difference filter `(1 − z⁻¹)^(−|β|/2)`:
/// `h₀ = 1`, `h_k = h_{k−1}·(k − 1 + |β|/2)/k`.
pub fn fractional_filter_coeffs(beta_exponent: f64, count: usize) -> Result<Vec<f64>> {
    ensure(count >= 1, || "filter length must be at least 1".into())?;
    ensure(beta_exponent.is_finite(), || "filter exponent must be finite".into())?;
    let half = beta_exponent.abs() / 2.0;
    let mut h = Vec::with_capacity(count);
    h.push(1.0);
    for k in 1..count {
        let prev = h[k - 1];
        h.push(prev * ((k - 1) as f64 + half) / k as f64);
    }
    Ok(h)
}

/// Synthesizes `count` fractional-frequency samples at period `tau0`.
pub fn generate_noise(spec: &NoiseSpec, count: usize, tau0: f64) -> Result<TimeSeriesY> {
    check_args(spec, count, tau0)?;
    if spec.kind.is_phase_modulation() {
        let x = generate_phase_noise(spec, count + 1, tau0)?;
        y_from_x(&x)
    } else {
        let samples = synthesize(spec, count, tau0, spec.kind.psd_exponent() as f64, 1.0);
        TimeSeriesY::new(tau0, samples)
    }
}

/// Synthesizes `count` phase samples (seconds) at period `tau0`.
///
/// PM kinds are drawn directly in the phase domain. FM kinds are drawn as ȳ
/// and integrated, starting from x̄₀ = 0.
pub fn generate_phase_noise(spec: &NoiseSpec, count: usize, tau0: f64) -> Result<TimeSeriesX> {
    check_args(spec, count, tau0)?;
    let samples = if spec.kind.is_phase_modulation() {
        // S_x = S_y / (2πf)², so the phase-domain exponent is β − 2.
        let beta_x = (spec.kind.psd_exponent() - 2) as f64;
        synthesize(spec, count, tau0, beta_x, 1.0 / (4.0 * PI * PI))
    } else {
        let y = synthesize(spec, count - 1, tau0, spec.kind.psd_exponent() as f64, 1.0);
        let mut x = Vec::with_capacity(count);
        let mut acc = 0.0;
        x.push(acc);
        for v in y {
            acc += v * tau0;
            x.push(acc);
        }
        x
    };
    TimeSeriesX::new(tau0, samples)
}

fn check_args(spec: &NoiseSpec, count: usize, tau0: f64) -> Result<()> {
    spec.validate()?;
    ensure(count >= 2, || format!("noise series needs at least 2 samples, got {count}"))?;
    ensure(tau0.is_finite() && tau0 > 0.0, || format!("tau0 must be positive, got {tau0}"))
}

/// `count` samples of a process with one-sided PSD `coeff·h·f^beta`, beta ≤ 0.
fn synthesize(spec: &NoiseSpec, count: usize, tau0: f64, beta: f64, coeff: f64) -> Vec<f64> {
    if spec.amplitude == 0.0 || count == 0 {
        return vec![0.0; count];
    }
    let alpha = -beta;
    // Innovation variance giving S(f) → coeff·h·f^(−α) at low frequency for the
    // discrete filter 2τ0·Q / (2 sin(πfτ0))^α.
    let level = coeff * spec.amplitude;
    let q = level * (2.0 * PI * tau0).powf(alpha) / (2.0 * tau0);
    let sigma = q.sqrt();
    let mut rng = rng::seeded(spec.seed);

    if alpha == 0.0 {
        return (0..count)
            .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
    }

    let total = 2 * count;
    let white: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
    let h = fractional_filter_coeffs(beta, total).expect("total >= 2");
    let filtered = causal_convolve(&white, &h);
    filtered[count..].iter().map(|v| v * sigma).collect()
}

/// First `signal.len()` outputs of the causal convolution `signal * kernel`.
fn causal_convolve(signal: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = signal.len();
    let size = (signal.len() + kernel.len()).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    let pad = |v: &[f64]| {
        let mut buf = vec![Complex64::new(0.0, 0.0); size];
        for (b, &x) in buf.iter_mut().zip(v) {
            b.re = x;
        }
        buf
    };
    let mut a = pad(signal);
    let mut b = pad(kernel);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    inv.process(&mut a);
    let scale = 1.0 / size as f64;
    a[..n].iter().map(|c| c.re * scale).collect()
}

/// One-sided PSD estimate: Welch average of Hann-windowed, mean-removed
/// segments. Default segmentation uses eight segments (or one when the series
/// is shorter than 128 samples).
pub fn psd_estimate(series: &TimeSeriesY) -> Result<Vec<(f64, f64)>> {
    let segments = if series.len() >= 128 { 8 } else { 1 };
    psd_estimate_segments(series, segments)
}

/// As [`psd_estimate`] with an explicit number of non-overlapping segments.
///
/// Returns `(frequency Hz, density 1/Hz)` for bins 1..=L/2 of a segment of
/// length L. The density integrates (rectangle rule, Δf = 1/(Lτ0)) to the
/// windowed mean-square of the segments, approximately the series variance.
pub fn psd_estimate_segments(series: &TimeSeriesY, segments: usize) -> Result<Vec<(f64, f64)>> {
    ensure(series.len() >= 16, || {
        format!("PSD estimate needs at least 16 samples, got {}", series.len())
    })?;
    ensure(segments >= 1, || "segment count must be positive".into())?;
    let seg_len = series.len() / segments;
    ensure(seg_len >= 16, || {
        format!("segments of {seg_len} samples are too short (need 16)")
    })?;

    let tau0 = series.tau0();
    let window: Vec<f64> = (0..seg_len)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / seg_len as f64).cos())
        .collect();
    let window_power: f64 = window.iter().map(|w| w * w).sum();

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(seg_len);
    let bins = seg_len / 2;
    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); seg_len];
    for seg in series.samples().chunks_exact(seg_len).take(segments) {
        let mean = seg.iter().sum::<f64>() / seg_len as f64;
        for ((b, &v), &w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex64::new((v - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (k, a) in acc.iter_mut().enumerate() {
            *a += buf[k + 1].norm_sqr();
        }
    }

    let df = 1.0 / (seg_len as f64 * tau0);
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(i, power)| {
            let k = i + 1;
            // Nyquist bin (even lengths) has no mirror image.
            let sides = if 2 * k == seg_len { 1.0 } else { 2.0 };
            let density = sides * tau0 * power / (window_power * segments as f64);
            (k as f64 * df, density)
        })
        .collect())
}

/// Log-log slope of a PSD estimate over the decade centred (geometrically)
/// between its lowest and highest frequency.
pub fn psd_slope_central_decade(psd: &[(f64, f64)]) -> Result<f64> {
    let (lo, hi) = match (psd.first(), psd.last()) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => return Err(Error::InsufficientData("empty PSD".into())),
    };
    let centre = (lo * hi).sqrt();
    let (f_lo, f_hi) = (centre / 10f64.sqrt(), centre * 10f64.sqrt());
    log_log_slope(
        psd.iter()
            .copied()
            .filter(|&(f, _)| f >= f_lo && f <= f_hi),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_recursion(beta: f64, count: usize) -> Vec<f64> {
        let mut out = vec![1.0];
        for k in 1..count {
            let prev: f64 = out[k - 1];
            out.push(prev * ((k as f64 - 1.0) + beta.abs() / 2.0) / k as f64);
        }
        out
    }

    #[test]
    fn filter_coefficient_examples() {
        assert_eq!(fractional_filter_coeffs(0.0, 5).unwrap(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(fractional_filter_coeffs(-2.0, 4).unwrap(), vec![1.0; 4]);
        assert_eq!(fractional_filter_coeffs(-1.0, 3).unwrap(), vec![1.0, 0.5, 0.375]);
        assert_eq!(fractional_filter_coeffs(-1.0, 40).unwrap(), direct_recursion(-1.0, 40));
        assert_eq!(fractional_filter_coeffs(-1.0, 1).unwrap(), vec![1.0]);
        assert!(fractional_filter_coeffs(-1.0, 0).is_err());
    }

    #[test]
    fn zero_amplitude_is_identically_zero() {
        for kind in NoiseKind::ALL {
            let s = generate_noise(&NoiseSpec::new(kind, 0.0, 3), 1024, 1.0).unwrap();
            assert_eq!(s.len(), 1024);
            assert!(s.samples().iter().all(|&v| v == 0.0), "{kind}");
        }
    }

    #[test]
    fn argument_validation() {
        let spec = NoiseSpec::new(NoiseKind::WhiteFm, 1.0, 0);
        assert!(matches!(generate_noise(&spec, 1, 1.0), Err(Error::InvalidArgument(_))));
        let bad = NoiseSpec::new(NoiseKind::WhiteFm, f64::NAN, 0);
        assert!(matches!(generate_noise(&bad, 16, 1.0), Err(Error::InvalidArgument(_))));
        let neg = NoiseSpec::new(NoiseKind::WhiteFm, -1.0, 0);
        assert!(generate_noise(&neg, 16, 1.0).is_err());
        assert!(generate_noise(&spec, 16, 0.0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        for kind in NoiseKind::ALL {
            let spec = NoiseSpec::new(kind, 1e-22, 42);
            let a = generate_noise(&spec, 4096, 0.5).unwrap();
            let b = generate_noise(&spec, 4096, 0.5).unwrap();
            assert_eq!(a, b);
            let c = generate_noise(&NoiseSpec { seed: 43, ..spec }, 4096, 0.5).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn white_fm_variance_matches_amplitude() {
        // Variance of white FM with one-sided PSD h sampled at τ0 is h/(2τ0).
        let spec = NoiseSpec::new(NoiseKind::WhiteFm, 2.0, 11);
        let s = generate_noise(&spec, 1 << 16, 0.25).unwrap();
        let n = s.len() as f64;
        let var = s.samples().iter().map(|v| v * v).sum::<f64>() / n;
        assert!((var / 4.0 - 1.0).abs() < 0.03, "var = {var}");
    }

    #[test]
    fn white_pm_rms_helper() {
        let spec = NoiseSpec::white_pm_with_rms(1e-12, 0.1, 5);
        let x = generate_phase_noise(&spec, 1 << 15, 0.1).unwrap();
        let n = x.len() as f64;
        let rms = (x.samples().iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        assert!((rms / 1e-12 - 1.0).abs() < 0.02, "rms = {rms}");
    }

    #[test]
    fn white_kinds_are_stationary() {
        for kind in [NoiseKind::WhitePm, NoiseKind::WhiteFm] {
            let s = generate_noise(&NoiseSpec::new(kind, 1.0, 8), 1 << 14, 1.0).unwrap();
            let (a, b) = s.samples().split_at(s.len() / 2);
            let var = |v: &[f64]| {
                let m = v.iter().sum::<f64>() / v.len() as f64;
                v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
            };
            let (va, vb) = (var(a), var(b));
            // Standard error of a sample variance ≈ v·√(2/(n−1)); the PM
            // difference series is MA(1), so allow for its doubled error.
            let se = va.max(vb) * (2.0 / (a.len() - 1) as f64).sqrt() * 2.0;
            assert!((va - vb).abs() < 3.0 * se, "{kind}: {va} vs {vb}");
        }
    }

    #[test]
    fn psd_of_zero_series_is_zero() {
        let s = TimeSeriesY::new(1.0, vec![0.0; 256]).unwrap();
        let psd = psd_estimate(&s).unwrap();
        assert_eq!(psd.len(), 16);
        assert!(psd.iter().all(|&(_, p)| p == 0.0));
    }

    #[test]
    fn psd_rejects_short_series() {
        let s = TimeSeriesY::new(1.0, vec![0.0; 15]).unwrap();
        assert!(matches!(psd_estimate(&s), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn psd_parseval() {
        let spec = NoiseSpec::new(NoiseKind::WhiteFm, 1.0, 21);
        let s = generate_noise(&spec, 1 << 14, 0.5).unwrap();
        let psd = psd_estimate(&s).unwrap();
        let df = psd[0].0;
        let integral: f64 = psd.iter().map(|&(_, p)| p * df).sum();
        let n = s.len() as f64;
        let mean = s.samples().iter().sum::<f64>() / n;
        let var = s.samples().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!((integral / var - 1.0).abs() < 0.05, "{integral} vs {var}");
    }
}
