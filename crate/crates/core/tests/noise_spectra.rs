use std::f64::consts::PI;

use combsync_core::noisegen::{generate_noise, psd_estimate, psd_slope_central_decade};
use combsync_core::stability::{ffi1, octave_factors, stability_curve, fit_slope};
use combsync_core::{NoiseKind, NoiseSpec, TimeSeriesY, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[test]
fn psd_slopes_follow_the_power_law() {
    for kind in NoiseKind::ALL {
        let beta = kind.psd_exponent() as f64;
        let mut slopes = Vec::new();
        for seed in 0..4 {
            let y = generate_noise(&NoiseSpec::new(kind, 1e-20, seed), 1 << 16, 1.0).unwrap();
            slopes.push(psd_slope_central_decade(&psd_estimate(&y).unwrap()).unwrap());
        }
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        assert!((mean - beta).abs() < 0.3, "{kind}: slope {mean} vs {beta}");
    }
}

#[test]
fn psd_estimator_slopes_on_reference_processes() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let white: Vec<f64> = (0..1 << 15).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut walk = Vec::with_capacity(white.len());
    let mut acc = 0.0;
    for v in &white {
        acc += v;
        walk.push(acc);
    }
    let sw = psd_slope_central_decade(&psd_estimate(&TimeSeriesY::new(1.0, white).unwrap()).unwrap()).unwrap();
    let sr = psd_slope_central_decade(&psd_estimate(&TimeSeriesY::new(1.0, walk).unwrap()).unwrap()).unwrap();
    assert!(sw.abs() < 0.2, "white slope {sw}");
    assert!((sr + 2.0).abs() < 0.3, "random walk slope {sr}");
}

#[test]
fn white_fm_psd_level_equals_amplitude() {
    let h0 = 4e-22;
    let tau0 = 0.1;
    let y = generate_noise(&NoiseSpec::new(NoiseKind::WhiteFm, h0, 5), 1 << 16, tau0).unwrap();
    let psd = psd_estimate(&y).unwrap();
    let level = psd.iter().map(|p| p.1).sum::<f64>() / psd.len() as f64;
    assert!((level / h0 - 1.0).abs() < 0.05, "level {level}");
}

/// Textbook overlapping Allan variances for each power-law coefficient, with
/// the phase-noise cutoff at the Nyquist frequency.
fn allan_variance_reference(kind: NoiseKind, h: f64, tau: f64, tau0: f64) -> Option<f64> {
    let f_h = 0.5 / tau0;
    match kind {
        NoiseKind::WhitePm => Some(3.0 * f_h * h / (4.0 * PI * PI * tau * tau)),
        NoiseKind::FlickerPm => None,
        NoiseKind::WhiteFm => Some(h / (2.0 * tau)),
        NoiseKind::FlickerFm => Some(2.0 * 2f64.ln() * h),
        NoiseKind::RandomWalkFm => Some(2.0 * PI * PI * h * tau / 3.0),
    }
}

#[test]
fn amplitude_convention_matches_reference_allan_levels() {
    let tau0 = 1.0;
    let h = 1e-22;
    for kind in NoiseKind::ALL {
        for m in [4usize, 16] {
            let tau = m as f64 * tau0;
            let Some(want) = allan_variance_reference(kind, h, tau, tau0) else { continue };
            let mean_var: f64 = (0..8)
                .map(|seed| {
                    let y = generate_noise(&NoiseSpec::new(kind, h, seed), 1 << 15, tau0).unwrap();
                    ffi1(&y, m).unwrap().powi(2)
                })
                .sum::<f64>()
                / 8.0;
            assert!(
                (mean_var / want - 1.0).abs() < 0.15,
                "{kind} m={m}: {mean_var:e} vs {want:e}"
            );
        }
    }
}

#[test]
fn overlapping_slopes_for_frequency_noise() {
    for (kind, expect) in [(NoiseKind::WhiteFm, -0.5), (NoiseKind::RandomWalkFm, 0.5)] {
        let mut total = 0.0;
        for seed in 0..4 {
            let y = generate_noise(&NoiseSpec::new(kind, 1e-22, seed), 1 << 16, 1.0).unwrap();
            let ms: Vec<usize> = octave_factors(y.len(), Variant::Ffi1)
                .into_iter()
                .filter(|&m| (4..=2048).contains(&m))
                .collect();
            total += fit_slope(&stability_curve(&y, &ms, Variant::Ffi1).unwrap(), None).unwrap();
        }
        let slope = total / 4.0;
        assert!((slope - expect).abs() < 0.1, "{kind}: {slope}");
    }
}

#[test]
fn generation_is_reproducible_and_seed_sensitive() {
    for kind in NoiseKind::ALL {
        let a = generate_noise(&NoiseSpec::new(kind, 1.0, 3), 1000, 1.0).unwrap();
        let b = generate_noise(&NoiseSpec::new(kind, 1.0, 3), 1000, 1.0).unwrap();
        let c = generate_noise(&NoiseSpec::new(kind, 1.0, 4), 1000, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
