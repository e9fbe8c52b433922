//! Squeezed-light algebra and timing-precision scaling laws.
//!
//! Quadrature variances are normalized so that vacuum (and the standard
//! quantum limit) is 1. Squeezing levels in dB always refer to the variance
//! ratio: `dB = 10·log₁₀(e^{2r})`.
//!
//! The four timing laws are proportionalities with the constant set to 1:
//!
//! | method                  | σ_Δt                              |
//! |-------------------------|-----------------------------------|
//! | time of flight          | T₀/√n                             |
//! | carrier phase           | 1/(ν₀√n)                          |
//! | temporal modes          | 1/√(n((1/T₀)² + ν₀²))             |
//! | squeezed temporal modes | e^{−r}/√(n((1/T₀)² + ν₀²))        |
//!
//! Only ratios and fitted exponents of these values are physically
//! meaningful.

use std::f64::consts::LN_10;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, invalid, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    pub fn orthogonal(self) -> Self {
        match self {
            Quadrature::X => Quadrature::P,
            Quadrature::P => Quadrature::X,
        }
    }
}

/// Pure single-mode squeezed vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedState {
    r: f64,
    quadrature: Quadrature,
}

impl SqueezedState {
    pub fn new(r: f64, quadrature: Quadrature) -> Result<Self> {
        ensure(r.is_finite() && r >= 0.0, || {
            format!("squeezing parameter must be finite and non-negative, got {r}")
        })?;
        Ok(Self { r, quadrature })
    }

    pub fn from_db(db: f64, quadrature: Quadrature) -> Result<Self> {
        Self::new(r_from_db(db)?, quadrature)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn squeezed_quadrature(&self) -> Quadrature {
        self.quadrature
    }

    pub fn variance_squeezed(&self) -> f64 {
        (-2.0 * self.r).exp()
    }

    pub fn variance_antisqueezed(&self) -> f64 {
        (2.0 * self.r).exp()
    }

    /// Variance of quadrature `q`.
    pub fn variance(&self, q: Quadrature) -> f64 {
        if q == self.quadrature {
            self.variance_squeezed()
        } else {
            self.variance_antisqueezed()
        }
    }

    /// Mean photon number sinh²(r).
    pub fn mean_photons(&self) -> f64 {
        self.r.sinh().powi(2)
    }

    pub fn variances(&self) -> QuadratureVariances {
        QuadratureVariances {
            squeezed: self.variance_squeezed(),
            antisqueezed: self.variance_antisqueezed(),
            mixed: false,
        }
    }
}

/// Variance pair of a (possibly mixed) Gaussian state, SQL-normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureVariances {
    pub squeezed: f64,
    pub antisqueezed: f64,
    /// Set once loss has been applied; the product of the variances then
    /// exceeds 1.
    pub mixed: bool,
}

impl QuadratureVariances {
    /// Beam-splitter loss with transmissivity `eta`: V → ηV + (1 − η).
    pub fn attenuate(self, eta: f64) -> Result<Self> {
        self.attenuate_with_excess(eta, 0.0)
    }

    /// Loss followed by additive excess noise `excess` (≥ 0) on both
    /// quadratures.
    pub fn attenuate_with_excess(self, eta: f64, excess: f64) -> Result<Self> {
        check_efficiency(eta)?;
        ensure(excess.is_finite() && excess >= 0.0, || {
            format!("excess noise must be non-negative, got {excess}")
        })?;
        let map = |v: f64| eta * v + (1.0 - eta) + excess;
        Ok(Self {
            squeezed: map(self.squeezed),
            antisqueezed: map(self.antisqueezed),
            mixed: self.mixed || eta < 1.0 || excess > 0.0,
        })
    }

    /// Squeezing of the low-noise quadrature below vacuum, in dB.
    pub fn squeezing_db(&self) -> f64 {
        -10.0 * self.squeezed.log10()
    }
}

fn check_efficiency(eta: f64) -> Result<()> {
    ensure((0.0..=1.0).contains(&eta), || {
        format!("efficiency must lie in [0, 1], got {eta}")
    })
}

/// Transmits `state` through a channel of efficiency `eta`.
pub fn apply_loss(state: &SqueezedState, eta: f64) -> Result<QuadratureVariances> {
    state.variances().attenuate(eta)
}

/// Variance-ratio squeezing in dB for parameter `r`.
pub fn db_from_r(r: f64) -> Result<f64> {
    ensure(r.is_finite() && r >= 0.0, || format!("r must be non-negative, got {r}"))?;
    Ok(20.0 * r / LN_10)
}

pub fn r_from_db(db: f64) -> Result<f64> {
    ensure(db.is_finite() && db >= 0.0, || format!("dB must be non-negative, got {db}"))?;
    Ok(db * LN_10 / 20.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SqueezingRequirement {
    Attainable { db: f64 },
    /// The vacuum admixture 1 − η alone exceeds the target variance.
    Unattainable,
}

impl SqueezingRequirement {
    pub fn db(&self) -> Option<f64> {
        match *self {
            SqueezingRequirement::Attainable { db } => Some(db),
            SqueezingRequirement::Unattainable => None,
        }
    }
}

/// Smallest squeezing (dB) for which the loss-degraded standard deviation
/// `√(ηe^{−2r} + 1 − η)` is at most `1/advantage`.
pub fn required_squeezing(eta_total: f64, advantage: f64) -> Result<SqueezingRequirement> {
    ensure(eta_total > 0.0 && eta_total <= 1.0, || {
        format!("total efficiency must lie in (0, 1], got {eta_total}")
    })?;
    ensure(advantage.is_finite() && advantage > 1.0, || {
        format!("advantage factor must exceed 1, got {advantage}")
    })?;
    let target = 1.0 / (advantage * advantage);
    let headroom = target - (1.0 - eta_total);
    if headroom <= 0.0 {
        return Ok(SqueezingRequirement::Unattainable);
    }
    // η·e^{−2r} ≤ headroom  ⇔  e^{2r} ≥ η/headroom
    Ok(SqueezingRequirement::Attainable {
        db: 10.0 * (eta_total / headroom).log10(),
    })
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure(v.is_finite() && v > 0.0, || format!("{name} must be positive, got {v}"))
}

/// Time-of-flight precision, T₀/√n.
pub fn sigma_tof(n: f64, t0: f64) -> Result<f64> {
    positive("photon number", n)?;
    positive("pulse duration", t0)?;
    Ok(t0 / n.sqrt())
}

/// Carrier-phase precision, 1/(ν₀√n).
pub fn sigma_phase(n: f64, nu0: f64) -> Result<f64> {
    positive("photon number", n)?;
    positive("carrier frequency", nu0)?;
    Ok(1.0 / (nu0 * n.sqrt()))
}

/// Temporal-mode precision, 1/√(n((1/T₀)² + ν₀²)).
pub fn sigma_tm(n: f64, t0: f64, nu0: f64) -> Result<f64> {
    positive("photon number", n)?;
    positive("pulse duration", t0)?;
    positive("carrier frequency", nu0)?;
    Ok(1.0 / (n * (t0.powi(-2) + nu0 * nu0)).sqrt())
}

/// Squeezed temporal-mode precision, e^{−r}·[`sigma_tm`].
pub fn sigma_tm_squeezed(n: f64, t0: f64, nu0: f64, r: f64) -> Result<f64> {
    ensure(r.is_finite() && r >= 0.0, || format!("r must be non-negative, got {r}"))?;
    Ok((-r).exp() * sigma_tm(n, t0, nu0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Tof,
    Phase,
    TemporalMode,
}

/// Timing estimator: measurement method plus its resources.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorModel {
    pub method: Method,
    /// Photons per measurement window.
    pub n: f64,
    /// Carrier frequency ν₀, Hz.
    pub nu0: f64,
    /// Pulse duration T₀, s.
    pub t0: f64,
    /// Squeezing parameter; non-zero only for temporal modes.
    #[serde(default)]
    pub r: f64,
}

impl EstimatorModel {
    pub fn validate(&self) -> Result<()> {
        positive("photon number", self.n)?;
        positive("carrier frequency", self.nu0)?;
        positive("pulse duration", self.t0)?;
        ensure(self.r.is_finite() && self.r >= 0.0, || {
            format!("r must be non-negative, got {}", self.r)
        })?;
        if self.r > 0.0 && self.method != Method::TemporalMode {
            return Err(invalid("squeezing is only modelled for temporal-mode estimation"));
        }
        Ok(())
    }

    /// Lossless σ_Δt from the applicable scaling law.
    pub fn sigma(&self) -> Result<f64> {
        self.validate()?;
        match self.method {
            Method::Tof => sigma_tof(self.n, self.t0),
            Method::Phase => sigma_phase(self.n, self.nu0),
            Method::TemporalMode => sigma_tm_squeezed(self.n, self.t0, self.nu0, self.r),
        }
    }

    /// σ_Δt when the signal crosses a channel of efficiency `eta`. `n` counts
    /// received photons, so only the squeezing degrades: the vacuum-normalized
    /// factor e^{−r} becomes √(ηe^{−2r} + 1 − η).
    pub fn sigma_through(&self, eta: f64) -> Result<f64> {
        check_efficiency(eta)?;
        let classical = EstimatorModel { r: 0.0, ..*self }.sigma()?;
        let state = SqueezedState::new(self.r, Quadrature::P)?;
        Ok(classical * apply_loss(&state, eta)?.squeezed.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub mean: f64,
    pub std: f64,
    pub trials: usize,
    /// Closed-form σ used to draw the estimates.
    pub sigma_model: f64,
}

/// Draws `trials` Gaussian offset estimates centred on zero with the model's
/// σ_Δt and returns their sample mean and standard deviation.
pub fn monte_carlo_sigma(model: &EstimatorModel, trials: usize, seed: u64) -> Result<MonteCarloSummary> {
    monte_carlo_sigma_with_offset(model, trials, seed, 0.0)
}

pub fn monte_carlo_sigma_with_offset(
    model: &EstimatorModel,
    trials: usize,
    seed: u64,
    true_offset: f64,
) -> Result<MonteCarloSummary> {
    ensure(trials >= 100, || format!("Monte Carlo needs at least 100 trials, got {trials}"))?;
    ensure(true_offset.is_finite(), || "true offset must be finite".into())?;
    let sigma = model.sigma()?;
    let estimates: Vec<f64> = (0..trials)
        .map(|i| {
            let z: f64 = rng::stream(seed, i as u64).sample(StandardNormal);
            true_offset + sigma * z
        })
        .collect();
    let (mean, std) = mean_std(&estimates);
    Ok(MonteCarloSummary { mean, std, trials, sigma_model: sigma })
}

pub(crate) fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// Pump, signal and idler of a down-conversion event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdcTriple {
    pub nu_p: f64,
    pub nu_s: f64,
    pub nu_i: f64,
    pub k_p: [f64; 3],
    pub k_s: [f64; 3],
    pub k_i: [f64; 3],
}

const SPDC_TOLERANCE: f64 = 1e-9;

impl SpdcTriple {
    /// Checks energy (ν_p = ν_s + ν_i) and momentum (k_p = k_s + k_i)
    /// conservation to 1e-9 relative.
    pub fn new(nu_p: f64, nu_s: f64, nu_i: f64, k_p: [f64; 3], k_s: [f64; 3], k_i: [f64; 3]) -> Result<Self> {
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= SPDC_TOLERANCE * scale.max(f64::MIN_POSITIVE);
        ensure(close(nu_p, nu_s + nu_i, nu_p.abs()), || {
            format!("energy not conserved: {nu_p} != {nu_s} + {nu_i}")
        })?;
        let k_scale = k_p.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for c in 0..3 {
            ensure(close(k_p[c], k_s[c] + k_i[c], k_scale), || {
                format!("momentum not conserved in component {c}")
            })?;
        }
        Ok(Self { nu_p, nu_s, nu_i, k_p, k_s, k_i })
    }
}

/// Degenerate down-conversion: signal and idler each carry half the pump
/// frequency and wavevector.
pub fn spdc_degenerate(nu_p: f64, k_p: [f64; 3]) -> Result<SpdcTriple> {
    positive("pump frequency", nu_p)?;
    ensure(k_p.iter().all(|v| v.is_finite()), || "pump wavevector must be finite".into())?;
    let half = k_p.map(|v| v / 2.0);
    SpdcTriple::new(nu_p, nu_p / 2.0, nu_p / 2.0, k_p, half, half)
}

/// EPR-type joint variances of two squeezed beams mixed on a 50:50 splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledVariances {
    /// Var[(X₁ + X₂)/√2].
    pub sum: f64,
    /// Var[(P₁ − P₂)/√2].
    pub difference: f64,
}

impl EntangledVariances {
    /// Both joint variances below vacuum.
    pub fn is_entangled(&self) -> bool {
        self.sum < 1.0 && self.difference < 1.0
    }
}

/// Mixes an X-squeezed beam `a` with a P-squeezed beam `b` on a 50:50 beam
/// splitter with outputs c₁ = (a + b)/√2, c₂ = (a − b)/√2.
///
/// The joint quadratures then reduce to the inputs' squeezed quadratures:
/// (X₁ + X₂)/√2 = X_a and (P₁ − P₂)/√2 = P_b.
pub fn entangle_pair(a: &SqueezedState, b: &SqueezedState) -> Result<EntangledVariances> {
    if a.squeezed_quadrature() == b.squeezed_quadrature() {
        return Err(invalid(
            "inputs must be squeezed in orthogonal quadratures (apply a π/2 phase shift to one arm)",
        ));
    }
    let (x_sq, p_sq) = if a.squeezed_quadrature() == Quadrature::X { (a, b) } else { (b, a) };
    Ok(EntangledVariances {
        sum: x_sq.variance(Quadrature::X),
        difference: p_sq.variance(Quadrature::P),
    })
}
