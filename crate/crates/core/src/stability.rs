//! Allan-family frequency-stability estimators and σ–τ analysis.
//!
//! Estimator naming follows the FFI convention:
//!
//! | variant | common name                  | τ      |
//! |---------|------------------------------|--------|
//! | FFI⁽⁰⁾  | Allan deviation              | τ0 (mτ0 on block averages) |
//! | FFI⁽¹⁾  | overlapping Allan deviation  | mτ0    |
//! | FFI⁽²⁾  | modified Allan deviation     | mτ0    |
//! | TDEV    | time deviation, (τ/√3)·FFI⁽²⁾ | mτ0  |
//!
//! An M-sample ȳ series corresponds to M+1 phase points. All index ranges are
//! derived from the length of the series actually passed in: FFI⁽¹⁾ has
//! M−2m+1 outer terms and FFI⁽²⁾ has M−3m+2.
//!
//! The estimators evaluate the inner sums `Σ (ȳ_{k+m} − ȳ_k)` as moving
//! window sums over first differences of ȳ. This is algebraically the
//! phase-domain second difference `(x̄_{k+2m} − 2x̄_{k+m} + x̄_k)/τ0`, costs
//! O(M) per m, and never forms the cumulative phase, so a large frequency
//! offset does not cost precision. With m = 1 the three estimators reduce to
//! the same sequence of floating-point operations and agree bitwise.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, invalid, Error, Result};
use crate::fit::log_log_slope;
use crate::noisegen::NoiseKind;
use crate::series::{TimeSeriesX, TimeSeriesY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "FFI0")]
    Ffi0,
    #[serde(rename = "FFI1")]
    Ffi1,
    #[serde(rename = "FFI2")]
    Ffi2,
    #[serde(rename = "TDEV")]
    Tdev,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Ffi0 => "FFI0",
            Variant::Ffi1 => "FFI1",
            Variant::Ffi2 => "FFI2",
            Variant::Tdev => "TDEV",
        }
    }

    /// Smallest ȳ length for which the estimator is defined at factor `m`.
    pub fn min_length(self, m: usize) -> usize {
        match self {
            Variant::Ffi0 | Variant::Ffi1 => 2 * m,
            Variant::Ffi2 | Variant::Tdev => (3 * m).saturating_sub(1).max(2),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "FFI0" => Ok(Variant::Ffi0),
            "FFI1" => Ok(Variant::Ffi1),
            "FFI2" => Ok(Variant::Ffi2),
            "TDEV" => Ok(Variant::Tdev),
            other => Err(Error::Malformed(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityPoint {
    /// Integration time m·τ0, seconds.
    pub tau: f64,
    /// Dimensionless for FFI variants, seconds for TDEV.
    pub value: f64,
    pub m: usize,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCurve {
    pub variant: Variant,
    /// Strictly increasing in τ.
    pub points: Vec<StabilityPoint>,
    /// Length M of the analysed ȳ series.
    pub source_length: usize,
    /// Averaging factors that were requested but skipped, with the reason.
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl StabilityCurve {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.tau)
    }
}

/// ȳ_k = (x̄_{k+1} − x̄_k)/τ0.
pub fn y_from_x(series: &TimeSeriesX) -> Result<TimeSeriesY> {
    let x = series.samples();
    ensure(x.len() >= 2, || {
        format!("need at least 2 phase samples, got {}", x.len())
    })?;
    let tau0 = series.tau0();
    TimeSeriesY::new(tau0, x.windows(2).map(|w| (w[1] - w[0]) / tau0).collect())
}

/// Cumulative inverse of [`y_from_x`]: x̄₀ = `x0`, x̄_{k+1} = x̄_k + ȳ_k·τ0.
///
/// The round trip `y_from_x(x_from_y(s))` reproduces `s` up to the rounding
/// of the final division (exactly whenever τ0 is a power of two).
pub fn x_from_y(series: &TimeSeriesY, x0: f64) -> Result<TimeSeriesX> {
    ensure(x0.is_finite(), || "initial phase must be finite".into())?;
    let tau0 = series.tau0();
    let mut x = Vec::with_capacity(series.len() + 1);
    let mut acc = x0;
    x.push(acc);
    for &y in series.samples() {
        acc += y * tau0;
        x.push(acc);
    }
    TimeSeriesX::new(tau0, x)
}

fn check_m(m: usize) -> Result<()> {
    ensure(m >= 1, || "averaging factor m must be at least 1".into())
}

fn need(len: usize, variant: Variant, m: usize) -> Result<()> {
    let min = variant.min_length(m);
    if len < min {
        return Err(Error::InsufficientData(format!(
            "{variant} at m = {m} needs at least {min} samples, got {len}"
        )));
    }
    Ok(())
}

/// `out[j] = Σ values[j..j+m]`. The running sum is re-seeded from scratch
/// every m steps, so rounding drift is bounded by m updates.
fn window_sums(values: &[f64], m: usize) -> Vec<f64> {
    debug_assert!(m >= 1 && values.len() >= m);
    let n = values.len() + 1 - m;
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    for j in 0..n {
        if j % m == 0 {
            acc = values[j..j + m].iter().sum();
        } else {
            acc += values[j + m - 1] - values[j - 1];
        }
        out.push(acc);
    }
    out
}

fn lagged_differences(y: &[f64], m: usize) -> Vec<f64> {
    y[m..].iter().zip(y).map(|(a, b)| a - b).collect()
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|d| d * d).sum()
}

fn deviation(sum_squares: f64, m_power: f64, terms: usize) -> f64 {
    (sum_squares / (2.0 * m_power * terms as f64)).sqrt()
}

/// FFI⁽⁰⁾: `[Σ (ȳ_{k+1} − ȳ_k)² / (2(M−1))]^½`.
pub fn ffi0(series: &TimeSeriesY) -> Result<f64> {
    let y = series.samples();
    need(y.len(), Variant::Ffi0, 1)?;
    let d = lagged_differences(y, 1);
    Ok(deviation(sum_sq(&d), 1.0, d.len()))
}

/// FFI⁽⁰⁾ at τ = mτ0: the non-overlapping Allan deviation of the averages
/// of consecutive blocks of m samples. Equals [`ffi0`] for m = 1.
pub fn ffi0_blocks(series: &TimeSeriesY, m: usize) -> Result<f64> {
    check_m(m)?;
    need(series.len(), Variant::Ffi0, m)?;
    if m == 1 {
        return ffi0(series);
    }
    let blocks: Vec<f64> = series
        .samples()
        .chunks_exact(m)
        .map(|c| c.iter().sum::<f64>() / m as f64)
        .collect();
    ffi0(&TimeSeriesY::new(series.tau0() * m as f64, blocks)?)
}

/// FFI⁽¹⁾ (overlapping Allan deviation) at τ = mτ0.
pub fn ffi1(series: &TimeSeriesY, m: usize) -> Result<f64> {
    check_m(m)?;
    let y = series.samples();
    need(y.len(), Variant::Ffi1, m)?;
    let s = window_sums(&lagged_differences(y, m), m);
    let mf = m as f64;
    Ok(deviation(sum_sq(&s), mf * mf, s.len()))
}

/// FFI⁽²⁾ (modified Allan deviation) at τ = mτ0.
pub fn ffi2(series: &TimeSeriesY, m: usize) -> Result<f64> {
    check_m(m)?;
    let y = series.samples();
    need(y.len(), Variant::Ffi2, m)?;
    let s = window_sums(&lagged_differences(y, m), m);
    let t = window_sums(&s, m);
    let mf = m as f64;
    Ok(deviation(sum_sq(&t), mf * mf * mf * mf, t.len()))
}

/// TDEV = (mτ0/√3)·FFI⁽²⁾, seconds.
pub fn tdev(series: &TimeSeriesY, m: usize) -> Result<f64> {
    let mdev = ffi2(series, m)?;
    Ok(tdev_from_ffi2(mdev, m as f64 * series.tau0()))
}

/// TDEV for a given FFI⁽²⁾ value at integration time `tau`.
pub fn tdev_from_ffi2(ffi2: f64, tau: f64) -> f64 {
    tau / 3f64.sqrt() * ffi2
}

/// Phase-domain FFI⁽¹⁾ from N phase points:
/// `[Σ (x̄_{k+2m} − 2x̄_{k+m} + x̄_k)² / (2m²τ0²(N−2m))]^½`.
pub fn ffi1_from_phase(series: &TimeSeriesX, m: usize) -> Result<f64> {
    check_m(m)?;
    let x = series.samples();
    need(x.len().saturating_sub(1), Variant::Ffi1, m)?;
    let d = second_differences(x, m);
    let mt = m as f64 * series.tau0();
    Ok(deviation(sum_sq(&d), mt * mt, d.len()))
}

/// Phase-domain FFI⁽²⁾ from N phase points (N−3m+1 outer terms).
pub fn ffi2_from_phase(series: &TimeSeriesX, m: usize) -> Result<f64> {
    check_m(m)?;
    let x = series.samples();
    need(x.len().saturating_sub(1), Variant::Ffi2, m)?;
    let t = window_sums(&second_differences(x, m), m);
    let mf = m as f64;
    let tau0 = series.tau0();
    Ok(deviation(sum_sq(&t), mf * mf * mf * mf * tau0 * tau0, t.len()))
}

fn second_differences(x: &[f64], m: usize) -> Vec<f64> {
    (0..x.len() - 2 * m)
        .map(|k| x[k + 2 * m] - 2.0 * x[k + m] + x[k])
        .collect()
}

/// Evaluates `variant` at a single averaging factor.
pub fn evaluate(series: &TimeSeriesY, m: usize, variant: Variant) -> Result<f64> {
    match variant {
        Variant::Ffi0 => ffi0_blocks(series, m),
        Variant::Ffi1 => ffi1(series, m),
        Variant::Ffi2 => ffi2(series, m),
        Variant::Tdev => tdev(series, m),
    }
}

/// Octave-spaced averaging factors 1, 2, 4, … valid for a series of `len`.
pub fn octave_factors(len: usize, variant: Variant) -> Vec<usize> {
    std::iter::successors(Some(1usize), |m| m.checked_mul(2))
        .take_while(|&m| variant.min_length(m) <= len)
        .collect()
}

/// Batch evaluation over `m_values`. Duplicates are dropped and points are
/// ordered by τ; factors that are too large for the series are skipped and
/// reported in `warnings`.
pub fn stability_curve(
    series: &TimeSeriesY,
    m_values: &[usize],
    variant: Variant,
) -> Result<StabilityCurve> {
    let ms: BTreeSet<usize> = m_values.iter().copied().collect();
    let mut points = Vec::with_capacity(ms.len());
    let mut warnings = Vec::new();
    for m in ms {
        match evaluate(series, m, variant) {
            Ok(value) => points.push(StabilityPoint {
                tau: m as f64 * series.tau0(),
                value,
                m,
                variant,
            }),
            Err(Error::InsufficientData(msg)) => warnings.push(format!("skipped m = {m}: {msg}")),
            Err(e) => return Err(e),
        }
    }
    Ok(StabilityCurve {
        variant,
        points,
        source_length: series.len(),
        warnings,
    })
}

/// Least-squares slope of log₁₀(value) vs log₁₀(τ), optionally restricted to
/// `tau_range` (inclusive).
pub fn fit_slope(curve: &StabilityCurve, tau_range: Option<(f64, f64)>) -> Result<f64> {
    let (lo, hi) = tau_range.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    log_log_slope(
        curve
            .points
            .iter()
            .filter(|p| p.tau >= lo && p.tau <= hi)
            .map(|p| (p.tau, p.value)),
    )
}

/// Slope coefficient α of FFI ∝ τ^α for each noise kind, per variant family.
pub fn slope_table(variant: Variant) -> [(NoiseKind, f64); 5] {
    let white_pm = match variant {
        Variant::Ffi0 | Variant::Ffi1 => -1.0,
        Variant::Ffi2 => -1.5,
        // TDEV = τ·FFI⁽²⁾/√3.
        Variant::Tdev => -0.5,
    };
    let shift = if variant == Variant::Tdev { 1.0 } else { 0.0 };
    [
        (NoiseKind::WhitePm, white_pm),
        (NoiseKind::FlickerPm, -1.0 + shift),
        (NoiseKind::WhiteFm, -0.5 + shift),
        (NoiseKind::FlickerFm, 0.0 + shift),
        (NoiseKind::RandomWalkFm, 0.5 + shift),
    ]
}

/// Half the smallest separation between distinct table rows.
pub const CLASSIFY_TOLERANCE: f64 = 0.25;

/// Noise kinds whose tabulated slope lies strictly within
/// [`CLASSIFY_TOLERANCE`] of `slope`. White and flicker PM share a slope
/// under FFI⁽⁰⁾/FFI⁽¹⁾ and are both returned there.
pub fn classify_noise(slope: f64, variant: Variant) -> BTreeSet<NoiseKind> {
    slope_table(variant)
        .into_iter()
        .filter(|&(_, alpha)| (slope - alpha).abs() < CLASSIFY_TOLERANCE)
        .map(|(kind, _)| kind)
        .collect()
}

/// Local slope below which white PM is taken to dominate an FFI⁽²⁾ curve.
pub const WHITE_PM_SLOPE_THRESHOLD: f64 = -1.25;

/// τ at which an FFI⁽²⁾ curve leaves the white-PM regime: the shared point of
/// the first pair of adjacent segments whose local slope rises from
/// ≤ −1.25 to > −1.25. `None` if there is no such transition.
pub fn max_trusted_tau(curve: &StabilityCurve) -> Result<Option<f64>> {
    if curve.variant != Variant::Ffi2 {
        return Err(invalid(format!(
            "maximum trusted τ is defined on FFI2 curves, got {}",
            curve.variant
        )));
    }
    let local: Vec<Option<f64>> = curve
        .points
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            (a.value > 0.0 && b.value > 0.0)
                .then(|| (b.value / a.value).log10() / (b.tau / a.tau).log10())
        })
        .collect();
    for (i, pair) in local.windows(2).enumerate() {
        if let (Some(before), Some(after)) = (pair[0], pair[1]) {
            if before <= WHITE_PM_SLOPE_THRESHOLD && after > WHITE_PM_SLOPE_THRESHOLD {
                return Ok(Some(curve.points[i + 1].tau));
            }
        }
    }
    Ok(None)
}

pub const CURVE_CSV_HEADER: &str = "tau_s,value,m,variant";

/// Writes `tau_s,value,m,variant` CSV. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_curve_csv<W: Write>(curve: &StabilityCurve, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CURVE_CSV_HEADER}")?;
    for p in &curve.points {
        writeln!(out, "{:e},{:e},{},{}", p.tau, p.value, p.m, p.variant)?;
    }
    Ok(())
}

/// Reads a curve written by [`write_curve_csv`]. Lines starting with `#` are
/// ignored. `source_length` is not stored in the file and is set to 0.
pub fn read_curve_csv<R: BufRead>(input: R) -> Result<StabilityCurve> {
    let mut lines = input
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.starts_with('#') && !s.trim().is_empty()));
    let read_err = |e: std::io::Error| Error::Malformed(e.to_string());
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == CURVE_CSV_HEADER => {}
        Some((n, Ok(h))) => {
            return Err(Error::Malformed(format!("line {}: unexpected header `{h}`", n + 1)))
        }
        Some((_, Err(e))) => return Err(read_err(e)),
        None => return Err(Error::Malformed("empty curve file".into())),
    }
    let mut points = Vec::new();
    for (n, line) in lines {
        let line = line.map_err(read_err)?;
        let bad = |what: &str| Error::Malformed(format!("line {}: bad {what} in `{line}`", n + 1));
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 4 {
            return Err(bad("field count"));
        }
        points.push(StabilityPoint {
            tau: fields[0].parse().map_err(|_| bad("tau_s"))?,
            value: fields[1].parse().map_err(|_| bad("value"))?,
            m: fields[2].parse().map_err(|_| bad("m"))?,
            variant: fields[3].parse().map_err(|_| bad("variant"))?,
        });
    }
    let variant = points
        .first()
        .map(|p| p.variant)
        .ok_or_else(|| Error::Malformed("curve file holds no points".into()))?;
    if points.iter().any(|p| p.variant != variant) {
        return Err(Error::Malformed("mixed variants in one curve".into()));
    }
    if points.windows(2).any(|w| w[1].tau <= w[0].tau) {
        return Err(Error::Malformed("τ values must be strictly increasing".into()));
    }
    Ok(StabilityCurve {
        variant,
        points,
        source_length: 0,
        warnings: Vec::new(),
    })
}
