//! Uniformly sampled phase (x̄) and fractional-frequency (ȳ) sequences.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Fractional-frequency samples ȳ_k, each the average of y(t) over one
/// sample period `tau0` (seconds). Dimensionless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesY {
    tau0: f64,
    samples: Vec<f64>,
}

/// Phase (time-deviation) samples x̄_k in seconds, spaced by `tau0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesX {
    tau0: f64,
    samples: Vec<f64>,
}

fn check(tau0: f64, samples: &[f64]) -> Result<()> {
    ensure(tau0.is_finite() && tau0 > 0.0, || {
        format!("tau0 must be finite and positive, got {tau0}")
    })?;
    ensure(!samples.is_empty(), || "series must hold at least one sample".into())?;
    ensure(samples.iter().all(|v| v.is_finite()), || {
        "series samples must be finite".into()
    })
}

macro_rules! series_impl {
    ($t:ident) => {
        impl $t {
            pub fn new(tau0: f64, samples: Vec<f64>) -> Result<Self> {
                check(tau0, &samples)?;
                Ok(Self { tau0, samples })
            }

            pub fn tau0(&self) -> f64 {
                self.tau0
            }

            pub fn samples(&self) -> &[f64] {
                &self.samples
            }

            pub fn into_samples(self) -> Vec<f64> {
                self.samples
            }

            pub fn len(&self) -> usize {
                self.samples.len()
            }

            pub fn is_empty(&self) -> bool {
                self.samples.is_empty()
            }

            /// Same series with every sample multiplied by `c`.
            pub fn scaled(&self, c: f64) -> Self {
                Self {
                    tau0: self.tau0,
                    samples: self.samples.iter().map(|v| v * c).collect(),
                }
            }
        }
    };
}

series_impl!(TimeSeriesY);
series_impl!(TimeSeriesX);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_tau0_and_empty() {
        assert!(TimeSeriesY::new(0.0, vec![1.0]).is_err());
        assert!(TimeSeriesY::new(f64::NAN, vec![1.0]).is_err());
        assert!(TimeSeriesX::new(1.0, vec![]).is_err());
        assert!(TimeSeriesX::new(1.0, vec![f64::INFINITY]).is_err());
        assert!(TimeSeriesX::new(1.0, vec![0.0]).is_ok());
    }
}
