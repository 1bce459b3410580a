//! Location and weight samplers.
//!
//! Every distribution lives on `[0, 1]` and is scaled to the arena axis by
//! the caller. All samplers consume uniform draws from [`SplitMix64`] only,
//! so a stream of draws maps to the same samples on every platform.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::montecarlo::rng::SplitMix64;

/// Points in the Beta CDF lookup table.
pub const BETA_TABLE_POINTS: usize = 10_000;
/// Width at which Beta inverse-CDF bisection stops.
pub const BETA_BISECTION_TOL: f64 = 1e-10;
/// Rejections allowed per truncated draw before giving up.
pub const MAX_REJECTIONS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistributionSpec {
    Uniform01,
    Beta { a: f64, b: f64 },
    TruncatedNormal { mean: f64, sd: f64 },
    TruncatedLogistic { mean: f64, scale: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        match *self {
            DistributionSpec::Uniform01 => Ok(()),
            DistributionSpec::Beta { a, b } => {
                if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
                    Ok(())
                } else {
                    bad(format!(
                        "beta shape parameters must be positive, got ({a}, {b})"
                    ))
                }
            }
            DistributionSpec::TruncatedNormal { mean, sd: spread }
            | DistributionSpec::TruncatedLogistic {
                mean,
                scale: spread,
            } => {
                if !mean.is_finite() {
                    bad(format!("location must be finite, got {mean}"))
                } else if !(spread > 0.0 && spread.is_finite()) {
                    bad(format!("spread must be positive, got {spread}"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Builds the sampler, precomputing tables where needed.
    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Ok(match *self {
            DistributionSpec::Uniform01 => Sampler::Uniform,
            DistributionSpec::Beta { a, b } => Sampler::Beta(BetaSampler::new(a, b)),
            DistributionSpec::TruncatedNormal { mean, sd } => Sampler::Normal { mean, sd },
            DistributionSpec::TruncatedLogistic { mean, scale } => {
                Sampler::Logistic { mean, scale }
            }
        })
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Uniform01 => f.write_str("uniform"),
            DistributionSpec::Beta { a, b } => write!(f, "beta({a},{b})"),
            DistributionSpec::TruncatedNormal { mean, sd } => write!(f, "normal({mean},{sd})"),
            DistributionSpec::TruncatedLogistic { mean, scale } => {
                write!(f, "logistic({mean},{scale})")
            }
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Parses `uniform`, `beta(a,b)`, `normal(sd)`, `normal(mean,sd)`,
    /// `logistic(scale)` or `logistic(mean,scale)`. A missing mean centers
    /// the distribution at 0.5.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidDistribution(format!("cannot parse distribution {s:?}"));
        let (name, args) = match s.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(bad)?;
                let args = inner
                    .split(',')
                    .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                (name.trim(), args)
            }
            None => (s, Vec::new()),
        };
        let spec = match (name, args.as_slice()) {
            ("uniform", []) => DistributionSpec::Uniform01,
            ("beta", &[a, b]) => DistributionSpec::Beta { a, b },
            ("normal", &[sd]) => DistributionSpec::TruncatedNormal { mean: 0.5, sd },
            ("normal", &[mean, sd]) => DistributionSpec::TruncatedNormal { mean, sd },
            ("logistic", &[scale]) => DistributionSpec::TruncatedLogistic { mean: 0.5, scale },
            ("logistic", &[mean, scale]) => DistributionSpec::TruncatedLogistic { mean, scale },
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Inverse-CDF Beta sampler: table lookup brackets the quantile, bisection on
/// the regularized incomplete beta function pins it down.
#[derive(Debug, Clone)]
pub struct BetaSampler {
    a: f64,
    b: f64,
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl BetaSampler {
    pub fn new(a: f64, b: f64) -> Self {
        let last = (BETA_TABLE_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..BETA_TABLE_POINTS).map(|i| i as f64 / last).collect();
        let mut cdf: Vec<f64> = grid.iter().map(|&x| beta_reg(a, b, x)).collect();
        // Guard against round-off dents so the table stays monotone.
        for i in 1..cdf.len() {
            cdf[i] = cdf[i].max(cdf[i - 1]);
        }
        BetaSampler { a, b, grid, cdf }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        beta_reg(self.a, self.b, x.clamp(0.0, 1.0))
    }

    /// Quantile of `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let hi_idx = self
            .cdf
            .partition_point(|&c| c < u)
            .clamp(1, self.grid.len() - 1);
        let (mut lo, mut hi) = (self.grid[hi_idx - 1], self.grid[hi_idx]);
        while hi - lo > BETA_BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Clone)]
pub enum Sampler {
    Uniform,
    Beta(BetaSampler),
    Normal { mean: f64, sd: f64 },
    Logistic { mean: f64, scale: f64 },
}

impl Sampler {
    /// One draw on `[0, 1]`.
    pub fn sample(&self, rng: &mut SplitMix64) -> Result<f64> {
        match self {
            Sampler::Uniform => Ok(rng.next_f64()),
            Sampler::Beta(beta) => Ok(beta.quantile(rng.next_f64())),
            Sampler::Normal { mean, sd } => truncated(|| {
                // Box-Muller, cosine branch only.
                let r = (-2.0 * rng.next_f64_open0().ln()).sqrt();
                let theta = std::f64::consts::TAU * rng.next_f64();
                mean + sd * r * theta.cos()
            }),
            Sampler::Logistic { mean, scale } => truncated(|| {
                let u = rng.next_f64_open0();
                mean + scale * (u / (1.0 - u)).ln()
            }),
        }
    }
}

fn truncated(mut draw: impl FnMut() -> f64) -> Result<f64> {
    for _ in 0..MAX_REJECTIONS {
        let v = draw();
        if (0.0..=1.0).contains(&v) {
            return Ok(v);
        }
    }
    Err(Error::InvalidDistribution(format!(
        "no sample landed in [0, 1] after {MAX_REJECTIONS} attempts"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightSpec {
    Unit,
    /// Uniform on `(0, 1]`.
    Uniform01,
}

impl WeightSpec {
    pub fn sample(self, rng: &mut SplitMix64) -> f64 {
        match self {
            WeightSpec::Unit => 1.0,
            WeightSpec::Uniform01 => rng.next_f64_open0(),
        }
    }
}
