use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use super::tdist::student_t_sf;
use crate::error::{Error, Result};

/// Row-major `n x m` sample: `n` observations of an `m`-vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DataMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }
}

/// `n` draws of an `m`-variate normal with mean `mu`, unit variances and
/// every pairwise correlation equal to `rho`.
///
/// Uses one shared factor per row: `sqrt(rho) Z_0 + sqrt(1 - rho) Z_i + mu_i`.
pub fn sample_equicorrelated<R: Rng + ?Sized>(
    m: usize,
    rho: f64,
    mu: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<DataMatrix> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidConfig(format!("rho = {rho} must lie in [0, 1)")));
    }
    if mu.len() != m {
        return Err(Error::InvalidConfig(format!(
            "mean vector has length {}, expected {m}",
            mu.len()
        )));
    }
    let shared = rho.sqrt();
    let own = (1.0 - rho).sqrt();
    let mut data = Vec::with_capacity(n * m);
    for _ in 0..n {
        let z0: f64 = rng.sample(StandardNormal);
        for &mu_i in mu {
            let zi: f64 = rng.sample(StandardNormal);
            data.push(shared * z0 + own * zi + mu_i);
        }
    }
    Ok(DataMatrix { rows: n, cols: m, data })
}

/// One-sided p-value of the one-sample t-test of `mean = 0` against
/// `mean > 0`, using the `n - 1` variance denominator.
pub fn one_sample_t_pvalue(sample: &[f64]) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "t-test needs at least 2 observations, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = sample.iter().sum::<f64>() / nf;
    let ss: f64 = sample.iter().map(|x| (x - mean) * (x - mean)).sum();
    if ss == 0.0 {
        return Err(Error::DegenerateSample);
    }
    let sd = (ss / (nf - 1.0)).sqrt();
    let t = mean / (sd / nf.sqrt());
    Ok(student_t_sf(t, nf - 1.0))
}

/// The four weight-generating scenarios. Nulls and non-nulls draw from
/// separate uniforms, except in `S4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightScenario {
    /// Nulls U(1, 2), non-nulls U(6, 10).
    S1,
    /// Nulls U(1, 2), non-nulls U(2, 10).
    S2,
    /// Nulls U(1, 2), non-nulls U(2, 6).
    S3,
    /// Everyone U(1, 6).
    S4,
}

impl WeightScenario {
    pub const ALL: [WeightScenario; 4] = [Self::S1, Self::S2, Self::S3, Self::S4];

    /// `(null range, non-null range)`.
    pub fn ranges(self) -> ((f64, f64), (f64, f64)) {
        match self {
            Self::S1 => ((1.0, 2.0), (6.0, 10.0)),
            Self::S2 => ((1.0, 2.0), (2.0, 10.0)),
            Self::S3 => ((1.0, 2.0), (2.0, 6.0)),
            Self::S4 => ((1.0, 6.0), (1.0, 6.0)),
        }
    }
}

impl fmt::Display for WeightScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::S1 => "S1",
            Self::S2 => "S2",
            Self::S3 => "S3",
            Self::S4 => "S4",
        };
        f.pad(s)
    }
}

impl FromStr for WeightScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "S1" | "1" => Ok(Self::S1),
            "S2" | "2" => Ok(Self::S2),
            "S3" | "3" => Ok(Self::S3),
            "S4" | "4" => Ok(Self::S4),
            other => Err(Error::InvalidConfig(format!("unknown weight scenario `{other}`"))),
        }
    }
}

/// Draws one weight per hypothesis; `null_mask[i]` marks true nulls.
pub fn weight_scenario<R: Rng + ?Sized>(
    kind: WeightScenario,
    null_mask: &[bool],
    rng: &mut R,
) -> Vec<f64> {
    let ((null_lo, null_hi), (alt_lo, alt_hi)) = kind.ranges();
    null_mask
        .iter()
        .map(|&is_null| {
            if is_null {
                rng.random_range(null_lo..=null_hi)
            } else {
                rng.random_range(alt_lo..=alt_hi)
            }
        })
        .collect()
}
