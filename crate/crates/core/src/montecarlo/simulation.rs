//! FWER and average power of Holm, WHP and WAP under equicorrelated normal
//! data with one-sided one-sample t-tests.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use super::rng::substream;
use super::sampling::{one_sample_t_pvalue, sample_equicorrelated, weight_scenario, WeightScenario};
use crate::error::{Error, Result};
use crate::problem::TestingProblem;
use crate::procedures::{holm_stepdown, wap_stepdown, whp_stepdown};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcedureTag {
    Holm,
    Whp,
    Wap,
}

impl ProcedureTag {
    pub const ALL: [ProcedureTag; 3] = [Self::Holm, Self::Whp, Self::Wap];

    pub fn name(self) -> &'static str {
        match self {
            Self::Holm => "HOLM",
            Self::Whp => "WHP",
            Self::Wap => "WAP",
        }
    }
}

impl fmt::Display for ProcedureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// One simulation cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub m: usize,
    /// Proportion of true nulls; `m * pi0` must be an integer below `m`.
    pub pi0: f64,
    pub rho: f64,
    /// Observations per hypothesis.
    pub n: usize,
    /// Mean of every false null.
    pub mu_alt: f64,
    pub alpha: f64,
    pub reps: usize,
    pub scenario: WeightScenario,
    pub seed: u64,
}

impl SimulationConfig {
    /// Number of true nulls.
    pub fn m0(&self) -> Result<usize> {
        let exact = self.m as f64 * self.pi0;
        let m0 = exact.round();
        if (exact - m0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "m * pi0 = {exact} is not an integer"
            )));
        }
        Ok(m0 as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if !(self.pi0 > 0.0 && self.pi0 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "pi0 = {} must lie in (0, 1); average power needs at least one false null",
                self.pi0
            )));
        }
        let m0 = self.m0()?;
        if m0 == 0 || m0 == self.m {
            return Err(Error::InvalidConfig(format!(
                "m * pi0 = {m0} leaves no true or no false nulls"
            )));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidConfig(format!("rho = {} must lie in [0, 1)", self.rho)));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("n = {} must be at least 2", self.n)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha = {} must lie in (0, 1)", self.alpha)));
        }
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if !self.mu_alt.is_finite() {
            return Err(Error::InvalidConfig("mu_alt must be finite".into()));
        }
        Ok(())
    }

    /// True nulls first, then false nulls.
    pub fn null_mask(&self) -> Result<Vec<bool>> {
        let m0 = self.m0()?;
        Ok((0..self.m).map(|i| i < m0).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub procedure: ProcedureTag,
    /// Fraction of replicates with at least one true null rejected.
    pub fwer: f64,
    pub fwer_se: f64,
    /// Mean fraction of false nulls rejected.
    pub power: f64,
    pub power_se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub config: SimulationConfig,
    pub records: Vec<CellRecord>,
    /// Replicates redrawn once because a sample had zero variance.
    pub resampled: usize,
}

impl SimulationResult {
    pub fn record(&self, procedure: ProcedureTag) -> &CellRecord {
        self.records
            .iter()
            .find(|r| r.procedure == procedure)
            .expect("every procedure is recorded")
    }
}

/// Binomial standard error of a proportion estimated from `reps` draws.
pub fn proportion_se(v: f64, reps: usize) -> f64 {
    (v * (1.0 - v) / reps as f64).sqrt()
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    familywise_errors: [u64; 3],
    true_rejections: [u64; 3],
    resampled: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for k in 0..3 {
            self.familywise_errors[k] += other.familywise_errors[k];
            self.true_rejections[k] += other.true_rejections[k];
        }
        self.resampled += other.resampled;
        self
    }
}

fn draw_pvalues<R: Rng>(
    config: &SimulationConfig,
    mu: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    let data = sample_equicorrelated(config.m, config.rho, mu, config.n, rng)?;
    (0..config.m)
        .map(|j| one_sample_t_pvalue(&data.column(j)))
        .collect()
}

fn replicate(config: &SimulationConfig, null_mask: &[bool], index: u64) -> Result<Tally> {
    let mut rng = substream(config.seed, index);
    let mu: Vec<f64> = null_mask
        .iter()
        .map(|&null| if null { 0.0 } else { config.mu_alt })
        .collect();

    let mut tally = Tally::default();
    let weights = weight_scenario(config.scenario, null_mask, &mut rng);
    let p = match draw_pvalues(config, &mu, &mut rng) {
        Err(Error::DegenerateSample) => {
            tally.resampled = 1;
            draw_pvalues(config, &mu, &mut rng)?
        }
        other => other?,
    };

    let problem = TestingProblem::unlabeled(p.clone(), weights, config.alpha)?;
    let holm = holm_stepdown(&p, config.alpha);
    let whp = whp_stepdown(&problem);
    let wap = wap_stepdown(&problem);
    if !wap.is_subset(&whp) {
        return Err(Error::Invariant(format!(
            "replicate {index}: WAP rejected {wap} but WHP only {whp}"
        )));
    }
    for (k, set) in [holm, whp, wap].iter().enumerate() {
        let false_rejections = set.rejected().iter().filter(|&&i| null_mask[i]).count();
        tally.familywise_errors[k] += u64::from(false_rejections > 0);
        tally.true_rejections[k] += (set.len() - false_rejections) as u64;
    }
    Ok(tally)
}

/// Runs `config.reps` replicates in parallel. Replicate `r` draws from
/// substream `r` of `config.seed` and weights are redrawn every replicate.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationResult> {
    config.validate()?;
    let null_mask = config.null_mask()?;
    let m1 = null_mask.iter().filter(|&&n| !n).count();

    let tally = (0..config.reps as u64)
        .into_par_iter()
        .map(|r| replicate(config, &null_mask, r))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    let reps = config.reps;
    let records = ProcedureTag::ALL
        .iter()
        .enumerate()
        .map(|(k, &procedure)| {
            let fwer = tally.familywise_errors[k] as f64 / reps as f64;
            let power = tally.true_rejections[k] as f64 / (reps * m1) as f64;
            CellRecord {
                procedure,
                fwer,
                fwer_se: proportion_se(fwer, reps),
                power,
                power_se: proportion_se(power, reps),
            }
        })
        .collect();
    Ok(SimulationResult {
        config: config.clone(),
        records,
        resampled: tally.resampled as usize,
    })
}
