//! Step-down forms of the weighted Holm procedure (WHP), the weighted
//! alternative Holm procedure (WAP), and classic unweighted Holm.
//!
//! Every procedure stops at the first rank that fails its threshold; later
//! ranks are never examined. Equality with a threshold counts as a rejection.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::problem::{raw_order, weighted_order, weighted_pvalues, RejectionSet, TestingProblem};

/// The two weighted procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Procedure {
    /// Orders by weighted p-values `p_i / w_i`.
    Whp,
    /// Orders by raw p-values with weight-dependent thresholds.
    Wap,
}

impl Procedure {
    pub fn name(self) -> &'static str {
        match self {
            Procedure::Whp => "WHP",
            Procedure::Wap => "WAP",
        }
    }

    pub fn stepdown(self, problem: &TestingProblem) -> RejectionSet {
        match self {
            Procedure::Whp => whp_stepdown(problem),
            Procedure::Wap => wap_stepdown(problem),
        }
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Procedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "whp" => Ok(Procedure::Whp),
            "wap" => Ok(Procedure::Wap),
            other => Err(Error::Input(format!("unknown procedure `{other}`"))),
        }
    }
}

/// Sums of `ranked[j..]` for every `j`, each correctly rounded.
///
/// Exact summation makes a tail sum depend only on which weights it
/// contains, not on the order they were ranked in, so WHP and WAP agree
/// bit for bit whenever their remaining sets coincide.
pub(crate) fn tail_sums(ranked: &[f64]) -> Vec<f64> {
    let mut tails = vec![0.0; ranked.len()];
    let mut acc = ExactSum::default();
    for j in (0..ranked.len()).rev() {
        acc.add(ranked[j]);
        tails[j] = acc.value();
    }
    tails
}

/// Shewchuk's non-overlapping partials, as in Python's `math.fsum`.
/// Finite inputs only.
#[derive(Debug, Default)]
struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    fn add(&mut self, mut x: f64) {
        let mut kept = 0;
        for k in 0..self.partials.len() {
            let mut y = self.partials[k];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    fn value(&self) -> f64 {
        let p = &self.partials;
        let Some(mut n) = p.len().checked_sub(1) else {
            return 0.0;
        };
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // round half-even across the remaining partials
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

/// Holm with weights, ordered by `p_i / w_i`: reject the hypothesis at rank
/// `i` iff `p~_(j) <= alpha / sum_{k >= j} w*_(k)` for every `j <= i`.
pub fn whp_stepdown(problem: &TestingProblem) -> RejectionSet {
    let alpha = problem.alpha();
    let weighted = weighted_pvalues(problem);
    let perm = weighted_order(problem);
    let ranked_w = perm.apply(problem.weights());
    let tails = tail_sums(&ranked_w);

    let mut rejections = RejectionSet::new();
    for (rank, &idx) in perm.perm().iter().enumerate() {
        if weighted.values()[idx] <= alpha / tails[rank] {
            rejections.push(idx, Some(ranked_w[rank] * alpha / tails[rank]));
        } else {
            break;
        }
    }
    rejections
}

/// Ordered by raw p-values: reject the hypothesis at rank `i` iff
/// `p_(j) <= (w_(j) / sum_{k >= j} w_(k)) * alpha` for every `j <= i`.
pub fn wap_stepdown(problem: &TestingProblem) -> RejectionSet {
    let alpha = problem.alpha();
    let perm = raw_order(problem);
    let ranked_w = perm.apply(problem.weights());
    let tails = tail_sums(&ranked_w);

    let mut rejections = RejectionSet::new();
    for (rank, &idx) in perm.perm().iter().enumerate() {
        let threshold = ranked_w[rank] / tails[rank] * alpha;
        if problem.p_values()[idx] <= threshold {
            rejections.push(idx, Some(threshold));
        } else {
            break;
        }
    }
    rejections
}

/// Classic Holm: reject `H_(i)` iff `p_(j) <= alpha / (m - j + 1)` for all
/// `j <= i`.
pub fn holm_stepdown(p: &[f64], alpha: f64) -> RejectionSet {
    let m = p.len();
    let perm = crate::problem::order(p, crate::problem::OrderKey::Raw);
    let mut rejections = RejectionSet::new();
    for (rank, &idx) in perm.perm().iter().enumerate() {
        let threshold = alpha / (m - rank) as f64;
        if p[idx] <= threshold {
            rejections.push(idx, Some(threshold));
        } else {
            break;
        }
    }
    rejections
}

/// Generic weighted p-value step-down: reject the hypothesis at rank `i` of
/// the weighted ordering iff `p~_(j) <= critical[j]` for every `j <= i`.
///
/// `critical` must be nondecreasing with one entry per hypothesis.
pub fn critical_value_stepdown(problem: &TestingProblem, critical: &[f64]) -> Result<RejectionSet> {
    check_critical_values(critical, problem.m())?;
    let weighted = weighted_pvalues(problem);
    let perm = weighted_order(problem);
    let mut rejections = RejectionSet::new();
    for (rank, &idx) in perm.perm().iter().enumerate() {
        if weighted.values()[idx] <= critical[rank] {
            rejections.push(idx, None);
        } else {
            break;
        }
    }
    Ok(rejections)
}

pub(crate) fn check_critical_values(critical: &[f64], m: usize) -> Result<()> {
    if critical.len() != m {
        return Err(Error::Precondition(format!(
            "expected {m} critical values, got {}",
            critical.len()
        )));
    }
    if critical.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::Precondition(
            "critical values must be finite and nonnegative".into(),
        ));
    }
    if critical.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Precondition(
            "critical values must be nondecreasing".into(),
        ));
    }
    Ok(())
}

/// WHP's own critical values for weights in index order:
/// `alpha / sum_{k >= r} w_k`.
pub fn whp_critical_values(weights: &[f64], alpha: f64) -> Vec<f64> {
    tail_sums(weights).into_iter().map(|t| alpha / t).collect()
}
