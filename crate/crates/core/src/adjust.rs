//! Adjusted p-values: the smallest level at which each hypothesis would be
//! rejected. Comparing them with alpha reproduces the step-down decisions.
//!
//! Both recursions cap every step at 1, not only the first. No rejection
//! decision changes since alpha < 1.

use crate::problem::{
    raw_order, weighted_order, weighted_pvalues, OrderingPermutation, TestingProblem,
};
use crate::procedures::{tail_sums, Procedure};

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedReport {
    procedure: Procedure,
    /// In original hypothesis order.
    adjusted: Vec<f64>,
    ordering: OrderingPermutation,
}

impl AdjustedReport {
    pub fn procedure(&self) -> Procedure {
        self.procedure
    }

    pub fn values(&self) -> &[f64] {
        &self.adjusted
    }

    pub fn ordering(&self) -> &OrderingPermutation {
        &self.ordering
    }

    /// Indices with adjusted value at most `alpha`.
    pub fn rejected_at(&self, alpha: f64) -> Vec<usize> {
        (0..self.adjusted.len())
            .filter(|&i| self.adjusted[i] <= alpha)
            .collect()
    }
}

/// Running maximum of `scaled` capped at 1, in rank order.
fn step_down_max(scaled: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut prev = 0.0f64;
    scaled
        .map(|x| {
            prev = x.max(prev).min(1.0);
            prev
        })
        .collect()
}

/// Adjusted weighted p-values for WHP:
/// `min{max{p~_(i) sum_{k >= i} w*_(k), adj_(i-1)}, 1}`.
pub fn adjusted_whp(problem: &TestingProblem) -> AdjustedReport {
    let ordering = weighted_order(problem);
    let ranked_q = ordering.apply(weighted_pvalues(problem).values());
    let tails = tail_sums(&ordering.apply(problem.weights()));
    let ranked_adj = step_down_max(ranked_q.iter().zip(&tails).map(|(q, t)| q * t));
    AdjustedReport {
        procedure: Procedure::Whp,
        adjusted: ordering.unapply(&ranked_adj),
        ordering,
    }
}

/// Adjusted p-values for WAP:
/// `min{max{(p_(i) / w_(i)) sum_{k >= i} w_(k), adj_(i-1)}, 1}`.
pub fn adjusted_wap(problem: &TestingProblem) -> AdjustedReport {
    let ordering = raw_order(problem);
    let ranked_p = ordering.apply(problem.p_values());
    let ranked_w = ordering.apply(problem.weights());
    let tails = tail_sums(&ranked_w);
    let ranked_adj = step_down_max(
        ranked_p
            .iter()
            .zip(&ranked_w)
            .zip(&tails)
            .map(|((p, w), t)| p / w * t),
    );
    AdjustedReport {
        procedure: Procedure::Wap,
        adjusted: ordering.unapply(&ranked_adj),
        ordering,
    }
}

pub fn adjusted(problem: &TestingProblem, procedure: Procedure) -> AdjustedReport {
    match procedure {
        Procedure::Whp => adjusted_whp(problem),
        Procedure::Wap => adjusted_wap(problem),
    }
}
