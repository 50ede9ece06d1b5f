//! Validated testing problems, weighted p-values and the orderings every
//! procedure is built on.
//!
//! All comparisons against thresholds elsewhere in the crate are exact
//! floating-point `<=` tests. Ties in an ordering are broken by the smaller
//! original index.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A family of hypotheses with raw p-values, positive weights and a global
/// significance level.
#[derive(Debug, Clone, PartialEq)]
pub struct TestingProblem {
    labels: Vec<String>,
    p: Vec<f64>,
    w: Vec<f64>,
    alpha: f64,
}

impl TestingProblem {
    /// Validates the raw sequences. Errors name the offending index.
    pub fn new(labels: Vec<String>, p: Vec<f64>, w: Vec<f64>, alpha: f64) -> Result<Self> {
        if labels.len() != p.len() || p.len() != w.len() {
            return Err(Error::LengthMismatch {
                labels: labels.len(),
                p_values: p.len(),
                weights: w.len(),
            });
        }
        if p.is_empty() {
            return Err(Error::Empty);
        }
        if let Some((index, &value)) = p
            .iter()
            .enumerate()
            .find(|(_, &v)| !(0.0..=1.0).contains(&v))
        {
            return Err(Error::PValueOutOfRange { index, value });
        }
        if let Some((index, &value)) = w
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v.is_finite() && v > 0.0))
        {
            return Err(Error::InvalidWeight { index, value });
        }
        check_alpha(alpha)?;
        Ok(Self { labels, p, w, alpha })
    }

    /// Like [`TestingProblem::new`] with labels `H1..Hm`.
    pub fn unlabeled(p: Vec<f64>, w: Vec<f64>, alpha: f64) -> Result<Self> {
        let labels = default_labels(p.len());
        Self::new(labels, p, w, alpha)
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The same hypotheses tested at another level.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            ..self.clone()
        })
    }

    /// The same hypotheses with replacement p-values.
    pub fn with_p_values(&self, p: Vec<f64>) -> Result<Self> {
        Self::new(self.labels.clone(), p, self.w.clone(), self.alpha)
    }

    /// The same hypotheses with replacement weights.
    pub fn with_weights(&self, w: Vec<f64>) -> Result<Self> {
        Self::new(self.labels.clone(), self.p.clone(), w, self.alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

pub(crate) fn default_labels(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("H{i}")).collect()
}

/// `p_i / w_i` for every hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPValues(Vec<f64>);

impl WeightedPValues {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

pub fn weighted_pvalues(problem: &TestingProblem) -> WeightedPValues {
    WeightedPValues(
        problem
            .p
            .iter()
            .zip(&problem.w)
            .map(|(p, w)| p / w)
            .collect(),
    )
}

/// Which values an ordering was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKey {
    Raw,
    Weighted,
}

/// Maps rank (0-based) to original index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingPermutation {
    perm: Vec<usize>,
    key: OrderKey,
}

impl OrderingPermutation {
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn key(&self) -> OrderKey {
        self.key
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Original index of the hypothesis at `rank`.
    pub fn index_at(&self, rank: usize) -> usize {
        self.perm[rank]
    }

    /// Maps original index to rank.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (rank, &idx) in self.perm.iter().enumerate() {
            inv[idx] = rank;
        }
        inv
    }

    /// `values` rearranged into rank order.
    pub fn apply<T: Copy>(&self, values: &[T]) -> Vec<T> {
        self.perm.iter().map(|&i| values[i]).collect()
    }

    /// Scatters rank-ordered `ranked` back to original positions.
    pub fn unapply<T: Copy + Default>(&self, ranked: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); self.perm.len()];
        for (rank, &idx) in self.perm.iter().enumerate() {
            out[idx] = ranked[rank];
        }
        out
    }
}

/// Stable ascending sort permutation of `values`.
pub fn order(values: &[f64], key: OrderKey) -> OrderingPermutation {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    OrderingPermutation { perm, key }
}

pub fn raw_order(problem: &TestingProblem) -> OrderingPermutation {
    order(&problem.p, OrderKey::Raw)
}

pub fn weighted_order(problem: &TestingProblem) -> OrderingPermutation {
    order(weighted_pvalues(problem).values(), OrderKey::Weighted)
}

/// One rejection made by a procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionStep {
    /// 1-based position in the sequence of rejections.
    pub step: usize,
    pub index: usize,
    /// The raw p-value scale threshold that was met, if the procedure has one.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RejectionSet {
    rejected: BTreeSet<usize>,
    trace: Vec<RejectionStep>,
}

impl RejectionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rejections without thresholds, traced in ascending index order.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::new();
        let sorted: BTreeSet<usize> = indices.into_iter().collect();
        for idx in sorted {
            set.push(idx, None);
        }
        set
    }

    pub(crate) fn push(&mut self, index: usize, threshold: Option<f64>) {
        debug_assert!(!self.rejected.contains(&index));
        self.rejected.insert(index);
        self.trace.push(RejectionStep {
            step: self.trace.len() + 1,
            index,
            threshold,
        });
    }

    pub fn rejected(&self) -> &BTreeSet<usize> {
        &self.rejected
    }

    pub fn trace(&self) -> &[RejectionStep] {
        &self.trace
    }

    pub fn len(&self) -> usize {
        self.rejected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rejected.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.rejected.contains(&index)
    }

    pub fn is_subset(&self, other: &RejectionSet) -> bool {
        self.rejected.is_subset(&other.rejected)
    }

    /// Same rejected hypotheses, irrespective of trace.
    pub fn same_rejections(&self, other: &RejectionSet) -> bool {
        self.rejected == other.rejected
    }
}

impl fmt::Display for RejectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, idx) in self.rejected.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "H{}", idx + 1)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reordering_example() -> TestingProblem {
        TestingProblem::unlabeled(vec![0.01, 0.014, 0.3], vec![1.0, 2.0, 3.0], 0.05).unwrap()
    }

    #[test]
    fn validates_reordering_example() {
        let problem = TestingProblem::new(
            vec!["H1".into(), "H2".into(), "H3".into()],
            vec![0.01, 0.014, 0.3],
            vec![1.0, 2.0, 3.0],
            0.05,
        )
        .unwrap();
        assert_eq!(problem.m(), 3);
        assert!(TestingProblem::unlabeled(vec![0.5], vec![1.0], 0.05).is_ok());
    }

    #[test]
    fn rejects_bad_inputs_with_index() {
        assert_eq!(
            TestingProblem::unlabeled(vec![0.1, 0.2, 0.3], vec![1.0, 0.0, 3.0], 0.05),
            Err(Error::InvalidWeight { index: 1, value: 0.0 })
        );
        assert!(matches!(
            TestingProblem::unlabeled(vec![0.1, f64::NAN], vec![1.0, 1.0], 0.05),
            Err(Error::PValueOutOfRange { index: 1, .. })
        ));
        assert_eq!(
            TestingProblem::unlabeled(vec![0.1, 1.2], vec![1.0, 1.0], 0.05),
            Err(Error::PValueOutOfRange { index: 1, value: 1.2 })
        );
        assert!(matches!(
            TestingProblem::unlabeled(vec![0.1], vec![f64::INFINITY], 0.05),
            Err(Error::InvalidWeight { index: 0, .. })
        ));
        assert!(matches!(
            TestingProblem::unlabeled(vec![0.1, 0.2], vec![1.0], 0.05),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(
            TestingProblem::unlabeled(vec![], vec![], 0.05),
            Err(Error::Empty)
        );
        assert_eq!(
            TestingProblem::unlabeled(vec![0.1], vec![1.0], 1.0),
            Err(Error::InvalidAlpha(1.0))
        );
        assert_eq!(
            TestingProblem::unlabeled(vec![0.1], vec![1.0], 0.0),
            Err(Error::InvalidAlpha(0.0))
        );
        // zero p-values are allowed
        assert!(TestingProblem::unlabeled(vec![0.0], vec![1.0], 0.05).is_ok());
    }

    #[test]
    fn weighted_values_from_examples() {
        assert_eq!(
            weighted_pvalues(&reordering_example()).values(),
            &[0.01, 0.007, 0.3 / 3.0]
        );
        assert!((0.3f64 / 3.0 - 0.1).abs() < 1e-15);
        let no_reordering =
            TestingProblem::unlabeled(vec![0.01, 0.03, 0.09], vec![1.0, 2.0, 3.0], 0.05).unwrap();
        let wp = weighted_pvalues(&no_reordering);
        for (got, want) in wp.values().iter().zip([0.01, 0.015, 0.03]) {
            assert!((got - want).abs() < 1e-15);
        }
        let unit = TestingProblem::unlabeled(vec![0.2, 0.7], vec![1.0, 1.0], 0.05).unwrap();
        assert_eq!(weighted_pvalues(&unit).values(), unit.p_values());
    }

    #[test]
    fn ordering_examples() {
        assert_eq!(order(&[0.01, 0.007, 0.1], OrderKey::Weighted).perm(), &[1, 0, 2]);
        assert_eq!(order(&[0.3, 0.3, 0.1], OrderKey::Raw).perm(), &[2, 0, 1]);
        assert_eq!(order(&[0.1, 0.2, 0.3], OrderKey::Raw).perm(), &[0, 1, 2]);
        let perm = weighted_order(&reordering_example());
        assert_eq!(perm.key(), OrderKey::Weighted);
        assert_eq!(perm.inverse(), vec![1, 0, 2]);
    }

    #[test]
    fn rejection_set_display() {
        let set = RejectionSet::from_indices([1, 0]);
        assert_eq!(set.to_string(), "{H1, H2}");
        assert_eq!(set.trace()[0].index, 0);
        assert_eq!(set.trace()[1].step, 2);
    }

    proptest! {
        #[test]
        fn order_is_a_sorted_bijection(values in prop::collection::vec(0.0f64..1.0, 1..12)) {
            let perm = order(&values, OrderKey::Raw);
            let ranked = perm.apply(&values);
            prop_assert!(ranked.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(perm.unapply(&ranked), values.clone());
            let mut seen = perm.perm().to_vec();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..values.len()).collect::<Vec<_>>());
        }

        #[test]
        fn ties_keep_index_order(values in prop::collection::vec(0u8..3, 1..12)) {
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            let perm = order(&values, OrderKey::Raw);
            for w in perm.perm().windows(2) {
                if values[w[0]] == values[w[1]] {
                    prop_assert!(w[0] < w[1]);
                }
            }
        }

        #[test]
        fn weighting_round_trips(
            pw in prop::collection::vec((0.0f64..=1.0, 0.01f64..100.0), 1..10)
        ) {
            let (p, w): (Vec<f64>, Vec<f64>) = pw.into_iter().unzip();
            let problem = TestingProblem::unlabeled(p.clone(), w.clone(), 0.05).unwrap();
            let wp = weighted_pvalues(&problem);
            for ((q, w), p) in wp.values().iter().zip(&w).zip(&p) {
                let back = q * w;
                prop_assert!((back - p).abs() <= f64::EPSILON * p.abs());
            }
        }

        #[test]
        fn equal_weights_give_equal_orderings(
            p in prop::collection::vec(0.0f64..=1.0, 1..10),
            weight in 0.1f64..10.0,
        ) {
            let w = vec![weight; p.len()];
            let problem = TestingProblem::unlabeled(p, w, 0.05).unwrap();
            prop_assert_eq!(raw_order(&problem).perm().to_vec(), weighted_order(&problem).perm().to_vec());
        }
    }
}
