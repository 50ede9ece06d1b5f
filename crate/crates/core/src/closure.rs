//! Brute-force closed testing.
//!
//! Every nonempty intersection of the family is tested with a local test and
//! an elementary hypothesis is rejected iff every intersection containing it
//! is rejected. This is exponential in `m` and exists as an oracle for the
//! step-down shortcuts, plus the structural checks (consonance, the
//! monotonicity condition, p-value monotonicity) that the shortcuts rely on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{RejectionSet, TestingProblem};
use crate::procedures::Procedure;

/// Largest family the closed testing engine will enumerate.
pub const CTP_MAX_M: usize = 20;
/// Largest family for the nested-subset monotonicity check.
pub const MONOTONICITY_MAX_M: usize = 12;

/// A nonempty subset of hypotheses, bit `i` set for hypothesis `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntersectionIndex(u32);

impl IntersectionIndex {
    pub fn new(mask: u32, m: usize) -> Result<Self> {
        if mask == 0 {
            return Err(Error::Precondition("intersection must be nonempty".into()));
        }
        if m < 32 && mask >> m != 0 {
            return Err(Error::Precondition(format!(
                "intersection {mask:#b} has members outside 0..{m}"
            )));
        }
        Ok(Self(mask))
    }

    pub fn from_members(members: &[usize], m: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &i in members {
            if i >= m || i >= 32 {
                return Err(Error::Precondition(format!("member {i} outside 0..{m}")));
            }
            mask |= 1 << i;
        }
        Self::new(mask, m)
    }

    pub fn full(m: usize) -> Self {
        Self(full_mask(m))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..32).filter(move |i| mask >> i & 1 == 1)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

fn full_mask(m: usize) -> u32 {
    if m >= 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

fn check_capacity(m: usize, cap: usize, what: &'static str) -> Result<()> {
    if m > cap {
        Err(Error::Capacity { what, cap, m })
    } else {
        Ok(())
    }
}

fn weight_sum(problem: &TestingProblem, set: IntersectionIndex) -> f64 {
    set.members().map(|i| problem.weights()[i]).sum()
}

/// Index of the smallest raw p-value in `set`, ties to the smaller index.
fn raw_minimizer(problem: &TestingProblem, set: IntersectionIndex) -> usize {
    let p = problem.p_values();
    set.members()
        .reduce(|best, i| if p[i] < p[best] { i } else { best })
        .expect("intersection is nonempty")
}

/// WAP's local test: the smallest p-value in `set` against its own weight
/// share of alpha.
pub fn wap_local_test(problem: &TestingProblem, set: IntersectionIndex) -> bool {
    let i = raw_minimizer(problem, set);
    problem.p_values()[i] <= problem.weights()[i] / weight_sum(problem, set) * problem.alpha()
}

/// Weighted Bonferroni: some member meets its weight share of alpha.
pub fn whp_local_test(problem: &TestingProblem, set: IntersectionIndex) -> bool {
    let total = weight_sum(problem, set);
    set.members()
        .any(|i| problem.p_values()[i] <= problem.weights()[i] / total * problem.alpha())
}

/// The local test belonging to a weighted procedure.
pub fn local_test_for(procedure: Procedure) -> fn(&TestingProblem, IntersectionIndex) -> bool {
    match procedure {
        Procedure::Whp => whp_local_test,
        Procedure::Wap => wap_local_test,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtpReport {
    m: usize,
    /// Indexed by bitmask; entry 0 is unused.
    local: Vec<bool>,
    /// `closed[mask]`: every superset of `mask` was locally rejected.
    closed: Vec<bool>,
    elementary: RejectionSet,
}

impl CtpReport {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn local_decision(&self, set: IntersectionIndex) -> bool {
        self.local[set.mask() as usize]
    }

    /// Whether the closed procedure rejects `set`.
    pub fn closed_decision(&self, set: IntersectionIndex) -> bool {
        self.closed[set.mask() as usize]
    }

    /// `(intersection, local decision)` in ascending bitmask order.
    pub fn local_decisions(&self) -> impl Iterator<Item = (IntersectionIndex, bool)> + '_ {
        self.local
            .iter()
            .enumerate()
            .skip(1)
            .map(|(mask, &d)| (IntersectionIndex(mask as u32), d))
    }

    pub fn elementary_rejections(&self) -> &RejectionSet {
        &self.elementary
    }
}

/// Runs the full closed testing procedure with `local_test`.
pub fn ctp<F>(problem: &TestingProblem, local_test: F) -> Result<CtpReport>
where
    F: Fn(&TestingProblem, IntersectionIndex) -> bool + Sync,
{
    let m = problem.m();
    check_capacity(m, CTP_MAX_M, "closed testing")?;
    let size = 1usize << m;

    let mut local = vec![false; size];
    let eval = |(mask, slot): (usize, &mut bool)| {
        if mask != 0 {
            *slot = local_test(problem, IntersectionIndex(mask as u32));
        }
    };
    if m >= 12 {
        local.par_iter_mut().enumerate().for_each(eval);
    } else {
        local.iter_mut().enumerate().for_each(eval);
    }

    // supersets have larger masks, so a descending sweep sees them first
    let full = full_mask(m) as usize;
    let mut closed = local.clone();
    for mask in (1..size).rev() {
        if !closed[mask] {
            continue;
        }
        let mut missing = full & !mask;
        while missing != 0 {
            let bit = missing & missing.wrapping_neg();
            if !closed[mask | bit] {
                closed[mask] = false;
                break;
            }
            missing ^= bit;
        }
    }

    let elementary = RejectionSet::from_indices((0..m).filter(|&i| closed[1 << i]));
    Ok(CtpReport {
        m,
        local,
        closed,
        elementary,
    })
}

/// Consonance: every intersection the closed procedure rejects contains an
/// elementary hypothesis that it also rejects.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsonanceReport {
    pub holds: bool,
    /// An intersection rejected by the closed procedure with no rejected
    /// member.
    pub witness: Option<IntersectionIndex>,
}

pub fn check_consonance<F>(problem: &TestingProblem, local_test: F) -> Result<ConsonanceReport>
where
    F: Fn(&TestingProblem, IntersectionIndex) -> bool + Sync,
{
    let report = ctp(problem, local_test)?;
    let rejected_mask: u32 = report
        .elementary
        .rejected()
        .iter()
        .fold(0, |acc, &i| acc | 1 << i);
    let witness = (1..report.closed.len())
        .filter(|&mask| report.closed[mask])
        .map(|mask| IntersectionIndex(mask as u32))
        .find(|set| set.mask() & rejected_mask == 0);
    Ok(ConsonanceReport {
        holds: witness.is_none(),
        witness,
    })
}

/// Intersection-specific critical value `alpha_i(I)`.
///
/// WHP splits alpha across `I` by weight. WAP spends the whole share
/// `w_i / sum_I w * alpha` on the smallest raw p-value of `I` and nothing on
/// the other members.
pub fn intersection_critical_value(
    problem: &TestingProblem,
    procedure: Procedure,
    set: IntersectionIndex,
    i: usize,
) -> f64 {
    debug_assert!(set.contains(i));
    let share = problem.weights()[i] / weight_sum(problem, set) * problem.alpha();
    match procedure {
        Procedure::Whp => share,
        Procedure::Wap if raw_minimizer(problem, set) == i => share,
        Procedure::Wap => 0.0,
    }
}

/// A nested pair `J ⊂ I` and member `i` of `J` whose critical value shrinks
/// when the intersection shrinks.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityCounterexample {
    pub larger: IntersectionIndex,
    pub smaller: IntersectionIndex,
    pub index: usize,
    pub alpha_larger: f64,
    pub alpha_smaller: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub holds: bool,
    pub counterexample: Option<MonotonicityCounterexample>,
}

/// Checks `alpha_i(I) <= alpha_i(J)` for every `i ∈ J ⊂ I`.
pub fn check_monotonicity_condition(
    problem: &TestingProblem,
    procedure: Procedure,
) -> Result<MonotonicityReport> {
    let m = problem.m();
    check_capacity(m, MONOTONICITY_MAX_M, "monotonicity check")?;
    let size = 1u32 << m;

    // alpha_i(I) for every I and member i, flattened as [mask * m + i]
    let mut levels = vec![0.0; size as usize * m];
    for mask in 1..size {
        let set = IntersectionIndex(mask);
        for i in set.members() {
            levels[mask as usize * m + i] = intersection_critical_value(problem, procedure, set, i);
        }
    }

    for larger in 1..size {
        // proper nonempty submasks
        let mut smaller = (larger - 1) & larger;
        while smaller != 0 {
            for i in IntersectionIndex(smaller).members() {
                let a_larger = levels[larger as usize * m + i];
                let a_smaller = levels[smaller as usize * m + i];
                if a_larger > a_smaller {
                    return Ok(MonotonicityReport {
                        holds: false,
                        counterexample: Some(MonotonicityCounterexample {
                            larger: IntersectionIndex(larger),
                            smaller: IntersectionIndex(smaller),
                            index: i,
                            alpha_larger: a_larger,
                            alpha_smaller: a_smaller,
                        }),
                    });
                }
            }
            smaller = (smaller - 1) & larger;
        }
    }
    Ok(MonotonicityReport {
        holds: true,
        counterexample: None,
    })
}

impl MonotonicityCounterexample {
    /// Recomputes both critical values and confirms the violation.
    pub fn verify(&self, problem: &TestingProblem, procedure: Procedure) -> bool {
        self.smaller.mask() & !self.larger.mask() == 0
            && self.smaller != self.larger
            && self.smaller.contains(self.index)
            && intersection_critical_value(problem, procedure, self.larger, self.index)
                == self.alpha_larger
            && intersection_critical_value(problem, procedure, self.smaller, self.index)
                == self.alpha_smaller
            && self.alpha_larger > self.alpha_smaller
    }
}

/// Two problems with `lowered.p <= original.p` componentwise where the
/// lowered problem has fewer rejections.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueMonotonicityCounterexample {
    pub procedure: Procedure,
    pub original: TestingProblem,
    pub lowered: TestingProblem,
    pub original_rejections: RejectionSet,
    pub lowered_rejections: RejectionSet,
}

impl PValueMonotonicityCounterexample {
    pub fn verify(&self) -> bool {
        let dominated = self
            .lowered
            .p_values()
            .iter()
            .zip(self.original.p_values())
            .all(|(q, p)| q <= p);
        dominated
            && self.lowered.weights() == self.original.weights()
            && self.procedure.stepdown(&self.original) == self.original_rejections
            && self.procedure.stepdown(&self.lowered) == self.lowered_rejections
            && self.lowered_rejections.len() < self.original_rejections.len()
    }
}

/// Randomized search for a p-value monotonicity violation.
///
/// Each trial draws `m ∈ {3, 4, 5}`, weights uniform on `[1, 10]`, p-values
/// spread log-uniformly over `[1e-4, 1]`, and lowers a random nonempty
/// subset of p-values by independent uniform factors. Alpha is 0.05.
pub fn find_pvalue_monotonicity_violation(
    procedure: Procedure,
    trials: usize,
    seed: u64,
) -> Option<PValueMonotonicityCounterexample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let m = rng.random_range(3..=5);
        let w: Vec<f64> = (0..m).map(|_| rng.random_range(1.0..=10.0)).collect();
        let p: Vec<f64> = (0..m)
            .map(|_| 10f64.powf(rng.random_range(-4.0..=0.0)))
            .collect();
        let mut q = p.clone();
        let lower: u32 = rng.random_range(1..(1u32 << m));
        for (i, qi) in q.iter_mut().enumerate() {
            if lower >> i & 1 == 1 {
                *qi *= rng.random::<f64>();
            }
        }
        let original = TestingProblem::unlabeled(p, w.clone(), 0.05).expect("valid draw");
        let lowered = original.with_p_values(q).expect("valid draw");
        let original_rejections = procedure.stepdown(&original);
        let lowered_rejections = procedure.stepdown(&lowered);
        if lowered_rejections.len() < original_rejections.len() {
            return Some(PValueMonotonicityCounterexample {
                procedure,
                original,
                lowered,
                original_rejections,
                lowered_rejections,
            });
        }
    }
    None
}
