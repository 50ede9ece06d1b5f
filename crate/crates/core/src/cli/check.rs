//! Property battery behind `wholm check`.

use crate::adjust::{adjusted_wap, adjusted_whp};
use crate::closure::{
    check_consonance, check_monotonicity_condition, ctp, find_pvalue_monotonicity_violation,
    wap_local_test, whp_local_test,
};
use crate::corpus::mixed_problem;
use crate::graphical::run_graphical;
use crate::problem::{OrderKey, TestingProblem};
use crate::procedures::{wap_stepdown, whp_stepdown, Procedure};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    /// First failing problem, described.
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Check {
    test: Box<dyn Fn(&TestingProblem) -> bool>,
    outcome: CheckOutcome,
}

fn describe(problem: &TestingProblem) -> String {
    format!("p={:?} w={:?}", problem.p_values(), problem.weights())
}

const ALPHA_GRID: [f64; 6] = [0.001, 0.01, 0.025, 0.05, 0.1, 0.5];

/// Runs every corpus property on `trials` seeded problems (odd indices from
/// the enriched corpus, even from the uniform one) with `m <= max_m`, plus
/// the randomized p-value monotonicity searches with `trials` draws each.
pub fn run_battery(trials: usize, seed: u64, max_m: usize) -> Vec<CheckOutcome> {
    let mut checks: Vec<Check> = vec![
        check("ctp(WAP local) == WAP step-down", |p| {
            ctp(p, wap_local_test).is_ok_and(|r| r.elementary_rejections().same_rejections(&wap_stepdown(p)))
        }),
        check("ctp(WHP local) == WHP step-down", |p| {
            ctp(p, whp_local_test).is_ok_and(|r| r.elementary_rejections().same_rejections(&whp_stepdown(p)))
        }),
        check("graphical(weighted) == WHP step-down", |p| {
            run_graphical(p, OrderKey::Weighted).is_ok_and(|(r, _)| r.same_rejections(&whp_stepdown(p)))
        }),
        check("graphical(raw) == WAP step-down", |p| {
            run_graphical(p, OrderKey::Raw).is_ok_and(|(r, _)| r.same_rejections(&wap_stepdown(p)))
        }),
        check("WAP rejections within WHP", |p| {
            wap_stepdown(p).is_subset(&whp_stepdown(p))
        }),
        check("adjusted WHP <= adjusted WAP", |p| {
            let (a, b) = (adjusted_whp(p), adjusted_wap(p));
            a.values().iter().zip(b.values()).all(|(x, y)| x <= y)
        }),
        check("adjusted p-values reproduce decisions", |p| {
            let (a, b) = (adjusted_whp(p), adjusted_wap(p));
            ALPHA_GRID.iter().all(|&alpha| {
                let at = p.with_alpha(alpha).expect("grid alpha is valid");
                let whp: Vec<usize> = whp_stepdown(&at).rejected().iter().copied().collect();
                let wap: Vec<usize> = wap_stepdown(&at).rejected().iter().copied().collect();
                a.rejected_at(alpha) == whp && b.rejected_at(alpha) == wap
            })
        }),
        check("consonance of WAP closed test", |p| {
            check_consonance(p, wap_local_test).is_ok_and(|r| r.holds)
        }),
        check("consonance of WHP closed test", |p| {
            check_consonance(p, whp_local_test).is_ok_and(|r| r.holds)
        }),
        check("monotonicity condition for WHP", |p| {
            check_monotonicity_condition(p, Procedure::Whp).is_ok_and(|r| r.holds)
        }),
    ];

    for i in 0..trials as u64 {
        let problem = mixed_problem(seed, i, max_m);
        for c in &mut checks {
            c.outcome.checked += 1;
            if !(c.test)(&problem) {
                c.outcome.failures += 1;
                c.outcome.first_failure.get_or_insert_with(|| describe(&problem));
            }
        }
    }
    let mut outcomes: Vec<CheckOutcome> = checks.into_iter().map(|c| c.outcome).collect();

    let whp = find_pvalue_monotonicity_violation(Procedure::Whp, trials, seed);
    outcomes.push(CheckOutcome {
        name: "no p-value monotonicity violation for WHP",
        checked: trials,
        failures: usize::from(whp.is_some()),
        first_failure: whp.map(|cx| describe(&cx.original)),
    });
    let wap = find_pvalue_monotonicity_violation(Procedure::Wap, trials, seed);
    let verified = wap.as_ref().is_some_and(|cx| cx.verify());
    outcomes.push(CheckOutcome {
        name: "p-value monotonicity violation found for WAP",
        checked: trials,
        failures: usize::from(!verified),
        first_failure: (!verified).then(|| format!("none within {trials} trials")),
    });
    outcomes
}

fn check(name: &'static str, test: impl Fn(&TestingProblem) -> bool + 'static) -> Check {
    Check {
        test: Box::new(test),
        outcome: CheckOutcome {
            name,
            checked: 0,
            failures: 0,
            first_failure: None,
        },
    }
}
