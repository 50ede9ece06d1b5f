//! Closed testing view of both procedures: the local test table, consonance,
//! the intersection-level monotonicity condition and a randomized search for
//! p-value monotonicity violations.
//!
//!     cargo run --release --example closed_testing

use weighted_holm::closure::{
    check_consonance, check_monotonicity_condition, ctp, find_pvalue_monotonicity_violation,
    local_test_for,
};
use weighted_holm::{Procedure, TestingProblem};

fn main() -> weighted_holm::Result<()> {
    let problem = TestingProblem::unlabeled(vec![0.01, 0.014, 0.3], vec![1.0, 2.0, 3.0], 0.05)?;

    for procedure in [Procedure::Whp, Procedure::Wap] {
        let test = local_test_for(procedure);
        let report = ctp(&problem, test)?;
        println!("{procedure} local tests");
        for (set, rejected) in report.local_decisions() {
            let members: Vec<String> = set.members().map(|i| problem.labels()[i].clone()).collect();
            println!(
                "  {{{}}}: local {}, closed {}",
                members.join(", "),
                if rejected { "reject" } else { "accept" },
                if report.closed_decision(set) { "reject" } else { "accept" }
            );
        }
        println!("  elementary rejections: {}", report.elementary_rejections());
        println!("  consonant: {}", check_consonance(&problem, test)?.holds);
        let mono = check_monotonicity_condition(&problem, procedure)?;
        println!("  monotonicity condition: {}", mono.holds);
        if let Some(cx) = mono.counterexample {
            println!("    {cx:?}");
        }
    }

    for procedure in [Procedure::Whp, Procedure::Wap] {
        match find_pvalue_monotonicity_violation(procedure, 100_000, 1) {
            Some(cx) => {
                println!("\n{procedure}: lowering p-values lost rejections");
                println!("  weights  {:?}", cx.original.weights());
                println!("  original {:?} -> {}", cx.original.p_values(), cx.original_rejections);
                println!("  lowered  {:?} -> {}", cx.lowered.p_values(), cx.lowered_rejections);
                println!("  verified: {}", cx.verify());
            }
            None => println!("\n{procedure}: no p-value monotonicity violation in 100000 trials"),
        }
    }
    Ok(())
}
