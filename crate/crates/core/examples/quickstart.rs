//! Three hypotheses where weighting reorders the p-values: WHP rejects two,
//! WAP rejects none.
//!
//!     cargo run --example quickstart

use weighted_holm::adjust::{adjusted_wap, adjusted_whp};
use weighted_holm::{wap_stepdown, weighted_pvalues, whp_stepdown, TestingProblem};

fn main() -> weighted_holm::Result<()> {
    let problem = TestingProblem::new(
        vec!["H1".into(), "H2".into(), "H3".into()],
        vec![0.01, 0.014, 0.3],
        vec![1.0, 2.0, 3.0],
        0.05,
    )?;

    println!("weighted p-values: {:?}", weighted_pvalues(&problem).values());

    let whp = whp_stepdown(&problem);
    let wap = wap_stepdown(&problem);
    println!("WHP rejects {whp}");
    for step in whp.trace() {
        println!(
            "  step {}: {} at level {:.6}",
            step.step,
            problem.labels()[step.index],
            step.threshold.unwrap_or(f64::NAN)
        );
    }
    println!("WAP rejects {wap}");

    let (a, b) = (adjusted_whp(&problem), adjusted_wap(&problem));
    println!("\nhypothesis  adj WHP  adj WAP");
    for (i, label) in problem.labels().iter().enumerate() {
        println!("{label:<10}  {:.4}   {:.4}", a.values()[i], b.values()[i]);
    }
    Ok(())
}
