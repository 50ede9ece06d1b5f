//! Least favorable configurations: both procedures spend exactly alpha,
//! and a step-down fed the WHP critical values is pushed to alpha as well.
//!
//!     cargo run --release --example sharpness [-- reps]

use weighted_holm::montecarlo::{estimate_sharpness, falsifier_error_rate, rng_new};
use weighted_holm::procedures::whp_critical_values;
use weighted_holm::Procedure;

fn main() -> weighted_holm::Result<()> {
    let reps: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("reps must be an integer"))
        .unwrap_or(200_000);
    let (w, alpha) = ([1.0, 2.0, 3.0], 0.05);

    for (k, procedure) in [Procedure::Whp, Procedure::Wap].into_iter().enumerate() {
        let est = estimate_sharpness(procedure, &w, 3, alpha, reps, &mut rng_new(k as u64))?;
        println!("{procedure}: FWER {:.4} (SE {:.4}) over {reps} draws", est.fwer, est.se);
    }

    let critical = whp_critical_values(&w, alpha);
    for r in 1..=w.len() {
        let est = falsifier_error_rate(&critical, &w, r, alpha, reps, &mut rng_new(10 + r as u64))?;
        println!("falsifier r={r}: error rate {:.4} (SE {:.4})", est.fwer, est.se);
    }

    // WAP is only sharp when the weights are not too lopsided
    match estimate_sharpness(Procedure::Wap, &[1.0, 40.0], 2, alpha, 10, &mut rng_new(0)) {
        Err(e) => println!("w = (1, 40): {e}"),
        Ok(est) => println!("w = (1, 40): {:.4}", est.fwer),
    }
    Ok(())
}
