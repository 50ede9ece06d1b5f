//! A reduced FWER / average power study: Holm, WHP and WAP on equicorrelated
//! one-sample t-tests under each weight scenario.
//!
//!     cargo run --release --example simulation_study [-- reps seed]

use weighted_holm::montecarlo::{run_simulation, ProcedureTag, SimulationConfig, WeightScenario};

fn main() -> weighted_holm::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().map_or(2000, |s| s.parse().expect("reps"));
    let seed: u64 = args.next().map_or(2024, |s| s.parse().expect("seed"));

    println!("scenario  m  pi0  rho   FWER holm/whp/wap     power holm/whp/wap");
    for scenario in WeightScenario::ALL {
        for (m, pi0) in [(10, 0.4), (10, 0.8)] {
            for rho in [0.0, 0.5] {
                let result = run_simulation(&SimulationConfig {
                    m,
                    pi0,
                    rho,
                    n: 15,
                    mu_alt: 0.7,
                    alpha: 0.05,
                    reps,
                    scenario,
                    seed,
                })?;
                let get = |t| result.record(t);
                let (h, w, a) = (get(ProcedureTag::Holm), get(ProcedureTag::Whp), get(ProcedureTag::Wap));
                println!(
                    "{scenario:<8} {m:>2}  {pi0:.1}  {rho:.1}   {:.3}/{:.3}/{:.3}   {:.3}/{:.3}/{:.3}",
                    h.fwer, w.fwer, a.fwer, h.power, w.power, a.power
                );
            }
        }
    }
    Ok(())
}
