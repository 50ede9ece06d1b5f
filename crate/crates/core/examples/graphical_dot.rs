//! Graphical procedure traces rendered as Graphviz DOT, one digraph per
//! stage.
//!
//!     cargo run --example graphical_dot [-- out_dir]
//!     dot -Tsvg out_dir/weighted/stage_1.dot > stage_1.svg

use std::path::PathBuf;

use weighted_holm::graphical::{export_dot_stages, initial_graph, run_graphical};
use weighted_holm::{OrderKey, TestingProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args_os().nth(1).map(PathBuf::from);
    let problem = TestingProblem::unlabeled(vec![0.01, 0.014, 0.3], vec![1.0, 2.0, 3.0], 0.05)?;
    let initial = initial_graph(problem.weights(), problem.alpha());

    for (name, key) in [("weighted", OrderKey::Weighted), ("raw", OrderKey::Raw)] {
        let (rejected, trace) = run_graphical(&problem, key)?;
        println!("// {name} ordering rejects {rejected}");
        let stages = export_dot_stages(&trace, &initial, problem.labels());
        match &out_dir {
            Some(dir) => {
                let dir = dir.join(name);
                std::fs::create_dir_all(&dir)?;
                for (k, dot) in stages.iter().enumerate() {
                    std::fs::write(dir.join(format!("stage_{k}.dot")), dot)?;
                }
                println!("// {} file(s) in {}", stages.len(), dir.display());
            }
            None => stages.iter().for_each(|dot| print!("{dot}")),
        }
    }
    Ok(())
}
