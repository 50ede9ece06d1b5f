//! Adjusted p-values for the two bundled trial data sets.
//!
//!     cargo run --example clinical_trials [-- path/to/problem.csv ...]

use std::path::{Path, PathBuf};

use weighted_holm::cli::{adjust_csv, load_problem_csv, Precision};

fn main() {
    let mut paths: Vec<PathBuf> = std::env::args_os().skip(1).map(PathBuf::from).collect();
    if paths.is_empty() {
        let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        paths = vec![data.join("ards.csv"), data.join("diabetes.csv")];
    }
    for path in paths {
        match load_problem_csv(&path, 0.05) {
            Ok(problem) => {
                println!("# {}", path.display());
                print!("{}", adjust_csv(&problem, Precision::Rounded));
                println!();
            }
            Err(e) => {
                eprintln!("{e}");
                std::process::exit(2);
            }
        }
    }
}
