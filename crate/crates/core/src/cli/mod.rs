//! The `wholm` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 a `check` property
//! failed.

pub mod check;
pub mod io;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::adjust::{adjusted_wap, adjusted_whp};
use crate::closure::{ctp, wap_local_test, whp_local_test};
use crate::error::{Error, Result};
use crate::graphical::{export_dot_stages, initial_graph, run_graphical};
use crate::montecarlo::{estimate_sharpness, rng_new, run_simulation, ProcedureTag};
use crate::problem::{OrderKey, TestingProblem};
use crate::procedures::{wap_stepdown, whp_stepdown, Procedure};

pub use io::{load_problem_csv, parse_problem_csv, parse_simulation_config, Precision, SimulationPlan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "wholm", version, about = "Weighted Holm multiple testing (WHP and WAP)")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcedureArg {
    Whp,
    Wap,
}

impl From<ProcedureArg> for Procedure {
    fn from(p: ProcedureArg) -> Self {
        match p {
            ProcedureArg::Whp => Procedure::Whp,
            ProcedureArg::Wap => Procedure::Wap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderingArg {
    Weighted,
    Raw,
}

impl From<OrderingArg> for OrderKey {
    fn from(o: OrderingArg) -> Self {
        match o {
            OrderingArg::Weighted => OrderKey::Weighted,
            OrderingArg::Raw => OrderKey::Raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum PrecisionArg {
    #[default]
    Rounded,
    Full,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Rounded => Precision::Rounded,
            PrecisionArg::Full => Precision::Full,
        }
    }
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let alpha: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(format!("alpha must lie in (0, 1), got {alpha}"))
    }
}

fn existing_file(s: &str) -> std::result::Result<PathBuf, String> {
    let path = PathBuf::from(s);
    if path.is_file() {
        Ok(path)
    } else {
        Err(format!("no such file `{s}`"))
    }
}

fn parse_weights(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a number", x.trim()))
        })
        .collect()
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Adjusted p-values and decisions for WHP and WAP.
    Adjust {
        #[arg(long, value_parser = existing_file)]
        input: PathBuf,
        #[arg(long, value_parser = parse_alpha, default_value = "0.05")]
        alpha: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        precision: PrecisionArg,
    },
    /// Full closed testing decision table.
    Ctp {
        #[arg(long, value_parser = existing_file)]
        input: PathBuf,
        #[arg(long, value_parser = parse_alpha, default_value = "0.05")]
        alpha: f64,
        #[arg(long, value_enum)]
        local_test: ProcedureArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Graphical procedure with one DOT file per stage.
    Graph {
        #[arg(long, value_parser = existing_file)]
        input: PathBuf,
        #[arg(long, value_parser = parse_alpha, default_value = "0.05")]
        alpha: f64,
        #[arg(long, value_enum)]
        ordering: OrderingArg,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        precision: PrecisionArg,
    },
    /// FWER and average power of Holm, WHP and WAP.
    Simulate {
        #[arg(long, value_parser = existing_file)]
        config: PathBuf,
        /// Overrides the config file's `seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        precision: PrecisionArg,
    },
    /// Empirical FWER under the least favorable configuration.
    Sharpness {
        #[arg(long, value_enum)]
        procedure: ProcedureArg,
        #[arg(long, value_parser = parse_weights)]
        weights: std::vec::Vec<f64>,
        /// Number of true nulls; the first `m0` weights belong to them.
        #[arg(long)]
        m0: usize,
        #[arg(long, value_parser = parse_alpha, default_value = "0.05")]
        alpha: f64,
        #[arg(long)]
        reps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        precision: PrecisionArg,
    },
    /// Runs the property battery on a seeded random corpus.
    Check {
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(1..=12))]
        max_m: u8,
    },
}

/// A validated command line.
#[derive(Debug, Clone, PartialEq)]
pub enum CommandSpec {
    Adjust {
        input: PathBuf,
        alpha: f64,
        output: Option<PathBuf>,
        precision: Precision,
    },
    Ctp {
        input: PathBuf,
        alpha: f64,
        local_test: Procedure,
        output: Option<PathBuf>,
    },
    Graph {
        input: PathBuf,
        alpha: f64,
        ordering: OrderKey,
        out_dir: PathBuf,
        precision: Precision,
    },
    Simulate {
        config: PathBuf,
        seed: Option<u64>,
        output: Option<PathBuf>,
        precision: Precision,
    },
    Sharpness {
        procedure: Procedure,
        weights: Vec<f64>,
        m0: usize,
        alpha: f64,
        reps: usize,
        seed: u64,
        output: Option<PathBuf>,
        precision: Precision,
    },
    Check {
        trials: usize,
        seed: u64,
        max_m: usize,
    },
}

/// Usage failure, or a request for help/version text (`exit_code` 0).
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError {
    pub message: String,
    pub exit_code: i32,
}

pub fn parse_args<I, T>(argv: I) -> std::result::Result<CommandSpec, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| UsageError {
        message: e.render().to_string(),
        exit_code: if e.use_stderr() { EXIT_USAGE } else { EXIT_OK },
    })?;
    Ok(match args.command {
        Command::Adjust {
            input,
            alpha,
            output,
            precision,
        } => CommandSpec::Adjust {
            input,
            alpha,
            output,
            precision: precision.into(),
        },
        Command::Ctp {
            input,
            alpha,
            local_test,
            output,
        } => CommandSpec::Ctp {
            input,
            alpha,
            local_test: local_test.into(),
            output,
        },
        Command::Graph {
            input,
            alpha,
            ordering,
            out_dir,
            precision,
        } => CommandSpec::Graph {
            input,
            alpha,
            ordering: ordering.into(),
            out_dir,
            precision: precision.into(),
        },
        Command::Simulate {
            config,
            seed,
            output,
            precision,
        } => CommandSpec::Simulate {
            config,
            seed,
            output,
            precision: precision.into(),
        },
        Command::Sharpness {
            procedure,
            weights,
            m0,
            alpha,
            reps,
            seed,
            output,
            precision,
        } => CommandSpec::Sharpness {
            procedure: procedure.into(),
            weights,
            m0,
            alpha,
            reps,
            seed,
            output,
            precision: precision.into(),
        },
        Command::Check {
            trials,
            seed,
            max_m,
        } => CommandSpec::Check {
            trials,
            seed,
            max_m: max_m.into(),
        },
    })
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let spec = match parse_args(argv) {
        Ok(spec) => spec,
        Err(usage) => {
            let out: &mut dyn Write = if usage.exit_code == EXIT_OK { stdout } else { stderr };
            let _ = write!(out, "{}", usage.message);
            return usage.exit_code;
        }
    };
    match execute(&spec, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_DATA
        }
    }
}

fn emit(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::Input(format!("stdout: {e}"))),
    }
}

fn load(input: &Path, alpha: f64) -> Result<TestingProblem> {
    load_problem_csv(input, alpha)
}

/// Runs a validated command. Returns the exit code for completed runs.
pub fn execute(spec: &CommandSpec, stdout: &mut dyn Write) -> Result<i32> {
    match spec {
        CommandSpec::Adjust {
            input,
            alpha,
            output,
            precision,
        } => {
            let problem = load(input, *alpha)?;
            emit(output.as_deref(), &adjust_csv(&problem, *precision), stdout)?;
        }
        CommandSpec::Ctp {
            input,
            alpha,
            local_test,
            output,
        } => {
            let problem = load(input, *alpha)?;
            let report = match local_test {
                Procedure::Whp => ctp(&problem, whp_local_test)?,
                Procedure::Wap => ctp(&problem, wap_local_test)?,
            };
            let mut text = String::from("subset_bitmask,rejected\n");
            for (set, decision) in report.local_decisions() {
                text.push_str(&format!("{},{}\n", set.mask(), decision));
            }
            emit(output.as_deref(), &text, stdout)?;
        }
        CommandSpec::Graph {
            input,
            alpha,
            ordering,
            out_dir,
            precision,
        } => {
            let problem = load(input, *alpha)?;
            let (rejections, trace) = run_graphical(&problem, *ordering)?;
            let initial = initial_graph(problem.weights(), problem.alpha());
            let io_err = |e: std::io::Error| Error::Input(format!("{}: {e}", out_dir.display()));
            fs::create_dir_all(out_dir).map_err(io_err)?;
            for (k, dot) in export_dot_stages(&trace, &initial, problem.labels())
                .iter()
                .enumerate()
            {
                fs::write(out_dir.join(format!("stage_{k}.dot")), dot).map_err(io_err)?;
            }
            let mut summary = String::from("hypothesis,rejected,step,level\n");
            for (i, label) in problem.labels().iter().enumerate() {
                match rejections.trace().iter().find(|s| s.index == i) {
                    Some(step) => summary.push_str(&format!(
                        "{label},true,{},{}\n",
                        step.step,
                        precision.general(step.threshold.unwrap_or(f64::NAN))
                    )),
                    None => summary.push_str(&format!("{label},false,,\n")),
                }
            }
            fs::write(out_dir.join("rejections.csv"), &summary).map_err(io_err)?;
            let _ = writeln!(
                stdout,
                "{} stage(s) written to {}; rejected {}",
                trace.len() + 1,
                out_dir.display(),
                rejections
            );
        }
        CommandSpec::Simulate {
            config,
            seed,
            output,
            precision,
        } => {
            let text = fs::read_to_string(config)
                .map_err(|e| Error::Input(format!("{}: {e}", config.display())))?;
            let plan = parse_simulation_config(&text)?;
            let seed = seed.or(plan.seed).ok_or_else(|| {
                Error::Input("a seed is required: pass --seed or set `seed` in the config".into())
            })?;
            let mut out =
                String::from("procedure,m,pi0,rho,scenario,fwer,fwer_se,power,power_se,reps,seed\n");
            for cell in plan.cells(seed) {
                let result = run_simulation(&cell)?;
                for tag in ProcedureTag::ALL {
                    let r = result.record(tag);
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{}\n",
                        tag,
                        cell.m,
                        precision.general(cell.pi0),
                        precision.general(cell.rho),
                        cell.scenario,
                        precision.general(r.fwer),
                        precision.general(r.fwer_se),
                        precision.general(r.power),
                        precision.general(r.power_se),
                        cell.reps,
                        cell.seed
                    ));
                }
            }
            emit(output.as_deref(), &out, stdout)?;
        }
        CommandSpec::Sharpness {
            procedure,
            weights,
            m0,
            alpha,
            reps,
            seed,
            output,
            precision,
        } => {
            let mut rng = rng_new(*seed);
            let est = estimate_sharpness(*procedure, weights, *m0, *alpha, *reps, &mut rng)?;
            let text = format!(
                "procedure,m0,alpha,reps,fwer,fwer_se,seed\n{},{},{},{},{},{},{}\n",
                procedure,
                m0,
                precision.general(*alpha),
                reps,
                precision.general(est.fwer),
                precision.general(est.se),
                seed
            );
            emit(output.as_deref(), &text, stdout)?;
        }
        CommandSpec::Check {
            trials,
            seed,
            max_m,
        } => {
            let outcomes = check::run_battery(*trials, *seed, *max_m);
            let mut all = true;
            for o in &outcomes {
                let status = if o.passed() { "PASS" } else { "FAIL" };
                let _ = write!(stdout, "{status} {} ({} checked", o.name, o.checked);
                if let Some(first) = &o.first_failure {
                    let _ = write!(stdout, ", {} failed; first: {first}", o.failures);
                }
                let _ = writeln!(stdout, ")");
                all &= o.passed();
            }
            let passed = outcomes.iter().filter(|o| o.passed()).count();
            let _ = writeln!(stdout, "{passed}/{} properties passed", outcomes.len());
            return Ok(if all { EXIT_OK } else { EXIT_PROPERTY });
        }
    }
    Ok(EXIT_OK)
}

/// `hypothesis,p_value,weight,adj_whp,adj_wap,reject_whp,reject_wap` at the
/// problem's alpha.
pub fn adjust_csv(problem: &TestingProblem, precision: Precision) -> String {
    let whp = adjusted_whp(problem);
    let wap = adjusted_wap(problem);
    let reject_whp = whp_stepdown(problem);
    let reject_wap = wap_stepdown(problem);
    let mut out = String::from("hypothesis,p_value,weight,adj_whp,adj_wap,reject_whp,reject_wap\n");
    for i in 0..problem.m() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            problem.labels()[i],
            precision.general(problem.p_values()[i]),
            precision.general(problem.weights()[i]),
            precision.adjusted(whp.values()[i]),
            precision.adjusted(wap.values()[i]),
            reject_whp.contains(i),
            reject_wap.contains(i),
        ));
    }
    out
}
