//! File formats: problem CSV, simulation config, and number formatting.

use std::path::Path;

use crate::error::{Error, Result};
use crate::montecarlo::{SimulationConfig, WeightScenario};
use crate::problem::TestingProblem;

pub const PROBLEM_HEADER: [&str; 3] = ["hypothesis", "p_value", "weight"];

/// Reads a `hypothesis,p_value,weight` CSV. Row order becomes hypothesis
/// order.
pub fn load_problem_csv(path: &Path, alpha: f64) -> Result<TestingProblem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_problem_csv(&text, alpha)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn parse_problem_csv(text: &str, alpha: f64) -> Result<TestingProblem> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Input(format!("unreadable header: {e}")))?
        .clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Input(format!(
            "empty file, expected header `{}`",
            PROBLEM_HEADER.join(",")
        )));
    }
    if header.iter().ne(PROBLEM_HEADER) {
        return Err(Error::Input(format!(
            "header is `{}`, expected `{}`",
            header.iter().collect::<Vec<_>>().join(","),
            PROBLEM_HEADER.join(",")
        )));
    }

    let (mut labels, mut p, mut w) = (Vec::new(), Vec::new(), Vec::new());
    for (k, record) in reader.records().enumerate() {
        // header is line 1
        let line = k + 2;
        let record = record.map_err(|e| Error::Input(format!("line {line}: {e}")))?;
        if record.len() != 3 {
            return Err(Error::Input(format!(
                "line {line}: expected 3 columns, found {}",
                record.len()
            )));
        }
        let number = |col: usize| -> Result<f64> {
            record[col].parse::<f64>().map_err(|_| {
                Error::Input(format!(
                    "line {line}, column {}: `{}` is not a number",
                    PROBLEM_HEADER[col], &record[col]
                ))
            })
        };
        labels.push(record[0].to_string());
        p.push(number(1)?);
        w.push(number(2)?);
    }
    if labels.is_empty() {
        return Err(Error::Input("no hypotheses after the header".into()));
    }
    TestingProblem::new(labels, p, w, alpha)
}

/// A simulation config file: one cell per entry of `rho_list`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPlan {
    pub m: usize,
    pub pi0: f64,
    pub rho_list: Vec<f64>,
    pub n: usize,
    pub mu_alt: f64,
    pub alpha: f64,
    pub reps: usize,
    pub scenario: WeightScenario,
    pub seed: Option<u64>,
}

impl SimulationPlan {
    /// Cells in `rho_list` order, all sharing `seed`.
    pub fn cells(&self, seed: u64) -> Vec<SimulationConfig> {
        self.rho_list
            .iter()
            .map(|&rho| SimulationConfig {
                m: self.m,
                pi0: self.pi0,
                rho,
                n: self.n,
                mu_alt: self.mu_alt,
                alpha: self.alpha,
                reps: self.reps,
                scenario: self.scenario,
                seed,
            })
            .collect()
    }
}

/// Parses `key = value` lines. `#` starts a comment. Required keys: `m`,
/// `pi0`, `rho_list` (comma separated), `n`, `mu_alt`, `alpha`, `reps`,
/// `scenario`; `seed` is optional.
pub fn parse_simulation_config(text: &str) -> Result<SimulationPlan> {
    let mut entries = std::collections::BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("line {}: expected key=value", k + 1)))?;
        let key = key.trim().to_string();
        if !matches!(
            key.as_str(),
            "m" | "pi0" | "rho_list" | "n" | "mu_alt" | "alpha" | "reps" | "scenario" | "seed"
        ) {
            return Err(Error::Input(format!("line {}: unknown key `{key}`", k + 1)));
        }
        if entries.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Input(format!("line {}: duplicate key `{key}`", k + 1)));
        }
    }
    fn get<'a>(
        entries: &'a std::collections::BTreeMap<String, String>,
        key: &str,
    ) -> Result<&'a str> {
        entries
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Input(format!("missing key `{key}`")))
    }
    fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
        value
            .parse()
            .map_err(|_| Error::Input(format!("key `{key}`: `{value}` is not a valid number")))
    }

    let rho_list = get(&entries, "rho_list")?
        .split(',')
        .map(|s| num::<f64>("rho_list", s.trim()))
        .collect::<Result<Vec<_>>>()?;
    if rho_list.is_empty() {
        return Err(Error::Input("rho_list is empty".into()));
    }
    Ok(SimulationPlan {
        m: num("m", get(&entries, "m")?)?,
        pi0: num("pi0", get(&entries, "pi0")?)?,
        rho_list,
        n: num("n", get(&entries, "n")?)?,
        mu_alt: num("mu_alt", get(&entries, "mu_alt")?)?,
        alpha: num("alpha", get(&entries, "alpha")?)?,
        reps: num("reps", get(&entries, "reps")?)?,
        scenario: get(&entries, "scenario")?.parse()?,
        seed: entries.get("seed").map(|s| num("seed", s)).transpose()?,
    })
}

/// Float formatting for output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Six significant digits; adjusted p-values to four decimals.
    #[default]
    Rounded,
    /// Shortest representation that round-trips.
    Full,
}

impl Precision {
    pub fn general(self, x: f64) -> String {
        match self {
            Precision::Rounded => format_significant(x, 6),
            Precision::Full => format!("{x}"),
        }
    }

    pub fn adjusted(self, x: f64) -> String {
        match self {
            Precision::Rounded => format!("{x:.4}"),
            Precision::Full => format!("{x}"),
        }
    }
}

/// `x` with `sig` significant digits, trailing zeros dropped, switching to
/// exponent notation for very small or large magnitudes.
pub fn format_significant(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
