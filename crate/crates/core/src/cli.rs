//! The `lrb` command line.
//!
//! Exit codes: 0 success, 1 domain failure, 2 input or parse error,
//! 3 distinctness hypothesis not satisfied (`spectrum` only).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::families::{FamilyKind, FamilySpec};
use crate::io::{self, FormatError};
use crate::lattice::{self, build_support_lattice, SupportLattice};
use crate::semigroup::{validate_semigroup, verify_left_regular_band, MultiplicationTable, DEFAULT_ELEMENT_CAP};
use crate::spectra::{spectrum_report, ActionSide};
use crate::walks::{measure_report, validate_probability, walk_transition_matrix, StateSpace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lrb", version, about = "Exact spectra of left regular band random walks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest element count accepted.
    #[arg(long, default_value_t = DEFAULT_ELEMENT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StatesArg {
    All,
    MinimalIdeal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Free,
    Braid,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the semigroup axioms and the left regular band laws.
    Validate {
        table: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print the lattice of principal left ideals.
    Lattice {
        table: PathBuf,
        /// Emit the Hasse diagram as Graphviz DOT.
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues, minimal polynomial and verification flags for a weighted element.
    Spectrum {
        table: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, value_enum, default_value = "right")]
        side: SideArg,
        #[command(flatten)]
        common: Common,
    },
    /// Random walk driven by a probability measure.
    Walk {
        table: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, value_enum, default_value = "minimal-ideal")]
        states: StatesArg,
        #[command(flatten)]
        common: Common,
    },
    /// Write a standard left regular band table.
    Family {
        #[arg(value_enum)]
        kind: FamilyArg,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Self::Validate { common, .. }
            | Self::Lattice { common, .. }
            | Self::Spectrum { common, .. }
            | Self::Walk { common, .. }
            | Self::Family { common, .. } => common,
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<String>,
    /// False when the report already went to `--out`.
    pub print_report: bool,
    pub message: Option<String>,
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Self::Input(_) => EXIT_INPUT,
            Self::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Self::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_table(path: &Path, cap: usize) -> Result<MultiplicationTable, Failure> {
    let table = io::parse_table(&read(path)?)?;
    if table.len() > cap {
        return Err(Failure::Input(format!("table has {} elements, over the cap of {cap}", table.len())));
    }
    Ok(table)
}

/// Loads a table and insists on it being a left regular band.
fn load_lrb(path: &Path, cap: usize) -> Result<(MultiplicationTable, SupportLattice), Failure> {
    let table = load_table(path, cap)?;
    let diagnostic = validate_semigroup(&table);
    if !diagnostic.is_ok() {
        return Err(Failure::Domain(format!("not a monoid: {diagnostic}")));
    }
    let laws = verify_left_regular_band(&table);
    if !laws.is_lrb() {
        return Err(Failure::Domain(format!(
            "not a left regular band (band: {}, left regular: {})",
            laws.is_band, laws.is_left_regular
        )));
    }
    let lattice = build_support_lattice(&table).map_err(|e| Failure::Domain(e.to_string()))?;
    Ok((table, lattice))
}

fn execute(command: &Command) -> Result<(i32, String), Failure> {
    match command {
        Command::Validate { table, common } => {
            let table = load_table(table, common.cap)?;
            let diagnostic = validate_semigroup(&table);
            let laws = verify_left_regular_band(&table);
            let code = if diagnostic.is_ok() && laws.is_lrb() { EXIT_OK } else { EXIT_DOMAIN };
            Ok((code, io::to_pretty(&io::validation_json(&table, &diagnostic, &laws))))
        }
        Command::Lattice { table, dot, common } => {
            let (table, lattice) = load_lrb(table, common.cap)?;
            let text = if *dot {
                lattice::to_dot(&table, &lattice)
            } else {
                io::to_pretty(&io::lattice_json(&table, &lattice))
            };
            Ok((EXIT_OK, text))
        }
        Command::Spectrum { table, weights, side, common } => {
            let (table, lattice) = load_lrb(table, common.cap)?;
            let w = io::parse_weights(&read(weights)?, &table)?;
            let side = match side {
                SideArg::Left => ActionSide::Left,
                SideArg::Right => ActionSide::Right,
            };
            let report = spectrum_report(&w, &table, &lattice, side).map_err(|e| Failure::Domain(e.to_string()))?;
            let code = if !report.all_checks_pass() {
                EXIT_DOMAIN
            } else if !report.hypothesis_ok() {
                EXIT_HYPOTHESIS
            } else {
                EXIT_OK
            };
            Ok((code, io::to_pretty(&io::spectrum_json(&table, &lattice, &report))))
        }
        Command::Walk { table, weights, states, common } => {
            let (table, lattice) = load_lrb(table, common.cap)?;
            let w = io::parse_weights(&read(weights)?, &table)?;
            let p = validate_probability(w).map_err(|e| Failure::Domain(e.to_string()))?;
            let states = match states {
                StatesArg::All => StateSpace::All,
                StatesArg::MinimalIdeal => StateSpace::MinimalIdeal,
            };
            let domain = |e: crate::walks::WalkError| Failure::Domain(e.to_string());
            let measure = measure_report(&p, &table, &lattice).map_err(domain)?;
            let walk = walk_transition_matrix(&p, &table, &lattice, states).map_err(domain)?;
            let code = if walk.rows_stochastic && walk.annihilation_ok != Some(false) { EXIT_OK } else { EXIT_DOMAIN };
            Ok((code, io::to_pretty(&io::walk_json(&table, &measure, &walk))))
        }
        Command::Family { kind, n, common } => {
            let kind = match kind {
                FamilyArg::Free => FamilyKind::FreeLrb,
                FamilyArg::Braid => FamilyKind::BraidFaces,
            };
            let table = FamilySpec::new(kind, *n).build(common.cap).map_err(|e| Failure::Domain(e.to_string()))?;
            Ok((EXIT_OK, io::write_table(&table)))
        }
    }
}

/// Runs one command, writing the report to `--out` when given.
pub fn run(cli: &Cli) -> Outcome {
    match execute(&cli.command) {
        Ok((code, text)) => match &cli.command.common().out {
            Some(path) => match fs::write(path, &text) {
                Ok(()) => Outcome { code, report: Some(text), print_report: false, message: None },
                Err(e) => Outcome {
                    code: EXIT_INPUT,
                    report: None,
                    print_report: false,
                    message: Some(format!("{}: {e}", path.display())),
                },
            },
            None => Outcome { code, report: Some(text), print_report: true, message: None },
        },
        Err(failure) => Outcome { code: failure.code(), report: None, print_report: false, message: Some(failure.to_string()) },
    }
}

/// Parses arguments (including the program name) and runs the command.
/// Usage errors map to exit code 2.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            Outcome { code, report: None, print_report: false, message: Some(e.to_string()) }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(["lrb", "frobnicate"]).code, EXIT_INPUT);
        assert_eq!(run_args(["lrb", "family", "free"]).code, EXIT_INPUT);
    }

    #[test]
    fn family_cap_is_a_domain_failure() {
        let out = run_args(["lrb", "family", "free", "--n", "50"]);
        assert_eq!(out.code, EXIT_DOMAIN);
        assert!(out.message.unwrap().contains("cap"));
    }

    #[test]
    fn missing_file_is_input_error() {
        assert_eq!(run_args(["lrb", "validate", "/nonexistent/table.json"]).code, EXIT_INPUT);
    }
}
