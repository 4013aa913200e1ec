//! Command-line front end. [`run`] returns the process exit code:
//! 0 success, 1 bad input, 2 infeasible or invalid flow, 3 oracle needed or
//! budget exhausted.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::format::{
    instance_to_json, parse_instance, pretty, FormatError, LayoutFile, PairsFile, SolutionFile,
};
use crate::instance::{robust_cost, validate_robust_flow, Instance};
use crate::oracle::{brute_force_optimal_with, OracleOptions, DEFAULT_BUDGET};
use crate::reduction::{
    check_max_split_structure, max_split_instance, partition_to_pair_partition,
    sat_reduction_instance, PairPartitionInstance, SatFormula,
};
use crate::solvers::{solve_with, Method, SolveError, SolveOptions};
use crate::sp::classify_instance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;

/// Environment variable overriding the default oracle budget of `solve`.
pub const BUDGET_ENV: &str = "CFLOW_ORACLE_BUDGET";

#[derive(Debug, Parser)]
#[command(
    name = "cflow",
    version,
    about = "Robust transshipment with consistent flow constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify an instance and solve it with the matching method.
    Solve {
        instance: PathBuf,
        /// Maximum number of transshipment solves the oracle may spend.
        #[arg(long)]
        oracle_budget: Option<u64>,
        /// Run this method regardless of the classification.
        #[arg(long)]
        force_method: Option<Method>,
        /// Fail with exit code 3 instead of falling back to the oracle.
        #[arg(long)]
        no_oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve exactly by enumerating fixed-arc values.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Largest fixed-arc value to try.
        #[arg(long)]
        bound: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against an instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        /// Max-split layout sidecar; adds the structural checks.
        #[arg(long)]
        structure: Option<PathBuf>,
    },
    /// Print the class an instance falls into.
    Classify { instance: PathBuf },
    /// Write a reduction instance.
    Generate {
        #[command(subcommand)]
        kind: Generate,
    },
}

#[derive(Debug, Subcommand)]
enum Generate {
    /// Maximum split instance from pairs such as "2,1;2,1".
    MaxSplit {
        #[arg(long)]
        pairs: String,
        /// Also writes `<stem>.layout.json` beside this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// (3,B2)-SAT instance from clauses such as "1,2,-3;-1,2,3;...".
    Sat {
        #[arg(long, allow_hyphen_values = true)]
        clauses: String,
        /// Variable count; defaults to the largest variable index used.
        #[arg(long)]
        variables: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pair partition instance from integers such as "1,1".
    PairPartition {
        #[arg(long)]
        integers: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::Infeasible(_) => EXIT_INFEASIBLE,
            SolveError::NeedsOracle | SolveError::BudgetExceeded { .. } => EXIT_ORACLE,
            SolveError::NotThisCase(_) | SolveError::Internal(_) => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("cannot write output: {e}"))),
    }
}

fn parse_list(text: &str) -> Result<Vec<i64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<i64>()
                .map_err(|e| Failure::input(format!("`{s}`: {e}")))
        })
        .collect()
}

fn parse_groups(text: &str) -> Result<Vec<Vec<i64>>, Failure> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_list)
        .collect()
}

fn budget_from_env() -> Result<Option<u64>, Failure> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| Failure::input(format!("{BUDGET_ENV}: {e}"))),
        Err(_) => Ok(None),
    }
}

fn layout_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.layout.json"))
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Solve {
            instance,
            oracle_budget,
            force_method,
            no_oracle,
            out,
        } => {
            let g = load_instance(&instance)?;
            let budget = match oracle_budget {
                Some(b) => b,
                None => budget_from_env()?.unwrap_or(DEFAULT_BUDGET),
            };
            let options = SolveOptions {
                allow_oracle: !no_oracle,
                oracle: OracleOptions {
                    bound: None,
                    budget,
                },
                force: force_method,
            };
            let result = solve_with(&g, &options)?;
            let _ = writeln!(stderr, "method {}, cost {}", result.method, result.cost);
            emit(
                &pretty(&SolutionFile::from_result(&g, &result)),
                out.as_deref(),
                stdout,
            )?;
            Ok(EXIT_OK)
        }
        Command::Oracle {
            instance,
            budget,
            bound,
            out,
        } => {
            let g = load_instance(&instance)?;
            let result = brute_force_optimal_with(&g, &OracleOptions { bound, budget })?;
            let _ = writeln!(stderr, "oracle cost {}", result.cost);
            emit(
                &pretty(&SolutionFile::from_result(&g, &result)),
                out.as_deref(),
                stdout,
            )?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            instance,
            solution,
            structure,
        } => {
            let g = load_instance(&instance)?;
            let sol = SolutionFile::parse(&read(&solution)?)?;
            let flow = sol.flow(&g)?;
            let mut ok = true;
            let report = validate_robust_flow(&g, &flow);
            if report.is_ok() {
                let _ = writeln!(stdout, "feasibility: pass");
                let cost = robust_cost(&g, &flow).expect("shape validated");
                if cost == sol.cost {
                    let _ = writeln!(stdout, "cost: pass ({cost})");
                } else {
                    ok = false;
                    let _ = writeln!(
                        stdout,
                        "cost: fail (file states {}, flow costs {cost})",
                        sol.cost
                    );
                }
            } else {
                ok = false;
                let _ = writeln!(stdout, "feasibility: fail");
                for v in &report.violations {
                    let _ = writeln!(stdout, "  {v}");
                }
            }
            if let Some(path) = structure {
                let layout = LayoutFile::parse(&read(&path)?)?.to_layout(&g)?;
                for check in check_max_split_structure(&layout, &flow).checks {
                    ok &= check.passed;
                    let verdict = if check.passed { "pass" } else { "fail" };
                    let _ = writeln!(stdout, "{}: {verdict} ({})", check.name, check.detail);
                }
            }
            Ok(if ok { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::Classify { instance } => {
            let g = load_instance(&instance)?;
            let class = classify_instance(&g);
            let _ = writeln!(stdout, "{}", class.tag());
            if let crate::sp::InstanceClass::General { reason } = class {
                let _ = writeln!(stderr, "{reason}");
            }
            Ok(EXIT_OK)
        }
        Command::Generate { kind } => generate(kind, stdout),
    }
}

fn generate(kind: Generate, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let reduction = |e: crate::reduction::ReductionError| Failure::input(e.to_string());
    match kind {
        Generate::MaxSplit { pairs, out } => {
            let pairs = parse_groups(&pairs)?
                .into_iter()
                .map(|p| match p.as_slice() {
                    [a, b] => Ok((*a, *b)),
                    _ => Err(Failure::input("each pair needs exactly two integers")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let pp = PairPartitionInstance::new(pairs).map_err(reduction)?;
            let layout = max_split_instance(&pp).map_err(reduction)?;
            emit(&instance_to_json(&layout.instance), out.as_deref(), stdout)?;
            if let Some(out) = out {
                emit(
                    &pretty(&LayoutFile::from_layout(&layout)),
                    Some(&layout_path(&out)),
                    stdout,
                )?;
            }
        }
        Generate::Sat {
            clauses,
            variables,
            out,
        } => {
            let clauses = parse_groups(&clauses)?
                .into_iter()
                .map(|c| {
                    let lits: Vec<i32> = c.iter().map(|&x| x as i32).collect();
                    <[i32; 3]>::try_from(lits)
                        .map_err(|_| Failure::input("each clause needs exactly three literals"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let n = variables.unwrap_or_else(|| {
                clauses
                    .iter()
                    .flatten()
                    .map(|l| l.unsigned_abs() as usize)
                    .max()
                    .unwrap_or(0)
            });
            let formula = SatFormula::new(n, clauses).map_err(reduction)?;
            emit(
                &instance_to_json(&sat_reduction_instance(&formula)),
                out.as_deref(),
                stdout,
            )?;
        }
        Generate::PairPartition { integers, out } => {
            let pp = partition_to_pair_partition(&parse_list(&integers)?).map_err(reduction)?;
            emit(
                &pretty(&PairsFile::from_instance(&pp)),
                out.as_deref(),
                stdout,
            )?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
