use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser as ClapParser, Subcommand};
use thiserror::Error;

use crate::driver::{solve, verify, DriverError, SolveOptions, SolveResult};
use crate::injury::{check_finite_injury, check_weakly_finite_injury, height_o, verify_descent, InjuryTrace, InjuryViolation, RemainingHeight};
use crate::trees::TowerConfig;

use super::format::{parse_substitution, parse_trace, print_instance, substitution_lines, write_substitution, write_trace, SolutionRecord};
use super::gen::{generate, GenParams};
use super::parse::{Instance, ParseError, Parser};

/// Process exit status by failure category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Verification = 1,
    Parse = 2,
    Fuel = 3,
    Io = 4,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solve(#[from] DriverError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Io { .. } => Exit::Io,
            CliError::Parse { .. } | CliError::Usage(_) => Exit::Parse,
            CliError::Solve(e) if e.is_fuel() => Exit::Fuel,
            CliError::Solve(_) | CliError::Failed(_) => Exit::Verification,
        }
    }
}

#[derive(Debug, ClapParser)]
#[command(name = "epsengine", version, about = "Epsilon-substitution solver for critical formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SolveFlags {
    /// Search steps allowed per level.
    #[arg(long, default_value_t = 1_000_000)]
    fuel: u64,
    /// Check correctness of every intermediate substitution.
    #[arg(long)]
    check: bool,
}

impl SolveFlags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            tower: TowerConfig {
                fuel: self.fuel,
                check_correctness: self.check,
                ..TowerConfig::default()
            },
            ..SolveOptions::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance and print its substitution.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
        /// Write the machine-readable solution here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the injury traces into this directory.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Check a substitution against an instance.
    Verify {
        file: PathBuf,
        #[arg(long)]
        subst: PathBuf,
    },
    /// Solve, write the injury traces and check them.
    Trace {
        file: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
        #[arg(long)]
        trace_dir: PathBuf,
        /// Longest run of sources sharing an image in the weak check.
        #[arg(long, default_value_t = 64)]
        max_run: usize,
    },
    /// Evaluate the height ordinal along a recorded trace.
    Ordinal { trace: PathBuf },
    /// Generate random rank-1 instances.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_witness: u64,
        #[arg(long, default_value_t = 6)]
        formulas: usize,
        #[arg(long, default_value_t = 3)]
        functions: usize,
        /// Number of instances; more than one needs `--out DIR`.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Parser::new().parse_instance(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn out_err(e: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

/// The traces recorded by a solve, named as in the trace directory.
pub fn named_traces(r: &SolveResult) -> Vec<(String, &InjuryTrace)> {
    let mut out = vec![("path".to_string(), &r.path_trace)];
    for (i, t) in r.lift_traces.iter().enumerate() {
        out.push((format!("lift-{}", i + 1), t));
    }
    for (i, t) in r.chain_traces.iter().enumerate() {
        out.push((format!("chain-{}", i + 1), t));
    }
    out
}

fn write_traces(dir: &Path, r: &SolveResult) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for (name, t) in named_traces(r) {
        write_file(&dir.join(format!("{name}.trace")), &write_trace(&name, t))?;
    }
    Ok(())
}

fn verdict(r: &Result<(), InjuryViolation>) -> String {
    match r {
        Ok(()) => "ok".to_string(),
        Err(e) => format!("FAIL ({e})"),
    }
}

fn run_command(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Solve {
            file,
            flags,
            out: out_file,
            trace_dir,
        } => {
            let inst = load_instance(&file)?;
            let r = solve(&inst.crs, &flags.options())?;
            for l in substitution_lines(&r.substitution) {
                writeln!(out, "{l}").map_err(out_err)?;
            }
            if let Some(p) = out_file {
                let meta = SolutionRecord {
                    formulas: inst.crs.len(),
                    top: r.top(),
                    path: Some(&r.path_t1.path),
                    steps: r.stats.path_steps,
                };
                write_file(&p, &write_substitution(&r.substitution, Some(&meta)))?;
            }
            if let Some(dir) = trace_dir {
                write_traces(&dir, &r)?;
            }
            Ok(())
        }
        Command::Verify { file, subst } => {
            let inst = load_instance(&file)?;
            let s = parse_substitution(&read(&subst)?, &Parser::new(), &inst).map_err(|source| CliError::Parse {
                path: subst.clone(),
                source,
            })?;
            let report = verify(&s, &inst.crs);
            writeln!(out, "{report}").map_err(out_err)?;
            if report.ok() {
                Ok(())
            } else {
                Err(CliError::Failed("verification failed".to_string()))
            }
        }
        Command::Trace {
            file,
            flags,
            trace_dir,
            max_run,
        } => {
            let inst = load_instance(&file)?;
            let r = solve(&inst.crs, &flags.options())?;
            write_traces(&trace_dir, &r)?;
            let mut failed = false;
            for (name, t) in named_traces(&r) {
                let fi = check_finite_injury(t);
                let wfi = check_weakly_finite_injury(t, max_run);
                // path selection must be finite injury; the lift chains only weakly
                if name == "path" {
                    failed |= fi.is_err();
                } else if name.starts_with("chain") {
                    failed |= wfi.is_err();
                }
                writeln!(
                    out,
                    "{name:<10} steps {:>4}  finite-injury {}  weakly-finite-injury {}",
                    t.len(),
                    verdict(&fi),
                    verdict(&wfi)
                )
                .map_err(out_err)?;
            }
            if failed {
                Err(CliError::Failed("injury check failed".to_string()))
            } else {
                Ok(())
            }
        }
        Command::Ordinal { trace } => {
            let (name, t) = parse_trace(&read(&trace)?).map_err(|source| CliError::Parse {
                path: trace.clone(),
                source,
            })?;
            let heights = RemainingHeight::of_images(&t);
            let h = |n: &crate::injury::PathNode| heights.ordinal(n);
            writeln!(out, "trace {name}: {} steps, image tree height {}", t.len(), heights.tree_height()).map_err(out_err)?;
            let o: Vec<_> = t.images().map(|img| height_o(img, h)).collect();
            let steps = t.steps();
            for i in 1..steps.len() {
                if !steps[i - 1].0.is_proper_prefix_of(&steps[i].0) {
                    continue;
                }
                let word = if o[i] < o[i - 1] { "o decreases" } else { "o does not decrease" };
                writeln!(out, "{word}  {} -> {}  {} > {}", i - 1, i, o[i - 1], o[i]).map_err(out_err)?;
            }
            match verify_descent(&t, h) {
                Ok(()) => {
                    writeln!(out, "descent: ok").map_err(out_err)?;
                    Ok(())
                }
                Err(e) => {
                    writeln!(out, "descent: FAIL ({e})").map_err(out_err)?;
                    Err(CliError::Failed("no descent".to_string()))
                }
            }
        }
        Command::Gen {
            seed,
            max_witness,
            formulas,
            functions,
            count,
            out: target,
        } => {
            let p = GenParams {
                formulas,
                max_witness,
                functions,
            };
            match (count, target) {
                (1, None) => write!(out, "{}", print_instance(&generate(seed, &p))).map_err(out_err),
                (1, Some(f)) => write_file(&f, &print_instance(&generate(seed, &p))),
                (_, None) => Err(CliError::Usage("--count above 1 needs --out DIR".to_string())),
                (n, Some(dir)) => {
                    fs::create_dir_all(&dir).map_err(|source| CliError::Io {
                        path: dir.clone(),
                        source,
                    })?;
                    for i in 0..n as u64 {
                        let text = print_instance(&generate(seed.wrapping_add(i), &p));
                        write_file(&dir.join(format!("instance-{i:03}.eps")), &text)?;
                    }
                    Ok(())
                }
            }
        }
    }
}

/// Runs the command line given by `args` (program name first) and returns
/// the process exit status. Normal output goes to `out`, diagnostics to
/// `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return if code == 0 { Exit::Ok as i32 } else { Exit::Parse as i32 };
        }
    };
    match run_command(cli.command, out) {
        Ok(()) => Exit::Ok as i32,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit() as i32
        }
    }
}
