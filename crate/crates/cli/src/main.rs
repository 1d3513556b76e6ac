use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use grename_core::harness::{
    diff_behaviors, rename_source, run_properties, standard_engine, DiffError, HarnessConfig, PropConfig,
    TextRenameError,
};
use grename_core::rename::check_sufficient_precondition;
use grename_core::semantics::{run, Mode};
use grename_core::{parse_str, pretty_print, Ident, ParseError, Program};

/// Rename global variables in mini-C programs and check that behavior is
/// preserved.
#[derive(Debug, Parser)]
#[command(name = "grename", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rename global variable OLD into NEW and print the program.
    Rename {
        file: PathBuf,
        old: String,
        new: String,
        /// Write the renamed program here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate every clause of the sufficient precondition.
    Check { file: PathBuf, old: String, new: String },
    /// List the behaviors of a program.
    Run {
        file: PathBuf,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Compare the behaviors of a program and of its renamed version.
    Diff {
        file: PathBuf,
        old: String,
        new: String,
        /// Compare even when the library model could observe the rename.
        #[arg(long = "unsafe")]
        unsafe_model: bool,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Check the engine's properties on generated programs.
    Proptest {
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Step budget of each compared run.
        #[arg(long)]
        budget: Option<usize>,
        /// States explored by the lockstep check.
        #[arg(long, default_value_t = 2_000)]
        commut_budget: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Debug, Args)]
struct ExecArgs {
    /// `deterministic` or `exhaustive`.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    budget: Option<usize>,
    /// `name:pure` or `name:reads_global(var)`; replaces the default library.
    #[arg(long = "extcall")]
    extcalls: Vec<String>,
    /// Key-value configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ExecArgs {
    fn resolve(&self) -> Result<HarnessConfig> {
        let mut cfg = load_config(self.config.as_deref())?;
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        if let Some(budget) = self.budget {
            cfg.step_budget = budget;
        }
        if !self.extcalls.is_empty() {
            cfg.extcalls = grename_core::ExtCallModel::empty();
            for spec in &self.extcalls {
                cfg.extcalls.add_spec(spec)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_config(path: Option<&Path>) -> Result<HarnessConfig> {
    Ok(match path {
        Some(p) => HarnessConfig::load(p).with_context(|| format!("config {}", p.display()))?,
        None => HarnessConfig::default(),
    })
}

/// Outcome of a command that did not hit an unexpected error.
enum Status {
    Ok,
    Refused,
    ParseError,
}

fn read_program(file: &Path) -> Result<std::result::Result<Program, ParseError>> {
    let text = std::fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    Ok(parse_str(&text))
}

fn report_parse_error(file: &Path, e: &ParseError) -> Status {
    eprintln!("{}:{e}", file.display());
    Status::ParseError
}

fn idents(old: &str, new: &str) -> Result<(Ident, Ident)> {
    Ok((Ident::intern(old)?, Ident::intern(new)?))
}

fn dispatch(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Rename { file, old, new, output } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("cannot read {}", file.display()))?;
            match rename_source(&text, &old, &new, standard_engine()) {
                Ok(renamed) => {
                    let out = pretty_print(&renamed);
                    match output {
                        Some(path) => std::fs::write(&path, out).with_context(|| format!("cannot write {}", path.display()))?,
                        None => print!("{out}"),
                    }
                    Ok(Status::Ok)
                }
                Err(TextRenameError::Parse(e)) => Ok(report_parse_error(&file, &e)),
                Err(e) => {
                    eprintln!("{e}");
                    Ok(Status::Refused)
                }
            }
        }
        Command::Check { file, old, new } => {
            let p = match read_program(&file)? {
                Ok(p) => p,
                Err(e) => return Ok(report_parse_error(&file, &e)),
            };
            let (x, y) = idents(&old, &new)?;
            let report = check_sufficient_precondition(x, y, &p);
            for (clause, holds) in &report.clauses {
                println!("{:<4} {}", if *holds { "PASS" } else { "FAIL" }, clause.label());
            }
            if report.passes() {
                println!("verdict: rename will succeed");
            } else {
                println!("verdict: precondition not met (the rename may still succeed)");
            }
            Ok(Status::Ok)
        }
        Command::Run { file, exec } => {
            let cfg = exec.resolve()?;
            let p = match read_program(&file)? {
                Ok(p) => p,
                Err(e) => return Ok(report_parse_error(&file, &e)),
            };
            let behaviors = run(&p, &cfg.extcalls, cfg.mode, cfg.step_budget)?;
            print!("{}", behaviors.serialize());
            Ok(Status::Ok)
        }
        Command::Diff { file, old, new, unsafe_model, exec } => {
            let cfg = exec.resolve()?;
            let p = match read_program(&file)? {
                Ok(p) => p,
                Err(e) => return Ok(report_parse_error(&file, &e)),
            };
            let (x, y) = idents(&old, &new)?;
            match diff_behaviors(&p, x, y, &cfg, unsafe_model) {
                Ok(out) => match out.divergence {
                    None => {
                        println!("PASS: {} behavior(s) equal up to renaming", out.original.len());
                        Ok(Status::Ok)
                    }
                    Some(d) => {
                        println!("DIVERGENCE: {d}");
                        Ok(Status::Refused)
                    }
                },
                Err(DiffError::Run { source, which }) => bail!("{which} program: {source}"),
                Err(e) => {
                    eprintln!("{e}");
                    Ok(Status::Refused)
                }
            }
        }
        Command::Proptest { iters, seed, budget, commut_budget, config, threads } => {
            if iters == 0 {
                bail!("--iters must be at least 1");
            }
            let harness = load_config(config.as_deref())?;
            let cfg = PropConfig {
                iterations: iters,
                seed: seed.unwrap_or(harness.seed),
                budget: budget.unwrap_or(harness.step_budget),
                commut_budget,
                extcalls: harness.extcalls,
                threads,
                ..PropConfig::default()
            };
            let report = run_properties(&cfg, standard_engine());
            print!("{}", report.render(&cfg.properties));
            Ok(if report.passed() { Status::Ok } else { Status::Refused })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Refused) => ExitCode::from(1),
        Ok(Status::ParseError) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
