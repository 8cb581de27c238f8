//! Command-line front end.
//!
//! Exit codes: 0 every check passed, 1 some check failed or was
//! inconclusive, 2 invalid configuration, 3 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ekverify_core::functionals::{Corollary, FunctionalError};
use ekverify_core::geometry::ToricGeometry;
use ekverify_core::invariants::ToricField;

use crate::report::{Format, Report, ReportRow};
use crate::scenario::{is_config_error, load_scenario, LoadError, LoadedScenario};
use crate::suite;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "ekverify", version, about = "Exact and numerical checks of the energy functionals E_k on toric manifolds")]
pub struct Cli {
    /// Write the report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Suppress the per-check lines on stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symbolic identities, the positivity lemma and its claims.
    VerifyExact {
        #[arg(long, default_value_t = 40)]
        max_k: u32,
        #[arg(long, default_value_t = 300)]
        max_m: u32,
    },
    /// Volume, Einstein residual and Ricci-potential normalization.
    Calibrate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// One family of numeric checks on a scenario.
    Check {
        #[arg(value_enum)]
        which: CheckKind,
        #[arg(long)]
        scenario: PathBuf,
        /// Orders to check; defaults to the scenario's k_list.
        #[arg(long)]
        k: Vec<usize>,
        /// `p` of the first corollary identity.
        #[arg(long)]
        p: Option<usize>,
        /// Corollary identity; all admissible ones when omitted.
        #[arg(long, value_enum)]
        corollary: Option<CorollaryKind>,
        /// Toric field, comma separated; defaults to the scenario's field.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        v: Option<Vec<f64>>,
        /// Second scenario for the pali check.
        #[arg(long)]
        other: Option<PathBuf>,
        #[arg(long, default_value_t = suite::DEFAULT_T_STEP)]
        t_step: f64,
    },
    /// Dump functional values (and invariants when a field is given).
    Compute {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        v: Option<Vec<f64>>,
    },
    /// Every applicable check on each scenario, optionally with the exact
    /// sweep; consecutive scenarios on one reference also get the pali check.
    Report {
        #[arg(long)]
        scenario: Vec<PathBuf>,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 40)]
        max_k: u32,
        #[arg(long, default_value_t = 300)]
        max_m: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Theorem1,
    Corollary,
    Pali,
    Theorem2,
    Theorem3,
    Prop32,
    Kenergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorollaryKind {
    C1,
    C2,
    C3,
    T1rec,
}

#[derive(Debug, thiserror::Error)]
enum RunError {
    #[error("{0}")]
    Load(#[from] LoadError),
    #[error("{0}")]
    Core(#[from] FunctionalError),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Load(e) => e.exit_code(),
            Self::Core(e) if is_config_error(e) => EXIT_CONFIG,
            Self::Core(_) => EXIT_NUMERIC,
            Self::Usage(_) => EXIT_CONFIG,
            Self::Io(_) => EXIT_CONFIG,
        }
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the exit code.
pub fn run(argv: impl IntoIterator<Item = impl Into<OsString> + Clone>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(report) => {
            if report.all_passed() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &Path) -> Result<LoadedScenario, RunError> {
    Ok(load_scenario(path)?)
}

fn field(ls: &LoadedScenario, v: Option<&[f64]>) -> Result<ToricField, RunError> {
    let f = suite::field_of(ls, v).ok_or_else(|| RunError::Usage("no toric field: pass --v or set `field` in the scenario".into()))?;
    if f.v.len() != ls.scenario.dim() {
        return Err(RunError::Usage(format!("--v has {} components, expected {}", f.v.len(), ls.scenario.dim())));
    }
    Ok(f)
}

fn corollary_list(n: usize, kind: Option<CorollaryKind>, ks: &[usize], p: Option<usize>) -> Vec<Corollary> {
    suite::all_corollaries(n)
        .into_iter()
        .filter(|c| {
            let (name_ok, k, cp) = match (*c, kind) {
                (Corollary::C1 { p, k }, None | Some(CorollaryKind::C1)) => (true, k, Some(p)),
                (Corollary::C2 { k }, None | Some(CorollaryKind::C2)) => (true, k, None),
                (Corollary::C3 { k }, None | Some(CorollaryKind::C3)) => (true, k, None),
                (Corollary::T1Rec { k }, None | Some(CorollaryKind::T1rec)) => (true, k, None),
                _ => (false, 0, None),
            };
            name_ok && (ks.is_empty() || ks.contains(&k)) && (p.is_none() || cp.is_none() || cp == p)
        })
        .collect()
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<Report, RunError> {
    let mut report = Report::default();
    match &cli.command {
        Command::VerifyExact { max_k, max_m } => report.checks = suite::exact_rows(*max_k, *max_m),
        Command::Calibrate { scenario } => report.checks = suite::calibrate(&load(scenario)?)?,
        Command::Check { which, scenario, k, p, corollary, v, other, t_step } => {
            let ls = load(scenario)?;
            let ks = (!k.is_empty()).then_some(k.as_slice());
            if let Some(&bad) = k.iter().find(|&&x| x > ls.scenario.dim()) {
                return Err(RunError::Usage(format!("--k {bad} exceeds dimension {}", ls.scenario.dim())));
            }
            report.checks = match which {
                CheckKind::Pali => {
                    let other = other.as_ref().ok_or_else(|| RunError::Usage("pali needs --other SCENARIO".into()))?;
                    suite::pali(&ls, &load(other)?)?
                }
                CheckKind::Prop32 => {
                    if !(t_step.is_finite() && *t_step > 0.0) {
                        return Err(RunError::Usage("--t-step must be positive".into()));
                    }
                    suite::prop32(&ls, &field(&ls, v.as_deref())?, ks, *t_step)?
                }
                _ => {
                    let geo = ToricGeometry::new(ls.scenario.reference.clone()).map_err(FunctionalError::from)?;
                    let c = suite::compute(&geo, &ls)?;
                    match which {
                        CheckKind::Theorem1 => suite::theorem1(&c, &ls, ks)?,
                        CheckKind::Corollary => {
                            let list = corollary_list(ls.scenario.dim(), *corollary, k, *p);
                            if list.is_empty() {
                                return Err(RunError::Usage("no admissible corollary instance for these arguments".into()));
                            }
                            suite::corollaries(&c, &ls, &list)?
                        }
                        CheckKind::Theorem2 => suite::theorem2(&c, &ls, ks)?,
                        CheckKind::Theorem3 => suite::theorem3(&c, &ls, &field(&ls, v.as_deref())?)?,
                        CheckKind::Kenergy => suite::kenergy(&c, &ls)?,
                        CheckKind::Pali | CheckKind::Prop32 => unreachable!(),
                    }
                }
            };
        }
        Command::Compute { scenario, v } => {
            let ls = load(scenario)?;
            let f = match v {
                Some(v) => Some(field(&ls, Some(v))?),
                None => suite::field_of(&ls, None),
            };
            let geo = ToricGeometry::new(ls.scenario.reference.clone()).map_err(FunctionalError::from)?;
            let c = suite::compute(&geo, &ls)?;
            report.values = suite::value_table(&c, &ls, f.as_ref())?;
        }
        Command::Report { scenario, exact, max_k, max_m } => {
            if *exact {
                report.checks = suite::exact_rows(*max_k, *max_m);
            }
            let loaded = scenario.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
            for ls in &loaded {
                report.checks.extend(suite::full_scenario(ls)?);
            }
            for pair in loaded.windows(2) {
                let (a, b) = (&pair[0], &pair[1]);
                if a.scenario.reference == b.scenario.reference && a.scenario.perturbation.is_some() && b.scenario.perturbation.is_some() {
                    report.checks.extend(suite::pali(a, b)?);
                }
            }
        }
    }
    emit(cli, &report, stdout)?;
    Ok(report)
}

fn emit(cli: &Cli, report: &Report, stdout: &mut dyn Write) -> Result<(), RunError> {
    let to_stdout = cli.out.is_none() && matches!(cli.command, Command::Report { .. } | Command::Compute { .. });
    if to_stdout {
        report.write(cli.format, stdout)?;
        return Ok(());
    }
    if let Some(path) = &cli.out {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        report.write(cli.format, &mut f)?;
        f.flush()?;
    }
    if !cli.quiet {
        for row in &report.checks {
            writeln!(stdout, "{}", row.line())?;
        }
        if matches!(cli.command, Command::Compute { .. }) {
            report.write(Format::Csv, stdout)?;
        }
        summary(&report.checks, stdout)?;
    }
    Ok(())
}

fn summary(rows: &[ReportRow], out: &mut dyn Write) -> std::io::Result<()> {
    if rows.is_empty() {
        return Ok(());
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    writeln!(out, "{} checks, {} passed, {} not passed", rows.len(), rows.len() - failed, failed)
}
