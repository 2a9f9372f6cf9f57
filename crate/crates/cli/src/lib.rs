//! Batch driver for the qhv-core checks: named suites over parameter
//! ranges, JSON-lines or human output, and golden-file comparison.

pub mod config;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use qhv_core::Budget;
use rayon::prelude::*;

use config::{ParamFlags, Settings};
use report::{CheckReport, Status};

/// Exit code when every check passes.
pub const EXIT_PASS: i32 = 0;
/// Exit code when a check fails or errors, or golden output differs.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for command-line, config or environment errors.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qhv", version, about = "Run verification suites and report one result per check")]
pub struct Cli {
    #[command(subcommand)]
    pub suite: SuiteCmd,
    /// Emit one JSON object per line (the default).
    #[arg(long, global = true, conflicts_with = "human")]
    pub json: bool,
    /// Emit readable text instead of JSON.
    #[arg(long, global = true)]
    pub human: bool,
    /// Flat `key = value` file supplying parameters not given as flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Compare reports against `<DIR>/<suite>.jsonl`.
    #[arg(long, global = true, value_name = "DIR")]
    pub golden: Option<PathBuf>,
    /// With --golden, rewrite the stored reports instead of comparing.
    #[arg(long, global = true, requires = "golden")]
    pub bless: bool,
    #[command(flatten)]
    pub params: ParamFlags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum SuiteCmd {
    /// Gluing, invariance and generator checks for one family.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Torus and sl2 compatibility of the gluing.
    Equivariance,
    /// Singular locus of the quadric family.
    SingularLocus,
    /// Terminality classification of cyclic quotients.
    Terminal,
    /// Quotient points of weighted projective spaces.
    Wps,
    /// Normalization of a twisted ruled bundle.
    BundleNormalize,
    /// (-1)-curves and fiber homology cases.
    DpHomology,
    /// Every suite in turn.
    All,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum VerifyTarget {
    Quadric,
    F4,
    Quotient,
}

impl SuiteCmd {
    pub fn name(self) -> &'static str {
        match self {
            SuiteCmd::Verify { target: VerifyTarget::Quadric } => "verify quadric",
            SuiteCmd::Verify { target: VerifyTarget::F4 } => "verify f4",
            SuiteCmd::Verify { target: VerifyTarget::Quotient } => "verify quotient",
            SuiteCmd::Equivariance => "equivariance",
            SuiteCmd::SingularLocus => "singular-locus",
            SuiteCmd::Terminal => "terminal",
            SuiteCmd::Wps => "wps",
            SuiteCmd::BundleNormalize => "bundle-normalize",
            SuiteCmd::DpHomology => "dp-homology",
            SuiteCmd::All => "all",
        }
    }
}

/// Applies `QHV_BUDGET` if set.
fn apply_budget(var: Option<OsString>) -> Result<()> {
    let Some(v) = var else { return Ok(()) };
    let v = v.to_str().ok_or_else(|| anyhow!("QHV_BUDGET is not UTF-8"))?;
    let b = Budget::parse(v)
        .ok_or_else(|| anyhow!("QHV_BUDGET: expected `steps=N,basis=M` or a step count, got `{v}`"))?;
    Budget::set_global(b);
    Ok(())
}

/// Runs every check of a suite. Checks execute in parallel; the reports
/// keep the suite's order.
pub fn run_suite(suite: &str, settings: &Settings) -> Result<Vec<CheckReport>> {
    let checks = suites::build(suite, settings)?;
    Ok(checks.par_iter().map(|c| c.run()).collect())
}

/// Parses `args`, runs the suite and writes reports to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "qhv: {e:#}");
            EXIT_CONFIG
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    apply_budget(std::env::var_os("QHV_BUDGET"))?;
    let base = match &cli.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    let settings = base.overlay(&cli.params);
    let suite = cli.suite.name();
    let reports = run_suite(suite, &settings)?;
    for r in &reports {
        let line = if cli.human { r.human_line() } else { r.json_line() };
        writeln!(out, "{line}")?;
    }
    let mut code = if reports.iter().all(|r| r.status == Status::Pass) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    if let Some(dir) = &cli.golden {
        if cli.bless {
            report::write_golden(dir, suite, &reports)?;
        } else {
            let diffs = report::compare_golden(dir, suite, &reports)?;
            for d in &diffs {
                writeln!(err, "golden mismatch: {d}")?;
            }
            if !diffs.is_empty() {
                code = EXIT_FAIL;
            }
        }
    }
    if cli.human {
        let passed = reports.iter().filter(|r| r.status == Status::Pass).count();
        writeln!(out, "{suite}: {passed}/{} checks passed", reports.len())?;
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in suites::SUITES.iter().chain(["all"].iter()) {
            let mut args = vec!["qhv"];
            args.extend(name.split(' '));
            let cli = Cli::try_parse_from(args).unwrap();
            assert_eq!(cli.suite.name(), *name);
        }
    }

    #[test]
    fn params_after_subcommand() {
        let cli = Cli::try_parse_from(["qhv", "verify", "quadric", "--k", "3,5", "--l", "1"]).unwrap();
        assert_eq!(cli.params.k, vec![3, 5]);
        assert_eq!(cli.params.l, vec![1]);
    }

    #[test]
    fn budget_parsing() {
        assert!(apply_budget(Some("steps=x".into())).is_err());
        assert!(apply_budget(None).is_ok());
    }
}
