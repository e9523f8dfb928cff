//! Command-line front end: parse arguments, run one workflow and emit a
//! deterministic JSON report.

pub mod args;
pub mod commands;
pub mod report;
pub mod reproduce;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;

pub use args::{Cli, Command, Example, FamilyCommand};
pub use report::{Check, Report};

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code when a reproduced example misses an expected value.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for invalid input and evaluation errors.
pub const EXIT_ERROR: i32 = 2;

/// Run the workflow selected by `cli` and build its report.
pub fn execute(cli: &Cli) -> Result<Report> {
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Classify(a) => commands::classify(a)?,
        Command::Curvature(a) => commands::curvature(a)?,
        Command::Family(FamilyCommand::Landsberg(a)) => commands::family_landsberg(a)?,
        Command::Family(FamilyCommand::SurfaceBerwald(a)) => commands::family_surface(a)?,
        Command::Family(FamilyCommand::Zhou(a)) => commands::family_zhou(a)?,
        Command::Geodesic(a) => commands::geodesic(a)?,
        Command::Reproduce(a) => reproduce::reproduce(a.example)?,
    };
    if cli.timing {
        report.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

fn out_path(cli: &Cli) -> Option<&std::path::Path> {
    let out = match &cli.command {
        Command::Classify(a) => &a.out,
        Command::Curvature(a) => &a.out,
        Command::Family(FamilyCommand::Landsberg(a)) => &a.out,
        Command::Family(FamilyCommand::SurfaceBerwald(a)) => &a.out,
        Command::Family(FamilyCommand::Zhou(a)) => &a.out,
        Command::Geodesic(a) => &a.out,
        Command::Reproduce(a) => &a.out,
    };
    out.out.as_deref()
}

fn emit(cli: &Cli, report: &Report, stdout: &mut dyn Write) -> Result<()> {
    let text = report.render();
    match out_path(cli) {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            write!(stdout, "{}", report.summary_text())?;
            writeln!(stdout, "  report written to {}", path.display())?;
        }
        None => write!(stdout, "{text}")?,
    }
    Ok(())
}

/// Parse `args` (program name first), run, write output and return the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return EXIT_ERROR;
        }
    };
    if let Err(e) = emit(&cli, &report, stdout) {
        let _ = writeln!(stderr, "error: {e:#}");
        return EXIT_ERROR;
    }
    if report.all_checks_pass() {
        EXIT_OK
    } else {
        for c in report.checks.iter().filter(|c| !c.pass) {
            let _ = writeln!(
                stderr,
                "check failed: {} = {:e} (expected {:e}, tolerance {:e})",
                c.name, c.value, c.expected, c.tolerance
            );
        }
        EXIT_CHECK_FAILED
    }
}
