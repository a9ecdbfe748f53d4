//! Command-line front end for the quantum illumination benchmarks.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod report;

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use qibench_core::protocols::{figure_grid, parse_scenarios, Scenario};
use qibench_core::validate::ValidateOptions;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};
pub use report::{MethodTag, Output, RunReport};

use args::Source;
use commands::{FigureOptions, RocOptions};
use output::to_json;

fn load(source: &Source) -> CliResult<Vec<Scenario>> {
    if let Some(id) = &source.figure {
        return Ok(figure_grid(id)?.scenarios);
    }
    let path = source.scenario.as_ref().expect("clap requires a source");
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_scenarios(&text)?)
}

fn write_files(dir: &Path, files: &[(String, String)]) -> CliResult<()> {
    let io =
        |e: std::io::Error| CliError::Validation(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    for (name, content) in files {
        std::fs::write(dir.join(name), content).map_err(io)?;
    }
    Ok(())
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Validation(format!("cannot write output: {e}")))
}

fn warn(err: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

/// Prints the report with its wall time; files get it without.
fn finish(
    mut report: RunReport,
    started: Instant,
    dir: Option<&Path>,
    mut files: Vec<(String, String)>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<RunReport> {
    warn(err, &report.warnings);
    if let Some(dir) = dir {
        files.push(("report.json".into(), to_json(&report)?));
        write_files(dir, &files)?;
    }
    report.wall_time = Some(started.elapsed().as_secs_f64());
    emit(out, &to_json(&report)?)?;
    Ok(report)
}

/// Runs a parsed command line, writing results to `out` and warnings to
/// `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let started = Instant::now();
    match &cli.command {
        Command::Bound(a) => {
            let report = commands::bound(&load(&a.source)?, a.method)?;
            finish(report, started, a.out.as_deref(), Vec::new(), out, err)?;
        }
        Command::Roc(a) => {
            let opts = RocOptions {
                detector: a.detector,
                method: a.method,
                grid: a.grid.overrides(),
                seed: a.seed,
                trials: a.trials,
            };
            let (report, table) = commands::roc(&load(&a.source)?, &opts)?;
            match &a.out {
                Some(dir) => {
                    let files = vec![("roc.csv".to_string(), table.render())];
                    finish(report, started, Some(dir), files, out, err)?;
                }
                None => {
                    warn(err, &report.warnings);
                    emit(out, &table.render())?;
                }
            }
        }
        Command::Figure(a) => {
            let opts = FigureOptions {
                method: a.method,
                grid: a.grid.overrides(),
                seed: a.seed,
                trials: a.trials,
            };
            let files = commands::figure(&a.id, &opts)?;
            write_files(&a.out, &files)?;
            for (name, _) in &files {
                emit(out, &format!("{}\n", a.out.join(name).display()))?;
            }
        }
        Command::Validate(a) => {
            let opts = ValidateOptions {
                closed_form_scale: a.closed_form_scale,
                max_cases: a.grid_points,
            };
            let report = commands::validate(&opts)?;
            let report = finish(report, started, a.out.as_deref(), Vec::new(), out, err)?;
            let failed = commands::failed_suites(&report);
            if !failed.is_empty() {
                return Err(CliError::Numeric(format!(
                    "validation suites failed: {}",
                    failed.join(", ")
                )));
            }
        }
    }
    Ok(())
}
