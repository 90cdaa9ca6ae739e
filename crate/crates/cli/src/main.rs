//! `hitset`: command-line entry point.

mod args;
mod commands;
mod config;
mod manifest;

use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::{CliError, Report};
use manifest::{annotate, envelope, unix_now, RunManifest};

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    }
    std::fs::write(path, body).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn emit(cli: &Cli, report: &Report, manifest: &RunManifest) -> Result<(), CliError> {
    let digest = manifest.digest();
    for side in &report.side_files {
        write_file(&side.path, &annotate(side.comment, &digest, &side.body))?;
    }
    if let Some(dir) = &cli.output {
        let artifact = serde_json::to_string_pretty(&envelope(manifest, &report.result)).expect("artifact serializes");
        write_file(&dir.join(format!("{}.json", report.name)), &artifact)?;
    }
    println!("{}", serde_json::to_string_pretty(&report.result).expect("result serializes"));
    Ok(())
}

fn run(argv: Vec<String>) -> u8 {
    let started_at = unix_now();
    let expanded = match config::expand(argv.clone()) {
        Ok(e) => e,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&expanded.argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        eprintln!("warning: thread pool already configured: {e}");
    }
    let outcome = commands::dispatch(&cli).and_then(|report| {
        let manifest = RunManifest {
            command_line: argv,
            config_digest: expanded.digest,
            seeds: report.seeds.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            solver_identity: report.solver.as_ref().map(|s| s.identity().unwrap_or_else(|e| format!("unavailable: {e}"))),
            started_at,
            finished_at: unix_now(),
        };
        emit(&cli, &report, &manifest)?;
        Ok(report.failure)
    });
    match outcome {
        Ok(None) => 0,
        Ok(Some(msg)) => {
            eprintln!("check failed: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args().collect()))
}
