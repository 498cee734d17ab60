use std::process::ExitCode;

use clap::Parser;
use edgeflow_cli::acceptance::run_all;
use edgeflow_cli::config::{resolve, Cli, CommandKind};
use edgeflow_cli::emit::emit_report;
use edgeflow_cli::run::{run, EXIT_IO, EXIT_MISMATCH, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    if let Some(n) = cfg.resolved_threads() {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("warning: could not configure {n} threads: {e}");
        }
    }

    if cfg.command == CommandKind::Selftest {
        let results = run_all(cfg.seed);
        for r in &results {
            println!("{r}");
        }
        let failed = results.iter().filter(|r| !r.pass).count();
        println!(
            "{} of {} criteria passed",
            results.len() - failed,
            results.len()
        );
        return ExitCode::from(if failed == 0 { 0 } else { EXIT_MISMATCH as u8 });
    }

    let outcome = run(&cfg);
    if let Some(f) = &outcome.report.failure {
        eprintln!("error ({}): {}", f.kind, f.message);
    }
    if let Err(e) = emit_report(&outcome.report, cfg.format, cfg.output.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_IO as u8);
    }
    ExitCode::from(outcome.exit_code as u8)
}
