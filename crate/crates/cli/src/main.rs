mod forms;
mod opts;
mod run;

use anyhow::{Context, Result};
use clap::Parser;
use opts::{Cli, Opts};
use run::{Body, Status};
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;

fn emit(cli_cmd: opts::Command, o: &Opts, body: Body) -> Result<()> {
    let text = match body {
        Body::Csv(s) => s,
        Body::Json(report) => {
            let mut env = json!({
                "tool": "jetcircle",
                "version": jetcircle::VERSION,
                "command": cli_cmd,
                "params": o,
            });
            if !o.no_timestamp {
                let secs = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                env["generated_at_unix"] = json!(secs);
            }
            env["report"] = report;
            let mut s = serde_json::to_string(&env)?;
            s.push('\n');
            s
        }
    };
    match &o.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn real_main() -> Result<Status> {
    let cli = Cli::parse();
    let mut o = cli.opts;
    if let Some(path) = o.config.clone() {
        o = o.merge(Opts::load_config(&path)?);
    }
    if let Some(w) = o.workers {
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().context("setting the worker count")?;
    }
    if o.force {
        eprintln!("warning: --force raises the ceiling to 1e11 operations; runs near it can take hours");
    }
    let outcome = run::dispatch(cli.command, &o)?;
    emit(cli.command, &o, outcome.body)?;
    Ok(outcome.status)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(1)
        }
        Err(err) => {
            match err.downcast_ref::<jetcircle::Error>() {
                Some(jetcircle::Error::BudgetExceeded { what, required, ceiling }) => eprintln!(
                    "budget exceeded: {what} needs an estimated {required} operations, ceiling is {ceiling} (raise with --budget or --force)"
                ),
                Some(e @ jetcircle::Error::Precondition(_)) => eprintln!("precondition failed: {e}"),
                _ => eprintln!("error: {err:#}"),
            }
            ExitCode::from(2)
        }
    }
}
