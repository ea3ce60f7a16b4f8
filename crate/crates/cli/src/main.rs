mod cli;
mod commands;
mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use cli::{Cli, Command};
use manifest::RunManifest;

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<pindex_core::Error>()) {
        Some(ce) if !ce.is_input_error() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&raw) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(cli, &raw[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn execute(cli: Cli, raw: &[String]) -> Result<()> {
    if let Command::Replay(r) = &cli.cmd {
        let m = manifest::read_manifest(&r.manifest)?;
        let out = match &cli.out {
            Some(o) => o.clone(),
            None => r.manifest.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".")),
        };
        let mut argv = vec!["pindex".to_string()];
        argv.extend(m.args.iter().cloned());
        let again = Cli::try_parse_from(&argv).context("manifest arguments no longer parse")?;
        if matches!(again.cmd, Command::Replay(_)) {
            anyhow::bail!(pindex_core::Error::DomainError("a manifest cannot replay another manifest".into()));
        }
        let stamp = m.created_unix.is_some() || cli.timestamp;
        return run_one(again.cmd, again.seed, Some(&out), stamp, &m.args);
    }
    run_one(cli.cmd, cli.seed, cli.out.as_deref(), cli.timestamp, raw)
}

fn run_one(cmd: Command, seed: u64, out: Option<&Path>, timestamp: bool, raw: &[String]) -> Result<()> {
    let outcome = commands::run(&cmd, seed, out)?;
    if !outcome.stdout.is_empty() {
        let mut so = std::io::stdout().lock();
        so.write_all(outcome.stdout.as_bytes())?;
        so.flush()?;
    }
    let Some(dir) = out else { return Ok(()) };
    commands::write_outputs(&outcome, dir)?;
    let (args, inputs) = manifest::normalize_args(raw, seed)?;
    // config from the normalized form so a replay writes an identical manifest
    let config = serde_json::to_value(&Cli::try_parse_from(std::iter::once("pindex".to_string()).chain(args.iter().cloned()))?.cmd)?;
    let created_unix = timestamp.then(|| {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    });
    let m = RunManifest {
        command: cmd.name().into(),
        args,
        inputs,
        seed,
        config,
        outputs: outcome.files.iter().map(|(n, _)| n.clone()).collect(),
        version: env!("CARGO_PKG_VERSION").into(),
        created_unix,
    };
    manifest::write_manifest(&m, dir)?;
    Ok(())
}
