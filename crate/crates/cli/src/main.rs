use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hamkit::period::FlowOptions;
use hamkit_cli::dsl::SystemFile;
use hamkit_cli::run::{run, Command, Input, RunOptions};

/// Analyses of Hamiltonian systems described in a system file.
#[derive(Parser, Debug)]
#[command(name = "hamkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check i_Γ ω = dH for each verify request.
    Verify { file: PathBuf },
    /// Odd-trace test and A = Λ·H factorization of each matrix.
    Factorize { file: PathBuf },
    /// Alternative descriptions from symmetries or invariant tensors.
    Altgen { file: PathBuf },
    /// Resonance lattice and integrability type.
    Resonance { file: PathBuf },
    /// Energy–period scan, dependence test and optional comparison.
    Period { file: PathBuf },
    /// Normal-form conditions.
    Normalform { file: PathBuf },
    /// Tangent, cotangent and linear structure checks.
    Validate { file: PathBuf },
}

#[derive(Args, Debug)]
struct Flags {
    /// Seed for all sampling and searches.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    rtol: f64,
    #[arg(long, global = true, default_value_t = 1e-12)]
    atol: f64,
    /// Radius of the return ball for period detection.
    #[arg(long, global = true, default_value_t = 1e-6)]
    eps: f64,
    /// Integration limit for period detection.
    #[arg(long, global = true, default_value_t = 1e3)]
    tmax: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for CSV side files.
    #[arg(long = "csv-dir", global = true)]
    csv_dir: Option<PathBuf>,
    /// Second system file for `period`.
    #[arg(long, global = true)]
    compare: Option<PathBuf>,
}

fn load(path: &Path) -> Result<(SystemFile, String), String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| format!("{}: not UTF-8", path.display()))?;
    let system = SystemFile::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((system, hamkit_cli::digest(&bytes)))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, file) = match &cli.command {
        Cmd::Verify { file } => (Command::Verify, file),
        Cmd::Factorize { file } => (Command::Factorize, file),
        Cmd::Altgen { file } => (Command::Altgen, file),
        Cmd::Resonance { file } => (Command::Resonance, file),
        Cmd::Period { file } => (Command::Period, file),
        Cmd::Normalform { file } => (Command::NormalForm, file),
        Cmd::Validate { file } => (Command::Validate, file),
    };
    let f = &cli.flags;
    let opts = RunOptions {
        seed: f.seed,
        flow: FlowOptions { rtol: f.rtol, atol: f.atol, eps: f.eps, t_max: f.tmax },
    };
    let (system, sha) = match load(file) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let compare = match &f.compare {
        Some(p) => match load(p) {
            Ok(v) => Some((p.display().to_string(), v)),
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(1);
            }
        },
        None => None,
    };
    let path = file.display().to_string();
    let input = Input { path: &path, sha256: sha, system: &system };
    let compare_input =
        compare.as_ref().map(|(p, (s, sha))| Input { path: p.as_str(), sha256: sha.clone(), system: s });
    let outcome = run(command, &input, opts, compare_input.as_ref());

    if let Some(dir) = &f.csv_dir {
        let written = fs::create_dir_all(dir)
            .and_then(|_| outcome.csv.iter().try_for_each(|(name, body)| fs::write(dir.join(name), body)));
        if let Err(e) = written {
            eprintln!("error: {}: {e}", dir.display());
            return ExitCode::from(2);
        }
    }
    let text = outcome.report_text();
    match &f.out {
        Some(p) => {
            if let Err(e) = fs::write(p, &text) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.exit_code as u8)
}
