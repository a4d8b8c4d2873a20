//! Experiment runner: sweeps amplifier parameters and emits deterministic
//! CSV curve data, or runs the library's verification suite.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use oneway_nla::verify;

use nla_cli::sweep::Sweep;
use nla_cli::{experiments, CommonArgs};

#[derive(Parser)]
#[command(
    name = "nla",
    version,
    about = "One-way noiseless-amplifier experiments",
    after_help = "Swept flags accept either a single value or START:STOP:COUNT \
                  with inclusive endpoints and COUNT >= 2."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gain of both operating points against the splitter setting
    Gain {
        #[command(flatten)]
        common: CommonArgs,
        /// Channel survivability
        #[arg(long, default_value = "0.5")]
        gamma: f64,
        /// Splitter setting (sweepable)
        #[arg(long, default_value = "0:1:101")]
        t: Sweep,
        /// Operating point selection: 1, 2 or both
        #[arg(long, default_value = "both")]
        op: String,
    },
    /// Success probabilities of the one-way amplifier and the scissors
    /// reference against the splitter setting
    Psucc {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "0.5")]
        gamma: f64,
        #[arg(long, default_value = "0:1:101")]
        t: Sweep,
    },
    /// Key rates against transmission distance
    Skr {
        #[command(flatten)]
        common: CommonArgs,
        /// Attenuation factor in dB/km
        #[arg(long = "atten-db-km", default_value = "0.6")]
        atten_db_km: f64,
        /// End-to-end distance in km (sweepable)
        #[arg(long, default_value = "0:50:101")]
        distance: Sweep,
        /// Repeater segments for the reference bound (1 or 2)
        #[arg(long, default_value = "1")]
        k: u8,
        /// Splitter setting
        #[arg(long, default_value = "0.5")]
        t: f64,
        /// Source mean photon number
        #[arg(long, default_value = "0.01")]
        ns: f64,
    },
    /// Idler-restoration protocol for a stored mode
    Sensing {
        #[command(flatten)]
        common: CommonArgs,
        /// Storage survivability
        #[arg(long, default_value = "0.5")]
        gamma: f64,
        /// Splitter setting (sweepable)
        #[arg(long, default_value = "0:1:101")]
        t: Sweep,
        /// Source mean photon number
        #[arg(long, default_value = "0.01")]
        ns: f64,
    },
    /// Remote entanglement swap at fixed settings
    Entangle {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the full verification suite; exits nonzero on any failure
    Verify,
}

fn main() -> ExitCode {
    // exit codes: 0 success, 1 configuration error, 2 verification failure
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn open_sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, String> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Verify => {
            let outcomes = verify::run_all();
            let mut failed = 0;
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                println!("{status} criterion {:>2}: {} — {}", o.id, o.name, o.detail);
                if !o.passed {
                    failed += 1;
                }
            }
            println!(
                "{} of {} checks passed",
                outcomes.len() - failed,
                outcomes.len()
            );
            if failed > 0 {
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gain { common, gamma, t, op } => {
            let mut sink = open_sink(&common.out)?;
            experiments::gain(&mut sink, &common, gamma, &t, &op).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Psucc { common, gamma, t } => {
            let mut sink = open_sink(&common.out)?;
            experiments::psucc(&mut sink, &common, gamma, &t).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Skr {
            common,
            atten_db_km,
            distance,
            k,
            t,
            ns,
        } => {
            let mut sink = open_sink(&common.out)?;
            experiments::skr(&mut sink, &common, atten_db_km, &distance, k, t, ns)
                .map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sensing {
            common,
            gamma,
            t,
            ns,
        } => {
            let mut sink = open_sink(&common.out)?;
            experiments::sensing(&mut sink, &common, gamma, &t, ns).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Entangle { common } => {
            let mut sink = open_sink(&common.out)?;
            experiments::entangle(&mut sink, &common).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
