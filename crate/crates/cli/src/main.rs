use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gaussnm::Channel;
use gaussnm_cli::{format_summary, run_scan, summarize, CliError, ScanConfig};
use log::{info, LevelFilter};

#[derive(Parser, Debug)]
#[command(name = "gaussnm", version, about = "Non-Markovianity of single-mode Gaussian channels")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scan N_p over τ for each channel and x, writing CSV.
    Scan(ScanArgs),
    /// Summarize a scan CSV per (channel, x).
    Summarize {
        csv: PathBuf,
        /// Temperature used for the asymptotic comparison column.
        #[arg(long, default_value_t = 100.0)]
        theta: f64,
    },
    /// Dump the coefficient table for one x as CSV.
    Table {
        #[command(flatten)]
        bath: BathArgs,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct BathArgs {
    #[arg(long, default_value_t = 100.0)]
    theta: f64,
    #[arg(long, default_value_t = gaussnm::coeffs::DEFAULT_ALPHA)]
    alpha: f64,
    /// Ohmicity exponent of the spectral density.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 50.0)]
    tau_max: f64,
    /// Number of τ grid points (default: 40 per oscillation period, step ≤ 0.05).
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// qbm_exact, qbm_rwa or pd (repeatable).
    #[arg(long = "channel", required = true)]
    channels: Vec<String>,
    /// Non-Markovianity parameter x = ω_c/ω_0 (repeatable).
    #[arg(long = "x")]
    xs: Vec<f64>,
    #[command(flatten)]
    bath: BathArgs,
    #[arg(long)]
    out: PathBuf,
    /// Also evaluate the distance witness for a pair family
    /// (standard, coherent, squeezed, thermal, mixed).
    #[arg(long)]
    witness_pairs: Option<String>,
}

fn scan_config(args: ScanArgs) -> Result<ScanConfig, CliError> {
    let channels = args
        .channels
        .iter()
        .map(|c| c.parse::<Channel>())
        .collect::<gaussnm::Result<Vec<_>>>()?;
    Ok(ScanConfig {
        channels,
        xs: args.xs,
        theta: args.bath.theta,
        alpha: args.bath.alpha,
        s: args.bath.s,
        tau_max: args.bath.tau_max,
        n_grid: args.bath.grid,
        out: args.out,
        witness_pairs: args.witness_pairs,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scan(args) => {
            let cfg = scan_config(args)?;
            for path in run_scan(&cfg)? {
                info!("wrote {}", path.display());
            }
        }
        Command::Summarize { csv, theta } => {
            print!("{}", format_summary(&summarize(&csv, theta)?));
        }
        Command::Table { bath, x, out } => {
            let cfg = ScanConfig {
                channels: vec![Channel::QbmExact],
                xs: vec![x],
                theta: bath.theta,
                alpha: bath.alpha,
                s: bath.s,
                tau_max: bath.tau_max,
                n_grid: bath.grid,
                out: out.clone(),
                witness_pairs: None,
            };
            cfg.validate()?;
            let table = gaussnm::build_table(&cfg.params(x)?)?;
            let file = File::create(&out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
            table.write_csv(BufWriter::new(file))?;
            info!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors are configuration errors (exit 1), not clap's default 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
