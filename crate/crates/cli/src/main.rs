//! `satnoma` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "satnoma",
    version,
    about = "Max-min fair uplink NOMA over a LEO satellite pass"
)]
struct Cli {
    /// Scenario TOML file; defaults apply to every missing key.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Overrides `sim.seed`.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    Off,
    On,
    Both,
}

impl Toggle {
    fn values(self) -> Vec<bool> {
        match self {
            Toggle::Off => vec![false],
            Toggle::On => vec![true],
            Toggle::Both => vec![false, true],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Optimal,
    Ascending,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the per-slot SNR matrix (dB) as CSV.
    Snr {
        /// Only the nine probe locations on the region's 3x3 lattice.
        #[arg(long = "probe-9")]
        probe_9: bool,
    },
    /// Run the scheduler once and write per-user throughput.
    Simulate {
        #[arg(long)]
        n_sic: Option<usize>,
        /// Enable per-slot power moderation.
        #[arg(long)]
        moderate: bool,
        /// Randomly permute slot order within each cycle.
        #[arg(long)]
        permute: bool,
        /// Summary JSON path; defaults to `<out>.summary.json`.
        #[arg(long, value_name = "PATH")]
        summary: Option<PathBuf>,
    },
    /// Run every (moderate, permute, n_sic) combination.
    Sweep {
        #[arg(long, default_value = "2,3,4,5,10,20")]
        n_sic: String,
        #[arg(long, value_enum, default_value_t = Toggle::Both)]
        moderate: Toggle,
        #[arg(long, value_enum, default_value_t = Toggle::Both)]
        permute: Toggle,
    },
    /// Check the ordering and moderation results against brute force.
    Verify {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        max_users: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Ordering under test (ascending is a negative control).
        #[arg(long, value_enum, default_value_t = Policy::Optimal, hide = true)]
        policy: Policy,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let globals = commands::Globals {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
    };
    let result = match cli.command {
        Command::Snr { probe_9 } => commands::snr(&globals, probe_9),
        Command::Simulate {
            n_sic,
            moderate,
            permute,
            summary,
        } => commands::simulate(&globals, n_sic, moderate, permute, summary),
        Command::Sweep {
            n_sic,
            moderate,
            permute,
        } => commands::sweep(&globals, &n_sic, &moderate.values(), &permute.values()),
        Command::Verify {
            trials,
            max_users,
            samples,
            policy,
        } => commands::verify(
            &globals,
            trials,
            max_users,
            samples,
            policy == Policy::Ascending,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("satnoma: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
