use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use satnoma::linkbudget::build_snr_matrix;
use satnoma::noma::{self, SnrVector};
use satnoma::oracle::{self, VerifyOptions, VerifyReport};
use satnoma::sweep;
use satnoma::{scheduler, Scenario, TieBreak};

/// Caps sweep parallelism; 0 means one worker per core.
pub const THREADS_ENV: &str = "SATNOMA_THREADS";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::VerifyFailed(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<satnoma::Error> for CliError {
    fn from(e: satnoma::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

pub struct Globals {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Globals {
    fn scenario(&self) -> CliResult<Scenario> {
        let mut scenario = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                Scenario::from_toml_str(&text)?
            }
            None => Scenario::default(),
        };
        if let Some(seed) = self.seed {
            scenario.sim.seed = seed;
        }
        Ok(scenario)
    }
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn threads() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}: `{v}` is not a thread count"))),
        Err(_) => Ok(0),
    }
}

pub fn snr(g: &Globals, probe_nine: bool) -> CliResult<()> {
    let mut scenario = g.scenario()?;
    if probe_nine {
        scenario = scenario.with_probe_nine();
    }
    let matrix = build_snr_matrix(&scenario)?;
    let mut buf = Vec::new();
    matrix.write_csv(&mut buf).expect("write to memory");
    write_to(g.out.as_deref(), &buf)
}

#[derive(Serialize)]
struct SimulateParams {
    n_users: usize,
    n_slots: usize,
    n_rep: usize,
    n_sic: usize,
    moderate: bool,
    permute: bool,
    seed: u64,
    tie_break: TieBreak,
    reset_per_cycle: bool,
    bandwidth_hz: f64,
}

#[derive(Serialize)]
struct SimulateSummary {
    min: u64,
    max: u64,
    mean: u64,
    sum: u64,
    sum_rate_bound: u64,
    params: SimulateParams,
}

fn bps(x: f64) -> u64 {
    x.round() as u64
}

fn summary_path(out: Option<&Path>, summary: Option<PathBuf>) -> Option<PathBuf> {
    summary.or_else(|| {
        out.map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".summary.json");
            PathBuf::from(s)
        })
    })
}

pub fn simulate(
    g: &Globals,
    n_sic: Option<usize>,
    moderate: bool,
    permute: bool,
    summary: Option<PathBuf>,
) -> CliResult<()> {
    let mut scenario = g.scenario()?;
    if let Some(n) = n_sic {
        scenario.sim.n_sic = n;
    }
    scenario.sim.moderate |= moderate;
    scenario.sim.permute_slots |= permute;
    scenario.validate()?;

    let matrix = build_snr_matrix(&scenario)?;
    let cfg = scenario.scheduler_config();
    let result = scheduler::run(&matrix, &cfg, scenario.link.bandwidth)?;
    let users = scenario.users()?;

    let mut csv = Vec::new();
    writeln!(csv, "user,lat,lon,throughput_bps").expect("write to memory");
    for (n, (u, t)) in users.iter().zip(&result.throughput).enumerate() {
        writeln!(csv, "{n},{:.6},{:.6},{:.0}", u.lat, u.lon, t).expect("write to memory");
    }

    let s = &scenario.sim;
    let report = SimulateSummary {
        min: bps(result.min_throughput()),
        max: bps(result.max_throughput()),
        mean: bps(result.mean_throughput()),
        sum: bps(result.sum_throughput()),
        sum_rate_bound: bps(result.sum_rate_bound),
        params: SimulateParams {
            n_users: s.n_users,
            n_slots: s.n_slots,
            n_rep: s.n_rep,
            n_sic: s.n_sic,
            moderate: s.moderate,
            permute: s.permute_slots,
            seed: s.seed,
            tie_break: s.tie_break,
            reset_per_cycle: s.reset_per_cycle,
            bandwidth_hz: scenario.link.bandwidth,
        },
    };
    let mut json = serde_json::to_vec_pretty(&report).expect("summary serializes");
    json.push(b'\n');

    write_to(g.out.as_deref(), &csv)?;
    if let Some(path) = summary_path(g.out.as_deref(), summary) {
        write_to(Some(&path), &json)?;
    }
    Ok(())
}

pub fn sweep(g: &Globals, n_sic: &str, moderate: &[bool], permute: &[bool]) -> CliResult<()> {
    let scenario = g.scenario()?;
    let n_sics = sweep::parse_n_sic_list(n_sic)?;
    let matrix = build_snr_matrix(&scenario)?;
    let result = sweep::run_sweep(
        &matrix,
        &scenario.scheduler_config(),
        scenario.link.bandwidth,
        &n_sics,
        moderate,
        permute,
        threads()?,
    )?;
    let mut buf = Vec::new();
    result.write_csv(&mut buf).expect("write to memory");
    write_to(g.out.as_deref(), &buf)
}

fn ascending_order(rho: &SnrVector) -> Vec<usize> {
    let mut order = noma::optimal_sic_order(rho);
    order.reverse();
    order
}

pub fn verify(
    g: &Globals,
    trials: usize,
    max_users: usize,
    samples: usize,
    ascending: bool,
) -> CliResult<()> {
    if max_users > oracle::MAX_EXHAUSTIVE_LEN {
        return Err(CliError::Config(format!(
            "--max-users {max_users} exceeds {}",
            oracle::MAX_EXHAUSTIVE_LEN
        )));
    }
    if max_users == 0 {
        return Err(CliError::Config("--max-users must be >= 1".into()));
    }
    let opts = VerifyOptions {
        trials,
        max_users,
        samples,
        seed: g.seed.unwrap_or(VerifyOptions::default().seed),
    };
    let reports: Vec<VerifyReport> = if ascending {
        oracle::verify_all(opts, &ascending_order)?
    } else {
        oracle::verify_all(opts, &noma::optimal_sic_order)?
    };
    let mut json = serde_json::to_vec_pretty(&reports).expect("reports serialize");
    json.push(b'\n');
    write_to(g.out.as_deref(), &json)?;

    let failed: Vec<&VerifyReport> = reports.iter().filter(|r| !r.passed()).collect();
    if failed.is_empty() {
        return Ok(());
    }
    for r in &failed {
        eprintln!(
            "{}: {} of {} trials failed, worst gap {:?}, first inputs {:?}",
            r.check,
            r.failures,
            r.trials,
            r.worst_gap,
            r.failing_inputs.iter().take(3).collect::<Vec<_>>()
        );
    }
    let names: Vec<&str> = failed.iter().map(|r| r.check.as_str()).collect();
    Err(CliError::VerifyFailed(names.join(", ")))
}
