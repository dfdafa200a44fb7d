//! Parameter sweeps over `n_sic`, moderation and slot permutation.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linkbudget::SnrMatrix;
use crate::scheduler::{self, SchedulerConfig};

/// One sweep combination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n_sic: usize,
    pub moderate: bool,
    pub permute: bool,
    pub min_bps: f64,
    pub mean_bps: f64,
    pub max_bps: f64,
    pub sum_bps: f64,
    /// Per-user throughput, bit/s.
    #[serde(skip)]
    pub throughput: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub sum_rate_bound: f64,
    pub n_users: usize,
}

impl SweepResult {
    pub fn point(&self, n_sic: usize, moderate: bool, permute: bool) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| p.n_sic == n_sic && p.moderate == moderate && p.permute == permute)
    }

    /// One row per combination, then a `bound` row holding the full-SIC
    /// ceiling (total in `sum_bps`, per-user share in the other columns).
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n_sic,moderate,permute,min_bps,mean_bps,max_bps,sum_bps")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{:.0},{:.0},{:.0},{:.0}",
                p.n_sic, p.moderate, p.permute, p.min_bps, p.mean_bps, p.max_bps, p.sum_bps
            )?;
        }
        let share = self.sum_rate_bound / self.n_users as f64;
        writeln!(
            w,
            "bound,false,false,{share:.0},{share:.0},{share:.0},{:.0}",
            self.sum_rate_bound
        )
    }
}

/// Parses a comma-separated `n_sic` list such as `"2,3,4,5,10,20"`.
pub fn parse_n_sic_list(text: &str) -> Result<Vec<usize>> {
    let values = text
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>().ok().filter(|&v| v >= 1).ok_or_else(|| {
                Error::config("sim.n_sic", format!("`{s}` is not a positive integer"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::config("sim.n_sic", "list is empty"));
    }
    Ok(values)
}

/// Runs every `(moderate, permute, n_sic)` combination in parallel.
///
/// `threads` caps the worker count; 0 lets the pool decide. Points come
/// back ordered by moderate, then permute, then the given `n_sic` order.
pub fn run_sweep(
    snr: &SnrMatrix,
    base: &SchedulerConfig,
    bandwidth: f64,
    n_sics: &[usize],
    moderate: &[bool],
    permute: &[bool],
    threads: usize,
) -> Result<SweepResult> {
    let mut combos = Vec::new();
    for &m in moderate {
        for &p in permute {
            for &n in n_sics {
                combos.push(SchedulerConfig {
                    n_sic: n,
                    moderate: m,
                    permute_slots: p,
                    ..*base
                });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let results = pool.install(|| {
        combos
            .par_iter()
            .map(|cfg| scheduler::run(snr, cfg, bandwidth).map(|r| (*cfg, r)))
            .collect::<Result<Vec<_>>>()
    })?;

    let sum_rate_bound = results.first().map_or(0.0, |(_, r)| r.sum_rate_bound);
    let points = results
        .into_iter()
        .map(|(cfg, r)| SweepPoint {
            n_sic: cfg.n_sic,
            moderate: cfg.moderate,
            permute: cfg.permute_slots,
            min_bps: r.min_throughput(),
            mean_bps: r.mean_throughput(),
            max_bps: r.max_throughput(),
            sum_bps: r.sum_throughput(),
            throughput: r.throughput,
        })
        .collect();
    Ok(SweepResult {
        points,
        sum_rate_bound,
        n_users: snr.n_users,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists() {
        assert_eq!(
            parse_n_sic_list("2,3,4,5,10,20").unwrap(),
            vec![2, 3, 4, 5, 10, 20]
        );
        assert_eq!(parse_n_sic_list(" 256 ").unwrap(), vec![256]);
        assert!(parse_n_sic_list("").is_err());
        assert!(parse_n_sic_list("2,x").is_err());
        assert!(parse_n_sic_list("0").is_err());
    }

    #[test]
    fn sweep_layout_and_csv() {
        let rows = vec![vec![3.0, 1.0], vec![1.0, 2.0], vec![0.5, 4.0]];
        let snr = SnrMatrix::from_rows(rows, 1.0).unwrap();
        let base = SchedulerConfig {
            n_rep: 3,
            ..SchedulerConfig::default()
        };
        let res = run_sweep(&snr, &base, 10.0, &[1, 3], &[false, true], &[false], 2).unwrap();
        assert_eq!(res.points.len(), 4);
        let order: Vec<(bool, usize)> = res.points.iter().map(|p| (p.moderate, p.n_sic)).collect();
        assert_eq!(order, vec![(false, 1), (false, 3), (true, 1), (true, 3)]);
        let full = res.point(3, false, false).unwrap();
        assert!((full.sum_bps - res.sum_rate_bound).abs() < 1e-9 * res.sum_rate_bound);
        assert!(full.min_bps <= full.mean_bps && full.mean_bps <= full.max_bps);

        let mut out = Vec::new();
        res.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "n_sic,moderate,permute,min_bps,mean_bps,max_bps,sum_bps"
        );
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("1,false,false,"));
        assert!(lines[5].starts_with("bound,false,false,"));
    }
}
