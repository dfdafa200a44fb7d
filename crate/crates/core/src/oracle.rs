//! Brute-force verifiers for the ordering and moderation results.
//!
//! The oracle keeps its own quadratic-time rate evaluation
//! ([`oracle_rates`]) instead of the running-sum form in [`crate::noma`],
//! so a bug in one route shows up as disagreement with the other.

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noma::{self, SnrVector};
use crate::rng::{self, Purpose, StreamRng};

/// Longest vector [`exhaustive_max_min`] will enumerate.
pub const MAX_EXHAUSTIVE_LEN: usize = 8;
/// Tolerance for order comparisons and swap monotonicity.
pub const ORDER_TOL: f64 = 1e-12;
/// Tolerance for moderation probes and algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-9;
const MAX_RECORDED_FAILURES: usize = 16;

/// Outcome of one family of checks.
///
/// Each trial yields a signed margin, positive when the claim holds with
/// room to spare; a trial fails when its margin is below `-tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub check: String,
    pub trials: usize,
    pub failures: usize,
    /// Most negative margin seen, `None` when no trial ran.
    pub worst_gap: Option<f64>,
    pub tolerance: f64,
    /// Up to 16 failing inputs.
    pub failing_inputs: Vec<Vec<f64>>,
}

impl VerifyReport {
    pub fn new(check: &str, tolerance: f64) -> Self {
        VerifyReport {
            check: check.to_string(),
            trials: 0,
            failures: 0,
            worst_gap: None,
            tolerance,
            failing_inputs: Vec::new(),
        }
    }

    pub fn record(&mut self, gap: f64, input: &[f64]) {
        self.trials += 1;
        self.worst_gap = Some(self.worst_gap.map_or(gap, |w| w.min(gap)));
        if !(gap >= -self.tolerance) {
            self.failures += 1;
            if self.failing_inputs.len() < MAX_RECORDED_FAILURES {
                self.failing_inputs.push(input.to_vec());
            }
        }
    }

    /// Folds `other` into `self`; used to combine per-trial reports.
    pub fn merge(&mut self, other: VerifyReport) {
        self.trials += other.trials;
        self.failures += other.failures;
        self.worst_gap = match (self.worst_gap, other.worst_gap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let room = MAX_RECORDED_FAILURES.saturating_sub(self.failing_inputs.len());
        self.failing_inputs
            .extend(other.failing_inputs.into_iter().take(room));
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// SIC rates with each user's interference summed term by term over the
/// later-decoded users.
pub fn oracle_rates(rho: &[f64]) -> Vec<f64> {
    (0..rho.len())
        .map(|n| {
            let interference: f64 = rho[n + 1..].iter().sum();
            (1.0 + rho[n] / (1.0 + interference)).log2()
        })
        .collect()
}

pub fn oracle_min_rate(rho: &[f64]) -> f64 {
    oracle_rates(rho).into_iter().fold(f64::INFINITY, f64::min)
}

/// Best decoding order over all permutations, and its minimum rate.
///
/// The first permutation in lexicographic order wins ties.
pub fn exhaustive_max_min(rho: &[f64]) -> Result<(Vec<usize>, f64)> {
    if rho.len() > MAX_EXHAUSTIVE_LEN {
        return Err(Error::Size {
            len: rho.len(),
            max: MAX_EXHAUSTIVE_LEN,
        });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for order in (0..rho.len()).permutations(rho.len()) {
        let arranged: Vec<f64> = order.iter().map(|&i| rho[i]).collect();
        let value = oracle_min_rate(&arranged);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((order, value));
        }
    }
    Ok(best.expect("at least the empty permutation"))
}

/// Log-uniform SNRs in `[0.01, 100]`.
pub fn random_snrs<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| 10f64.powf(rng.random_range(-2.0..=2.0)))
        .collect()
}

fn random_len<R: Rng + ?Sized>(rng: &mut R, lo: usize, max: usize) -> usize {
    rng.random_range(lo..=max.max(lo))
}

/// A decoding-order policy: `order[k]` is the input index decoded k-th.
pub type OrderPolicy = dyn Fn(&SnrVector) -> Vec<usize> + Sync;

/// Compares `policy`'s minimum rate with the exhaustive optimum on `trials`
/// random vectors of length `1..=max_users`.
pub fn check_order_policy(
    trials: usize,
    max_users: usize,
    seed: u64,
    policy: &OrderPolicy,
) -> Result<VerifyReport> {
    if max_users > MAX_EXHAUSTIVE_LEN {
        return Err(Error::Size {
            len: max_users,
            max: MAX_EXHAUSTIVE_LEN,
        });
    }
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, Purpose::OracleTrial, i as u64);
            let len = random_len(&mut r, 1, max_users);
            let rho = random_snrs(&mut r, len);
            let (_, best) = exhaustive_max_min(&rho)?;
            let v = SnrVector::new(rho.clone())?;
            let chosen = noma::rates_for_order(&v.permuted(&policy(&v))).min();
            let mut rep = VerifyReport::new("sic_order_optimality", ORDER_TOL);
            rep.record(chosen - best, &rho);
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fold_reports(
        VerifyReport::new("sic_order_optimality", ORDER_TOL),
        per_trial,
    ))
}

/// Exchanging `ρ_a < ρ_b` (`a < b`) never lowers the minimum rate.
pub fn check_swap_monotonicity(trials: usize, max_users: usize, seed: u64) -> VerifyReport {
    let mut rep = VerifyReport::new("swap_monotonicity", ORDER_TOL);
    for i in 0..trials {
        let mut r = rng::stream(seed, Purpose::OracleSwap, i as u64);
        let len = random_len(&mut r, 2, max_users);
        let mut rho = random_snrs(&mut r, len);
        let a = r.random_range(0..len - 1);
        let b = r.random_range(a + 1..len);
        if rho[a] > rho[b] {
            rho.swap(a, b);
        }
        let before = oracle_min_rate(&rho);
        let mut swapped = rho.clone();
        swapped.swap(a, b);
        rep.record(oracle_min_rate(&swapped) - before, &rho);
    }
    rep
}

/// Random search for a feasible SNR vector `0 < ρ'_n ≤ ρ_n` whose minimum
/// rate beats the moderated common rate `R̃`.
///
/// Margins are `R̃ − min rate(ρ')`.
pub fn probe_moderation_optimality(
    rho: &SnrVector,
    samples: usize,
    rng: &mut StreamRng,
) -> Result<VerifyReport> {
    let r_tilde = noma::moderate_powers(rho)?.r_tilde;
    let mut rep = VerifyReport::new("moderation_probe", IDENTITY_TOL);
    let mut probe = vec![0.0; rho.len()];
    for _ in 0..samples {
        for (p, &r) in probe.iter_mut().zip(rho.iter()) {
            // (0, r]
            *p = r * (1.0 - rng.random::<f64>());
        }
        probe.sort_by(|a, b| b.total_cmp(a));
        let gap = r_tilde - oracle_min_rate(&probe);
        rep.record(gap, &probe);
    }
    Ok(rep)
}

/// Structural checks on one moderated vector: `ρ̃ ≤ ρ`, equal rates, and no
/// loss in the minimum rate. Returns the worst of the three margins.
fn moderation_margin(rho: &SnrVector) -> Result<f64> {
    let m = noma::moderate_powers(rho)?;
    let dominated = m
        .rho_tilde
        .iter()
        .zip(rho.iter())
        .map(|(t, r)| (r - t) / r)
        .fold(f64::INFINITY, f64::min);
    let equal = oracle_rates(&m.rho_tilde)
        .iter()
        .map(|r| -(r - m.r_tilde).abs())
        .fold(f64::INFINITY, f64::min);
    let improves = m.r_tilde - oracle_min_rate(rho);
    Ok(dominated.min(equal).min(improves))
}

/// Moderation suite over `trials` random nonincreasing vectors of length
/// `1..=max_users`: structural margins plus `samples` feasibility probes
/// each.
pub fn check_moderation(
    trials: usize,
    max_users: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<VerifyReport>> {
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, Purpose::OracleProbe, i as u64);
            let len = random_len(&mut r, 1, max_users);
            let mut rho = random_snrs(&mut r, len);
            rho.sort_by(|a, b| b.total_cmp(a));
            let v = SnrVector::new(rho.clone())?;
            let mut structure = VerifyReport::new("moderation_structure", IDENTITY_TOL);
            structure.record(moderation_margin(&v)?, &rho);
            let probe = probe_moderation_optimality(&v, samples, &mut r)?;
            Ok((structure, probe))
        })
        .collect::<Result<Vec<_>>>()?;
    let (structure, probes): (Vec<_>, Vec<_>) = per_trial.into_iter().unzip();
    Ok(vec![
        fold_reports(
            VerifyReport::new("moderation_structure", IDENTITY_TOL),
            structure,
        ),
        fold_reports(VerifyReport::new("moderation_probe", IDENTITY_TOL), probes),
    ])
}

/// `Σ_k φ_k(R) = 2^{NR} − 1` and equal rates `R` for the vector `φ(R)`,
/// for every `N` in `1..=max_n` and `R` in `rates`. Margins are negated
/// relative errors.
pub fn check_phi_identity(max_n: usize, rates: &[f64]) -> VerifyReport {
    let mut rep = VerifyReport::new("phi_identity", IDENTITY_TOL);
    for n in 1..=max_n {
        for &r in rates {
            let phis: Vec<f64> = (0..n).map(|k| noma::phi(k, n, r)).collect();
            let want = (n as f64 * r).exp2() - 1.0;
            let sum_err = ((phis.iter().sum::<f64>() - want) / want).abs();
            let rate_err = oracle_rates(&phis)
                .iter()
                .map(|x| ((x - r) / r).abs())
                .fold(0.0, f64::max);
            rep.record(-sum_err.max(rate_err), &[n as f64, r]);
        }
    }
    rep
}

/// Rates `0.05, 0.1, …, 4.0`.
pub fn default_rate_grid() -> Vec<f64> {
    (1..=80).map(|k| k as f64 * 0.05).collect()
}

/// Knobs for [`verify_all`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub trials: usize,
    pub max_users: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 1000,
            max_users: 6,
            samples: 1000,
            seed: 1,
        }
    }
}

/// Runs every check. `policy` is the ordering under test, normally
/// [`noma::optimal_sic_order`].
pub fn verify_all(opts: VerifyOptions, policy: &OrderPolicy) -> Result<Vec<VerifyReport>> {
    let mut reports = vec![
        check_order_policy(opts.trials, opts.max_users, opts.seed, policy)?,
        check_swap_monotonicity(10 * opts.trials, opts.max_users, opts.seed),
    ];
    reports.extend(check_moderation(
        opts.trials,
        opts.max_users,
        opts.samples,
        opts.seed,
    )?);
    let grid = if opts.trials == 0 {
        Vec::new()
    } else {
        default_rate_grid()
    };
    reports.push(check_phi_identity(32, &grid));
    Ok(reports)
}

fn fold_reports(mut acc: VerifyReport, parts: Vec<VerifyReport>) -> VerifyReport {
    for p in parts {
        acc.merge(p);
    }
    acc
}
