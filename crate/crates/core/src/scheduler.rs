//! Multi-slot rate equalization.
//!
//! Each slot admits the `n_sic` users with the smallest cumulative rate,
//! decodes them in nonincreasing SNR order (optionally after power
//! moderation) and adds the resulting rates to their totals. Users that are
//! not admitted stay silent for the slot.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkbudget::SnrMatrix;
use crate::noma::{self, SnrVector};
use crate::rng::{self, Purpose};

/// How users with equal cumulative rate are ordered at the selection cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lowest user id first.
    #[default]
    ByIndex,
    /// Seeded shuffle among the tied users.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    pub n_sic: usize,
    /// Equalize rates inside each slot by lowering SNRs.
    pub moderate: bool,
    /// Visit the slots of each cycle in a fresh random order.
    pub permute_slots: bool,
    /// Number of periodic repetitions of the pass.
    pub n_rep: usize,
    pub seed: u64,
    pub tie_break: TieBreak,
    /// Restart the selection totals at the start of every cycle. Reported
    /// totals always cover the whole run.
    pub reset_per_cycle: bool,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            n_sic: 4,
            moderate: false,
            permute_slots: false,
            n_rep: 1,
            seed: 1,
            tie_break: TieBreak::ByIndex,
            reset_per_cycle: false,
        }
    }
}

impl SchedulerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_sic == 0 {
            return Err(Error::config("sim.n_sic", "must be >= 1"));
        }
        if self.n_rep == 0 {
            return Err(Error::config("sim.n_rep", "must be >= 1"));
        }
        Ok(())
    }
}

/// What happened in one slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotDecision {
    pub cycle: usize,
    /// Slot index within the pass, 0-based.
    pub slot_index: usize,
    /// Admitted users, smallest cumulative rate first.
    pub selected: Vec<usize>,
    /// Admitted users in decoding order.
    pub sic_order: Vec<usize>,
    /// Linear SNRs actually used, in decoding order.
    pub rho_used: Vec<f64>,
    /// Rates in decoding order, bit/s/Hz.
    pub rates: Vec<f64>,
}

impl SlotDecision {
    pub fn min_rate(&self) -> f64 {
        self.rates.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    /// Total spectral efficiency per user over every slot of every cycle.
    pub cumulative: Vec<f64>,
    pub per_slot: Vec<SlotDecision>,
    /// Pass-averaged throughput per user, bit/s.
    pub throughput: Vec<f64>,
    /// Full-SIC ceiling `(1/T)·Σ_t log2(1 + Σ_n ρ_n[t])·B`, bit/s.
    pub sum_rate_bound: f64,
}

impl SimResult {
    pub fn sum_throughput(&self) -> f64 {
        self.throughput.iter().sum()
    }

    pub fn min_throughput(&self) -> f64 {
        self.throughput
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_throughput(&self) -> f64 {
        self.throughput
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_throughput(&self) -> f64 {
        self.sum_throughput() / self.throughput.len() as f64
    }
}

/// Picks up to `n_sic` users with the smallest `cumulative` totals among
/// those with a nonzero SNR in this slot.
///
/// The returned ids are ordered by cumulative total.
pub fn select_users<R: Rng + ?Sized>(
    cumulative: &[f64],
    rho_slot: &[f64],
    n_sic: usize,
    tie_break: TieBreak,
    rng: &mut R,
) -> Vec<usize> {
    debug_assert_eq!(cumulative.len(), rho_slot.len());
    let mut eligible: Vec<usize> = (0..rho_slot.len()).filter(|&n| rho_slot[n] > 0.0).collect();
    // stable sort: ties stay in id order
    eligible.sort_by(|&i, &j| cumulative[i].total_cmp(&cumulative[j]));
    if eligible.len() <= n_sic {
        return eligible;
    }
    if tie_break == TieBreak::Random {
        let cut = cumulative[eligible[n_sic - 1]];
        let start = eligible.partition_point(|&n| cumulative[n] < cut);
        let end = eligible.partition_point(|&n| cumulative[n] <= cut);
        eligible[start..end].shuffle(rng);
    }
    eligible.truncate(n_sic);
    eligible
}

/// Decodes the `selected` users of one slot.
///
/// `rho_slot` is indexed by user id; every selected user must have a
/// positive SNR.
pub fn run_slot(
    slot_index: usize,
    selected: &[usize],
    rho_slot: &[f64],
    moderate: bool,
) -> Result<SlotDecision> {
    if selected.is_empty() {
        return Ok(SlotDecision {
            cycle: 0,
            slot_index,
            selected: Vec::new(),
            sic_order: Vec::new(),
            rho_used: Vec::new(),
            rates: Vec::new(),
        });
    }
    let rho = SnrVector::new(selected.iter().map(|&n| rho_slot[n]).collect())?;
    let order = noma::optimal_sic_order(&rho);
    let sorted = rho.permuted(&order);
    let used = if moderate {
        noma::moderate_powers(&sorted)?.rho_tilde
    } else {
        sorted
    };
    let rates = noma::rates_for_order(&used);
    Ok(SlotDecision {
        cycle: 0,
        slot_index,
        selected: selected.to_vec(),
        sic_order: order.iter().map(|&k| selected[k]).collect(),
        rho_used: used.into_inner(),
        rates: rates.into_inner(),
    })
}

/// Runs the scheduler over `cfg.n_rep` repetitions of the pass. `bandwidth`
/// (Hz) converts spectral efficiency to throughput.
pub fn run(snr: &SnrMatrix, cfg: &SchedulerConfig, bandwidth: f64) -> Result<SimResult> {
    cfg.validate()?;
    let n_users = snr.n_users;
    let n_slots = snr.n_slots;
    let columns: Vec<Vec<f64>> = (0..n_slots).map(|k| snr.slot_column(k)).collect();

    let mut cumulative = vec![0.0; n_users];
    let mut selection_totals = vec![0.0; n_users];
    let mut per_slot = Vec::with_capacity(n_slots * cfg.n_rep);
    let mut tie_rng = rng::stream(cfg.seed, Purpose::TieBreak, 0);

    for cycle in 0..cfg.n_rep {
        if cfg.reset_per_cycle {
            selection_totals.fill(0.0);
        }
        let mut order: Vec<usize> = (0..n_slots).collect();
        if cfg.permute_slots {
            order.shuffle(&mut rng::stream(
                cfg.seed,
                Purpose::SlotPermutation,
                cycle as u64,
            ));
        }
        for &k in &order {
            let column = &columns[k];
            let selected = select_users(
                &selection_totals,
                column,
                cfg.n_sic,
                cfg.tie_break,
                &mut tie_rng,
            );
            let mut decision = run_slot(k, &selected, column, cfg.moderate)?;
            decision.cycle = cycle;
            for (&n, &r) in decision.sic_order.iter().zip(&decision.rates) {
                cumulative[n] += r;
                selection_totals[n] += r;
            }
            per_slot.push(decision);
        }
    }

    let slots_total = (n_slots * cfg.n_rep) as f64;
    let throughput = cumulative
        .iter()
        .map(|c| c * bandwidth / slots_total)
        .collect();
    let sum_rate_bound = columns
        .iter()
        .map(|col| col.iter().sum::<f64>().ln_1p() / std::f64::consts::LN_2)
        .sum::<f64>()
        / n_slots as f64
        * bandwidth;

    Ok(SimResult {
        cumulative,
        per_slot,
        throughput,
        sum_rate_bound,
    })
}
