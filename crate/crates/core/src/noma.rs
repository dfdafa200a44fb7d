//! Single-slot uplink NOMA rate mathematics.
//!
//! Vectors are in SIC decoding order: position 0 is decoded first and sees
//! every later user as interference. Rates are spectral efficiencies in
//! bit/s/Hz.
//!
//! * [`rates_for_order`] gives the per-user SIC rates for one decoding order.
//! * [`optimal_sic_order`] sorts by nonincreasing SNR, which maximizes the
//!   minimum rate over all orders.
//! * [`moderate_powers`] lowers SNRs (never raises them) so that every user
//!   gets the same rate `R̃`, the largest achievable common minimum.

use std::f64::consts::LN_2;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Relative tolerance of the bisection on `R`.
pub const ROOT_REL_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 400;

/// Linear SNRs, finite and nonnegative, at least one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrVector(Vec<f64>);

impl SnrVector {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::Domain("SNR vector must not be empty".into()));
        }
        if let Some(bad) = rho.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain(format!("SNR {bad} is not finite and >= 0")));
        }
        Ok(SnrVector(rho))
    }

    /// Reorders the entries so that output position `k` holds `self[order[k]]`.
    pub fn permuted(&self, order: &[usize]) -> SnrVector {
        SnrVector(order.iter().map(|&i| self.0[i]).collect())
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for SnrVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Per-user spectral efficiencies, bit/s/Hz, in decoding order.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVector(Vec<f64>);

impl RateVector {
    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for RateVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// SIC rates `R_n = log2(1 + ρ_n / (1 + Σ_{m>n} ρ_m))` in the given order.
pub fn rates_for_order(rho: &SnrVector) -> RateVector {
    let mut rates = vec![0.0; rho.len()];
    let mut interference = 0.0;
    for (rate, &r) in rates.iter_mut().zip(rho.iter()).rev() {
        *rate = (r / (1.0 + interference)).ln_1p() / LN_2;
        interference += r;
    }
    RateVector(rates)
}

/// Sum rate `log2(1 + Σ ρ_n)`, identical for every decoding order.
pub fn sum_rate(rho: &SnrVector) -> f64 {
    rho.iter().sum::<f64>().ln_1p() / LN_2
}

/// Decoding order with nonincreasing SNR. Ties keep their input order.
///
/// `order[k]` is the input index decoded at position `k`.
pub fn optimal_sic_order(rho: &SnrVector) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rho.len()).collect();
    order.sort_by(|&i, &j| rho[j].total_cmp(&rho[i]));
    order
}

/// `φ(R) = 2^{(k+1)R} − 2^{kR}` for a user with `k` later-decoded users,
/// where `k = len − 1 − position`.
///
/// This is the SNR at which the user at `position` (0-based) gets rate `R`
/// when every later user also gets `R`.
pub fn phi(position: usize, len: usize, rate: f64) -> f64 {
    let later = (len - 1 - position) as f64;
    (later * rate).exp2() * (rate * LN_2).exp_m1()
}

/// Unique `R > 0` solving `φ(R) = rho` for the user at `position` of `len`.
///
/// Bisects `g(R) = k·R + log2(2^R − 1) − log2(ρ)` on `(0, log2(1 + ρ)]`.
/// The last-decoded user has the closed form `log2(1 + ρ)`.
pub fn solve_phi_root(position: usize, len: usize, rho: f64) -> Result<f64> {
    if position >= len {
        return Err(Error::Domain(format!(
            "position {position} out of range for {len} users"
        )));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!(
            "phi root needs a finite SNR > 0, got {rho}"
        )));
    }
    let upper = rho.ln_1p() / LN_2;
    let later = (len - 1 - position) as f64;
    if later == 0.0 {
        return Ok(upper);
    }
    let target = rho.log2();
    let g = |r: f64| later * r + (r * LN_2).exp_m1().log2() - target;

    let (mut lo, mut hi) = (0.0_f64, upper);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= ROOT_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Output of [`moderate_powers`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModerationResult {
    /// Common rate of every user after moderation, bit/s/Hz.
    pub r_tilde: f64,
    /// Moderated SNRs, same order as the input.
    pub rho_tilde: SnrVector,
    /// Root of `φ = ρ` for each user.
    pub per_user_roots: Vec<f64>,
    /// First position whose root attains the minimum.
    pub binding_index: usize,
}

impl ModerationResult {
    /// Power reduction factor `ρ̃_n / ρ_n` per user.
    pub fn power_scale(&self, rho: &SnrVector) -> Vec<f64> {
        self.rho_tilde
            .iter()
            .zip(rho.iter())
            .map(|(t, r)| t / r)
            .collect()
    }
}

/// Equalizes all rates by lowering SNRs, for a vector already in
/// nonincreasing order with strictly positive entries.
///
/// Silent users must be removed by the caller; they have no positive root.
pub fn moderate_powers(rho: &SnrVector) -> Result<ModerationResult> {
    if let Some(i) = rho.windows(2).position(|w| w[0] < w[1]) {
        return Err(Error::Order { index: i + 1 });
    }
    let len = rho.len();
    let per_user_roots = rho
        .iter()
        .enumerate()
        .map(|(k, &r)| solve_phi_root(k, len, r))
        .collect::<Result<Vec<_>>>()?;
    let (binding_index, r_tilde) =
        per_user_roots
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (k, r)| {
                    if r < best.1 {
                        (k, r)
                    } else {
                        best
                    }
                },
            );
    // φ(R̃) can overshoot ρ by the bisection tolerance at the binding user
    let rho_tilde = rho
        .iter()
        .enumerate()
        .map(|(k, &r)| phi(k, len, r_tilde).min(r))
        .collect();
    Ok(ModerationResult {
        r_tilde,
        rho_tilde: SnrVector(rho_tilde),
        per_user_roots,
        binding_index,
    })
}
