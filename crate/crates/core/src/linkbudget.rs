//! Uplink link budget: satellite antenna pattern, Friis received power,
//! thermal noise and the per-user, per-slot SNR matrix.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, GeoPoint, GroundTrack};
use crate::scenario::Scenario;
use crate::units::{db_to_linear, linear_to_db, SPEED_OF_LIGHT};

/// Piecewise satellite antenna gain approximation (ITU-R S.1528 form).
///
/// Angles in degrees, levels in dB/dBi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainPattern {
    /// Peak main-lobe gain, dBi.
    pub g_max: f64,
    /// Half of the 3-dB beamwidth, degrees.
    pub psi_b: f64,
    pub alpha: f64,
    /// Near-in side-lobe level relative to peak, dB.
    pub l_l: f64,
    /// Far-out side-lobe level, dBi.
    pub l_f: f64,
    /// Back-lobe level, dBi.
    pub l_b: f64,
    /// Major/minor axis ratio.
    pub z: f64,
    pub a: f64,
    pub b: f64,
}

impl Default for GainPattern {
    fn default() -> Self {
        GainPattern {
            g_max: 36.0,
            psi_b: 1.75,
            alpha: 2.0,
            l_l: -15.0,
            l_f: 0.0,
            l_b: -10.0,
            z: 1.0,
            a: 2.58,
            b: 6.32,
        }
    }
}

impl GainPattern {
    /// `X = G_max + L_L + 25·log10(b·ψ_b)`.
    pub fn x(&self) -> f64 {
        self.g_max + self.l_l + 25.0 * (self.b * self.psi_b).log10()
    }

    /// `Y = b·ψ_b·10^{0.04(G_max + L_L − L_F)}`, degrees.
    pub fn y(&self) -> f64 {
        self.b * self.psi_b * 10f64.powf(0.04 * (self.g_max + self.l_l - self.l_f))
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("gain.g_max", self.g_max),
            ("gain.psi_b", self.psi_b),
            ("gain.alpha", self.alpha),
            ("gain.l_l", self.l_l),
            ("gain.l_f", self.l_f),
            ("gain.l_b", self.l_b),
            ("gain.z", self.z),
            ("gain.a", self.a),
            ("gain.b", self.b),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(Error::config(key, "must be finite"));
            }
        }
        if self.psi_b <= 0.0 {
            return Err(Error::config("gain.psi_b", "must be > 0"));
        }
        if self.alpha <= 0.0 {
            return Err(Error::config("gain.alpha", "must be > 0"));
        }
        if self.z < 1.0 {
            return Err(Error::config("gain.z", "must be >= 1"));
        }
        if self.a <= 0.0 {
            return Err(Error::config("gain.a", "must be > 0"));
        }
        if self.a > self.b / 2.0 {
            return Err(Error::config("gain.a", "must satisfy a <= b/2"));
        }
        let y = self.y();
        if !(y > self.b * self.psi_b && y <= 90.0) {
            return Err(Error::config(
                "gain.l_f",
                format!("derived Y = {y:.4} deg must lie in (b*psi_b, 90]"),
            ));
        }
        Ok(())
    }
}

/// Satellite antenna gain at off-axis angle `psi` degrees, dBi.
///
/// Branches are tested in order; a boundary value belongs to the first
/// branch that contains it.
pub fn gain_dbi(p: &GainPattern, psi: f64) -> f64 {
    let psi = psi.abs();
    if psi <= p.a * p.psi_b {
        p.g_max - 3.0 * (psi / p.psi_b).powf(p.alpha)
    } else if psi <= 0.5 * p.b * p.psi_b {
        p.g_max + p.l_l - 20.0 * p.z.log10()
    } else if psi <= p.b * p.psi_b {
        p.g_max + p.l_l
    } else if psi <= p.y() {
        p.x() - 25.0 * psi.log10()
    } else if psi < 90.0 {
        p.l_f
    } else {
        p.l_b
    }
}

/// Terminal and receiver constants for the uplink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    /// Terminal transmit power, W.
    pub p_tx: f64,
    /// Terminal antenna gain, dBi.
    pub g_term: f64,
    /// Carrier frequency, Hz.
    pub freq: f64,
    /// Bandwidth, Hz.
    pub bandwidth: f64,
    /// Noise temperature, K.
    pub temperature: f64,
    /// Boltzmann constant, J/K.
    pub boltzmann: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            p_tx: 10.0,
            g_term: 3.0,
            freq: 14e9,
            bandwidth: 1e7,
            temperature: 290.0,
            boltzmann: 1.38e-23,
        }
    }
}

impl LinkConfig {
    /// Carrier wavelength, m.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.freq
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("link.p_tx", self.p_tx),
            ("link.freq", self.freq),
            ("link.bandwidth", self.bandwidth),
            ("link.temperature", self.temperature),
            ("link.boltzmann", self.boltzmann),
        ];
        for (key, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(key, "must be finite and > 0"));
            }
        }
        if !self.g_term.is_finite() {
            return Err(Error::config("link.g_term", "must be finite"));
        }
        Ok(())
    }
}

/// Friis received power in watts for off-axis angle `psi` (degrees) and
/// slant range `d_km`.
pub fn received_power(link: &LinkConfig, pattern: &GainPattern, psi: f64, d_km: f64) -> f64 {
    let spread = link.wavelength() / (4.0 * PI * d_km * 1e3);
    db_to_linear(link.g_term) * db_to_linear(gain_dbi(pattern, psi)) * spread * spread * link.p_tx
}

/// Thermal noise power `k·T0·B`, W.
pub fn noise_power(link: &LinkConfig) -> f64 {
    link.boltzmann * link.temperature * link.bandwidth
}

pub fn snr_linear(link: &LinkConfig, pattern: &GainPattern, psi: f64, d_km: f64) -> f64 {
    received_power(link, pattern, psi, d_km) / noise_power(link)
}

/// Linear SNR of `user` when the nadir is at `nadir`.
pub fn snr_between(
    track: &GroundTrack,
    link: &LinkConfig,
    pattern: &GainPattern,
    nadir: GeoPoint,
    user: GeoPoint,
) -> f64 {
    let gamma = geometry::central_angle(nadir, user);
    let d = geometry::slant_range(gamma, track.altitude, track.earth_radius);
    let psi = geometry::off_axis_angle(gamma, d, track.earth_radius);
    snr_linear(link, pattern, psi, d)
}

/// Linear SNR per user per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrMatrix {
    pub n_users: usize,
    pub n_slots: usize,
    /// Row-major, one row of `n_slots` entries per user.
    rho: Vec<f64>,
    pub slot_duration: f64,
}

impl SnrMatrix {
    /// Builds a matrix from one SNR row per user.
    pub fn from_rows(rows: Vec<Vec<f64>>, slot_duration: f64) -> Result<Self> {
        let n_users = rows.len();
        let n_slots = rows.first().map_or(0, Vec::len);
        if n_users == 0 || n_slots == 0 {
            return Err(Error::Domain(
                "SNR matrix needs at least one user and one slot".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != n_slots) {
            return Err(Error::Domain("SNR rows have unequal lengths".into()));
        }
        let rho: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(bad) = rho.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain(format!(
                "SNR entry {bad} is not finite and >= 0"
            )));
        }
        Ok(SnrMatrix {
            n_users,
            n_slots,
            rho,
            slot_duration,
        })
    }

    /// The same SNR in every slot for each user.
    pub fn constant(per_user: &[f64], n_slots: usize) -> Result<Self> {
        Self::from_rows(per_user.iter().map(|&r| vec![r; n_slots]).collect(), 1.0)
    }

    #[inline]
    pub fn get(&self, user: usize, slot: usize) -> f64 {
        self.rho[user * self.n_slots + slot]
    }

    pub fn user_row(&self, user: usize) -> &[f64] {
        &self.rho[user * self.n_slots..(user + 1) * self.n_slots]
    }

    pub fn slot_column(&self, slot: usize) -> Vec<f64> {
        (0..self.n_users).map(|n| self.get(n, slot)).collect()
    }

    /// Midpoint time of slot `slot` (0-based), seconds.
    pub fn slot_time(&self, slot: usize) -> f64 {
        (slot as f64 + 0.5) * self.slot_duration
    }

    /// CSV export: `slot,t_seconds,user_0,...`, SNR in dB with 6 decimals.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "slot,t_seconds")?;
        for n in 0..self.n_users {
            write!(w, ",user_{n}")?;
        }
        writeln!(w)?;
        for k in 0..self.n_slots {
            write!(w, "{k},{:.6}", self.slot_time(k))?;
            for n in 0..self.n_users {
                write!(w, ",{:.6}", linear_to_db(self.get(n, k)))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// SNR matrix for `users` sampled at the `n_slots` slot midpoints of the pass.
pub fn snr_matrix_for(
    track: &GroundTrack,
    link: &LinkConfig,
    pattern: &GainPattern,
    users: &[GeoPoint],
    n_slots: usize,
) -> Result<SnrMatrix> {
    if n_slots == 0 {
        return Err(Error::config("sim.n_slots", "must be >= 1"));
    }
    let slot_duration = track.passage_duration / n_slots as f64;
    let nadirs = (0..n_slots)
        .map(|k| geometry::nadir_at(track, (k as f64 + 0.5) * slot_duration))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<f64>> = users
        .par_iter()
        .map(|&u| {
            nadirs
                .iter()
                .map(|&nadir| snr_between(track, link, pattern, nadir, u))
                .collect()
        })
        .collect();
    SnrMatrix::from_rows(rows, slot_duration)
}

/// SNR matrix over the scenario's user grid.
pub fn build_snr_matrix(scenario: &Scenario) -> Result<SnrMatrix> {
    scenario.validate()?;
    let track = scenario.ground_track()?;
    let users = scenario.users()?;
    snr_matrix_for(
        &track,
        &scenario.link,
        &scenario.gain,
        &users,
        scenario.sim.n_slots,
    )
}
