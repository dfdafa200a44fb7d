//! Experiment configuration.
//!
//! A scenario is a TOML document with four sections, `[track]`, `[gain]`,
//! `[link]` and `[sim]`. Every key has a default, so an empty document is
//! the reference scenario: 256 users on a 16×16 grid, 100 slots over one
//! 550 km pass, 100 periodic repetitions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CoverageRegion, GeoPoint, GroundTrack};
use crate::linkbudget::{GainPattern, LinkConfig};
use crate::scheduler::{SchedulerConfig, TieBreak};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackConfig {
    /// Region center latitude, degrees.
    pub center_lat: f64,
    /// Region center longitude, degrees.
    pub center_lon: f64,
    /// Orbit inclination, degrees.
    pub inclination: f64,
    /// Central Earth angle swept per second, degrees/s.
    pub angular_speed: f64,
    /// Orbit altitude, km.
    pub altitude: f64,
    /// Half-height of the coverage region in latitude, degrees.
    pub delta_lat: f64,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig {
            center_lat: 0.0,
            center_lon: 0.0,
            inclination: 53.0,
            // one orbit per 90 minutes
            angular_speed: 360.0 / (90.0 * 60.0),
            altitude: 550.0,
            delta_lat: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub n_users: usize,
    pub n_slots: usize,
    pub n_sic: usize,
    pub n_rep: usize,
    pub moderate: bool,
    pub permute_slots: bool,
    pub seed: u64,
    pub tie_break: TieBreak,
    pub reset_per_cycle: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            grid_rows: 16,
            grid_cols: 16,
            n_users: 256,
            n_slots: 100,
            n_sic: 4,
            n_rep: 100,
            moderate: false,
            permute_slots: false,
            seed: 1,
            tie_break: TieBreak::ByIndex,
            reset_per_cycle: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub track: TrackConfig,
    pub gain: GainPattern,
    pub link: LinkConfig,
    pub sim: SimConfig,
}

impl Scenario {
    /// Parses and validates a TOML scenario.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.track;
        if !t.center_lat.is_finite() || t.center_lat.abs() > 90.0 {
            return Err(Error::config("track.center_lat", "must lie in [-90, 90]"));
        }
        if !t.center_lon.is_finite() {
            return Err(Error::config("track.center_lon", "must be finite"));
        }
        if !(t.delta_lat > 0.0) || t.center_lat.abs() + t.delta_lat > 90.0 {
            return Err(Error::config(
                "track.delta_lat",
                "must be > 0 and keep the region off the poles",
            ));
        }
        self.ground_track()?;
        self.region()?;
        self.gain.validate()?;
        self.link.validate()?;
        let s = &self.sim;
        if s.grid_rows == 0 {
            return Err(Error::config("sim.grid_rows", "must be >= 1"));
        }
        if s.grid_cols == 0 {
            return Err(Error::config("sim.grid_cols", "must be >= 1"));
        }
        if s.grid_rows * s.grid_cols != s.n_users {
            return Err(Error::config(
                "sim.n_users",
                format!(
                    "must equal grid_rows * grid_cols = {}",
                    s.grid_rows * s.grid_cols
                ),
            ));
        }
        if s.n_slots == 0 {
            return Err(Error::config("sim.n_slots", "must be >= 1"));
        }
        self.scheduler_config().validate()
    }

    pub fn ground_track(&self) -> Result<GroundTrack> {
        let t = &self.track;
        GroundTrack::new(
            self.center()?,
            t.inclination,
            t.angular_speed,
            t.altitude,
            2.0 * t.delta_lat,
        )
    }

    pub fn region(&self) -> Result<CoverageRegion> {
        CoverageRegion::along_track(self.center()?, self.track.delta_lat, self.track.inclination)
    }

    fn center(&self) -> Result<GeoPoint> {
        GeoPoint::new(self.track.center_lat, self.track.center_lon)
            .map_err(|e| Error::config("track.center_lat", e.to_string()))
    }

    /// User positions, row-major over the grid.
    pub fn users(&self) -> Result<Vec<GeoPoint>> {
        Ok(self.region()?.grid(self.sim.grid_rows, self.sim.grid_cols))
    }

    /// The same scenario with users replaced by the nine probe locations.
    pub fn with_probe_nine(&self) -> Scenario {
        let mut s = *self;
        s.sim.grid_rows = 3;
        s.sim.grid_cols = 3;
        s.sim.n_users = 9;
        s
    }

    pub fn scheduler_config(&self) -> SchedulerConfig {
        let s = &self.sim;
        SchedulerConfig {
            n_sic: s.n_sic,
            moderate: s.moderate,
            permute_slots: s.permute_slots,
            n_rep: s.n_rep,
            seed: s.seed,
            tie_break: s.tie_break,
            reset_per_cycle: s.reset_per_cycle,
        }
    }
}
