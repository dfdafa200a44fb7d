//! Max-min fair uplink NOMA for a LEO satellite IoT pass.
//!
//! The physics half ([`geometry`], [`linkbudget`]) turns a scenario into a
//! matrix of per-user, per-slot SNRs. The optimization half ([`noma`],
//! [`scheduler`]) computes SIC rates, the max-min decoding order, power
//! moderation and the multi-slot rate-equalization schedule. [`oracle`]
//! holds brute-force checks of the single-slot results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod linkbudget;
pub mod noma;
pub mod oracle;
pub mod rng;
pub mod scenario;
pub mod scheduler;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use linkbudget::{build_snr_matrix, GainPattern, LinkConfig, SnrMatrix};
pub use noma::{RateVector, SnrVector};
pub use scenario::Scenario;
pub use scheduler::{SchedulerConfig, SimResult, SlotDecision, TieBreak};
