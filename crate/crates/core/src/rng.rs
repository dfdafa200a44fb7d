//! Seeded, portable random streams.
//!
//! Every consumer of randomness asks for a stream by `(seed, purpose, index)`
//! so that runs are reproducible regardless of evaluation order or thread
//! count.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

/// What a stream is used for. Distinct purposes never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    SlotPermutation = 1,
    TieBreak = 2,
    OracleTrial = 3,
    OracleSwap = 4,
    OracleProbe = 5,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent stream number `index` for `purpose` under `seed`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> StreamRng {
    let key = splitmix64(splitmix64(seed) ^ splitmix64(purpose as u64) ^ index.rotate_left(17));
    StreamRng::seed_from_u64(splitmix64(key ^ index))
}
