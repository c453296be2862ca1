//! Counter-based seed derivation.
//!
//! Every random stream in the crate comes from one root seed. A stream is
//! identified by `(root, stream, index)` and its seed is the SplitMix64
//! finalizer applied to a mix of the three, so episode `i` of a campaign
//! draws the same numbers no matter which thread runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags used across the crate.
pub mod stream {
    pub const CONTRACTION: u64 = 1;
    pub const BASIN: u64 = 2;
    pub const MARGIN: u64 = 3;
    pub const CAMPAIGN: u64 = 4;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(root ^ splitmix64(stream)) ^ index)
}

pub fn rng_for(root: u64, stream: u64, index: u64) -> Rng {
    Rng::seed_from_u64(derive_seed(root, stream, index))
}
