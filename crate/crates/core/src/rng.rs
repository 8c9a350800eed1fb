//! Seed splitting. One root seed feeds every stochastic subsystem through a
//! fixed label, so adding a new subsystem never shifts the stream of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const TRAFFIC: &str = "traffic";
pub const NOISE: &str = "noise";
pub const CHANNEL: &str = "channel";
pub const INJECTION: &str = "injection";

/// Derives a subsystem seed from the root seed and a label.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    // FNV-1a over the label, then a SplitMix64 finalizer over the mix.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(root ^ splitmix64(h))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn subsystem_rng(root: u64, label: &str) -> SimRng {
    SimRng::seed_from_u64(derive_seed(root, label))
}
