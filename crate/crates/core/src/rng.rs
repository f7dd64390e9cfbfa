//! Purpose-keyed random substreams.
//!
//! Every consumer of randomness (traffic, shadowing, placement) derives its
//! own generator from the master seed and a label, so changing how one
//! consumer draws never perturbs another. Two placement strategies run with
//! the same seed therefore see the same traffic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const TRAFFIC: &str = "traffic";
pub const SHADOWING: &str = "shadowing";
pub const PLACEMENT: &str = "placement";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed for the `label` substream of `master`.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    splitmix64(splitmix64(master) ^ fnv1a(label))
}

/// Generator for `label`, further split by `index` (e.g. one stream per device).
pub fn substream(master: u64, label: &str, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, label));
    rng.set_stream(index);
    rng
}
