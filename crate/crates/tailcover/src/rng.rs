//! Deterministic seed derivation.
//!
//! Every randomized stage derives its own seed from a master seed and a path
//! of indices (stage tag, embedding index, read index, ...). Two runs with the
//! same master seed therefore agree bit for bit regardless of execution order
//! or worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stage tags used as the first element of a derivation path. Arbitrary
/// distinct constants; changing them changes every derived stream.
pub mod stage {
    pub const GENERATE: u64 = 0x47454e;
    pub const COSTS: u64 = 0x434f5354;
    pub const EMBED: u64 = 0x454d42;
    pub const READ: u64 = 0x52454144;
    pub const SWEEP: u64 = 0x535750;
    pub const ATTACK: u64 = 0x41545441;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Mix a master seed with a path of indices into a new 64-bit seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut s = splitmix64(master);
    for &p in path {
        s = splitmix64(s ^ splitmix64(p));
    }
    s
}

/// The crate's RNG: small, fast, seedable, identical on every platform.
pub type Prng = ChaCha8Rng;

pub fn rng_from(master: u64, path: &[u64]) -> Prng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_path_sensitive() {
        let a = derive_seed(42, &[stage::EMBED, 0]);
        let b = derive_seed(42, &[stage::EMBED, 0]);
        let c = derive_seed(42, &[stage::EMBED, 1]);
        let d = derive_seed(43, &[stage::EMBED, 0]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn empty_path_differs_from_master() {
        assert_ne!(derive_seed(7, &[]), 7);
    }
}
