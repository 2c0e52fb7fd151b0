//! Counter-keyed random streams.
//!
//! Every random decision draws from a stream identified by the run seed and a
//! small key (for example iteration, row and direction), so results do not
//! depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A generator determined only by `seed` and up to three key words.
pub fn keyed_rng(seed: u64, key: &[u64]) -> ChaCha8Rng {
    assert!(key.len() <= 3, "at most three key words");
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    for (i, k) in key.iter().enumerate() {
        bytes[8 * (i + 1)..8 * (i + 2)].copy_from_slice(&k.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = keyed_rng(7, &[1, 2, 3]).random();
        let b: f64 = keyed_rng(7, &[1, 2, 3]).random();
        let c: f64 = keyed_rng(7, &[1, 2, 4]).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
