//! Deterministic random streams.
//!
//! Every run draws from ChaCha8 keyed by the master seed: the 32-byte key is
//! the seed in little-endian order followed by 24 zero bytes. Independent
//! purposes (a mechanism run, donor sampling, recipient sampling) use the
//! same key on different ChaCha stream ids, where the stream id is the 64-bit
//! FNV-1a hash of the run label. Streams are counter-based, so runs never
//! share or shift each other's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand::RngCore;

/// 64-bit FNV-1a.
pub fn label_hash(label: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    label
        .bytes()
        .fold(OFFSET, |hash, byte| (hash ^ u64::from(byte)).wrapping_mul(PRIME))
}

/// The stream for `(seed, label)`.
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(label_hash(label));
    rng
}

/// Maps one 64-bit draw onto `0..n` by multiply-high (no modulo, no
/// rejection, so exactly one draw is consumed). `n` must be non-zero.
pub fn bounded_index(rng: &mut impl RngCore, n: usize) -> usize {
    debug_assert!(n > 0);
    ((u128::from(rng.next_u64()) * n as u128) >> 64) as usize
}
