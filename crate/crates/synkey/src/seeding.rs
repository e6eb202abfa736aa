//! Counter-based seed derivation.
//!
//! Monte Carlo drivers give every block its own RNG seeded from
//! `block_seed(master, index)`, so results do not depend on execution
//! order or thread count. The mixer is SplitMix64, fixed here as part of
//! the reproducibility contract.

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for Monte Carlo block `index` under `master`.
pub fn block_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(splitmix64(index)))
}

/// Seed for a terminal's private fallback randomness. Terminals never
/// share this stream, so fallback keys at different terminals are
/// independent.
pub fn terminal_seed(master: u64, terminal: usize) -> u64 {
    splitmix64(master ^ splitmix64(0x7465_726d_0000_0000 | terminal as u64))
}
