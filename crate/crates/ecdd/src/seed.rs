//! Deterministic seed derivation for parallel Monte Carlo work.
//!
//! Replications run independently (often on a rayon pool), so each one gets
//! its own RNG seeded from `(root_seed, index)`. The mix is a fixed splitmix64
//! finalizer chain, which keeps results identical regardless of thread count
//! or execution order.

/// splitmix64 finalizer: decorrelates consecutive inputs.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derive the RNG seed for replication `index` of a run rooted at `seed`.
pub fn derive(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed).wrapping_add(splitmix64(index ^ 0xa076_1d64_78bd_642f)))
}
