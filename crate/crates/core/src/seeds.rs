//! Deterministic seed derivation.
//!
//! Every randomized subsystem draws its stream from one user-facing base
//! seed through a named tag. Subsystems therefore cannot disturb each
//! other's randomness: adding a draw in one place never shifts the stream
//! anywhere else.

/// splitmix64 finalizer; a well-mixed u64 bijection.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over the tag bytes; keeps distinct subsystem names on distinct
/// streams even under equal base seeds.
fn fnv1a(tag: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Seed for the subsystem named `tag` under the given base seed.
pub fn derive(base: u64, tag: &str) -> u64 {
    mix(base ^ fnv1a(tag))
}
