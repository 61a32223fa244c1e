//! Counter-based seed derivation.
//!
//! A stream is a ChaCha8 generator whose 256-bit key is derived from
//! `(master_seed, purpose, drop)` by SplitMix64 finalization, and whose
//! 64-bit stream id is the entity index (user, link, candidate...). Two
//! different tuples therefore never share a keystream, and no generator is
//! ever shared between entities.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a random stream is used for. The discriminant is part of the key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    /// Candidate user positions and indoor state.
    UserDrop = 1,
    /// LOS state and shadowing for every link of one candidate.
    LargeScale = 2,
    /// Cluster angles, delays, powers and phases of one link.
    Clusters = 3,
    /// Receiver noise on the uplink pilot observation of one user.
    PilotNoise = 4,
}

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn key(master: u64, purpose: Purpose, drop: u64) -> [u8; 32] {
    let mut h = splitmix64(master ^ 0x5eed_0000_0000_0000);
    h = splitmix64(h ^ purpose as u64);
    h = splitmix64(h ^ drop);
    let mut out = [0u8; 32];
    for chunk in out.chunks_exact_mut(8) {
        h = splitmix64(h);
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    out
}

/// Independent generator for `(master, purpose, drop, entity)`.
pub fn stream(master: u64, purpose: Purpose, drop: u64, entity: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(key(master, purpose, drop));
    rng.set_stream(entity);
    rng
}

/// Drop key used when a drop has to be re-sampled. Attempt 0 is the drop itself.
pub fn drop_attempt_key(drop: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        drop
    } else {
        splitmix64(drop ^ ((attempt as u64) << 40) ^ 0xa77e_0000_0000_0000)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| 0).scan(stream(7, Purpose::Clusters, 3, 11), |r, _| Some(r.next_u64())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(stream(7, Purpose::Clusters, 3, 11), |r, _| Some(r.next_u64())).collect();
        assert_eq!(a, b);
        let mut other = [
            stream(7, Purpose::Clusters, 3, 12),
            stream(7, Purpose::Clusters, 4, 11),
            stream(7, Purpose::PilotNoise, 3, 11),
            stream(8, Purpose::Clusters, 3, 11),
        ];
        for r in other.iter_mut() {
            assert_ne!(r.next_u64(), a[0]);
        }
    }

    #[test]
    fn attempt_zero_is_identity() {
        assert_eq!(drop_attempt_key(42, 0), 42);
        assert_ne!(drop_attempt_key(42, 1), 42);
        assert_ne!(drop_attempt_key(42, 1), drop_attempt_key(42, 2));
    }
}
