//! Platform-independent 64-bit hashing.
//!
//! `std`'s `DefaultHasher` makes no stability promise across releases, so WL
//! labels and cache keys go through this FNV-1a variant with an explicit salt.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Salt mixed into every WL label hash. Recorded in embedding sidecars.
pub const WL_SALT: u64 = 0x5045_5246_414c_574c;

#[derive(Debug, Clone)]
pub struct StableHasher {
    state: u64,
}

impl StableHasher {
    pub fn with_salt(salt: u64) -> Self {
        let mut h = Self { state: FNV_OFFSET };
        h.write_u64(salt);
        h
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.state ^= u64::from(*b);
            self.state = self.state.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write_bytes(&v.to_le_bytes());
    }

    pub fn write_str(&mut self, s: &str) {
        self.write_u64(s.len() as u64);
        self.write_bytes(s.as_bytes());
    }

    /// Final avalanche (splitmix64 finalizer) so nearby inputs spread out.
    pub fn finish(&self) -> u64 {
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}
