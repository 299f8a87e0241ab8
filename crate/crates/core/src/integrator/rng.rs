//! Counter-based random numbers: every value is a hash of its coordinates,
//! so results do not depend on evaluation order or thread count.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn combine(key: u64, v: u64) -> u64 {
    mix(key ^ mix(v.wrapping_add(GOLDEN)))
}

/// Random stream for one (seed, stream, pixel, sample) tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathRng {
    key: u64,
}

impl PathRng {
    pub fn new(seed: u64, stream: u64, pixel: u64, sample: u64) -> Self {
        let key = combine(combine(combine(mix(seed), stream), pixel), sample);
        PathRng { key }
    }

    /// Derived stream, e.g. for one texel of a per-pixel map.
    pub fn fork(&self, index: u64) -> Self {
        PathRng {
            key: combine(self.key, index),
        }
    }

    /// Uniform value in [0, 1) for `(bounce, dim)`.
    #[inline]
    pub fn get(&self, bounce: u32, dim: u32) -> f64 {
        let h = combine(self.key, ((bounce as u64) << 32) | dim as u64);
        (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn get_n<const N: usize>(&self, bounce: u32, first_dim: u32) -> [f64; N] {
        std::array::from_fn(|i| self.get(bounce, first_dim + i as u32))
    }
}
