//! Counter-based random labels.
//!
//! Every draw is a pure function of `(seed, stream..., counter)`, so a label
//! for basis index `i` at site `j` is the same no matter which worker asks
//! for it or in which order. The mixer is SplitMix64's finalizer.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A keyed stream of 64-bit words. Cheap to construct; `split` derives
/// child streams that never overlap with the parent's counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix64(seed ^ GOLDEN),
            counter: 0,
        }
    }

    /// Child stream keyed by `id`.
    pub fn split(&self, id: u64) -> Self {
        Self {
            key: mix64(self.key ^ mix64(id.wrapping_add(GOLDEN))),
            counter: 0,
        }
    }

    /// Stream for a path of ids, e.g. `[site, index]`.
    pub fn stream(seed: u64, path: &[u64]) -> Self {
        path.iter().fold(Self::new(seed), |rng, &id| rng.split(id))
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)));
        self.counter = self.counter.wrapping_add(1);
        out
    }

    /// Uniform on `[0, 1)` with 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `0..bound` by rejection (no modulo bias).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        if bound.is_power_of_two() {
            return self.next_u64() & (bound - 1);
        }
        let zone = u64::MAX - (u64::MAX % bound) - 1;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % bound;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_path_same_words() {
        let mut a = CounterRng::stream(42, &[1, 7]);
        let mut b = CounterRng::stream(42, &[1, 7]);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_differ() {
        let a = CounterRng::stream(42, &[1, 7]).next_u64();
        let b = CounterRng::stream(42, &[7, 1]).next_u64();
        let c = CounterRng::stream(43, &[1, 7]).next_u64();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = CounterRng::new(5);
        for bound in [1u64, 2, 3, 7, 295, 1 << 40] {
            for _ in 0..1000 {
                assert!(rng.below(bound) < bound);
            }
        }
    }

    #[test]
    fn unit_interval() {
        let mut rng = CounterRng::new(9);
        let mean = (0..100_000).map(|_| rng.next_f64()).sum::<f64>() / 100_000.0;
        assert!((mean - 0.5).abs() < 0.01);
    }
}
