//! Deterministic random number generation.
//!
//! Everything random in this workspace — instance generation, variable
//! sampling, clone seeds — flows through [`SplitMix64`], so a 64-bit seed
//! pins results bit-for-bit across platforms and languages. SplitMix64 is
//! the counter-based generator of Steele, Lea and Vigna; the exact update is
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! Reference outputs for seed 0 (also frozen in the tests below):
//! `0xE220A8397B1DCDAF`, `0x6E789E6AA1B965F4`, `0x06C45D188009454F`.
//!
//! Derived draws are defined as:
//! - `next_f64`: `(next_u64() >> 11) * 2^-53`, uniform on `[0, 1)`;
//! - `next_below(k)`: `next_u64() % k` (the modulo bias of at most `k/2^64`
//!   is accepted in exchange for a trivially portable definition);
//! - `uniform(lo, hi)`: `lo + next_f64() * (hi - lo)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// SplitMix64 generator. `Clone` gives cheap stream snapshots.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `0..bound`. `bound` must be positive.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }
}

/// Derives an independent stream seed from a master seed.
///
/// Defined as `master XOR first_output(SplitMix64(stream))`. The first
/// output is a bijection of the stream index, so distinct streams always
/// produce distinct seeds for a fixed master.
pub fn mix_seed(master: u64, stream: u64) -> u64 {
    master ^ SplitMix64::new(stream).next_u64()
}

/// Samples `s` indices from `0..n` uniformly without replacement, returned
/// sorted ascending. Consumes exactly `s` draws regardless of `n`.
///
/// This is a partial Fisher-Yates shuffle: draw `t` in `i..n`, swap positions
/// `i` and `t`, take position `i`. A sparse map replaces the backing array
/// when `s` is much smaller than `n`.
pub fn sample_without_replacement(n: usize, s: usize, rng: &mut SplitMix64) -> Vec<usize> {
    assert!(s <= n, "cannot sample {s} of {n} without replacement");
    let mut picked = Vec::with_capacity(s);
    if s * 16 >= n {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..s {
            let t = i + rng.next_below((n - i) as u64) as usize;
            pool.swap(i, t);
            picked.push(pool[i]);
        }
    } else {
        // Sparse Fisher-Yates: only displaced positions are materialized.
        let mut moved: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..s {
            let t = i + rng.next_below((n - i) as u64) as usize;
            let val_t = *moved.get(&t).unwrap_or(&t);
            let val_i = *moved.get(&i).unwrap_or(&i);
            moved.insert(t, val_i);
            picked.push(val_t);
        }
    }
    picked.sort_unstable();
    picked
}

/// In-place Fisher-Yates shuffle: for `i` from `len-1` down to `1`, swap
/// `a[i]` with `a[next_below(i+1)]`.
pub fn shuffle<T>(a: &mut [T], rng: &mut SplitMix64) {
    for i in (1..a.len()).rev() {
        let j = rng.next_below((i + 1) as u64) as usize;
        a.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_outputs_seed_zero() {
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
        assert_eq!(rng.next_u64(), 0xF88B_B8A8_724C_81EC);
    }

    #[test]
    fn reference_outputs_other_seeds() {
        let mut rng = SplitMix64::new(1234567);
        assert_eq!(rng.next_u64(), 6457827717110365317);
        assert_eq!(rng.next_u64(), 3203168211198807973);
        assert_eq!(rng.next_u64(), 9817491932198370423);

        let mut rng = SplitMix64::new(42);
        assert_eq!(rng.next_f64(), 0.7415648787718233);
        assert_eq!(rng.next_f64(), 0.1599103928769201);
        assert_eq!(rng.next_f64(), 0.27860113025513866);
    }

    #[test]
    fn mix_seed_distinct_streams() {
        let master = 0xDEAD_BEEF;
        let seeds: Vec<u64> = (0..64).map(|i| mix_seed(master, i)).collect();
        for i in 0..seeds.len() {
            for j in 0..i {
                assert_ne!(seeds[i], seeds[j]);
            }
        }
    }

    #[test]
    fn sampling_basic_contract() {
        let mut rng = SplitMix64::new(7);
        let s = sample_without_replacement(100, 15, &mut rng);
        assert_eq!(s.len(), 15);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.iter().all(|&j| j < 100));

        let mut rng = SplitMix64::new(7);
        let full = sample_without_replacement(10, 10, &mut rng);
        assert_eq!(full, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn sampling_dense_and_sparse_paths_agree() {
        // The sparse path engages when s*16 < n; both must consume the same
        // draws and return the same set so the cutover is invisible.
        for seed in 0..20 {
            let mut a = SplitMix64::new(seed);
            let mut b = SplitMix64::new(seed);
            let n = 1000;
            let s = 20; // sparse
            let sparse = sample_without_replacement(n, s, &mut a);
            // Dense reference computed with an explicit pool.
            let mut pool: Vec<usize> = (0..n).collect();
            let mut dense = Vec::new();
            for i in 0..s {
                let t = i + b.next_below((n - i) as u64) as usize;
                pool.swap(i, t);
                dense.push(pool[i]);
            }
            dense.sort_unstable();
            assert_eq!(sparse, dense, "seed {seed}");
        }
    }

    #[test]
    fn sampling_is_uniform() {
        // Every index should be hit with frequency s/n = 0.01 up to noise.
        let n = 10_000;
        let s = 100;
        let trials = 2_000;
        let mut counts = vec![0u32; n];
        let mut rng = SplitMix64::new(99);
        for _ in 0..trials {
            for j in sample_without_replacement(n, s, &mut rng) {
                counts[j] += 1;
            }
        }
        let expected = trials as f64 * s as f64 / n as f64; // 20
        let (mut lo, mut hi) = (f64::MAX, f64::MIN);
        for &c in &counts {
            lo = lo.min(c as f64);
            hi = hi.max(c as f64);
        }
        // ~Binomial(2000, 0.01): mean 20, sd ~4.45; 6 sigma on both tails.
        assert!(lo > expected - 6.0 * 4.45, "min count {lo}");
        assert!(hi < expected + 6.0 * 4.45, "max count {hi}");
    }
}
