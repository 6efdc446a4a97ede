//! Seeded sampling generator (splitmix64).
//!
//! The report suite must produce byte-identical output for a fixed seed on
//! every platform, so the generator is pinned to the splitmix64 recurrence
//! and covered by frozen test vectors below.

/// splitmix64 stream.
#[derive(Debug, Clone)]
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

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn sample_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_vectors() {
        // Frozen outputs of the splitmix64 recurrence; seed 0 matches the
        // published reference sequence.
        let expect: [(u64, [u64; 4]); 3] = [
            (
                0,
                [
                    0xE220_A839_7B1D_CDAF,
                    0x6E78_9E6A_A1B9_65F4,
                    0x06C4_5D18_8009_454F,
                    0xF88B_B8A8_724C_81EC,
                ],
            ),
            (
                42,
                [
                    0xBDD7_3226_2FEB_6E95,
                    0x28EF_E333_B266_F103,
                    0x4752_6757_130F_9F52,
                    0x581C_E1FF_0E4A_E394,
                ],
            ),
            (
                123_456_789,
                [
                    0x223C_74D9_3DEB_7679,
                    0x7A91_DD18_3971_EE2E,
                    0x310E_0831_409A_FDE5,
                    0x851E_0616_16A5_BEE5,
                ],
            ),
        ];
        for (seed, vals) in expect {
            let mut g = SplitMix64::new(seed);
            for v in vals {
                assert_eq!(g.next_u64(), v, "seed {seed}");
            }
        }
    }

    #[test]
    fn f64_range_and_first_values() {
        let mut g = SplitMix64::new(42);
        let first = [g.next_f64(), g.next_f64(), g.next_f64()];
        assert!((first[0] - 0.7415648787718233).abs() < 1e-16);
        assert!((first[1] - 0.1599103928769201).abs() < 1e-16);
        assert!((first[2] - 0.27860113025513866).abs() < 1e-16);
        let mut g = SplitMix64::new(7);
        for _ in 0..1000 {
            let x = g.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn sample_in_interval() {
        let mut g = SplitMix64::new(9);
        for _ in 0..200 {
            let x = g.sample_in(3.0, 10.0);
            assert!((3.0..10.0).contains(&x));
        }
    }
}
