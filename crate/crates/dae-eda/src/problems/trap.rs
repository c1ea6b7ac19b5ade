//! Concatenated deceptive trap functions.
//!
//! The genome is split into `blocks` disjoint groups of `k` bits. A group
//! with all `k` bits set contributes `k`; otherwise it contributes
//! `k - ones - 1`, so fitness *increases* as bits are cleared until the
//! deceptive jump at the all-ones block. Hill climbers are pulled toward
//! all-zeros while the global optimum is the all-ones string.

use rand::seq::SliceRandom;

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::rng::{RngState, Stream};

/// Sum of `blocks` deceptive traps of `k` bits each.
#[derive(Debug, Clone)]
pub struct ConcatenatedTraps {
    k: usize,
    blocks: usize,
    /// `layout[b * k + j]` is the genome position of bit `j` of block `b`.
    /// Identity for contiguous blocks.
    layout: Vec<usize>,
}

impl ConcatenatedTraps {
    /// Contiguous blocks: block `b` covers positions `b*k .. (b+1)*k`.
    pub fn new(k: usize, blocks: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "trap size must be at least 2, got {k}"
            )));
        }
        if blocks == 0 {
            return Err(Error::InvalidArgument(
                "need at least one trap block".into(),
            ));
        }
        let layout = (0..k * blocks).collect();
        Ok(Self { k, blocks, layout })
    }

    /// Blocks scattered across the genome by a seeded permutation of
    /// positions. The fitness landscape is the same up to relabeling, but
    /// linkage is no longer visible in the bit order.
    pub fn scattered(k: usize, blocks: usize, seed: u64) -> Result<Self> {
        let mut trap = Self::new(k, blocks)?;
        let mut rng = RngState::for_stream(seed, Stream::BlockPermutation, &[]);
        trap.layout.shuffle(&mut rng);
        Ok(trap)
    }

    /// Bits per trap block.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of trap blocks.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    fn block_contribution(&self, ones: usize) -> f64 {
        if ones == self.k {
            self.k as f64
        } else {
            (self.k - ones - 1) as f64
        }
    }
}

impl Problem for ConcatenatedTraps {
    fn name(&self) -> &str {
        "trap"
    }

    fn size(&self) -> usize {
        self.k * self.blocks
    }

    fn evaluate(&self, x: &Bitstring) -> Result<f64> {
        if x.len() != self.size() {
            return Err(Error::LengthMismatch {
                expected: self.size(),
                got: x.len(),
            });
        }
        let mut total = 0.0;
        for block in self.layout.chunks(self.k) {
            let ones = block.iter().filter(|&&pos| x.bit(pos)).count();
            total += self.block_contribution(ones);
        }
        Ok(total)
    }

    fn optimum(&self) -> f64 {
        // All-ones: every block contributes k.
        (self.k * self.blocks) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Bitstring {
        Bitstring::parse01(s).unwrap()
    }

    #[test]
    fn single_block_values() {
        let trap = ConcatenatedTraps::new(4, 1).unwrap();
        assert_eq!(trap.evaluate(&bits("1111")).unwrap(), 4.0);
        assert_eq!(trap.evaluate(&bits("0000")).unwrap(), 3.0);
        assert_eq!(trap.evaluate(&bits("0111")).unwrap(), 0.0);
    }

    #[test]
    fn blocks_sum_independently() {
        let trap = ConcatenatedTraps::new(4, 2).unwrap();
        // First block optimal (4), second all-zeros (3).
        assert_eq!(trap.evaluate(&bits("11110000")).unwrap(), 7.0);
    }

    #[test]
    fn exhaustive_max_is_unique_all_ones() {
        // Over all 2^8 strings for k=4, l=2: maximum 8 attained only by
        // the all-ones string, and the deceptive attractor scores 6.
        let trap = ConcatenatedTraps::new(4, 2).unwrap();
        let mut max = f64::NEG_INFINITY;
        let mut argmax = Vec::new();
        for v in 0u32..256 {
            let x = Bitstring::new((0..8).map(|i| (v >> (7 - i)) & 1 == 1).collect()).unwrap();
            let f = trap.evaluate(&x).unwrap();
            if f > max {
                max = f;
                argmax = vec![x.to_string()];
            } else if f == max {
                argmax.push(x.to_string());
            }
        }
        assert_eq!(max, 8.0);
        assert_eq!(argmax, vec!["11111111".to_string()]);
        assert_eq!(trap.evaluate(&bits("00000000")).unwrap(), 6.0);
        assert_eq!(trap.optimum(), 8.0);
    }

    #[test]
    fn scattering_permutes_the_landscape() {
        // A position permutation relabels genomes, so the multiset of
        // fitness values over the whole cube is unchanged.
        let contiguous = ConcatenatedTraps::new(4, 2).unwrap();
        let scattered = ConcatenatedTraps::scattered(4, 2, 99).unwrap();
        let histogram = |t: &ConcatenatedTraps| {
            let mut counts = std::collections::BTreeMap::new();
            for v in 0u32..256 {
                let x =
                    Bitstring::new((0..8).map(|i| (v >> (7 - i)) & 1 == 1).collect()).unwrap();
                *counts.entry(t.evaluate(&x).unwrap() as i64).or_insert(0u32) += 1;
            }
            counts
        };
        assert_eq!(histogram(&contiguous), histogram(&scattered));
        assert_eq!(
            scattered.evaluate(&bits("11111111")).unwrap(),
            scattered.optimum()
        );
    }

    #[test]
    fn scattering_is_deterministic_in_seed() {
        let a = ConcatenatedTraps::scattered(5, 3, 7).unwrap();
        let b = ConcatenatedTraps::scattered(5, 3, 7).unwrap();
        assert_eq!(a.layout, b.layout);
        let c = ConcatenatedTraps::scattered(5, 3, 8).unwrap();
        assert_ne!(a.layout, c.layout);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ConcatenatedTraps::new(1, 3).is_err());
        assert!(ConcatenatedTraps::new(4, 0).is_err());
        let trap = ConcatenatedTraps::new(4, 2).unwrap();
        assert!(matches!(
            trap.evaluate(&bits("1111")),
            Err(Error::LengthMismatch { expected: 8, got: 4 })
        ));
    }
}
