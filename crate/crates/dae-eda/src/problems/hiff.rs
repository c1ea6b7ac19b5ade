//! Hierarchical if-and-only-if (HIFF).
//!
//! The genome of `n = 2^levels` bits is folded level by level: each pair of
//! equal symbols collapses to that symbol and earns `2^level`; an unequal
//! pair collapses to a null symbol that poisons every enclosing block.
//! All-zeros and all-ones are the only strings that score on every level,
//! making them the two global optima.

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::problems::Problem;

/// HIFF instance over `2^levels` bits.
#[derive(Debug, Clone, Copy)]
pub struct Hiff {
    levels: u32,
}

impl Hiff {
    pub fn new(levels: u32) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidArgument(
                "HIFF needs at least one level (two bits)".into(),
            ));
        }
        if levels > 30 {
            return Err(Error::TooLarge(format!(
                "2^{levels} bits exceeds supported genome sizes"
            )));
        }
        Ok(Self { levels })
    }

    /// Number of pairing levels; the genome has `2^levels` bits.
    pub fn levels(&self) -> u32 {
        self.levels
    }
}

impl Problem for Hiff {
    fn name(&self) -> &str {
        "hiff"
    }

    fn size(&self) -> usize {
        1usize << self.levels
    }

    fn evaluate(&self, x: &Bitstring) -> Result<f64> {
        if x.len() != self.size() {
            return Err(Error::LengthMismatch {
                expected: self.size(),
                got: x.len(),
            });
        }
        // Symbols at the current level; None is the null symbol.
        let mut symbols: Vec<Option<bool>> = x.bits().iter().map(|&b| Some(b)).collect();
        let mut total = 0.0;
        for level in 1..=self.levels {
            let mut next = Vec::with_capacity(symbols.len() / 2);
            for pair in symbols.chunks(2) {
                match (pair[0], pair[1]) {
                    (Some(a), Some(b)) if a == b => {
                        total += f64::from(1u32 << level);
                        next.push(Some(a));
                    }
                    _ => next.push(None),
                }
            }
            symbols = next;
        }
        Ok(total)
    }

    fn optimum(&self) -> f64 {
        // Level l has 2^(levels - l) blocks worth 2^l each, so every level
        // contributes n and the total is n * levels.
        (self.size() as u32 * self.levels) as f64
    }
}
