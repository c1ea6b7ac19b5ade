//! Benchmark problems: concatenated deceptive traps, NK landscapes, and
//! hierarchical if-and-only-if (HIFF).

mod hiff;
mod nk;
mod trap;

pub use hiff::Hiff;
pub use nk::{NkLandscape, NkSolution};
pub use trap::ConcatenatedTraps;

use crate::bits::Bitstring;
use crate::error::Result;

/// A pseudo-boolean maximization problem with a known global optimum.
pub trait Problem: Send + Sync {
    /// Short identifier used in CSV output and reports, e.g. `"trap"`.
    fn name(&self) -> &str;

    /// Genome length in bits.
    fn size(&self) -> usize;

    /// Fitness of `x`. Errors if `x.len() != self.size()`.
    fn evaluate(&self, x: &Bitstring) -> Result<f64>;

    /// Fitness value of the global optimum, used to detect success.
    fn optimum(&self) -> f64;

    /// Whether `x` attains the global optimum. The default compares
    /// fitness against [`Problem::optimum`] exactly, which is correct for
    /// problems whose optimum value is reproduced bit-for-bit by
    /// [`Problem::evaluate`].
    fn is_optimal(&self, x: &Bitstring) -> Result<bool> {
        Ok(self.evaluate(x)? >= self.optimum())
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::error::Error;

    /// Counts ones; optimum is the all-ones string. Handy for engine tests
    /// because any reasonable optimizer solves it quickly.
    pub struct OneMax {
        pub n: usize,
    }

    impl Problem for OneMax {
        fn name(&self) -> &str {
            "onemax"
        }

        fn size(&self) -> usize {
            self.n
        }

        fn evaluate(&self, x: &Bitstring) -> Result<f64> {
            if x.len() != self.n {
                return Err(Error::LengthMismatch {
                    expected: self.n,
                    got: x.len(),
                });
            }
            Ok(x.count_ones() as f64)
        }

        fn optimum(&self) -> f64 {
            self.n as f64
        }
    }
}
