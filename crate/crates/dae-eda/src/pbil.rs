//! Population-based incremental learning: the univariate baseline model.
//!
//! One activation probability per bit, nudged toward the best individuals
//! each generation. No pairwise structure can be represented, which is
//! exactly why it makes a useful contrast to the autoencoder model.

use rand::Rng;

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::rng::RngState;

/// Independent Bernoulli parameters, one per bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

impl ProbabilityVector {
    /// The uninformed start: every probability 0.5.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "probability vector needs at least one bit".into(),
            ));
        }
        Ok(Self { p: vec![0.5; n] })
    }

    /// Explicit probabilities, each validated into `[0, 1]`.
    pub fn from_probabilities(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument(
                "probability vector needs at least one bit".into(),
            ));
        }
        for &v in &p {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("probability {v} outside [0, 1]")));
            }
        }
        Ok(Self { p })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    /// Convex step toward the bitwise mean of the best individuals:
    /// `p <- p + rate * (mean - p)`, clamped to `[0, 1]` against rounding.
    /// The learning rate must lie strictly inside `(0, 1)`.
    pub fn update(&mut self, best: &[Bitstring], rate: f64) -> Result<()> {
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be in (0, 1), got {rate}"
            )));
        }
        if best.is_empty() {
            return Err(Error::InvalidArgument(
                "update needs at least one individual".into(),
            ));
        }
        for b in best {
            if b.len() != self.p.len() {
                return Err(Error::LengthMismatch {
                    expected: self.p.len(),
                    got: b.len(),
                });
            }
        }
        let scale = 1.0 / best.len() as f64;
        for (i, p) in self.p.iter_mut().enumerate() {
            let mean = best.iter().filter(|b| b.bit(i)).count() as f64 * scale;
            *p = (*p + rate * (mean - *p)).clamp(0.0, 1.0);
        }
        Ok(())
    }

    /// Draw a bitstring with independent bits, bit i ~ Bernoulli(p_i).
    pub fn sample(&self, rng: &mut RngState) -> Bitstring {
        let bits = self.p.iter().map(|&p| rng.gen_bool(p)).collect();
        Bitstring::new(bits).expect("probability vector is non-empty")
    }
}
