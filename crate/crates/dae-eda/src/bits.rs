//! Fixed-length binary strings and unit-interval vectors.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RngState;

/// A fixed-length binary solution vector. Always non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidArgument("bitstring must be non-empty".into()));
        }
        Ok(Bitstring(bits))
    }

    /// `n` copies of `bit`.
    pub fn filled(n: usize, bit: bool) -> Result<Self> {
        Bitstring::new(vec![bit; n])
    }

    /// Parse a string of `0`/`1` characters.
    pub fn parse01(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Domain(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Bitstring::new(bits)
    }

    /// Each bit drawn uniformly from {0, 1}.
    pub fn random(n: usize, rng: &mut RngState) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("bitstring length must be positive".into()));
        }
        Ok(Bitstring((0..n).map(|_| rng.gen_bool(0.5)).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: never empty
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Self {
        Bitstring(self.0.iter().map(|&b| !b).collect())
    }

    pub fn hamming(&self, other: &Bitstring) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }

    /// Bits as 0.0/1.0 values, the input representation for the DAE.
    pub fn to_reals(&self) -> RealVector {
        RealVector(self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl serde::Serialize for Bitstring {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A vector with every component in `[0, 1]`, e.g. a model sample or a
/// corrupted input. Validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!(
                    "component {i} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(RealVector(values))
    }

    /// For values already known to lie in the unit interval (sigmoid
    /// outputs). Checked only in debug builds.
    pub(crate) fn from_unit_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        RealVector(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Draw bit `i` from a Bernoulli distribution with `p = x_i`, independently
/// per component. Domain validation happens at [`RealVector::new`].
pub fn binarize(x: &RealVector, rng: &mut RngState) -> Bitstring {
    Bitstring(x.values().iter().map(|&p| rng.gen_bool(p)).collect())
}
