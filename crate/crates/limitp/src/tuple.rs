//! The tuple configuration defining the product of shifted k-free indicators
//!
//! ```text
//! f(n) = prod_i kfree_{r_i}(n + alpha_i)
//! ```
//!
//! where `kfree_r` is the indicator of the r-free numbers (no prime power p^r
//! divides). All other modules take a [`TupleConfig`] as their description of f.

use std::fmt;

use crate::error::{Error, Result};

/// A validated, normalized tuple of (shift, exponent) pairs.
///
/// Invariants established by [`TupleConfig::new`]:
/// * at least one pair, every exponent `r >= 2`;
/// * pairs sorted by exponent ascending (shifts permuted in lockstep), so
///   `rs()[0] <= ... <= rs()[s-1]`;
/// * no redundant pair: exact duplicates are removed, and a pair
///   `(alpha, r)` is dropped when another pair `(alpha, r')` with `r' <= r`
///   exists (being r'-free implies being r-free, so the weaker constraint
///   never changes f).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleConfig {
    /// (alpha_i, r_i), sorted by (r, alpha).
    pairs: Vec<(u64, u32)>,
}

impl TupleConfig {
    pub fn new<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> Result<Self> {
        let raw: Vec<(u64, u32)> = pairs.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::InvalidInput("tuple needs at least one pair".into()));
        }
        for &(alpha, r) in &raw {
            if r < 2 {
                return Err(Error::InvalidInput(format!(
                    "exponent must be at least 2, got {r} (shift {alpha})"
                )));
            }
        }
        // Keep only the smallest exponent per shift.
        let mut keep: Vec<(u64, u32)> = Vec::with_capacity(raw.len());
        for &(alpha, r) in &raw {
            match keep.iter_mut().find(|(a, _)| *a == alpha) {
                Some(slot) => slot.1 = slot.1.min(r),
                None => keep.push((alpha, r)),
            }
        }
        keep.sort_by_key(|&(alpha, r)| (r, alpha));
        Ok(Self { pairs: keep })
    }

    /// Convenience constructor for a single pair (alpha, r).
    pub fn single(alpha: u64, r: u32) -> Self {
        Self::new([(alpha, r)]).expect("r >= 2 checked by caller")
    }

    /// Number of pairs after normalization.
    pub fn s(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn alphas(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(a, _)| a)
    }

    pub fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        self.pairs.iter().map(|&(_, r)| r)
    }

    /// Largest exponent r_s.
    pub fn r_max(&self) -> u32 {
        self.pairs.last().expect("nonempty").1
    }

    /// Smallest exponent r_1.
    pub fn r_min(&self) -> u32 {
        self.pairs.first().expect("nonempty").1
    }

    pub fn max_alpha(&self) -> u64 {
        self.alphas().max().expect("nonempty")
    }
}

impl fmt::Display for TupleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(alpha, r)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "kfree_{r}(n+{alpha})")?;
        }
        Ok(())
    }
}
