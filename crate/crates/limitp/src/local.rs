//! Exact per-prime data for a tuple configuration.
//!
//! For a prime p and configuration with pairs (alpha_i, r_i), the residues
//! n ≡ -alpha_i (mod p^{r_i}) are the "forbidden" classes: hitting one of
//! them kills the i-th factor of f. Everything in this module counts or
//! weighs those classes inside one period p^{r_max}, exactly, in rational
//! arithmetic; floating point only appears later in the Euler products.
//!
//! Counting never enumerates the p^{r_max} residues. Each nonempty subset of
//! forbidden classes merges (all moduli are powers of the same p) into a
//! single class or is incompatible, so inclusion–exclusion over the 2^s
//! subsets gives every count in O(2^s) — and pair sums in O(4^s). A direct
//! enumeration survives in the test suite as the oracle for small p^{r_max}.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::checked_pow_u128;
use crate::error::{Error, Result};
use crate::tuple::TupleConfig;

/// Counts of forbidden residues inside one period p^{r_max}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalCounts {
    /// Number of n <= p^{r_max} hitting at least one forbidden class.
    pub covered: u128,
    /// Same count restricted to n coprime to p.
    pub covered_units: u128,
}

/// All local data for one prime.
#[derive(Clone, Debug)]
pub struct LocalPrimeData {
    pub p: u64,
    pub counts: LocalCounts,
    /// Local density correction (1 - covered/p^{r_max})^{-1};
    /// `None` exactly when the forbidden classes cover everything.
    pub correction: Option<BigRational>,
    /// Pair-correlation values for exponents 0..=r_max (0 beyond r_max).
    pub pair_correlations: Vec<BigRational>,
}

/// Mirsky-criterion admissibility of a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Admissibility {
    /// The tuple set is infinite: no prime's forbidden classes cover all
    /// residues mod p^{r_max}.
    pub nonempty: bool,
    /// The prime constant is positive: no prime's forbidden classes cover
    /// every unit mod p^{r_max}.
    pub positive_constant: bool,
    /// Smallest prime whose classes cover everything, if any.
    pub covering_prime: Option<u64>,
    /// Smallest prime whose classes cover every unit, if any.
    pub unit_covering_prime: Option<u64>,
}

/// One merged congruence class `n ≡ residue (mod p^exp)` per compatible
/// subset of forbidden classes, with the inclusion–exclusion sign.
struct SubsetClass {
    sign: i32,
    residue: u128,
    exp: u32,
}

/// Merged classes for every compatible nonempty subset of the forbidden
/// classes. Powers of the same prime merge in O(1): the deeper congruence
/// wins if it agrees with the shallower one.
fn subset_classes(p: u64, config: &TupleConfig) -> Result<Vec<SubsetClass>> {
    let s = config.s();
    let r_max = config.r_max();
    let mut pw = vec![1u128; r_max as usize + 1];
    for j in 1..=r_max as usize {
        pw[j] = checked_pow_u128(p, j as u32, "p^j in local data")?;
    }
    // per-pair class: -alpha mod p^r
    let pair_class: Vec<(u128, u32)> = config
        .pairs()
        .iter()
        .map(|&(alpha, r)| {
            let m = pw[r as usize];
            let a = (alpha as u128) % m;
            ((m - a) % m, r)
        })
        .collect();

    let mut merged: Vec<Option<(u128, u32)>> = vec![None; 1 << s];
    merged[0] = Some((0, 0));
    let mut out = Vec::with_capacity((1 << s) - 1);
    for mask in 1usize..(1 << s) {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let Some((c0, e0)) = merged[rest] else {
            continue;
        };
        let (c1, e1) = pair_class[i];
        let (lo, hi) = if e0 <= e1 {
            ((c0, e0), (c1, e1))
        } else {
            ((c1, e1), (c0, e0))
        };
        if hi.0 % pw[lo.1 as usize] != lo.0 {
            continue; // incompatible subset
        }
        merged[mask] = Some(hi);
        out.push(SubsetClass {
            sign: if mask.count_ones() % 2 == 1 { 1 } else { -1 },
            residue: hi.0,
            exp: hi.1,
        });
    }
    Ok(out)
}

/// Covered and covered-unit counts by inclusion–exclusion over the forbidden
/// classes.
pub fn covered_counts(p: u64, config: &TupleConfig) -> Result<LocalCounts> {
    let r_max = config.r_max();
    let classes = subset_classes(p, config)?;
    let overflow = || Error::Overflow {
        what: "inclusion-exclusion count",
        prime: Some(p),
    };
    let mut covered = 0i128;
    let mut in_zero_class = 0i128; // covered n with p | n
    for c in &classes {
        let block = checked_pow_u128(p, r_max - c.exp, "p^(r_max - e)")? as i128;
        let term = block.checked_mul(c.sign as i128).ok_or_else(overflow)?;
        covered = covered.checked_add(term).ok_or_else(overflow)?;
        // exp >= 1 always, so "p | n" just asks whether the class residue is
        // divisible by p.
        if c.residue % p as u128 == 0 {
            in_zero_class = in_zero_class.checked_add(term).ok_or_else(overflow)?;
        }
    }
    debug_assert!(covered >= 0 && in_zero_class >= 0 && in_zero_class <= covered);
    Ok(LocalCounts {
        covered: covered as u128,
        covered_units: (covered - in_zero_class) as u128,
    })
}

/// Survivor density of a residue class: with P = p^{r_max},
///
/// ```text
/// p^{l - r_max} * #{ n <= P : n ≡ a (p^l), n in no forbidden class }
/// ```
///
/// as an exact rational. At l = 0 this is 1 - covered/P, which is the value
/// the factor takes at primes not dividing the modulus; we adopt the same
/// counting form as the definition for every l <= r_max.
pub fn prime_class_factor(p: u64, l: u32, a: i128, config: &TupleConfig) -> Result<BigRational> {
    let r_max = config.r_max();
    if l > r_max {
        return Err(Error::InvalidInput(format!(
            "class factor exponent l = {l} exceeds r_max = {r_max}"
        )));
    }
    let pl = checked_pow_u128(p, l, "p^l")?;
    let a = a.rem_euclid(pl as i128) as u128;
    let classes = subset_classes(p, config)?;
    let overflow = || Error::Overflow {
        what: "class factor count",
        prime: Some(p),
    };

    // survivors in the class = p^{r_max - l} - (covered numbers in the class)
    let mut count = checked_pow_u128(p, r_max - l, "p^(r_max - l)")? as i128;
    for c in &classes {
        let min_e = l.min(c.exp);
        let pmin = checked_pow_u128(p, min_e, "p^min")?;
        if a % pmin != c.residue % pmin {
            continue;
        }
        let max_e = l.max(c.exp);
        let block = checked_pow_u128(p, r_max - max_e, "p^(r_max - max)")? as i128;
        count = count
            .checked_sub(block.checked_mul(c.sign as i128).ok_or_else(overflow)?)
            .ok_or_else(overflow)?;
    }
    debug_assert!(count >= 0);
    let denom = checked_pow_u128(p, r_max - l, "p^(r_max - l)")?;
    Ok(BigRational::new(BigInt::from(count), BigInt::from(denom)))
}

/// Number of ordered pairs (n, m) of covered residues in one period with
/// n ≡ m (mod p^u), via inclusion–exclusion on both coordinates.
fn covered_pair_count(p: u64, u: u32, r_max: u32, classes: &[SubsetClass]) -> Result<BigInt> {
    let mut total = BigInt::zero();
    let pb = BigInt::from(p);
    for ci in classes {
        for cj in classes {
            let min_all = u.min(ci.exp).min(cj.exp);
            let pmin = checked_pow_u128(p, min_all, "p^min")?;
            if ci.residue % pmin != cj.residue % pmin {
                continue;
            }
            // n runs in the merged class of (ci, cj-capped-at-u); m fills in
            let e_n = ci.exp.max(u.min(cj.exp));
            let e_m = cj.exp.max(u);
            let exp = 2 * r_max - e_n - e_m;
            let term = pb.pow(exp) * (ci.sign * cj.sign);
            total += term;
        }
    }
    debug_assert!(total >= BigInt::zero());
    Ok(total)
}

/// Pair-correlation value for the prime power p^l: with P = p^{r_max},
///
/// ```text
/// p^{3l - 2 r_max} * sum over covered n, m <= P of
///     ( [n ≡ m (p^l)] - (1/p) [n ≡ m (p^{l-1})] )
/// ```
///
/// Exact rational; 1 at l = 0 and 0 for l > r_max. The complex power-sum
/// form it equals is exercised as a brute-force oracle in the tests.
pub fn pair_correlation_prime_power(p: u64, l: u32, config: &TupleConfig) -> Result<BigRational> {
    let r_max = config.r_max();
    if l == 0 {
        return Ok(BigRational::one());
    }
    if l > r_max {
        return Ok(BigRational::zero());
    }
    let classes = subset_classes(p, config)?;
    let n_l = covered_pair_count(p, l, r_max, &classes)?;
    let n_lm1 = covered_pair_count(p, l - 1, r_max, &classes)?;
    let pb = BigInt::from(p);
    // p^{3l} N_l - p^{3l-1} N_{l-1}, all over p^{2 r_max}
    let numer = pb.pow(3 * l) * n_l - pb.pow(3 * l - 1) * n_lm1;
    let denom = pb.pow(2 * r_max);
    let value = BigRational::new(numer, denom);
    debug_assert!(!value.is_negative());
    Ok(value)
}

/// Assemble every local quantity for one prime.
pub fn local_data(p: u64, config: &TupleConfig) -> Result<LocalPrimeData> {
    let r_max = config.r_max();
    let counts = covered_counts(p, config)?;
    let period = checked_pow_u128(p, r_max, "p^r_max")?;
    let correction = if counts.covered < period {
        Some(BigRational::new(
            BigInt::from(period),
            BigInt::from(period - counts.covered),
        ))
    } else {
        None
    };
    let mut pair_correlations = Vec::with_capacity(r_max as usize + 1);
    for l in 0..=r_max {
        pair_correlations.push(pair_correlation_prime_power(p, l, config)?);
    }
    Ok(LocalPrimeData {
        p,
        counts,
        correction,
        pair_correlations,
    })
}

/// Mirsky's criterion, checked on the finitely many primes that can fail.
///
/// The forbidden classes have total density at most sum_i p^{-r_i} <= s p^{-r_1}
/// inside one period, so coverage (covered = p^{r_max}) needs p^{r_1} <= s.
/// For the unit version: covered_units < phi(p^{r_max}) holds as soon as
/// s p^{-r_1} < 1 - 1/p, i.e. whenever p^{r_1-1}(p-1) > s. Both failure
/// conditions force p^{r_1} <= 2s, so exactly the primes with p^{r_1} <= 2s
/// are checked.
pub fn admissibility(config: &TupleConfig) -> Result<Admissibility> {
    let r_min = config.r_min();
    let r_max = config.r_max();
    let bound = 2 * config.s() as u128;
    let mut adm = Admissibility {
        nonempty: true,
        positive_constant: true,
        covering_prime: None,
        unit_covering_prime: None,
    };
    // saturating power: anything that overflows 128 bits certainly exceeds
    // the bound 2s, so no prime needs checking there
    let pow_sat = |p: u64, e: u32| (p as u128).checked_pow(e).unwrap_or(u128::MAX);
    let mut p = 2u64;
    while pow_sat(p, r_min) <= bound {
        let counts = covered_counts(p, config)?;
        let period = checked_pow_u128(p, r_max, "p^r_max")?;
        let phi = period / p as u128 * (p as u128 - 1);
        if counts.covered >= period && adm.covering_prime.is_none() {
            adm.nonempty = false;
            adm.covering_prime = Some(p);
        }
        if counts.covered_units >= phi && adm.unit_covering_prime.is_none() {
            adm.positive_constant = false;
            adm.unit_covering_prime = Some(p);
        }
        p = next_prime_after(p);
    }
    Ok(adm)
}

fn next_prime_after(p: u64) -> u64 {
    let mut q = p + 1;
    loop {
        if (2..).take_while(|d| d * d <= q).all(|d| q % d != 0) {
            return q;
        }
        q += 1;
    }
}
