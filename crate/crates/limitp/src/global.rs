//! Global objects assembled from per-prime local data: the natural density of
//! the tuple set, the prime-sum constant, per-residue-class densities,
//! Gaussian sums and the singular series.
//!
//! Float arithmetic enters only here. Products are accumulated in log space
//! with compensated summation, in ascending prime order, so identical inputs
//! reproduce identical bits; every truncated Euler product carries a rigorous
//! bound on the log-scale truncation error.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{checked_pow_u128, factorize, ramanujan_row, sieve_primes};
use crate::error::{Error, Result};
use crate::local::{
    admissibility, covered_counts, pair_correlation_prime_power, prime_class_factor, LocalCounts,
};
use crate::tuple::TupleConfig;

/// A truncated Euler product together with its truncation point and a
/// rigorous bound on |log(full / truncated)|.
#[derive(Clone, Debug)]
pub struct EulerProductValue {
    pub value: f64,
    pub truncation_p: u64,
    pub tail_bound: f64,
    /// Exact per-prime factors, populated by the `_with_factors` builders.
    pub local_factors: Option<BTreeMap<u64, BigRational>>,
}

impl EulerProductValue {
    /// Exact truncated product, available when the factors were collected.
    pub fn exact_truncated(&self) -> Option<BigRational> {
        self.local_factors
            .as_ref()
            .map(|m| m.values().fold(BigRational::one(), |acc, f| acc * f))
    }
}

#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Robust BigRational -> f64: shifts numerator and denominator down together
/// when they are too wide for a direct conversion.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    let bits = r.numer().bits().max(r.denom().bits());
    if bits <= 900 {
        return r.to_f64().unwrap_or(f64::NAN);
    }
    let shift = bits - 900;
    let n = r.numer() >> shift;
    let d = r.denom() >> shift;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy)]
enum ProductKind {
    /// factor = 1 - covered / p^{r_max}
    Density,
    /// factor = 1 - covered_units / phi(p^{r_max})
    Constant,
}

fn factor_parts(kind: ProductKind, p: u64, counts: &LocalCounts, period: u128) -> (u128, u128) {
    match kind {
        ProductKind::Density => (counts.covered, period),
        ProductKind::Constant => (counts.covered_units, period / p as u128 * (p as u128 - 1)),
    }
}

/// Tail bound for the log of the truncated product.
///
/// Each removed quantity satisfies covered <= sum_i p^{r_max - r_i}, so the
/// density factor deviates from 1 by at most s p^{-r_1} <= s/p^2, and the
/// unit factor by at most s p^{r_max-2} / phi(p^{r_max}) = s/(p^{r_1-2}... )
/// <= s/(p(p-1)) <= 2s/p^2. With -log(1-x) <= 2x for x <= 1/2 and
/// sum_{p > P} p^{-2} < sum_{n > P} n^{-2} < 1/P this gives
///
/// ```text
/// density:  |log tail| <= 2s/P      (needs s/p^2 <= 1/2 past P)
/// constant: |log tail| <= 4s/P      (needs 2s/p^2 <= 1/2 past P)
/// ```
///
/// For truncations too small to satisfy the side condition the bound is
/// reported as infinite rather than silently wrong.
fn tail_bound(kind: ProductKind, s: usize, p_limit: u64) -> f64 {
    let s = s as f64;
    let p = p_limit as f64;
    let next = p + 1.0;
    match kind {
        ProductKind::Density => {
            if next * next >= 2.0 * s {
                2.0 * s / p
            } else {
                f64::INFINITY
            }
        }
        ProductKind::Constant => {
            if next * next >= 4.0 * s {
                4.0 * s / p
            } else {
                f64::INFINITY
            }
        }
    }
}

fn euler_product(
    config: &TupleConfig,
    p_limit: u64,
    kind: ProductKind,
    keep_factors: bool,
) -> Result<EulerProductValue> {
    if p_limit < 2 {
        return Err(Error::InvalidInput(format!(
            "truncation must be >= 2, got {p_limit}"
        )));
    }
    let r_max = config.r_max();
    let adm = admissibility(config)?;
    let degenerate = match kind {
        ProductKind::Density => !adm.nonempty,
        ProductKind::Constant => !adm.positive_constant,
    };

    let mut factors = keep_factors.then(BTreeMap::new);
    let mut log_sum = Kahan::default();
    let mut vanished = degenerate;

    if !degenerate || keep_factors {
        let prime_bits = sieve_primes(p_limit)?;
        for p in prime_bits.ones() {
            let p = p as u64;
            let counts = covered_counts(p, config)?;
            let period = checked_pow_u128(p, r_max, "p^r_max")?;
            let (removed, denom) = factor_parts(kind, p, &counts, period);
            if let Some(map) = factors.as_mut() {
                map.insert(
                    p,
                    BigRational::new(BigInt::from(denom - removed), BigInt::from(denom)),
                );
            }
            if removed >= denom {
                vanished = true;
            } else if !vanished {
                log_sum.add((-(removed as f64) / (denom as f64)).ln_1p());
            }
        }
    }

    let (value, tail) = if vanished {
        // a vanishing factor (possibly past the truncation) makes the full
        // product exactly 0, with nothing cut off
        (0.0, 0.0)
    } else {
        (log_sum.sum.exp(), tail_bound(kind, config.s(), p_limit))
    };
    debug_assert!((0.0..=1.0).contains(&value));
    Ok(EulerProductValue {
        value,
        truncation_p: p_limit,
        tail_bound: tail,
        local_factors: factors,
    })
}

/// Natural density of the tuple set as a truncated Euler product over
/// 1 - covered/p^{r_max}. Inadmissible configurations yield an exact 0 with
/// zero tail bound.
pub fn natural_density(config: &TupleConfig, p_limit: u64) -> Result<EulerProductValue> {
    euler_product(config, p_limit, ProductKind::Density, false)
}

pub fn natural_density_with_factors(
    config: &TupleConfig,
    p_limit: u64,
) -> Result<EulerProductValue> {
    euler_product(config, p_limit, ProductKind::Density, true)
}

/// The prime-sum constant as a truncated Euler product over
/// 1 - covered_units/phi(p^{r_max}).
pub fn prime_constant(config: &TupleConfig, p_limit: u64) -> Result<EulerProductValue> {
    euler_product(config, p_limit, ProductKind::Constant, false)
}

pub fn prime_constant_with_factors(
    config: &TupleConfig,
    p_limit: u64,
) -> Result<EulerProductValue> {
    euler_product(config, p_limit, ProductKind::Constant, true)
}

/// Exact rational truncated product for the natural density. Numerators grow
/// quickly; intended for modest truncations and for configurations whose
/// factors collapse.
pub fn natural_density_exact(config: &TupleConfig, p_limit: u64) -> Result<BigRational> {
    Ok(natural_density_with_factors(config, p_limit)?
        .exact_truncated()
        .expect("factors were collected"))
}

pub fn prime_constant_exact(config: &TupleConfig, p_limit: u64) -> Result<BigRational> {
    Ok(prime_constant_with_factors(config, p_limit)?
        .exact_truncated()
        .expect("factors were collected"))
}

/// Density correction for a modulus: the product over p | q of
/// (1 - covered/p^{r_max})^{-1}.
/// Exact rational, >= 1, and depends only on the radical of q. Errors with
/// [`Error::Inadmissible`] when a local factor vanishes.
pub fn density_correction(q: u64, config: &TupleConfig) -> Result<BigRational> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus q must be positive".into()));
    }
    let r_max = config.r_max();
    let mut z = BigRational::one();
    for (p, _) in factorize(q) {
        let counts = covered_counts(p, config)?;
        let period = checked_pow_u128(p, r_max, "p^r_max")?;
        if counts.covered >= period {
            return Err(Error::Inadmissible { p });
        }
        z *= BigRational::new(BigInt::from(period), BigInt::from(period - counts.covered));
    }
    Ok(z)
}

/// Per-class factor at (q, a): the product over p | q of the survivor density
/// of the class a mod p^{v_p(q)}. Depends on a only modulo q; exponents above
/// r_max carry no extra information and are capped.
pub fn class_factor(q: u64, a: i128, config: &TupleConfig) -> Result<BigRational> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus q must be positive".into()));
    }
    let r_max = config.r_max();
    let mut h = BigRational::one();
    for (p, l) in factorize(q) {
        h *= prime_class_factor(p, l.min(r_max), a, config)?;
        if h.is_zero() {
            break;
        }
    }
    Ok(h)
}

/// Scaled mean density of f over the class a mod q.
#[derive(Clone, Debug)]
pub struct ResidueDensity {
    /// Exact correction-times-class-factor; the scaled density is the global
    /// density times this.
    pub correction: BigRational,
    /// q times the class mean density.
    pub scaled: f64,
    /// The class mean density itself (scaled / q).
    pub density: f64,
}

/// Mean density of tuple members in the residue class a mod q, as
/// density * correction(q) * class_factor(q, a). The exact rational part is
/// exposed so mass
/// conservation can be checked without float error.
pub fn residue_density(
    q: u64,
    a: i128,
    config: &TupleConfig,
    density: &EulerProductValue,
) -> Result<ResidueDensity> {
    let correction = density_correction(q, config)? * class_factor(q, a, config)?;
    let scaled = density.value * rat_to_f64(&correction);
    Ok(ResidueDensity {
        correction,
        scaled,
        density: scaled / q as f64,
    })
}

/// Gaussian sum of f at (q, a): the discrete Fourier transform of the class
/// mean densities, sum_b eta(q, b) e(ab/q). Direct O(q) summation; intended
/// for q up to ~10^5.
pub fn gaussian_sum(
    q: u64,
    a: u64,
    config: &TupleConfig,
    density: &EulerProductValue,
) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus q must be positive".into()));
    }
    let z = rat_to_f64(&density_correction(q, config)?);
    let scale = density.value * z / q as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for b in 1..=q {
        let h = rat_to_f64(&class_factor(q, b as i128, config)?);
        if h == 0.0 {
            continue;
        }
        let ang =
            2.0 * std::f64::consts::PI * ((a as u128 * b as u128) % q as u128) as f64 / q as f64;
        acc += Complex64::new(ang.cos(), ang.sin()) * h;
    }
    Ok(acc * scale)
}

/// Multiplicative extension of the pair-correlation values: zero unless q is
/// (r_max + 1)-free.
pub fn pair_correlation(q: u64, config: &TupleConfig) -> Result<BigRational> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus q must be positive".into()));
    }
    let r_max = config.r_max();
    let mut out = BigRational::one();
    for (p, l) in factorize(q) {
        if l > r_max {
            return Ok(BigRational::zero());
        }
        out *= pair_correlation_prime_power(p, l, config)?;
        if out.is_zero() {
            break;
        }
    }
    Ok(out)
}

/// Exact coprime-frequency sum of the transformed class factors at q:
/// sum over a <= q coprime to q of sum_b factor(q,b) e(ab/q), which collapses
/// to the Ramanujan-weighted sum sum_b factor(q, b) c_q(b). Multiplicative in q.
pub fn ramanujan_weighted_class_sum(q: u64, config: &TupleConfig) -> Result<BigRational> {
    let row = ramanujan_row(q)?;
    let mut acc = BigRational::zero();
    for b in 1..=q {
        let h = class_factor(q, b as i128, config)?;
        if h.is_zero() {
            continue;
        }
        acc += h * BigRational::from(BigInt::from(row[(b % q) as usize]));
    }
    Ok(acc)
}

/// Closed form of [`ramanujan_weighted_class_sum`] at a prime:
/// p^{1-r_max} (covered - p * (covered - covered_units)).
pub fn prime_class_sum(p: u64, config: &TupleConfig) -> Result<BigRational> {
    let counts = covered_counts(p, config)?;
    let in_zero = counts.covered - counts.covered_units;
    let numer = BigInt::from(counts.covered) - BigInt::from(p) * BigInt::from(in_zero);
    let denom = BigInt::from(p).pow(config.r_max() - 1);
    Ok(BigRational::new(numer, denom))
}

/// Running partial sum of the singular series
///
/// ```text
/// sum_{q <= Q} density^2 * q^{-2} * correction(q)^2 * pair_correlation(q)
/// ```
///
/// whose limit is the density itself. Terms are nonnegative, accumulated in
/// ascending q with plain addition, so partial sums are monotone in Q.
#[derive(Clone, Debug)]
pub struct SingularSeriesPartial {
    pub q_limit: u64,
    pub partial_sum: f64,
    /// The value the series converges to: the density.
    pub target: f64,
    pub per_q_terms: Option<Vec<(u64, f64)>>,
}

pub fn singular_series_partial(
    config: &TupleConfig,
    q_limit: u64,
    p_limit: u64,
) -> Result<SingularSeriesPartial> {
    singular_series(config, q_limit, p_limit, false)
}

pub fn singular_series_partial_with_terms(
    config: &TupleConfig,
    q_limit: u64,
    p_limit: u64,
) -> Result<SingularSeriesPartial> {
    singular_series(config, q_limit, p_limit, true)
}

fn singular_series(
    config: &TupleConfig,
    q_limit: u64,
    p_limit: u64,
    keep_terms: bool,
) -> Result<SingularSeriesPartial> {
    if q_limit == 0 {
        return Err(Error::InvalidInput("cutoff Q must be positive".into()));
    }
    let density = natural_density(config, p_limit)?;
    let r_max = config.r_max();
    let spf = spf_table(q_limit as usize);
    // factor contributed by p^l: correction(p)^2 * pair_correlation(p^l) / p^{2l}
    let mut cache: BTreeMap<u64, Vec<Option<BigRational>>> = BTreeMap::new();
    let mut terms = keep_terms.then(Vec::new);
    let mut sum = 0.0f64;
    let scale = density.value * density.value;
    for q in 1..=q_limit {
        let term = match term_rational(q, config, r_max, &spf, &mut cache)? {
            Some(t) => rat_to_f64(&t),
            None => 0.0,
        };
        debug_assert!(term >= 0.0);
        sum += term * scale;
        if let Some(v) = terms.as_mut() {
            v.push((q, term * scale));
        }
    }
    Ok(SingularSeriesPartial {
        q_limit,
        partial_sum: sum,
        target: density.value,
        per_q_terms: terms,
    })
}

fn spf_table(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn term_rational(
    q: u64,
    config: &TupleConfig,
    r_max: u32,
    spf: &[u32],
    cache: &mut BTreeMap<u64, Vec<Option<BigRational>>>,
) -> Result<Option<BigRational>> {
    let mut term = BigRational::one();
    let mut m = q as usize;
    while m > 1 {
        let p = spf[m] as u64;
        let mut l = 0u32;
        while m % p as usize == 0 {
            m /= p as usize;
            l += 1;
        }
        if l > r_max {
            return Ok(None);
        }
        let entry = cache
            .entry(p)
            .or_insert_with(|| vec![None; r_max as usize + 1]);
        if entry[l as usize].is_none() {
            let counts = covered_counts(p, config)?;
            let period = checked_pow_u128(p, r_max, "p^r_max")?;
            if counts.covered >= period {
                return Err(Error::Inadmissible { p });
            }
            let z = BigRational::new(BigInt::from(period), BigInt::from(period - counts.covered));
            let h = pair_correlation_prime_power(p, l, config)?;
            let pl2 = BigRational::new(BigInt::one(), BigInt::from(p).pow(2 * l));
            entry[l as usize] = Some(&z * &z * h * pl2);
        }
        let f = entry[l as usize].as_ref().expect("just filled");
        if f.is_zero() {
            return Ok(Some(BigRational::zero()));
        }
        term *= f;
    }
    Ok(Some(term))
}

/// Truncated series form of the prime constant,
///
/// ```text
/// density * sum_{q <= Q squarefree} mu(q)/phi(q) * correction(q)/q * S(q)
/// ```
///
/// with S multiplicative and S(p) = [`prime_class_sum`]. A validation path:
/// the Euler product is authoritative. `reported_tail` is an empirical
/// convergence estimate (no rigorous bound is available for the series).
#[derive(Clone, Debug)]
pub struct ConstantSeriesPartial {
    pub q_limit: u64,
    pub value: f64,
    /// Empirical tail estimate from the spread of late partial sums.
    pub reported_tail: f64,
}

pub fn prime_constant_series(
    config: &TupleConfig,
    q_limit: u64,
    p_limit: u64,
) -> Result<ConstantSeriesPartial> {
    if q_limit == 0 {
        return Err(Error::InvalidInput("cutoff Q must be positive".into()));
    }
    let density = natural_density(config, p_limit)?;
    let spf = spf_table(q_limit as usize);
    // per-prime data for squarefree q: mu/phi * z/q factorizes as
    // prod_{p | q} (-1/(p-1)) * correction(p)/p * S(p)
    let mut cache: BTreeMap<u64, Option<BigRational>> = BTreeMap::new();
    let mut sum = Kahan::default();
    let mut at_half = 0.0f64;
    let mut at_three_quarters = 0.0f64;
    for q in 1..=q_limit {
        let mut term = BigRational::one();
        let mut m = q as usize;
        let mut squarefree = true;
        while m > 1 {
            let p = spf[m] as u64;
            m /= p as usize;
            if m % p as usize == 0 {
                squarefree = false;
                break;
            }
            let factor = cache.entry(p).or_insert(None);
            if factor.is_none() {
                let counts = covered_counts(p, config)?;
                let period = checked_pow_u128(p, config.r_max(), "p^r_max")?;
                if counts.covered >= period {
                    return Err(Error::Inadmissible { p });
                }
                let z =
                    BigRational::new(BigInt::from(period), BigInt::from(period - counts.covered));
                let s = prime_class_sum(p, config)?;
                let mu_phi = BigRational::new(BigInt::from(-1), BigInt::from(p - 1));
                let inv_p = BigRational::new(BigInt::one(), BigInt::from(p));
                *factor = Some(mu_phi * z * inv_p * s);
            }
            term *= factor.as_ref().expect("just filled");
        }
        if squarefree {
            sum.add(rat_to_f64(&term));
        }
        if q == q_limit / 2 {
            at_half = sum.sum;
        }
        if q == q_limit / 4 * 3 {
            at_three_quarters = sum.sum;
        }
    }
    let value = density.value * sum.sum;
    let spread = (sum.sum - at_half)
        .abs()
        .max((sum.sum - at_three_quarters).abs());
    Ok(ConstantSeriesPartial {
        q_limit,
        value,
        reported_tail: density.value * (4.0 * spread + 1e-12),
    })
}
