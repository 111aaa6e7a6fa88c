//! Sieve-based measurements of the quantities the theory predicts: prime
//! sums, mean values, residue-class errors, quadratic means of those errors,
//! a discrete transform check of the prime-sum identity, and the distance of
//! the smooth k-free approximation from the exact indicator.
//!
//! Every run is seedless and deterministic; reports are assembled in fixed
//! order.

use num_complex::Complex64;

use crate::arith::{
    kfree_sieve, kfree_smooth_sieve, primes_up_to, ramanujan_row, sieve_primes, TupleIndicator,
};
use crate::error::{Error, Result};
use crate::global::{
    density_correction, natural_density, prime_constant, ramanujan_weighted_class_sum, rat_to_f64,
};
use crate::tuple::TupleConfig;

/// One measurement: observed vs. predicted, with the Euler-product truncation
/// bound carried alongside whenever the prediction used one (0 otherwise).
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalReport {
    pub x: u64,
    pub observed: f64,
    pub predicted: f64,
    /// observed / predicted when predicted != 0, else 0.
    pub ratio: f64,
    pub tail_bound: f64,
    pub notes: String,
}

fn report(
    x: u64,
    observed: f64,
    predicted: f64,
    tail_bound: f64,
    notes: String,
) -> EmpiricalReport {
    let ratio = if predicted != 0.0 {
        observed / predicted
    } else {
        0.0
    };
    debug_assert!(observed.is_finite() && predicted.is_finite() && ratio.is_finite());
    EmpiricalReport {
        x,
        observed,
        predicted,
        ratio,
        tail_bound,
        notes,
    }
}

/// Sum of f over primes up to x against both normalizations of the predicted
/// main term: constant * x/log x (the asymptotic form) and constant * pi(x)
/// (the refined comparator). Returns one report per normalization, in that
/// order.
pub fn prime_sum(config: &TupleConfig, x: u64, p_limit: u64) -> Result<Vec<EmpiricalReport>> {
    if x == 0 {
        return Err(Error::InvalidInput("x must be positive".into()));
    }
    let primes = sieve_primes(x)?;
    let f = TupleIndicator::build(config, x)?;
    let mut observed = 0u64;
    let mut pi_x = 0u64;
    for p in primes.ones() {
        pi_x += 1;
        if f.get(p as u64) {
            observed += 1;
        }
    }
    let constant = prime_constant(config, p_limit)?;
    let by_log = if x >= 2 {
        constant.value * x as f64 / (x as f64).ln()
    } else {
        0.0
    };
    let by_pi = constant.value * pi_x as f64;
    Ok(vec![
        report(
            x,
            observed as f64,
            by_log,
            constant.tail_bound,
            format!("prime sum of {config}; predicted = constant * x/log x; constant trunc P={p_limit}"),
        ),
        report(
            x,
            observed as f64,
            by_pi,
            constant.tail_bound,
            format!("prime sum of {config}; predicted = constant * pi(x), pi(x)={pi_x}; constant trunc P={p_limit}"),
        ),
    ])
}

/// Mean value: sum of f(n) for n <= x against density * x. The notes carry
/// |observed - predicted| / x^{2/(r_min+1)}, the scale of the proven error
/// exponent.
pub fn mean_sum(config: &TupleConfig, x: u64, p_limit: u64) -> Result<EmpiricalReport> {
    if x == 0 {
        return Err(Error::InvalidInput("x must be positive".into()));
    }
    let f = TupleIndicator::build(config, x)?;
    let observed = f.count() as f64;
    let density = natural_density(config, p_limit)?;
    let predicted = density.value * x as f64;
    let err_scale = (x as f64).powf(2.0 / (config.r_min() as f64 + 1.0));
    let scaled_err = (observed - predicted).abs() / err_scale;
    Ok(report(
        x,
        observed,
        predicted,
        density.tail_bound,
        format!("mean of {config}; |obs-pred|/x^(2/(r_min+1)) = {scaled_err:.6e}"),
    ))
}

/// Exact class count and error term for one residue class.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorTermSample {
    pub x: u64,
    pub q: u64,
    pub b: u64,
    /// Number of tuple members n <= x with n ≡ b (mod q).
    pub count: u64,
    /// count - x * eta(q, b).
    pub e: f64,
}

/// Error terms for every class b = 1..=q in one sieve pass.
pub fn residue_class_errors(
    config: &TupleConfig,
    x: u64,
    q: u64,
    p_limit: u64,
) -> Result<Vec<ErrorTermSample>> {
    if x == 0 || q == 0 {
        return Err(Error::InvalidInput("x and q must be positive".into()));
    }
    if q > 100_000_000 {
        return Err(Error::Capacity {
            limit: q,
            required: q as u128 * 8,
            budget: 1 << 30,
        });
    }
    let f = TupleIndicator::build(config, x)?;
    let mut counts = vec![0u64; q as usize];
    for n in f.ones() {
        counts[(n % q) as usize] += 1;
    }
    let density = natural_density(config, p_limit)?;
    let mut out = Vec::with_capacity(q as usize);
    for b in 1..=q {
        let count = counts[(b % q) as usize];
        let eta = crate::global::residue_density(q, b as i128, config, &density)?.density;
        out.push(ErrorTermSample {
            x,
            q,
            b,
            count,
            e: count as f64 - x as f64 * eta,
        });
    }
    Ok(out)
}

/// Error term for a single class.
pub fn residue_class_error(
    config: &TupleConfig,
    x: u64,
    q: u64,
    b: u64,
    p_limit: u64,
) -> Result<ErrorTermSample> {
    let b_idx = if q == 0 { 0 } else { (b % q + q) % q };
    let all = residue_class_errors(config, x, q, p_limit)?;
    let pos = if b_idx == 0 { q } else { b_idx };
    Ok(all[(pos - 1) as usize].clone())
}

/// Quadratic mean of the progression error terms over q <= Q.
///
/// Two conventions for the inner range are reported side by side: classes
/// b = 1..=q each counted once (`class_sum`), and classes weighted by the
/// number of representatives b' <= x in the class (`weighted_sum`), which
/// models an inner sum running over all b <= x.
#[derive(Clone, Debug)]
pub struct BdhReport {
    pub x: u64,
    pub q_limit: u64,
    pub class_sum: f64,
    pub weighted_sum: f64,
    /// class_sum / (Q x)
    pub class_ratio: f64,
    /// weighted_sum / (Q x)
    pub weighted_ratio: f64,
}

pub fn bdh_quadratic_mean(
    config: &TupleConfig,
    x: u64,
    q_limit: u64,
    p_limit: u64,
) -> Result<BdhReport> {
    if x == 0 || q_limit == 0 {
        return Err(Error::InvalidInput("x and Q must be positive".into()));
    }
    if q_limit > x {
        return Err(Error::InvalidInput(format!(
            "Q = {q_limit} must not exceed x = {x}"
        )));
    }
    let f = TupleIndicator::build(config, x)?;
    let members: Vec<u64> = f.ones().collect();
    let density = natural_density(config, p_limit)?;

    let mut class_sum = 0.0f64;
    let mut weighted_sum = 0.0f64;
    for q in 1..=q_limit {
        let mut counts = vec![0u64; q as usize];
        for &n in &members {
            counts[(n % q) as usize] += 1;
        }
        for b in 1..=q {
            let eta = crate::global::residue_density(q, b as i128, config, &density)?.density;
            let e = counts[(b % q) as usize] as f64 - x as f64 * eta;
            let multiplicity = if b <= x { (x - b) / q + 1 } else { 0 };
            class_sum += e * e;
            weighted_sum += multiplicity as f64 * e * e;
        }
    }
    let scale = q_limit as f64 * x as f64;
    Ok(BdhReport {
        x,
        q_limit,
        class_sum,
        weighted_sum,
        class_ratio: class_sum / scale,
        weighted_ratio: weighted_sum / scale,
    })
}

/// Discrete check of the prime-sum identity: with N = x + 1,
///
/// ```text
/// (1/N) sum_{k<N} S(k/N) T(k/N) = sum_{p<=x} f(p)
/// ```
///
/// exactly, because |n - p| < N makes the discrete orthogonality exact; the
/// only deviation is float roundoff. S and T are the exponential sums of f
/// and of the primes. Dense O(x^2) evaluation, so x is capped at 20000.
pub fn dft_identity_check(config: &TupleConfig, x: u64) -> Result<EmpiricalReport> {
    if x == 0 {
        return Err(Error::InvalidInput("x must be positive".into()));
    }
    if x > 20_000 {
        return Err(Error::InvalidInput(format!(
            "dense transform check is O(x^2); x = {x} exceeds the 20000 cap"
        )));
    }
    let n_len = x + 1;
    let f = TupleIndicator::build(config, x)?;
    let members: Vec<u64> = f.ones().collect();
    let primes: Vec<u64> = sieve_primes(x)?.ones().map(|p| p as u64).collect();
    let direct = primes.iter().filter(|&&p| f.get(p)).count() as f64;

    let tw: Vec<Complex64> = (0..n_len)
        .map(|j| {
            let ang = 2.0 * std::f64::consts::PI * j as f64 / n_len as f64;
            Complex64::new(ang.cos(), ang.sin())
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n_len {
        let mut s = Complex64::new(0.0, 0.0);
        for &n in &members {
            s += tw[((k as u128 * n as u128) % n_len as u128) as usize];
        }
        let mut t = Complex64::new(0.0, 0.0);
        for &p in &primes {
            t += tw[((k as u128 * p as u128) % n_len as u128) as usize].conj();
        }
        acc += s * t;
    }
    let observed = acc.re / n_len as f64;
    let imag = acc.im / n_len as f64;
    let deviation = if direct != 0.0 {
        (observed - direct).abs() / direct
    } else {
        (observed - direct).abs()
    };
    Ok(report(
        x,
        observed,
        direct,
        0.0,
        format!("discrete transform average vs direct prime sum of {config}; relative deviation {deviation:.3e}, imag {imag:.3e}"),
    ))
}

/// Distance measurement for the smooth k-free approximation.
#[derive(Clone, Debug)]
pub struct KfreeApproxReport {
    pub k: u32,
    pub y: u64,
    pub x: u64,
    /// (1/x) * #{n <= x : smooth(n) = 1, exact(n) = 0}; the square of the
    /// seminorm distance, since the pointwise difference is 0 or 1.
    pub distance: f64,
    /// Analytic bound: sum_{y < d <= x} d^{-k} plus the integral tail past x.
    pub bound: f64,
    /// Points checked for pointwise domination (smooth >= exact).
    pub pointwise_checked: u64,
    pub pointwise_ok: bool,
    /// Period prod_{p <= y} p^k of the smooth indicator, when representable.
    pub period: Option<u128>,
    /// Periodicity verified on a window, when the period fits below x.
    pub periodicity_ok: Option<bool>,
}

impl KfreeApproxReport {
    pub fn to_report(&self) -> EmpiricalReport {
        report(
            self.x,
            self.distance,
            self.bound,
            0.0,
            format!(
                "smooth k-free distance, k={}, y={}; pointwise_ok={} ({} pts), period={:?}, periodicity_ok={:?}",
                self.k, self.y, self.pointwise_ok, self.pointwise_checked, self.period,
                self.periodicity_ok
            ),
        )
    }
}

pub fn kfree_approx_distance(k: u32, y: u64, x: u64) -> Result<KfreeApproxReport> {
    if x == 0 {
        return Err(Error::InvalidInput("x must be positive".into()));
    }
    let exact = kfree_sieve(k, x)?;
    let smooth = kfree_smooth_sieve(k, y, x)?;
    // the smooth indicator strikes a subset of the exact strikes
    let diff = smooth.count() - exact.count();
    let distance = diff as f64 / x as f64;

    let mut bound = 0.0f64;
    for d in (y + 1)..=x {
        bound += (d as f64).powi(-(k as i32));
    }
    bound += (x as f64).powi(1 - k as i32) / (k as f64 - 1.0);

    let pointwise_checked = x.min(100_000);
    let mut pointwise_ok = true;
    for n in 1..=pointwise_checked {
        if exact.get(n as usize) && !smooth.get(n as usize) {
            pointwise_ok = false;
            break;
        }
    }

    let mut period: Option<u128> = Some(1);
    for p in primes_up_to(y)? {
        period = period.and_then(|r| r.checked_mul((p as u128).checked_pow(k)?));
    }
    let periodicity_ok = period.and_then(|r| {
        if r == 0 || r >= x as u128 {
            return None; // window too small to see one full period
        }
        let r = r as u64;
        let upto = (x - r).min(100_000);
        Some((1..=upto).all(|n| smooth.get(n as usize) == smooth.get((n + r) as usize)))
    });

    Ok(KfreeApproxReport {
        k,
        y,
        x,
        distance,
        bound,
        pointwise_checked,
        pointwise_ok,
        period,
        periodicity_ok,
    })
}

/// Mean of f weighted by the Ramanujan sum c_q against the coprime-frequency
/// sum of the Gaussian sums, which it converges to.
pub fn ramanujan_mean_check(
    config: &TupleConfig,
    q: u64,
    x: u64,
    p_limit: u64,
) -> Result<EmpiricalReport> {
    if x == 0 || q == 0 {
        return Err(Error::InvalidInput("x and q must be positive".into()));
    }
    let f = TupleIndicator::build(config, x)?;
    let row = ramanujan_row(q)?;
    let mut weighted = 0i64;
    for n in f.ones() {
        weighted += row[(n % q) as usize];
    }
    let observed = weighted as f64 / x as f64;

    let density = natural_density(config, p_limit)?;
    let predicted = match density_correction(q, config) {
        Ok(z) => {
            let s_h = ramanujan_weighted_class_sum(q, config)?;
            density.value * rat_to_f64(&(z * s_h)) / q as f64
        }
        // a vanishing local factor means the density itself is 0
        Err(Error::Inadmissible { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(report(
        x,
        observed,
        predicted,
        density.tail_bound,
        format!("mean of f * c_q for {config}, q={q}; predicted = coprime sum of Gaussian sums"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pairs: &[(u64, u32)]) -> TupleConfig {
        TupleConfig::new(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn prime_sum_squarefree_counts_all_primes() {
        let c = cfg(&[(0, 2)]);
        for x in [100u64, 10_000] {
            let reports = prime_sum(&c, x, 1000).unwrap();
            let pi_x = sieve_primes(x).unwrap().count() as f64;
            assert_eq!(reports[1].observed, pi_x);
            // constant = 1 exactly, so the pi(x) prediction is pi(x)
            assert_eq!(reports[1].predicted, pi_x);
            assert_eq!(reports[1].ratio, 1.0);
        }
    }

    #[test]
    fn prime_sum_inadmissible_vanishes() {
        let c = cfg(&[(0, 2), (1, 2), (2, 2), (3, 2)]);
        let reports = prime_sum(&c, 2000, 1000).unwrap();
        assert_eq!(reports[0].observed, 0.0);
        assert_eq!(reports[0].predicted, 0.0);
        assert_eq!(reports[0].ratio, 0.0);
    }

    #[test]
    fn mean_sum_squarefree_density() {
        let c = cfg(&[(0, 2)]);
        let r = mean_sum(&c, 1_000_000, 100_000).unwrap();
        let expect = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((r.observed / r.x as f64 - expect).abs() < 1e-3);
        assert!((r.ratio - 1.0).abs() < 1e-2);
    }

    #[test]
    fn mean_sum_x_equals_one() {
        let c = cfg(&[(0, 2)]);
        let r = mean_sum(&c, 1, 100).unwrap();
        assert_eq!(r.observed, 1.0); // f(1) = 1
        let c = cfg(&[(3, 2)]); // n + 3 = 4 at n = 1
        let r = mean_sum(&c, 1, 100).unwrap();
        assert_eq!(r.observed, 0.0);
    }

    #[test]
    fn residue_errors_are_exactly_consistent() {
        let c = cfg(&[(0, 2)]);
        let x = 50_000u64;
        for q in [1u64, 4, 7, 12] {
            let samples = residue_class_errors(&c, x, q, 10_000).unwrap();
            let total: u64 = samples.iter().map(|s| s.count).sum();
            let f = TupleIndicator::build(&c, x).unwrap();
            assert_eq!(total, f.count(), "q={q}");
        }
    }

    #[test]
    fn residue_error_class_zero_mod_four() {
        // no squarefree number is ≡ 0 mod 4
        let c = cfg(&[(0, 2)]);
        let s = residue_class_error(&c, 100_000, 4, 0, 10_000).unwrap();
        assert_eq!(s.count, 0);
        assert_eq!(s.e, 0.0);
        assert_eq!(s.b, 4); // class label for b ≡ 0 is q itself
    }

    #[test]
    fn residue_error_q1_matches_mean() {
        let c = cfg(&[(1, 2)]);
        let x = 20_000u64;
        let s = residue_class_error(&c, x, 1, 1, 10_000).unwrap();
        let m = mean_sum(&c, x, 10_000).unwrap();
        assert_eq!(s.count as f64, m.observed);
        assert!((s.e - (m.observed - m.predicted)).abs() < 1e-6);
    }

    #[test]
    fn bdh_q1_is_single_error_term() {
        let c = cfg(&[(0, 2)]);
        let x = 10_000u64;
        let r = bdh_quadratic_mean(&c, x, 1, 10_000).unwrap();
        let s = residue_class_error(&c, x, 1, 1, 10_000).unwrap();
        assert!((r.class_sum - s.e * s.e).abs() < 1e-9);
        // q = 1, b = 1: x representatives of the single class
        assert!((r.weighted_sum - x as f64 * s.e * s.e).abs() < 1e-6);
    }

    #[test]
    fn bdh_brute_force_small() {
        // recompute the weighted sum naively over b = 1..=x
        let c = cfg(&[(0, 2), (1, 2)]);
        let x = 100u64;
        let q_limit = 10u64;
        let fast = bdh_quadratic_mean(&c, x, q_limit, 1000).unwrap();
        let f = TupleIndicator::build(&c, x).unwrap();
        let density = natural_density(&c, 1000).unwrap();
        let mut weighted = 0.0f64;
        let mut class = 0.0f64;
        for q in 1..=q_limit {
            for b in 1..=x {
                let count = (1..=x).filter(|&n| f.get(n) && n % q == b % q).count() as f64;
                let eta = crate::global::residue_density(q, b as i128, &c, &density)
                    .unwrap()
                    .density;
                let e = count - x as f64 * eta;
                weighted += e * e;
                if b <= q {
                    class += e * e;
                }
            }
        }
        assert!((fast.weighted_sum - weighted).abs() < 1e-7 * (1.0 + weighted.abs()));
        assert!((fast.class_sum - class).abs() < 1e-9 * (1.0 + class.abs()));
    }

    #[test]
    fn dft_identity_tiny_case() {
        let c = cfg(&[(0, 2)]);
        let r = dft_identity_check(&c, 10).unwrap();
        assert_eq!(r.predicted, 4.0); // pi(10)
        assert!((r.observed - 4.0).abs() < 1e-9);
    }

    #[test]
    fn dft_identity_x_equals_one() {
        let c = cfg(&[(0, 2)]);
        let r = dft_identity_check(&c, 1).unwrap();
        assert_eq!(r.predicted, 0.0);
        assert!(r.observed.abs() < 1e-12);
    }

    #[test]
    fn kfree_approx_example_points() {
        // k=2, y=2: 9 = 3^2 is missed by the smooth sieve
        let r = kfree_approx_distance(2, 2, 10_000).unwrap();
        assert!(r.pointwise_ok);
        assert_eq!(r.period, Some(4));
        assert_eq!(r.periodicity_ok, Some(true));
        assert!(r.distance <= r.bound, "{} > {}", r.distance, r.bound);
        assert!(r.distance > 0.0);

        // y >= 3 strikes 9 too: distance shrinks
        let r3 = kfree_approx_distance(2, 3, 10_000).unwrap();
        assert!(r3.distance < r.distance);
        assert_eq!(r3.period, Some(36));
    }

    #[test]
    fn ramanujan_mean_q1_recovers_mean_value() {
        let c = cfg(&[(0, 2)]);
        let r = ramanujan_mean_check(&c, 1, 200_000, 50_000).unwrap();
        let d = natural_density(&c, 50_000).unwrap();
        assert!((r.predicted - d.value).abs() < 1e-12);
        assert!((r.observed - d.value).abs() < 1e-2);
    }

    #[test]
    fn ramanujan_mean_inadmissible_both_sides_vanish() {
        let c = cfg(&[(0, 2), (1, 2), (2, 2), (3, 2)]);
        let r = ramanujan_mean_check(&c, 6, 5000, 1000).unwrap();
        assert_eq!(r.observed, 0.0);
        assert_eq!(r.predicted, 0.0);
    }
}
