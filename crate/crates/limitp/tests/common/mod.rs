//! Shared test oracles, all deliberately independent of the library's
//! counting paths: class factors come from the alternating solvability sum
//! over the congruence solver, and pair correlations from complex
//! exponential sums over those factors.
//!
//! Each integration test target compiles this module separately and uses a
//! different subset of it.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use limitp::congruence::tuple_system_solvable;
use limitp::TupleConfig;

/// Deterministic pseudo-random stream (splitmix64); tests stay seedless from
/// the caller's point of view and byte-reproducible.
pub struct Rng(pub u64);

impl Rng {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Survivor density of the class a mod p^l straight from the defining
/// alternating sum: over every subset of the tuple constraints, the sign,
/// the gcd-over-lcm weight, and the solvability of the combined congruence
/// system. Exercises only the congruence solver.
pub fn chi_by_definition(p: u64, l: u32, a: i128, config: &TupleConfig) -> BigRational {
    let s = config.s();
    let pl = (p as u128).pow(l);
    let mut total = BigRational::zero();
    for mask in 0u32..(1 << s) {
        let mut moduli = Vec::with_capacity(s);
        let mut lcm_exp = 0u32;
        for (i, &(_, r)) in config.pairs().iter().enumerate() {
            if mask >> i & 1 == 1 {
                moduli.push((p as u128).pow(r));
                lcm_exp = lcm_exp.max(r);
            } else {
                moduli.push(1);
            }
        }
        if !tuple_system_solvable(&moduli, pl, a, config).unwrap() {
            continue;
        }
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        // gcd(p^lcm_exp, p^l) / p^lcm_exp = p^{min(lcm_exp, l) - lcm_exp}
        let g_exp = lcm_exp.min(l);
        let term = BigRational::new(
            BigInt::from(sign) * BigInt::from(p).pow(g_exp),
            BigInt::from(p).pow(lcm_exp),
        );
        total += term;
    }
    total
}

/// Brute-force pair-correlation value at the prime power p^l: build the
/// class factors from the definition, transform them with complex
/// exponentials, and sum |transform|^2 over frequencies coprime to p.
pub fn pair_correlation_bruteforce(p: u64, l: u32, config: &TupleConfig) -> f64 {
    let pl = (p as u128).pow(l) as u64;
    let h: Vec<f64> = (0..pl)
        .map(|b| {
            chi_by_definition(p, l, b as i128, config)
                .to_f64()
                .expect("small rational")
        })
        .collect();
    let mut total = 0.0f64;
    for a in 1..=pl {
        if a % p == 0 {
            continue;
        }
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for b in 1..=pl {
            let ang = 2.0 * std::f64::consts::PI * ((a as u128 * b as u128) % pl as u128) as f64
                / pl as f64;
            let hb = h[(b % pl) as usize];
            re += hb * ang.cos();
            im += hb * ang.sin();
        }
        total += re * re + im * im;
    }
    total
}
