//! Simultaneous congruence systems.
//!
//! The solver merges congruences pairwise through the extended euclidean
//! algorithm, so moduli never need to be coprime — the systems arising from
//! tuple configurations stack several powers of the same prime. An
//! inconsistent system is a normal `None` result, not an error; only 128-bit
//! overflow of the combined modulus is an error.

use crate::error::{Error, Result};
use crate::tuple::TupleConfig;

/// A single congruence `n ≡ residue (mod modulus)` with the residue stored
/// reduced, `0 <= residue < modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Congruence {
    residue: u128,
    modulus: u128,
}

impl Congruence {
    pub fn new(residue: i128, modulus: u128) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidInput(
                "congruence modulus must be >= 1".into(),
            ));
        }
        if modulus > i128::MAX as u128 {
            return Err(Error::Overflow {
                what: "congruence modulus",
                prime: None,
            });
        }
        Ok(Self {
            residue: residue.rem_euclid(modulus as i128) as u128,
            modulus,
        })
    }

    pub fn residue(&self) -> u128 {
        self.residue
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn holds_for(&self, n: u128) -> bool {
        n % self.modulus == self.residue
    }
}

/// A list of congruences to be solved simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CongruenceSystem {
    pairs: Vec<Congruence>,
}

impl CongruenceSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, residue: i128, modulus: u128) -> Result<()> {
        self.pairs.push(Congruence::new(residue, modulus)?);
        Ok(())
    }

    pub fn pairs(&self) -> &[Congruence] {
        &self.pairs
    }

    /// Unique solution class modulo the lcm of the moduli, or `None` when two
    /// congruences conflict modulo a common divisor.
    pub fn solve(&self) -> Result<Option<Congruence>> {
        let mut acc = Congruence {
            residue: 0,
            modulus: 1,
        };
        for &c in &self.pairs {
            match crt_merge(acc, c)? {
                Some(m) => acc = m,
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended euclid: (g, x) with a*x ≡ g (mod m), for 0 < a, m.
fn mod_inverse(a: u128, m: u128) -> u128 {
    // standard iterative egcd on i128; inputs here are < 2^127 and coprime
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u128
}

/// (a * b) mod m without overflow; falls back to double-and-add when the
/// product does not fit in 128 bits.
fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    let (a, b) = (a % m, b % m);
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    let (mut a, mut b, mut acc) = (a, b, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    acc
}

/// Merge two congruences into one modulo lcm(m1, m2).
pub fn crt_merge(c1: Congruence, c2: Congruence) -> Result<Option<Congruence>> {
    let (m1, m2) = (c1.modulus, c2.modulus);
    let g = gcd_u128(m1, m2);
    let (lo, hi) = if c1.residue <= c2.residue {
        (c1, c2)
    } else {
        (c2, c1)
    };
    let diff = hi.residue - lo.residue;
    if diff % g != 0 {
        return Ok(None);
    }
    let lcm = (m1 / g)
        .checked_mul(m2)
        .filter(|&l| l <= i128::MAX as u128)
        .ok_or(Error::Overflow {
            what: "lcm of congruence moduli",
            prime: None,
        })?;
    // solve lo.residue + lo.modulus * k ≡ hi.residue (mod hi.modulus)
    let step = lo.modulus;
    let m = hi.modulus / g;
    let k = mul_mod((diff / g) % m, mod_inverse((step / g) % m, m), m);
    let residue = lo.residue + mul_mod(step % lcm, k, lcm) % lcm;
    let residue = residue % lcm;
    Ok(Some(Congruence {
        residue,
        modulus: lcm,
    }))
}

/// Solve a slice of congruences directly.
pub fn crt_solve(pairs: &[(i128, u128)]) -> Result<Option<Congruence>> {
    let mut sys = CongruenceSystem::new();
    for &(r, m) in pairs {
        sys.push(r, m)?;
    }
    sys.solve()
}

/// Solvability of the tuple congruence system
///
/// ```text
/// n ≡ -alpha_j  (mod moduli[j])     for each pair j
/// n ≡ a         (mod q)
/// ```
///
/// `moduli[j]` is supplied already raised to the pair's exponent. Returns 1
/// exactly when the combined system has a solution; 0 is meaningful data, not
/// an error.
pub fn tuple_system_solvable(
    moduli: &[u128],
    q: u128,
    a: i128,
    config: &TupleConfig,
) -> Result<bool> {
    if moduli.len() != config.s() {
        return Err(Error::InvalidInput(format!(
            "expected {} moduli, got {}",
            config.s(),
            moduli.len()
        )));
    }
    let mut sys = CongruenceSystem::new();
    for (&m, &(alpha, _)) in moduli.iter().zip(config.pairs()) {
        sys.push(-(alpha as i128), m)?;
    }
    sys.push(a, q)?;
    Ok(sys.solve()?.is_some())
}
