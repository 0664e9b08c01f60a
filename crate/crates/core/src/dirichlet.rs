//! Prime enumeration and Dirichlet characters mod an odd prime q.
//!
//! The construction needs exactly one character per modulus: a faithful one,
//! taking all q-1 roots of unity. (Z/qZ)* is cyclic, so mapping its least
//! primitive root to e(1/(q-1)) determines such a character; the generator is
//! chosen deterministically so constructed sets are reproducible across runs
//! and machines.

use crate::phase::Phase;
use crate::{Error, Result};

/// Exactly the primes <= d, ascending (sieve of Eratosthenes).
pub fn primes_up_to(d: u64) -> Vec<u64> {
    if d < 2 {
        return Vec::new();
    }
    let n = d as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Value of a character at one residue: a root of unity or zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChiValue {
    /// exp(2pi i e/(q-1)) given as a phase in turns.
    Root(Phase),
    /// q divides n.
    Zero,
}

/// The faithful Dirichlet character mod q determined by the least primitive
/// root.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    q: u64,
    generator: u64,
    /// exponent_table[r] = e with chi(r) = e(e/(q-1)) for r in 1..q;
    /// entry 0 is unused.
    exponent_table: Vec<u32>,
}

impl DirichletCharacter {
    /// Build the character mod an odd prime q.
    pub fn mod_q(q: u64) -> Result<DirichletCharacter> {
        if q < 3 || !is_prime(q) {
            return Err(Error::Domain(format!(
                "character modulus must be an odd prime, got {q}"
            )));
        }
        let generator = least_primitive_root(q);
        let mut exponent_table = vec![0u32; q as usize];
        let mut acc = 1u64;
        for e in 0..(q - 1) {
            exponent_table[acc as usize] = e as u32;
            acc = acc * generator % q;
        }
        debug_assert_eq!(acc, 1);
        Ok(DirichletCharacter {
            q,
            generator,
            exponent_table,
        })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Order of the character group = q - 1.
    #[inline]
    pub fn order(&self) -> u64 {
        self.q - 1
    }

    /// Exponent e(r) in [0, q-2] with chi(r) = e(e(r)/(q-1)), or None when
    /// q | n.
    #[inline]
    pub fn exponent(&self, n: u64) -> Option<u32> {
        let r = (n % self.q) as usize;
        if r == 0 {
            None
        } else {
            Some(self.exponent_table[r])
        }
    }

    /// chi(n) as a phase in turns (or Zero when q | n).
    pub fn chi_phase(&self, n: u64) -> ChiValue {
        match self.exponent(n) {
            None => ChiValue::Zero,
            Some(e) => ChiValue::Root(Phase::exact(e as f64 / (self.q - 1) as f64)),
        }
    }

    /// chi(n) for q = 3, where the character is real: +1, -1, or 0.
    pub fn chi_real(&self, n: u64) -> i8 {
        debug_assert_eq!(self.q, 3);
        match self.exponent(n) {
            None => 0,
            Some(0) => 1,
            Some(_) => -1,
        }
    }
}

/// Least g generating (Z/qZ)*, found by trial over the prime factors of q-1.
fn least_primitive_root(q: u64) -> u64 {
    let phi = q - 1;
    let factors = distinct_prime_factors(phi);
    'outer: for g in 2..q {
        for &f in &factors {
            if pow_mod(g, phi / f, q) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every prime modulus has a primitive root")
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}
