//! Base arithmetic: the working ring Z/p^N, exact rationals, Teichmueller
//! lifts, divisor sums and Dirichlet characters.

mod bernoulli;
mod character;
mod rational;

pub use bernoulli::{bernoulli, bernoulli_table};
pub use character::{kronecker_character, kronecker_symbol, DirichletCharacter};
pub use rational::{rational_p_valuation, reduce_to_ring, ExactRational};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Working parameters: the prime p, the precision exponent N (ring Z/p^N)
/// and the q-expansion truncation order M.
///
/// Ring elements are canonical residues in `0..p^N` stored as `u64`; p^N must
/// fit in 63 bits so products can be taken through `u128` without overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: u64,
    nprec: u32,
    m: usize,
    modulus: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeContext {
    pub fn new(p: u64, nprec: u32, m: usize) -> Result<Self> {
        if p < 5 || !is_prime(p) {
            return Err(Error::InvalidParameter(format!(
                "p must be a prime >= 5, got {p}"
            )));
        }
        if nprec < 1 {
            return Err(Error::InvalidParameter("precision exponent must be >= 1".into()));
        }
        if m < 1 {
            return Err(Error::InvalidParameter("truncation order must be >= 1".into()));
        }
        let mut modulus: u64 = 1;
        for _ in 0..nprec {
            modulus = modulus.checked_mul(p).ok_or_else(|| {
                Error::InvalidParameter(format!("p^N = {p}^{nprec} does not fit in 64 bits"))
            })?;
        }
        if modulus > (1u64 << 62) {
            return Err(Error::InvalidParameter(format!(
                "p^N = {p}^{nprec} too large for exact u64 arithmetic"
            )));
        }
        Ok(PrimeContext { p, nprec, m, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nprec(&self) -> u32 {
        self.nprec
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Same ring, different truncation order.
    pub fn with_m(&self, m: usize) -> Self {
        PrimeContext { m, ..*self }
    }

    /// Same prime and truncation, different precision exponent.
    pub fn with_nprec(&self, nprec: u32) -> Result<Self> {
        PrimeContext::new(self.p, nprec, self.m)
    }

    /// True when the two contexts describe the same ring Z/p^N (the
    /// truncation order may differ).
    pub fn same_ring(&self, other: &PrimeContext) -> bool {
        self.p == other.p && self.nprec == other.nprec
    }

    pub fn reduce_i64(&self, x: i64) -> u64 {
        let m = self.modulus as i128;
        (((x as i128) % m + m) % m) as u64
    }

    pub fn reduce_bigint(&self, x: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        let r = ((x % &m) + &m) % &m;
        r.to_u64().expect("residue fits u64")
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.modulus as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let m = self.modulus as u128;
        ((a as u128 + m - b as u128 % m) % m) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a % self.modulus
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64 % self.modulus;
        base %= self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    /// Power with possibly negative exponent; the base must be a unit when
    /// the exponent is negative.
    pub fn pow_i64(&self, base: u64, exp: i64) -> Result<u64> {
        if exp >= 0 {
            Ok(self.pow(base, exp as u64))
        } else {
            let inv = self.inv(base)?;
            Ok(self.pow(inv, (-exp) as u64))
        }
    }

    /// p-adic valuation of a residue, capped at N; val(0) = N.
    pub fn valuation(&self, a: u64) -> u32 {
        if a % self.modulus == 0 {
            return self.nprec;
        }
        let mut a = a % self.modulus;
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    /// Inverse of a unit via extended Euclid on (a, p^N).
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.modulus;
        if !self.is_unit(a) {
            return Err(Error::NotCoprime);
        }
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        let m = self.modulus as i128;
        Ok((((t0 % m) + m) % m) as u64)
    }

    /// Exact division a / b where v_p(b) <= v_p(a). Writes a = p^va u,
    /// b = p^vb w and returns p^(va-vb) u w^{-1}; the result is well defined
    /// modulo p^(N - vb).
    pub fn div_exact(&self, a: u64, b: u64) -> Result<u64> {
        if b % self.modulus == 0 {
            return Err(Error::NotCoprime);
        }
        let vb = self.valuation(b);
        if vb == 0 {
            return Ok(self.mul(a, self.inv(b)?));
        }
        let va = self.valuation(a);
        if va < vb {
            return Err(Error::NegativeValuation);
        }
        if a % self.modulus == 0 {
            return Ok(0);
        }
        let pv = self.p.pow(vb);
        let w = (b % self.modulus) / pv;
        Ok(self.mul(a / pv, self.inv(w)?))
    }

    /// Teichmueller lift: the unique (p-1)-st root of unity congruent to x
    /// mod p, computed by iterating y -> y^p to its fixed point.
    pub fn teichmuller(&self, x: u64) -> Result<u64> {
        if x % self.p == 0 {
            return Err(Error::NotCoprime);
        }
        let mut y = x % self.modulus;
        for _ in 0..=self.nprec {
            let next = self.pow(y, self.p);
            if next == y {
                return Ok(y);
            }
            y = next;
        }
        // Converges one digit per step, so N iterations always suffice.
        unreachable!("Teichmueller iteration failed to stabilize");
    }
}

/// Sum of the t-th powers of the positive divisors of n, as a big integer.
pub fn sigma_t(n: u64, t: u32) -> BigInt {
    assert!(n >= 1, "sigma_t requires n >= 1");
    let mut total = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += BigInt::from(d).pow(t);
            let e = n / d;
            if e != d {
                total += BigInt::from(e).pow(t);
            }
        }
        d += 1;
    }
    total
}

/// Divisor-power sum reduced into the working ring.
pub fn sigma_t_mod(n: u64, t: u32, ctx: &PrimeContext) -> u64 {
    let mut total = 0u64;
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total = ctx.add(total, ctx.pow(d % ctx.modulus(), t as u64));
            let e = n / d;
            if e != d {
                total = ctx.add(total, ctx.pow(e % ctx.modulus(), t as u64));
            }
        }
        d += 1;
    }
    total
}

/// p-adic valuation of a nonzero big integer.
pub fn bigint_p_valuation(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32) -> PrimeContext {
        PrimeContext::new(p, n, 10).unwrap()
    }

    #[test]
    fn context_rejects_bad_parameters() {
        assert!(PrimeContext::new(4, 2, 10).is_err());
        assert!(PrimeContext::new(3, 2, 10).is_err());
        assert!(PrimeContext::new(5, 0, 10).is_err());
        assert!(PrimeContext::new(5, 2, 0).is_err());
    }

    #[test]
    fn ring_ops() {
        let c = ctx(5, 2);
        assert_eq!(c.modulus(), 25);
        assert_eq!(c.add(20, 10), 5);
        assert_eq!(c.sub(3, 10), 18);
        assert_eq!(c.mul(7, 8), 6);
        assert_eq!(c.pow(2, 10), 1024 % 25);
        assert_eq!(c.inv(7).unwrap(), 18); // 7*18 = 126 = 5*25+1
        assert_eq!(c.valuation(0), 2);
        assert_eq!(c.valuation(15), 1);
        assert_eq!(c.valuation(7), 0);
    }

    #[test]
    fn div_exact_tracks_valuation() {
        let c = ctx(5, 3);
        // 50 / 10 = 5 exactly
        assert_eq!(c.div_exact(50, 10).unwrap(), 5);
        assert_eq!(c.div_exact(0, 10).unwrap(), 0);
        assert_eq!(c.div_exact(3, 10), Err(Error::NegativeValuation));
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_t(1, 7), BigInt::from(1));
        assert_eq!(sigma_t(2, 3), BigInt::from(9));
        assert_eq!(sigma_t(6, 1), BigInt::from(12));
    }

    #[test]
    fn teichmuller_examples() {
        let c = ctx(5, 2);
        assert_eq!(c.teichmuller(1).unwrap(), 1);
        assert_eq!(c.teichmuller(4).unwrap(), 24); // -1 is already a root of unity
        assert_eq!(c.teichmuller(2).unwrap(), 7); // 7^4 = 2401 = 96*25 + 1
        assert_eq!(c.teichmuller(5), Err(Error::NotCoprime));
    }

    #[test]
    fn teichmuller_is_root_of_unity_and_congruent() {
        for p in [5u64, 7, 11, 13] {
            let c = PrimeContext::new(p, 4, 5).unwrap();
            for x in 1..p {
                let w = c.teichmuller(x).unwrap();
                assert_eq!(c.pow(w, p - 1), 1);
                assert_eq!(w % p, x % p);
            }
        }
    }
}
