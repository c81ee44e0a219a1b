//! Exact rationals and their reduction into Z/p^N.

use super::{bigint_p_valuation, PrimeContext};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator (num-rational maintains both invariants).
pub type ExactRational = BigRational;

/// p-adic valuation of a nonzero rational: v(num) - v(den).
pub fn rational_p_valuation(r: &ExactRational, p: u64) -> i64 {
    assert!(!r.is_zero());
    bigint_p_valuation(r.numer(), p) as i64 - bigint_p_valuation(r.denom(), p) as i64
}

/// Write r = p^v (a/b) with a, b coprime to p. For v >= 0 returns
/// p^v a b^{-1} mod p^N; for v < 0 the quantity is not in Z_p and the call
/// fails with `NegativeValuation`.
pub fn reduce_to_ring(r: &ExactRational, ctx: &PrimeContext) -> Result<u64> {
    if r.is_zero() {
        return Ok(0);
    }
    let v = rational_p_valuation(r, ctx.p());
    if v < 0 {
        return Err(Error::NegativeValuation);
    }
    let p = BigInt::from(ctx.p());
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    while (&num % &p).is_zero() {
        num /= &p;
    }
    while (&den % &p).is_zero() {
        den /= &p;
    }
    let a = ctx.reduce_bigint(&num);
    let b = ctx.reduce_bigint(&den);
    let unit = ctx.mul(a, ctx.inv(b)?);
    Ok(ctx.mul(ctx.pow(ctx.p(), v as u64), unit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        let ctx = PrimeContext::new(5, 2, 10).unwrap();
        let r = ExactRational::new(BigInt::from(3), BigInt::from(2));
        // 2 * 14 = 28 = 3 mod 25
        assert_eq!(reduce_to_ring(&r, &ctx).unwrap(), 14);
        let one = ExactRational::new(BigInt::from(1), BigInt::from(1));
        assert_eq!(reduce_to_ring(&one, &ctx).unwrap(), 1);
        let fifth = ExactRational::new(BigInt::from(1), BigInt::from(5));
        assert_eq!(reduce_to_ring(&fifth, &ctx), Err(Error::NegativeValuation));
    }

    #[test]
    fn reduce_respects_valuation() {
        let ctx = PrimeContext::new(5, 3, 10).unwrap();
        let r = ExactRational::new(BigInt::from(50), BigInt::from(3));
        let x = reduce_to_ring(&r, &ctx).unwrap();
        assert_eq!(ctx.valuation(x), 2);
        // 3x = 50 mod 125
        assert_eq!(ctx.mul(3, x), 50);
    }
}
