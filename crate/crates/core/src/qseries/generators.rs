//! Generators: the weight p-1 Eisenstein series E, Eisenstein series with
//! character, and theta series of positive-definite binary quadratic forms.

use super::{Meta, QExpansion};
use crate::arith::{
    bernoulli, kronecker_character, rational_p_valuation, reduce_to_ring, sigma_t_mod,
    DirichletCharacter, ExactRational, PrimeContext,
};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// The Eisenstein series E of weight p-1 and level 1 with q-expansion
/// 1 - (2(p-1)/B_{p-1}) sum sigma_{p-2}(n) q^n and constant term 1.
/// Its non-constant coefficients are all divisible by p, so E = 1 mod p.
pub fn eisenstein_e(ctx: &PrimeContext) -> QExpansion {
    let p = ctx.p();
    let b = bernoulli(p as u32 - 1);
    let c = ExactRational::new(BigInt::from(2 * (p as i64 - 1)), BigInt::one()) / b;
    debug_assert_eq!(rational_p_valuation(&c, p), 1);
    let scale = ctx.neg(reduce_to_ring(&c, ctx).expect("2(p-1)/B_{p-1} lies in pZ_p"));
    let mut coeffs = Vec::with_capacity(ctx.m() + 1);
    coeffs.push(1u64);
    for n in 1..=ctx.m() as u64 {
        coeffs.push(ctx.mul(scale, sigma_t_mod(n, p as u32 - 2, ctx)));
    }
    let meta = Meta {
        level: 1,
        weight: p as i64 - 1,
        character: DirichletCharacter::trivial(*ctx),
    };
    QExpansion::new(*ctx, coeffs, Some(meta)).expect("valid Eisenstein metadata")
}

/// Bernoulli polynomial B_k(x) evaluated at an exact rational.
fn bernoulli_polynomial(k: u32, x: &ExactRational) -> ExactRational {
    let table = crate::arith::bernoulli_table(k);
    let mut acc = ExactRational::zero();
    let mut binom = BigInt::one();
    // sum_j C(k, j) B_j x^{k-j}
    let mut xpow = vec![ExactRational::one()];
    for _ in 0..k {
        xpow.push(xpow.last().unwrap() * x);
    }
    for (j, b) in table.iter().enumerate().take(k as usize + 1) {
        acc += b * ExactRational::from(binom.clone()) * &xpow[k as usize - j];
        binom = binom * BigInt::from(k as u64 - j as u64) / BigInt::from(j as u64 + 1);
    }
    acc
}

/// Generalized Bernoulli number B_{k,chi} for a character with rational
/// (+-1) values: f^{k-1} sum_a chi(a) B_k(a/f).
fn generalized_bernoulli(k: u32, chi: &DirichletCharacter) -> Result<ExactRational> {
    let f = chi.modulus();
    let mut acc = ExactRational::zero();
    for a in 1..=f {
        let v = chi.rational_value(a % f).ok_or_else(|| {
            Error::InvalidParameter(
                "constant term for characters of order > 2 must be supplied by the caller".into(),
            )
        })?;
        if v == 0 {
            continue;
        }
        let x = ExactRational::new(BigInt::from(a), BigInt::from(f));
        let term = bernoulli_polynomial(k, &x);
        acc += if v == 1 { term } else { -term };
    }
    let fk = ExactRational::from(BigInt::from(f).pow(k - 1));
    Ok(fk * acc)
}

/// Eisenstein series E_k^{psi,phi}: a_n = sum_{d|n} psi(n/d) phi(d) d^{k-1}
/// for n >= 1. The constant term is `c0` when supplied; otherwise it is 0
/// for nontrivial psi and -B_{k,phi}/(2k) for trivial psi, reduced into the
/// ring (failing with NegativeValuation when that L-value is not p-integral).
pub fn eisenstein_weight_char(
    k: i64,
    psi: &DirichletCharacter,
    phi: &DirichletCharacter,
    c0: Option<u64>,
    ctx: &PrimeContext,
) -> Result<QExpansion> {
    if k < 1 {
        return Err(Error::InvalidParameter("Eisenstein weight must be >= 1".into()));
    }
    let product = psi.product(phi)?;
    let even_weight = k % 2 == 0;
    if product.is_even() != even_weight {
        return Err(Error::ParityViolation);
    }
    let constant = match c0 {
        Some(c) => c,
        None => {
            if psi.conductor() > 1 {
                0
            } else {
                let b = generalized_bernoulli(k as u32, phi)?;
                if b.is_zero() {
                    0
                } else {
                    let val = -b / ExactRational::from(BigInt::from(2 * k));
                    reduce_to_ring(&val, ctx)?
                }
            }
        }
    };
    let mut coeffs = Vec::with_capacity(ctx.m() + 1);
    coeffs.push(constant);
    for n in 1..=ctx.m() as u64 {
        let mut acc = 0u64;
        let mut d = 1u64;
        while d * d <= n {
            if n % d == 0 {
                let e = n / d;
                // divisor pair (d, e)
                acc = ctx.add(
                    acc,
                    ctx.mul(
                        ctx.mul(psi.eval(e % psi.modulus().max(1)), phi.eval(d)),
                        ctx.pow(d % ctx.modulus(), k as u64 - 1),
                    ),
                );
                if d != e {
                    acc = ctx.add(
                        acc,
                        ctx.mul(
                            ctx.mul(psi.eval(d), phi.eval(e)),
                            ctx.pow(e % ctx.modulus(), k as u64 - 1),
                        ),
                    );
                }
            }
            d += 1;
        }
        coeffs.push(acc);
    }
    let level = psi.conductor() * phi.conductor();
    let meta = Meta { level: level.max(1), weight: k, character: product };
    QExpansion::new(*ctx, coeffs, Some(meta))
}

/// Theta series of the positive-definite form a x^2 + b xy + c y^2: the
/// coefficient of q^n counts lattice points with Q(x, y) = n, by exhaustive
/// enumeration over the box |x| <= sqrt(4cM/|D|), |y| <= sqrt(4aM/|D|).
pub fn theta_series(a: i64, b: i64, c: i64, ctx: &PrimeContext) -> Result<QExpansion> {
    let disc = b * b - 4 * a * c;
    if a <= 0 || disc >= 0 {
        return Err(Error::NotPositiveDefinite);
    }
    let m = ctx.m() as i64;
    let d_abs = -disc;
    let xb = int_sqrt((4 * c * m) / d_abs) + 1;
    let yb = int_sqrt((4 * a * m) / d_abs) + 1;
    let mut counts = vec![0u64; ctx.m() + 1];
    for x in -xb..=xb {
        for y in -yb..=yb {
            let v = a * x * x + b * x * y + c * y * y;
            if (0..=m).contains(&v) {
                counts[v as usize] += 1;
            }
        }
    }
    let coeffs = counts.into_iter().map(|n| n % ctx.modulus()).collect();
    let character = kronecker_character(disc, ctx)?;
    let meta = Meta { level: d_abs as u64, weight: 1, character };
    QExpansion::new(*ctx, coeffs, Some(meta))
}

fn int_sqrt(n: i64) -> i64 {
    if n < 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eisenstein_e_p5_matches_bernoulli_oracle() {
        // -2*4/B_4 = -8/(-1/30) = 240
        let ctx = PrimeContext::new(5, 4, 20).unwrap();
        let e = eisenstein_e(&ctx);
        assert_eq!(e.coeff(0), 1);
        assert_eq!(e.coeff(1), 240);
        for n in 1..=20 {
            assert_eq!(e.coeff(n) % 5, 0, "a_{n} of E should be divisible by 5");
        }
        // a_2 = 240 * sigma_3(2) = 240 * 9
        assert_eq!(e.coeff(2), ctx.mul(240, 9));
        assert_eq!(e.meta().unwrap().weight, 4);
    }

    #[test]
    fn eisenstein_e_congruent_to_one_mod_p() {
        for p in [5u64, 7, 11, 13] {
            let ctx = PrimeContext::new(p, 3, 50).unwrap();
            let e = eisenstein_e(&ctx);
            assert_eq!(e.coeff(0), 1);
            for n in 1..=50 {
                assert_eq!(e.coeff(n) % p, 0, "p = {p}, n = {n}");
            }
        }
    }

    #[test]
    fn invert_e_is_one_mod_p() {
        let ctx = PrimeContext::new(5, 3, 30).unwrap();
        let e = eisenstein_e(&ctx);
        let inv = e.invert().unwrap();
        assert_eq!(inv.coeff(0), 1);
        for n in 1..=30 {
            assert_eq!(inv.coeff(n) % 5, 0);
        }
        let prod = e.mul(&inv).unwrap();
        assert_eq!(prod, QExpansion::one(ctx, 30).with_meta(prod.meta().cloned()));
    }

    #[test]
    fn eisenstein_weight_char_normalization() {
        let ctx = PrimeContext::new(13, 3, 12).unwrap();
        let triv = DirichletCharacter::trivial(ctx);
        // weight 4, trivial characters: a_1 = 1, a_n = sigma_3(n), c0 = -B_4/8 = 1/240
        let e4 = eisenstein_weight_char(4, &triv, &triv, None, &ctx).unwrap();
        assert_eq!(e4.coeff(1), 1);
        assert_eq!(e4.coeff(6), crate::arith::sigma_t_mod(6, 3, &ctx));
        let inv240 = ctx.inv(240 % ctx.modulus()).unwrap();
        assert_eq!(e4.coeff(0), inv240);
        // parity violation: odd weight with even character
        assert_eq!(
            eisenstein_weight_char(3, &triv, &triv, None, &ctx),
            Err(Error::ParityViolation)
        );
    }

    #[test]
    fn eisenstein_constant_not_integral_is_rejected() {
        // p = 5, k = 4: c0 = 1/240 has valuation -1 at 5.
        let ctx = PrimeContext::new(5, 3, 10).unwrap();
        let triv = DirichletCharacter::trivial(ctx);
        assert_eq!(
            eisenstein_weight_char(4, &triv, &triv, None, &ctx),
            Err(Error::NegativeValuation)
        );
        // but a caller-supplied constant term works
        let e = eisenstein_weight_char(4, &triv, &triv, Some(0), &ctx).unwrap();
        assert_eq!(e.coeff(0), 0);
    }

    #[test]
    fn weight_one_eisenstein_level_23() {
        // psi trivial, phi = kronecker(-23): c0 = -B_{1,phi}/2 = 3/2.
        let ctx = PrimeContext::new(13, 4, 40).unwrap();
        let triv = DirichletCharacter::trivial(ctx);
        let chi = kronecker_character(-23, &ctx).unwrap();
        let e1 = eisenstein_weight_char(1, &triv, &chi, None, &ctx).unwrap();
        let three_half = reduce_to_ring(
            &ExactRational::new(BigInt::from(3), BigInt::from(2)),
            &ctx,
        )
        .unwrap();
        assert_eq!(e1.coeff(0), three_half);
        assert_eq!(e1.coeff(1), 1);
        // a_2 = chi(1) + chi(2) = 2 since 2 is a QR mod 23
        assert_eq!(e1.coeff(2), 2);
    }

    #[test]
    fn theta_enumeration_oracle() {
        let ctx = PrimeContext::new(13, 4, 30).unwrap();
        // x^2 + y^2: 1, 4, 4, 0, 4, 8, ...
        let t = theta_series(1, 0, 1, &ctx).unwrap();
        assert_eq!(t.coeff(0), 1);
        assert_eq!(t.coeff(1), 4);
        assert_eq!(t.coeff(2), 4);
        assert_eq!(t.coeff(3), 0);
        assert_eq!(t.coeff(5), 8);
        // x^2 + xy + 6y^2 at level 23
        let t1 = theta_series(1, 1, 6, &ctx).unwrap();
        assert_eq!(t1.coeff(0), 1);
        assert_eq!(t1.coeff(1), 2);
        assert_eq!(t1.meta().unwrap().level, 23);
        assert_eq!(theta_series(1, 5, 1, &ctx), Err(Error::NotPositiveDefinite));
        assert_eq!(theta_series(-1, 0, -1, &ctx), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn theta_23_representation_counts() {
        // a_23(x^2+xy+6y^2) = 2 via (-1, 2) and (1, -2); the second form
        // represents 13 as (2, 1) and (-2, -1).
        let ctx = PrimeContext::new(13, 4, 30).unwrap();
        let t1 = theta_series(1, 1, 6, &ctx).unwrap();
        let t2 = theta_series(2, 1, 3, &ctx).unwrap();
        assert_eq!(t1.coeff(23), 2);
        assert_eq!(t2.coeff(23), 0);
        assert_eq!(t1.coeff(13), 0);
        assert_eq!(t2.coeff(13), 2);
    }
}
