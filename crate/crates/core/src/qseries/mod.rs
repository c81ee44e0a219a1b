//! Truncated q-expansions over Z/p^N and the operators acting on them.
//!
//! Every operation returns the *provable* truncation of its output (U_p and
//! T_q divide it by p resp. q); consumers must check that the truncation is
//! sufficient instead of silently reading zeros.

mod generators;

pub use generators::{eisenstein_e, eisenstein_weight_char, theta_series};

use crate::arith::{DirichletCharacter, PrimeContext};
use crate::error::{Error, Result};
use num_integer::Integer;

/// Level / weight / character tag carried by a q-expansion. The level is the
/// tame level (coprime to p); p-structure is implicit in the operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meta {
    pub level: u64,
    pub weight: i64,
    pub character: DirichletCharacter,
}

/// A q-series a_0 + a_1 q + ... + a_trunc q^trunc with coefficients in
/// Z/p^N. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    ctx: PrimeContext,
    coeffs: Vec<u64>,
    meta: Option<Meta>,
}

impl QExpansion {
    pub fn new(ctx: PrimeContext, mut coeffs: Vec<u64>, meta: Option<Meta>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("q-expansion needs at least a_0".into()));
        }
        if coeffs.len() > ctx.m() + 1 {
            coeffs.truncate(ctx.m() + 1);
        }
        for c in coeffs.iter_mut() {
            *c %= ctx.modulus();
        }
        if let Some(m) = &meta {
            if m.level == 0 || m.level.gcd(&ctx.p()) != 1 {
                return Err(Error::InvalidParameter(format!(
                    "level {} must be >= 1 and coprime to p = {}",
                    m.level,
                    ctx.p()
                )));
            }
        }
        Ok(QExpansion { ctx, coeffs, meta })
    }

    pub fn zero(ctx: PrimeContext, trunc: usize) -> Self {
        QExpansion { ctx, coeffs: vec![0; trunc + 1], meta: None }
    }

    pub fn one(ctx: PrimeContext, trunc: usize) -> Self {
        let mut coeffs = vec![0; trunc + 1];
        coeffs[0] = 1;
        QExpansion { ctx, coeffs, meta: None }
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    /// Effective truncation order; coefficients a_0..a_trunc are known.
    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> u64 {
        self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn meta(&self) -> Option<&Meta> {
        self.meta.as_ref()
    }

    pub fn with_meta(mut self, meta: Option<Meta>) -> Self {
        self.meta = meta;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Shorten to `trunc` coefficients after a_0.
    pub fn truncate(&self, trunc: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(trunc + 1);
        out
    }

    /// Coefficientwise equality on the overlap of the two truncations.
    pub fn agrees_with(&self, other: &QExpansion) -> bool {
        let n = self.coeffs.len().min(other.coeffs.len());
        self.ctx.same_ring(&other.ctx) && self.coeffs[..n] == other.coeffs[..n]
    }

    fn check_ctx(&self, other: &QExpansion) -> Result<()> {
        if self.ctx.same_ring(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn merged_meta(&self, other: &QExpansion) -> Option<Meta> {
        match (&self.meta, &other.meta) {
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        self.check_ctx(other)?;
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.ctx.add(self.coeffs[i], other.coeffs[i]))
            .collect();
        Ok(QExpansion { ctx: self.ctx, coeffs, meta: self.merged_meta(other) })
    }

    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        self.check_ctx(other)?;
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.ctx.sub(self.coeffs[i], other.coeffs[i]))
            .collect();
        Ok(QExpansion { ctx: self.ctx, coeffs, meta: self.merged_meta(other) })
    }

    pub fn scale(&self, c: u64) -> QExpansion {
        let coeffs = self.coeffs.iter().map(|&a| self.ctx.mul(c, a)).collect();
        QExpansion { ctx: self.ctx, coeffs, meta: self.meta.clone() }
    }

    /// Cauchy product. Weights add and characters multiply when both sides
    /// carry metadata; the level of the product is the lcm.
    pub fn mul(&self, other: &QExpansion) -> Result<QExpansion> {
        self.check_ctx(other)?;
        let n = self.coeffs.len().min(other.coeffs.len());
        let ctx = self.ctx;
        let modulus = ctx.modulus() as u128;
        let mut coeffs = vec![0u64; n];
        for (i, &a) in self.coeffs.iter().enumerate().take(n) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n - i) {
                if b == 0 {
                    continue;
                }
                let idx = i + j;
                coeffs[idx] =
                    ((coeffs[idx] as u128 + a as u128 * b as u128 % modulus) % modulus) as u64;
            }
        }
        let meta = match (&self.meta, &other.meta) {
            (Some(a), Some(b)) => Some(Meta {
                level: a.level.lcm(&b.level),
                weight: a.weight + b.weight,
                character: a.character.product(&b.character)?,
            }),
            _ => None,
        };
        Ok(QExpansion { ctx: self.ctx, coeffs, meta })
    }

    /// Multiplicative inverse; requires a unit constant term.
    pub fn invert(&self) -> Result<QExpansion> {
        if !self.ctx.is_unit(self.coeffs[0]) {
            return Err(Error::NonUnitConstantTerm);
        }
        let ctx = self.ctx;
        let inv0 = ctx.inv(self.coeffs[0])?;
        let n = self.coeffs.len();
        let mut out = vec![0u64; n];
        out[0] = inv0;
        for k in 1..n {
            let mut acc = 0u64;
            for i in 1..=k {
                acc = ctx.add(acc, ctx.mul(self.coeffs[i], out[k - i]));
            }
            out[k] = ctx.neg(ctx.mul(inv0, acc));
        }
        let meta = self.meta.as_ref().map(|m| Meta {
            level: m.level,
            weight: -m.weight,
            character: m.character.clone(), // quadratic/trivial characters are self-inverse
        });
        Ok(QExpansion { ctx: self.ctx, coeffs: out, meta })
    }

    /// U_p: b_n = a_{np}. The provable truncation drops to floor(trunc / p).
    pub fn u_p(&self) -> QExpansion {
        let p = self.ctx.p() as usize;
        let out_trunc = self.trunc() / p;
        let coeffs = (0..=out_trunc).map(|n| self.coeffs[n * p]).collect();
        QExpansion { ctx: self.ctx, coeffs, meta: self.meta.clone() }
    }

    /// V: q -> q^p, so b_{np} = a_n and all other coefficients vanish.
    pub fn v_op(&self) -> QExpansion {
        self.v_t(self.ctx.p())
    }

    /// General degeneracy map f(q) -> f(q^t).
    pub fn v_t(&self, t: u64) -> QExpansion {
        let t = t as usize;
        assert!(t >= 1);
        let out_trunc = (self.trunc().saturating_mul(t)).min(self.ctx.m());
        let mut coeffs = vec![0u64; out_trunc + 1];
        for (n, &a) in self.coeffs.iter().enumerate() {
            if n * t <= out_trunc {
                coeffs[n * t] = a;
            }
        }
        QExpansion { ctx: self.ctx, coeffs, meta: self.meta.clone() }
    }

    /// Hecke operator T_q for a prime q not dividing level * p, acting on a
    /// character eigenspace: b_n = a_{nq} + chi(q) q^{k-1} a_{n/q}.
    pub fn t_q(&self, q: u64) -> Result<QExpansion> {
        let meta = self.meta.as_ref().ok_or(Error::MissingMetadata)?;
        if !is_prime_u64(q) || q == self.ctx.p() || meta.level % q == 0 {
            return Err(Error::BadPrime(q));
        }
        let ctx = self.ctx;
        let sq = ctx.mul(
            meta.character.eval(q),
            ctx.pow_i64(q % ctx.modulus(), meta.weight - 1)?,
        );
        let qs = q as usize;
        let out_trunc = self.trunc() / qs;
        let coeffs = (0..=out_trunc)
            .map(|n| {
                let mut b = self.coeffs[n * qs];
                if n % qs == 0 {
                    b = ctx.add(b, ctx.mul(sq, self.coeffs[n / qs]));
                }
                b
            })
            .collect();
        Ok(QExpansion { ctx: self.ctx, coeffs, meta: self.meta.clone() })
    }

    /// U_q for a prime q dividing the level: b_n = a_{nq}.
    pub fn u_q(&self, q: u64) -> Result<QExpansion> {
        let meta = self.meta.as_ref().ok_or(Error::MissingMetadata)?;
        if !is_prime_u64(q) || meta.level % q != 0 {
            return Err(Error::BadPrime(q));
        }
        let qs = q as usize;
        let out_trunc = self.trunc() / qs;
        let coeffs = (0..=out_trunc).map(|n| self.coeffs[n * qs]).collect();
        Ok(QExpansion { ctx: self.ctx, coeffs, meta: self.meta.clone() })
    }
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::kronecker_character;

    fn ctx() -> PrimeContext {
        PrimeContext::new(5, 3, 60).unwrap()
    }

    fn series(c: &PrimeContext, coeffs: &[u64]) -> QExpansion {
        QExpansion::new(*c, coeffs.to_vec(), None).unwrap()
    }

    #[test]
    fn add_scale_axioms() {
        let c = ctx();
        let f = series(&c, &[1, 2, 3, 4]);
        let zero = QExpansion::zero(c, 3);
        assert_eq!(f.add(&zero).unwrap(), f);
        assert_eq!(f.scale(1), f);
        assert!(f.add(&f.scale(c.neg(1))).unwrap().is_zero());
    }

    #[test]
    fn context_mismatch_detected() {
        let c1 = ctx();
        let c2 = PrimeContext::new(7, 3, 60).unwrap();
        let f = series(&c1, &[1, 2]);
        let g = series(&c2, &[1, 2]);
        assert_eq!(f.add(&g), Err(Error::ContextMismatch));
    }

    #[test]
    fn mul_small_identities() {
        let c = ctx();
        let f = series(&c, &[3, 1, 4, 1, 5]);
        let one = QExpansion::one(c, 4);
        assert_eq!(f.mul(&one).unwrap(), f);
        let q = series(&c, &[0, 1, 0, 0]);
        let q2 = q.mul(&q).unwrap();
        assert_eq!(q2.coeffs(), &[0, 0, 1, 0]);
        let a = series(&c, &[1, 1, 0]);
        let b = series(&c, &[1, c.neg(1), 0]);
        assert_eq!(a.mul(&b).unwrap().coeffs(), &[1, 0, c.neg(1)]);
    }

    #[test]
    fn invert_geometric_series() {
        let c = ctx();
        let f = series(&c, &[1, c.neg(1), 0, 0, 0]);
        let inv = f.invert().unwrap();
        assert_eq!(inv.coeffs(), &[1, 1, 1, 1, 1]);
        assert_eq!(series(&c, &[1, 0, 0]).invert().unwrap().coeffs(), &[1, 0, 0]);
        let g = series(&c, &[5, 1]);
        assert_eq!(g.invert(), Err(Error::NonUnitConstantTerm));
        let prod = f.invert().unwrap().mul(&f).unwrap();
        assert_eq!(prod, QExpansion::one(c, 4));
    }

    #[test]
    fn up_and_v_examples() {
        let c = ctx();
        let f = QExpansion::new(c, (0..=20).map(|n| n as u64).collect(), None).unwrap();
        let uf = f.u_p();
        assert_eq!(uf.trunc(), 4);
        for n in 0..=4u64 {
            assert_eq!(uf.coeff(n as usize), 5 * n % c.modulus());
        }
        let q = series(&c, &[0, 1]);
        let vq = q.v_op();
        assert_eq!(vq.coeff(5), 1);
        assert!(vq.coeffs().iter().enumerate().all(|(n, &a)| a == u64::from(n == 5)));
        // section identity
        let fv = f.v_op().u_p();
        assert!(fv.agrees_with(&f));
        // constants pass through U_p
        let k = series(&c, &[7]);
        assert_eq!(k.u_p().coeff(0), 7);
    }

    #[test]
    fn projection_formula_on_fixed_input() {
        let c = ctx();
        let f = series(&c, &[2, 7, 1, 9, 4, 3, 8, 1, 2, 6, 5, 1, 0, 3, 2, 9, 9, 1, 4, 4, 7]);
        let g = series(&c, &[1, 3, 2, 4]);
        let lhs = f.mul(&g.v_op()).unwrap().u_p();
        let rhs = f.u_p().mul(&g).unwrap();
        assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn t_q_direct_formula() {
        let c = ctx();
        // all a_n = 1, weight 1, trivial character (chi(2) = 1)
        let meta = Meta { level: 1, weight: 1, character: DirichletCharacter::trivial(c) };
        let f = QExpansion::new(c, vec![0, 1, 1, 1, 1, 1, 1, 1, 1], Some(meta)).unwrap();
        let tf = f.t_q(2).unwrap();
        assert_eq!(tf.coeff(1), 1); // a_2
        assert_eq!(tf.coeff(2), 2); // a_4 + a_1
        assert_eq!(f.t_q(5), Err(Error::BadPrime(5)));
    }

    #[test]
    fn u_q_requires_divisor_of_level() {
        let c = PrimeContext::new(13, 2, 30).unwrap();
        let chi = kronecker_character(-23, &c).unwrap();
        let meta = Meta { level: 23, weight: 1, character: chi };
        let f = QExpansion::new(c, (0..=30).map(|n| n as u64).collect(), Some(meta)).unwrap();
        let uf = f.u_q(23).unwrap();
        assert_eq!(uf.coeff(1), 23 % c.modulus());
        assert_eq!(f.u_q(3), Err(Error::BadPrime(3)));
    }

    #[test]
    fn metadata_rules() {
        let c = ctx();
        let chi = DirichletCharacter::trivial(c);
        let m1 = Meta { level: 11, weight: 2, character: chi.clone() };
        let m2 = Meta { level: 11, weight: 4, character: chi };
        let f = QExpansion::new(c, vec![1, 2], Some(m1.clone())).unwrap();
        let g = QExpansion::new(c, vec![1, 3], Some(m2)).unwrap();
        // different weights: add drops metadata, mul adds weights
        assert!(f.add(&g).unwrap().meta().is_none());
        assert_eq!(f.mul(&g).unwrap().meta().unwrap().weight, 6);
        let h = QExpansion::new(c, vec![5, 1], Some(m1.clone())).unwrap();
        assert_eq!(f.add(&h).unwrap().meta(), Some(&m1));
    }

    #[test]
    fn level_must_be_coprime_to_p() {
        let c = ctx();
        let meta = Meta { level: 10, weight: 2, character: DirichletCharacter::trivial(c) };
        assert!(QExpansion::new(c, vec![0, 1], Some(meta)).is_err());
    }
}
