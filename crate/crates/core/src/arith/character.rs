//! Dirichlet characters with values embedded in Z/p^N.
//!
//! Only characters of order dividing p-1 are representable: their values are
//! roots of unity that live in Z_p via the Teichmueller lift. That covers
//! trivial and quadratic nebentypus, which is all the desk-scale targets use.

use super::PrimeContext;
use crate::error::{Error, Result};
use num_integer::Integer;

/// Kronecker symbol (a|n), extending the Jacobi symbol to all integers.
pub fn kronecker_symbol(a: i64, n: i64) -> i64 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i64;
    let mut twos = 0u32;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos % 2 == 1 {
        match ((a % 8) + 8) % 8 {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    a = ((a % n) + n) % n;
    while a != 0 {
        let mut v = 0u32;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    fn squarefree(mut n: u64) -> bool {
        let mut f = 2u64;
        while f * f <= n {
            if n % (f * f) == 0 {
                return false;
            }
            while n % f == 0 {
                n /= f;
            }
            f += 1;
        }
        true
    }
    if d == 0 {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        return squarefree(d.unsigned_abs());
    }
    if d % 4 == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        return (r == 2 || r == 3) && squarefree(m.unsigned_abs());
    }
    false
}

/// A Dirichlet character mod `modulus` with values in Z/p^N; zero on
/// residues not coprime to the modulus.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    ctx: PrimeContext,
    modulus: u64,
    order: u32,
    values: Vec<u64>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_ring(&other.ctx) && self.modulus == other.modulus && self.values == other.values
    }
}
impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    pub fn trivial(ctx: PrimeContext) -> Self {
        DirichletCharacter { ctx, modulus: 1, order: 1, values: vec![1] }
    }

    /// Build from a full value table indexed by residues 0..modulus.
    /// Verifies chi(1) = 1, multiplicativity, vanishing off the units, and
    /// that every value is a root of unity of order dividing p-1.
    pub fn from_table(ctx: PrimeContext, modulus: u64, values: Vec<u64>) -> Result<Self> {
        if modulus == 0 || values.len() != modulus as usize {
            return Err(Error::InvalidParameter(format!(
                "character table must have exactly {} entries",
                modulus
            )));
        }
        if modulus.gcd(&ctx.p()) != 1 {
            return Err(Error::ModulusSharesFactorWithP);
        }
        let values: Vec<u64> = values.into_iter().map(|v| v % ctx.modulus()).collect();
        if modulus > 1 && values[1 % modulus as usize] != 1 {
            return Err(Error::InvalidParameter("character must satisfy chi(1) = 1".into()));
        }
        for a in 0..modulus {
            let coprime = a.gcd(&modulus) == 1;
            let v = values[a as usize];
            if coprime {
                if ctx.pow(v, (ctx.p() - 1) as u64) != 1 {
                    return Err(Error::InvalidParameter(
                        "character value is not a root of unity of order dividing p-1".into(),
                    ));
                }
            } else if v != 0 {
                return Err(Error::InvalidParameter(
                    "character must vanish on residues sharing a factor with the modulus".into(),
                ));
            }
        }
        for a in 0..modulus {
            for b in a..modulus {
                if a.gcd(&modulus) == 1 && b.gcd(&modulus) == 1 {
                    let ab = (a as u128 * b as u128 % modulus as u128) as u64;
                    if ctx.mul(values[a as usize], values[b as usize]) != values[ab as usize] {
                        return Err(Error::InvalidParameter(
                            "character table is not multiplicative".into(),
                        ));
                    }
                }
            }
        }
        let order = Self::compute_order(&ctx, modulus, &values);
        Ok(DirichletCharacter { ctx, modulus, order, values })
    }

    fn compute_order(ctx: &PrimeContext, modulus: u64, values: &[u64]) -> u32 {
        let mut e = 1u32;
        loop {
            let ok = (0..modulus)
                .filter(|a| a.gcd(&modulus) == 1)
                .all(|a| ctx.pow(values[a as usize], e as u64) == 1);
            if ok {
                return e;
            }
            e += 1;
        }
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// chi(x) as a ring element; 0 when gcd(x, modulus) > 1.
    pub fn eval(&self, x: u64) -> u64 {
        self.values[(x % self.modulus) as usize]
    }

    /// chi(-1); the character is even when this is 1 and odd when it is -1.
    pub fn parity(&self) -> u64 {
        self.eval(self.modulus.wrapping_sub(1) % self.modulus.max(1))
    }

    pub fn is_even(&self) -> bool {
        self.modulus == 1 || self.parity() == 1
    }

    /// Rational value at x when the character is quadratic or trivial:
    /// Some(0), Some(1) or Some(-1); None when the value is irrational.
    pub fn rational_value(&self, x: u64) -> Option<i64> {
        let v = self.eval(x);
        if v == 0 {
            Some(0)
        } else if v == 1 {
            Some(1)
        } else if v == self.ctx.modulus() - 1 {
            Some(-1)
        } else {
            None
        }
    }

    /// Smallest f | modulus such that the character factors through
    /// (Z/f)^x.
    pub fn conductor(&self) -> u64 {
        let m = self.modulus;
        let mut divisors: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
        divisors.sort_unstable();
        'next: for f in divisors {
            for x in 0..m {
                if x.gcd(&m) == 1 && x % f == 1 % f.max(1) && self.eval(x) != 1 {
                    continue 'next;
                }
            }
            return f;
        }
        m
    }

    /// Pointwise product, defined modulo lcm of the moduli.
    pub fn product(&self, other: &DirichletCharacter) -> Result<DirichletCharacter> {
        if !self.ctx.same_ring(&other.ctx) {
            return Err(Error::ContextMismatch);
        }
        let m = self.modulus.lcm(&other.modulus);
        let values: Vec<u64> = (0..m)
            .map(|x| {
                if x.gcd(&m) == 1 {
                    self.ctx.mul(self.eval(x), other.eval(x))
                } else {
                    0
                }
            })
            .collect();
        DirichletCharacter::from_table(self.ctx, m, values)
    }
}

/// Quadratic character attached to a fundamental discriminant D, of modulus
/// |D|, with values +-1 embedded in Z/p^N.
pub fn kronecker_character(d: i64, ctx: &PrimeContext) -> Result<DirichletCharacter> {
    if !is_fundamental_discriminant(d) && d != 1 {
        return Err(Error::NotFundamental(d));
    }
    let modulus = d.unsigned_abs();
    if modulus.gcd(&ctx.p()) != 1 {
        return Err(Error::ModulusSharesFactorWithP);
    }
    let minus_one = ctx.modulus() - 1;
    let values: Vec<u64> = (0..modulus)
        .map(|x| match kronecker_symbol(d, x as i64) {
            1 => 1,
            -1 => minus_one,
            _ => 0,
        })
        .collect();
    DirichletCharacter::from_table(*ctx, modulus.max(1), if modulus == 0 { vec![1] } else { values })
}
