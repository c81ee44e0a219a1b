//! Bernoulli numbers by the classical recurrence.

use super::ExactRational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// B_k under the convention sum_k B_k x^k / k! = x/(e^x - 1), so B_1 = -1/2.
/// Computed by the recurrence sum_{j=0}^{k} C(k+1, j) B_j = 0 for k >= 1.
pub fn bernoulli(k: u32) -> ExactRational {
    bernoulli_table(k).pop().unwrap()
}

/// B_0 .. B_k in one pass; the recurrence needs all earlier values anyway.
pub fn bernoulli_table(k: u32) -> Vec<ExactRational> {
    let mut table: Vec<ExactRational> = Vec::with_capacity(k as usize + 1);
    table.push(ExactRational::one());
    for n in 1..=k as usize {
        if n > 1 && n % 2 == 1 {
            table.push(ExactRational::zero());
            continue;
        }
        // C(n+1, j) accumulated incrementally.
        let mut binom = BigInt::one();
        let mut acc = ExactRational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += b * ExactRational::from(binom.clone());
            binom = binom * BigInt::from(n as u64 + 1 - j as u64) / BigInt::from(j as u64 + 1);
        }
        // binom is now C(n+1, n) = n+1
        table.push(-acc / ExactRational::from(BigInt::from(n as u64 + 1)));
    }
    table
}
