//! Finite-precision congruence bookkeeping across weights: congruence
//! depths between ordinary eigensystems and the weight-one specialization
//! report. Depths are measured and reported, never asserted as theorems.

use crate::arith::PrimeContext;
use crate::error::{Error, Result};
use crate::overconv::EigenSystem;

/// A weight together with its specialization element (1+p)^{k-2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightPoint {
    pub k: i64,
    pub specialization: u64,
}

impl WeightPoint {
    pub fn new(k: i64, ctx: &PrimeContext) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("weight must be >= 1".into()));
        }
        let u = ctx.add(1, ctx.p() % ctx.modulus());
        Ok(WeightPoint { k, specialization: ctx.pow_i64(u, k - 2)? })
    }
}

/// Largest t <= min(precisions) with a_n(E1) = a_n(E2) mod p^t for all
/// recorded n and U_p eigenvalues congruent mod p^t.
pub fn congruence_depth(e1: &EigenSystem, e2: &EigenSystem) -> Result<u32> {
    if !e1.ctx.same_ring(&e2.ctx) || e1.level != e2.level || e1.character != e2.character {
        return Err(Error::ContextMismatch);
    }
    let ctx = e1.ctx;
    let cap = e1.precision.min(e2.precision);
    let mut t = cap.min(ctx.valuation(ctx.sub(e1.up_eigenvalue, e2.up_eigenvalue)));
    let n_max = e1.trunc().min(e2.trunc());
    for n in 1..=n_max {
        if t == 0 {
            break;
        }
        t = t.min(ctx.valuation(ctx.sub(e1.a_n(n), e2.a_n(n))));
    }
    Ok(t.min(cap))
}

/// Result of matching two lists of eigensystems by congruence depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMatch {
    /// (index in list A, index in list B, measured depth >= 1)
    pub pairs: Vec<(usize, usize, u32)>,
    pub leftovers_a: Vec<usize>,
    pub leftovers_b: Vec<usize>,
}

impl FamilyMatch {
    pub fn is_bijection(&self) -> bool {
        self.leftovers_a.is_empty() && self.leftovers_b.is_empty()
    }

    pub fn min_depth(&self) -> Option<u32> {
        self.pairs.iter().map(|&(_, _, t)| t).min()
    }
}

/// Greedy maximal matching by congruence depth >= 1 (mod-p agreement).
/// Requires k = k' mod (p-1). Deterministic: candidates are ordered by
/// (depth desc, lexicographic a-sequences), which does not depend on the
/// input order.
pub fn family_match(list_a: &[EigenSystem], list_b: &[EigenSystem]) -> Result<FamilyMatch> {
    if let (Some(a), Some(b)) = (list_a.first(), list_b.first()) {
        let p = a.ctx.p() as i64;
        if (a.weight - b.weight).rem_euclid(p - 1) != 0 {
            return Err(Error::InvalidParameter(format!(
                "weights {} and {} are not congruent mod p-1 = {}",
                a.weight,
                b.weight,
                p - 1
            )));
        }
    }
    let mut candidates: Vec<(u32, &[u64], &[u64], usize, usize)> = Vec::new();
    for (i, ea) in list_a.iter().enumerate() {
        for (j, eb) in list_b.iter().enumerate() {
            let t = congruence_depth(ea, eb)?;
            if t >= 1 {
                candidates.push((t, &ea.a, &eb.a, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| {
        y.0.cmp(&x.0).then_with(|| x.1.cmp(y.1)).then_with(|| x.2.cmp(y.2))
    });
    let mut used_a = vec![false; list_a.len()];
    let mut used_b = vec![false; list_b.len()];
    let mut pairs = Vec::new();
    for (t, _, _, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push((i, j, t));
        }
    }
    pairs.sort_by_key(|&(i, _, _)| i);
    let leftovers_a = (0..list_a.len()).filter(|&i| !used_a[i]).collect();
    let leftovers_b = (0..list_b.len()).filter(|&j| !used_b[j]).collect();
    Ok(FamilyMatch { pairs, leftovers_a, leftovers_b })
}

/// Congruence depths (away from p) between a certified weight-one form and
/// each higher-weight ordinary eigensystem it should specialize from.
pub fn weight_one_specialization_report(
    weight_one: &EigenSystem,
    family: &[EigenSystem],
) -> Vec<u32> {
    let ctx = weight_one.ctx;
    let p = ctx.p() as usize;
    family
        .iter()
        .map(|e| {
            let cap = weight_one.precision.min(e.precision);
            let n_max = weight_one.trunc().min(e.trunc());
            let mut t = cap;
            for n in (1..=n_max).filter(|n| n % p != 0) {
                if t == 0 {
                    break;
                }
                t = t.min(ctx.valuation(ctx.sub(weight_one.a_n(n), e.a_n(n))));
            }
            t.min(cap)
        })
        .collect()
}
