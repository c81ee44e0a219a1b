//! Built-in desk-scale fixture constructions: exact spanning sets for the
//! cusp spaces S_k(Gamma_0(11)) and the weight-one theta data at level 23.
//!
//! These play the role of externally computed classical spaces. Every
//! generated basis is certified at generation time: the echelon rank must
//! equal the dimension from the standard genus/degree formulas and the
//! lattice must be saturated (all pivot valuations zero), which pins it to
//! the full integral lattice up to the recorded Sturm bound.

use crate::arith::{
    bernoulli, rational_p_valuation, sigma_t, DirichletCharacter, ExactRational, PrimeContext,
};
use crate::error::{Error, Result};
use crate::linalg::{fp_left_kernel, hensel_lift_root};
use crate::overconv::EigenSystem;
use crate::qseries::{theta_series, Meta, QExpansion};
use crate::spaces::{BasisMatrix, SourceTag, SpaceDescriptor};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Euler product prod_{n>=1} (1 - q^n) via the pentagonal number theorem.
fn euler_series(ctx: &PrimeContext, trunc: usize) -> QExpansion {
    let mut coeffs = vec![0u64; trunc + 1];
    coeffs[0] = 1;
    let mut k: i64 = 1;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 as usize > trunc {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { ctx.neg(1) };
        coeffs[g1 as usize] = ctx.add(coeffs[g1 as usize], sign);
        if g2 as usize <= trunc {
            coeffs[g2 as usize] = ctx.add(coeffs[g2 as usize], sign);
        }
        k += 1;
    }
    QExpansion::new(*ctx, coeffs, None).unwrap()
}

fn trivial_meta(ctx: &PrimeContext, level: u64, weight: i64) -> Meta {
    Meta { level, weight, character: DirichletCharacter::trivial(*ctx) }
}

/// The weight-2 newform of level 11 as the eta product
/// q prod (1-q^n)^2 (1-q^{11n})^2.
pub fn level11_weight2_newform(ctx: &PrimeContext) -> QExpansion {
    let trunc = ctx.m();
    let e1 = euler_series(ctx, trunc);
    let e11 = e1.v_t(11);
    let mut f = e1.mul(&e1).unwrap().mul(&e11.mul(&e11).unwrap()).unwrap();
    // multiply by q
    let mut coeffs = vec![0u64; trunc + 1];
    for (n, &c) in f.coeffs().iter().enumerate() {
        if n + 1 <= trunc {
            coeffs[n + 1] = c;
        }
    }
    f = QExpansion::new(*ctx, coeffs, Some(trivial_meta(ctx, 11, 2))).unwrap();
    f
}

/// dim M_k(Gamma_0(11)): 1, 2, k for k = 0, 2, >= 4 even (genus one, two
/// cusps, no elliptic points, deg omega = 1).
fn dim_m11(k: i64) -> usize {
    match k {
        0 => 1,
        2 => 2,
        k if k >= 4 && k % 2 == 0 => k as usize,
        _ => 0,
    }
}

/// dim S_k(Gamma_0(11)): 0, 1, k - 2 for k = 0, 2, >= 4 even.
pub fn dim_s11(k: i64) -> usize {
    match k {
        2 => 1,
        k if k >= 4 && k % 2 == 0 => (k - 2) as usize,
        _ => 0,
    }
}

/// Generation precision: fixtures are built as big-integer residues mod
/// p^GEN_PREC so saturation can spend digits freely; the emitted basis is
/// reduced to the target precision at the end.
const GEN_PREC: u32 = 40;

/// Residue ring Z/p^prec over big integers, for fixture generation only.
/// The precision shrinks as saturation divisions spend digits, so exact
/// relations among forms always cancel to a true zero at the current
/// working precision.
#[derive(Clone)]
struct GenRing {
    p: u64,
    prec: u32,
    modulus: BigInt,
    unit_group_order: BigInt,
}

impl GenRing {
    fn new(p: u64, prec: u32) -> Self {
        let modulus = BigInt::from(p).pow(prec);
        let unit_group_order = &modulus / p * (p - 1);
        GenRing { p, prec, modulus, unit_group_order }
    }

    fn shrink(&self, digits: u32) -> GenRing {
        GenRing::new(self.p, self.prec - digits)
    }

    fn reduce(&self, x: &BigInt) -> BigInt {
        ((x % &self.modulus) + &self.modulus) % &self.modulus
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a * b))
    }

    /// p-adic valuation of the residue class, capped at the working
    /// precision.
    fn valuation(&self, x: &BigInt) -> u32 {
        let x = self.reduce(x);
        if x.is_zero() {
            return self.prec;
        }
        let p = BigInt::from(self.p);
        let mut x = x;
        let mut v = 0;
        while (&x % &p).is_zero() {
            x /= &p;
            v += 1;
        }
        v
    }

    fn inv_unit(&self, x: &BigInt) -> BigInt {
        // unit group of Z/p^prec is cyclic of order p^{prec-1}(p-1)
        self.reduce(x).modpow(&(&self.unit_group_order - 1), &self.modulus)
    }

    /// Exact division by p^v of a residue; the result is well defined mod
    /// p^{prec-v} and the caller is responsible for shrinking.
    fn div_pow_p(&self, x: &BigInt, v: u32) -> BigInt {
        self.reduce(x) / BigInt::from(self.p).pow(v)
    }
}

/// q-series with residue coefficients mod p^GEN_PREC.
#[derive(Clone)]
struct GenSeries(Vec<BigInt>);

impl GenSeries {
    fn from_fn(trunc: usize, ring: &GenRing, f: impl Fn(u64) -> BigInt) -> Self {
        GenSeries((0..=trunc as u64).map(|n| ring.reduce(&f(n))).collect())
    }

    fn mul(&self, other: &GenSeries, ring: &GenRing) -> GenSeries {
        let n = self.0.len().min(other.0.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.0.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate().take(n - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] += a * b;
            }
        }
        GenSeries(out.into_iter().map(|x| ring.reduce(&x)).collect())
    }
}

/// Valuation-pivoted echelon over the generation ring, tracking the digits
/// spent by saturation divisions.
struct GenEchelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<(usize, u32)>,
}

fn gen_echelonize(ring: &GenRing, rows: Vec<Vec<BigInt>>) -> GenEchelon {
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut work: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|mut r| {
            r.resize(width, BigInt::zero());
            r.iter().map(|x| ring.reduce(x)).collect()
        })
        .collect();
    let mut out_rows: Vec<Vec<BigInt>> = Vec::new();
    let mut pivots = Vec::new();
    let mut used = vec![false; work.len()];
    for col in 0..width {
        let mut best: Option<(usize, u32)> = None;
        for (i, row) in work.iter().enumerate() {
            if used[i] || row[col].is_zero() {
                continue;
            }
            let v = ring.valuation(&row[col]);
            if v < ring.prec && best.map_or(true, |(_, bv)| v < bv) {
                best = Some((i, v));
            }
        }
        let Some((pi, pv)) = best else { continue };
        used[pi] = true;
        let pivot_row = work[pi].clone();
        let pivot_unit = ring.div_pow_p(&pivot_row[col], pv);
        let pivot_unit_inv = ring.inv_unit(&pivot_unit);
        for (i, row) in work.iter_mut().enumerate() {
            if used[i] || row[col].is_zero() || ring.valuation(&row[col]) >= ring.prec {
                continue;
            }
            // pivot has minimal valuation in this column: exact division
            let factor = ring.mul(&ring.div_pow_p(&row[col], pv), &pivot_unit_inv);
            for (x, pr) in row.iter_mut().zip(&pivot_row) {
                *x = ring.reduce(&(&*x - &factor * pr));
            }
        }
        out_rows.push(pivot_row);
        pivots.push((col, pv));
    }
    GenEchelon { rows: out_rows, pivots }
}

/// Saturate a spanning set over Z_p: repeatedly add (mod-p kernel
/// combination)/p^v. Legitimate because a form of weight k vanishing mod p
/// out to the Sturm bound vanishes identically, so each quotient is again
/// an integral form. Every round shrinks the working precision by the
/// largest power divided out. Returns the saturated rows, the ring they
/// live in, and the digits consumed.
fn gen_saturate(
    ring: &GenRing,
    rows: Vec<Vec<BigInt>>,
    budget: u32,
) -> Result<(Vec<Vec<BigInt>>, GenRing, u32)> {
    let mut ring = ring.clone();
    let mut ech = gen_echelonize(&ring, rows);
    let mut spent = 0u32;
    loop {
        if ech.pivots.iter().all(|&(_, v)| v == 0) {
            return Ok((ech.rows, ring, spent));
        }
        let mod_p: Vec<Vec<u64>> = ech
            .rows
            .iter()
            .map(|r| r.iter().map(|x| (x % ring.p).to_u64().unwrap()).collect())
            .collect();
        let kernel = fp_left_kernel(ring.p, &mod_p);
        if kernel.is_empty() {
            return Err(Error::RankDeficiency("non-unit pivot without mod-p relation".into()));
        }
        let mut rows = ech.rows.clone();
        let mut round_cost = 0u32;
        for combo in kernel {
            let width = ech.rows.first().map_or(0, |r| r.len());
            let mut acc = vec![BigInt::zero(); width];
            for (c, row) in combo.iter().zip(&ech.rows) {
                if *c == 0 {
                    continue;
                }
                let cb = BigInt::from(*c);
                for (a, b) in acc.iter_mut().zip(row) {
                    *a = ring.reduce(&(&*a + &cb * b));
                }
            }
            let v = acc.iter().map(|x| ring.valuation(x)).min().unwrap_or(ring.prec);
            // v = prec would mean an exact dependence among echelon rows,
            // which valuation pivoting rules out.
            debug_assert!(v >= 1 && v < ring.prec);
            round_cost = round_cost.max(v);
            rows.push(acc.iter().map(|x| ring.div_pow_p(x, v)).collect());
        }
        spent += round_cost;
        if spent > budget {
            return Err(Error::RankDeficiency(format!(
                "saturation exceeded the precision budget of {budget} digits"
            )));
        }
        ring = ring.shrink(round_cost);
        ech = gen_echelonize(&ring, rows);
    }
}

/// Certified basis of the cusp space S_k(Gamma_0(11)) over Z/p^N, with the
/// dimension and Sturm bound recorded as fixture metadata.
///
/// Construction: graded spans M_0 = <1>, M_2 = <E_2 - 11 E_2(q^11), f2>,
/// M_4 = <E_4, d_4, M_2 M_2>, M_w = <E_w, d_w, M_4 M_{w-4}>, all saturated;
/// then S_k = f2 * M_{k-2}, which is everything because the divisor of the
/// eta product f2 is exactly the two cusps.
pub fn level11_cusp_space(ctx: &PrimeContext, k: i64) -> Result<BasisMatrix> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidParameter(format!("no cusp fixture for weight {k}")));
    }
    if ctx.m() < (k as usize) + 2 {
        return Err(Error::TruncationTooShort { needed: k as usize + 2, have: ctx.m() });
    }
    if ctx.nprec() + 2 > GEN_PREC {
        return Err(Error::InvalidParameter(format!(
            "fixture generation supports precision up to {}",
            GEN_PREC - 2
        )));
    }
    let mut ring = GenRing::new(ctx.p(), GEN_PREC);
    let trunc = ctx.m();

    // prod (1 - q^n) by the pentagonal number theorem, exactly.
    let euler = {
        let mut coeffs = vec![BigInt::zero(); trunc + 1];
        coeffs[0] = BigInt::one();
        let mut j: i64 = 1;
        loop {
            let g1 = j * (3 * j - 1) / 2;
            let g2 = j * (3 * j + 1) / 2;
            if g1 as usize > trunc {
                break;
            }
            let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            coeffs[g1 as usize] = ring.reduce(&(&coeffs[g1 as usize] + &sign));
            if g2 as usize <= trunc {
                coeffs[g2 as usize] = ring.reduce(&(&coeffs[g2 as usize] + &sign));
            }
            j += 1;
        }
        GenSeries(coeffs)
    };
    let euler11 = {
        let mut coeffs = vec![BigInt::zero(); trunc + 1];
        for (n, c) in euler.0.iter().enumerate() {
            if n * 11 <= trunc {
                coeffs[n * 11] = c.clone();
            }
        }
        GenSeries(coeffs)
    };
    // f2 = q prod (1-q^n)^2 (1-q^{11n})^2
    let f2 = {
        let sq = euler.mul(&euler, &ring);
        let sq11 = euler11.mul(&euler11, &ring);
        let prod = sq.mul(&sq11, &ring);
        let mut coeffs = vec![BigInt::zero(); trunc + 1];
        for (n, c) in prod.0.iter().enumerate() {
            if n + 1 <= trunc {
                coeffs[n + 1] = c.clone();
            }
        }
        GenSeries(coeffs)
    };
    // E_2 - 11 E_2(q^11) = -10 - 24 sum (sigma(n) - 11 sigma(n/11)) q^n
    let a2 = GenSeries::from_fn(trunc, &ring, |n| {
        if n == 0 {
            return BigInt::from(-10);
        }
        let mut s = sigma_t(n, 1);
        if n % 11 == 0 {
            s -= 11 * sigma_t(n / 11, 1);
        }
        -24 * s
    });

    // Graded spans built up through the even weights, each saturated; the
    // working ring shrinks as saturation spends digits.
    let mut m_spans: std::collections::BTreeMap<i64, Vec<GenSeries>> =
        std::collections::BTreeMap::new();
    m_spans.insert(
        0,
        vec![GenSeries::from_fn(trunc, &ring, |n| {
            if n == 0 {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        })],
    );
    let budget_left = |ring: &GenRing| ring.prec.saturating_sub(ctx.nprec());
    if k - 2 >= 2 {
        let (rows, new_ring, _) =
            gen_saturate(&ring, vec![a2.0.clone(), f2.0.clone()], budget_left(&ring))?;
        ring = new_ring;
        check_rank(&rows, dim_m11(2), 2)?;
        m_spans.insert(2, rows.into_iter().map(GenSeries).collect());
    }
    for w in (4..=(k - 2)).step_by(2) {
        let mut rows: Vec<Vec<BigInt>> = vec![
            eis_level1(&ring, trunc, w as u32)?.0,
            eis_diff(&ring, trunc, w as u32).0,
        ];
        // M_a x M_b -> M_{a+b} is surjective on this curve for a >= 4,
        // b >= 2; M_2 x M_2 plus the two Eisenstein rows reaches M_4.
        let (left_w, right_w) = if w == 4 { (2, 2) } else { (4, w - 4) };
        let pairs: Vec<(usize, usize)> = (0..m_spans[&left_w].len())
            .flat_map(|i| (0..m_spans[&right_w].len()).map(move |j| (i, j)))
            .collect();
        for (i, j) in pairs {
            rows.push(m_spans[&left_w][i].mul(&m_spans[&right_w][j], &ring).0);
        }
        let (sat, new_ring, _) = gen_saturate(&ring, rows, budget_left(&ring))?;
        ring = new_ring;
        check_rank(&sat, dim_m11(w), w)?;
        m_spans.insert(w, sat.into_iter().map(GenSeries).collect());
    }

    // S_k = f2 * M_{k-2}
    let cusp_rows: Vec<Vec<BigInt>> =
        m_spans[&(k - 2)].iter().map(|m| m.mul(&f2, &ring).0).collect();
    let (sat_rows, final_ring, _) = gen_saturate(&ring, cusp_rows, budget_left(&ring))?;
    ring = final_ring;
    if ring.prec < ctx.nprec() {
        return Err(Error::RankDeficiency(
            "saturation consumed the generation precision".into(),
        ));
    }
    let expected = dim_s11(k);
    if sat_rows.len() != expected {
        return Err(Error::RankDeficiency(format!(
            "S_{k}(Gamma_0(11)) span has rank {}, expected {expected}",
            sat_rows.len()
        )));
    }

    // Reduce into the target ring and certify.
    let meta = trivial_meta(ctx, 11, k);
    let modulus = BigInt::from(ctx.modulus());
    let rows: Result<Vec<QExpansion>> = sat_rows
        .into_iter()
        .map(|r| {
            let reduced: Vec<u64> =
                r.into_iter().map(|x| (x % &modulus).to_u64().unwrap()).collect();
            QExpansion::new(*ctx, reduced, Some(meta.clone()))
        })
        .collect();
    let descriptor = SpaceDescriptor {
        level: 11,
        weight: k,
        character: DirichletCharacter::trivial(*ctx),
        source: SourceTag::Generated,
        dim_hint: Some(expected),
        // Sturm-style bound for Gamma_0(11): k * [SL_2(Z) : Gamma_0(11)] / 12 = k.
        sturm_bound: Some(k as usize + 1),
    };
    let basis = BasisMatrix::echelonize(*ctx, descriptor, &rows?)?;
    if basis.rank() != expected || basis.pivots().iter().any(|&(_, v)| v != 0) {
        return Err(Error::RankDeficiency(format!(
            "certification failed for S_{k}(Gamma_0(11)): rank {} pivots {:?}",
            basis.rank(),
            basis.pivots()
        )));
    }
    Ok(basis)
}

fn check_rank(rows: &[Vec<BigInt>], expected: usize, weight: i64) -> Result<()> {
    if rows.len() != expected {
        return Err(Error::RankDeficiency(format!(
            "M_{weight}(Gamma_0(11)) span has rank {}, expected {expected}",
            rows.len()
        )));
    }
    Ok(())
}

/// Level-1 Eisenstein series with constant term 1:
/// 1 - (2w/B_w) sum sigma_{w-1}(n) q^n. The scale is p-integral for every
/// even w at a regular prime.
fn eis_level1(ring: &GenRing, trunc: usize, w: u32) -> Result<GenSeries> {
    let b = bernoulli(w);
    let c = ExactRational::new(BigInt::from(-2 * w as i64), BigInt::one()) / b;
    if rational_p_valuation(&c, ring.p) < 0 {
        return Err(Error::NegativeValuation);
    }
    // denominators are stored positive and are coprime to p here
    let num = ring.reduce(c.numer());
    let den_inv = ring.inv_unit(&ring.reduce(c.denom()));
    let scale = ring.mul(&num, &den_inv);
    Ok(GenSeries::from_fn(trunc, ring, |n| {
        if n == 0 {
            BigInt::one()
        } else {
            ring.mul(&scale, &ring.reduce(&sigma_t(n, w - 1)))
        }
    }))
}

/// Normalized difference Eisenstein series of level 11:
/// sum (sigma_{w-1}(n) - sigma_{w-1}(n/11)) q^n, integral with a_1 = 1.
fn eis_diff(ring: &GenRing, trunc: usize, w: u32) -> GenSeries {
    GenSeries::from_fn(trunc, ring, |n| {
        if n == 0 {
            return BigInt::zero();
        }
        let mut s = sigma_t(n, w - 1);
        if n % 11 == 0 {
            s -= sigma_t(n / 11, w - 1);
        }
        s
    })
}

/// The ordinary p-stabilization of the level-11 weight-2 newform: the
/// eigensystem with U_p eigenvalue the unit root of X^2 - a_p X + p and
/// coefficients a_n(g) - beta a_{n/p}(g).
pub fn level11_weight2_ordinary_stabilization(ctx: &PrimeContext) -> Result<EigenSystem> {
    let g = level11_weight2_newform(ctx);
    let p = ctx.p();
    let a_p = g.coeff(p as usize);
    // X^2 - a_p X + p
    let poly = vec![p % ctx.modulus(), ctx.neg(a_p), 1];
    let residue = a_p % p;
    if residue == 0 {
        return Err(Error::InvalidParameter(format!(
            "level-11 weight-2 form is not ordinary at {p}"
        )));
    }
    let alpha = hensel_lift_root(ctx, &poly, residue)?;
    let beta = ctx.sub(a_p, alpha);
    let stab = g.sub(&g.v_op().scale(beta))?;
    debug_assert!(stab.u_p().agrees_with(&stab.scale(alpha)));
    Ok(EigenSystem {
        ctx: *ctx,
        weight: 2,
        level: 11,
        character: DirichletCharacter::trivial(*ctx),
        up_eigenvalue: alpha,
        a: stab.coeffs().to_vec(),
        precision: ctx.nprec(),
    })
}

/// The level-23 weight-one data: the cusp eigenform g = (theta_1 -
/// theta_2)/2 and the classical weight-one basis spanned by the two theta
/// series of discriminant -23.
pub fn level23_weight_one(ctx: &PrimeContext) -> Result<(QExpansion, BasisMatrix)> {
    let t1 = theta_series(1, 1, 6, ctx)?;
    let t2 = theta_series(2, 1, 3, ctx)?;
    let g = t1.sub(&t2)?.scale(ctx.inv(2)?);
    let chi = crate::arith::kronecker_character(-23, ctx)?;
    let descriptor = SpaceDescriptor {
        level: 23,
        weight: 1,
        character: chi,
        source: SourceTag::Generated,
        dim_hint: Some(2),
        // Sturm-style bound: weight * index / 12 = 2 * 24 / 12 = 4.
        sturm_bound: Some(4),
    };
    let basis = BasisMatrix::echelonize(*ctx, descriptor, &[t1, t2])?;
    if basis.rank() != 2 || basis.precision_loss() != 0 {
        return Err(Error::RankDeficiency("theta basis is not saturated of rank 2".into()));
    }
    Ok((g, basis))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(m: usize) -> PrimeContext {
        PrimeContext::new(5, 6, m).unwrap()
    }

    /// Direct small-degree polynomial expansion of the eta product, as an
    /// independent oracle for the first coefficients of the newform.
    fn newform_oracle(upto: usize) -> Vec<i64> {
        let n = upto + 1;
        let mut acc = vec![0i64; n];
        acc[0] = 1;
        let mul_factor = |acc: &mut Vec<i64>, e: usize, times: usize| {
            for _ in 0..times {
                let old = acc.clone();
                for (i, &c) in old.iter().enumerate() {
                    if c != 0 && i + e < old.len() {
                        acc[i + e] -= c;
                    }
                }
            }
        };
        for e in 1..n {
            mul_factor(&mut acc, e, 2);
        }
        for e in (11..n).step_by(11) {
            mul_factor(&mut acc, e, 2);
        }
        // shift by q
        let mut out = vec![0i64; n];
        for i in 0..n - 1 {
            out[i + 1] = acc[i];
        }
        out
    }

    #[test]
    fn newform_matches_direct_expansion() {
        let c = ctx(40);
        let f = level11_weight2_newform(&c);
        let oracle = newform_oracle(40);
        for n in 0..=40 {
            assert_eq!(f.coeff(n), c.reduce_i64(oracle[n]), "a_{n}");
        }
        // classical values: a_2 = -2, a_3 = -1, a_4 = 2, a_5 = 1
        assert_eq!(f.coeff(2), c.neg(2));
        assert_eq!(f.coeff(3), c.neg(1));
        assert_eq!(f.coeff(4), 2);
        assert_eq!(f.coeff(5), 1);
    }

    #[test]
    fn cusp_space_weight2() {
        let c = ctx(30);
        let b = level11_cusp_space(&c, 2).unwrap();
        assert_eq!(b.rank(), 1);
        assert_eq!(b.precision_loss(), 0);
        let f = level11_weight2_newform(&c);
        let m = b.membership(&f).unwrap();
        assert_eq!(m.coords, vec![1]);
    }

    #[test]
    fn cusp_space_weight6_certified() {
        let c = ctx(40);
        let b = level11_cusp_space(&c, 6).unwrap();
        assert_eq!(b.rank(), 4);
        assert_eq!(b.precision_loss(), 0);
        // every row is a cusp form: a_0 = 0
        for i in 0..b.rank() {
            assert_eq!(b.row_qexp(i).coeff(0), 0);
        }
    }

    #[test]
    fn cusp_space_weight10_certified() {
        let c = ctx(60);
        let b = level11_cusp_space(&c, 10).unwrap();
        assert_eq!(b.rank(), 8);
        assert_eq!(b.precision_loss(), 0);
    }

    #[test]
    fn e_times_s2_inside_s6() {
        // The layered construction needs E * S_2 inside S_6.
        let c = ctx(40);
        let s2 = level11_cusp_space(&c, 2).unwrap();
        let s6 = level11_cusp_space(&c, 6).unwrap();
        let e = crate::qseries::eisenstein_e(&c);
        let lifted = s2.row_qexp(0).mul(&e).unwrap();
        assert!(s6.membership(&lifted).is_ok());
    }

    #[test]
    fn ordinary_stabilization_eigensystem() {
        let c = ctx(30);
        let e = level11_weight2_ordinary_stabilization(&c).unwrap();
        // unit root of X^2 - X + 5: 21 mod 25 (brute-scan oracle), and the
        // away-from-p coefficients match the newform.
        assert_eq!(e.up_eigenvalue % 25, 21);
        let f = level11_weight2_newform(&c);
        for n in 1..=30 {
            if n % 5 != 0 {
                assert_eq!(e.a_n(n), f.coeff(n));
            }
        }
        assert_eq!(e.a_n(1), 1);
    }

    #[test]
    fn level23_data() {
        let c = PrimeContext::new(13, 5, 50).unwrap();
        let (g, basis) = level23_weight_one(&c).unwrap();
        assert_eq!(g.coeff(1), 1);
        assert_eq!(basis.rank(), 2);
        let m = basis.membership(&g).unwrap();
        assert_eq!(m.effective_prec, 5);
    }
}
