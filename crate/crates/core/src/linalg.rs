//! Exact linear algebra over Z/p^N.
//!
//! Z/p^N is not a field, so elimination pivots on entries of minimal p-adic
//! valuation and all divisions are exact (divisor valuation <= dividend
//! valuation). Precision loss is accounted for, never silent.

use crate::arith::PrimeContext;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

/// Dense row-major matrix over Z/p^N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    ctx: PrimeContext,
    nrows: usize,
    ncols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zero(ctx: PrimeContext, nrows: usize, ncols: usize) -> Self {
        Matrix { ctx, nrows, ncols, data: vec![0; nrows * ncols] }
    }

    pub fn identity(ctx: PrimeContext, n: usize) -> Self {
        let mut m = Self::zero(ctx, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(ctx: PrimeContext, rows: Vec<Vec<u64>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r.into_iter().map(|x| x % ctx.modulus()));
        }
        Matrix { ctx, nrows, ncols, data }
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.ncols + j] = v % self.ctx.modulus();
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<u64>> {
        (0..self.nrows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.ctx.add(a, b))
            .collect();
        Matrix { ctx: self.ctx, nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.ctx.sub(a, b))
            .collect();
        Matrix { ctx: self.ctx, nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn scale(&self, c: u64) -> Matrix {
        let data = self.data.iter().map(|&a| self.ctx.mul(a, c)).collect();
        Matrix { ctx: self.ctx, nrows: self.nrows, ncols: self.ncols, data }
    }

    /// Matrix product; rows are computed independently so the result is
    /// identical for any thread count.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch");
        let ctx = self.ctx;
        let n = other.ncols;
        let modulus = ctx.modulus() as u128;
        let data: Vec<u64> = (0..self.nrows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let lhs = self.row(i);
                (0..n).map(move |j| {
                    let mut acc = 0u128;
                    for (k, &a) in lhs.iter().enumerate() {
                        acc += (a as u128 * other.data[k * n + j] as u128) % modulus;
                        if acc >= (1u128 << 126) {
                            acc %= modulus;
                        }
                    }
                    (acc % modulus) as u64
                })
            })
            .collect();
        Matrix { ctx, nrows: self.nrows, ncols: n, data }
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.nrows);
        let modulus = self.ctx.modulus() as u128;
        (0..self.ncols)
            .map(|j| {
                let mut acc = 0u128;
                for (k, &a) in v.iter().enumerate() {
                    acc += (a as u128 * self.data[k * self.ncols + j] as u128) % modulus;
                    if acc >= (1u128 << 126) {
                        acc %= modulus;
                    }
                }
                (acc % modulus) as u64
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert_eq!(self.nrows, self.ncols);
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.ctx, self.nrows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> u64 {
        assert_eq!(self.nrows, self.ncols);
        let mut t = 0u64;
        for i in 0..self.nrows {
            t = self.ctx.add(t, self.get(i, i));
        }
        t
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }
}

/// Result of valuation-pivoted row reduction. Rows are ordered by strictly
/// increasing pivot column; zero rows are dropped.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub ctx: PrimeContext,
    pub width: usize,
    pub rows: Vec<Vec<u64>>,
    /// (pivot column, pivot valuation) for each row.
    pub pivots: Vec<(usize, u32)>,
}

impl Echelon {
    pub fn empty(ctx: PrimeContext, width: usize) -> Self {
        Echelon { ctx, width, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn precision_loss(&self) -> u32 {
        self.pivots.iter().map(|&(_, v)| v).sum()
    }

    pub fn max_pivot_col(&self) -> Option<usize> {
        self.pivots.last().map(|&(c, _)| c)
    }

    /// Reduce `row` against the current pivots and, if anything survives,
    /// insert it as a new pivot row. The pivot column is the leftmost
    /// nonzero column of the reduced row, so rows always vanish strictly
    /// left of their pivot. When the new row has smaller valuation at an
    /// occupied pivot column it takes the column over and the displaced row
    /// is reinserted.
    ///
    /// Returns the reduced representative when the rank grew.
    pub fn insert(&mut self, row: Vec<u64>) -> Option<Vec<u64>> {
        let ctx = self.ctx;
        let mut row = row;
        row.resize(self.width, 0);
        for x in row.iter_mut() {
            *x %= ctx.modulus();
        }
        loop {
            let reduced = reduce_against(self, &row).residual;
            let Some(col) = reduced.iter().position(|&x| x != 0) else {
                return None;
            };
            let v = ctx.valuation(reduced[col]);
            match self.pivots.iter().position(|&(c, _)| c == col) {
                None => {
                    let at = self.pivots.partition_point(|&(c, _)| c < col);
                    self.pivots.insert(at, (col, v));
                    self.rows.insert(at, reduced.clone());
                    return Some(reduced);
                }
                Some(i) if self.pivots[i].1 > v => {
                    // The incoming row is the better pivot here; displace the
                    // old one and push it back through the reduction.
                    let old = self.rows[i].clone();
                    self.rows[i] = reduced.clone();
                    self.pivots[i] = (col, v);
                    row = old;
                    // The displaced row will reduce to something supported
                    // strictly to the right of `col`.
                }
                Some(_) => {
                    // reduce_against left this column because the valuation
                    // was too small, but the pivot here is at most as deep;
                    // cannot happen.
                    unreachable!("reduction skipped a clearable pivot column");
                }
            }
        }
    }
}

/// Reduce `rows` to echelon form over Z/p^N. At each column the pivot is the
/// entry of minimal valuation among untouched rows (ties: lowest row index),
/// which minimizes precision loss downstream.
pub fn echelonize_rows(ctx: PrimeContext, rows: Vec<Vec<u64>>) -> Echelon {
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut work: Vec<Vec<u64>> = rows
        .into_iter()
        .map(|mut r| {
            r.resize(width, 0);
            for x in r.iter_mut() {
                *x %= ctx.modulus();
            }
            r
        })
        .collect();
    let nprec = ctx.nprec();
    let mut out_rows: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<(usize, u32)> = Vec::new();
    let mut used = vec![false; work.len()];

    for col in 0..width {
        let mut best: Option<(usize, u32)> = None;
        for (i, row) in work.iter().enumerate() {
            if used[i] || row[col] == 0 {
                continue;
            }
            let v = ctx.valuation(row[col]);
            if v < nprec && best.map_or(true, |(_, bv)| v < bv) {
                best = Some((i, v));
            }
        }
        let Some((pi, pv)) = best else { continue };
        used[pi] = true;
        let pivot_row = work[pi].clone();
        let pivot = pivot_row[col];
        // Clear the column from every other row; the pivot has minimal
        // valuation there so the division is exact.
        for (i, row) in work.iter_mut().enumerate() {
            if used[i] || row[col] == 0 {
                continue;
            }
            let factor = ctx.div_exact(row[col], pivot).expect("pivot valuation is minimal");
            for (x, &pr) in row.iter_mut().zip(&pivot_row) {
                *x = ctx.sub(*x, ctx.mul(factor, pr));
            }
        }
        // Also reduce previously extracted rows so columns above pivots are
        // cleared when the valuations permit.
        for row in out_rows.iter_mut() {
            if row[col] != 0 && ctx.valuation(row[col]) >= pv {
                let factor = ctx.div_exact(row[col], pivot).unwrap();
                for (x, &pr) in row.iter_mut().zip(&pivot_row) {
                    *x = ctx.sub(*x, ctx.mul(factor, pr));
                }
            }
        }
        out_rows.push(pivot_row);
        pivots.push((col, pv));
    }
    Echelon { ctx, width, rows: out_rows, pivots }
}

/// Outcome of reducing a vector against an echelonized basis.
#[derive(Debug, Clone)]
pub struct ReduceOutcome {
    /// One coordinate per basis row (well defined mod p^(N - pivot valuation)).
    pub coords: Vec<u64>,
    /// What is left of the vector on the common column range.
    pub residual: Vec<u64>,
    /// Minimal valuation over residual entries (= ctx.nprec() when zero).
    pub residual_valuation: u32,
}

/// Greedily eliminate the pivot columns of `ech` from `vec`. Only columns
/// `0..vec.len()` participate; the caller is responsible for checking that
/// every pivot column is in range.
pub fn reduce_against(ech: &Echelon, vec: &[u64]) -> ReduceOutcome {
    let ctx = ech.ctx;
    let len = vec.len().min(ech.width);
    let mut residual: Vec<u64> = vec[..len].iter().map(|&x| x % ctx.modulus()).collect();
    let mut coords = vec![0u64; ech.rows.len()];
    for (i, &(col, pv)) in ech.pivots.iter().enumerate() {
        if col >= len {
            break;
        }
        let x = residual[col];
        if x == 0 {
            continue;
        }
        if ctx.valuation(x) < pv {
            // Cannot clear this column exactly; leave it in the residual.
            continue;
        }
        let c = ctx.div_exact(x, ech.rows[i][col]).unwrap();
        coords[i] = c;
        for (r, &b) in residual.iter_mut().zip(ech.rows[i][..len].iter()) {
            *r = ctx.sub(*r, ctx.mul(c, b));
        }
    }
    let residual_valuation = residual
        .iter()
        .map(|&x| ctx.valuation(x))
        .min()
        .unwrap_or(ctx.nprec());
    ReduceOutcome { coords, residual, residual_valuation }
}

/// Basis of the left kernel of `rows` over F_p: all combinations
/// sum c_i row_i = 0 (mod p), with c taken mod p.
pub fn fp_left_kernel(p: u64, rows: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = rows.len();
    if n == 0 {
        return Vec::new();
    }
    let width = rows.iter().map(|r| r.len()).max().unwrap();
    // Augment with the identity to track the transformation.
    let mut work: Vec<Vec<u64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut w: Vec<u64> = r.iter().map(|&x| x % p).collect();
            w.resize(width, 0);
            w.extend((0..n).map(|j| u64::from(i == j)));
            w
        })
        .collect();
    let inv_mod_p = |a: u64| -> u64 {
        // p is prime; Fermat.
        let mut acc = 1u64;
        let mut base = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            e >>= 1;
            base = base * base % p;
        }
        acc
    };
    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    for col in 0..width {
        let Some(pi) = (0..n).find(|&i| !used[i] && work[i][col] % p != 0) else {
            continue;
        };
        used[pi] = true;
        pivot_rows.push(pi);
        let inv = inv_mod_p(work[pi][col]);
        let pivot_row: Vec<u64> = work[pi].iter().map(|&x| x * inv % p).collect();
        work[pi] = pivot_row.clone();
        for (i, row) in work.iter_mut().enumerate() {
            if i != pi && row[col] % p != 0 {
                let f = row[col] % p;
                for (x, &b) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + (p - f) * b) % p;
                }
            }
        }
    }
    work.iter()
        .enumerate()
        .filter(|(i, _)| !used[*i])
        .map(|(_, row)| row[width..].to_vec())
        .filter(|combo| combo.iter().any(|&c| c != 0))
        .collect()
}

/// Characteristic polynomial det(X I - A) mod p^N, monic, returned as
/// coefficients c_0..c_n.
///
/// Faddeev-LeVerrier divides by 1..n, so the computation runs with
/// v_p(n!) guard digits; every division is exact over Z, and the guard
/// absorbs the lost digits. Falls back to big-integer arithmetic when the
/// guarded modulus would overflow u64.
pub fn charpoly(a: &Matrix) -> Vec<u64> {
    let ctx = *a.ctx();
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return vec![1];
    }
    let guard: u32 = {
        let mut g = 0u64;
        let mut pk = ctx.p();
        while pk <= n as u64 {
            g += n as u64 / pk;
            match pk.checked_mul(ctx.p()) {
                Some(next) => pk = next,
                None => break,
            }
        }
        g as u32
    };
    match ctx.with_nprec(ctx.nprec() + guard) {
        Ok(big_ctx) => {
            let lifted = Matrix { ctx: big_ctx, nrows: n, ncols: n, data: a.data.clone() };
            let coeffs = charpoly_faddeev(&lifted);
            coeffs.into_iter().map(|c| c % ctx.modulus()).collect()
        }
        Err(_) => charpoly_bigint(a),
    }
}

fn charpoly_faddeev(a: &Matrix) -> Vec<u64> {
    let ctx = *a.ctx();
    let n = a.nrows();
    let mut coeffs = vec![0u64; n + 1];
    coeffs[n] = 1;
    let mut m = a.clone();
    for k in 1..=n {
        let t = m.trace();
        let c = ctx.div_exact(t, k as u64 % ctx.modulus()).expect("trace divisible by k");
        coeffs[n - k] = ctx.neg(c);
        if k < n {
            let mut shifted = m.clone();
            for i in 0..n {
                shifted.set(i, i, ctx.add(shifted.get(i, i), coeffs[n - k]));
            }
            m = a.mul(&shifted);
        }
    }
    coeffs
}

fn charpoly_bigint(a: &Matrix) -> Vec<u64> {
    let ctx = *a.ctx();
    let n = a.nrows();
    let big = |x: u64| BigInt::from(x);
    let mut m: Vec<BigInt> = a.data.iter().map(|&x| big(x)).collect();
    let a_z: Vec<BigInt> = m.clone();
    let mut coeffs: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::from(1);
    for k in 1..=n {
        let mut tr = BigInt::zero();
        for i in 0..n {
            tr += &m[i * n + i];
        }
        let c = -(tr / BigInt::from(k as u64));
        coeffs[n - k] = c.clone();
        if k < n {
            let mut shifted = m.clone();
            for i in 0..n {
                shifted[i * n + i] += &c;
            }
            let mut next = vec![BigInt::zero(); n * n];
            for i in 0..n {
                for l in 0..n {
                    if a_z[i * n + l].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let prod = &a_z[i * n + l] * &shifted[l * n + j];
                        next[i * n + j] += prod;
                    }
                }
            }
            m = next;
        }
    }
    coeffs
        .into_iter()
        .map(|c| {
            let m = BigInt::from(ctx.modulus());
            let r = ((&c % &m) + &m) % &m;
            r.to_u64().unwrap()
        })
        .collect()
}

pub fn poly_eval(ctx: &PrimeContext, coeffs: &[u64], x: u64) -> u64 {
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = ctx.add(ctx.mul(acc, x), c);
    }
    acc
}

/// Formal derivative evaluated at x.
pub fn poly_deriv_eval(ctx: &PrimeContext, coeffs: &[u64], x: u64) -> u64 {
    let mut acc = 0u64;
    for (k, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = ctx.add(ctx.mul(acc, x), ctx.mul(k as u64 % ctx.modulus(), c));
    }
    acc
}

/// Synthetic division by (X - lambda); the remainder is discarded (callers
/// only divide at roots).
pub fn poly_divide_linear(ctx: &PrimeContext, coeffs: &[u64], lambda: u64) -> Vec<u64> {
    let n = coeffs.len() - 1;
    let mut q = vec![0u64; n];
    let mut carry = 0u64;
    for k in (0..n).rev() {
        carry = ctx.add(coeffs[k + 1], ctx.mul(lambda, carry));
        q[k] = carry;
    }
    q
}

/// Roots of the polynomial mod p (brute scan) together with their
/// multiplicities as roots of the mod-p reduction.
pub fn roots_mod_p(ctx: &PrimeContext, coeffs: &[u64]) -> Vec<(u64, u32)> {
    let p = ctx.p();
    let fp_ctx = PrimeContext::new(p, 1, 1).expect("p >= 5");
    let mut out = Vec::new();
    for r in 0..p {
        let mut c: Vec<u64> = coeffs.iter().map(|&x| x % p).collect();
        let mut mult = 0u32;
        while c.len() > 1 && poly_eval(&fp_ctx, &c, r) == 0 {
            mult += 1;
            c = poly_divide_linear(&fp_ctx, &c, r);
        }
        if mult > 0 {
            out.push((r, mult));
        }
    }
    out
}

/// Newton-lift a simple root of `coeffs` from mod p to mod p^N. The
/// derivative at the root must be a unit.
pub fn hensel_lift_root(ctx: &PrimeContext, coeffs: &[u64], root_mod_p: u64) -> Result<u64> {
    let mut x = root_mod_p % ctx.modulus();
    let d0 = poly_deriv_eval(ctx, coeffs, x);
    if !ctx.is_unit(d0) {
        return Err(Error::InvalidParameter("root is not simple mod p".into()));
    }
    for _ in 0..=ctx.nprec() {
        let fx = poly_eval(ctx, coeffs, x);
        if fx == 0 {
            return Ok(x);
        }
        let dfx = poly_deriv_eval(ctx, coeffs, x);
        x = ctx.sub(x, ctx.mul(fx, ctx.inv(dfx)?));
    }
    let fx = poly_eval(ctx, coeffs, x);
    if fx == 0 {
        Ok(x)
    } else {
        Err(Error::InvalidParameter("Newton iteration failed to converge".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrimeContext {
        PrimeContext::new(5, 2, 10).unwrap()
    }

    #[test]
    fn echelon_worked_example() {
        // rows [[1,2],[1,7]] over Z/25: second step leaves [0,5].
        let e = echelonize_rows(ctx(), vec![vec![1, 2], vec![1, 7]]);
        assert_eq!(e.pivots, vec![(0, 0), (1, 1)]);
        assert_eq!(e.rows[1], vec![0, 5]);
        assert_eq!(e.precision_loss(), 1);
    }

    #[test]
    fn echelon_duplicate_and_zero_rows() {
        let e = echelonize_rows(ctx(), vec![vec![2, 3, 1], vec![2, 3, 1]]);
        assert_eq!(e.rank(), 1);
        assert_eq!(e.precision_loss(), 0);
        let z = echelonize_rows(ctx(), vec![vec![0, 0]]);
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn echelon_is_idempotent() {
        let e = echelonize_rows(ctx(), vec![vec![5, 1, 3], vec![10, 4, 1], vec![3, 3, 3]]);
        let e2 = echelonize_rows(ctx(), e.rows.clone());
        assert_eq!(e.rows, e2.rows);
        assert_eq!(e.pivots, e2.pivots);
    }

    #[test]
    fn reduce_recovers_coordinates() {
        let c = ctx();
        let e = echelonize_rows(c, vec![vec![1, 2, 0], vec![0, 1, 7]]);
        // 3*row0 + 4*row1
        let v = vec![3, c.add(6, 4), c.mul(4, 7)];
        let out = reduce_against(&e, &v);
        assert_eq!(out.residual_valuation, c.nprec());
        let recon: Vec<u64> = (0..3)
            .map(|j| {
                let mut acc = 0;
                for (i, r) in e.rows.iter().enumerate() {
                    acc = c.add(acc, c.mul(out.coords[i], r[j]));
                }
                acc
            })
            .collect();
        assert_eq!(recon, v);
    }

    #[test]
    fn charpoly_2x2() {
        let c = ctx();
        let a = Matrix::from_rows(c, vec![vec![1, 2], vec![3, 4]]);
        // X^2 - 5X - 2
        assert_eq!(charpoly(&a), vec![c.neg(2), c.neg(5), 1]);
    }

    #[test]
    fn charpoly_matches_bigint_path() {
        let c = PrimeContext::new(5, 4, 10).unwrap();
        let a = Matrix::from_rows(
            c,
            vec![
                vec![17, 2, 300, 4],
                vec![5, 600, 7, 8],
                vec![9, 10, 11, 12],
                vec![13, 14, 15, 16],
            ],
        );
        assert_eq!(charpoly(&a), charpoly_bigint(&a));
    }

    #[test]
    fn charpoly_with_dimension_divisible_by_p() {
        // n = 5 forces a division by p in Faddeev-LeVerrier; the guard digit
        // must absorb it.
        let c = PrimeContext::new(5, 3, 10).unwrap();
        let mut rows = vec![vec![0u64; 5]; 5];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = (i as u64 + 1) % c.modulus();
            if i + 1 < 5 {
                row[i + 1] = 3;
            }
        }
        let a = Matrix::from_rows(c, rows);
        assert_eq!(charpoly(&a), charpoly_bigint(&a));
        // triangular: char poly = prod (X - i)
        let cp = charpoly(&a);
        for i in 1..=5u64 {
            assert_eq!(poly_eval(&c, &cp, i), 0);
        }
    }

    #[test]
    fn hensel_lift_quadratic() {
        // X^2 - X + 5 mod 25: unit root above 1 is 21 (brute scan oracle).
        let c = ctx();
        let coeffs = vec![5, c.neg(1), 1];
        let brute: Vec<u64> = (0..25).filter(|&x| poly_eval(&c, &coeffs, x) == 0).collect();
        assert!(brute.contains(&21));
        assert_eq!(hensel_lift_root(&c, &coeffs, 1).unwrap(), 21);
    }

    #[test]
    fn roots_mod_p_with_multiplicity() {
        let c = ctx();
        // (X-1)^2 (X-2) = X^3 - 4X^2 + 5X - 2
        let coeffs = vec![c.neg(2), 5, c.neg(4), 1];
        let roots = roots_mod_p(&c, &coeffs);
        assert_eq!(roots, vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn fp_kernel_finds_relations() {
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 0]];
        let k = fp_left_kernel(5, &rows);
        assert_eq!(k.len(), 1);
        let combo = &k[0];
        for j in 0..3 {
            let s: u64 = (0..3).map(|i| combo[i] * rows[i][j]).sum::<u64>() % 5;
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn matrix_pow_and_idempotent() {
        let c = ctx();
        let a = Matrix::from_rows(c, vec![vec![1, 6], vec![0, 0]]);
        assert!(a.is_idempotent());
        assert_eq!(a.pow(5), a);
        let n = Matrix::from_rows(c, vec![vec![0, 1], vec![0, 0]]);
        assert!(n.pow(2).is_zero());
    }
}
