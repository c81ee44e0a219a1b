//! Overconvergent machinery at the q-expansion level: layered bases g/E^j,
//! the U_p matrix, the ordinary projector e = lim U_p^{r!}, and ordinary
//! eigensystem extraction.

use crate::arith::{DirichletCharacter, PrimeContext};
use crate::error::{Error, Result};
use crate::linalg::{
    charpoly, echelonize_rows, hensel_lift_root, poly_divide_linear, reduce_against, roots_mod_p,
    Echelon, Matrix,
};
use crate::qseries::{eisenstein_e, QExpansion};
use crate::spaces::{BasisMatrix, SourceTag, SpaceDescriptor};

/// Layered basis of an overconvergent space: layer j holds forms g/E^j with
/// g classical of weight k + j(p-1), and `flat` is the echelonized union.
#[derive(Debug, Clone)]
pub struct KatzBasis {
    pub ctx: PrimeContext,
    pub weight: i64,
    pub level: u64,
    pub character: DirichletCharacter,
    pub layers: Vec<Vec<QExpansion>>,
    pub depth: usize,
    pub flat: BasisMatrix,
}

impl KatzBasis {
    pub fn dim(&self) -> usize {
        self.flat.rank()
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.len()).collect()
    }
}

/// Heuristic depth at which the layered basis resolves the ordinary part at
/// precision p^N; always confirmed afterwards by rank stability under J+1.
pub fn depth_heuristic(ctx: &PrimeContext) -> usize {
    let p = ctx.p() as usize;
    let n = ctx.nprec() as usize;
    let q = n * (p + 1);
    q / (p - 1) + usize::from(q % (p - 1) != 0) + 1
}

/// Build the layered basis for weight k from classical sources of weights
/// k + j(p-1), j = 0..=depth. Layer j is a complement of E * (span below)
/// inside source j, computed by echelon extension and divided by E^j.
pub fn build_katz_basis(
    k: i64,
    level: u64,
    character: &DirichletCharacter,
    classical_sources: &[BasisMatrix],
    depth: usize,
    ctx: &PrimeContext,
) -> Result<KatzBasis> {
    if classical_sources.len() <= depth {
        return Err(Error::MissingSource { layer: classical_sources.len() });
    }
    let p = ctx.p() as i64;
    for (j, src) in classical_sources.iter().enumerate().take(depth + 1) {
        let expect = k + j as i64 * (p - 1);
        if src.descriptor().weight != expect {
            return Err(Error::InvalidParameter(format!(
                "source {j} has weight {} but layer needs {expect}",
                src.descriptor().weight
            )));
        }
        if !src.ctx().same_ring(ctx) {
            return Err(Error::ContextMismatch);
        }
    }
    let e = eisenstein_e(ctx);
    let inv_e = e.invert()?;
    let trunc = classical_sources[..=depth]
        .iter()
        .map(|s| s.trunc())
        .min()
        .unwrap()
        .min(ctx.m());

    let mut layers: Vec<Vec<QExpansion>> = Vec::with_capacity(depth + 1);
    layers.push(classical_sources[0].rows_qexp());

    for j in 1..=depth {
        let source = &classical_sources[j];
        let prev = &classical_sources[j - 1];
        // E * (previous source) spans E * (everything below it).
        let mut ech = Echelon::empty(*ctx, trunc + 1);
        for r in prev.rows_qexp() {
            let lifted = r.mul(&e)?;
            if source.membership(&lifted).is_err() {
                return Err(Error::RankDeficiency(format!(
                    "E * (weight {} row) is not in the weight {} source",
                    prev.descriptor().weight,
                    source.descriptor().weight
                )));
            }
            ech.insert(lifted.coeffs()[..=trunc].to_vec());
        }
        // Complement by echelon extension: source rows that enlarge the
        // span, reduced against it, form W_j.
        let mut w_rows: Vec<QExpansion> = Vec::new();
        for r in source.rows_qexp() {
            if let Some(reduced) = ech.insert(r.coeffs()[..=trunc].to_vec()) {
                w_rows.push(QExpansion::new(*ctx, reduced, Some(source.meta()))?);
            }
        }
        // Divide by E^j.
        let mut inv_pow = QExpansion::one(*ctx, trunc);
        for _ in 0..j {
            inv_pow = inv_pow.mul(&inv_e)?;
        }
        let layer: Result<Vec<QExpansion>> = w_rows.into_iter().map(|w| w.mul(&inv_pow)).collect();
        layers.push(layer?);
    }

    let all: Vec<QExpansion> = layers.iter().flatten().cloned().collect();
    let descriptor = SpaceDescriptor {
        level,
        weight: k,
        character: character.clone(),
        source: SourceTag::Generated,
        dim_hint: None,
        sturm_bound: None,
    };
    let flat = BasisMatrix::echelonize(*ctx, descriptor, &all)?;
    if flat.rank() != all.len() {
        return Err(Error::RankDeficiency(format!(
            "flat rank {} != sum of layer sizes {}",
            flat.rank(),
            all.len()
        )));
    }
    Ok(KatzBasis {
        ctx: *ctx,
        weight: k,
        level,
        character: character.clone(),
        layers,
        depth,
        flat,
    })
}

/// Matrix of U_p on the flat basis: u_p(b_i) = sum_j A_ij b_j.
pub fn up_matrix(kb: &KatzBasis) -> Result<Matrix> {
    kb.flat.hecke_matrix(|f| Ok(f.u_p()))
}

/// The idempotent limit of U_p^{r!} together with its stabilization data.
#[derive(Debug, Clone)]
pub struct OrdinaryProjector {
    pub e_matrix: Matrix,
    pub stabilization_exponent: u64,
    /// Rank of the idempotent = dimension of the ordinary part.
    pub rank: usize,
    /// Echelonized coordinate rows spanning the image of e.
    pub image_coords: Echelon,
}

/// Iterate C_1 = A, C_{r+1} = C_r^{r+1} (so C_r = A^{r!}) until the sequence
/// is constant *and* idempotent. Consecutive equality alone is not
/// convergence: for A = 7 mod 25 the sequence passes through -1 = (-1)^3.
pub fn ordinary_projector(a: &Matrix) -> Result<OrdinaryProjector> {
    let ctx = *a.ctx();
    let r_max: u64 = (ctx.nprec() as u64)
        .saturating_mul(ctx.p() - 1)
        .saturating_mul(ctx.modulus());
    let mut c = a.clone();
    let mut r: u64 = 1;
    loop {
        let next = c.pow(r + 1);
        if next == c && next.is_idempotent() {
            break;
        }
        c = next;
        r += 1;
        if r > r_max {
            return Err(Error::NoStabilization(r_max));
        }
    }
    let e_matrix = c;
    debug_assert_eq!(e_matrix.mul(a), a.mul(&e_matrix));
    let image_coords = echelonize_rows(ctx, e_matrix.rows_vec());
    // The image of an idempotent is a free direct summand, so its echelon
    // must come out with unit pivots.
    if image_coords.pivots.iter().any(|&(_, v)| v != 0) {
        return Err(Error::RankDeficiency(
            "projector image is not a free direct summand".into(),
        ));
    }
    let rank = image_coords.rank();
    Ok(OrdinaryProjector { e_matrix, stabilization_exponent: r, rank, image_coords })
}

impl OrdinaryProjector {
    /// q-expansions spanning the image of e inside the layered basis.
    pub fn image_basis(&self, kb: &KatzBasis) -> Result<BasisMatrix> {
        let rows: Vec<QExpansion> = self
            .image_coords
            .rows
            .iter()
            .map(|c| kb.flat.combination(c))
            .collect();
        BasisMatrix::echelonize(kb.ctx, kb.flat.descriptor().clone(), &rows)
    }

    /// Restriction of a matrix commuting with e to the image coordinates:
    /// solves M A = X M where M holds the echelonized image rows.
    pub fn restrict_to_image(&self, a: &Matrix) -> Matrix {
        let mut rows = Vec::with_capacity(self.rank);
        for row in &self.image_coords.rows {
            let image_of_row = a.vec_mul(row);
            let out = reduce_against(&self.image_coords, &image_of_row);
            debug_assert_eq!(out.residual_valuation, a.ctx().nprec());
            rows.push(out.coords);
        }
        Matrix::from_rows(*a.ctx(), rows)
    }
}

/// Push a form through the projector: coordinates in the flat basis, then
/// through e, then reassembled.
pub fn ordinary_projection_of_form(
    f: &QExpansion,
    kb: &KatzBasis,
    proj: &OrdinaryProjector,
) -> Result<QExpansion> {
    let m = kb.flat.membership(f)?;
    let projected = proj.e_matrix.vec_mul(&m.coords);
    Ok(kb.flat.combination(&projected))
}

/// Normalized Hecke eigenvalue data of an ordinary eigenform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenSystem {
    pub ctx: PrimeContext,
    pub weight: i64,
    pub level: u64,
    pub character: DirichletCharacter,
    pub up_eigenvalue: u64,
    /// a[n] is the coefficient a_n, n = 0..=trunc, with a_1 = 1.
    pub a: Vec<u64>,
    /// Effective precision exponent (<= N) of every entry.
    pub precision: u32,
}

impl EigenSystem {
    pub fn a_n(&self, n: usize) -> u64 {
        self.a[n]
    }

    pub fn trunc(&self) -> usize {
        self.a.len() - 1
    }

    pub fn q_expansion(&self) -> QExpansion {
        QExpansion::new(
            self.ctx,
            self.a.clone(),
            Some(crate::qseries::Meta {
                level: self.level,
                weight: self.weight,
                character: self.character.clone(),
            }),
        )
        .expect("eigensystem coefficients form a valid expansion")
    }
}

/// Anomalies met while extracting eigensystems; the affected block is
/// skipped and reported, never silently repaired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractionIssue {
    RepeatedResidualEigenvalue { residue: u64, multiplicity: u32 },
    NonUnitResidualEigenvalue { residue: u64 },
    NonUnitA1 { eigenvalue: u64 },
    HeckeRelationFailed { eigenvalue: u64, prime: u64 },
}

impl std::fmt::Display for ExtractionIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtractionIssue::RepeatedResidualEigenvalue { residue, multiplicity } => write!(
                f,
                "repeated residual U_p eigenvalue {residue} (multiplicity {multiplicity}); block skipped"
            ),
            ExtractionIssue::NonUnitResidualEigenvalue { residue } => {
                write!(f, "non-unit residual eigenvalue {residue} inside the ordinary part")
            }
            ExtractionIssue::NonUnitA1 { eigenvalue } => {
                write!(f, "eigenvector for {eigenvalue} has non-unit a_1")
            }
            ExtractionIssue::HeckeRelationFailed { eigenvalue, prime } => {
                write!(f, "T_{prime} relation failed on the eigenvector for {eigenvalue}")
            }
        }
    }
}

/// Extract normalized eigensystems from the ordinary part: factor the
/// characteristic polynomial of A|image mod p, Hensel-lift each simple unit
/// root, take a unit row of (charpoly/(X - lambda))(A|image) as the left
/// eigenvector, normalize a_1 = 1 and read coefficients off the
/// q-expansion. Each system is validated against T_q for the supplied good
/// primes.
pub fn ordinary_eigensystems(
    proj: &OrdinaryProjector,
    a: &Matrix,
    kb: &KatzBasis,
    validate_primes: &[u64],
) -> Result<(Vec<EigenSystem>, Vec<ExtractionIssue>)> {
    let ctx = kb.ctx;
    let mut systems = Vec::new();
    let mut issues = Vec::new();
    if proj.rank == 0 {
        return Ok((systems, issues));
    }
    let a_im = proj.restrict_to_image(a);
    let cp = charpoly(&a_im);
    let precision = ctx.nprec() - kb.flat.precision_loss().min(ctx.nprec());
    for (residue, mult) in roots_mod_p(&ctx, &cp) {
        if residue == 0 {
            issues.push(ExtractionIssue::NonUnitResidualEigenvalue { residue });
            continue;
        }
        if mult > 1 {
            issues
                .push(ExtractionIssue::RepeatedResidualEigenvalue { residue, multiplicity: mult });
            continue;
        }
        let lambda = hensel_lift_root(&ctx, &cp, residue)?;
        let g = poly_divide_linear(&ctx, &cp, lambda);
        let g_of_a = matrix_poly_eval(&ctx, &g, &a_im);
        // Rows of g(A|im) are left eigenvectors for lambda: g(A)(A - lambda)
        // = charpoly(A) = 0. Some row has a unit entry because the trace of
        // g(A|im) is g(lambda), a unit.
        let Some(row_idx) =
            (0..g_of_a.nrows()).find(|&i| g_of_a.row(i).iter().any(|&x| ctx.is_unit(x)))
        else {
            issues.push(ExtractionIssue::NonUnitResidualEigenvalue { residue });
            continue;
        };
        let v_im = g_of_a.row(row_idx).to_vec();
        // Back to flat coordinates, then to a q-expansion.
        let mut v_flat = vec![0u64; kb.dim()];
        for (ci, row) in v_im.iter().zip(&proj.image_coords.rows) {
            for (x, &b) in v_flat.iter_mut().zip(row) {
                *x = ctx.add(*x, ctx.mul(*ci, b));
            }
        }
        let f = kb.flat.combination(&v_flat);
        let a1 = f.coeff(1);
        if !ctx.is_unit(a1) {
            issues.push(ExtractionIssue::NonUnitA1 { eigenvalue: lambda });
            continue;
        }
        let f = f.scale(ctx.inv(a1)?);
        // a_p of a normalized U_p eigenvector is the eigenvalue itself.
        debug_assert_eq!(
            ctx.valuation(ctx.sub(f.coeff(ctx.p() as usize), lambda)) >= precision,
            true
        );
        let mut ok = true;
        for &q in validate_primes {
            if q == ctx.p() || kb.level % q == 0 {
                continue;
            }
            let tf = f.t_q(q)?;
            let scaled = f.scale(f.coeff(q as usize));
            let agree = tf
                .coeffs()
                .iter()
                .zip(scaled.coeffs())
                .all(|(&x, &y)| ctx.valuation(ctx.sub(x, y)) >= precision);
            if !agree {
                issues.push(ExtractionIssue::HeckeRelationFailed { eigenvalue: lambda, prime: q });
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        systems.push(EigenSystem {
            ctx,
            weight: kb.weight,
            level: kb.level,
            character: kb.character.clone(),
            up_eigenvalue: lambda,
            a: f.coeffs().to_vec(),
            precision,
        });
    }
    // Deterministic order regardless of the root scan.
    systems.sort_by_key(|s| s.up_eigenvalue);
    Ok((systems, issues))
}

fn matrix_poly_eval(ctx: &PrimeContext, coeffs: &[u64], a: &Matrix) -> Matrix {
    let n = a.nrows();
    let mut acc = Matrix::zero(*ctx, n, n);
    for &c in coeffs.iter().rev() {
        acc = acc.mul(a);
        for i in 0..n {
            acc.set(i, i, ctx.add(acc.get(i, i), c));
        }
    }
    acc
}

/// The two halves of the spectrum split: U_p invertible on the image of e
/// and topologically nilpotent on the kernel.
pub fn spectral_split_holds(a: &Matrix, proj: &OrdinaryProjector) -> bool {
    let ctx = *a.ctx();
    let n = a.nrows();
    if proj.rank > 0 {
        let a_im = proj.restrict_to_image(a);
        let cp = charpoly(&a_im);
        // det(A|image) is +-cp[0]; it must be a unit.
        if !ctx.is_unit(cp[0]) {
            return false;
        }
    }
    let one_minus_e = Matrix::identity(ctx, n).sub(&proj.e_matrix);
    let nil = a.mul(&one_minus_e);
    let exponent = (ctx.nprec() as u64).saturating_mul(n as u64).max(1);
    nil.pow(exponent).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrimeContext {
        PrimeContext::new(5, 2, 10).unwrap()
    }

    #[test]
    fn projector_diagonal_example() {
        let c = ctx();
        let a = Matrix::from_rows(c, vec![vec![1, 0], vec![0, 5]]);
        let proj = ordinary_projector(&a).unwrap();
        assert_eq!(proj.e_matrix, Matrix::from_rows(c, vec![vec![1, 0], vec![0, 0]]));
        assert_eq!(proj.rank, 1);
    }

    #[test]
    fn projector_worked_2x2() {
        // e([[1,1],[0,5]]) = [[1,6],[0,0]] mod 25: kills the eigenvector
        // (1,4) of 5 and fixes (1,0); 1 + 4*6 = 0 mod 25.
        let c = ctx();
        let a = Matrix::from_rows(c, vec![vec![1, 1], vec![0, 5]]);
        let proj = ordinary_projector(&a).unwrap();
        assert_eq!(proj.e_matrix, Matrix::from_rows(c, vec![vec![1, 6], vec![0, 0]]));
        assert!(proj.e_matrix.is_idempotent());
        assert_eq!(proj.e_matrix.mul(&a), a.mul(&proj.e_matrix));
        assert_eq!(proj.rank, 1);
        assert!(spectral_split_holds(&a, &proj));
    }

    #[test]
    fn projector_nilpotent_is_zero() {
        let c = ctx();
        let a = Matrix::from_rows(c, vec![vec![0, 1], vec![0, 0]]);
        let proj = ordinary_projector(&a).unwrap();
        assert!(proj.e_matrix.is_zero());
        assert_eq!(proj.rank, 0);
    }

    #[test]
    fn projector_handles_order_four_unit() {
        // 7^2 = -1 mod 25: the iterate sequence visits -1 with
        // C_3 = (-1)^3 = C_2, which is not idempotent and must be skipped.
        let c = ctx();
        let a = Matrix::from_rows(c, vec![vec![7]]);
        let proj = ordinary_projector(&a).unwrap();
        assert_eq!(proj.e_matrix, Matrix::identity(c, 1));
    }

    #[test]
    fn projector_unipotent_block_is_identity() {
        let c = ctx();
        let a = Matrix::from_rows(c, vec![vec![1, 1], vec![0, 1]]);
        let proj = ordinary_projector(&a).unwrap();
        assert_eq!(proj.e_matrix, Matrix::identity(c, 2));
        assert_eq!(proj.rank, 2);
    }

    #[test]
    fn restriction_to_image() {
        let c = ctx();
        let a = Matrix::from_rows(c, vec![vec![2, 1], vec![0, 10]]);
        let proj = ordinary_projector(&a).unwrap();
        assert_eq!(proj.rank, 1);
        let a_im = proj.restrict_to_image(&a);
        assert_eq!(a_im.nrows(), 1);
        assert_eq!(a_im.get(0, 0) % 5, 2);
        assert!(spectral_split_holds(&a, &proj));
    }

    #[test]
    fn depth_heuristic_values() {
        let c5 = PrimeContext::new(5, 4, 10).unwrap();
        assert_eq!(depth_heuristic(&c5), 7); // ceil(4 * 6/4) + 1
        let c13 = PrimeContext::new(13, 5, 10).unwrap();
        assert_eq!(depth_heuristic(&c13), 7); // ceil(5 * 14/12) + 1 = 6+1
    }
}
