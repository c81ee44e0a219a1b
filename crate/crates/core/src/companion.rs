//! Companion-pair detection, the weight-one combiner
//! f = (alpha f_alpha - beta f_beta)/(alpha - beta), and the linear-algebra
//! classicality certificate.

use crate::arith::PrimeContext;
use crate::error::{Error, Result};
use crate::linalg::{hensel_lift_root, poly_eval};
use crate::overconv::EigenSystem;
use crate::qseries::QExpansion;
use crate::spaces::BasisMatrix;

/// A named boolean check with the precision exponent it was verified at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedCheck {
    pub name: String,
    pub holds: bool,
    pub effective_prec: u32,
}

impl NamedCheck {
    fn new(name: &str, holds: bool, prec: u32) -> Self {
        NamedCheck { name: name.to_string(), holds, effective_prec: prec }
    }
}

/// All unordered pairs of eigensystems that agree away from p (coefficient
/// by coefficient, at the stated precision) and whose U_p eigenvalues have
/// distinct reductions mod p. Pairs not sharing (ring, level, weight,
/// character) are never candidates.
pub fn pair_find(systems: &[EigenSystem]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..systems.len() {
        for j in (i + 1)..systems.len() {
            let (a, b) = (&systems[i], &systems[j]);
            if !a.ctx.same_ring(&b.ctx)
                || a.level != b.level
                || a.weight != b.weight
                || a.character != b.character
            {
                continue;
            }
            let ctx = a.ctx;
            let p = ctx.p();
            if a.up_eigenvalue % p == b.up_eigenvalue % p {
                continue;
            }
            let prec = a.precision.min(b.precision);
            let n_max = a.trunc().min(b.trunc());
            let agree = (1..=n_max)
                .filter(|n| n % p as usize != 0)
                .all(|n| ctx.valuation(ctx.sub(a.a_n(n), b.a_n(n))) >= prec);
            if agree {
                out.push((i, j));
            }
        }
    }
    out
}

/// The combined form (alpha f_alpha - beta f_beta)/(alpha - beta).
/// Requires alpha - beta to be a unit; no partial-precision fallback.
pub fn combine(
    f_alpha: &QExpansion,
    f_beta: &QExpansion,
    alpha: u64,
    beta: u64,
) -> Result<QExpansion> {
    let ctx = *f_alpha.ctx();
    if !f_alpha.ctx().same_ring(f_beta.ctx()) {
        return Err(Error::ContextMismatch);
    }
    if !ctx.is_unit(ctx.sub(alpha, beta)) {
        return Err(Error::DenominatorNotUnit);
    }
    let inv = ctx.inv(ctx.sub(alpha, beta))?;
    f_alpha.scale(alpha).sub(&f_beta.scale(beta)).map(|d| d.scale(inv))
}

/// The companion series f' = (f_alpha - f_beta)/(alpha - beta), which
/// coincides with V applied to the combined form.
pub fn v_complement(
    f_alpha: &QExpansion,
    f_beta: &QExpansion,
    alpha: u64,
    beta: u64,
) -> Result<QExpansion> {
    let ctx = *f_alpha.ctx();
    if !f_alpha.ctx().same_ring(f_beta.ctx()) {
        return Err(Error::ContextMismatch);
    }
    if !ctx.is_unit(ctx.sub(alpha, beta)) {
        return Err(Error::DenominatorNotUnit);
    }
    let inv = ctx.inv(ctx.sub(alpha, beta))?;
    f_alpha.sub(f_beta).map(|d| d.scale(inv))
}

/// Outcome of testing membership of a form in a classical basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassicalityOutcome {
    Member { coords: Vec<u64>, effective_prec: u32 },
    NotMember { residual_valuation: u32 },
}

impl ClassicalityOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, ClassicalityOutcome::Member { .. })
    }

    pub fn effective_prec(&self) -> u32 {
        match self {
            ClassicalityOutcome::Member { effective_prec, .. } => *effective_prec,
            ClassicalityOutcome::NotMember { .. } => 0,
        }
    }
}

/// Membership of f in a classical weight-one basis; the computational
/// meaning of "f is classical". NotInSpan is data here, not an error.
pub fn classicality_test(f: &QExpansion, basis: &BasisMatrix) -> Result<ClassicalityOutcome> {
    match basis.membership(f) {
        Ok(m) => Ok(ClassicalityOutcome::Member {
            coords: m.coords,
            effective_prec: m.effective_prec,
        }),
        Err(Error::NotInSpan { residual_valuation }) => {
            Ok(ClassicalityOutcome::NotMember { residual_valuation })
        }
        Err(e) => Err(e),
    }
}

/// alpha * beta = p^{k-1} chi(p) in Z/p^N; for k = 1 this reads
/// alpha*beta = chi(p). Returns the verdict and a valuation report.
pub fn check_corollary1(
    alpha: u64,
    beta: u64,
    k: i64,
    chi: &crate::arith::DirichletCharacter,
    ctx: &PrimeContext,
) -> (bool, String) {
    if chi.modulus() % ctx.p() == 0 {
        return (false, "character is not defined at p".into());
    }
    let chi_p = chi.eval(ctx.p() % chi.modulus());
    let expected = if k >= 1 {
        ctx.mul(ctx.pow(ctx.p(), (k - 1) as u64), chi_p)
    } else {
        return (false, format!("weight {k} < 1 not admissible"));
    };
    let product = ctx.mul(alpha, beta);
    let holds = product == expected;
    let report = format!(
        "alpha*beta = {product}, p^(k-1)*chi(p) = {expected}, v_p(alpha*beta) = {} (expected {})",
        ctx.valuation(product),
        k - 1
    );
    (holds, report)
}

/// Multiplicative twist data for the companion checks: the finite-precision
/// stand-in for the character the away-from-p eigenvalues are twisted by.
/// Trivial in the weight-one unramified-at-p case.
#[derive(Debug, Clone)]
pub enum Twist {
    Trivial,
    /// values[m] = tau(m) for m < values.len(); entries must be units.
    Table(Vec<u64>),
}

impl Twist {
    fn at(&self, m: u64, ctx: &PrimeContext) -> Result<u64> {
        match self {
            Twist::Trivial => Ok(1),
            Twist::Table(values) => {
                let v = values.get(m as usize).copied().ok_or(Error::TwistUndefined(m))?;
                if !ctx.is_unit(v) {
                    return Err(Error::TwistUndefined(m));
                }
                Ok(v)
            }
        }
    }
}

/// Report of the companion-relation suite between two eigensystems.
#[derive(Debug, Clone)]
pub struct CompanionReport {
    pub twist: String,
    pub checks: Vec<NamedCheck>,
}

impl CompanionReport {
    /// Verdict over the relation checks proper; the informational
    /// `uq-vanishing-hypothesis` line does not gate it.
    pub fn relations_pass(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.name != "uq-vanishing-hypothesis")
            .all(|c| c.holds)
    }
}

/// Companion-relation suite between eigensystems F and G:
///
/// (i)   a_m(G) = tau(m)^{-1} a_m(F) for all m <= M with p not dividing m
///       (the twisted away-from-p agreement);
/// (ii)  a_q(G) = tau(q)^{-1} a_q(F) for primes q dividing the level
///       (the U_q relation), plus an informational line recording whether
///       both vanish (the simplifying hypothesis under which companionship
///       is usually stated);
/// (iii) up(G) * up(F) = s_pp, the supplied value of the prime-to-p part of
///       the determinant at p.
pub fn check_companion_eigensystems(
    f: &EigenSystem,
    g: &EigenSystem,
    tau: &Twist,
    s_pp: u64,
) -> Result<CompanionReport> {
    if !f.ctx.same_ring(&g.ctx) || f.level != g.level {
        return Err(Error::ContextMismatch);
    }
    let ctx = f.ctx;
    let p = ctx.p();
    let prec = f.precision.min(g.precision);
    let n_max = f.trunc().min(g.trunc());
    let mut checks = Vec::new();

    // (i) twisted agreement away from p (prime-to-level indices; the
    // level-dividing ones are covered by check (ii)).
    let mut away_ok = true;
    for n in (1..=n_max).filter(|n| n % p as usize != 0) {
        let t = tau.at(n as u64, &ctx)?;
        let lhs = ctx.mul(g.a_n(n), t);
        if ctx.valuation(ctx.sub(lhs, f.a_n(n))) < prec {
            away_ok = false;
            break;
        }
    }
    checks.push(NamedCheck::new("tq-twisted-agreement", away_ok, prec));

    // (ii) U_q relation at primes dividing the level.
    let mut uq_ok = true;
    let mut uq_zero = true;
    for q in (2..=f.level).filter(|q| f.level % q == 0 && crate::qseries::is_prime_u64(*q)) {
        if (q as usize) > n_max {
            continue;
        }
        let t = tau.at(q, &ctx)?;
        let lhs = ctx.mul(g.a_n(q as usize), t);
        if ctx.valuation(ctx.sub(lhs, f.a_n(q as usize))) < prec {
            uq_ok = false;
        }
        if f.a_n(q as usize) != 0 || g.a_n(q as usize) != 0 {
            uq_zero = false;
        }
    }
    checks.push(NamedCheck::new("uq-twisted-agreement", uq_ok, prec));
    checks.push(NamedCheck::new("uq-vanishing-hypothesis", uq_zero, prec));

    // (iii) U_p product relation.
    let product = ctx.mul(f.up_eigenvalue, g.up_eigenvalue);
    let up_ok = ctx.valuation(ctx.sub(product, s_pp)) >= prec;
    checks.push(NamedCheck::new("up-product", up_ok, prec));

    let twist = match tau {
        Twist::Trivial => "trivial".to_string(),
        Twist::Table(_) => "table".to_string(),
    };
    Ok(CompanionReport { twist, checks })
}

/// The two p-stabilizations of a classical eigenform g of level prime to p:
/// alpha, beta are the Hensel-lifted roots of X^2 - a_p(g) X + chi(p)
/// p^{k-1}, and g_alpha = g - beta g(q^p) satisfies U_p g_alpha = alpha
/// g_alpha (symmetrically for beta). Both roots must be units with distinct
/// mod-p reductions, which is the weight-one ordinary situation.
#[derive(Debug, Clone)]
pub struct StabilizedPair {
    pub alpha: u64,
    pub beta: u64,
    pub f_alpha: QExpansion,
    pub f_beta: QExpansion,
}

pub fn stabilization_pair(g: &QExpansion) -> Result<StabilizedPair> {
    let ctx = *g.ctx();
    let meta = g.meta().ok_or(Error::MissingMetadata)?;
    let p = ctx.p();
    if g.trunc() < p as usize {
        return Err(Error::TruncationTooShort { needed: p as usize, have: g.trunc() });
    }
    let a_p = g.coeff(p as usize);
    let chi_p = meta.character.eval(p % meta.character.modulus());
    let det = ctx.mul(chi_p, ctx.pow_i64(p % ctx.modulus(), meta.weight - 1)?);
    // X^2 - a_p X + det
    let poly = vec![det, ctx.neg(a_p), 1];
    let mut unit_roots: Vec<u64> = (1..p).filter(|&r| poly_eval(&ctx, &poly, r) % p == 0).collect();
    unit_roots.sort_unstable();
    if unit_roots.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "stabilization polynomial has {} distinct unit roots mod p, need 2",
            unit_roots.len()
        )));
    }
    let alpha = hensel_lift_root(&ctx, &poly, unit_roots[0])?;
    let beta = hensel_lift_root(&ctx, &poly, unit_roots[1])?;
    let gv = g.v_op();
    let f_alpha = g.sub(&gv.scale(beta))?;
    let f_beta = g.sub(&gv.scale(alpha))?;
    Ok(StabilizedPair { alpha, beta, f_alpha, f_beta })
}

/// The combined form with its companion data and every invariant check,
/// plus the membership certificate in a classical weight-one basis.
#[derive(Debug, Clone)]
pub struct WeightOneCertificate {
    pub combined: QExpansion,
    pub alpha: u64,
    pub beta: u64,
    pub companion_series: QExpansion,
    pub membership: ClassicalityOutcome,
    pub checks: Vec<NamedCheck>,
    /// min over the certificate of the exponents things were verified at;
    /// 0 means the certificate is VACUOUS.
    pub effective_prec: u32,
}

impl WeightOneCertificate {
    pub fn is_vacuous(&self) -> bool {
        self.effective_prec == 0
    }

    pub fn all_pass(&self) -> bool {
        self.membership.is_member() && self.checks.iter().all(|c| c.holds)
    }
}

/// Assemble the certificate for a companion pair of U_p eigenforms:
/// combines them, checks the invariants the construction forces
/// (away-from-p agreement, a_p = alpha + beta, alpha beta = chi(p) p^{k-1},
/// companion = V of the combined form, U_p eigen-relations) and embeds the
/// classicality membership result.
pub fn weight_one_certificate(
    f_alpha: &QExpansion,
    f_beta: &QExpansion,
    alpha: u64,
    beta: u64,
    basis: &BasisMatrix,
) -> Result<WeightOneCertificate> {
    let ctx = *f_alpha.ctx();
    let p = ctx.p() as usize;
    let nprec = ctx.nprec();
    let combined = combine(f_alpha, f_beta, alpha, beta)?;
    let companion_series = v_complement(f_alpha, f_beta, alpha, beta)?;
    let mut checks = Vec::new();

    // U_p eigen-relations on the inputs.
    let ua = f_alpha.u_p();
    let ub = f_beta.u_p();
    let alpha_rel = ua.agrees_with(&f_alpha.scale(alpha));
    let beta_rel = ub.agrees_with(&f_beta.scale(beta));
    checks.push(NamedCheck::new("up-eigen-alpha", alpha_rel, nprec));
    checks.push(NamedCheck::new("up-eigen-beta", beta_rel, nprec));

    // away-from-p agreement of the combined form with both inputs
    let n_max = combined.trunc();
    let away = (1..=n_max)
        .filter(|n| n % p != 0)
        .all(|n| combined.coeff(n) == f_alpha.coeff(n) && combined.coeff(n) == f_beta.coeff(n));
    checks.push(NamedCheck::new("away-from-p-agreement", away, nprec));

    // a_p(f) = alpha + beta for normalized inputs
    let ap_ok = combined.trunc() >= p && combined.coeff(p) == ctx.add(alpha, beta);
    checks.push(NamedCheck::new("ap-sum", ap_ok, nprec));

    // alpha beta = chi(p) p^{k-1}
    if let Some(meta) = combined.meta().or(f_alpha.meta()) {
        let (c1, _) = check_corollary1(alpha, beta, meta.weight, &meta.character, &ctx);
        checks.push(NamedCheck::new("alphabeta-product", c1, nprec));
    }

    // f' = V(f) up to truncation
    let vf = combined.v_op();
    checks.push(NamedCheck::new("companion-is-v-of-combined", companion_series.agrees_with(&vf), nprec));

    let membership = classicality_test(&combined, basis)?;
    let effective_prec = membership.effective_prec();
    Ok(WeightOneCertificate {
        combined,
        alpha,
        beta,
        companion_series,
        membership,
        checks,
        effective_prec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{kronecker_character, DirichletCharacter};
    use crate::qseries::{theta_series, Meta};
    use crate::spaces::{SourceTag, SpaceDescriptor};

    fn ctx() -> PrimeContext {
        PrimeContext::new(13, 4, 120).unwrap()
    }

    /// The weight-one level-23 cusp form (theta difference) / 2.
    fn weight_one_g(c: &PrimeContext) -> QExpansion {
        let t1 = theta_series(1, 1, 6, c).unwrap();
        let t2 = theta_series(2, 1, 3, c).unwrap();
        let half = c.inv(2).unwrap();
        t1.sub(&t2).unwrap().scale(half)
    }

    #[test]
    fn weight_one_g_first_coefficients() {
        // q - q^2 - q^3 + q^6 + ... (eta(z) eta(23z))
        let c = ctx();
        let g = weight_one_g(&c);
        assert_eq!(g.coeff(0), 0);
        assert_eq!(g.coeff(1), 1);
        assert_eq!(g.coeff(2), c.neg(1));
        assert_eq!(g.coeff(3), c.neg(1));
        assert_eq!(g.coeff(4), 0);
        assert_eq!(g.coeff(6), 1);
        assert_eq!(g.coeff(13), c.neg(1));
        assert_eq!(g.coeff(23), 1);
    }

    #[test]
    fn stabilization_pair_eigen_relations() {
        let c = ctx();
        let g = weight_one_g(&c);
        let pair = stabilization_pair(&g).unwrap();
        // alpha, beta are the Hensel roots of X^2 + X + 1 (a_13 = -1,
        // chi(13) = 1): the primitive cube roots of unity, 3 and 9 mod 13.
        assert_eq!(pair.alpha % 13, 3);
        assert_eq!(pair.beta % 13, 9);
        assert_eq!(c.mul(pair.alpha, pair.beta), 1);
        assert_eq!(c.add(pair.alpha, pair.beta), c.neg(1));
        // U_p eigen-relations hold exactly on the truncation
        assert!(pair.f_alpha.u_p().agrees_with(&pair.f_alpha.scale(pair.alpha)));
        assert!(pair.f_beta.u_p().agrees_with(&pair.f_beta.scale(pair.beta)));
    }

    #[test]
    fn combine_recovers_g_exactly() {
        let c = ctx();
        let g = weight_one_g(&c);
        let pair = stabilization_pair(&g).unwrap();
        let back = combine(&pair.f_alpha, &pair.f_beta, pair.alpha, pair.beta).unwrap();
        assert_eq!(back.coeffs(), g.coeffs());
        // companion = g(q^p)
        let comp = v_complement(&pair.f_alpha, &pair.f_beta, pair.alpha, pair.beta).unwrap();
        assert!(comp.agrees_with(&g.v_op()));
    }

    #[test]
    fn combine_requires_unit_denominator() {
        let c = ctx();
        let g = weight_one_g(&c);
        assert_eq!(combine(&g, &g, 5, c.add(5, 13)), Err(Error::DenominatorNotUnit));
    }

    #[test]
    fn combine_a1_is_one() {
        let c = ctx();
        let g = weight_one_g(&c);
        let pair = stabilization_pair(&g).unwrap();
        let f = combine(&pair.f_alpha, &pair.f_beta, pair.alpha, pair.beta).unwrap();
        assert_eq!(f.coeff(1), 1);
        assert_eq!(f.coeff(13), c.add(pair.alpha, pair.beta));
    }

    #[test]
    fn pair_find_on_stabilizations() {
        let c = ctx();
        let g = weight_one_g(&c);
        let pair = stabilization_pair(&g).unwrap();
        let ea = EigenSystem {
            ctx: c,
            weight: 1,
            level: 23,
            character: kronecker_character(-23, &c).unwrap(),
            up_eigenvalue: pair.alpha,
            a: pair.f_alpha.coeffs().to_vec(),
            precision: c.nprec(),
        };
        let eb = EigenSystem { up_eigenvalue: pair.beta, a: pair.f_beta.coeffs().to_vec(), ..ea.clone() };
        assert_eq!(pair_find(&[ea.clone()]), vec![]);
        assert_eq!(pair_find(&[ea.clone(), eb.clone()]), vec![(0, 1)]);
        // perturb one away-from-p coefficient: no pair
        let mut bad = eb.clone();
        bad.a[7] = c.add(bad.a[7], 1);
        assert_eq!(pair_find(&[ea.clone(), bad]), vec![]);
        // same residual U_p eigenvalue: no pair
        let mut same = eb;
        same.up_eigenvalue = c.add(pair.alpha, 13);
        assert_eq!(pair_find(&[ea, same]), vec![]);
    }

    #[test]
    fn corollary1_examples() {
        let c = ctx();
        let chi = kronecker_character(-23, &c).unwrap();
        // k = 1: alpha beta = chi(13) = 1, with beta = alpha^{-1}
        let (ok, _) = check_corollary1(5, c.inv(5).unwrap(), 1, &chi, &c);
        assert!(ok);
        let (bad, _) = check_corollary1(3, 9, 1, &chi, &c); // 27 != 1 mod 13^4
        assert!(!bad);
        // k = 2: valuation of alpha*beta must be exactly 1
        let triv = DirichletCharacter::trivial(c);
        let (ok2, report) = check_corollary1(13, 1, 2, &triv, &c);
        assert!(ok2);
        assert!(report.contains("v_p(alpha*beta) = 1"));
    }

    #[test]
    fn companion_checker_on_fixture() {
        let c = ctx();
        let g = weight_one_g(&c);
        let chi = kronecker_character(-23, &c).unwrap();
        let pair = stabilization_pair(&g).unwrap();
        let ea = EigenSystem {
            ctx: c,
            weight: 1,
            level: 23,
            character: chi.clone(),
            up_eigenvalue: pair.alpha,
            a: pair.f_alpha.coeffs().to_vec(),
            precision: c.nprec(),
        };
        let eb = EigenSystem {
            up_eigenvalue: pair.beta,
            a: pair.f_beta.coeffs().to_vec(),
            ..ea.clone()
        };
        let s_pp = chi.eval(13 % 23);
        let rep = check_companion_eigensystems(&ea, &eb, &Twist::Trivial, s_pp).unwrap();
        assert!(rep.relations_pass());
        // a_23(g) = 1, so the simplifying vanishing hypothesis does NOT hold
        // on this fixture even though the twisted U_q relation does.
        let uq_zero = rep.checks.iter().find(|c| c.name == "uq-vanishing-hypothesis").unwrap();
        assert!(!uq_zero.holds);
        // perturb a single away-from-p coefficient by a unit: check (i) fails
        let mut bad = eb.clone();
        bad.a[7] = c.add(bad.a[7], 1);
        let rep2 = check_companion_eigensystems(&ea, &bad, &Twist::Trivial, s_pp).unwrap();
        assert!(!rep2.relations_pass());
        assert!(!rep2.checks.iter().find(|c| c.name == "tq-twisted-agreement").unwrap().holds);
    }

    #[test]
    fn certificate_on_theta_basis() {
        let c = ctx();
        let t1 = theta_series(1, 1, 6, &c).unwrap();
        let t2 = theta_series(2, 1, 3, &c).unwrap();
        let chi = kronecker_character(-23, &c).unwrap();
        let desc = SpaceDescriptor {
            level: 23,
            weight: 1,
            character: chi,
            source: SourceTag::Generated,
            dim_hint: Some(2),
            sturm_bound: Some(4),
        };
        let basis = BasisMatrix::echelonize(c, desc, &[t1, t2]).unwrap();
        assert_eq!(basis.precision_loss(), 0);
        let g = weight_one_g(&c);
        let pair = stabilization_pair(&g).unwrap();
        let cert =
            weight_one_certificate(&pair.f_alpha, &pair.f_beta, pair.alpha, pair.beta, &basis)
                .unwrap();
        assert!(cert.all_pass(), "checks: {:?}", cert.checks);
        assert!(!cert.is_vacuous());
        assert_eq!(cert.effective_prec, 4);
        // perturbing the form outside the span at valuation 0 is caught
        let mut coeffs = g.coeffs().to_vec();
        coeffs[4] = c.add(coeffs[4], 1); // a_4(theta rows) cannot absorb this
        let perturbed = QExpansion::new(c, coeffs, g.meta().cloned()).unwrap();
        match classicality_test(&perturbed, &basis).unwrap() {
            ClassicalityOutcome::NotMember { residual_valuation } => {
                assert_eq!(residual_valuation, 0)
            }
            other => panic!("expected NotMember, got {other:?}"),
        }
    }

    #[test]
    fn meta_for_weight_one_g() {
        // the theta difference carries level-23 metadata with the right
        // character, needed by stabilization_pair
        let c = ctx();
        let g = weight_one_g(&c);
        let meta = g.meta().expect("difference of same-type thetas keeps metadata");
        assert_eq!(meta.level, 23);
        assert_eq!(meta.weight, 1);
    }
}
