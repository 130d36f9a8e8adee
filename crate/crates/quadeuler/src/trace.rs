//! The duality pairing on the middle graded piece.
//!
//! Write `G_0, .., G_{n+r+1}` for the scaled generators `Y_i F_i` and
//! `X_j Fx_j` and `M` for their Jacobian matrix with respect to all
//! variables.  Deleting row 0 of `M` leaves a matrix whose signed maximal
//! minors assemble into a single class: there is a polynomial `Ct` of the
//! socle bidegree of `Jt` with
//!
//! `(m + 1) Y_i X_j Ct = (-1)^j det(M_del(0, r+1+j)) Y_i
//!                     + (-1)^(r+i) det(M_del(0, i)) X_j`
//!
//! for every pair `(i, j)`; the identities are checked, at the polynomial
//! level first and in the quotient ring where that fails.  Pulling `Ct`
//! back through the multiplication isomorphism `J^rho -> Jt` (multiply by
//! the product of all variables) produces the distinguished generator `C`
//! of the one-dimensional piece `J^rho`, normalized so that for middle
//! classes `A`, `B` with `A B = lambda C` the cohomological pairing is
//! `(-1)^(r+1) m^(n+1) binom(n+r, r) lambda`.

use crate::field::{FieldSpec, Scalar};
use crate::gradedpiece::{quotient_piece, GradedError, QuotientPiece};
use crate::jacobian::{JacobianSystem, SoclePieces};
use crate::poly::{det_bareiss, BiPoly, Bidegree, Monomial, PolyCtx, PolyError};
use num_bigint::BigInt;
use num_traits::One;

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum TraceError {
    #[error("defining identity for Ct fails at pair (i = {i}, j = {j}) even in the quotient")]
    RelationViolated { i: usize, j: usize },
    #[error("the multiplication map J^rho -> Jt kills the generator (psi degenerate)")]
    PsiDegenerate,
    #[error("binomial({n}, {k}) is not invertible in the base field")]
    BinomNotInvertible { n: usize, k: usize },
    #[error("the constructed class C reduces to zero and cannot generate J^rho")]
    CNotGenerating,
    #[error("socle pieces have dimensions {dim_jrho} and {dim_jtilde}, expected 1 and 1")]
    SocleDims { dim_jrho: usize, dim_jtilde: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

/// Jacobian matrix `M[i][j] = dG_i / dZ_j` of the scaled generators with
/// respect to `Z = (Y_0, .., Y_r, X_0, .., X_n)`.
pub fn jacobi_matrix(sys: &JacobianSystem) -> Vec<Vec<BiPoly>> {
    let nv = sys.inst.ctx.num_vars();
    sys.g
        .iter()
        .map(|gi| (0..nv).map(|v| gi.partial_derivative(v)).collect())
        .collect()
}

/// Determinant of `m` with row `i` and column `j` removed.
pub fn minor_det(m: &[Vec<BiPoly>], i: usize, j: usize) -> Result<BiPoly, PolyError> {
    let sub: Vec<Vec<BiPoly>> = m
        .iter()
        .enumerate()
        .filter(|(row, _)| *row != i)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(col, _)| *col != j)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect();
    det_bareiss(&sub)
}

/// How the all-pairs defining identity for `Ct` was certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtildeCertificate {
    pub pairs_total: usize,
    /// Pairs where the identity holds at the polynomial level.
    pub pairs_polynomial: usize,
    /// Pairs that needed reduction in the quotient ring.
    pub pairs_in_quotient: usize,
}

/// Builds `Ct` from the minors of the Jacobian matrix and certifies its
/// defining identity for every pair `(i, j)`.
pub fn construct_ctilde(
    sys: &JacobianSystem,
    matrix: &[Vec<BiPoly>],
) -> Result<(BiPoly, CtildeCertificate), TraceError> {
    let ctx = sys.inst.ctx;
    let (n, r) = (sys.inst.n, sys.inst.r);
    let nv = ctx.num_vars();
    let field = sys.inst.field;
    let m_plus_1 = Scalar::from_int(field, sys.inst.m as i64 + 1);

    let mut dets = Vec::with_capacity(nv);
    for c in 0..nv {
        dets.push(minor_det(matrix, 0, c)?);
    }

    // construct from a pair whose two minors carry the explicit variable
    // divisibilities: row i of the deleted-row matrix is divisible by Y_i
    // for i >= 1 and row r+1+j by X_j
    let (ci, cj) = if r >= 1 { (1usize, 0usize) } else { (0usize, 0usize) };
    let numerator = pair_rhs(sys, &dets, ci, cj)?;
    let divisor_mono = Monomial::var(&ctx, ctx.y_var(ci), 1).mul(&Monomial::var(
        &ctx,
        ctx.x_var(cj),
        1,
    ));
    let divisor = BiPoly::monomial(&ctx, divisor_mono, m_plus_1.clone());
    let ctilde = numerator.exact_divide(&divisor)?;
    debug_assert_eq!(ctilde.bidegree(), Some(sys.jtilde_bidegree()));

    let mut cert = CtildeCertificate {
        pairs_total: (r + 1) * (n + 1),
        pairs_polynomial: 0,
        pairs_in_quotient: 0,
    };
    let mut deferred: Vec<(usize, usize, BiPoly)> = Vec::new();
    for i in 0..=r {
        for j in 0..=n {
            let rhs = pair_rhs(sys, &dets, i, j)?;
            let mono = Monomial::var(&ctx, ctx.y_var(i), 1).mul(&Monomial::var(
                &ctx,
                ctx.x_var(j),
                1,
            ));
            let lhs = ctilde.mul_monomial(&mono, &m_plus_1);
            let diff = lhs.sub(&rhs)?;
            if diff.is_zero() {
                cert.pairs_polynomial += 1;
            } else {
                deferred.push((i, j, diff));
            }
        }
    }
    if !deferred.is_empty() {
        // the identity can hold only modulo the ideal of Jt; reduce the
        // differences in the quotient one bidegree above the socle
        let d = sys.jtilde_bidegree().add(Bidegree::new(1, 1));
        let piece = quotient_piece(&ctx, sys.jtilde_generators(), d)?;
        for (i, j, diff) in deferred {
            if piece.is_zero_in_quotient(&diff)? {
                cert.pairs_in_quotient += 1;
            } else {
                return Err(TraceError::RelationViolated { i, j });
            }
        }
    }
    Ok((ctilde, cert))
}

fn pair_rhs(
    sys: &JacobianSystem,
    dets: &[BiPoly],
    i: usize,
    j: usize,
) -> Result<BiPoly, TraceError> {
    let ctx = sys.inst.ctx;
    let r = sys.inst.r;
    let field = sys.inst.field;
    let sign_j = Scalar::from_int(field, if j % 2 == 0 { 1 } else { -1 });
    let sign_ri = Scalar::from_int(field, if (r + i) % 2 == 0 { 1 } else { -1 });
    let yi = Monomial::var(&ctx, ctx.y_var(i), 1);
    let xj = Monomial::var(&ctx, ctx.x_var(j), 1);
    let t1 = dets[r + 1 + j].mul_monomial(&yi, &sign_j);
    let t2 = dets[i].mul_monomial(&xj, &sign_ri);
    Ok(t1.add(&t2)?)
}

/// The generator monomial `D` of the one-dimensional piece `J^rho`.
pub fn socle_basis_monomial(pieces: &SoclePieces) -> Result<Monomial, TraceError> {
    if pieces.jrho.dim() != 1 || pieces.jtilde.dim() != 1 {
        return Err(TraceError::SocleDims {
            dim_jrho: pieces.jrho.dim(),
            dim_jtilde: pieces.jtilde.dim(),
        });
    }
    Ok(pieces.jrho.basis[0].clone())
}

/// Lifts `Ct` through the isomorphism `J^rho -> Jt` given by
/// multiplication with the product of all variables, producing the scalar
/// `c` with `C = c * D` in `J^rho`.
pub fn lift_c(
    sys: &JacobianSystem,
    pieces: &SoclePieces,
    ctilde: &BiPoly,
) -> Result<Scalar, TraceError> {
    let ctx = sys.inst.ctx;
    let d_mono = socle_basis_monomial(pieces)?;
    let mut all_vars = Monomial::one(&ctx);
    for v in 0..ctx.num_vars() {
        all_vars = all_vars.mul(&Monomial::var(&ctx, v, 1));
    }
    let psi_d = BiPoly::monomial(&ctx, d_mono.mul(&all_vars), Scalar::one(sys.inst.field));
    let beta = pieces.jtilde.normal_form(&psi_d)?;
    let beta = beta.into_iter().next().expect("one-dimensional piece");
    if beta.is_zero() {
        return Err(TraceError::PsiDegenerate);
    }
    let alpha = pieces.jtilde.normal_form(ctilde)?;
    let alpha = alpha.into_iter().next().expect("one-dimensional piece");
    Ok(alpha.div(&beta).expect("beta nonzero"))
}

fn binomial_scalar(field: FieldSpec, n: usize, k: usize) -> Result<Scalar, TraceError> {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from((n - i) as u64) / BigInt::from((i + 1) as u64);
    }
    let s = Scalar::from_bigint(field, &acc);
    if s.is_zero() {
        return Err(TraceError::BinomNotInvertible { n, k });
    }
    Ok(s)
}

/// The unit `(-1)^(r+1) m^(n+1) binom(n+r, r)` converting `lambda` from
/// `A B = lambda C` into the cohomological trace pairing.
pub fn trace_unit(sys: &JacobianSystem) -> Result<Scalar, TraceError> {
    let (n, r, m) = (sys.inst.n, sys.inst.r, sys.inst.m);
    let field = sys.inst.field;
    let mut u = Scalar::from_int(field, m as i64).pow(n as u64 + 1);
    u = u.mul(&binomial_scalar(field, n + r, r)?);
    if (r + 1) % 2 == 1 {
        u = u.neg();
    }
    Ok(u)
}

/// The Scheja-Storch style generator `e = C / (m^n binom(n+r, r))`,
/// returned as its coordinate against the socle basis monomial `D`.
pub fn scheja_storch_generator(
    sys: &JacobianSystem,
    c: &Scalar,
) -> Result<Scalar, TraceError> {
    let (n, r, m) = (sys.inst.n, sys.inst.r, sys.inst.m);
    let field = sys.inst.field;
    let denom = Scalar::from_int(field, m as i64)
        .pow(n as u64)
        .mul(&binomial_scalar(field, n + r, r)?);
    Ok(c.div(&denom).expect("m and the binomial are units"))
}

/// The trace pairing of two middle classes: with `A B = lambda C` in
/// `J^rho`, returns `trace_unit * lambda`.
pub fn trace_pair(
    sys: &JacobianSystem,
    pieces: &SoclePieces,
    c: &Scalar,
    a: &BiPoly,
    b: &BiPoly,
) -> Result<Scalar, TraceError> {
    if c.is_zero() {
        return Err(TraceError::CNotGenerating);
    }
    let prod = a.mul(b)?;
    let mu = pieces.jrho.normal_form(&prod)?;
    let mu = mu.into_iter().next().expect("one-dimensional piece");
    let lambda = mu.div(c).expect("c nonzero");
    Ok(trace_unit(sys)?.mul(&lambda))
}

/// Gram matrix of the trace pairing on the monomial basis of the middle
/// Hodge piece.
pub fn primitive_gram(
    sys: &JacobianSystem,
    pieces: &SoclePieces,
    c: &Scalar,
    middle: &QuotientPiece,
) -> Result<Vec<Vec<Scalar>>, TraceError> {
    if c.is_zero() {
        return Err(TraceError::CNotGenerating);
    }
    let ctx = sys.inst.ctx;
    let field = sys.inst.field;
    let unit = trace_unit(sys)?;
    let s = middle.basis.len();
    let mut gram = vec![vec![Scalar::zero(field); s]; s];
    for a in 0..s {
        for b in a..s {
            let prod = BiPoly::monomial(
                &ctx,
                middle.basis[a].mul(&middle.basis[b]),
                Scalar::one(field),
            );
            let mu = pieces.jrho.normal_form(&prod)?;
            let mu = mu.into_iter().next().expect("one-dimensional piece");
            let val = unit.mul(&mu.div(c).expect("c nonzero"));
            gram[a][b] = val.clone();
            gram[b][a] = val;
        }
    }
    Ok(gram)
}

/// Determinant of the Hessian of `f` in the X-variables.
pub fn hessian_det(ctx: &PolyCtx, f: &BiPoly) -> Result<BiPoly, PolyError> {
    let h: Vec<Vec<BiPoly>> = (0..=ctx.n)
        .map(|i| {
            (0..=ctx.n)
                .map(|j| f.partial_derivative(ctx.x_var(i)).partial_derivative(ctx.x_var(j)))
                .collect()
        })
        .collect();
    det_bareiss(&h)
}

/// Short human-readable digest of a polynomial for diagnostics.
pub fn poly_digest(p: &BiPoly) -> String {
    match p.leading() {
        None => "0".to_string(),
        Some((m, c)) => format!(
            "{} terms, leading {} * {}",
            p.num_terms(),
            c,
            m.format(&p.ctx)
        ),
    }
}
