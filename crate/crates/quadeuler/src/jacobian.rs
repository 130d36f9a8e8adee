//! The incidence hypersurface and its two Jacobian rings.
//!
//! For a system `F_0, .., F_r` of degree-`m` forms in `X_0, .., X_n` the
//! incidence polynomial is `F = Y_0 F_0 + .. + Y_r F_r` of bidegree
//! `(1, m)`.  Two quotients of `k[Y, X]` drive everything downstream:
//!
//! * `J`, by the partials of `F` (which are `F_i` and the bidegree
//!   `(1, m-1)` forms `Fx_j = dF/dX_j`), whose graded pieces carry the
//!   primitive cohomology of the incidence hypersurface; and
//! * `Jt`, by the squarefree-scaled generators `Y_i F_i` and `X_j Fx_j`,
//!   whose distinguished one-dimensional socle piece receives the
//!   duality pairing.
//!
//! The socle bidegrees are `rho = (n-r-1, (n+r+1)m - 2(n+1))` for `J` and
//! `rho + (r+1, n+1)` for `Jt`; both pieces must be one dimensional for
//! the trace construction, which is verified rather than assumed.

use crate::field::FieldSpec;
use crate::gradedpiece::{quotient_dim, quotient_piece, GradedError, QuotientPiece};
use crate::poly::{count_monomials, BiPoly, Bidegree, PolyCtx, PolyError};

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum JacobianError {
    #[error("expected {expected} forms of bidegree (0, {m}), found {found}")]
    DegreeMismatch {
        expected: usize,
        found: String,
        m: u32,
    },
    #[error("the characteristic divides {0}, which the construction needs invertible")]
    CharacteristicClash(u64),
    #[error("hodge index q = {q} outside the range {lo}..={hi}")]
    OutOfRange { q: usize, lo: usize, hi: usize },
    #[error("transversality undecided up to degree bound {0}; raise --dmax or pass --assume-smooth")]
    InconclusiveAtBound(u32),
    #[error("instance shape invalid: {0}")]
    BadShape(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A complete intersection input: `r + 1` degree-`m` forms in
/// `X_0, .., X_n` over the chosen field.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub field: FieldSpec,
    pub n: usize,
    pub r: usize,
    pub m: u32,
    pub ctx: PolyCtx,
    pub f_list: Vec<BiPoly>,
}

impl ProblemInstance {
    pub fn new(
        field: FieldSpec,
        n: usize,
        r: usize,
        m: u32,
        f_list: Vec<BiPoly>,
    ) -> Result<ProblemInstance, JacobianError> {
        if m < 2 {
            return Err(JacobianError::BadShape(format!(
                "degree m = {m} must be at least 2"
            )));
        }
        if r > 0 && n < r + 2 {
            return Err(JacobianError::BadShape(format!(
                "need n >= r + 2 (got n = {n}, r = {r})"
            )));
        }
        if r == 0 && n < 2 {
            return Err(JacobianError::BadShape(format!(
                "hypersurface case needs n >= 2 (got n = {n})"
            )));
        }
        if f_list.len() != r + 1 {
            return Err(JacobianError::DegreeMismatch {
                expected: r + 1,
                found: format!("{} forms", f_list.len()),
                m,
            });
        }
        let ctx = PolyCtx::new(r, n, field);
        for (i, f) in f_list.iter().enumerate() {
            if f.ctx != ctx {
                return Err(JacobianError::BadShape(format!(
                    "form {i} lives in the wrong variable context"
                )));
            }
            if f.bidegree() != Some(Bidegree::new(0, m)) {
                return Err(JacobianError::DegreeMismatch {
                    expected: r + 1,
                    found: format!(
                        "form {i} has bidegree {}",
                        f.bidegree().map_or("mixed".into(), |d| d.to_string())
                    ),
                    m,
                });
            }
        }
        if field.kills(m as i64) {
            return Err(JacobianError::CharacteristicClash(
                field.characteristic(),
            ));
        }
        Ok(ProblemInstance {
            field,
            n,
            r,
            m,
            ctx,
            f_list,
        })
    }

    /// Dimension of `X` itself.
    pub fn dim_x(&self) -> usize {
        self.n - self.r - 1
    }

    /// Dimension of the incidence hypersurface.
    pub fn dim_incidence(&self) -> usize {
        self.n + self.r - 1
    }
}

/// The incidence polynomial along with both generator systems.
#[derive(Debug, Clone)]
pub struct JacobianSystem {
    pub inst: ProblemInstance,
    /// `F = sum Y_i F_i`.
    pub f: BiPoly,
    /// `dF/dY_i = F_i`.
    pub f_y: Vec<BiPoly>,
    /// `dF/dX_j`, bidegree `(1, m-1)`.
    pub f_x: Vec<BiPoly>,
    /// `Y_0 F_0, .., Y_r F_r, X_0 Fx_0, .., X_n Fx_n`.
    pub g: Vec<BiPoly>,
    pub rho: Bidegree,
}

impl JacobianSystem {
    pub fn j_generators(&self) -> Vec<BiPoly> {
        let mut v = self.f_y.clone();
        v.extend(self.f_x.iter().cloned());
        v
    }

    pub fn jtilde_generators(&self) -> &[BiPoly] {
        &self.g
    }

    pub fn jtilde_bidegree(&self) -> Bidegree {
        self.rho
            .add(Bidegree::new(self.inst.r as u32 + 1, self.inst.n as u32 + 1))
    }

    /// The Hodge bidegree for cohomological index `q`:
    /// `(q - r, (q + 1) m - (n + 1))`.
    pub fn hodge_bidegree(&self, q: usize) -> Result<Bidegree, JacobianError> {
        let (n, r, m) = (self.inst.n, self.inst.r, self.inst.m as usize);
        let lo = r.max((n + m) / m - 1);
        let hi = self.inst.dim_incidence();
        if q < r || q > hi || (q + 1) * m < n + 1 {
            return Err(JacobianError::OutOfRange { q, lo, hi });
        }
        Ok(Bidegree::new(
            (q - r) as u32,
            ((q + 1) * m - (n + 1)) as u32,
        ))
    }

    /// Middle cohomological index when the incidence dimension is even.
    pub fn middle_q(&self) -> Option<usize> {
        let d = self.inst.dim_incidence();
        if d % 2 == 0 {
            Some(d / 2)
        } else {
            None
        }
    }
}

/// Builds the incidence polynomial and both generator systems, verifying
/// the two Euler identities and the relation tying them together.
pub fn build_system(inst: &ProblemInstance) -> Result<JacobianSystem, JacobianError> {
    let ctx = inst.ctx;
    if inst.field.kills(inst.m as i64 + 1) {
        return Err(JacobianError::CharacteristicClash(
            inst.field.characteristic(),
        ));
    }
    let mut f = BiPoly::zero(&ctx);
    for (i, fi) in inst.f_list.iter().enumerate() {
        let yi = BiPoly::variable(&ctx, ctx.y_var(i));
        f = f.add(&fi.mul(&yi)?)?;
    }
    let f_y: Vec<BiPoly> = (0..=inst.r)
        .map(|i| f.partial_derivative(ctx.y_var(i)))
        .collect();
    let f_x: Vec<BiPoly> = (0..=inst.n)
        .map(|j| f.partial_derivative(ctx.x_var(j)))
        .collect();

    // Euler in Y: sum Y_i dF/dY_i = F (F has Y-degree 1)
    let mut acc = BiPoly::zero(&ctx);
    for (i, fy) in f_y.iter().enumerate() {
        acc = acc.add(&fy.mul(&BiPoly::variable(&ctx, ctx.y_var(i)))?)?;
    }
    debug_assert_eq!(acc, f, "Euler identity in Y failed");
    // Euler in X: sum X_j dF/dX_j = m F
    let mut accx = BiPoly::zero(&ctx);
    for (j, fx) in f_x.iter().enumerate() {
        accx = accx.add(&fx.mul(&BiPoly::variable(&ctx, ctx.x_var(j)))?)?;
    }
    let mf = f.scale(&crate::field::Scalar::from_int(inst.field, inst.m as i64));
    if accx != mf {
        return Err(JacobianError::BadShape(
            "X-Euler identity failed; forms are not degree-m homogeneous".into(),
        ));
    }

    let mut g = Vec::with_capacity(inst.n + inst.r + 2);
    for (i, fy) in f_y.iter().enumerate() {
        g.push(fy.mul(&BiPoly::variable(&ctx, ctx.y_var(i)))?);
    }
    for (j, fx) in f_x.iter().enumerate() {
        g.push(fx.mul(&BiPoly::variable(&ctx, ctx.x_var(j)))?);
    }

    let rho = Bidegree::new(
        (inst.n - inst.r - 1) as u32,
        ((inst.n + inst.r + 1) * inst.m as usize - 2 * (inst.n + 1)) as u32,
    );
    Ok(JacobianSystem {
        inst: inst.clone(),
        f,
        f_y,
        f_x,
        g,
        rho,
    })
}

/// The graded piece of `J` carrying primitive Hodge cohomology in index
/// `q` along the middle-dimensional row `p + q = dim` of the incidence
/// hypersurface.
pub fn hodge_piece(sys: &JacobianSystem, q: usize) -> Result<QuotientPiece, JacobianError> {
    let d = sys.hodge_bidegree(q)?;
    Ok(quotient_piece(&sys.inst.ctx, &sys.j_generators(), d)?)
}

/// Both socle pieces, built once; the `Jt` piece is the expensive one.
pub struct SoclePieces {
    pub jrho: QuotientPiece,
    pub jtilde: QuotientPiece,
}

pub fn build_socle_pieces(sys: &JacobianSystem) -> Result<SoclePieces, JacobianError> {
    let jrho = quotient_piece(&sys.inst.ctx, &sys.j_generators(), sys.rho)?;
    let jtilde = quotient_piece(&sys.inst.ctx, sys.jtilde_generators(), sys.jtilde_bidegree())?;
    Ok(SoclePieces { jrho, jtilde })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneDimReport {
    pub dim_jrho: usize,
    pub dim_jtilde: usize,
}

impl OneDimReport {
    pub fn ok(&self) -> bool {
        self.dim_jrho == 1 && self.dim_jtilde == 1
    }
}

/// Checks that both socle pieces are one dimensional.
pub fn verify_one_dimensionality(pieces: &SoclePieces) -> OneDimReport {
    OneDimReport {
        dim_jrho: pieces.jrho.dim(),
        dim_jtilde: pieces.jtilde.dim(),
    }
}

/// Outcome of one smoothness or transversality sub-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass(String),
    Fail(String),
    Inconclusive { bound: u32 },
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass(_))
    }

    pub fn failed(&self) -> bool {
        matches!(self, CheckOutcome::Fail(_))
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckOutcome::Pass(d) => write!(f, "pass ({d})"),
            CheckOutcome::Fail(d) => write!(f, "FAIL ({d})"),
            CheckOutcome::Inconclusive { bound } => {
                write!(f, "inconclusive up to degree {bound}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub characteristic_ok: CheckOutcome,
    /// Smoothness of each hypersurface `V(F_i)` separately.
    pub hypersurfaces_smooth: Vec<CheckOutcome>,
    /// Transversality of the whole system (X is a smooth complete
    /// intersection of the expected dimension).
    pub transversal: CheckOutcome,
    /// Sections by coordinate subspaces up to the requested depth.
    pub coordinate_sections: Vec<(Vec<usize>, CheckOutcome)>,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.characteristic_ok.passed()
            && self.hypersurfaces_smooth.iter().all(|c| c.passed())
            && self.transversal.passed()
            && self.coordinate_sections.iter().all(|(_, c)| c.passed())
    }

    pub fn any_failed(&self) -> bool {
        self.characteristic_ok.failed()
            || self.hypersurfaces_smooth.iter().any(|c| c.failed())
            || self.transversal.failed()
            || self.coordinate_sections.iter().any(|(_, c)| c.failed())
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!("characteristic: {}", self.characteristic_ok)];
        for (i, c) in self.hypersurfaces_smooth.iter().enumerate() {
            out.push(format!("V(F_{i}) smooth: {c}"));
        }
        out.push(format!("system transversal: {}", self.transversal));
        for (s, c) in &self.coordinate_sections {
            let names: Vec<String> = s.iter().map(|j| format!("X{j}")).collect();
            out.push(format!("section {{{} = 0}}: {c}", names.join(", ")));
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Degree bound for the irrelevance search in the transversality
    /// check; `None` picks `(r + 1)(m - 1)(n + 1)`.
    pub d_max: Option<u32>,
    /// Coordinate-section depth (`0` disables the hereditary checks).
    pub depth: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            d_max: None,
            depth: 2,
        }
    }
}

/// Extracts the diagonal coefficient matrix if every form is diagonal
/// (`sum_j c_ij X_j^m` with no cross terms).
pub fn diagonal_coefficients(inst: &ProblemInstance) -> Option<Vec<Vec<crate::field::Scalar>>> {
    let ctx = inst.ctx;
    let mut rows = Vec::new();
    for f in &inst.f_list {
        let mut row = vec![crate::field::Scalar::zero(inst.field); inst.n + 1];
        for (mono, c) in f.terms() {
            let mut var = None;
            for j in 0..=inst.n {
                let e = mono.exp(ctx.x_var(j));
                if e == inst.m as u16 {
                    var = Some(j);
                } else if e != 0 {
                    return None;
                }
            }
            row[var?] = c.clone();
        }
        rows.push(row);
    }
    Some(rows)
}

/// True when every `(r+1) x (r+1)` minor of the diagonal coefficient
/// matrix is nonzero, which forces the diagonal system to be a smooth
/// transversal complete intersection.
fn diagonal_minors_nonzero(rows: &[Vec<crate::field::Scalar>], field: FieldSpec) -> bool {
    let k = rows.len();
    let n = rows[0].len();
    if n < k {
        return false;
    }
    let mut cols: Vec<usize> = (0..k).collect();
    loop {
        let sub: Vec<Vec<crate::field::Scalar>> = rows
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        if scalar_det(&sub, field).is_zero() {
            return false;
        }
        // next k-combination of 0..n
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if cols[i] != i + n - k {
                cols[i] += 1;
                for j in i + 1..k {
                    cols[j] = cols[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn scalar_det(m: &[Vec<crate::field::Scalar>], field: FieldSpec) -> crate::field::Scalar {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = crate::field::Scalar::one(field);
    for k in 0..n {
        let piv = (k..n).find(|&i| !a[i][k].is_zero());
        let Some(p) = piv else {
            return crate::field::Scalar::zero(field);
        };
        if p != k {
            a.swap(p, k);
            det = det.neg();
        }
        det = det.mul(&a[k][k]);
        let inv = a[k][k].inv().expect("pivot nonzero");
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].mul(&inv);
            for j in k..n {
                let delta = factor.mul(&a[k][j]);
                a[i][j] = a[i][j].sub(&delta);
            }
        }
    }
    det
}

/// Smoothness of a single degree-`m` hypersurface `V(f)` in the
/// X-variables: its Jacobian ring must vanish in degree one past the
/// socle degree `(n + 1)(m - 2)` of the smooth case.  This is exact in
/// both directions.
fn hypersurface_smooth(
    ctx: &PolyCtx,
    f: &BiPoly,
    m: u32,
) -> Result<CheckOutcome, JacobianError> {
    if f.is_zero() {
        return Ok(CheckOutcome::Fail("form is identically zero".into()));
    }
    let partials: Vec<BiPoly> = (0..=ctx.n)
        .map(|j| f.partial_derivative(ctx.x_var(j)))
        .collect();
    let socle_plus = (ctx.n as u32 + 1) * (m - 2) + 1;
    let dim = quotient_dim(ctx, &partials, Bidegree::new(0, socle_plus))?;
    if dim == 0 {
        Ok(CheckOutcome::Pass(format!(
            "jacobian ring vanishes in degree {socle_plus}"
        )))
    } else {
        Ok(CheckOutcome::Fail(format!(
            "jacobian ring has dimension {dim} in degree {socle_plus}"
        )))
    }
}

/// All `(r+1) x (r+1)` minors of the X-Jacobian matrix of the system.
fn jacobian_minors(inst: &ProblemInstance) -> Result<Vec<BiPoly>, JacobianError> {
    let ctx = inst.ctx;
    let k = inst.r + 1;
    let jac: Vec<Vec<BiPoly>> = inst
        .f_list
        .iter()
        .map(|f| {
            (0..=inst.n)
                .map(|j| f.partial_derivative(ctx.x_var(j)))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut minors = Vec::new();
    let mut cols: Vec<usize> = (0..k).collect();
    loop {
        let sub: Vec<Vec<BiPoly>> = jac
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        minors.push(crate::poly::det_bareiss(&sub)?);
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(minors);
            }
            i -= 1;
            if cols[i] != i + inst.n + 1 - k {
                cols[i] += 1;
                for j in i + 1..k {
                    cols[j] = cols[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Searches for a degree `d <= d_max` in which the given X-ideal contains
/// every monomial (so the corresponding projective scheme is empty).
fn irrelevant_up_to(
    ctx: &PolyCtx,
    gens: &[BiPoly],
    start: u32,
    d_max: u32,
) -> Result<CheckOutcome, JacobianError> {
    for d in start..=d_max {
        if quotient_dim(ctx, gens, Bidegree::new(0, d))? == 0 {
            return Ok(CheckOutcome::Pass(format!(
                "ideal contains all monomials of degree {d}"
            )));
        }
    }
    Ok(CheckOutcome::Inconclusive { bound: d_max })
}

/// Transversality of the full system: the ideal generated by the forms
/// and the maximal minors of their Jacobian must be irrelevant.
fn system_transversal(
    inst: &ProblemInstance,
    d_max: u32,
) -> Result<CheckOutcome, JacobianError> {
    if let Some(rows) = diagonal_coefficients(inst) {
        if diagonal_minors_nonzero(&rows, inst.field) {
            return Ok(CheckOutcome::Pass(
                "diagonal system with all maximal coefficient minors nonzero".into(),
            ));
        }
    }
    if inst.n < inst.r + 1 {
        // more equations than the space can transversally carry:
        // X must be empty outright
        return irrelevant_up_to(&inst.ctx, &inst.f_list, inst.m, d_max);
    }
    let mut gens = inst.f_list.clone();
    gens.extend(jacobian_minors(inst)?);
    let start = ((inst.r as u32 + 1) * (inst.m - 1)).max(1);
    irrelevant_up_to(&inst.ctx, &gens, start, d_max)
}

/// Verifies the standing hypotheses: invertibility of `m` and `m + 1`,
/// smoothness of each hypersurface, transversality of the system, and
/// transversality of its sections by small coordinate subspaces.
pub fn check_assumptions(
    inst: &ProblemInstance,
    opts: &CheckOptions,
) -> Result<AssumptionReport, JacobianError> {
    let d_max = opts
        .d_max
        .unwrap_or((inst.r as u32 + 1) * (inst.m - 1) * (inst.n as u32 + 1));

    let characteristic_ok = {
        let p = inst.field.characteristic();
        if inst.field.kills(inst.m as i64) {
            CheckOutcome::Fail(format!("p = {p} divides m = {}", inst.m))
        } else if inst.field.kills(inst.m as i64 + 1) {
            CheckOutcome::Fail(format!("p = {p} divides m + 1 = {}", inst.m + 1))
        } else {
            CheckOutcome::Pass("m and m + 1 are invertible".into())
        }
    };

    let mut hypersurfaces_smooth = Vec::new();
    for f in &inst.f_list {
        hypersurfaces_smooth.push(hypersurface_smooth(&inst.ctx, f, inst.m)?);
    }

    let transversal = system_transversal(inst, d_max)?;

    let mut coordinate_sections = Vec::new();
    if opts.depth > 0 {
        for subset in subsets_up_to(inst.n + 1, opts.depth) {
            let restricted: Vec<BiPoly> = inst
                .f_list
                .iter()
                .map(|f| f.restrict_x_to_zero(&subset))
                .collect();
            let outcome = if restricted.iter().any(|f| f.is_zero()) {
                CheckOutcome::Fail("a form vanishes identically on the section".into())
            } else {
                let sub_n = inst.n - subset.len();
                let sub_ctx = PolyCtx::new(inst.r, sub_n, inst.field);
                if sub_n < inst.r + 1 {
                    // expected empty: the forms alone must be irrelevant
                    match irrelevant_up_to(&sub_ctx, &restricted, inst.m, d_max)? {
                        CheckOutcome::Pass(d) => {
                            CheckOutcome::Pass(format!("section is empty: {d}"))
                        }
                        other => other,
                    }
                } else {
                    let sub_inst = ProblemInstance {
                        field: inst.field,
                        n: sub_n,
                        r: inst.r,
                        m: inst.m,
                        ctx: sub_ctx,
                        f_list: restricted,
                    };
                    system_transversal(&sub_inst, d_max)?
                }
            };
            coordinate_sections.push((subset, outcome));
        }
    }

    Ok(AssumptionReport {
        characteristic_ok,
        hypersurfaces_smooth,
        transversal,
        coordinate_sections,
    })
}

fn subsets_up_to(n_vars: usize, depth: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let depth = depth.min(n_vars.saturating_sub(1));
    fn rec(start: usize, n_vars: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for j in start..n_vars {
            cur.push(j);
            rec(j + 1, n_vars, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut cur = Vec::new();
    rec(0, n_vars, depth, &mut cur, &mut out);
    out
}

/// Size of the largest ambient monomial slice the pipeline would touch.
pub fn jtilde_ambient_size(sys: &JacobianSystem) -> Option<usize> {
    count_monomials(&sys.inst.ctx, sys.jtilde_bidegree())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn fermat_pair(n: usize, m: u32, a: &[i64], b: &[i64]) -> ProblemInstance {
        let field = FieldSpec::Rationals;
        let ctx = PolyCtx::new(1, n, field);
        let mk = |coeffs: &[i64]| {
            let terms: Vec<String> = coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| format!("{c}*X{j}^{m}"))
                .collect();
            parse_poly(&ctx, &terms.join(" + ")).unwrap()
        };
        ProblemInstance::new(field, n, 1, m, vec![mk(a), mk(b)]).unwrap()
    }

    #[test]
    fn instance_validation() {
        let field = FieldSpec::Rationals;
        let ctx = PolyCtx::new(0, 2, field);
        let f = parse_poly(&ctx, "X0^3 + X1^3 + X2^3").unwrap();
        assert!(ProblemInstance::new(field, 2, 0, 3, vec![f.clone()]).is_ok());
        // wrong degree
        assert!(matches!(
            ProblemInstance::new(field, 2, 0, 2, vec![f.clone()]),
            Err(JacobianError::DegreeMismatch { .. })
        ));
        // r = 1 needs n >= 3
        let ctx2 = PolyCtx::new(1, 2, field);
        let g0 = parse_poly(&ctx2, "X0^2 + X1^2 + X2^2").unwrap();
        let g1 = parse_poly(&ctx2, "X0^2 + 2*X1^2 + 3*X2^2").unwrap();
        assert!(matches!(
            ProblemInstance::new(field, 2, 1, 2, vec![g0, g1]),
            Err(JacobianError::BadShape(_))
        ));
        // characteristic dividing m
        let k3 = FieldSpec::PrimeField(3);
        let ctx3 = PolyCtx::new(0, 2, k3);
        let h = parse_poly(&ctx3, "X0^3 + X1^3 + X2^3").unwrap();
        assert!(matches!(
            ProblemInstance::new(k3, 2, 0, 3, vec![h]),
            Err(JacobianError::CharacteristicClash(3))
        ));
    }

    #[test]
    fn system_identities_and_socle() {
        let inst = fermat_pair(4, 2, &[1, 1, 1, 1, 1], &[1, 2, 3, 4, 5]);
        let sys = build_system(&inst).unwrap();
        assert_eq!(sys.rho, Bidegree::new(2, 2));
        assert_eq!(sys.jtilde_bidegree(), Bidegree::new(4, 7));
        // G-identity: m * sum of Y-side generators = sum of X-side ones
        let ctx = inst.ctx;
        let mut y_side = BiPoly::zero(&ctx);
        for i in 0..=1 {
            y_side = y_side.add(&sys.g[i]).unwrap();
        }
        let mut x_side = BiPoly::zero(&ctx);
        for j in 0..=4 {
            x_side = x_side.add(&sys.g[2 + j]).unwrap();
        }
        let m_y = y_side.scale(&crate::field::Scalar::from_int(inst.field, 2));
        assert_eq!(m_y, x_side);
    }

    #[test]
    fn middle_hodge_piece_dimension() {
        // pair of quadrics in P^4: middle piece of the incidence
        // hypersurface sits at q = 2 with bidegree (1, 1)
        let inst = fermat_pair(4, 2, &[1, 1, 1, 1, 1], &[1, 2, 3, 4, 5]);
        let sys = build_system(&inst).unwrap();
        assert_eq!(sys.middle_q(), Some(2));
        let d = sys.hodge_bidegree(2).unwrap();
        assert_eq!(d, Bidegree::new(1, 1));
        let piece = hodge_piece(&sys, 2).unwrap();
        // primitive middle cohomology of a del Pezzo of degree 4 pulled
        // to the incidence hypersurface: dimension 5
        assert_eq!(piece.dim(), 5);
        assert!(matches!(
            sys.hodge_bidegree(0),
            Err(JacobianError::OutOfRange { .. })
        ));
        assert!(matches!(
            sys.hodge_bidegree(9),
            Err(JacobianError::OutOfRange { .. })
        ));
    }

    #[test]
    fn socle_pieces_are_one_dimensional() {
        let inst = fermat_pair(4, 2, &[1, 1, 1, 1, 1], &[1, 2, 3, 4, 5]);
        let sys = build_system(&inst).unwrap();
        let pieces = build_socle_pieces(&sys).unwrap();
        let report = verify_one_dimensionality(&pieces);
        assert_eq!(
            report,
            OneDimReport {
                dim_jrho: 1,
                dim_jtilde: 1
            }
        );
        assert!(report.ok());
    }

    #[test]
    fn assumptions_pass_on_generic_fermat_pair() {
        let inst = fermat_pair(4, 2, &[1, 1, 1, 1, 1], &[1, 2, 3, 4, 5]);
        let report = check_assumptions(&inst, &CheckOptions::default()).unwrap();
        assert!(report.all_passed(), "{:?}", report.lines());
    }

    #[test]
    fn assumptions_fail_on_singular_hypersurface() {
        let field = FieldSpec::Rationals;
        let ctx = PolyCtx::new(0, 2, field);
        // X0^2 X1 has a whole singular line
        let f = parse_poly(&ctx, "X0^2*X1").unwrap();
        let inst = ProblemInstance::new(field, 2, 0, 3, vec![f]).unwrap();
        let report = check_assumptions(&inst, &CheckOptions::default()).unwrap();
        assert!(report.hypersurfaces_smooth[0].failed());
        assert!(report.any_failed());
        assert!(!report.all_passed());
    }

    #[test]
    fn assumptions_fail_on_degenerate_fermat_pair() {
        // b = 2a makes every 2x2 coefficient minor vanish and the
        // intersection is nowhere transversal
        let inst = fermat_pair(4, 2, &[1, 1, 1, 1, 1], &[2, 2, 2, 2, 2]);
        let report = check_assumptions(&inst, &CheckOptions::default()).unwrap();
        assert!(!report.all_passed());
    }

    #[test]
    fn coordinate_sections_checked_to_depth() {
        let inst = fermat_pair(4, 2, &[1, 1, 1, 1, 1], &[1, 2, 3, 4, 5]);
        let report = check_assumptions(
            &inst,
            &CheckOptions {
                d_max: None,
                depth: 2,
            },
        )
        .unwrap();
        // 5 singletons + 10 pairs
        assert_eq!(report.coordinate_sections.len(), 15);
        assert!(report.coordinate_sections.iter().all(|(_, c)| c.passed()));
    }

    #[test]
    fn characteristic_clash_on_m_plus_one() {
        let k3 = FieldSpec::PrimeField(3);
        let ctx = PolyCtx::new(0, 2, k3);
        let f = parse_poly(&ctx, "X0^2 + X1^2 + X2^2").unwrap();
        let inst = ProblemInstance::new(k3, 2, 0, 2, vec![f]).unwrap();
        assert!(matches!(
            build_system(&inst),
            Err(JacobianError::CharacteristicClash(3))
        ));
        let report = check_assumptions(&inst, &CheckOptions::default()).unwrap();
        assert!(report.characteristic_ok.failed());
    }
}
