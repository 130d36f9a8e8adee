use quadeuler::field::{square_class, FieldSpec, Scalar};
use quadeuler::gradedpiece::quotient_piece;
use quadeuler::gw::{
    from_gram, gw_equals, trace_form_root_extension, trace_form_root_extension_gram, GWForm,
};
use quadeuler::jacobian::{build_socle_pieces, build_system, hodge_piece, ProblemInstance};
use quadeuler::poly::{det_bareiss, BiPoly, Bidegree, Monomial, PolyCtx};
use quadeuler::trace::{construct_ctilde, jacobi_matrix, lift_c, primitive_gram};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
}

fn nonzero_int(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

fn nonzero_scalar(k: FieldSpec, rng: &mut ChaCha8Rng, bound: i64) -> Scalar {
    loop {
        let s = Scalar::from_int(k, nonzero_int(rng, bound));
        if !s.is_zero() {
            return s;
        }
    }
}

/// A random degree-`m` form in the X-variables with positive integer
/// coefficients (so distinct terms can never cancel to zero).
fn random_x_form(ctx: &PolyCtx, m: u32, rng: &mut ChaCha8Rng) -> BiPoly {
    let nx = ctx.n + 1;
    let mut f = BiPoly::zero(ctx);
    let terms = rng.gen_range(1..=4usize);
    for _ in 0..terms {
        let mut mono = Monomial::one(ctx);
        for _ in 0..m {
            let j = rng.gen_range(0..nx);
            mono = mono.mul(&Monomial::var(ctx, ctx.x_var(j), 1));
        }
        let c = Scalar::from_int(ctx.field, rng.gen_range(1..=6));
        f.add_term(mono, c);
    }
    f
}

fn random_instance(rng: &mut ChaCha8Rng) -> ProblemInstance {
    let field = FieldSpec::Rationals;
    let r = rng.gen_range(0..=2usize);
    let n = if r == 0 {
        rng.gen_range(2..=3usize)
    } else {
        rng.gen_range(r + 2..=r + 3)
    };
    let m = rng.gen_range(2..=4u32);
    let ctx = PolyCtx::new(r, n, field);
    let f_list: Vec<BiPoly> = (0..=r).map(|_| random_x_form(&ctx, m, rng)).collect();
    ProblemInstance::new(field, n, r, m, f_list).expect("random instance")
}

fn diagonal_instance(
    field: FieldSpec,
    n: usize,
    r: usize,
    m: u32,
    coeffs: &[Vec<i64>],
) -> ProblemInstance {
    let ctx = PolyCtx::new(r, n, field);
    let f_list: Vec<BiPoly> = coeffs
        .iter()
        .map(|row| {
            let mut f = BiPoly::zero(&ctx);
            for (j, &c) in row.iter().enumerate() {
                if c != 0 {
                    let mono = Monomial::var(&ctx, ctx.x_var(j), m as u16);
                    f.add_term(mono, Scalar::from_int(field, c));
                }
            }
            f
        })
        .collect();
    ProblemInstance::new(field, n, r, m, f_list).expect("diagonal instance")
}

fn random_coeff_row(rng: &mut ChaCha8Rng, len: usize) -> Vec<i64> {
    (0..len).map(|_| nonzero_int(rng, 9)).collect()
}

/// `d/dY_i (sum Y_i F_i) = F_i` and `sum_j X_j dF/dX_j = m F`.
pub fn suite_euler_identities(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    while cases < 200 {
        let inst = random_instance(&mut rng);
        let sys = build_system(&inst).expect("build");
        let ctx = &inst.ctx;
        for i in 0..=inst.r {
            let dy = sys.f.partial_derivative(ctx.y_var(i));
            assert_eq!(dy, inst.f_list[i], "dF/dY_i must reproduce F_i");
        }
        let mut euler = BiPoly::zero(ctx);
        for j in 0..=inst.n {
            let xj = BiPoly::variable(ctx, ctx.x_var(j));
            let term = xj.mul(&sys.f_x[j]).expect("mul");
            euler = euler.add(&term).expect("add");
        }
        let mf = sys.f.scale(&Scalar::from_int(inst.field, inst.m as i64));
        assert_eq!(euler, mf, "sum X_j dF/dX_j must equal m*F");
        cases += 1;
    }
    SuiteOutcome {
        name: "euler identities",
        cases,
    }
}

/// `m * sum_i Y_i F_i - sum_j X_j Fx_j = 0` for the generators of the
/// variant quotient.
pub fn suite_g_identity(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    while cases < 200 {
        let inst = random_instance(&mut rng);
        let sys = build_system(&inst).expect("build");
        let m_scalar = Scalar::from_int(inst.field, inst.m as i64);
        let mut total = BiPoly::zero(&inst.ctx);
        for (idx, g) in sys.g.iter().enumerate() {
            if idx <= inst.r {
                total = total.add(&g.scale(&m_scalar)).expect("add");
            } else {
                total = total.add(&g.neg()).expect("add");
            }
        }
        assert!(total.is_zero(), "m*sum G_y - sum G_x must vanish");
        cases += 1;
    }
    SuiteOutcome {
        name: "G identity",
        cases,
    }
}

/// `construct_ctilde` certifies the defining relation for every pair
/// `(i, j)`; the certificate must cover all `(r+1)(n+1)` pairs.
pub fn suite_ctilde_pairs(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = FieldSpec::Rationals;
    let mut cases = 0;
    while cases < 200 {
        let (n, r, m) = if cases % 10 < 7 {
            (rng.gen_range(2..=3usize), 0, rng.gen_range(2..=3u32))
        } else if cases % 10 < 9 {
            (3, 1, 2)
        } else {
            (4, 1, 2)
        };
        let coeffs: Vec<Vec<i64>> = (0..=r).map(|_| random_coeff_row(&mut rng, n + 1)).collect();
        let inst = diagonal_instance(field, n, r, m, &coeffs);
        let sys = build_system(&inst).expect("build");
        let matrix = jacobi_matrix(&sys);
        let (_ct, cert) = construct_ctilde(&sys, &matrix).expect("ctilde");
        assert_eq!(cert.pairs_total, (r + 1) * (n + 1));
        assert_eq!(
            cert.pairs_polynomial + cert.pairs_in_quotient,
            cert.pairs_total,
            "every pair must be certified one way or the other"
        );
        cases += 1;
    }
    SuiteOutcome {
        name: "Ct pair relations",
        cases,
    }
}

/// The middle-piece Gram matrix is symmetric and nondegenerate on
/// smooth diagonal instances.
pub fn suite_gram_symmetry(seed: u64) -> SuiteOutcomeExt {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = FieldSpec::Rationals;
    let mut cases = 0;
    let mut max_dim = 0;
    while cases < 200 {
        let inst = if cases % 10 == 9 {
            // occasional bihomogeneous pair: two diagonal quadrics in P^4
            let a = random_coeff_row(&mut rng, 5);
            let b = loop {
                let b = random_coeff_row(&mut rng, 5);
                let transversal = (0..5).all(|k| {
                    (0..5).all(|i| i == k || a[k] * b[i] - a[i] * b[k] != 0)
                });
                if transversal {
                    break b;
                }
            };
            diagonal_instance(field, 4, 1, 2, &[a, b])
        } else {
            let m = if cases % 10 < 6 { 2 } else { 3 };
            let a = random_coeff_row(&mut rng, 4);
            diagonal_instance(field, 3, 0, m, &[a])
        };
        let sys = build_system(&inst).expect("build");
        let pieces = build_socle_pieces(&sys).expect("pieces");
        assert_eq!(pieces.jrho.dim(), 1);
        assert_eq!(pieces.jtilde.dim(), 1);
        let matrix = jacobi_matrix(&sys);
        let (ct, _) = construct_ctilde(&sys, &matrix).expect("ctilde");
        let c = lift_c(&sys, &pieces, &ct).expect("lift");
        let q = (inst.n + inst.r - 1) / 2;
        let middle = hodge_piece(&sys, q).expect("middle");
        let gram = primitive_gram(&sys, &pieces, &c, &middle).expect("gram");
        let d = gram.len();
        max_dim = max_dim.max(d);
        for i in 0..d {
            for j in 0..i {
                assert_eq!(gram[i][j], gram[j][i], "Gram must be symmetric");
            }
        }
        // from_gram rejects singular input, so success certifies
        // nondegeneracy
        from_gram(field, &gram).expect("nondegenerate Gram");
        cases += 1;
    }
    SuiteOutcomeExt {
        name: "Gram symmetry and nondegeneracy",
        cases,
        note: format!("largest Gram dimension {max_dim}"),
    }
}

pub struct SuiteOutcomeExt {
    pub name: &'static str,
    pub cases: usize,
    pub note: String,
}

fn random_invertible(k: FieldSpec, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Scalar>> {
    // start from the identity and apply random elementary operations;
    // the result is unimodular, hence invertible over any field
    let mut p: Vec<Vec<i64>> = (0..dim)
        .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
        .collect();
    for _ in 0..2 * dim {
        let i = rng.gen_range(0..dim);
        let mut j = rng.gen_range(0..dim);
        if i == j {
            j = (j + 1) % dim;
        }
        if dim == 1 {
            break;
        }
        let c = rng.gen_range(-2..=2i64);
        for col in 0..dim {
            p[j][col] += c * p[i][col];
        }
    }
    p.iter()
        .map(|row| row.iter().map(|&v| Scalar::from_int(k, v)).collect())
        .collect()
}

fn congruent(k: FieldSpec, g: &[Vec<Scalar>], p: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let d = g.len();
    let mut out = vec![vec![Scalar::zero(k); d]; d];
    for a in 0..d {
        for b in 0..d {
            let mut acc = Scalar::zero(k);
            for i in 0..d {
                for j in 0..d {
                    acc = acc.add(&p[i][a].mul(&g[i][j]).mul(&p[j][b]));
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

const SUITE_FIELDS: [FieldSpec; 6] = [
    FieldSpec::Rationals,
    FieldSpec::PrimeField(3),
    FieldSpec::PrimeField(5),
    FieldSpec::PrimeField(7),
    FieldSpec::PrimeField(11),
    FieldSpec::PrimeField(13),
];

/// Witt relations and congruence invariance of `from_gram`.
pub fn suite_gw_relations(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    while cases < 200 {
        let k = SUITE_FIELDS[cases % SUITE_FIELDS.len()];
        let a = nonzero_scalar(k, &mut rng, 20);
        let b = nonzero_scalar(k, &mut rng, 20);

        let da = GWForm::diagonal(k, &a).unwrap();
        let db = GWForm::diagonal(k, &b).unwrap();
        let dna = GWForm::diagonal(k, &a.neg()).unwrap();
        let h = GWForm::hyperbolic(k, 1);
        assert!(gw_equals(&da.add(&dna).unwrap(), &h).unwrap(), "<a> + <-a> = H");

        let ab2 = a.mul(&b).mul(&b);
        let dab2 = GWForm::diagonal(k, &ab2).unwrap();
        assert!(gw_equals(&dab2, &da).unwrap(), "<a b^2> = <a>");

        let s = a.add(&b);
        if !s.is_zero() {
            let lhs = da.add(&db).unwrap();
            let rhs = GWForm::diagonal(k, &s)
                .unwrap()
                .add(&GWForm::diagonal(k, &a.mul(&b).mul(&s)).unwrap())
                .unwrap();
            assert!(
                gw_equals(&lhs, &rhs).unwrap(),
                "<a> + <b> = <a+b> + <ab(a+b)>"
            );
        }

        let dim = rng.gen_range(1..=4usize);
        let diag: Vec<Scalar> = (0..dim).map(|_| nonzero_scalar(k, &mut rng, 9)).collect();
        let g: Vec<Vec<Scalar>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            diag[i].clone()
                        } else {
                            Scalar::zero(k)
                        }
                    })
                    .collect()
            })
            .collect();
        let p = random_invertible(k, dim, &mut rng);
        let g2 = congruent(k, &g, &p);
        let f1 = from_gram(k, &g).unwrap();
        let f2 = from_gram(k, &g2).unwrap();
        assert!(
            gw_equals(&f1, &f2).unwrap(),
            "from_gram must be congruence invariant"
        );
        cases += 1;
    }
    SuiteOutcome {
        name: "GW Witt relations and congruence invariance",
        cases,
    }
}

/// Trace of multiplication by `u * x^t` on `k[x]/(x^m + a)`, computed
/// by explicit reduction rather than the anti-diagonal shortcut.
fn power_trace(k: FieldSpec, a: &Scalar, m: u32, u: &Scalar, t: u32) -> Scalar {
    let m = m as usize;
    let mut total = Scalar::zero(k);
    for s in 0..m {
        // u * x^{s+t} reduced modulo x^m = -a
        let mut e = s + t as usize;
        let mut c = u.clone();
        while e >= m {
            e -= m;
            c = c.mul(&a.neg());
        }
        if e == s {
            total = total.add(&c);
        }
    }
    total
}

/// Closed form of the twisted root-extension trace form against a Gram
/// matrix computed entry by entry in the quotient algebra.
pub fn suite_trace_form_root_extension(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    while cases < 200 {
        let k = SUITE_FIELDS[cases % SUITE_FIELDS.len()];
        let m = rng.gen_range(1..=6u32);
        if k.kills(m as i64) {
            continue;
        }
        let a = nonzero_scalar(k, &mut rng, 12);
        let u = nonzero_scalar(k, &mut rng, 12);
        let closed = trace_form_root_extension(k, &a, m, &u).unwrap();
        let gram: Vec<Vec<Scalar>> = (0..m)
            .map(|i| (0..m).map(|j| power_trace(k, &a, m, &u, i + j)).collect())
            .collect();
        let direct = from_gram(k, &gram).unwrap();
        assert!(
            gw_equals(&closed, &direct).unwrap(),
            "closed form vs direct Gram for m = {m}"
        );
        let library = trace_form_root_extension_gram(k, &a, m, &u).unwrap();
        assert!(gw_equals(&closed, &library).unwrap());
        cases += 1;
    }
    SuiteOutcome {
        name: "trace form of root extensions",
        cases,
    }
}

fn cofactor_det(m: &[Vec<BiPoly>], ctx: &PolyCtx) -> BiPoly {
    let n = m.len();
    if n == 0 {
        return BiPoly::one(ctx);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = BiPoly::zero(ctx);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let sub: Vec<Vec<BiPoly>> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| m[i][c].clone())
                    .collect()
            })
            .collect();
        let mut term = m[0][j].mul(&cofactor_det(&sub, ctx)).expect("mul");
        if j % 2 == 1 {
            term = term.neg();
        }
        acc = acc.add(&term).expect("add");
    }
    acc
}

/// Fraction-free determinant against first-row cofactor expansion.
pub fn suite_bareiss_vs_cofactor(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    while cases < 200 {
        let field = if cases % 3 == 0 {
            FieldSpec::PrimeField(7)
        } else {
            FieldSpec::Rationals
        };
        let ctx = PolyCtx::new(1, 2, field);
        let dim = rng.gen_range(1..=4usize);
        let mat: Vec<Vec<BiPoly>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        if rng.gen_range(0..4) == 0 {
                            BiPoly::zero(&ctx)
                        } else {
                            let mut p = BiPoly::zero(&ctx);
                            for _ in 0..rng.gen_range(1..=2usize) {
                                let v = rng.gen_range(0..ctx.num_vars());
                                let e = rng.gen_range(0..=2u16);
                                let mono = Monomial::var(&ctx, v, e);
                                let c = Scalar::from_int(field, nonzero_int(&mut rng, 5));
                                p.add_term(mono, c);
                            }
                            p
                        }
                    })
                    .collect()
            })
            .collect();
        let fast = det_bareiss(&mat).expect("bareiss");
        let slow = cofactor_det(&mat, &ctx);
        assert_eq!(fast, slow, "Bareiss must agree with cofactor expansion");
        cases += 1;
    }
    SuiteOutcome {
        name: "Bareiss vs cofactor determinants",
        cases,
    }
}

/// Square-class and graded-piece side invariants used by the suites
/// above; kept here so both test targets exercise them.
pub fn suite_square_classes(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    while cases < 200 {
        let k = SUITE_FIELDS[cases % SUITE_FIELDS.len()];
        let a = nonzero_scalar(k, &mut rng, 30);
        let b = nonzero_scalar(k, &mut rng, 30);
        let cls = square_class(k, &a).unwrap();
        let again = square_class(k, &cls.representative()).unwrap();
        assert_eq!(cls, again, "square_class must be idempotent");
        let scaled = square_class(k, &a.mul(&b).mul(&b)).unwrap();
        assert_eq!(cls, scaled, "square_class(a b^2) = square_class(a)");
        cases += 1;
    }
    SuiteOutcome {
        name: "square class normalization",
        cases,
    }
}

/// Normal forms are linear and kill every multiple of a generator.
pub fn suite_normal_form_linearity(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = FieldSpec::Rationals;
    let mut cases = 0;
    while cases < 200 {
        // small instances: quotient pieces grow fast with n and m
        let r = rng.gen_range(0..=1usize);
        let n = r + 2;
        let m = rng.gen_range(2..=3u32);
        let ctx = PolyCtx::new(r, n, field);
        let f_list: Vec<BiPoly> = (0..=r).map(|_| random_x_form(&ctx, m, &mut rng)).collect();
        let inst = ProblemInstance::new(field, n, r, m, f_list).expect("instance");
        let sys = build_system(&inst).expect("build");
        let gens = sys.j_generators();
        let d = Bidegree::new(r as u32, m + 1);
        let piece = quotient_piece(&inst.ctx, &gens, d).expect("piece");
        let f = random_poly_of_bidegree(&inst.ctx, d, &mut rng);
        let g = random_poly_of_bidegree(&inst.ctx, d, &mut rng);
        let c = Scalar::from_int(field, rng.gen_range(-4..=4));
        let lhs = piece
            .normal_form(&f.scale(&c).add(&g).expect("add"))
            .expect("nf");
        let nf_f = piece.normal_form(&f).expect("nf");
        let nf_g = piece.normal_form(&g).expect("nf");
        for (idx, v) in lhs.iter().enumerate() {
            let expect = nf_f[idx].mul(&c).add(&nf_g[idx]);
            assert_eq!(*v, expect, "normal_form must be linear");
        }
        // a generator multiple reduces to zero whenever the cofactor
        // bidegree exists
        let gen = &gens[rng.gen_range(0..gens.len())];
        let gb = gen.bidegree().unwrap_or(Bidegree::new(u32::MAX, u32::MAX));
        if d.y >= gb.y && d.x >= gb.x {
            let cof = Bidegree::new(d.y - gb.y, d.x - gb.x);
            let h = random_poly_of_bidegree(&inst.ctx, cof, &mut rng);
            let prod = gen.mul(&h).expect("mul");
            if !prod.is_zero() {
                let nf = piece.normal_form(&prod).expect("nf");
                assert!(
                    nf.iter().all(|v| v.is_zero()),
                    "generator multiples must reduce to zero"
                );
            }
        }
        cases += 1;
    }
    SuiteOutcome {
        name: "normal form linearity and membership",
        cases,
    }
}

fn random_poly_of_bidegree(ctx: &PolyCtx, d: Bidegree, rng: &mut ChaCha8Rng) -> BiPoly {
    let mut f = BiPoly::zero(ctx);
    for _ in 0..rng.gen_range(1..=4usize) {
        let mut mono = Monomial::one(ctx);
        for _ in 0..d.y {
            let i = rng.gen_range(0..=ctx.r);
            mono = mono.mul(&Monomial::var(ctx, ctx.y_var(i), 1));
        }
        for _ in 0..d.x {
            let j = rng.gen_range(0..=ctx.n);
            mono = mono.mul(&Monomial::var(ctx, ctx.x_var(j), 1));
        }
        f.add_term(mono, Scalar::from_int(ctx.field, rng.gen_range(1..=5)));
    }
    f
}
