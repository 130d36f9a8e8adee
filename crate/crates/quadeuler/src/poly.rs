//! Sparse bihomogeneous polynomials in two blocks of variables.
//!
//! The variable blocks are `Y0..Yr` (the "coefficient" direction) and
//! `X0..Xn` (the "ambient" direction).  A [`Monomial`] stores one
//! exponent vector over both blocks, in the order `Y0, .., Yr, X0, .., Xn`;
//! a [`BiPoly`] maps monomials to nonzero scalars.  Terms are kept in a
//! `BTreeMap` under the lexicographic order on exponent vectors, which
//! within a fixed bidegree agrees with any graded order and makes leading
//! terms well defined for the division routines.

use crate::field::{FieldSpec, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum PolyError {
    #[error("polynomials live in different variable contexts")]
    ContextMismatch,
    #[error("exact division failed: not divisible")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("syntax error at position {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("variable {0} out of range for this context")]
    UnknownVariable(String),
}

/// The ambient variable context: `r + 1` Y-variables, `n + 1` X-variables,
/// and the base field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PolyCtx {
    pub r: usize,
    pub n: usize,
    pub field: FieldSpec,
}

impl PolyCtx {
    pub fn new(r: usize, n: usize, field: FieldSpec) -> PolyCtx {
        PolyCtx { r, n, field }
    }

    pub fn num_vars(&self) -> usize {
        self.r + self.n + 2
    }

    /// Index of `Y_i` in the combined variable list.
    pub fn y_var(&self, i: usize) -> usize {
        assert!(i <= self.r, "Y{i} out of range");
        i
    }

    /// Index of `X_j` in the combined variable list.
    pub fn x_var(&self, j: usize) -> usize {
        assert!(j <= self.n, "X{j} out of range");
        self.r + 1 + j
    }

    pub fn var_name(&self, v: usize) -> String {
        if v <= self.r {
            format!("Y{v}")
        } else {
            format!("X{}", v - self.r - 1)
        }
    }
}

/// A bidegree `(y, x)`: total degree in the Y-block and in the X-block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub y: u32,
    pub x: u32,
}

impl Bidegree {
    pub fn new(y: u32, x: u32) -> Bidegree {
        Bidegree { y, x }
    }

    pub fn add(self, other: Bidegree) -> Bidegree {
        Bidegree {
            y: self.y + other.y,
            x: self.x + other.x,
        }
    }

    pub fn checked_sub(self, other: Bidegree) -> Option<Bidegree> {
        Some(Bidegree {
            y: self.y.checked_sub(other.y)?,
            x: self.x.checked_sub(other.x)?,
        })
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.y, self.x)
    }
}

/// An exponent vector over all variables of a context.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one(ctx: &PolyCtx) -> Monomial {
        Monomial {
            exps: vec![0; ctx.num_vars()],
        }
    }

    pub fn var(ctx: &PolyCtx, v: usize, e: u16) -> Monomial {
        let mut m = Monomial::one(ctx);
        m.exps[v] = e;
        m
    }

    pub fn from_exps(exps: Vec<u16>) -> Monomial {
        Monomial { exps }
    }

    pub fn exp(&self, v: usize) -> u16 {
        self.exps[v]
    }

    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller must have checked divisibility.
    pub fn quotient_into(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: other
                .exps
                .iter()
                .zip(&self.exps)
                .map(|(b, a)| b - a)
                .collect(),
        }
    }

    pub fn bidegree(&self, ctx: &PolyCtx) -> Bidegree {
        let y: u32 = self.exps[..=ctx.r].iter().map(|&e| e as u32).sum();
        let x: u32 = self.exps[ctx.r + 1..].iter().map(|&e| e as u32).sum();
        Bidegree { y, x }
    }

    pub fn format(&self, ctx: &PolyCtx) -> String {
        let mut parts = Vec::new();
        for (v, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if e == 1 {
                parts.push(ctx.var_name(v));
            } else {
                parts.push(format!("{}^{}", ctx.var_name(v), e));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// All monomials of a given bidegree, in descending lexicographic order.
pub fn monomials_of_bidegree(ctx: &PolyCtx, d: Bidegree) -> Vec<Monomial> {
    let mut out = Vec::new();
    let y_parts = compositions(d.y, ctx.r + 1);
    let x_parts = compositions(d.x, ctx.n + 1);
    for yp in &y_parts {
        for xp in &x_parts {
            let mut exps = Vec::with_capacity(ctx.num_vars());
            exps.extend_from_slice(yp);
            exps.extend_from_slice(xp);
            out.push(Monomial { exps });
        }
    }
    out.sort();
    out.reverse();
    out
}

/// Number of monomials of a given bidegree, as a checked usize.
pub fn count_monomials(ctx: &PolyCtx, d: Bidegree) -> Option<usize> {
    let c1 = binomial(d.y as u128 + ctx.r as u128, ctx.r as u128)?;
    let c2 = binomial(d.x as u128 + ctx.n as u128, ctx.n as u128)?;
    c1.checked_mul(c2)?.try_into().ok()
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; parts];
    fn rec(total: u32, idx: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if idx + 1 == cur.len() {
            cur[idx] = total as u16;
            out.push(cur.clone());
            return;
        }
        for v in (0..=total).rev() {
            cur[idx] = v as u16;
            rec(total - v, idx + 1, cur, out);
        }
    }
    if parts == 0 {
        return out;
    }
    rec(total, 0, &mut cur, &mut out);
    out
}

/// A sparse polynomial over the context's field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiPoly {
    pub ctx: PolyCtx,
    terms: BTreeMap<Monomial, Scalar>,
}

impl BiPoly {
    pub fn zero(ctx: &PolyCtx) -> BiPoly {
        BiPoly {
            ctx: *ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &PolyCtx, c: Scalar) -> BiPoly {
        let mut p = BiPoly::zero(ctx);
        p.add_term(Monomial::one(ctx), c);
        p
    }

    pub fn one(ctx: &PolyCtx) -> BiPoly {
        BiPoly::constant(ctx, Scalar::one(ctx.field))
    }

    pub fn from_terms(ctx: &PolyCtx, terms: Vec<(Monomial, Scalar)>) -> BiPoly {
        let mut p = BiPoly::zero(ctx);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn monomial(ctx: &PolyCtx, m: Monomial, c: Scalar) -> BiPoly {
        let mut p = BiPoly::zero(ctx);
        p.add_term(m, c);
        p
    }

    pub fn variable(ctx: &PolyCtx, v: usize) -> BiPoly {
        BiPoly::monomial(ctx, Monomial::var(ctx, v, 1), Scalar::one(ctx.field))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.ctx.field))
    }

    /// Adds `c * m` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.num_vars(), self.ctx.num_vars());
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_ctx(&self, other: &BiPoly) -> Result<(), PolyError> {
        if self.ctx != other.ctx {
            return Err(PolyError::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &BiPoly) -> Result<BiPoly, PolyError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &BiPoly) -> Result<BiPoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> BiPoly {
        if c.is_zero() {
            return BiPoly::zero(&self.ctx);
        }
        BiPoly {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.mul(c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &BiPoly) -> Result<BiPoly, PolyError> {
        self.check_ctx(other)?;
        let mut out = BiPoly::zero(&self.ctx);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> BiPoly {
        if c.is_zero() {
            return BiPoly::zero(&self.ctx);
        }
        BiPoly {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .map(|(m1, c1)| (m1.mul(m), c1.mul(c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> BiPoly {
        let mut acc = BiPoly::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self).expect("same context");
        }
        acc
    }

    pub fn partial_derivative(&self, v: usize) -> BiPoly {
        let mut out = BiPoly::zero(&self.ctx);
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[v] -= 1;
            let factor = Scalar::from_int(self.ctx.field, e as i64);
            out.add_term(Monomial { exps }, c.mul(&factor));
        }
        out
    }

    /// The common bidegree of all terms, if the polynomial is
    /// bihomogeneous and nonzero.
    pub fn bidegree(&self) -> Option<Bidegree> {
        let mut it = self.terms.keys();
        let first = it.next()?.bidegree(&self.ctx);
        for m in it {
            if m.bidegree(&self.ctx) != first {
                return None;
            }
        }
        Some(first)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Exact division: returns `q` with `self = q * g`, or `NotDivisible`.
    pub fn exact_divide(&self, g: &BiPoly) -> Result<BiPoly, PolyError> {
        self.check_ctx(g)?;
        if g.is_zero() {
            return Err(PolyError::DivisionByZeroPoly);
        }
        let (gm, gc) = g.leading().expect("nonzero");
        let gm = gm.clone();
        let gc = gc.clone();
        let mut rem = self.clone();
        let mut q = BiPoly::zero(&self.ctx);
        while let Some((fm, fc)) = rem.leading() {
            if !gm.divides(fm) {
                return Err(PolyError::NotDivisible);
            }
            let qm = gm.quotient_into(fm);
            let qc = fc.div(&gc).expect("leading coefficient nonzero");
            q.add_term(qm.clone(), qc.clone());
            let chunk = g.mul_monomial(&qm, &qc.neg());
            rem = rem.add(&chunk)?;
        }
        Ok(q)
    }

    /// Substitutes 1 for the variable `v` (used to pass from the bigraded
    /// picture to the X-block only, e.g. `Y0 -> 1` when `r = 0`).
    pub fn substitute_one(&self, v: usize) -> BiPoly {
        let mut out = BiPoly::zero(&self.ctx);
        for (m, c) in &self.terms {
            let mut exps = m.exps.clone();
            exps[v] = 0;
            out.add_term(Monomial { exps }, c.clone());
        }
        out
    }

    /// Substitutes 0 for a set of X-variables and renumbers the remaining
    /// ones, producing a polynomial in a smaller context.
    pub fn restrict_x_to_zero(&self, vanish: &[usize]) -> BiPoly {
        let keep: Vec<usize> = (0..=self.ctx.n).filter(|j| !vanish.contains(j)).collect();
        let new_ctx = PolyCtx::new(self.ctx.r, keep.len() - 1, self.ctx.field);
        let mut out = BiPoly::zero(&new_ctx);
        'term: for (m, c) in &self.terms {
            for &j in vanish {
                if m.exp(self.ctx.x_var(j)) > 0 {
                    continue 'term;
                }
            }
            let mut exps = Vec::with_capacity(new_ctx.num_vars());
            exps.extend((0..=self.ctx.r).map(|i| m.exp(i)));
            exps.extend(keep.iter().map(|&j| m.exp(self.ctx.x_var(j))));
            out.add_term(Monomial { exps }, c.clone());
        }
        out
    }

    pub fn format(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        // descending term order, leading term first
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag) = match c {
                Scalar::Rat(r) => (
                    r < &BigRational::zero(),
                    Scalar::Rat(r.abs()),
                ),
                Scalar::Fp { .. } => (false, c.clone()),
            };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else if neg {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let is_const = m.bidegree(&self.ctx) == Bidegree::new(0, 0);
            if is_const {
                s.push_str(&mag.to_string());
            } else if mag.is_one() {
                s.push_str(&m.format(&self.ctx));
            } else {
                s.push_str(&format!("{}*{}", mag, m.format(&self.ctx)));
            }
        }
        s
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format())
    }
}

/// Parses the textual polynomial grammar: terms separated by `+`/`-`, each
/// term an optional integer or `p/q` coefficient followed by `*`-separated
/// variable powers `Y<i>^<e>` / `X<j>^<e>` (`^1` may be omitted).
/// Whitespace is insignificant.
pub fn parse_poly(ctx: &PolyCtx, input: &str) -> Result<BiPoly, PolyError> {
    let bytes: Vec<char> = input.chars().collect();
    let mut pos = 0usize;
    let mut out = BiPoly::zero(ctx);

    fn skip_ws(bytes: &[char], pos: &mut usize) {
        while *pos < bytes.len() && bytes[*pos].is_whitespace() {
            *pos += 1;
        }
    }

    fn parse_uint(bytes: &[char], pos: &mut usize) -> Option<u64> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == start {
            return None;
        }
        bytes[start..*pos].iter().collect::<String>().parse().ok()
    }

    skip_ws(&bytes, &mut pos);
    if pos == bytes.len() {
        return Err(PolyError::SyntaxError {
            pos,
            msg: "empty input".into(),
        });
    }
    let mut first = true;
    while pos < bytes.len() {
        skip_ws(&bytes, &mut pos);
        if pos == bytes.len() {
            break;
        }
        let mut sign = 1i64;
        if bytes[pos] == '+' || bytes[pos] == '-' {
            if bytes[pos] == '-' {
                sign = -1;
            }
            pos += 1;
        } else if !first {
            return Err(PolyError::SyntaxError {
                pos,
                msg: "expected '+' or '-' between terms".into(),
            });
        }
        first = false;
        skip_ws(&bytes, &mut pos);

        // optional coefficient
        let mut coeff = Scalar::from_int(ctx.field, sign);
        let mut saw_coeff = false;
        if pos < bytes.len() && bytes[pos].is_ascii_digit() {
            let num = parse_uint(&bytes, &mut pos).ok_or(PolyError::SyntaxError {
                pos,
                msg: "bad integer".into(),
            })?;
            saw_coeff = true;
            let mut rat = BigRational::from_integer(BigInt::from(num));
            skip_ws(&bytes, &mut pos);
            if pos < bytes.len() && bytes[pos] == '/' {
                pos += 1;
                skip_ws(&bytes, &mut pos);
                let den = parse_uint(&bytes, &mut pos).ok_or(PolyError::SyntaxError {
                    pos,
                    msg: "bad denominator".into(),
                })?;
                if den == 0 {
                    return Err(PolyError::SyntaxError {
                        pos,
                        msg: "zero denominator".into(),
                    });
                }
                rat /= BigRational::from_integer(BigInt::from(den));
            }
            if sign < 0 {
                rat = -rat;
            }
            coeff = Scalar::from_rational(ctx.field, &rat).map_err(|_| PolyError::SyntaxError {
                pos,
                msg: "denominator vanishes in the base field".into(),
            })?;
        }

        // variable powers
        let mut mono = Monomial::one(ctx);
        loop {
            skip_ws(&bytes, &mut pos);
            if saw_coeff || mono != Monomial::one(ctx) {
                // need a '*' before the next factor, if any
                if pos < bytes.len() && bytes[pos] == '*' {
                    pos += 1;
                    skip_ws(&bytes, &mut pos);
                } else {
                    break;
                }
            }
            if pos >= bytes.len() {
                return Err(PolyError::SyntaxError {
                    pos,
                    msg: "dangling '*'".into(),
                });
            }
            let c = bytes[pos];
            if c != 'Y' && c != 'X' && c != 'y' && c != 'x' {
                if saw_coeff || mono != Monomial::one(ctx) {
                    return Err(PolyError::SyntaxError {
                        pos,
                        msg: format!("expected variable, found '{c}'"),
                    });
                }
                return Err(PolyError::SyntaxError {
                    pos,
                    msg: format!("expected term, found '{c}'"),
                });
            }
            pos += 1;
            let idx = parse_uint(&bytes, &mut pos).ok_or(PolyError::SyntaxError {
                pos,
                msg: "variable needs an index".into(),
            })? as usize;
            let v = if c == 'Y' || c == 'y' {
                if idx > ctx.r {
                    return Err(PolyError::UnknownVariable(format!("Y{idx}")));
                }
                ctx.y_var(idx)
            } else {
                if idx > ctx.n {
                    return Err(PolyError::UnknownVariable(format!("X{idx}")));
                }
                ctx.x_var(idx)
            };
            let mut e = 1u64;
            skip_ws(&bytes, &mut pos);
            if pos < bytes.len() && bytes[pos] == '^' {
                pos += 1;
                skip_ws(&bytes, &mut pos);
                e = parse_uint(&bytes, &mut pos).ok_or(PolyError::SyntaxError {
                    pos,
                    msg: "bad exponent".into(),
                })?;
            }
            if e > u16::MAX as u64 {
                return Err(PolyError::SyntaxError {
                    pos,
                    msg: "exponent too large".into(),
                });
            }
            let mut exps = vec![0u16; ctx.num_vars()];
            exps[v] = e as u16;
            mono = mono.mul(&Monomial { exps });
            saw_coeff = true; // subsequent factors need '*'
        }
        out.add_term(mono, coeff);
        skip_ws(&bytes, &mut pos);
        if pos < bytes.len() && bytes[pos] != '+' && bytes[pos] != '-' {
            return Err(PolyError::SyntaxError {
                pos,
                msg: format!("unexpected '{}'", bytes[pos]),
            });
        }
    }
    Ok(out)
}

/// Renders a polynomial in the same grammar accepted by [`parse_poly`].
pub fn format_poly(p: &BiPoly) -> String {
    p.format()
}

/// Determinant by fraction-free Bareiss elimination.  Entries may be any
/// polynomials; all intermediate divisions are exact.
pub fn det_bareiss(m: &[Vec<BiPoly>]) -> Result<BiPoly, PolyError> {
    let n = m.len();
    if n == 0 {
        panic!("determinant of an empty matrix");
    }
    let ctx = m[0][0].ctx;
    for row in m {
        assert_eq!(row.len(), n, "determinant needs a square matrix");
        for e in row {
            if e.ctx != ctx {
                return Err(PolyError::ContextMismatch);
            }
        }
    }
    let mut a: Vec<Vec<BiPoly>> = m.to_vec();
    let mut sign = false;
    let mut prev = BiPoly::one(&ctx);
    for k in 0..n {
        // pick the sparsest nonzero pivot in column k
        let pivot = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| (a[i][k].num_terms(), i));
        let Some(p) = pivot else {
            return Ok(BiPoly::zero(&ctx));
        };
        if p != k {
            a.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t1 = a[i][j].mul(&a[k][k])?;
                let t2 = a[i][k].mul(&a[k][j])?;
                let num = t1.sub(&t2)?;
                a[i][j] = num.exact_divide(&prev)?;
            }
            a[i][k] = BiPoly::zero(&ctx);
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign { det.neg() } else { det })
}

/// Determinant by cofactor expansion along the sparsest row; meant for
/// cross-checking Bareiss on small matrices.
pub fn det_cofactor(m: &[Vec<BiPoly>]) -> Result<BiPoly, PolyError> {
    let n = m.len();
    let ctx = m[0][0].ctx;
    assert!(n <= 6, "cofactor expansion is for small matrices");
    fn rec(m: &Vec<Vec<BiPoly>>, ctx: &PolyCtx) -> Result<BiPoly, PolyError> {
        let n = m.len();
        if n == 1 {
            return Ok(m[0][0].clone());
        }
        let row = (0..n)
            .min_by_key(|&i| m[i].iter().filter(|e| !e.is_zero()).count())
            .unwrap();
        let mut acc = BiPoly::zero(ctx);
        for j in 0..n {
            if m[row][j].is_zero() {
                continue;
            }
            let sub: Vec<Vec<BiPoly>> = (0..n)
                .filter(|&i| i != row)
                .map(|i| {
                    (0..n)
                        .filter(|&jj| jj != j)
                        .map(|jj| m[i][jj].clone())
                        .collect()
                })
                .collect();
            let minor = rec(&sub, ctx)?;
            let term = m[row][j].mul(&minor)?;
            if (row + j) % 2 == 0 {
                acc = acc.add(&term)?;
            } else {
                acc = acc.sub(&term)?;
            }
        }
        Ok(acc)
    }
    rec(&m.to_vec(), &ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn ctx() -> PolyCtx {
        PolyCtx::new(1, 2, FieldSpec::Rationals)
    }

    #[test]
    fn parse_and_format_round_trip() {
        let c = ctx();
        for s in [
            "Y0*X0^2 - 2*X1*X2",
            "3*Y1^2 + 1/2*X0",
            "-X0^3 + X1^3 + X2^3",
            "7",
            "-1/3",
            "Y0",
        ] {
            let p = parse_poly(&c, s).unwrap();
            let t = format_poly(&p);
            let q = parse_poly(&c, &t).unwrap();
            assert_eq!(p, q, "round trip through {t}");
        }
    }

    #[test]
    fn parse_examples() {
        let c = ctx();
        let p = parse_poly(&c, "Y0 * X0 ^ 2 + 1/2 * X1 * X2").unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.bidegree(), None); // mixed (1,2) and (0,2)
        let q = parse_poly(&c, "Y0*X0^2+Y1*X1^2").unwrap();
        assert_eq!(q.bidegree(), Some(Bidegree::new(1, 2)));
    }

    #[test]
    fn parse_rejects_garbage() {
        let c = ctx();
        assert!(matches!(
            parse_poly(&c, "X0 $ X1"),
            Err(PolyError::SyntaxError { .. })
        ));
        assert!(matches!(
            parse_poly(&c, "X5"),
            Err(PolyError::UnknownVariable(_))
        ));
        assert!(matches!(
            parse_poly(&c, "Y2 + X0"),
            Err(PolyError::UnknownVariable(_))
        ));
        assert!(matches!(
            parse_poly(&c, ""),
            Err(PolyError::SyntaxError { .. })
        ));
        assert!(matches!(
            parse_poly(&c, "2*"),
            Err(PolyError::SyntaxError { .. })
        ));
    }

    #[test]
    fn derivative_and_euler_identity() {
        let c = PolyCtx::new(0, 2, FieldSpec::Rationals);
        // f = X0^3 + X1^3 + X2^3 is homogeneous of degree 3:
        // sum X_j df/dX_j = 3 f
        let f = parse_poly(&c, "X0^3 + X1^3 + X2^3").unwrap();
        let mut acc = BiPoly::zero(&c);
        for j in 0..=2 {
            let d = f.partial_derivative(c.x_var(j));
            let xj = BiPoly::variable(&c, c.x_var(j));
            acc = acc.add(&d.mul(&xj).unwrap()).unwrap();
        }
        let three_f = f.scale(&Scalar::from_int(c.field, 3));
        assert_eq!(acc, three_f);
    }

    #[test]
    fn exact_division_works_and_fails() {
        let c = ctx();
        let f = parse_poly(&c, "X0^2 - X1^2").unwrap();
        let g = parse_poly(&c, "X0 - X1").unwrap();
        let q = f.exact_divide(&g).unwrap();
        assert_eq!(q, parse_poly(&c, "X0 + X1").unwrap());
        let h = parse_poly(&c, "X0^2 + X1^2").unwrap();
        assert_eq!(h.exact_divide(&g), Err(PolyError::NotDivisible));
        assert_eq!(
            f.exact_divide(&BiPoly::zero(&c)),
            Err(PolyError::DivisionByZeroPoly)
        );
    }

    #[test]
    fn monomial_enumeration_counts() {
        let c = ctx(); // r = 1, n = 2
        let ms = monomials_of_bidegree(&c, Bidegree::new(1, 2));
        assert_eq!(ms.len(), 2 * 6);
        assert_eq!(count_monomials(&c, Bidegree::new(1, 2)), Some(12));
        // descending lex, so Y0-heavy and X0-heavy first
        assert_eq!(ms[0].format(&c), "Y0*X0^2");
        let last = ms.last().unwrap();
        assert_eq!(last.format(&c), "Y1*X2^2");
    }

    #[test]
    fn determinants_agree() {
        let c = ctx();
        let m = vec![
            vec![
                parse_poly(&c, "X0 + X1").unwrap(),
                parse_poly(&c, "X2").unwrap(),
                parse_poly(&c, "1").unwrap(),
            ],
            vec![
                parse_poly(&c, "X1").unwrap(),
                parse_poly(&c, "X0 - X2").unwrap(),
                BiPoly::zero(&c),
            ],
            vec![
                parse_poly(&c, "Y0").unwrap(),
                parse_poly(&c, "Y1*X2").unwrap(),
                parse_poly(&c, "X0").unwrap(),
            ],
        ];
        let d1 = det_bareiss(&m).unwrap();
        let d2 = det_cofactor(&m).unwrap();
        assert_eq!(d1, d2);
        assert!(!d1.is_zero());
    }

    #[test]
    fn det_of_singular_matrix_is_zero() {
        let c = ctx();
        let row = vec![
            parse_poly(&c, "X0").unwrap(),
            parse_poly(&c, "X1").unwrap(),
        ];
        let m = vec![row.clone(), row];
        assert!(det_bareiss(&m).unwrap().is_zero());
    }

    #[test]
    fn restriction_drops_variables() {
        let c = PolyCtx::new(1, 3, FieldSpec::Rationals);
        let f = parse_poly(&c, "Y0*X0^2 + Y1*X1*X2 + Y0*X3^2").unwrap();
        let g = f.restrict_x_to_zero(&[1]);
        assert_eq!(g.ctx.n, 2);
        // X2, X3 renumber to X1, X2
        assert_eq!(format_poly(&g), "Y0*X0^2 + Y0*X2^2");
    }
}
