//! Elements of the Grothendieck-Witt ring GW(k).
//!
//! A [`GWForm`] is stored as `h * H + <a_1> + .. + <a_s>` where `H` is the
//! hyperbolic form and the `a_i` are canonical square class
//! representatives.  Differences are folded away eagerly through
//! `H - <a> = <-a>`, so `h` may be negative for genuinely virtual
//! elements but no subtracted diagonal classes are ever kept.  The
//! stored shape is canonical only up to Witt-equivalent rewriting of the
//! diagonal part; semantic equality is decided by [`gw_equals`] through
//! the classifying invariants (rank, signature, discriminant and Hasse
//! symbols over `Q`; rank and discriminant over a finite field), not by
//! comparing representations.

use crate::field::{
    hilbert_symbol, odd_primes_of, square_class, FieldError, FieldSpec, Place, Scalar, SquareClass,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum GWError {
    #[error("gram matrix is degenerate")]
    DegenerateForm,
    #[error("forms live over different fields")]
    FieldMismatch,
    #[error("x^m + a is inseparable here (the characteristic divides m)")]
    Inseparable,
    #[error("expected a nonzero field element")]
    NotAUnit,
    #[error("malformed GW expression: {0}")]
    BadSyntax(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An element of GW(k), written `h * H + sum of <a_i>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GWForm {
    field: FieldSpec,
    h: i64,
    diag: Vec<SquareClass>,
}

impl GWForm {
    pub fn zero(k: FieldSpec) -> GWForm {
        GWForm {
            field: k,
            h: 0,
            diag: Vec::new(),
        }
    }

    pub fn hyperbolic(k: FieldSpec, copies: i64) -> GWForm {
        GWForm {
            field: k,
            h: copies,
            diag: Vec::new(),
        }
    }

    /// The rank-one form `<a>`, `a` nonzero.
    pub fn diagonal(k: FieldSpec, a: &Scalar) -> Result<GWForm, GWError> {
        if a.is_zero() {
            return Err(GWError::NotAUnit);
        }
        Ok(GWForm {
            field: k,
            h: 0,
            diag: vec![square_class(k, a)?],
        })
    }

    pub fn from_classes(k: FieldSpec, h: i64, diag: Vec<SquareClass>) -> Result<GWForm, GWError> {
        for c in &diag {
            if c.field() != k {
                return Err(GWError::FieldMismatch);
            }
        }
        let mut f = GWForm { field: k, h, diag };
        f.simplify()?;
        Ok(f)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn hyperbolic_multiplicity(&self) -> i64 {
        self.h
    }

    pub fn diagonal_classes(&self) -> &[SquareClass] {
        &self.diag
    }

    pub fn rank(&self) -> i64 {
        2 * self.h + self.diag.len() as i64
    }

    /// Signature over the rationals (`None` over a finite field).
    pub fn signature(&self) -> Option<i64> {
        match self.field {
            FieldSpec::Rationals => Some(
                self.diag
                    .iter()
                    .map(|c| {
                        let r = c.representative();
                        let r = r.as_rational().expect("rational class");
                        if r.is_negative() {
                            -1
                        } else {
                            1
                        }
                    })
                    .sum(),
            ),
            FieldSpec::PrimeField(_) => None,
        }
    }

    /// Discriminant in the plain product-of-diagonal convention:
    /// `disc(h*H + sum <a_i>) = class((-1)^h * prod a_i)`.
    pub fn disc(&self) -> Result<SquareClass, GWError> {
        let mut acc = Scalar::from_int(self.field, if self.h.rem_euclid(2) == 1 { -1 } else { 1 });
        for c in &self.diag {
            acc = acc.mul(&c.representative());
        }
        Ok(square_class(self.field, &acc)?)
    }

    /// Hasse symbols of the underlying (non-virtual) form at the real
    /// place, at 2, and at every odd prime dividing a diagonal
    /// representative.  `None` over a finite field or when `h < 0`.
    pub fn hasse_symbols(&self) -> Result<Option<Vec<(Place, i32)>>, GWError> {
        if self.field != FieldSpec::Rationals || self.h < 0 {
            return Ok(None);
        }
        let list = self.expanded_rational_diagonal();
        let mut places = vec![Place::Real, Place::Finite(BigUint::from(2u32))];
        for a in &list {
            for p in odd_primes_of(a)? {
                let pl = Place::Finite(p);
                if !places.contains(&pl) {
                    places.push(pl);
                }
            }
        }
        let mut out = Vec::new();
        for v in places {
            out.push((v.clone(), hasse_of_list(&list, &v)?));
        }
        Ok(Some(out))
    }

    /// The diagonal of the form with the hyperbolic part expanded to
    /// `(1, -1)` pairs.  Only meaningful when `h >= 0`.
    fn expanded_rational_diagonal(&self) -> Vec<BigRational> {
        let mut list = Vec::new();
        for _ in 0..self.h.max(0) {
            list.push(BigRational::from_integer(1.into()));
            list.push(BigRational::from_integer((-1).into()));
        }
        for c in &self.diag {
            list.push(c.representative().as_rational().expect("rational").clone());
        }
        list
    }

    pub fn add(&self, other: &GWForm) -> Result<GWForm, GWError> {
        if self.field != other.field {
            return Err(GWError::FieldMismatch);
        }
        let mut diag = self.diag.clone();
        diag.extend(other.diag.iter().cloned());
        GWForm::from_classes(self.field, self.h + other.h, diag)
    }

    pub fn neg(&self) -> Result<GWForm, GWError> {
        // -<a> = <-a> - H
        let mut diag = Vec::with_capacity(self.diag.len());
        for c in &self.diag {
            diag.push(c.neg()?);
        }
        GWForm::from_classes(self.field, -self.h - self.diag.len() as i64, diag)
    }

    pub fn sub(&self, other: &GWForm) -> Result<GWForm, GWError> {
        self.add(&other.neg()?)
    }

    pub fn mul(&self, other: &GWForm) -> Result<GWForm, GWError> {
        if self.field != other.field {
            return Err(GWError::FieldMismatch);
        }
        // H*H = 2H and H*<a> = H make the hyperbolic part absorb cross terms
        let h = 2 * self.h * other.h
            + self.h * other.diag.len() as i64
            + other.h * self.diag.len() as i64;
        let mut diag = Vec::with_capacity(self.diag.len() * other.diag.len());
        for a in &self.diag {
            for b in &other.diag {
                diag.push(a.mul(b)?);
            }
        }
        GWForm::from_classes(self.field, h, diag)
    }

    pub fn scalar_multiple(&self, t: i64) -> Result<GWForm, GWError> {
        let mut acc = GWForm::zero(self.field);
        let step = if t >= 0 { self.clone() } else { self.neg()? };
        for _ in 0..t.unsigned_abs() {
            acc = acc.add(&step)?;
        }
        Ok(acc)
    }

    /// Sorts the diagonal and absorbs `<a> + <-a>` pairs into `H`.
    fn simplify(&mut self) -> Result<(), GWError> {
        let mut counts: BTreeMap<SquareClass, i64> = BTreeMap::new();
        for c in self.diag.drain(..) {
            *counts.entry(c).or_insert(0) += 1;
        }
        let classes: Vec<SquareClass> = counts.keys().cloned().collect();
        for c in classes {
            let n = c.neg()?;
            if n == c {
                // -1 is a square, so <a> + <a> is already hyperbolic
                let cnt = counts.get_mut(&c).unwrap();
                self.h += *cnt / 2;
                *cnt %= 2;
            } else if n > c {
                let avail_c = *counts.get(&c).unwrap_or(&0);
                let avail_n = *counts.get(&n).unwrap_or(&0);
                let t = avail_c.min(avail_n);
                if t > 0 {
                    self.h += t;
                    *counts.get_mut(&c).unwrap() -= t;
                    *counts.get_mut(&n).unwrap() -= t;
                }
            }
        }
        self.diag = counts
            .into_iter()
            .flat_map(|(c, cnt)| std::iter::repeat(c).take(cnt as usize))
            .collect();
        Ok(())
    }
}

fn hasse_of_list(list: &[BigRational], v: &Place) -> Result<i32, GWError> {
    let mut acc = 1i32;
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            acc *= hilbert_symbol(&list[i], &list[j], v)?;
        }
    }
    Ok(acc)
}

/// Decides equality in GW(k).
///
/// The difference is reduced to `h*H + sum <a_i>` with `2h = -s`; it
/// vanishes exactly when the diagonal part is Witt equivalent to `s/2`
/// hyperbolic planes, which is checked on the classifying invariants of
/// the base field.
pub fn gw_equals(f: &GWForm, g: &GWForm) -> Result<bool, GWError> {
    if f.field != g.field {
        return Err(GWError::FieldMismatch);
    }
    let d = f.sub(g)?;
    if d.rank() != 0 {
        return Ok(false);
    }
    if d.diag.is_empty() {
        return Ok(true);
    }
    let t = (d.diag.len() / 2) as i64;
    // discriminant: prod a_i must be (-1)^t up to squares
    let mut prod = Scalar::from_int(d.field, if t % 2 == 1 { -1 } else { 1 });
    for c in &d.diag {
        prod = prod.mul(&c.representative());
    }
    if !square_class(d.field, &prod)?.is_one() {
        return Ok(false);
    }
    match d.field {
        FieldSpec::PrimeField(_) => Ok(true),
        FieldSpec::Rationals => {
            if d.signature() != Some(0) {
                return Ok(false);
            }
            let list: Vec<BigRational> = d
                .diag
                .iter()
                .map(|c| c.representative().as_rational().unwrap().clone())
                .collect();
            let mut hyp = Vec::new();
            for _ in 0..t {
                hyp.push(BigRational::from_integer(1.into()));
                hyp.push(BigRational::from_integer((-1).into()));
            }
            let mut places = vec![Place::Real, Place::Finite(BigUint::from(2u32))];
            for a in &list {
                for p in odd_primes_of(a)? {
                    let pl = Place::Finite(p);
                    if !places.contains(&pl) {
                        places.push(pl);
                    }
                }
            }
            for v in &places {
                if hasse_of_list(&list, v)? != hasse_of_list(&hyp, v)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Summary invariants of a form.
#[derive(Debug, Clone)]
pub struct GWInvariants {
    pub rank: i64,
    pub signature: Option<i64>,
    pub disc: SquareClass,
    pub hasse: Option<Vec<(Place, i32)>>,
}

pub fn invariants(f: &GWForm) -> Result<GWInvariants, GWError> {
    Ok(GWInvariants {
        rank: f.rank(),
        signature: f.signature(),
        disc: f.disc()?,
        hasse: f.hasse_symbols()?,
    })
}

/// Diagonalizes a symmetric Gram matrix into a GW class by exact
/// congruence operations; rejects singular input.
pub fn from_gram(k: FieldSpec, gram: &[Vec<Scalar>]) -> Result<GWForm, GWError> {
    let n = gram.len();
    for row in gram {
        if row.len() != n {
            return Err(GWError::DegenerateForm);
        }
        for e in row {
            if e.field() != k {
                return Err(GWError::FieldMismatch);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if gram[i][j] != gram[j][i] {
                return Err(GWError::DegenerateForm);
            }
        }
    }
    let mut m: Vec<Vec<Scalar>> = gram.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    let mut diag: Vec<SquareClass> = Vec::new();
    while !active.is_empty() {
        // prefer a nonzero diagonal entry
        let pivot = active.iter().copied().find(|&i| !m[i][i].is_zero());
        let i = match pivot {
            Some(i) => i,
            None => {
                // all-zero diagonal: manufacture one from an off-diagonal
                // entry via e_i := e_i + e_j (char != 2)
                let mut found = None;
                'scan: for (ai, &i) in active.iter().enumerate() {
                    for &j in &active[ai + 1..] {
                        if !m[i][j].is_zero() {
                            found = Some((i, j));
                            break 'scan;
                        }
                    }
                }
                let Some((i, j)) = found else {
                    return Err(GWError::DegenerateForm);
                };
                for col in 0..n {
                    let s = m[i][col].add(&m[j][col]);
                    m[i][col] = s;
                }
                for row in 0..n {
                    let s = m[row][i].add(&m[row][j]);
                    m[row][i] = s;
                }
                i
            }
        };
        let d = m[i][i].clone();
        diag.push(square_class(k, &d)?);
        let others: Vec<usize> = active.iter().copied().filter(|&j| j != i).collect();
        for &j in &others {
            if m[i][j].is_zero() {
                continue;
            }
            let factor = m[i][j].div(&d).expect("pivot nonzero");
            for col in 0..n {
                let delta = factor.mul(&m[i][col]);
                m[j][col] = m[j][col].sub(&delta);
            }
            for row in 0..n {
                let delta = factor.mul(&m[row][i]);
                m[row][j] = m[row][j].sub(&delta);
            }
        }
        active.retain(|&j| j != i);
    }
    GWForm::from_classes(k, 0, diag)
}

/// Closed form of the trace form of `k[x]/(x^m + a)` twisted by a unit
/// `u`: the Gram matrix of `(w1, w2) -> Tr(u * w1 * w2)` on the power
/// basis.
pub fn trace_form_root_extension(
    k: FieldSpec,
    a: &Scalar,
    m: u32,
    u: &Scalar,
) -> Result<GWForm, GWError> {
    check_root_extension_args(k, a, m, u)?;
    let um = u.mul(&Scalar::from_int(k, m as i64));
    if m == 1 {
        return GWForm::diagonal(k, u);
    }
    if m % 2 == 1 {
        let mut f = GWForm::hyperbolic(k, ((m - 1) / 2) as i64);
        f = f.add(&GWForm::diagonal(k, &um)?)?;
        Ok(f)
    } else {
        let mut f = GWForm::hyperbolic(k, ((m - 2) / 2) as i64);
        f = f.add(&GWForm::diagonal(k, &um)?)?;
        let minus_aum = a.neg().mul(&um);
        f = f.add(&GWForm::diagonal(k, &minus_aum)?)?;
        Ok(f)
    }
}

/// Same trace form computed directly from the Gram matrix on the power
/// basis `1, x, .., x^{m-1}`; cross-checks the closed form.
pub fn trace_form_root_extension_gram(
    k: FieldSpec,
    a: &Scalar,
    m: u32,
    u: &Scalar,
) -> Result<GWForm, GWError> {
    check_root_extension_args(k, a, m, u)?;
    let msc = Scalar::from_int(k, m as i64);
    let gram: Vec<Vec<Scalar>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    // Tr(u x^{i+j}) on k[x]/(x^m = -a)
                    let s = i + j;
                    if s == 0 {
                        u.mul(&msc)
                    } else if s == m {
                        u.mul(&msc).mul(&a.neg())
                    } else {
                        Scalar::zero(k)
                    }
                })
                .collect()
        })
        .collect();
    from_gram(k, &gram)
}

fn check_root_extension_args(k: FieldSpec, a: &Scalar, m: u32, u: &Scalar) -> Result<(), GWError> {
    if a.field() != k || u.field() != k {
        return Err(GWError::FieldMismatch);
    }
    if a.is_zero() || u.is_zero() {
        return Err(GWError::NotAUnit);
    }
    if m == 0 {
        return Err(GWError::NotAUnit);
    }
    if k.kills(m as i64) {
        return Err(GWError::Inseparable);
    }
    Ok(())
}

/// Parses `3*H + <2> + <-1>`-style expressions.
pub fn parse_gw(k: FieldSpec, input: &str) -> Result<GWForm, GWError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(GWError::BadSyntax("empty expression".into()));
    }
    if s == "0" {
        return Ok(GWForm::zero(k));
    }
    let mut acc = GWForm::zero(k);
    let mut rest = s;
    let mut sign = 1i64;
    let mut first = true;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        if rest.starts_with('+') || rest.starts_with('-') {
            sign = if rest.starts_with('-') { -1 } else { 1 };
            rest = &rest[1..];
            first = false;
        } else if !first {
            return Err(GWError::BadSyntax(format!("expected '+' or '-' near '{rest}'")));
        } else {
            first = false;
        }
        rest = rest.trim_start();
        let term;
        if let Some(close) = rest.strip_prefix('<') {
            let end = close
                .find('>')
                .ok_or_else(|| GWError::BadSyntax("unclosed '<'".into()))?;
            let inner = &close[..end];
            let a = Scalar::parse(k, inner)
                .map_err(|e| GWError::BadSyntax(format!("bad class <{inner}>: {e}")))?;
            term = GWForm::diagonal(k, &a)?;
            rest = &close[end + 1..];
        } else {
            // h or h*H or H
            let end = rest
                .find(['+', '-'])
                .unwrap_or(rest.len());
            let tok = rest[..end].trim();
            rest = &rest[end..];
            let tok_nospace: String = tok.chars().filter(|c| !c.is_whitespace()).collect();
            if tok_nospace == "H" {
                term = GWForm::hyperbolic(k, 1);
            } else if tok_nospace == "0" {
                term = GWForm::zero(k);
            } else if let Some(count) = tok_nospace.strip_suffix("*H") {
                let c: i64 = count
                    .parse()
                    .map_err(|_| GWError::BadSyntax(format!("bad multiplicity '{count}'")))?;
                term = GWForm::hyperbolic(k, c);
            } else {
                return Err(GWError::BadSyntax(format!(
                    "unrecognized term '{tok}' (expected `H`, `k*H` or `<a>`)"
                )));
            }
        }
        acc = if sign >= 0 {
            acc.add(&term)?
        } else {
            acc.sub(&term)?
        };
    }
    Ok(acc)
}

/// Renders in the same grammar accepted by [`parse_gw`].
pub fn format_gw(f: &GWForm) -> String {
    let mut parts: Vec<String> = Vec::new();
    if f.h == 1 {
        parts.push("H".to_string());
    } else if f.h != 0 {
        parts.push(format!("{}*H", f.h));
    }
    for c in &f.diag {
        parts.push(format!("<{c}>"));
    }
    if parts.is_empty() {
        return "0".to_string();
    }
    parts.join(" + ")
}

impl fmt::Display for GWForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_gw(self))
    }
}

/// JSON shape of a GW element: hyperbolic multiplicity plus diagonal
/// class representatives as strings.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GwJson {
    pub h: i64,
    pub diag: Vec<String>,
}

impl GwJson {
    pub fn from_form(f: &GWForm) -> GwJson {
        GwJson {
            h: f.h,
            diag: f.diag.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn to_form(&self, k: FieldSpec) -> Result<GWForm, GWError> {
        let mut diag = Vec::new();
        for s in &self.diag {
            let a = Scalar::parse(k, s).map_err(GWError::Field)?;
            diag.push(square_class(k, &a)?);
        }
        GWForm::from_classes(k, self.h, diag)
    }
}
