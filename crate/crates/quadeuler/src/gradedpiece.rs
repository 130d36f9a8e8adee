//! Graded pieces of quotients by bihomogeneous ideals.
//!
//! A (bi)graded piece of `k[Y, X] / (g_1, .., g_s)` is finite dimensional
//! linear algebra: the ideal slice in bidegree `d` is spanned by the rows
//! `mu * g_i` over all monomial multipliers `mu` of complementary
//! bidegree, written in coordinates over the monomial basis of the
//! ambient slice.  This module builds those rows sparsely, eliminates
//! them, and answers dimension and normal form queries.
//!
//! Over the rationals every row is scaled to a primitive integer vector
//! and elimination is fraction free (cross multiplication followed by
//! content stripping), which keeps entries small on the mostly-sparse
//! systems that arise here.  Over a prime field rows are plain `u64`
//! vectors mod `p`.  Pivots are chosen deterministically: columns are
//! processed left to right (descending monomial order) and among the
//! candidate rows the sparsest wins, so the resulting echelon, the pivot
//! set, and hence the quotient basis are reproducible run to run.

use crate::field::{FieldSpec, Scalar};
use crate::poly::{monomials_of_bidegree, BiPoly, Bidegree, Monomial, PolyCtx};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum GradedError {
    #[error("expected a bihomogeneous polynomial of bidegree {expected}, found {found}")]
    WrongBidegree { expected: Bidegree, found: String },
    #[error("polynomial context does not match the piece")]
    ContextMismatch,
    #[error("ideal generators must be bihomogeneous and nonzero")]
    BadGenerator,
}

/// The ideal slice in one bidegree, as sparse rows over the ambient
/// monomial basis.
pub struct IdealPiece {
    pub ambient: Vec<Monomial>,
    pub rows: Vec<Vec<(usize, Scalar)>>,
}

/// Sparse rows of the bidegree-`d` slice of the ideal generated by
/// `gens`, over the monomial basis returned by `monomials_of_bidegree`.
pub fn ideal_graded_piece(
    ctx: &PolyCtx,
    gens: &[BiPoly],
    d: Bidegree,
) -> Result<IdealPiece, GradedError> {
    let ambient = monomials_of_bidegree(ctx, d);
    let index: HashMap<&Monomial, usize> = ambient.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows = Vec::new();
    for g in gens {
        if g.ctx != *ctx {
            return Err(GradedError::ContextMismatch);
        }
        if g.is_zero() {
            continue;
        }
        let dg = g.bidegree().ok_or(GradedError::BadGenerator)?;
        let Some(rest) = d.checked_sub(dg) else {
            continue;
        };
        for mu in monomials_of_bidegree(ctx, rest) {
            let mut row: Vec<(usize, Scalar)> = g
                .terms()
                .map(|(m, c)| (index[&mu.mul(m)], c.clone()))
                .collect();
            row.sort_by_key(|(i, _)| *i);
            rows.push(row);
        }
    }
    Ok(IdealPiece { ambient, rows })
}

type IntRow = Vec<(u32, BigInt)>;
type FpRow = Vec<(u32, u64)>;

/// Clears denominators and strips content, returning a primitive integer
/// row with positive leading coefficient.
fn primitive_int_row(row: &[(u32, BigRational)]) -> IntRow {
    let mut lcm = BigInt::one();
    for (_, c) in row {
        lcm = lcm.lcm(c.denom());
    }
    let mut out: IntRow = row
        .iter()
        .map(|(i, c)| (*i, (c * BigRational::from_integer(lcm.clone())).to_integer()))
        .filter(|(_, c)| !c.is_zero())
        .collect();
    strip_content(&mut out);
    out
}

fn strip_content(row: &mut IntRow) {
    if row.is_empty() {
        return;
    }
    let mut g = BigInt::zero();
    for (_, c) in row.iter() {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    if !g.is_one() {
        for (_, c) in row.iter_mut() {
            *c = &*c / &g;
        }
    }
    if row[0].1.is_negative() {
        for (_, c) in row.iter_mut() {
            *c = -&*c;
        }
    }
}

/// alpha * r + beta * p over the integers, with the common leading column
/// cancelled; the result is re-stripped to a primitive row.
fn combine_int(r: &IntRow, p: &IntRow) -> IntRow {
    let lr = &r[0].1;
    let lp = &p[0].1;
    let g = lr.gcd(lp);
    let alpha = lp / &g;
    let beta = -(lr / &g);
    let mut out: IntRow = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < r.len() || j < p.len() {
        if j >= p.len() || (i < r.len() && r[i].0 < p[j].0) {
            out.push((r[i].0, &r[i].1 * &alpha));
            i += 1;
        } else if i >= r.len() || p[j].0 < r[i].0 {
            out.push((p[j].0, &p[j].1 * &beta));
            j += 1;
        } else {
            let v = &r[i].1 * &alpha + &p[j].1 * &beta;
            if !v.is_zero() {
                out.push((r[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    strip_content(&mut out);
    out
}

fn combine_fp(r: &FpRow, p_row: &FpRow, p: u64) -> FpRow {
    let inv = powmod_u64(p_row[0].1, p - 2, p);
    let factor = mulmod_u64(r[0].1, inv, p); // r - factor * p_row
    let mut out: FpRow = Vec::with_capacity(r.len() + p_row.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < r.len() || j < p_row.len() {
        if j >= p_row.len() || (i < r.len() && r[i].0 < p_row[j].0) {
            out.push(r[i].clone());
            i += 1;
        } else if i >= r.len() || p_row[j].0 < r[i].0 {
            let v = p - mulmod_u64(factor, p_row[j].1, p);
            out.push((p_row[j].0, v % p));
            j += 1;
        } else {
            let sub = mulmod_u64(factor, p_row[j].1, p);
            let v = (r[i].1 + p - sub) % p;
            if v != 0 {
                out.push((r[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn mulmod_u64(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod_u64(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_u64(acc, a, p);
        }
        a = mulmod_u64(a, a, p);
        e >>= 1;
    }
    acc
}

/// Echelonizes sparse rows by processing columns left to right; rows are
/// bucketed by leading column, the sparsest candidate becomes the pivot
/// for its column and eliminates the others.
fn echelonize_int(rows: Vec<IntRow>, ncols: usize) -> BTreeMap<u32, IntRow> {
    let mut buckets: Vec<Vec<IntRow>> = vec![Vec::new(); ncols];
    for row in rows {
        if let Some(&(c, _)) = row.first() {
            buckets[c as usize].push(row);
        }
    }
    let mut echelon: BTreeMap<u32, IntRow> = BTreeMap::new();
    for c in 0..ncols {
        let mut cand = std::mem::take(&mut buckets[c]);
        if cand.is_empty() {
            continue;
        }
        let best = (0..cand.len())
            .min_by_key(|&i| (cand[i].len(), i))
            .unwrap();
        let pivot = cand.swap_remove(best);
        for row in cand {
            let reduced = combine_int(&row, &pivot);
            if let Some(&(lead, _)) = reduced.first() {
                buckets[lead as usize].push(reduced);
            }
        }
        echelon.insert(c as u32, pivot);
    }
    echelon
}

fn echelonize_fp(rows: Vec<FpRow>, ncols: usize, p: u64) -> BTreeMap<u32, FpRow> {
    let mut buckets: Vec<Vec<FpRow>> = vec![Vec::new(); ncols];
    for row in rows {
        if let Some(&(c, _)) = row.first() {
            buckets[c as usize].push(row);
        }
    }
    let mut echelon: BTreeMap<u32, FpRow> = BTreeMap::new();
    for c in 0..ncols {
        let mut cand = std::mem::take(&mut buckets[c]);
        if cand.is_empty() {
            continue;
        }
        let best = (0..cand.len())
            .min_by_key(|&i| (cand[i].len(), i))
            .unwrap();
        let pivot = cand.swap_remove(best);
        for row in cand {
            let reduced = combine_fp(&row, &pivot, p);
            if let Some(&(lead, _)) = reduced.first() {
                buckets[lead as usize].push(reduced);
            }
        }
        echelon.insert(c as u32, pivot);
    }
    echelon
}

enum EchelonData {
    Int(BTreeMap<u32, IntRow>),
    Fp { rows: BTreeMap<u32, FpRow>, p: u64 },
}

/// One graded piece of a quotient ring, with a fixed monomial basis of
/// the quotient and normal form reduction onto it.
pub struct QuotientPiece {
    pub ctx: PolyCtx,
    pub bidegree: Bidegree,
    pub ambient: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
    ech: EchelonData,
    basis_cols: Vec<u32>,
    pub basis: Vec<Monomial>,
}

impl QuotientPiece {
    pub fn rank(&self) -> usize {
        match &self.ech {
            EchelonData::Int(rows) => rows.len(),
            EchelonData::Fp { rows, .. } => rows.len(),
        }
    }

    pub fn dim(&self) -> usize {
        self.ambient.len() - self.rank()
    }

    /// Coordinates of `f` on the quotient basis.
    pub fn normal_form(&self, f: &BiPoly) -> Result<Vec<Scalar>, GradedError> {
        if f.ctx != self.ctx {
            return Err(GradedError::ContextMismatch);
        }
        if !f.is_zero() {
            match f.bidegree() {
                Some(d) if d == self.bidegree => {}
                other => {
                    return Err(GradedError::WrongBidegree {
                        expected: self.bidegree,
                        found: other.map_or("inhomogeneous".to_string(), |d| d.to_string()),
                    })
                }
            }
        }
        match &self.ech {
            EchelonData::Int(rows) => {
                let mut v: BTreeMap<u32, BigRational> = BTreeMap::new();
                for (m, c) in f.terms() {
                    let col = *self.index.get(m).ok_or(GradedError::ContextMismatch)?;
                    v.insert(col, c.as_rational().expect("rational piece").clone());
                }
                for (c, row) in rows {
                    let Some(vc) = v.get(c).cloned() else {
                        continue;
                    };
                    if vc.is_zero() {
                        v.remove(c);
                        continue;
                    }
                    let lead = BigRational::from_integer(row[0].1.clone());
                    let t = vc / lead;
                    for (col, rc) in row {
                        let delta = &t * BigRational::from_integer(rc.clone());
                        let slot = v.entry(*col).or_insert_with(BigRational::zero);
                        *slot -= delta;
                        if slot.is_zero() {
                            v.remove(col);
                        }
                    }
                }
                Ok(self
                    .basis_cols
                    .iter()
                    .map(|c| {
                        v.get(c)
                            .map(|r| Scalar::Rat(r.clone()))
                            .unwrap_or_else(|| Scalar::zero(self.ctx.field))
                    })
                    .collect())
            }
            EchelonData::Fp { rows, p } => {
                let p = *p;
                let mut v: BTreeMap<u32, u64> = BTreeMap::new();
                for (m, c) in f.terms() {
                    let col = *self.index.get(m).ok_or(GradedError::ContextMismatch)?;
                    let Scalar::Fp { val, .. } = c else {
                        return Err(GradedError::ContextMismatch);
                    };
                    v.insert(col, *val);
                }
                for (c, row) in rows {
                    let Some(&vc) = v.get(c) else {
                        continue;
                    };
                    if vc == 0 {
                        v.remove(c);
                        continue;
                    }
                    let t = mulmod_u64(vc, powmod_u64(row[0].1, p - 2, p), p);
                    for (col, rc) in row {
                        let sub = mulmod_u64(t, *rc, p);
                        let slot = v.entry(*col).or_insert(0);
                        *slot = (*slot + p - sub) % p;
                        if *slot == 0 {
                            v.remove(col);
                        }
                    }
                }
                Ok(self
                    .basis_cols
                    .iter()
                    .map(|c| Scalar::Fp {
                        val: v.get(c).copied().unwrap_or(0),
                        p,
                    })
                    .collect())
            }
        }
    }

    /// Whether `f` reduces to zero in the quotient piece.
    pub fn is_zero_in_quotient(&self, f: &BiPoly) -> Result<bool, GradedError> {
        Ok(self.normal_form(f)?.iter().all(Scalar::is_zero))
    }

    /// Rebuilds a polynomial from quotient coordinates.
    pub fn poly_from_coords(&self, coords: &[Scalar]) -> BiPoly {
        assert_eq!(coords.len(), self.basis.len());
        let mut out = BiPoly::zero(&self.ctx);
        for (m, c) in self.basis.iter().zip(coords) {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn column_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).map(|&c| c as usize)
    }
}

/// Builds the bidegree-`d` piece of `k[Y, X] / (gens)`.
pub fn quotient_piece(
    ctx: &PolyCtx,
    gens: &[BiPoly],
    d: Bidegree,
) -> Result<QuotientPiece, GradedError> {
    let ambient = monomials_of_bidegree(ctx, d);
    let index: HashMap<Monomial, u32> = ambient
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i as u32))
        .collect();
    let ncols = ambient.len();

    let mut int_rows: Vec<IntRow> = Vec::new();
    let mut fp_rows: Vec<FpRow> = Vec::new();
    let fp = match ctx.field {
        FieldSpec::Rationals => None,
        FieldSpec::PrimeField(p) => Some(p),
    };
    for g in gens {
        if g.ctx != *ctx {
            return Err(GradedError::ContextMismatch);
        }
        if g.is_zero() {
            continue;
        }
        let dg = g.bidegree().ok_or(GradedError::BadGenerator)?;
        let Some(rest) = d.checked_sub(dg) else {
            continue;
        };
        for mu in monomials_of_bidegree(ctx, rest) {
            match fp {
                None => {
                    let mut row: Vec<(u32, BigRational)> = g
                        .terms()
                        .map(|(m, c)| {
                            (index[&mu.mul(m)], c.as_rational().expect("rational").clone())
                        })
                        .collect();
                    row.sort_by_key(|(i, _)| *i);
                    int_rows.push(primitive_int_row(&row));
                }
                Some(_) => {
                    let mut row: FpRow = g
                        .terms()
                        .map(|(m, c)| {
                            let Scalar::Fp { val, .. } = c else {
                                unreachable!("field mismatch caught above")
                            };
                            (index[&mu.mul(m)], *val)
                        })
                        .collect();
                    row.sort_by_key(|(i, _)| *i);
                    fp_rows.push(row);
                }
            }
        }
    }

    let ech = match fp {
        None => EchelonData::Int(echelonize_int(int_rows, ncols)),
        Some(p) => EchelonData::Fp {
            rows: echelonize_fp(fp_rows, ncols, p),
            p,
        },
    };
    let pivot_set: std::collections::BTreeSet<u32> = match &ech {
        EchelonData::Int(rows) => rows.keys().copied().collect(),
        EchelonData::Fp { rows, .. } => rows.keys().copied().collect(),
    };
    let basis_cols: Vec<u32> = (0..ncols as u32).filter(|c| !pivot_set.contains(c)).collect();
    let basis: Vec<Monomial> = basis_cols
        .iter()
        .map(|&c| ambient[c as usize].clone())
        .collect();
    Ok(QuotientPiece {
        ctx: *ctx,
        bidegree: d,
        ambient,
        index,
        ech,
        basis_cols,
        basis,
    })
}

/// Convenience: dimension of one graded piece of the quotient.
pub fn quotient_dim(ctx: &PolyCtx, gens: &[BiPoly], d: Bidegree) -> Result<usize, GradedError> {
    Ok(quotient_piece(ctx, gens, d)?.dim())
}
