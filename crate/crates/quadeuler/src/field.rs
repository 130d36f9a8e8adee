//! Base fields: the rationals and prime fields of odd characteristic.
//!
//! A [`Scalar`] is an exact field element, a [`SquareClass`] is its image
//! in `k*/(k*)^2` with a canonical representative.  Square classes over
//! the rationals are signed squarefree integers, obtained by factoring;
//! factorization is trial division plus Pollard rho with an iteration
//! budget, and gives up with [`FieldError::FactorizationLimit`] rather
//! than stalling.  Hilbert symbols over the rationals are computed from
//! the standard local formulas at the real place, at 2 and at odd primes.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum FieldError {
    #[error("square class and inverse are undefined for zero")]
    ZeroElement,
    #[error("factorization budget exhausted on {0} (square class over Q needs the full factorization)")]
    FactorizationLimit(BigUint),
    #[error("scalars live over different fields")]
    FieldMismatch,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported (the theory needs 2 invertible)")]
    CharacteristicTwo,
    #[error("hilbert symbol place must be the real place, 2, or an odd prime")]
    BadPlace,
    #[error("malformed scalar literal")]
    BadLiteral,
}

/// The base field of a computation: `Q` or `F_p` with `p` an odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    /// Prime field of odd characteristic.
    PrimeField(u64),
}

impl FieldSpec {
    pub fn validate(self) -> Result<(), FieldError> {
        match self {
            FieldSpec::Rationals => Ok(()),
            FieldSpec::PrimeField(2) => Err(FieldError::CharacteristicTwo),
            FieldSpec::PrimeField(p) => {
                if is_prime_u64(p) {
                    Ok(())
                } else {
                    Err(FieldError::NotPrime(p))
                }
            }
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => p,
        }
    }

    /// True when the integer `v` maps to zero in the field.
    pub fn kills(self, v: i64) -> bool {
        match self {
            FieldSpec::Rationals => v == 0,
            FieldSpec::PrimeField(p) => v.rem_euclid(p as i64) == 0,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

/// An exact element of the base field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Fp { val: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Rationals,
            Scalar::Fp { p, .. } => FieldSpec::PrimeField(*p),
        }
    }

    pub fn zero(k: FieldSpec) -> Scalar {
        Scalar::from_int(k, 0)
    }

    pub fn one(k: FieldSpec) -> Scalar {
        Scalar::from_int(k, 1)
    }

    pub fn from_int(k: FieldSpec, v: i64) -> Scalar {
        match k {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
            FieldSpec::PrimeField(p) => Scalar::Fp {
                val: v.rem_euclid(p as i64) as u64,
                p,
            },
        }
    }

    pub fn from_bigint(k: FieldSpec, v: &BigInt) -> Scalar {
        match k {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(v.clone())),
            FieldSpec::PrimeField(p) => {
                let m = v.mod_floor(&BigInt::from(p));
                Scalar::Fp {
                    val: m.to_u64().expect("residue fits in u64"),
                    p,
                }
            }
        }
    }

    /// Interprets a rational number in the field; over `F_p` the
    /// denominator must be prime to `p`.
    pub fn from_rational(k: FieldSpec, v: &BigRational) -> Result<Scalar, FieldError> {
        match k {
            FieldSpec::Rationals => Ok(Scalar::Rat(v.clone())),
            FieldSpec::PrimeField(_) => {
                let num = Scalar::from_bigint(k, v.numer());
                let den = Scalar::from_bigint(k, v.denom());
                num.div(&den)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { val, .. } => *val == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { val, .. } => *val == 1,
        }
    }

    fn check_same(&self, other: &Scalar) {
        assert_eq!(
            self.field(),
            other.field(),
            "scalar arithmetic across different fields"
        );
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.check_same(other);
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fp { val: a, p }, Scalar::Fp { val: b, .. }) => Scalar::Fp {
                val: addmod(*a, *b, *p),
                p: *p,
            },
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.check_same(other);
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fp { val: a, p }, Scalar::Fp { val: b, .. }) => Scalar::Fp {
                val: mulmod(*a, *b, *p),
                p: *p,
            },
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Fp { val, p } => Scalar::Fp {
                val: if *val == 0 { 0 } else { p - val },
                p: *p,
            },
        }
    }

    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        Ok(match self {
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Fp { val, p } => Scalar::Fp {
                val: invmod(*val, *p),
                p: *p,
            },
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u64) -> Scalar {
        let mut acc = Scalar::one(self.field());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Parses `"p"`, `"-p"` or `"p/q"`.
    pub fn parse(k: FieldSpec, s: &str) -> Result<Scalar, FieldError> {
        let s = s.trim();
        let rat: BigRational = match s.split_once('/') {
            Some((num, den)) => {
                let n: BigInt = num.trim().parse().map_err(|_| FieldError::BadLiteral)?;
                let d: BigInt = den.trim().parse().map_err(|_| FieldError::BadLiteral)?;
                if d.is_zero() {
                    return Err(FieldError::ZeroElement);
                }
                BigRational::new(n, d)
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| FieldError::BadLiteral)?;
                BigRational::from_integer(n)
            }
        };
        Scalar::from_rational(k, &rat)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Fp { val, .. } => write!(f, "{val}"),
        }
    }
}

fn addmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    // these witnesses decide primality for every n < 2^64
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        let mut composite = true;
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                composite = false;
                break;
            }
        }
        if composite {
            return false;
        }
    }
    true
}

const TRIAL_BOUND: u64 = 100_000;
const RHO_BUDGET: usize = 2_000_000;

/// Factors a positive integer, or reports that the budget ran out.
pub fn factor(n: &BigUint) -> Result<Vec<(BigUint, u32)>, FieldError> {
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return Err(FieldError::ZeroElement);
    }
    let push = |p: BigUint, e: u32, out: &mut Vec<(BigUint, u32)>| {
        if let Some(slot) = out.iter_mut().find(|(q, _)| *q == p) {
            slot.1 += e;
        } else {
            out.push((p, e));
        }
    };
    let mut d = 2u64;
    while d <= TRIAL_BOUND {
        let db = BigUint::from(d);
        if &db * &db > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &db).is_zero() {
            rest /= &db;
            e += 1;
        }
        if e > 0 {
            push(db, e, &mut out);
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            push(m, 1, &mut out);
            continue;
        }
        let f = pollard_rho(&m).ok_or_else(|| FieldError::FactorizationLimit(n.clone()))?;
        let q = &m / &f;
        stack.push(f);
        stack.push(q);
    }
    out.sort();
    Ok(out)
}

/// Brent-style Pollard rho with a fixed iteration budget.
fn pollard_rho(n: &BigUint) -> Option<BigUint> {
    let one = BigUint::one();
    if (n % 2u32).is_zero() {
        return Some(BigUint::from(2u32));
    }
    let mut spent = 0usize;
    for c in 1u64..64 {
        let cc = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &cc) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        while d.is_one() {
            if spent >= RHO_BUDGET {
                return None;
            }
            spent += 1;
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if !d.is_one() && &d != n {
            return Some(d);
        }
    }
    None
}

/// Product of the primes dividing `n` with odd multiplicity.
fn squarefree_part(n: &BigUint) -> Result<BigUint, FieldError> {
    let mut out = BigUint::one();
    for (p, e) in factor(n)? {
        if e % 2 == 1 {
            out *= p;
        }
    }
    Ok(out)
}

/// A square class in `k*/(k*)^2`, held by its canonical representative:
/// a signed squarefree integer over `Q`, and `1` or the least positive
/// nonresidue over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    rep: ClassRep,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum ClassRep {
    Rat(BigInt),
    Fp { val: u64, p: u64 },
}

impl Ord for ClassRep {
    /// Positive representatives sort before negative ones, each group by
    /// magnitude; this fixes the display order of diagonal parts.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (ClassRep::Rat(a), ClassRep::Rat(b)) => {
                let key = |x: &BigInt| (x.is_negative(), x.magnitude().clone());
                key(a).cmp(&key(b))
            }
            (ClassRep::Fp { val: a, p: pa }, ClassRep::Fp { val: b, p: pb }) => {
                (pa, a).cmp(&(pb, b))
            }
            (ClassRep::Rat(_), ClassRep::Fp { .. }) => std::cmp::Ordering::Less,
            (ClassRep::Fp { .. }, ClassRep::Rat(_)) => std::cmp::Ordering::Greater,
        }
    }
}

impl PartialOrd for ClassRep {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl SquareClass {
    pub fn field(&self) -> FieldSpec {
        match &self.rep {
            ClassRep::Rat(_) => FieldSpec::Rationals,
            ClassRep::Fp { p, .. } => FieldSpec::PrimeField(*p),
        }
    }

    /// The canonical representative as a scalar.
    pub fn representative(&self) -> Scalar {
        match &self.rep {
            ClassRep::Rat(n) => Scalar::Rat(BigRational::from_integer(n.clone())),
            ClassRep::Fp { val, p } => Scalar::Fp { val: *val, p: *p },
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.rep {
            ClassRep::Rat(n) => n.is_one(),
            ClassRep::Fp { val, .. } => *val == 1,
        }
    }

    pub fn mul(&self, other: &SquareClass) -> Result<SquareClass, FieldError> {
        if self.field() != other.field() {
            return Err(FieldError::FieldMismatch);
        }
        square_class(self.field(), &self.representative().mul(&other.representative()))
    }

    pub fn neg(&self) -> Result<SquareClass, FieldError> {
        square_class(self.field(), &self.representative().neg())
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rep {
            ClassRep::Rat(n) => write!(f, "{n}"),
            ClassRep::Fp { val, .. } => write!(f, "{val}"),
        }
    }
}

/// Least positive quadratic nonresidue mod `p`.
pub fn least_nonresidue(p: u64) -> u64 {
    let mut c = 2u64;
    loop {
        if powmod(c, (p - 1) / 2, p) == p - 1 {
            return c;
        }
        c += 1;
    }
}

/// Canonical square class of a nonzero scalar.
pub fn square_class(k: FieldSpec, a: &Scalar) -> Result<SquareClass, FieldError> {
    if a.field() != k {
        return Err(FieldError::FieldMismatch);
    }
    if a.is_zero() {
        return Err(FieldError::ZeroElement);
    }
    match a {
        Scalar::Rat(r) => {
            // numerator times denominator has the same class as r
            let prod = r.numer() * r.denom();
            let (sign, mag) = (prod.sign(), prod.magnitude());
            let sf = squarefree_part(mag)?;
            let mut rep = BigInt::from_biguint(Sign::Plus, sf);
            if sign == Sign::Minus {
                rep = -rep;
            }
            Ok(SquareClass {
                rep: ClassRep::Rat(rep),
            })
        }
        Scalar::Fp { val, p } => {
            let rep = if powmod(*val, (p - 1) / 2, *p) == 1 {
                1
            } else {
                least_nonresidue(*p)
            };
            Ok(SquareClass {
                rep: ClassRep::Fp { val: rep, p: *p },
            })
        }
    }
}

/// Whether a nonzero scalar is a square in the field.
pub fn is_square(k: FieldSpec, a: &Scalar) -> Result<bool, FieldError> {
    Ok(square_class(k, a)?.is_one())
}

/// A place of `Q`: the real place or a prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Finite(BigUint),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "oo"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

fn valuation(n: &BigInt, p: &BigUint) -> (i64, BigInt) {
    let pb = BigInt::from_biguint(Sign::Plus, p.clone());
    let mut v = 0i64;
    let mut rest = n.clone();
    while !rest.is_zero() && (&rest % &pb).is_zero() {
        rest /= &pb;
        v += 1;
    }
    (v, rest)
}

/// Valuation and unit part of a nonzero rational at `p`.
fn rational_valuation(r: &BigRational, p: &BigUint) -> (i64, BigRational) {
    let (vn, un) = valuation(r.numer(), p);
    let (vd, ud) = valuation(r.denom(), p);
    (vn - vd, BigRational::new(un, ud))
}

/// Legendre symbol of a rational unit at an odd prime (numerator and
/// denominator both prime to `p`).
fn legendre_unit(u: &BigRational, p: &BigUint) -> i32 {
    let pb = BigInt::from_biguint(Sign::Plus, p.clone());
    let num = u.numer().mod_floor(&pb);
    let den = u.denom().mod_floor(&pb);
    let den_inv = den.modpow(&(&pb - BigInt::from(2)), &pb);
    let res = (num * den_inv).mod_floor(&pb);
    let e = (&pb - BigInt::one()) / BigInt::from(2);
    let s = res.modpow(&e, &pb);
    if s.is_one() {
        1
    } else if s.is_zero() {
        0
    } else {
        -1
    }
}

/// Unit part of a rational mod 8 (denominator odd).
fn unit_mod8(u: &BigRational) -> u64 {
    let eight = BigInt::from(8);
    let num = u.numer().mod_floor(&eight).to_u64().unwrap();
    let den = u.denom().mod_floor(&eight).to_u64().unwrap();
    // inverses mod 8: 1*1, 3*3, 5*5, 7*7 are all 1
    (num * den) % 8
}

/// Hilbert symbol `(a, b)_v` over `Q` at the real place or a prime.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: &Place) -> Result<i32, FieldError> {
    if a.is_zero() || b.is_zero() {
        return Err(FieldError::ZeroElement);
    }
    match place {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                Ok(-1)
            } else {
                Ok(1)
            }
        }
        Place::Finite(p) => {
            if p.is_one() || !is_probable_prime(p) {
                return Err(FieldError::BadPlace);
            }
            let (alpha, u) = rational_valuation(a, p);
            let (beta, v) = rational_valuation(b, p);
            if *p == BigUint::from(2u32) {
                let eps = |x: u64| ((x - 1) / 2) % 2; // x odd mod 8
                let omega = |x: u64| ((x * x - 1) / 8) % 2;
                let um = unit_mod8(&u);
                let vm = unit_mod8(&v);
                let exp = eps(um) * eps(vm)
                    + (alpha.rem_euclid(2) as u64) * omega(vm)
                    + (beta.rem_euclid(2) as u64) * omega(um);
                Ok(if exp % 2 == 0 { 1 } else { -1 })
            } else {
                let mut s = 1i32;
                if alpha % 2 != 0 && beta % 2 != 0 {
                    // (-1)^{(p-1)/2}
                    let pm = (p % BigUint::from(4u32)).to_u64().unwrap();
                    if pm == 3 {
                        s = -s;
                    }
                }
                if beta % 2 != 0 {
                    s *= legendre_unit(&u, p);
                }
                if alpha % 2 != 0 {
                    s *= legendre_unit(&v, p);
                }
                Ok(s)
            }
        }
    }
}

/// The odd primes appearing in the numerator or denominator of `r`.
pub fn odd_primes_of(r: &BigRational) -> Result<Vec<BigUint>, FieldError> {
    let mut out = Vec::new();
    for part in [r.numer(), r.denom()] {
        if part.is_zero() {
            continue;
        }
        for (p, _) in factor(part.magnitude())? {
            if p != BigUint::from(2u32) && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Serializable field tag used in the JSON interfaces.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum FieldJson {
    Name(String),
    Fp { #[serde(rename = "Fp")] p: u64 },
}

impl FieldJson {
    pub fn to_spec(&self) -> Result<FieldSpec, FieldError> {
        let spec = match self {
            FieldJson::Name(s) if s == "Q" => FieldSpec::Rationals,
            FieldJson::Name(_) => return Err(FieldError::FieldMismatch),
            FieldJson::Fp { p } => FieldSpec::PrimeField(*p),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(k: FieldSpec) -> FieldJson {
        match k {
            FieldSpec::Rationals => FieldJson::Name("Q".into()),
            FieldSpec::PrimeField(p) => FieldJson::Fp { p },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Scalar {
        Scalar::from_int(FieldSpec::Rationals, v)
    }

    fn qr(n: i64, d: i64) -> Scalar {
        Scalar::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn square_class_of_eight_is_two() {
        let c = square_class(FieldSpec::Rationals, &q(8)).unwrap();
        assert_eq!(c.representative(), q(2));
    }

    #[test]
    fn square_class_of_minus_nine_fourths() {
        let c = square_class(FieldSpec::Rationals, &qr(-9, 4)).unwrap();
        assert_eq!(c.representative(), q(-1));
    }

    #[test]
    fn square_class_strips_squares() {
        // 360 = 2^3 3^2 5 -> 10
        let c = square_class(FieldSpec::Rationals, &q(360)).unwrap();
        assert_eq!(c.representative(), q(10));
        let d = square_class(FieldSpec::Rationals, &qr(5, 49)).unwrap();
        assert_eq!(d.representative(), q(5));
    }

    #[test]
    fn fp_squares_mod_seven() {
        let k = FieldSpec::PrimeField(7);
        // squares mod 7 are {1, 2, 4}
        for (v, sq) in [(1, true), (2, true), (3, false), (4, true), (5, false), (6, false)] {
            assert_eq!(
                is_square(k, &Scalar::from_int(k, v)).unwrap(),
                sq,
                "residue {v}"
            );
        }
        let c = square_class(k, &Scalar::from_int(k, 3)).unwrap();
        assert_eq!(c.representative(), Scalar::from_int(k, 3));
    }

    #[test]
    fn zero_has_no_class() {
        assert_eq!(
            square_class(FieldSpec::Rationals, &q(0)),
            Err(FieldError::ZeroElement)
        );
    }

    #[test]
    fn hilbert_examples() {
        let m1 = BigRational::from_integer(BigInt::from(-1));
        assert_eq!(hilbert_symbol(&m1, &m1, &Place::Real).unwrap(), -1);
        let one = BigRational::from_integer(BigInt::from(1));
        let b = BigRational::new(BigInt::from(35), BigInt::from(3));
        for v in [Place::Real, Place::Finite(BigUint::from(2u32)), Place::Finite(BigUint::from(7u32))] {
            assert_eq!(hilbert_symbol(&one, &b, &v).unwrap(), 1);
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let seven = BigRational::from_integer(BigInt::from(7));
        assert_eq!(
            hilbert_symbol(&two, &seven, &Place::Finite(BigUint::from(7u32))).unwrap(),
            1
        );
    }

    #[test]
    fn hilbert_two_seven_matches_brute_force_solvability() {
        // (2,7)_7 = 1 should match the existence of a nontrivial zero of
        // 2x^2 + 7y^2 = z^2 over Z/7^3 with not all of x, y, z divisible by 7
        let md = 343i64;
        let mut found = false;
        'search: for x in 0..md {
            for y in 0..md {
                for z in 0..md {
                    if x % 7 == 0 && y % 7 == 0 && z % 7 == 0 {
                        continue;
                    }
                    if (2 * x * x + 7 * y * y - z * z).rem_euclid(md) == 0 {
                        found = true;
                        break 'search;
                    }
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn hilbert_is_symmetric_and_bimultiplicative_at_small_places() {
        let places = [
            Place::Real,
            Place::Finite(BigUint::from(2u32)),
            Place::Finite(BigUint::from(3u32)),
            Place::Finite(BigUint::from(5u32)),
        ];
        let vals: Vec<BigRational> = [-10i64, -3, -1, 2, 3, 5, 6, 15]
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        for v in &places {
            for a in &vals {
                for b in &vals {
                    let ab = hilbert_symbol(a, b, v).unwrap();
                    assert_eq!(ab, hilbert_symbol(b, a, v).unwrap());
                    for c in &vals {
                        let ac = hilbert_symbol(a, c, v).unwrap();
                        let a_bc = hilbert_symbol(a, &(b * c), v).unwrap();
                        assert_eq!(a_bc, ab * ac, "a={a} b={b} c={c} v={v}");
                    }
                }
            }
        }
    }

    #[test]
    fn product_formula_over_all_places() {
        let vals: Vec<BigRational> = [-30i64, -7, -2, -1, 2, 3, 10, 21]
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        for a in &vals {
            for b in &vals {
                let mut prod = hilbert_symbol(a, b, &Place::Real).unwrap();
                let mut primes = vec![BigUint::from(2u32)];
                for part in [a, b] {
                    for (p, _) in factor(part.numer().magnitude()).unwrap() {
                        if !primes.contains(&p) {
                            primes.push(p);
                        }
                    }
                }
                for p in primes {
                    prod *= hilbert_symbol(a, b, &Place::Finite(p)).unwrap();
                }
                assert_eq!(prod, 1, "product formula fails at a={a} b={b}");
            }
        }
    }

    #[test]
    fn factor_large_semiprime() {
        let n = BigUint::from(1_000_003u64) * BigUint::from(998_117u64);
        let fs = factor(&n).unwrap();
        assert_eq!(fs.len(), 2);
    }

    #[test]
    fn field_validation() {
        assert!(FieldSpec::PrimeField(7).validate().is_ok());
        assert_eq!(
            FieldSpec::PrimeField(2).validate(),
            Err(FieldError::CharacteristicTwo)
        );
        assert_eq!(
            FieldSpec::PrimeField(9).validate(),
            Err(FieldError::NotPrime(9))
        );
    }

    #[test]
    fn scalar_arithmetic_mod_p() {
        let k = FieldSpec::PrimeField(11);
        let a = Scalar::from_int(k, 7);
        let b = Scalar::from_int(k, 8);
        assert_eq!(a.add(&b), Scalar::from_int(k, 4));
        assert_eq!(a.mul(&b), Scalar::from_int(k, 1));
        assert_eq!(a.inv().unwrap(), b);
        let r = Scalar::parse(k, "1/2").unwrap();
        assert_eq!(r, Scalar::from_int(k, 6));
    }
}
