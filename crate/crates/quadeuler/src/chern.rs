//! Top Chern numbers of complete intersections and the GW classes of
//! projective spaces.
//!
//! These are the rank-level data the quadratic refinement has to match:
//! the degree of the top Chern class of the tangent bundle is the
//! topological Euler characteristic over the complex numbers, and every
//! quadratic Euler characteristic computed elsewhere in the crate must
//! have exactly this rank.  All series manipulations are truncated
//! integer arithmetic; inverses of `1 + u` use the geometric sum, which
//! terminates because `u` is nilpotent in the truncated ring.

use crate::field::FieldSpec;
use crate::gw::{GWError, GWForm};
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum ChernError {
    #[error("dimension would be negative")]
    NegativeDimension,
    #[error(transparent)]
    Gw(#[from] GWError),
}

/// Univariate polynomial truncated at degree `cap`, integer coefficients.
#[derive(Clone)]
struct Series {
    cap: usize,
    c: Vec<BigInt>,
}

impl Series {
    fn one(cap: usize) -> Series {
        let mut c = vec![BigInt::zero(); cap + 1];
        c[0] = BigInt::one();
        Series { cap, c }
    }

    /// 1 + d*h
    fn linear(cap: usize, d: i64) -> Series {
        let mut s = Series::one(cap);
        if cap >= 1 {
            s.c[1] = BigInt::from(d);
        }
        s
    }

    fn mul(&self, other: &Series) -> Series {
        let cap = self.cap;
        let mut c = vec![BigInt::zero(); cap + 1];
        for i in 0..=cap {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..=cap - i {
                if other.c[j].is_zero() {
                    continue;
                }
                c[i + j] += &self.c[i] * &other.c[j];
            }
        }
        Series { cap, c }
    }

    fn pow(&self, e: usize) -> Series {
        let mut acc = Series::one(self.cap);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of `1 + u` where `self = 1 + u`.
    fn inv(&self) -> Series {
        assert!(self.c[0].is_one(), "can only invert 1 + u");
        let mut u = self.clone();
        u.c[0] = BigInt::zero();
        let mut acc = Series::one(self.cap);
        let mut term = Series::one(self.cap);
        for k in 1..=self.cap {
            term = term.mul(&u);
            if k % 2 == 1 {
                for (a, t) in acc.c.iter_mut().zip(&term.c) {
                    *a -= t;
                }
            } else {
                for (a, t) in acc.c.iter_mut().zip(&term.c) {
                    *a += t;
                }
            }
        }
        acc
    }
}

/// Degree of the top Chern class of the tangent bundle of a smooth
/// complete intersection of hypersurfaces of the given degrees in
/// projective `n`-space; equals its topological Euler characteristic.
pub fn chern_degree_ci(n: usize, degrees: &[u32]) -> Result<BigInt, ChernError> {
    if degrees.len() > n {
        return Err(ChernError::NegativeDimension);
    }
    let dim = n - degrees.len();
    let cap = dim;
    let mut s = Series::linear(cap, 1).pow(n + 1);
    let mut mult = BigInt::one();
    for &d in degrees {
        s = s.mul(&Series::linear(cap, d as i64).inv());
        mult *= BigInt::from(d);
    }
    Ok(mult * &s.c[dim])
}

/// Bivariate polynomial truncated at `h1^(r+1) = h2^(n+1) = 0`.
#[derive(Clone)]
struct BiSeries {
    r: usize,
    n: usize,
    c: Vec<Vec<BigInt>>,
}

impl BiSeries {
    fn zero(r: usize, n: usize) -> BiSeries {
        BiSeries {
            r,
            n,
            c: vec![vec![BigInt::zero(); n + 1]; r + 1],
        }
    }

    fn one(r: usize, n: usize) -> BiSeries {
        let mut s = BiSeries::zero(r, n);
        s.c[0][0] = BigInt::one();
        s
    }

    /// a + b*h1 + c*h2
    fn affine(r: usize, n: usize, a: i64, b: i64, cc: i64) -> BiSeries {
        let mut s = BiSeries::zero(r, n);
        s.c[0][0] = BigInt::from(a);
        if r >= 1 {
            s.c[1][0] = BigInt::from(b);
        }
        if n >= 1 {
            s.c[0][1] = BigInt::from(cc);
        }
        s
    }

    fn mul(&self, other: &BiSeries) -> BiSeries {
        let mut out = BiSeries::zero(self.r, self.n);
        for i1 in 0..=self.r {
            for j1 in 0..=self.n {
                if self.c[i1][j1].is_zero() {
                    continue;
                }
                for i2 in 0..=self.r - i1 {
                    for j2 in 0..=self.n - j1 {
                        if other.c[i2][j2].is_zero() {
                            continue;
                        }
                        let prod = &self.c[i1][j1] * &other.c[i2][j2];
                        out.c[i1 + i2][j1 + j2] += prod;
                    }
                }
            }
        }
        out
    }

    fn pow(&self, e: usize) -> BiSeries {
        let mut acc = BiSeries::one(self.r, self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn add(&self, other: &BiSeries) -> BiSeries {
        let mut out = self.clone();
        for i in 0..=self.r {
            for j in 0..=self.n {
                out.c[i][j] += &other.c[i][j];
            }
        }
        out
    }

    fn inv(&self) -> BiSeries {
        assert!(self.c[0][0].is_one(), "can only invert 1 + u");
        let mut u = self.clone();
        u.c[0][0] = BigInt::zero();
        let mut acc = BiSeries::one(self.r, self.n);
        let mut term = BiSeries::one(self.r, self.n);
        for k in 1..=self.r + self.n {
            term = term.mul(&u);
            if k % 2 == 1 {
                let neg = BiSeries {
                    r: term.r,
                    n: term.n,
                    c: term
                        .c
                        .iter()
                        .map(|row| row.iter().map(|v| -v).collect())
                        .collect(),
                };
                acc = acc.add(&neg);
            } else {
                acc = acc.add(&term);
            }
        }
        acc
    }
}

/// Degree of the top Chern class of the incidence hypersurface of
/// bidegree `(1, m)` in `P^r x P^n`: the coefficient of `h1^r h2^n` in
/// `c(T) / c(O(1, m)) * (h1 + m h2)`.
pub fn chern_degree_biproj(n: usize, r: usize, m: u32) -> Result<BigInt, ChernError> {
    let mi = m as i64;
    let t1 = BiSeries::affine(r, n, 1, 1, 0).pow(r + 1);
    let t2 = BiSeries::affine(r, n, 1, 0, 1).pow(n + 1);
    let denom = BiSeries::affine(r, n, 1, 1, mi).inv();
    let class = BiSeries::affine(r, n, 0, 1, mi);
    let total = t1.mul(&t2).mul(&denom).mul(&class);
    Ok(total.c[r][n].clone())
}

/// The quadratic Euler characteristic of projective `n`-space:
/// `(n/2) H + <1>` for even `n`, `((n+1)/2) H` for odd `n`.
pub fn chi_projective_space(k: FieldSpec, n: i64) -> Result<GWForm, ChernError> {
    if n < 0 {
        return Err(ChernError::NegativeDimension);
    }
    if n % 2 == 0 {
        let one = GWForm::diagonal(k, &crate::field::Scalar::one(k))?;
        Ok(GWForm::hyperbolic(k, n / 2).add(&one)?)
    } else {
        Ok(GWForm::hyperbolic(k, (n + 1) / 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn euler_characteristic_of_projective_spaces() {
        for n in 0..=12usize {
            assert_eq!(
                chern_degree_ci(n, &[]).unwrap(),
                BigInt::from(n as i64 + 1),
                "P^{n}"
            );
        }
    }

    #[test]
    fn quadric_surface_and_curve() {
        // quadric surface in P^3: chi = 4; quadric curve in P^2: chi = 2
        assert_eq!(chern_degree_ci(3, &[2]).unwrap(), BigInt::from(4));
        assert_eq!(chern_degree_ci(2, &[2]).unwrap(), BigInt::from(2));
        // intersection of two quadrics in P^4: chi = 8 (del Pezzo of degree 4)
        assert_eq!(chern_degree_ci(4, &[2, 2]).unwrap(), BigInt::from(8));
        // cubic surface: chi = 9
        assert_eq!(chern_degree_ci(3, &[3]).unwrap(), BigInt::from(9));
    }

    #[test]
    fn negative_dimension_rejected() {
        assert_eq!(
            chern_degree_ci(1, &[2, 2]),
            Err(ChernError::NegativeDimension)
        );
        assert!(chi_projective_space(FieldSpec::Rationals, -1).is_err());
    }

    #[test]
    fn biproj_small_case() {
        // the (1, m) hypersurface in P^1 x P^2 fibers over P^2 with point
        // fibers away from the m^2 base points and P^1 fibers over them,
        // so chi = 3 + m^2
        for m in 2..=6u32 {
            assert_eq!(
                chern_degree_biproj(2, 1, m).unwrap(),
                BigInt::from(3 + (m * m) as i64),
                "m={m}"
            );
        }
    }

    #[test]
    fn biproj_r0_reduces_to_hypersurface() {
        for n in 2..=6usize {
            for m in 2..=4u32 {
                assert_eq!(
                    chern_degree_biproj(n, 0, m).unwrap(),
                    chern_degree_ci(n, &[m]).unwrap(),
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn biproj_matches_fibration_descent() {
        // chi(incidence) = chi(P^{r-1}) chi(P^n) + chi(X) topologically
        for n in 3..=6usize {
            for r in 0..=2usize {
                if n < r + 2 {
                    continue;
                }
                for m in 2..=4u32 {
                    let degrees = vec![m; r + 1];
                    let chi_x = chern_degree_ci(n, &degrees).unwrap();
                    let expect = BigInt::from((r * (n + 1)) as i64) + chi_x;
                    assert_eq!(
                        chern_degree_biproj(n, r, m).unwrap(),
                        expect,
                        "n={n} r={r} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn chi_projective_space_forms() {
        let q = FieldSpec::Rationals;
        for n in 0..=8i64 {
            let f = chi_projective_space(q, n).unwrap();
            assert_eq!(f.rank(), n + 1, "rank of chi(P^{n})");
            if n % 2 == 0 {
                assert_eq!(f.hyperbolic_multiplicity(), n / 2);
                assert_eq!(f.signature(), Some(1));
            } else {
                assert_eq!(f.hyperbolic_multiplicity(), (n + 1) / 2);
                assert_eq!(f.signature(), Some(0));
            }
        }
    }

    #[test]
    fn series_inverse_sanity() {
        // (1 + 2h)^-1 * (1 + 2h) = 1 in the truncated ring
        let s = Series::linear(6, 2);
        let prod = s.mul(&s.inv());
        assert!(prod.c[0].is_one());
        for k in 1..=6 {
            assert!(prod.c[k].is_zero(), "coefficient {k}");
        }
        let cap_contrib = chern_degree_ci(5, &[3]).unwrap();
        assert!(cap_contrib.to_i64().is_some());
    }
}
