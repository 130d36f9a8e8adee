//! Exact computation of quadratic Euler characteristics.
//!
//! Given a smooth complete intersection `X` of `r + 1` hypersurfaces of a
//! common degree `m` in projective `n`-space over the rationals or over a
//! prime field of odd characteristic, this crate computes the quadratic
//! Euler characteristic of `X` as an element of the Grothendieck-Witt ring
//! of the base field.  Everything is exact arithmetic: no floating point,
//! no Monte Carlo.
//!
//! The heavy lifting happens in graded pieces of two Jacobian rings
//! attached to the incidence hypersurface of the family; the duality
//! pairing on the middle-degree piece is computed through a Scheja-Storch
//! style trace, and the resulting Gram matrix is reduced to an element of
//! GW(k).  Fermat-type systems additionally admit closed forms and a
//! double-cover (Riemann-Hurwitz) route which serve as independent
//! cross-checks of the main pipeline.

pub mod chern;
pub mod fermat;
pub mod field;
pub mod gradedpiece;
pub mod gw;
pub mod jacobian;
pub mod pipeline;
pub mod poly;
pub mod trace;

mod book;
