//! Small spectrahedral relaxations of rigidly convex sets and hyperbolicity
//! cones.
//!
//! A real zero polynomial `p` (every restriction `p(ta)` to a line through
//! the origin is real-rooted) carries a linear form on polynomials, read off
//! the truncated power series `-log(p(-x)/p(0))`. Tabulating that form on
//! monomials of degree at most three yields an `(n+1) x (n+1)` moment /
//! localization pencil whose positive semidefiniteness locus is an outer
//! spectrahedral approximation of the rigidly convex set of `p`. This crate
//! builds those objects with exact rational arithmetic and provides the
//! oracles used to test them:
//!
//! - [`poly`]: sparse exact multivariate polynomials, truncated log/exp
//!   series and the polynomial transforms (homogenization, rotation, shift,
//!   a-transform, restriction).
//! - [`linalg`]: dense symmetric/Hermitian matrix support with a
//!   two-threshold PSD verdict and the real embedding of Hermitian matrices.
//! - [`moments`]: the pseudo-moment table, closed cubic formulas, Dirac and
//!   Hurwitz-trace oracles, determinantal expansion.
//! - [`pencil`]: relaxation pencils (virtual degree `d`, infinite virtual
//!   degree, LP hierarchy, homogeneous/conic variants, shifted families) and
//!   the half-space relaxation.
//! - [`geometry`]: membership and gauge oracles for rigidly convex sets,
//!   spectrahedra and hyperbolicity cones, plus probabilistic real-zero and
//!   hyperbolicity verification.
//! - [`detrep`]: explicit determinantal representations (planar quadratics,
//!   circle pencil, linear-cofactor construction, perfect families, the
//!   derived-cone pencil of the general symmetric determinant).
//! - [`amalgam`]: real zero amalgamation in the three proven special cases.
//!
//! Floating point enters only at evaluation and eigenvalue boundaries; all
//! polynomial and pencil data is carried as arbitrary-precision rationals.

pub mod amalgam;
pub mod detrep;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod moments;
pub mod pencil;
pub mod poly;
pub mod polymat;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use poly::{Monomial, Polynomial, Rat, TruncatedSeries};
