//! Homology of d-periodic cell complexes from finite descriptions.
//!
//! The crate has three layers:
//!
//! - weighted quotient graphs ([`wqg`]): exact Betti numbers and explicit
//!   generator construction for periodic graphs, plus window formulas;
//! - unit-cell templates ([`periodic`]) and finite chain complexes
//!   ([`complex`]): windows X_n (periodic boundary conditions) and Y_n
//!   (truncated), covering projections, homology over an exact field;
//! - a Mayer-Vietoris spectral sequence engine ([`mvss`]): cover by
//!   translated closed unit cells, blow-up bicomplex, pages through E-infinity,
//!   reconstruction of H(X_n), and toroidal-cycle heuristics.
//!
//! Supporting modules: [`lattice`] (Smith normal form and subgroups of Z^d),
//! [`field`] (exact coefficients), [`sparse`] (column reduction), and
//! [`formats`] (JSON documents used by the CLI).

pub mod complex;
pub mod field;
pub mod formats;
pub mod lattice;
pub mod mvss;
pub mod periodic;
pub mod report;
pub mod sparse;
pub mod wqg;

pub use field::{F46337, Field, Rational};
