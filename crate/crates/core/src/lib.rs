//! Exact symbolic engine for multisymplectic observable algebras and their
//! reduction along singular constraint sets.
//!
//! Everything is polynomial over the rationals: [`polyalg`] supplies the
//! coefficient ring, [`groebner`] decides ideal and submodule membership,
//! [`cartan`] implements forms, fields and the Cartan calculus, [`plectic`]
//! builds the L∞-algebra of observables, [`symmetry`] handles Lie algebra
//! actions and moment maps, and [`reduction`] decides reducibility and
//! equality in the reduced algebra.

pub mod cartan;
pub mod error;
pub mod groebner;
pub mod linalg;
pub mod plectic;
pub mod polyalg;
pub mod reduction;
pub mod symmetry;

pub use error::{Error, Result};
pub use polyalg::{rat, ratio, Chart, ChartRef, MonomialOrder, Poly, Rational};
