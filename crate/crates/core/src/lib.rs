//! Krein strings and the non-local operators they generate.
//!
//! The core solves the measure ODE `φ'' = ξ² a φ − 2iξ b φ'` on atomized
//! coefficients, extracts the Weyl function `k(ξ)`, evaluates Lévy,
//! Stieltjes and exponential representations of Rogers symbols, and
//! converts between coefficient forms. Everything here is `no_std` + `alloc`.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod catalog;
pub mod piecewise;
pub mod propagator;
pub mod quadrature;
pub mod strings;
pub mod summation;
pub mod symbols;
pub mod transforms;

pub use num_complex::Complex64;


pub use catalog::{CatalogEntry, ExactSymbol};
pub use piecewise::{Piece, PieceKind, PiecewiseFn};
pub use propagator::{SolutionTrace, WeylResult};
pub use strings::{Atom, DiscretizedString, GridPolicy, StringCoefficients};
pub use transforms::{DivergenceCoefficients, EKCoefficients, GeneralCoefficients};
