//! Cycles of compositions of resolvents of maximally monotone operators on
//! `R^n`, their gap vectors, and the Attouch-Théra duality relations that tie
//! them together.
//!
//! The main entry points are [`cycles::find_cycle`] (KM iteration on the
//! composed or averaged map), [`cycles::gap_vector`], and the verification
//! helpers in [`cycles`] and [`duality`]. The [`harness`] module drives the
//! `rcycles` command-line tool.

pub mod cycles;
pub mod duality;
pub mod error;
pub mod harness;
mod linalg;
pub mod operators;
pub mod oracles;
pub mod vectorspace;

pub use cycles::{Cycle, GapVector, MapKind, SolveReport, SolverConfig};
pub use error::{Error, Result};
pub use operators::{AffineMap, ProductOperator, ResolventOperator};
pub use vectorspace::{ProductPoint, Vector};
