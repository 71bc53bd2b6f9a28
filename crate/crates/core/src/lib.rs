//! Exact and Monte Carlo tools for positive hulls of random walks and bridges.
//!
//! [`formulas`] evaluates expectations as exact rationals from Stirling-type
//! tables in [`combinatorics`]. [`geometry`] answers cone questions for
//! concrete generator sets and [`simulation`] checks the formulas by sampling.

pub mod combinatorics;
pub mod error;
pub mod formulas;
pub mod geometry;
pub mod identities;
pub mod rational;
pub mod simulation;

pub use combinatorics::{StirlingKind, StirlingTables};
pub use error::{Error, Result};
pub use formulas::{Formulas, FormulaResult, Functional, FunctionalQuery, Indices, Model, ModelKind};
pub use rational::ExactRational;
