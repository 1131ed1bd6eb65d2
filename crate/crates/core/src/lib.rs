//! Empirical laboratory for vector-valued maximal inequalities on finite
//! measure-preserving systems.
//!
//! The crate builds three layers:
//!
//! 1. [`line_operators`] — sublinear, translation-commuting, semilocal
//!    operator families on integer sequences (one-sided averages, one-sided
//!    maximal, uncentered maximal);
//! 2. [`transfer`] — the construction that turns a line operator into an
//!    operator on a finite measure-preserving system by evaluating it along
//!    orbits, together with the directly-defined ergodic maximal function
//!    that serves as its exact oracle;
//! 3. [`inequalities`] — empirical strong/weak constants, per-trial proof
//!    certificates for the transfer argument, and line-versus-system
//!    comparison experiments.
//!
//! Supporting modules: [`function_spaces`] (norms, level sets, exponents),
//! [`dynamics`] (finite permutation systems and orbit extraction),
//! [`report`] (JSON/CSV serialization of results).
//!
//! Everything is deterministic: ensembles are seeded, per-trial seeds are
//! derived by hashing, and parallel execution (rayon, behind the default
//! `parallel` feature) produces byte-identical results at any thread count.

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod function_spaces;
pub mod inequalities;
pub mod line_operators;
pub mod report;
pub mod seeding;
pub mod transfer;

pub use error::{Error, Result};
pub use function_spaces::{Exponent, ExponentPair, SampledSequence, VectorField, WeightedSpace};
