//! Desk-scale structural Ramsey theory for linearly ordered posets, lattices
//! viewed as relational structures, and multiposets over a template.
//!
//! Elements of every structure are the indices `0..n`. Partial orders are
//! stored as reflexive, transitive bitset rows; linear orders as a rank
//! permutation. All enumeration orders are deterministic.

#![allow(clippy::needless_range_loop)]

pub mod amalgamation;
pub mod arrows;
mod canon;
pub mod cli;
mod embed;
pub mod error;
pub mod gen;
pub mod io;
pub mod limits;
pub mod multiposets;
pub mod ordering_property;
pub mod param_words;
pub mod powerset_pi;
pub mod structures;
pub mod varieties;

pub use error::{Error, Result, Violation};
pub use multiposets::{Multiposet, Template};
pub use param_words::{Alphabet, Letter, ParamWord};
pub use powerset_pi::{pi, SubsetOrder};
pub use structures::{FiniteLattice, FinitePoset, LinearlyOrderedPoset, MapMode, Structure, StructureMap};
