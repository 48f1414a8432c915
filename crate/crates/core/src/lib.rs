//! Standard and relative Betti diagrams of functors from finite posets to vector spaces.
//!
//! Modules are finite-dimensional and indexed by a finite poset; all linear algebra runs
//! over a prime field GF(p).

pub mod cli;
pub mod collections;
pub mod error;
pub mod fieldlin;
pub mod homalg;
pub mod io;
pub mod pmod;
pub mod poset;
pub mod random;
pub mod relative;

pub use error::{Error, Result};
pub use fieldlin::{Field, Matrix};
pub use pmod::{BettiDiagram, PersistenceModule};
pub use poset::Poset;
