//! Discrete dynamics of an inextensible chain with one fixed end.
//!
//! The chain has `n` links of length `1/n` joining particles `η_1 .. η_{n+1}`,
//! with `η_{n+1}` pinned at the origin. Indices follow the chain's own labels
//! throughout (see [`seq::Seq`]).

pub mod dynamics;
pub mod energy;
pub mod error;
pub mod inequalities;
pub mod report;
pub mod sampling;
pub mod seminorm;
pub mod seq;
pub mod spectral;
pub mod state;
pub mod tension;
pub mod tridiag;
pub mod weights;

pub use error::{ChainError, Result};
pub use seq::Seq;
pub use state::{ChainState, ExtendedChain, Tolerances};
pub use tension::{TensionMethod, TensionSolution};
