//! Racks of `p`-cycles in alternating groups: type-D detection, the
//! permutation-group machinery behind it, and second rack homology.

pub mod classify;
pub mod constructions;
mod decimal;
pub mod error;
pub mod gf;
pub mod groups;
pub mod homology;
pub mod numth;
pub mod perm;
pub mod rack;

pub use error::{Error, Result};
pub use groups::{OrbitVerdict, PermGroup};
pub use perm::{CycleType, Permutation};
