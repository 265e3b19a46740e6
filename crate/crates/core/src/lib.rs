//! Exact zero-sum invariants of finite abelian groups.
//!
//! The crate computes, at desk scale, the arithmetic of the monoid of
//! zero-sum sequences `B(G₀)` over a subset `G₀` of a finite abelian group:
//! atoms and the Davenport constant, cross numbers, sets of lengths, the
//! minimal distance `min Δ(G₀)`, the elasticity `ρ(G₀)`, and group-level
//! invariants obtained by sweeping subsets up to automorphism.

pub mod atoms;
pub mod cache;
pub mod error;
pub mod group;
pub mod invariants;
pub mod lattice;
pub mod lengths;
pub mod rational;
pub mod seq;
pub mod simplex;
pub mod syslen;
mod table;
pub mod verify;

pub use atoms::{AtomSet, EnumConfig};
pub use error::{Error, Result};
pub use group::{GElement, GroupSpec};
pub use lengths::{LengthSet, RelationMatrix};
pub use rational::Rational;
pub use seq::Sequence;
