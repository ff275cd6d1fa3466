//! Constructions, validity predicates and independent brute-force oracles
//! for six extremal results from olympiad mathematics:
//!
//! - [`residues`]: product of the integers `a` with `a` and `4 - a` both
//!   quadratic non-residues modulo an odd prime.
//! - [`beams`]: sparse "self-supporting" packings of 1x1xn beams in a cube.
//! - [`latticepairs`]: lattice point sets with many determinant-one pairs,
//!   Farey sequences and mediants.
//! - [`overdet`]: exact interpolation and overdetermined point sets.
//! - [`circlegeo`]: the area of the circumcenter triangle `O O1 O2` and
//!   its minimizer on an arc.
//! - [`permineq`]: the rearrangement gap bound and permutation-sum
//!   identities.
//!
//! Everything sits on the exact arithmetic in [`exactmath`].

pub mod beams;
pub mod budget;
pub mod circlegeo;
mod error;
pub mod exactmath;
pub mod latticepairs;
pub mod overdet;
pub mod permineq;
pub mod residues;

pub use budget::Budget;
pub use error::Error;
