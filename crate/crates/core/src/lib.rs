//! Chevalley Lie algebras from irreducible root data, over ℚ or GF(p^k),
//! and recovery of a Chevalley basis from a scrambled structure-constant
//! table and a spanning set of a split Cartan subalgebra — including the
//! characteristic 2 and 3 cases where root spaces are not one-dimensional.

pub mod chevalley;
pub mod field;
pub mod liealg;
pub mod linalg;
pub mod meataxe;
pub mod poly;
pub mod rootdata;
