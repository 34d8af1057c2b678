//! Exact finite-level computations for torsion modules over the Iwasawa
//! algebra `Λ = Z_p[[T]]`, carried out modulo a fixed power `p^N`.
//!
//! The crate is layered bottom-up: residues ([`padic`]), matrices and Smith
//! normal form ([`matrix`]), finite abelian `p`-groups ([`group`]), power
//! series ([`lambda`]), modules and their finite levels ([`module`]),
//! growth analysis ([`tower`]) and twisted duality ([`pairing`]).

mod error;
pub mod group;
pub mod lambda;
pub mod matrix;
pub mod module;
pub mod padic;
pub mod pairing;
pub mod tower;

pub use error::{Error, Result};
