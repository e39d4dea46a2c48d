//! Finite p-groups given by power-commutator presentations.
//!
//! Conventions: `x^g = g^-1 x g`, `[x, y] = x^-1 y^-1 x y`. Modules carry a
//! right action by matrices on row vectors, `m^g = m * A_g`.

pub mod autom;
pub mod catalog;
pub mod deriv;
pub mod error;
pub mod field;
pub mod fpmod;
pub mod group;
pub mod oracle;
pub mod pc;
pub mod series;

pub use error::{Error, Result};
pub use group::{Group, GroupHom};
pub use pc::{Element, PcPresentation};
