//! Finite-window laboratory for colorings of shift actions of finitely
//! generated groups.
//!
//! The crate realizes Γ-ideals of finite partial colorings over `Z^d` and the
//! free groups `F_k`, tests the join, locality and extendability properties,
//! builds the product-coded local ideal obtained from a join-property ideal,
//! and runs the randomized greedy coloring procedure on finite balls. Every
//! construction comes with a brute-force oracle that re-checks it.

pub mod axioms;
pub mod coloring;
pub mod commands;
pub mod error;
pub mod group;
pub mod ideal;
pub mod join;
pub mod oracle;
pub mod packing;
pub mod radius;
pub mod reduction;
pub mod sim;

pub use coloring::{Color, PartialColoring, ProductColor};
pub use error::{Error, Result};
pub use group::{Element, Group};
pub use ideal::{Ideal, IdealKind, IdealSpec, RadiusFn};
pub use join::JoinFn;
pub use packing::RadiusSeq;
pub use radius::{Bound, Radius};
pub use reduction::ReducedIdeal;
