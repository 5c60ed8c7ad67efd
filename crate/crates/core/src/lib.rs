//! Weighted ring augmentation: exact oracles, approximation algorithms and
//! the structural machinery they rely on.

pub mod component_dp;
pub mod decomposition;
pub mod directed;
pub mod dropcalc;
pub mod error;
pub mod generate;
pub mod model;
pub mod oracle;
pub mod reduction;
pub mod solvers;
pub mod thinness;

pub use error::{Error, Result};
pub use model::{Cost, Cut, Instance, Link, LinkId, Vertex};
