//! Toric reflexive sheaves on smooth projective toric varieties, presented
//! by Weil decorations, with exact graded cohomology computed two ways.

pub mod error;
pub mod fan;
pub mod linalg;
pub mod polyhedra;
pub mod rational;

pub use error::{Error, Result};
pub use fan::{Cone, Fan};
pub use polyhedra::{Divisor, ExtDivisor, Inequality, LatticePolyhedron};
pub mod cellcx;
pub mod cohomology;
pub mod decoration;
pub mod extension;
pub mod fixtures;
pub mod io;
pub mod morphism;

pub use decoration::{MaterialisedDecoration, StratumSpec, Twist, WeilDecoration};
