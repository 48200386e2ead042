pub mod error;
pub mod pointset;
pub mod rat;
pub mod space;

pub use error::{ClosureAxiom, QtopError, Result};
pub use pointset::PointSet;
pub use rat::Rat;
pub use space::FiniteSpace;
pub mod catalog;
pub mod borel;
pub mod quasimetric;
pub mod games;
pub mod domains;
pub mod representations;
pub mod suite;
pub mod io;
