//! Boundary triplets and normal extensions of formally normal diagonal
//! operators over discrete measures on the complex plane.

pub mod error;
pub mod exec;
pub mod extensions;
pub mod linalg;
pub mod generator;
pub mod model;
pub mod onedim;
pub mod polar;
pub mod summation;
pub mod symbol;
pub mod vector;
pub mod vishik;

pub use error::{Error, Result};
pub use exec::Execution;
pub use generator::{AtomGenerator, AtomRule, Growth, PowerSum, Slope};
pub use model::{build_model, DiscreteModel, Tolerance};
pub use summation::Enclosure;
pub use symbol::DiagonalSymbol;
pub use vector::{ModelVector, TailTerm};
