pub mod arith;
pub mod cone;
pub mod db;
pub mod error;
pub mod facelattice;
pub mod forms;
pub mod harness;
pub mod intmat;
pub mod jsonfmt;
pub mod equivalence;
pub mod minvec;
pub mod verify;
pub mod voronoi;

pub use error::{Error, Result};
