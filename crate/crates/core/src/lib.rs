pub mod cli;
pub mod error;
pub mod norms;
pub mod spectral;
pub mod pairs;
pub mod probes;
pub mod rational;
pub mod regime;
pub mod solver;

pub use error::{Error, Result};
