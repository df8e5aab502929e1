//! Exact computation in elementary linear, symplectic and orthogonal groups
//! over concrete commutative rings, with generator-word witnesses.

pub mod error;
pub mod factor;
pub mod harness;
pub mod homotopy;
pub mod json;
pub mod localglobal;
pub mod matrices;
pub mod oracle;
pub mod orthoquot;
pub mod reduce;
pub mod rings;
pub mod words;

pub use error::{Error, Result};
