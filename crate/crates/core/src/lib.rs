pub mod char2;
pub mod circuit;
pub mod detsym;
pub mod error;
pub mod field;
pub mod formula;
pub mod graph;
pub mod minimize;
pub mod poly;
pub mod verify;
pub mod ws;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
