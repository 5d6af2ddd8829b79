pub mod combinatorics;
pub mod density;
pub mod error;
pub mod fc;
pub mod figures;
#[cfg(feature = "montecarlo")]
pub mod ginibre;
pub mod mellin;
pub mod moments;
pub mod quadrature;
pub mod raney;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
