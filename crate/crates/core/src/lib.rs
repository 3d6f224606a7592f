pub mod algebra;
pub mod cli;
pub mod covering;
pub mod error;
pub mod geometry;
pub mod homotopy;
pub mod suites;

pub use error::{Error, Result};
