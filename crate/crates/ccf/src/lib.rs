//! Complex continued fractions over the Euclidean imaginary-quadratic rings.

pub mod algorithms;
pub mod approximation;
pub mod arithmetic;
pub mod corpus;
pub mod error;
pub mod expansion;
pub mod forms;
pub mod regions;
pub mod rings;
pub mod util;

pub use error::{Error, Result};
