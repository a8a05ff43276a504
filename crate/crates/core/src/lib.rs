//! Numerical toolkit for constant-coefficient calibrations on Euclidean space.

pub mod calibrations;
pub mod cli;
pub mod config;
pub mod critical;
pub mod eds;
pub mod error;
pub mod exterior;
pub mod grassmann;
pub mod linalg;
pub mod plane;

pub use error::{Error, Result};
pub use exterior::{AltForm, SkewMap, VectorN};
pub use plane::OrientedPlane;
