//! Pseudospectral simulation of mixed-volume-preserving curvature flows for
//! hypersurfaces written as radial graphs over a sphere.

pub mod analysis;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod harmonics;
pub mod io;
pub mod speeds;

pub use error::{Error, Result};
