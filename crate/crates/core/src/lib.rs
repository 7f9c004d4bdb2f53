pub mod error;
pub mod linalg;
pub mod quad_graph;
pub mod weights;
pub mod brute_force;
pub mod elliptic;
pub mod kasteleyn;
pub mod torus_spectral;
pub mod z_invariant;
pub mod suites;

pub use error::{Error, Result};
