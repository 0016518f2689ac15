//! Harmonic analysis on finite balls of a homogeneous tree.
//!
//! The crate discretizes the Fourier-Helgason transform on a `(q+1)`-regular
//! tree: the boundary is replaced by depth-`D` cylinder sets and the spectral
//! variable by a Gauss-Legendre rule against the Plancherel density. On top
//! of that sit pseudo-differential operators (kernels from symbols,
//! Hilbert-Schmidt and Schatten norms, traces, adjoints, products) and
//! weak-type `L^p` estimates for the resulting kernels.

pub mod boundary;
pub mod cli;
pub mod context;
pub mod error;
pub mod exec;
pub mod lp;
pub mod psdo;
pub mod rng;
pub mod spectral;
pub mod transform;
pub mod tree;

pub use context::Context;
pub use error::{Error, Result};
pub use exec::Exec;
pub use transform::{SpectralFunction, TreeFunction};
